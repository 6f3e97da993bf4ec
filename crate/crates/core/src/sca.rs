//! Sine-cosine population search over a box.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl Dimension {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self { name: name.into(), lower, upper }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::validation("search_space", "needs at least one dimension"));
        }
        for d in &dims {
            if !(d.lower.is_finite() && d.upper.is_finite() && d.lower < d.upper) {
                return Err(Error::validation(
                    format!("search_space.{}", d.name),
                    format!("lower {} must be below upper {}", d.lower, d.upper),
                ));
            }
        }
        Ok(Self { dims })
    }

    /// Roll, yaw and LC index.
    pub fn mirror_and_lc(eta_lo: f64, eta_hi: f64) -> Self {
        Self {
            dims: vec![
                Dimension::new("omega", -FRAC_PI_2, FRAC_PI_2),
                Dimension::new("gamma", -FRAC_PI_2, FRAC_PI_2),
                Dimension::new("eta_c", eta_lo, eta_hi),
            ],
        }
    }

    /// Roll and yaw only.
    pub fn mirror_only() -> Self {
        Self {
            dims: vec![
                Dimension::new("omega", -FRAC_PI_2, FRAC_PI_2),
                Dimension::new("gamma", -FRAC_PI_2, FRAC_PI_2),
            ],
        }
    }

    /// LC index only.
    pub fn lc_only(eta_lo: f64, eta_hi: f64) -> Self {
        Self { dims: vec![Dimension::new("eta_c", eta_lo, eta_hi)] }
    }

    /// Roll, yaw and one LC index per user.
    pub fn mirror_and_lc_per_user(users: usize, eta_lo: f64, eta_hi: f64) -> Self {
        let mut dims = vec![
            Dimension::new("omega", -FRAC_PI_2, FRAC_PI_2),
            Dimension::new("gamma", -FRAC_PI_2, FRAC_PI_2),
        ];
        dims.extend((0..users).map(|u| Dimension::new(format!("eta_c[{u}]"), eta_lo, eta_hi)));
        Self { dims }
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.len()
            && self.dims.iter().zip(x).all(|(d, v)| (d.lower..=d.upper).contains(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaConfig {
    pub agents: usize,
    pub iterations: usize,
    pub a: f64,
}

impl Default for ScaConfig {
    fn default() -> Self {
        Self { agents: 2, iterations: 400, a: 2.0 }
    }
}

impl ScaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.agents == 0 {
            return Err(Error::validation("optimizer.agents", "must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(Error::validation("optimizer.iterations", "must be at least 1"));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::validation("optimizer.a", "must be positive"));
        }
        Ok(())
    }
}

/// Population, fitness and incumbent of a run in progress.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub agents: Vec<Vec<f64>>,
    /// `None` marks an agent whose last evaluation failed.
    pub fitness: Vec<Option<f64>>,
    pub destination: Vec<f64>,
    pub destination_fitness: f64,
    pub t: usize,
    pub a: f64,
    pub iterations: usize,
    pub rng: ChaCha8Rng,
    pub evaluations: usize,
}

fn evaluate<F>(objective: &F, x: &[f64], evaluations: &mut usize) -> Option<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    *evaluations += 1;
    objective(x).ok().filter(|v| !v.is_nan())
}

/// Places `n_agents` uniformly in the box and picks the fittest as destination.
pub fn initialize<F>(
    space: &SearchSpace,
    cfg: &ScaConfig,
    mut rng: ChaCha8Rng,
    objective: &F,
) -> SearchState
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let agents: Vec<Vec<f64>> = (0..cfg.agents)
        .map(|_| {
            space
                .dims
                .iter()
                .map(|d| rng.random_range(d.lower..d.upper))
                .collect()
        })
        .collect();
    let mut evaluations = 0;
    let fitness: Vec<Option<f64>> = agents
        .iter()
        .map(|x| evaluate(objective, x, &mut evaluations))
        .collect();
    let mut destination = agents[0].clone();
    let mut destination_fitness = f64::NEG_INFINITY;
    for (x, f) in agents.iter().zip(&fitness) {
        if let Some(f) = *f {
            if f > destination_fitness {
                destination_fitness = f;
                destination = x.clone();
            }
        }
    }
    SearchState {
        agents,
        fitness,
        destination,
        destination_fitness,
        t: 0,
        a: cfg.a,
        iterations: cfg.iterations,
        rng,
        evaluations,
    }
}

/// Linearly decaying step amplitude.
pub fn r1_schedule(t: usize, a: f64, iterations: usize) -> f64 {
    a - t as f64 * a / iterations as f64
}

/// One sine-cosine move of coordinate `s` toward `dest`.
pub fn sine_cosine_step(s: f64, dest: f64, r1: f64, r2: f64, r3: f64, r4: f64) -> f64 {
    let wave = if r4 >= 0.5 { r2.cos() } else { r2.sin() };
    s + r1 * wave * (r3 * dest - s).abs()
}

/// Advances the state by one iteration; returns how many coordinate moves had a
/// step multiplier above one in magnitude.
pub fn update_agents<F>(state: &mut SearchState, space: &SearchSpace, objective: &F) -> usize
where
    F: Fn(&[f64]) -> Result<f64>,
{
    state.t += 1;
    let r1 = r1_schedule(state.t, state.a, state.iterations);
    let mut overshoots = 0;
    let mut proposals = Vec::with_capacity(state.agents.len());
    for agent in &state.agents {
        let moved: Vec<f64> = agent
            .iter()
            .zip(&state.destination)
            .zip(&space.dims)
            .map(|((&s, &d), dim)| {
                let r2 = state.rng.random_range(0.0..2.0 * PI);
                let r3 = state.rng.random_range(0.0..2.0);
                let r4: f64 = state.rng.random();
                let wave = if r4 >= 0.5 { r2.cos() } else { r2.sin() };
                if (r1 * wave).abs() > 1.0 {
                    overshoots += 1;
                }
                sine_cosine_step(s, d, r1, r2, r3, r4).clamp(dim.lower, dim.upper)
            })
            .collect();
        proposals.push(moved);
    }
    for (n, x) in proposals.into_iter().enumerate() {
        match evaluate(objective, &x, &mut state.evaluations) {
            Some(f) => {
                state.agents[n] = x;
                state.fitness[n] = Some(f);
            }
            None => state.fitness[n] = None,
        }
    }
    for (x, f) in state.agents.iter().zip(&state.fitness) {
        if let Some(f) = *f {
            if f > state.destination_fitness {
                state.destination_fitness = f;
                state.destination = x.clone();
            }
        }
    }
    overshoots
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Destination fitness after initialisation and after each iteration.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    /// Overshooting coordinate moves per iteration.
    pub overshoots: Vec<usize>,
}

/// Runs the full search and maximises `objective`.
pub fn run<F>(space: &SearchSpace, objective: F, cfg: &ScaConfig, rng: ChaCha8Rng) -> Result<ScaOutcome>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    cfg.validate()?;
    let mut state = initialize(space, cfg, rng, &objective);
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    let mut overshoots = Vec::with_capacity(cfg.iterations);
    trace.push(state.destination_fitness);
    while state.t < cfg.iterations {
        overshoots.push(update_agents(&mut state, space, &objective));
        trace.push(state.destination_fitness);
    }
    Ok(ScaOutcome {
        best_position: state.destination,
        best_fitness: state.destination_fitness,
        trace,
        evaluations: state.evaluations,
        overshoots,
    })
}
