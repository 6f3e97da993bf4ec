//! Monte-Carlo execution, grid oracle and CSV output.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{CylinderBlocker, Vec3};
use crate::sca::{self, ScaOutcome, SearchSpace};
use crate::system::{sample_orientation, Scene, SystemParams, UserState};

use super::config::{ScenarioConfig, ScenarioKind};
use super::problem::{Decision, Problem};

/// Largest search dimension the exhaustive oracle accepts.
pub const ORACLE_MAX_DIMS: usize = 4;

/// How each trial is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Sca,
    Grid,
}

/// Aggregate over the trials of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_variable: String,
    pub sweep_value: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub best: Decision,
    pub los_blocked_fraction: f64,
    /// Objective evaluations summed over trials.
    pub evaluations: usize,
    pub failed_trials: usize,
    pub note: String,
    pub wall_ms: Option<f64>,
}

/// Best-so-far statistics across trials at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub sweep_variable: String,
    pub sweep_value: f64,
    pub iteration: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Result of one trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub evaluations: usize,
    pub los_blocked_fraction: f64,
    /// Present for optimizer runs.
    pub sca: Option<ScaOutcome>,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub traces: Vec<TraceRow>,
}

/// Exhaustive search result.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub evaluations: usize,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` derived from `master`.
///
/// Independent of the sweep point and of the scenario kind: every sweep point and
/// every baseline sees the same scenes and optimizer draws for a given trial.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    splitmix64(splitmix64(master) ^ trial as u64)
}

/// Scene of one Monte-Carlo trial.
pub fn trial_scene(cfg: &ScenarioConfig, base: &Scene, trial: usize) -> Scene {
    let mut scene = base.clone();
    if !cfg.monte_carlo.randomize {
        return scene;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.monte_carlo.seed, trial));
    for user in &mut scene.users {
        let (az, polar) = sample_orientation(&mut rng);
        let body = user.body.is_some();
        *user = UserState::holding_at(user.device_pos, az, polar, user.receiver);
        if !body {
            user.body = None;
        }
    }
    let r = CylinderBlocker::DEFAULT_RADIUS;
    let mut placed = 0;
    while placed < cfg.monte_carlo.random_blockers {
        let x = rng.random_range(r..=scene.room.x - r);
        let y = rng.random_range(r..=scene.room.y - r);
        let clear = scene.users.iter().all(|u| {
            let dx = u.device_pos.x - x;
            let dy = u.device_pos.y - y;
            dx.hypot(dy) > r + 0.05
        });
        if clear {
            scene.blockers.push(CylinderBlocker {
                base_center: Vec3::new(x, y, 0.0),
                radius: r,
                height: CylinderBlocker::DEFAULT_HEIGHT,
            });
            placed += 1;
        }
    }
    scene
}

/// Default oracle resolution: 41 points per angle, 21 per LC index.
pub fn default_resolution(space: &SearchSpace) -> Vec<usize> {
    space
        .dims
        .iter()
        .map(|d| if d.name.starts_with("eta") { 21 } else { 41 })
        .collect()
}

/// Scans a full grid and keeps the first point with the highest value.
///
/// Refused for more than [`ORACLE_MAX_DIMS`] dimensions.
pub fn oracle_grid_search<F>(space: &SearchSpace, resolution: &[usize], objective: F) -> Result<GridOutcome>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if space.len() > ORACLE_MAX_DIMS {
        return Err(Error::Refused(format!(
            "grid oracle limited to {ORACLE_MAX_DIMS} dimensions, problem has {}",
            space.len()
        )));
    }
    if resolution.len() != space.len() || resolution.contains(&0) {
        return Err(Error::validation(
            "oracle.resolution",
            format!("need {} positive counts", space.len()),
        ));
    }
    let total: usize = resolution.iter().product();
    let point = |mut idx: usize| -> Vec<f64> {
        let mut x = vec![0.0; space.len()];
        for (i, d) in space.dims.iter().enumerate().rev() {
            let n = resolution[i];
            let j = idx % n;
            idx /= n;
            x[i] = if n == 1 {
                d.lower
            } else {
                d.lower + (d.upper - d.lower) * j as f64 / (n - 1) as f64
            };
        }
        x
    };
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|i| match objective(&point(i)) {
            Ok(v) if !v.is_nan() => v,
            _ => f64::NEG_INFINITY,
        })
        .collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    Ok(GridOutcome {
        best_position: point(best),
        best_fitness: values[best],
        evaluations: total,
    })
}

/// Runs every trial of one sweep point.
pub fn run_trials(
    cfg: &ScenarioConfig,
    params: &SystemParams,
    scene: &Scene,
    zeta: f64,
    solver: Solver,
) -> Vec<Result<TrialResult>> {
    (0..cfg.monte_carlo.trials)
        .into_par_iter()
        .map(|trial| {
            let scene = trial_scene(cfg, scene, trial);
            let problem = Problem::new(cfg, params, &scene, zeta)?;
            let blocked = problem.los_blocked_fraction()?;
            let objective = |x: &[f64]| problem.evaluate(x);
            let result = match solver {
                Solver::Sca => {
                    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.optimizer.seed, trial));
                    rng.set_stream(1);
                    let out = sca::run(problem.space(), objective, &cfg.optimizer.sca, rng)?;
                    TrialResult {
                        best_position: out.best_position.clone(),
                        best_fitness: out.best_fitness,
                        evaluations: out.evaluations,
                        los_blocked_fraction: blocked,
                        sca: Some(out),
                    }
                }
                Solver::Grid => {
                    let res = cfg
                        .oracle_resolution
                        .clone()
                        .unwrap_or_else(|| default_resolution(problem.space()));
                    let out = oracle_grid_search(problem.space(), &res, objective)?;
                    TrialResult {
                        best_position: out.best_position,
                        best_fitness: out.best_fitness,
                        evaluations: out.evaluations,
                        los_blocked_fraction: blocked,
                        sca: None,
                    }
                }
            };
            if !result.best_fitness.is_finite() {
                return Err(Error::Contract("no feasible point was evaluated".into()));
            }
            Ok(result)
        })
        .collect()
}

fn note_for(cfg: &ScenarioConfig) -> String {
    match cfg.kind {
        ScenarioKind::WavelengthSweep => {
            "LC gain scales as 1/wavelength so 670 nm does not outperform 510 nm".into()
        }
        _ => String::new(),
    }
}

/// Sweep points as `(variable name, value, params, scene, zeta)`.
fn sweep_points(cfg: &ScenarioConfig) -> Result<Vec<(String, f64, SystemParams, Scene, f64)>> {
    match &cfg.sweep {
        None => Ok(vec![(
            "none".into(),
            0.0,
            cfg.params.clone(),
            cfg.scene.clone(),
            cfg.zeta,
        )]),
        Some(s) => s
            .values
            .iter()
            .map(|v| {
                let (p, sc, z) = cfg.at_sweep_point(s.variable, *v)?;
                Ok((s.variable.name().to_string(), *v, p, sc, z))
            })
            .collect(),
    }
}

/// Runs the scenario with the optimizer, or the grid oracle for `oracle_grid`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    let solver = if cfg.kind == ScenarioKind::OracleGrid {
        Solver::Grid
    } else {
        Solver::Sca
    };
    run_with(cfg, solver)
}

/// Runs the scenario's problem with an explicit solver.
pub fn run_with(cfg: &ScenarioConfig, solver: Solver) -> Result<RunReport> {
    let mut report = RunReport::default();
    let note = note_for(cfg);
    for (name, value, params, scene, zeta) in sweep_points(cfg)? {
        let start = Instant::now();
        let trials = run_trials(cfg, &params, &scene, zeta, solver);
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        if trials.iter().all(|t| t.is_err()) {
            if let Some(Err(e)) = trials.into_iter().next() {
                return Err(e);
            }
            unreachable!("at least one trial");
        }
        let ok: Vec<&TrialResult> = trials.iter().filter_map(|t| t.as_ref().ok()).collect();
        let failed = cfg.monte_carlo.trials - ok.len();
        let fits: Vec<f64> = ok.iter().map(|t| t.best_fitness).collect();
        let mean = fits.iter().sum::<f64>() / fits.len() as f64;
        let min = fits.iter().copied().fold(f64::INFINITY, f64::min);
        let max = fits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best_trial = ok
            .iter()
            .fold(None::<&&TrialResult>, |acc, t| match acc {
                Some(a) if a.best_fitness >= t.best_fitness => Some(a),
                _ => Some(t),
            })
            .expect("at least one trial");
        let problem = Problem::new(cfg, &params, &scene, zeta)?;
        report.rows.push(ResultRow {
            sweep_variable: name.clone(),
            sweep_value: value,
            mean,
            min,
            max,
            best: problem.decode(&best_trial.best_position),
            los_blocked_fraction: ok.iter().map(|t| t.los_blocked_fraction).sum::<f64>()
                / ok.len() as f64,
            evaluations: ok.iter().map(|t| t.evaluations).sum(),
            failed_trials: failed,
            note: note.clone(),
            wall_ms: Some(elapsed),
        });
        let runs: Vec<&ScaOutcome> = ok.iter().filter_map(|t| t.sca.as_ref()).collect();
        if let Some(first) = runs.first() {
            for it in 0..first.trace.len() {
                let vals: Vec<f64> = runs.iter().map(|r| r.trace[it]).collect();
                report.traces.push(TraceRow {
                    sweep_variable: name.clone(),
                    sweep_value: value,
                    iteration: it,
                    mean: vals.iter().sum::<f64>() / vals.len() as f64,
                    min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                    max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                });
            }
        }
    }
    Ok(report)
}

fn num(v: f64) -> String {
    format!("{v:.8e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_error(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))
}

pub const RESULT_COLUMNS: [&str; 12] = [
    "sweep_variable",
    "sweep_value",
    "mean",
    "min",
    "max",
    "best_omega",
    "best_gamma",
    "best_eta_c",
    "los_blocked_fraction",
    "evaluations",
    "failed_trials",
    "note",
];

/// Writes result rows. `wall_ms` is appended only when `timing` is set.
pub fn emit_csv(rows: &[ResultRow], path: &Path, timing: bool) -> Result<()> {
    let mut w = writer(path)?;
    let mut header: Vec<&str> = RESULT_COLUMNS.to_vec();
    if timing {
        header.push("wall_ms");
    }
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        let mut rec = vec![
            r.sweep_variable.clone(),
            num(r.sweep_value),
            num(r.mean),
            num(r.min),
            num(r.max),
            opt(r.best.omega),
            opt(r.best.gamma),
            r.best.eta_c.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";"),
            num(r.los_blocked_fraction),
            r.evaluations.to_string(),
            r.failed_trials.to_string(),
            r.note.clone(),
        ];
        if timing {
            rec.push(opt(r.wall_ms));
        }
        w.write_record(&rec).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes convergence traces.
pub fn emit_trace_csv(rows: &[TraceRow], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["sweep_variable", "sweep_value", "iteration", "mean", "min", "max"])
        .map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record([
            r.sweep_variable.clone(),
            num(r.sweep_value),
            r.iteration.to_string(),
            num(r.mean),
            num(r.min),
            num(r.max),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::parse_config;

    #[test]
    fn grid_finds_first_maximum() {
        let space = SearchSpace::new(vec![
            crate::sca::Dimension::new("x", -1.0, 1.0),
            crate::sca::Dimension::new("y", -1.0, 1.0),
        ])
        .unwrap();
        let out = oracle_grid_search(&space, &[5, 5], |x: &[f64]| {
            Ok(-(x[0] - 0.5).powi(2) - (x[1] + 0.5).powi(2))
        })
        .unwrap();
        assert_eq!(out.best_position, vec![0.5, -0.5]);
        assert_eq!(out.evaluations, 25);
        // Flat objective: the first grid point wins.
        let flat = oracle_grid_search(&space, &[3, 3], |_: &[f64]| Ok(1.0)).unwrap();
        assert_eq!(flat.best_position, vec![-1.0, -1.0]);
    }

    #[test]
    fn grid_refuses_large_problems() {
        let space = SearchSpace::mirror_and_lc_per_user(3, 1.5, 1.7);
        let res = vec![2; space.len()];
        let err = oracle_grid_search(&space, &res, |_: &[f64]| Ok(0.0)).unwrap_err();
        assert!(matches!(err, Error::Refused(_)));
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
        assert_eq!(trial_seed(7, 3), trial_seed(7, 3));
    }

    #[test]
    fn randomized_scenes_keep_devices_clear() {
        let cfg = parse_config("[monte_carlo]\nrandomize = true\nrandom_blockers = 6\ntrials = 4\n").unwrap();
        for t in 0..20 {
            let s = trial_scene(&cfg, &cfg.scene, t);
            assert_eq!(s.blockers.len(), 6);
            s.validate().unwrap();
            let u = &s.users[0];
            assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&u.polar));
        }
        let a = trial_scene(&cfg, &cfg.scene, 2);
        let b = trial_scene(&cfg, &cfg.scene, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn evaluation_count_per_trial() {
        let cfg = parse_config(
            "[optimizer]\niterations = 20\nagents = 3\n[monte_carlo]\ntrials = 2\n",
        )
        .unwrap();
        let report = run_scenario(&cfg).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].evaluations, 2 * 3 * 21);
        assert_eq!(report.traces.len(), 21);
        assert_eq!(report.rows[0].failed_trials, 0);
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = parse_config(
            "[optimizer]\niterations = 15\n[monte_carlo]\ntrials = 3\nrandomize = true\n\
             [sweep]\nvariable = \"optical_power\"\nvalues = [1.0, 4.0]\n",
        )
        .unwrap();
        let strip = |mut r: RunReport| {
            r.rows.iter_mut().for_each(|row| row.wall_ms = None);
            r
        };
        let a = strip(run_scenario(&cfg).unwrap());
        let b = strip(run_scenario(&cfg).unwrap());
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.traces, b.traces);
    }

    #[test]
    fn csv_layout() {
        let cfg = parse_config("kind = \"wavelength_sweep\"\n[optimizer]\niterations = 5\n").unwrap();
        let report = run_scenario(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.csv");
        emit_csv(&report.rows, &path, false).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RESULT_COLUMNS.join(","));
        assert_eq!(text.lines().count(), 3);
        assert!(!text.contains('\r'));
        assert!(text.contains("wavelength,5.10000000e-7"));
        emit_csv(&report.rows, &path, true).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.lines().next().unwrap().ends_with(",wall_ms"));
    }
}
