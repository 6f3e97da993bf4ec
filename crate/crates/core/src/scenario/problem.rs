//! Objective functions handed to the optimizer.

use crate::channel::{los_gain, total_gain, ChannelGain, LosMode, PathSet};
use crate::error::{Error, Result};
use crate::objectives::{achievable_rate, energy_efficiency, noma_sum_rate, wall_rate, NomaConfig, PowerModel};
use crate::optics::{LcState, Receiver};
use crate::sca::SearchSpace;
use crate::system::{los_indicator, Scene, SystemParams};

use super::config::{ScenarioConfig, ScenarioKind};

/// Decision variables decoded from a search vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Decision {
    pub omega: Option<f64>,
    pub gamma: Option<f64>,
    pub eta_c: Vec<f64>,
}

/// One optimization problem at a fixed scene and parameter set.
#[derive(Debug, Clone)]
pub struct Problem {
    kind: ScenarioKind,
    params: SystemParams,
    scene: Scene,
    los_mode: LosMode,
    noma: Option<NomaConfig>,
    space: SearchSpace,
}

impl Problem {
    /// Builds the objective of `cfg.problem` for the given scene and parameters.
    pub fn new(cfg: &ScenarioConfig, params: &SystemParams, scene: &Scene, zeta: f64) -> Result<Self> {
        let kind = cfg.problem;
        let (lo, hi) = (params.eta_ordinary, params.eta_extraordinary);
        let users = scene.users.len();
        let space = match kind {
            ScenarioKind::RateP0
            | ScenarioKind::EeVsK
            | ScenarioKind::RateVsK
            | ScenarioKind::WavelengthSweep => SearchSpace::mirror_and_lc(lo, hi),
            ScenarioKind::WallBaseline | ScenarioKind::LcLosBaseline => SearchSpace::lc_only(lo, hi),
            ScenarioKind::RisOnlyBaseline => SearchSpace::mirror_only(),
            ScenarioKind::NomaMultiuser => SearchSpace::mirror_and_lc_per_user(users, lo, hi),
            ScenarioKind::ConvergenceTrace | ScenarioKind::OracleGrid => {
                return Err(Error::Contract(format!("{} is not an objective", kind.name())))
            }
        };
        let space = SearchSpace::new(space.dims)?;
        let noma = match kind {
            ScenarioKind::NomaMultiuser => Some(NomaConfig::new(zeta, users)?),
            _ => None,
        };
        Ok(Self {
            kind,
            params: params.clone(),
            scene: scene.clone(),
            los_mode: cfg.los_mode,
            noma,
            space,
        })
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn decode(&self, x: &[f64]) -> Decision {
        let mirror = self.space.dims.first().is_some_and(|d| d.name == "omega");
        if mirror {
            Decision {
                omega: Some(x[0]),
                gamma: Some(x[1]),
                eta_c: x[2..].to_vec(),
            }
        } else {
            Decision {
                omega: None,
                gamma: None,
                eta_c: x.to_vec(),
            }
        }
    }

    fn path_set(&self) -> PathSet {
        match self.kind {
            ScenarioKind::WallBaseline => PathSet::Wall,
            ScenarioKind::LcLosBaseline => PathSet::LosOnly,
            _ => PathSet::Ris,
        }
    }

    /// Scene with the decision applied, plus one receiver per user.
    fn configured(&self, x: &[f64]) -> Result<Scene> {
        if x.len() != self.space.len() {
            return Err(Error::Contract(format!(
                "expected {} variables, got {}",
                self.space.len(),
                x.len()
            )));
        }
        let d = self.decode(x);
        let mut scene = self.scene.clone();
        if let (Some(omega), Some(gamma)) = (d.omega, d.gamma) {
            scene.mirror_array.roll = omega;
            scene.mirror_array.yaw = gamma;
        }
        for (i, user) in scene.users.iter_mut().enumerate() {
            user.receiver = match d.eta_c.get(i).or(d.eta_c.first()) {
                Some(eta) => Receiver::LiquidCrystal(LcState::from_refractive_index(*eta, &self.params)?),
                None => Receiver::Plain,
            };
        }
        Ok(scene)
    }

    /// Channels of all users under decision `x`.
    pub fn gains(&self, x: &[f64]) -> Result<Vec<ChannelGain>> {
        let scene = self.configured(x)?;
        scene
            .users
            .iter()
            .map(|u| total_gain(&scene, u, &self.params, self.path_set(), self.los_mode))
            .collect()
    }

    /// Objective value; larger is better.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let scene = self.configured(x)?;
        let path_set = self.path_set();
        let user = &scene.users[0];
        match self.kind {
            ScenarioKind::NomaMultiuser => {
                let noma = self.noma.as_ref().expect("noma config");
                let mut pairs = scene
                    .users
                    .iter()
                    .map(|u| {
                        total_gain(&scene, u, &self.params, path_set, self.los_mode)
                            .map(|g| (g, u.receiver))
                    })
                    .collect::<Result<Vec<_>>>()?;
                pairs.sort_by(|a, b| a.0.h_total.total_cmp(&b.0.h_total));
                let (gains, receivers): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
                noma_sum_rate(&gains, &receivers, noma, &self.params)
            }
            ScenarioKind::WallBaseline => {
                let g = total_gain(&scene, user, &self.params, path_set, self.los_mode)?;
                wall_rate(&g, &user.receiver, &self.params)
            }
            ScenarioKind::EeVsK => {
                let g = total_gain(&scene, user, &self.params, path_set, self.los_mode)?;
                let rate = achievable_rate(&g, &user.receiver, &self.params)?;
                let pm = PowerModel::new(&self.params, scene.mirror_array.count(), true);
                energy_efficiency(rate, &pm)
            }
            _ => {
                let g = total_gain(&scene, user, &self.params, path_set, self.los_mode)?;
                achievable_rate(&g, &user.receiver, &self.params)
            }
        }
    }

    /// Share of users whose LoS link is geometrically blocked or too weak.
    pub fn los_blocked_fraction(&self) -> Result<f64> {
        let mut blocked = 0usize;
        for u in &self.scene.users {
            let h = los_gain(&self.scene, u, &self.params)?;
            if los_indicator(&self.scene, u, &self.params, self.params.optical_power * h) == 0 {
                blocked += 1;
            }
        }
        Ok(blocked as f64 / self.scene.users.len() as f64)
    }
}
