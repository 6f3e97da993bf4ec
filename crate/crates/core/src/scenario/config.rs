//! TOML scenario files.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::channel::LosMode;
use crate::error::{Error, Result};
use crate::geometry::{CylinderBlocker, Vec3};
use crate::optics::Receiver;
use crate::sca::ScaConfig;
use crate::system::{MirrorArray, PowerBudget, Scene, SystemParams, UserState, WallPanel};

/// Experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    RateP0,
    WallBaseline,
    RisOnlyBaseline,
    LcLosBaseline,
    NomaMultiuser,
    EeVsK,
    RateVsK,
    WavelengthSweep,
    ConvergenceTrace,
    OracleGrid,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::RateP0 => "rate_p0",
            Self::WallBaseline => "wall_baseline",
            Self::RisOnlyBaseline => "ris_only_baseline",
            Self::LcLosBaseline => "lc_los_baseline",
            Self::NomaMultiuser => "noma_multiuser",
            Self::EeVsK => "ee_vs_k",
            Self::RateVsK => "rate_vs_k",
            Self::WavelengthSweep => "wavelength_sweep",
            Self::ConvergenceTrace => "convergence_trace",
            Self::OracleGrid => "oracle_grid",
        }
    }

    /// True for kinds that define an objective of their own.
    pub fn is_problem(self) -> bool {
        !matches!(self, Self::ConvergenceTrace | Self::OracleGrid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum LosSetting {
    Geometric,
    Unblocked,
    Off,
}

impl From<LosSetting> for LosMode {
    fn from(s: LosSetting) -> Self {
        match s {
            LosSetting::Geometric => LosMode::Geometric,
            LosSetting::Unblocked => LosMode::Unblocked,
            LosSetting::Off => LosMode::Off,
        }
    }
}

/// Parameter that a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    OpticalPower,
    Wavelength,
    MirrorCount,
    ElectricField,
    VApplied,
    ReflectivityRis,
    ReflectivityWall,
    Zeta,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            Self::OpticalPower => "optical_power",
            Self::Wavelength => "wavelength",
            Self::MirrorCount => "mirror_count",
            Self::ElectricField => "electric_field",
            Self::VApplied => "v_applied",
            Self::ReflectivityRis => "reflectivity_ris",
            Self::ReflectivityWall => "reflectivity_wall",
            Self::Zeta => "zeta",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub trials: usize,
    pub seed: u64,
    /// Re-draw device orientations and external blockers per trial.
    pub randomize: bool,
    /// Number of external blockers dropped per trial when randomizing.
    pub random_blockers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub sca: ScaConfig,
    pub seed: u64,
}

/// Fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Objective used by `convergence_trace` and `oracle_grid`; equals `kind` otherwise.
    pub problem: ScenarioKind,
    pub los_mode: LosMode,
    pub params: SystemParams,
    pub scene: Scene,
    pub sweep: Option<Sweep>,
    pub monte_carlo: MonteCarlo,
    pub optimizer: OptimizerSettings,
    pub zeta: f64,
    pub oracle_resolution: Option<Vec<usize>>,
    pub output: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Raw file layout
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Option<ScenarioKind>,
    problem: Option<ScenarioKind>,
    los: Option<LosSetting>,
    output: Option<PathBuf>,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    power: RawPower,
    #[serde(default)]
    scene: RawScene,
    sweep: Option<RawSweep>,
    #[serde(default)]
    monte_carlo: RawMonteCarlo,
    #[serde(default)]
    optimizer: RawOptimizer,
    #[serde(default)]
    noma: RawNoma,
    #[serde(default)]
    oracle: RawOracle,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    half_power_semiangle_deg: Option<f64>,
    pd_area: Option<f64>,
    optical_filter_gain: Option<f64>,
    concentrator_ref_index: Option<f64>,
    fov_deg: Option<f64>,
    reflectivity_wall: Option<f64>,
    reflectivity_ris: Option<f64>,
    eta_air: Option<f64>,
    eta_extraordinary: Option<f64>,
    eta_ordinary: Option<f64>,
    v_threshold: Option<f64>,
    v_zero: Option<f64>,
    v_applied: Option<f64>,
    lc_thickness: Option<f64>,
    wavelength: Option<f64>,
    electro_optic_coeff: Option<f64>,
    electric_field: Option<f64>,
    bandwidth: Option<f64>,
    optical_power: Option<f64>,
    elec_to_opt_ratio: Option<f64>,
    responsivity: Option<f64>,
    noise_psd: Option<f64>,
    sensitivity_dbm: Option<f64>,
    dc_bias: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPower {
    dac: Option<f64>,
    filter: Option<f64>,
    power_amplifier: Option<f64>,
    led_driver: Option<f64>,
    tx_circuit: Option<f64>,
    mirror_unit: Option<f64>,
    adc: Option<f64>,
    tia: Option<f64>,
    lc: Option<f64>,
    rx_circuit: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    room: Option<[f64; 3]>,
    ap_pos: Option<[f64; 3]>,
    users: Option<Vec<RawUser>>,
    #[serde(default)]
    blockers: Vec<RawBlocker>,
    #[serde(default)]
    mirror_array: RawMirrorArray,
    #[serde(default)]
    wall_panel: RawWallPanel,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUser {
    position: [f64; 3],
    #[serde(default)]
    azimuth_deg: f64,
    #[serde(default)]
    polar_deg: f64,
    #[serde(default = "yes")]
    body: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlocker {
    position: [f64; 2],
    radius: Option<f64>,
    height: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMirrorArray {
    rows: Option<usize>,
    cols: Option<usize>,
    count: Option<usize>,
    element_side: Option<f64>,
    origin: Option<[f64; 3]>,
    roll_deg: Option<f64>,
    yaw_deg: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWallPanel {
    origin: Option<[f64; 3]>,
    width: Option<f64>,
    height: Option<f64>,
    patch_rows: Option<usize>,
    patch_cols: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: SweepVariable,
    start: Option<f64>,
    stop: Option<f64>,
    steps: Option<usize>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonteCarlo {
    trials: Option<usize>,
    seed: Option<u64>,
    randomize: Option<bool>,
    random_blockers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptimizer {
    agents: Option<usize>,
    iterations: Option<usize>,
    a: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoma {
    zeta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    resolution: Option<Vec<usize>>,
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

pub const DEFAULT_USER_POS: [f64; 3] = [1.0, 2.0, UserState::DEVICE_HEIGHT];
pub const DEFAULT_USER_AZIMUTH_DEG: f64 = 180.0;
pub const DEFAULT_USER_POLAR_DEG: f64 = 41.0;
pub const DEFAULT_SEED: u64 = 2024;

/// Reads and validates a scenario file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

/// Parses and validates scenario text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        path: PathBuf::from("<input>"),
        message: e.to_string(),
    })?;
    build(raw)
}

fn build(raw: RawConfig) -> Result<ScenarioConfig> {
    let kind = raw.kind.unwrap_or(ScenarioKind::RateP0);
    let problem = match (kind.is_problem(), raw.problem) {
        (true, None) => kind,
        (true, Some(p)) if p == kind => kind,
        (true, Some(_)) => {
            return Err(Error::validation(
                "problem",
                "only convergence_trace and oracle_grid take a separate problem",
            ))
        }
        (false, None) => ScenarioKind::RateP0,
        (false, Some(p)) if p.is_problem() => p,
        (false, Some(p)) => {
            return Err(Error::validation(
                "problem",
                format!("{} has no objective of its own", p.name()),
            ))
        }
    };
    let los_mode = match (problem, raw.los) {
        (ScenarioKind::LcLosBaseline, Some(LosSetting::Unblocked) | None) => LosMode::Unblocked,
        (ScenarioKind::LcLosBaseline, Some(_)) => {
            return Err(Error::validation(
                "los",
                "lc_los_baseline always uses an unblocked LoS path",
            ))
        }
        (_, Some(s)) => s.into(),
        (_, None) => LosMode::Geometric,
    };

    let params = build_params(&raw.params, &raw.power);
    params.validate()?;
    let scene = build_scene(&raw.scene)?;
    scene.validate()?;

    let mc = MonteCarlo {
        trials: raw.monte_carlo.trials.unwrap_or(1),
        seed: raw.monte_carlo.seed.unwrap_or(DEFAULT_SEED),
        randomize: raw.monte_carlo.randomize.unwrap_or(false),
        random_blockers: raw.monte_carlo.random_blockers.unwrap_or(3),
    };
    if mc.trials == 0 {
        return Err(Error::validation("monte_carlo.trials", "must be at least 1"));
    }

    let defaults = ScaConfig::default();
    let optimizer = OptimizerSettings {
        sca: ScaConfig {
            agents: raw.optimizer.agents.unwrap_or(defaults.agents),
            iterations: raw.optimizer.iterations.unwrap_or(defaults.iterations),
            a: raw.optimizer.a.unwrap_or(defaults.a),
        },
        seed: raw.optimizer.seed.unwrap_or(DEFAULT_SEED),
    };
    optimizer.sca.validate()?;

    let zeta = raw.noma.zeta.unwrap_or(0.6);
    if !(zeta > 0.5 && zeta <= 1.0) {
        return Err(Error::validation("noma.zeta", "must lie in (0.5, 1]"));
    }

    let sweep = match raw.sweep {
        Some(s) => Some(build_sweep(s)?),
        None => default_sweep(kind),
    };

    if let Some(res) = &raw.oracle.resolution {
        if res.contains(&0) {
            return Err(Error::validation("oracle.resolution", "counts must be at least 1"));
        }
    }

    let cfg = ScenarioConfig {
        kind,
        problem,
        los_mode,
        params,
        scene,
        sweep,
        monte_carlo: mc,
        optimizer,
        zeta,
        oracle_resolution: raw.oracle.resolution,
        output: raw.output,
    };
    // Every sweep point must yield a valid model.
    if let Some(sweep) = &cfg.sweep {
        for v in &sweep.values {
            cfg.at_sweep_point(sweep.variable, *v)?;
        }
    }
    if let Some(res) = &cfg.oracle_resolution {
        let dims = super::problem::Problem::new(&cfg, &cfg.params, &cfg.scene, cfg.zeta)?
            .space()
            .len();
        if res.len() != dims {
            return Err(Error::validation(
                "oracle.resolution",
                format!("expected {dims} counts, got {}", res.len()),
            ));
        }
    }
    Ok(cfg)
}

fn default_sweep(kind: ScenarioKind) -> Option<Sweep> {
    match kind {
        ScenarioKind::EeVsK | ScenarioKind::RateVsK => Some(Sweep {
            variable: SweepVariable::MirrorCount,
            values: (1..=12).map(|i| 50.0 * i as f64).collect(),
        }),
        ScenarioKind::WavelengthSweep => Some(Sweep {
            variable: SweepVariable::Wavelength,
            values: vec![510e-9, 670e-9],
        }),
        _ => None,
    }
}

fn build_sweep(s: RawSweep) -> Result<Sweep> {
    let values = match (s.values, s.start, s.stop, s.steps) {
        (Some(v), None, None, None) => v,
        (None, Some(a), Some(b), steps) => {
            let n = steps.unwrap_or(2);
            if n == 0 {
                return Err(Error::validation("sweep.steps", "must be at least 1"));
            }
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::validation("sweep.start", "bounds must be finite"));
            }
            if n == 1 {
                vec![a]
            } else {
                (0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
        _ => {
            return Err(Error::validation(
                "sweep",
                "give either `values` or `start`, `stop` and optional `steps`",
            ))
        }
    };
    if values.is_empty() {
        return Err(Error::validation("sweep.values", "must not be empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("sweep.values", "must be finite"));
    }
    if s.variable == SweepVariable::MirrorCount
        && values.iter().any(|v| *v < 1.0 || v.fract() != 0.0)
    {
        return Err(Error::validation(
            "sweep.values",
            "mirror counts must be positive integers",
        ));
    }
    Ok(Sweep {
        variable: s.variable,
        values,
    })
}

fn build_params(p: &RawParams, w: &RawPower) -> SystemParams {
    let d = SystemParams::default();
    let b = PowerBudget::default();
    SystemParams {
        half_power_semiangle: p
            .half_power_semiangle_deg
            .map_or(d.half_power_semiangle, f64::to_radians),
        pd_area: p.pd_area.unwrap_or(d.pd_area),
        optical_filter_gain: p.optical_filter_gain.unwrap_or(d.optical_filter_gain),
        concentrator_ref_index: p.concentrator_ref_index.unwrap_or(d.concentrator_ref_index),
        fov: p.fov_deg.map_or(d.fov, f64::to_radians),
        reflectivity_wall: p.reflectivity_wall.unwrap_or(d.reflectivity_wall),
        reflectivity_ris: p.reflectivity_ris.unwrap_or(d.reflectivity_ris),
        eta_air: p.eta_air.unwrap_or(d.eta_air),
        eta_extraordinary: p.eta_extraordinary.unwrap_or(d.eta_extraordinary),
        eta_ordinary: p.eta_ordinary.unwrap_or(d.eta_ordinary),
        v_threshold: p.v_threshold.unwrap_or(d.v_threshold),
        v_zero: p.v_zero.unwrap_or(d.v_zero),
        v_applied: p.v_applied.unwrap_or(d.v_applied),
        lc_thickness: p.lc_thickness.unwrap_or(d.lc_thickness),
        wavelength: p.wavelength.unwrap_or(d.wavelength),
        electro_optic_coeff: p.electro_optic_coeff.unwrap_or(d.electro_optic_coeff),
        electric_field: p.electric_field.or(d.electric_field),
        bandwidth: p.bandwidth.unwrap_or(d.bandwidth),
        optical_power: p.optical_power.unwrap_or(d.optical_power),
        elec_to_opt_ratio: p.elec_to_opt_ratio.unwrap_or(d.elec_to_opt_ratio),
        responsivity: p.responsivity.unwrap_or(d.responsivity),
        noise_psd: p.noise_psd.unwrap_or(d.noise_psd),
        sensitivity_dbm: p.sensitivity_dbm.unwrap_or(d.sensitivity_dbm),
        dc_bias: p.dc_bias.unwrap_or(d.dc_bias),
        power_budget: PowerBudget {
            dac: w.dac.unwrap_or(b.dac),
            filter: w.filter.unwrap_or(b.filter),
            power_amplifier: w.power_amplifier.unwrap_or(b.power_amplifier),
            led_driver: w.led_driver.unwrap_or(b.led_driver),
            tx_circuit: w.tx_circuit.unwrap_or(b.tx_circuit),
            mirror_unit: w.mirror_unit.unwrap_or(b.mirror_unit),
            adc: w.adc.unwrap_or(b.adc),
            tia: w.tia.unwrap_or(b.tia),
            lc: w.lc.unwrap_or(b.lc),
            rx_circuit: w.rx_circuit.unwrap_or(b.rx_circuit),
        },
    }
}

fn build_scene(s: &RawScene) -> Result<Scene> {
    let room = Vec3::from(s.room.unwrap_or(Scene::ROOM));
    let ap_pos = s
        .ap_pos
        .map(Vec3::from)
        .unwrap_or(Vec3::new(room.x / 2.0, room.y / 2.0, room.z));

    let users = match &s.users {
        None => vec![RawUser {
            position: DEFAULT_USER_POS,
            azimuth_deg: DEFAULT_USER_AZIMUTH_DEG,
            polar_deg: DEFAULT_USER_POLAR_DEG,
            body: true,
        }],
        Some(u) => u.iter().map(|u| RawUser { ..*u }).collect(),
    };
    let users = users
        .iter()
        .map(|u| {
            let pos = Vec3::from(u.position);
            let mut state = UserState::holding_at(
                pos,
                u.azimuth_deg.to_radians(),
                u.polar_deg.to_radians(),
                Receiver::Plain,
            );
            if !u.body {
                state.body = None;
            }
            state
        })
        .collect();

    let blockers = s
        .blockers
        .iter()
        .map(|b| CylinderBlocker {
            base_center: Vec3::new(b.position[0], b.position[1], 0.0),
            radius: b.radius.unwrap_or(CylinderBlocker::DEFAULT_RADIUS),
            height: b.height.unwrap_or(CylinderBlocker::DEFAULT_HEIGHT),
        })
        .collect();

    let m = &s.mirror_array;
    let dm = MirrorArray::default();
    let rows = m.rows.unwrap_or(dm.rows);
    let cols = match (m.count, m.cols) {
        (None, c) => c.unwrap_or(dm.cols),
        (Some(k), Some(c)) => {
            if rows * c != k {
                return Err(Error::validation(
                    "mirror_array.count",
                    format!("rows x cols = {} but count = {k}", rows * c),
                ));
            }
            c
        }
        (Some(k), None) => {
            if rows == 0 || k % rows != 0 {
                return Err(Error::validation(
                    "mirror_array.count",
                    format!("{k} elements do not fill {rows} rows"),
                ));
            }
            k / rows
        }
    };
    let mirror_array = MirrorArray {
        rows,
        cols,
        element_side: m.element_side.unwrap_or(dm.element_side),
        origin: m.origin.map(Vec3::from).unwrap_or(dm.origin),
        roll: m.roll_deg.map_or(dm.roll, f64::to_radians),
        yaw: m.yaw_deg.map_or(dm.yaw, f64::to_radians),
    };

    let w = &s.wall_panel;
    let dw = WallPanel::default();
    let wall_panel = WallPanel {
        origin: w.origin.map(Vec3::from).unwrap_or(dw.origin),
        width: w.width.unwrap_or(dw.width),
        height: w.height.unwrap_or(dw.height),
        patch_rows: w.patch_rows.unwrap_or(dw.patch_rows),
        patch_cols: w.patch_cols.unwrap_or(dw.patch_cols),
    };

    Ok(Scene {
        room,
        ap_pos,
        users,
        blockers,
        mirror_array,
        wall_panel,
    })
}

impl ScenarioConfig {
    /// Parameters, scene and NOMA split at one sweep point.
    pub fn at_sweep_point(&self, var: SweepVariable, value: f64) -> Result<(SystemParams, Scene, f64)> {
        let mut params = self.params.clone();
        let mut scene = self.scene.clone();
        let mut zeta = self.zeta;
        match var {
            SweepVariable::OpticalPower => params.optical_power = value,
            SweepVariable::Wavelength => params.wavelength = value,
            SweepVariable::ElectricField => params.electric_field = Some(value),
            SweepVariable::VApplied => params.v_applied = value,
            SweepVariable::ReflectivityRis => params.reflectivity_ris = value,
            SweepVariable::ReflectivityWall => params.reflectivity_wall = value,
            SweepVariable::Zeta => {
                if !(value > 0.5 && value <= 1.0) {
                    return Err(Error::validation("sweep.values", "zeta must lie in (0.5, 1]"));
                }
                zeta = value;
            }
            SweepVariable::MirrorCount => {
                scene.mirror_array = scene
                    .mirror_array
                    .resized(value as usize, scene.room.y, scene.room.z)?;
            }
        }
        params.validate()?;
        scene.validate()?;
        Ok((params, scene, zeta))
    }

    /// Output file, with the directory replaced by `dir_override` when given.
    pub fn output_path(&self, dir_override: Option<&Path>) -> PathBuf {
        let default = PathBuf::from("results").join(format!("{}.csv", self.kind.name()));
        let path = self.output.clone().unwrap_or(default);
        match dir_override {
            Some(dir) => dir.join(path.file_name().unwrap_or_default()),
            None => path,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.kind, ScenarioKind::RateP0);
        assert_eq!(cfg.params, SystemParams::default());
        assert_eq!(cfg.scene.mirror_array.count(), 300);
        assert_eq!(cfg.scene.users.len(), 1);
        assert_eq!(cfg.monte_carlo.trials, 1);
        assert_eq!(cfg.optimizer.sca, ScaConfig::default());
        assert_eq!(cfg.los_mode, LosMode::Geometric);
        assert!(cfg.sweep.is_none());
    }

    #[test]
    fn fov_above_ninety_rejected() {
        let err = parse_config("[params]\nfov_deg = 95\n").unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "fov"), "{err}");
    }

    #[test]
    fn mirror_count_layout() {
        let cfg = parse_config("[scene.mirror_array]\ncount = 100\nrows = 10\n").unwrap();
        assert_eq!((cfg.scene.mirror_array.rows, cfg.scene.mirror_array.cols), (10, 10));
        let err = parse_config("[scene.mirror_array]\ncount = 100\nrows = 10\ncols = 12\n").unwrap_err();
        assert!(err.is_validation());
        assert!(parse_config("[scene.mirror_array]\ncount = 105\nrows = 10\n").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(parse_config("bogus = 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_config("[params]\nfov = 1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn sweep_forms() {
        let cfg = parse_config(
            "[sweep]\nvariable = \"optical_power\"\nstart = 1\nstop = 8\nsteps = 8\n",
        )
        .unwrap();
        assert_eq!(cfg.sweep.unwrap().values, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let cfg = parse_config("[sweep]\nvariable = \"mirror_count\"\nvalues = [50, 600]\n").unwrap();
        assert_eq!(cfg.sweep.unwrap().values, vec![50.0, 600.0]);
        assert!(parse_config("[sweep]\nvariable = \"mirror_count\"\nvalues = [50.5]\n").is_err());
        assert!(parse_config("[sweep]\nvariable = \"optical_power\"\nvalues = [-1]\n").is_err());
        assert!(parse_config("[sweep]\nvariable = \"optical_power\"\nvalues = []\n").is_err());
    }

    #[test]
    fn trials_must_be_positive() {
        assert!(parse_config("[monte_carlo]\ntrials = 0\n").unwrap_err().is_validation());
    }

    #[test]
    fn lc_los_baseline_forces_unblocked() {
        let cfg = parse_config("kind = \"lc_los_baseline\"\n").unwrap();
        assert_eq!(cfg.los_mode, LosMode::Unblocked);
        assert!(parse_config("kind = \"lc_los_baseline\"\nlos = \"off\"\n").is_err());
    }

    #[test]
    fn problem_only_for_meta_kinds() {
        let cfg = parse_config("kind = \"convergence_trace\"\nproblem = \"ris_only_baseline\"\n").unwrap();
        assert_eq!(cfg.problem, ScenarioKind::RisOnlyBaseline);
        assert!(parse_config("kind = \"rate_p0\"\nproblem = \"wall_baseline\"\n").is_err());
        assert!(parse_config("kind = \"oracle_grid\"\nproblem = \"convergence_trace\"\n").is_err());
    }

    #[test]
    fn oracle_resolution_matches_dimensions() {
        assert!(parse_config("[oracle]\nresolution = [5, 5, 5]\n").is_ok());
        assert!(parse_config("[oracle]\nresolution = [5, 5]\n").is_err());
        assert!(parse_config("[oracle]\nresolution = [5, 0, 5]\n").is_err());
    }

    #[test]
    fn output_dir_override_keeps_file_name() {
        let cfg = parse_config("output = \"a/b/out.csv\"\n").unwrap();
        assert_eq!(cfg.output_path(None), PathBuf::from("a/b/out.csv"));
        assert_eq!(
            cfg.output_path(Some(Path::new("/tmp/x"))),
            PathBuf::from("/tmp/x/out.csv")
        );
    }
}
