//! Liquid-crystal receiver optics: tilt, refractive index, Fresnel losses and
//! the exponential amplification of the cell.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::system::SystemParams;

/// Radicands this close to zero (from rounding at the Snell limit) are treated as zero.
const RADICAND_SLACK: f64 = 1e-12;

/// Molecular tilt angle for an applied voltage.
pub fn tilt_from_voltage(v_e: f64, v_th: f64, v_0: f64) -> f64 {
    debug_assert!(v_0 > 0.0);
    if v_e <= v_th {
        0.0
    } else {
        FRAC_PI_2 - 2.0 * (-(v_e - v_th) / v_0).exp().atan()
    }
}

/// Voltage that produces `tilt`; the inverse of [`tilt_from_voltage`] on `(0, pi/2)`.
///
/// Returns `v_th` for zero tilt and infinity at `pi/2`.
pub fn voltage_from_tilt(tilt: f64, v_th: f64, v_0: f64) -> f64 {
    if tilt <= 0.0 {
        return v_th;
    }
    if tilt >= FRAC_PI_2 {
        return f64::INFINITY;
    }
    v_th - v_0 * ((FRAC_PI_2 - tilt) / 2.0).tan().ln()
}

/// Effective index of the cell for a given tilt.
pub fn refractive_index_from_tilt(tilt: f64, eta_e: f64, eta_o: f64) -> f64 {
    let (s, c) = tilt.sin_cos();
    (c * c / (eta_e * eta_e) + s * s / (eta_o * eta_o)).sqrt().recip()
}

/// Tilt that yields `eta_c`; errors when `eta_c` is outside `[eta_o, eta_e]`.
pub fn tilt_from_refractive_index(eta_c: f64, eta_e: f64, eta_o: f64) -> Result<f64> {
    let (lo, hi) = (eta_o.min(eta_e), eta_o.max(eta_e));
    if !(lo..=hi).contains(&eta_c) {
        return Err(Error::domain(
            "tilt_from_refractive_index",
            format!("index {eta_c} outside [{lo}, {hi}]"),
        ));
    }
    if eta_e == eta_o {
        return Ok(0.0);
    }
    let inv = |x: f64| 1.0 / (x * x);
    let s2 = (inv(eta_c) - inv(eta_e)) / (inv(eta_o) - inv(eta_e));
    Ok(s2.clamp(0.0, 1.0).sqrt().asin())
}

/// Refraction angle inside the cell by Snell's law.
///
/// Equal indices are accepted and pass the ray through unbent.
pub fn refraction_angle(xi: f64, eta_a: f64, eta_c: f64) -> Result<f64> {
    if eta_c < eta_a {
        return Err(Error::validation(
            "eta_c",
            format!("cell index {eta_c} below ambient index {eta_a}"),
        ));
    }
    if !(0.0..=FRAC_PI_2).contains(&xi) {
        return Err(Error::domain(
            "refraction_angle",
            format!("incidence {xi} outside [0, pi/2]"),
        ));
    }
    Ok(((eta_a / eta_c) * xi.sin()).clamp(0.0, 1.0).asin())
}

fn fresnel_average(cos_i: f64, sin_i: f64, rel: f64) -> Option<f64> {
    let mut rad = rel * rel - sin_i * sin_i;
    if rad < 0.0 {
        if rad < -RADICAND_SLACK {
            return None;
        }
        rad = 0.0;
    }
    let root = rad.sqrt();
    let p = (rel * rel * cos_i - root) / (rel * rel * cos_i + root);
    let s = (cos_i - root) / (cos_i + root);
    Some(0.5 * p * p + 0.5 * s * s)
}

/// Fraction of light reflected on entering the cell; `eta` is `eta_c / eta_a`.
pub fn reflectance_air_to_cell(xi: f64, eta: f64) -> Result<f64> {
    if eta < 1.0 {
        return Err(Error::domain(
            "reflectance_air_to_cell",
            format!("relative index {eta} below 1"),
        ));
    }
    if eta == 1.0 {
        return Ok(0.0);
    }
    let (s, c) = xi.sin_cos();
    fresnel_average(c, s, eta).ok_or_else(|| {
        Error::domain("reflectance_air_to_cell", "negative radicand")
    })
}

/// Fraction of light reflected on leaving the cell; `eta_1` is `eta_a / eta_c`.
pub fn reflectance_cell_to_air(theta: f64, eta_1: f64) -> Result<f64> {
    if !(eta_1 > 0.0 && eta_1 <= 1.0) {
        return Err(Error::domain(
            "reflectance_cell_to_air",
            format!("relative index {eta_1} outside (0, 1]"),
        ));
    }
    if eta_1 == 1.0 {
        return Ok(0.0);
    }
    let (s, c) = theta.sin_cos();
    fresnel_average(c, s, eta_1).ok_or(Error::TotalInternalReflection {
        sin_theta: s,
        relative_index: eta_1,
    })
}

/// Power transmitted through both faces of a cell with index `eta_c` at incidence `xi`.
pub fn cell_transmission(xi: f64, eta_a: f64, eta_c: f64) -> Result<f64> {
    let theta = refraction_angle(xi, eta_a, eta_c)?;
    let r_ac = reflectance_air_to_cell(xi, eta_c / eta_a)?;
    let r_ca = reflectance_cell_to_air(theta, eta_a / eta_c)?;
    Ok((1.0 - r_ac) * (1.0 - r_ca))
}

/// Transition coefficient ψ of `lc` for light arriving at incidence `xi_in`.
pub fn transition_coefficient(xi_in: f64, lc: &LcState, params: &SystemParams) -> Result<f64> {
    cell_transmission(xi_in, params.eta_air, lc.eta_c)
}

/// Gain coefficient Γ (1/m) and intensity factor `exp(Γ D)`.
pub fn amplification_gain(
    eta_c: f64,
    wavelength: f64,
    xi_in: f64,
    r_eff: f64,
    field: f64,
    thickness: f64,
) -> Result<(f64, f64)> {
    let c = xi_in.cos();
    if xi_in >= FRAC_PI_2 || c <= 0.0 {
        return Err(Error::SingularIncidence(xi_in));
    }
    let gamma = 2.0 * PI * eta_c.powi(3) * r_eff * field / (wavelength * c);
    Ok((gamma, (gamma * thickness).exp()))
}

/// Operating point of the LC cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcState {
    /// Drive voltage that produces `tilt`.
    pub v_applied: f64,
    pub tilt: f64,
    pub eta_c: f64,
    /// Refraction angle of the path that sets the gain.
    pub refraction_angle: f64,
    pub gamma_coeff: f64,
    pub amplification: f64,
    pub transition_nlos: f64,
    pub transition_los: f64,
}

impl LcState {
    /// Cell driven at `v_e`; angle-dependent fields are left at their normal-incidence values.
    pub fn from_voltage(v_e: f64, params: &SystemParams) -> Self {
        let tilt = tilt_from_voltage(v_e, params.v_threshold, params.v_zero);
        let eta_c = refractive_index_from_tilt(
            tilt,
            params.eta_extraordinary,
            params.eta_ordinary,
        );
        Self::unresolved(v_e, tilt, eta_c)
    }

    /// Cell tuned to index `eta_c`. Tilt and voltage are recovered for reporting.
    pub fn from_refractive_index(eta_c: f64, params: &SystemParams) -> Result<Self> {
        let tilt = tilt_from_refractive_index(
            eta_c,
            params.eta_extraordinary,
            params.eta_ordinary,
        )
        .map_err(|_| {
            Error::validation(
                "eta_c",
                format!(
                    "{eta_c} outside [{}, {}]",
                    params.eta_ordinary, params.eta_extraordinary
                ),
            )
        })?;
        let v = voltage_from_tilt(tilt, params.v_threshold, params.v_zero);
        Ok(Self::unresolved(v, tilt, eta_c))
    }

    fn unresolved(v: f64, tilt: f64, eta_c: f64) -> Self {
        Self {
            v_applied: v,
            tilt,
            eta_c,
            refraction_angle: 0.0,
            gamma_coeff: 0.0,
            amplification: 1.0,
            transition_nlos: 1.0,
            transition_los: 1.0,
        }
    }

    /// Fills in the angle-dependent quantities.
    ///
    /// `xi_los` and `xi_nlos` are the incidence angles of the two path families
    /// (`None` when a path is absent); `xi_gain` selects the angle used for Γ.
    pub fn resolved(
        mut self,
        xi_los: Option<f64>,
        xi_nlos: Option<f64>,
        xi_gain: Option<f64>,
        params: &SystemParams,
    ) -> Result<Self> {
        let psi = |xi: Option<f64>| match xi {
            Some(x) => cell_transmission(x, params.eta_air, self.eta_c),
            None => Ok(0.0),
        };
        self.transition_los = psi(xi_los)?;
        self.transition_nlos = psi(xi_nlos)?;
        match xi_gain {
            Some(xi) => {
                self.refraction_angle = refraction_angle(xi, params.eta_air, self.eta_c)?;
                let (g, a) = self.gain_at(xi, params)?;
                self.gamma_coeff = g;
                self.amplification = a;
            }
            None => {
                self.refraction_angle = 0.0;
                self.gamma_coeff = 0.0;
                self.amplification = 1.0;
            }
        }
        Ok(self)
    }

    /// Γ and `exp(Γ D)` of this cell at incidence `xi`.
    pub fn gain_at(&self, xi: f64, params: &SystemParams) -> Result<(f64, f64)> {
        amplification_gain(
            self.eta_c,
            params.wavelength,
            xi,
            params.electro_optic_coeff,
            params.electric_field(),
            params.lc_thickness,
        )
    }
}

/// Front end of a user's receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Receiver {
    /// Tunable LC cell in front of the photodetector.
    LiquidCrystal(LcState),
    /// Bare photodetector: no Fresnel loss, no amplification, no LC power draw.
    Plain,
}

impl Receiver {
    pub fn lc(&self) -> Option<&LcState> {
        match self {
            Receiver::LiquidCrystal(lc) => Some(lc),
            Receiver::Plain => None,
        }
    }
}
