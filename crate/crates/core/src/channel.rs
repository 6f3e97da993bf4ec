//! Optical path gains: direct LoS, per-mirror reflections and first-order wall
//! reflections, and their combination into the received channel gain.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::optics::{cell_transmission, Receiver};
use crate::system::{cos_incidence_at_device, los_indicator, los_visible, Scene, SystemParams, UserState};

/// Which reflectors contribute the NLoS part of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathSet {
    /// The mirror array.
    Ris,
    /// The plain wall panel.
    Wall,
    /// No reflected paths.
    LosOnly,
}

/// How the LoS indicator is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LosMode {
    /// Blockers, field of view and receiver sensitivity all apply.
    #[default]
    Geometric,
    /// Blockers are ignored; field of view and sensitivity still apply.
    Unblocked,
    /// The LoS path is never used.
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGain {
    pub paths: PathSet,
    pub h_los: f64,
    /// One entry per mirror element when `paths` is [`PathSet::Ris`], else empty.
    pub h_nlos_per_mirror: Vec<f64>,
    /// Summed wall-patch gain when `paths` is [`PathSet::Wall`], else zero.
    pub h_wall: f64,
    pub psi_los: f64,
    pub psi_nlos: f64,
    pub indicator: u8,
    pub h_total: f64,
    /// Incidence of the LoS ray at the device, if it is inside the field of view.
    pub los_incidence: Option<f64>,
    /// Incidence of the strongest reflected ray, if any reflected path exists.
    pub nlos_incidence: Option<f64>,
    /// Incidence that sets the LC amplification.
    pub gain_incidence: Option<f64>,
}

impl ChannelGain {
    /// Total reflected gain before the LC cell.
    pub fn h_nlos(&self) -> f64 {
        self.h_nlos_per_mirror.iter().sum::<f64>() + self.h_wall
    }

    /// `exp(Γ D)` for `receiver` on this channel.
    pub fn amplification(&self, receiver: &Receiver, params: &SystemParams) -> Result<f64> {
        match (receiver, self.gain_incidence) {
            (Receiver::LiquidCrystal(lc), Some(xi)) => Ok(lc.gain_at(xi, params)?.1),
            _ => Ok(1.0),
        }
    }
}

pub fn lambertian_index(half_power_semiangle: f64) -> Result<f64> {
    let c = half_power_semiangle.cos();
    if !(half_power_semiangle > 0.0 && half_power_semiangle < FRAC_PI_2 && c < 1.0) {
        return Err(Error::domain(
            "lambertian_index",
            format!("semi-angle {half_power_semiangle} rad gives cos = {c}"),
        ));
    }
    Ok(-1.0 / c.log2())
}

pub fn concentrator_gain(f: f64, fov: f64, xi: f64) -> f64 {
    if (0.0..=fov).contains(&xi) {
        f * f / fov.sin().powi(2)
    } else {
        0.0
    }
}

/// Gain of a single path ending at the device, plus the device incidence angle.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Leg {
    gain: f64,
    incidence: f64,
}

/// Receiver factor `cos ξ · G(ξ) · T` for light from `src`; `None` when out of field.
fn receive(src: &Vec3, user: &UserState, params: &SystemParams) -> Result<Option<(f64, f64)>> {
    let c = cos_incidence_at_device(src, user)?;
    if c <= 0.0 {
        return Ok(None);
    }
    let xi = c.min(1.0).acos();
    if xi > params.fov {
        return Ok(None);
    }
    let g = concentrator_gain(params.concentrator_ref_index, params.fov, xi);
    Ok(Some((c * g * params.optical_filter_gain, xi)))
}

fn los_leg(scene: &Scene, user: &UserState, params: &SystemParams, m: f64) -> Result<Leg> {
    let v = scene.ap_pos - user.device_pos;
    let d = v.norm();
    if d <= 0.0 {
        return Err(Error::domain("los_gain", "device coincides with the AP"));
    }
    let cos_phi = v.z / d;
    let Some((rx, xi)) = receive(&scene.ap_pos, user, params)? else {
        return Ok(Leg { gain: 0.0, incidence: f64::NAN });
    };
    if cos_phi <= 0.0 {
        return Ok(Leg { gain: 0.0, incidence: xi });
    }
    let gain = (m + 1.0) * params.pd_area / (2.0 * PI * d * d) * cos_phi.powf(m) * rx;
    Ok(Leg { gain, incidence: xi })
}

/// One reflecting element: a small area at `center` with `normal` pointing into the surface.
fn reflected_leg(
    scene: &Scene,
    user: &UserState,
    params: &SystemParams,
    m: f64,
    center: &Vec3,
    normal: &Vec3,
    area: f64,
    reflectivity: f64,
) -> Result<Leg> {
    let none = Leg { gain: 0.0, incidence: f64::NAN };
    let in_ray = center - scene.ap_pos;
    let out_ray = center - user.device_pos;
    let (d_ka, d_uk) = (in_ray.norm(), out_ray.norm());
    if d_ka <= 0.0 || d_uk <= 0.0 {
        return Err(Error::domain(
            "reflected_gain",
            "reflector coincides with the AP or the device",
        ));
    }
    let cos_phi_ka = -in_ray.z / d_ka;
    let cos_xi_ka = in_ray.dot(normal) / d_ka;
    let cos_phi_uk = out_ray.dot(normal) / d_uk;
    if cos_phi_ka <= 0.0 || cos_xi_ka <= 0.0 || cos_phi_uk <= 0.0 {
        return Ok(none);
    }
    let Some((rx, xi)) = receive(center, user, params)? else {
        return Ok(none);
    };
    let gain = reflectivity * (m + 1.0) * params.pd_area * area
        / (2.0 * PI * PI * d_ka * d_ka * d_uk * d_uk)
        * cos_phi_ka.powf(m)
        * cos_xi_ka
        * cos_phi_uk
        * rx;
    Ok(Leg { gain, incidence: xi })
}

/// Unblocked Lambertian LoS gain; zero outside the field of view.
pub fn los_gain(scene: &Scene, user: &UserState, params: &SystemParams) -> Result<f64> {
    let m = lambertian_index(params.half_power_semiangle)?;
    Ok(los_leg(scene, user, params, m)?.gain)
}

/// Gain of the path reflected by mirror element `k` (zero-based).
pub fn mirror_nlos_gain(scene: &Scene, user: &UserState, k: usize, params: &SystemParams) -> Result<f64> {
    let arr = &scene.mirror_array;
    if k >= arr.count() {
        return Err(Error::Contract(format!(
            "mirror index {k} out of range for {} elements",
            arr.count()
        )));
    }
    let m = lambertian_index(params.half_power_semiangle)?;
    let leg = reflected_leg(
        scene,
        user,
        params,
        m,
        &arr.element_center(k),
        &arr.normal(),
        arr.element_area(),
        params.reflectivity_ris,
    )?;
    Ok(leg.gain)
}

/// Gain of the first-order reflection from a wall patch of `patch_area` at `patch_center`.
pub fn wall_nlos_gain(
    scene: &Scene,
    user: &UserState,
    patch_center: &Vec3,
    patch_area: f64,
    params: &SystemParams,
) -> Result<f64> {
    let m = lambertian_index(params.half_power_semiangle)?;
    let leg = reflected_leg(
        scene,
        user,
        params,
        m,
        patch_center,
        &scene.wall_panel.normal(),
        patch_area,
        params.reflectivity_wall,
    )?;
    Ok(leg.gain)
}

/// Assembles the full channel of `user` for the chosen reflectors.
///
/// Within the reflected family the strongest element fixes the incidence used for
/// the LC transmission. Between LoS and reflected families, the one delivering more
/// power after the LC cell fixes the incidence used for the amplification.
pub fn total_gain(
    scene: &Scene,
    user: &UserState,
    params: &SystemParams,
    path_set: PathSet,
    los_mode: LosMode,
) -> Result<ChannelGain> {
    let m = lambertian_index(params.half_power_semiangle)?;
    let los = los_leg(scene, user, params, m)?;
    let h_los = los.gain;

    let indicator = match los_mode {
        LosMode::Off => 0,
        LosMode::Geometric => los_indicator(scene, user, params, params.optical_power * h_los),
        LosMode::Unblocked => u8::from(
            los_visible(scene, user, params)
                && params.optical_power * h_los >= params.sensitivity_watts(),
        ),
    };

    let mut per_mirror = Vec::new();
    let mut h_wall = 0.0;
    let mut strongest: Option<Leg> = None;
    let mut track = |leg: Leg| {
        if leg.gain > 0.0 && strongest.is_none_or(|s| leg.gain > s.gain) {
            strongest = Some(leg);
        }
    };
    match path_set {
        PathSet::Ris => {
            let arr = &scene.mirror_array;
            let n = arr.normal();
            let area = arr.element_area();
            per_mirror.reserve(arr.count());
            for c in arr.element_centers() {
                let leg = reflected_leg(
                    scene, user, params, m, &c, &n, area, params.reflectivity_ris,
                )?;
                per_mirror.push(leg.gain);
                track(leg);
            }
        }
        PathSet::Wall => {
            let wp = &scene.wall_panel;
            let n = wp.normal();
            let area = wp.patch_area();
            for k in 0..wp.patch_count() {
                let leg = reflected_leg(
                    scene,
                    user,
                    params,
                    m,
                    &wp.patch_center(k),
                    &n,
                    area,
                    params.reflectivity_wall,
                )?;
                h_wall += leg.gain;
                track(leg);
            }
        }
        PathSet::LosOnly => {}
    }
    let h_nlos: f64 = per_mirror.iter().sum::<f64>() + h_wall;

    let los_incidence = (h_los > 0.0).then_some(los.incidence);
    let nlos_incidence = strongest.map(|l| l.incidence);

    let (psi_los, psi_nlos, gain_incidence) = match &user.receiver {
        Receiver::Plain => (
            if los_incidence.is_some() { 1.0 } else { 0.0 },
            if nlos_incidence.is_some() { 1.0 } else { 0.0 },
            None,
        ),
        Receiver::LiquidCrystal(lc) => {
            let psi = |xi: Option<f64>| match xi {
                Some(x) => cell_transmission(x, params.eta_air, lc.eta_c),
                None => Ok(0.0),
            };
            let psi_los = psi(los_incidence)?;
            let psi_nlos = psi(nlos_incidence)?;
            let los_power = match los_incidence {
                Some(xi) if indicator == 1 => Some((h_los * psi_los * lc.gain_at(xi, params)?.1, xi)),
                _ => None,
            };
            let nlos_power = match nlos_incidence {
                Some(xi) => Some((h_nlos * psi_nlos * lc.gain_at(xi, params)?.1, xi)),
                None => None,
            };
            let pick = match (los_power, nlos_power) {
                (Some(l), Some(n)) => Some(if n.0 > l.0 { n.1 } else { l.1 }),
                (Some(l), None) => Some(l.1),
                (None, Some(n)) => Some(n.1),
                (None, None) => None,
            };
            (psi_los, psi_nlos, pick)
        }
    };

    let h_total = f64::from(indicator) * h_los * psi_los + h_nlos * psi_nlos;
    Ok(ChannelGain {
        paths: path_set,
        h_los,
        h_nlos_per_mirror: per_mirror,
        h_wall,
        psi_los,
        psi_nlos,
        indicator,
        h_total,
        los_incidence,
        nlos_incidence,
        gain_incidence,
    })
}
