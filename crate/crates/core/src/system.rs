//! Scene description, device orientation and line-of-sight availability.
//!
//! Coordinates are metres in a room frame with the floor at `z = 0` and the
//! ceiling at `z = room.z`. The access point (AP) hangs from the ceiling facing
//! straight down. The mirror array sits on the `x = 0` wall (a y–z plane) and the
//! reflecting wall panel used by the wall-only scenario sits on the `y = 0` wall
//! (an x–z plane).

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{segment_intersects_cylinder, CylinderBlocker, Vec3};
use crate::optics::Receiver;

/// Physical and electrical constants of the link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// LED semi-angle at half power, radians.
    pub half_power_semiangle: f64,
    /// Photodetector area, m².
    pub pd_area: f64,
    /// Optical filter gain T(ξ).
    pub optical_filter_gain: f64,
    /// Refractive index of the optical concentrator.
    pub concentrator_ref_index: f64,
    /// Receiver field of view, radians.
    pub fov: f64,
    pub reflectivity_wall: f64,
    pub reflectivity_ris: f64,
    pub eta_air: f64,
    pub eta_extraordinary: f64,
    pub eta_ordinary: f64,
    /// Threshold voltage where the LC molecules start to tilt, V.
    pub v_threshold: f64,
    /// Voltage scale of the tilt response, V.
    pub v_zero: f64,
    /// Voltage applied across the LC cell, V.
    pub v_applied: f64,
    /// LC cell thickness, m.
    pub lc_thickness: f64,
    /// Optical wavelength, m.
    pub wavelength: f64,
    /// Electro-optic coefficient, m/V.
    pub electro_optic_coeff: f64,
    /// Applied field in V/m. `None` means a uniform field `v_applied / lc_thickness`.
    pub electric_field: Option<f64>,
    /// Modulation bandwidth, Hz.
    pub bandwidth: f64,
    /// Optical transmit power, W.
    pub optical_power: f64,
    /// Ratio of electrical signal power to optical transmit power.
    pub elec_to_opt_ratio: f64,
    /// Photodetector responsivity, A/W.
    pub responsivity: f64,
    /// Noise power spectral density, A²/Hz.
    pub noise_psd: f64,
    /// Minimum received LoS optical power, dBm.
    pub sensitivity_dbm: f64,
    /// DC bias current of the superposed NOMA signal, A. Carried for completeness only.
    pub dc_bias: f64,
    pub power_budget: PowerBudget,
}

/// Static power draw of the transceiver chain, W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    pub dac: f64,
    pub filter: f64,
    pub power_amplifier: f64,
    pub led_driver: f64,
    pub tx_circuit: f64,
    /// Power to actuate one mirror element.
    pub mirror_unit: f64,
    pub adc: f64,
    pub tia: f64,
    pub lc: f64,
    pub rx_circuit: f64,
}

impl Default for PowerBudget {
    fn default() -> Self {
        Self {
            dac: 0.175,
            filter: 0.0025,
            power_amplifier: 0.280,
            led_driver: 2.758,
            tx_circuit: 3.250,
            mirror_unit: 0.100,
            adc: 0.095,
            tia: 2.500,
            lc: 0.320,
            rx_circuit: 0.0019,
        }
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            half_power_semiangle: 70f64.to_radians(),
            pd_area: 1.0e-4,
            optical_filter_gain: 1.0,
            concentrator_ref_index: 1.5,
            fov: 85f64.to_radians(),
            reflectivity_wall: 0.8,
            reflectivity_ris: 0.95,
            eta_air: 1.0,
            eta_extraordinary: 1.7,
            eta_ordinary: 1.5,
            v_threshold: 1.34,
            v_zero: 1.0,
            v_applied: 2.34,
            lc_thickness: 0.75e-3,
            wavelength: 510e-9,
            electro_optic_coeff: 12e-12,
            electric_field: None,
            bandwidth: 200e6,
            optical_power: 2.0,
            elec_to_opt_ratio: 3.0,
            responsivity: 0.53,
            noise_psd: 1e-21,
            sensitivity_dbm: -35.0,
            dc_bias: 0.0,
            power_budget: PowerBudget::default(),
        }
    }
}

impl SystemParams {
    /// Field strength inside the LC cell, V/m.
    pub fn electric_field(&self) -> f64 {
        self.electric_field
            .unwrap_or(self.v_applied / self.lc_thickness)
    }

    /// Electrical signal power `(p / q)²`.
    pub fn signal_power(&self) -> f64 {
        (self.optical_power / self.elec_to_opt_ratio).powi(2)
    }

    /// Receiver sensitivity converted to watts.
    pub fn sensitivity_watts(&self) -> f64 {
        dbm_to_watts(self.sensitivity_dbm)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("half_power_semiangle", self.half_power_semiangle),
            ("pd_area", self.pd_area),
            ("optical_filter_gain", self.optical_filter_gain),
            ("concentrator_ref_index", self.concentrator_ref_index),
            ("fov", self.fov),
            ("eta_air", self.eta_air),
            ("eta_extraordinary", self.eta_extraordinary),
            ("eta_ordinary", self.eta_ordinary),
            ("v_threshold", self.v_threshold),
            ("v_zero", self.v_zero),
            ("v_applied", self.v_applied),
            ("lc_thickness", self.lc_thickness),
            ("wavelength", self.wavelength),
            ("electro_optic_coeff", self.electro_optic_coeff),
            ("bandwidth", self.bandwidth),
            ("optical_power", self.optical_power),
            ("elec_to_opt_ratio", self.elec_to_opt_ratio),
            ("responsivity", self.responsivity),
            ("noise_psd", self.noise_psd),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::validation(field, format!("must be positive, got {value}")));
            }
        }
        if self.half_power_semiangle >= FRAC_PI_2 {
            return Err(Error::validation(
                "half_power_semiangle",
                "must be below 90 degrees",
            ));
        }
        if self.fov > FRAC_PI_2 {
            return Err(Error::validation(
                "fov",
                format!("must be at most 90 degrees, got {:.3}", self.fov.to_degrees()),
            ));
        }
        if self.optical_filter_gain > 1.0 {
            return Err(Error::validation("optical_filter_gain", "must lie in (0, 1]"));
        }
        for (field, rho) in [
            ("reflectivity_wall", self.reflectivity_wall),
            ("reflectivity_ris", self.reflectivity_ris),
        ] {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::validation(field, "must lie in [0, 1]"));
            }
        }
        if self.eta_ordinary > self.eta_extraordinary {
            return Err(Error::validation(
                "eta_ordinary",
                "must not exceed eta_extraordinary",
            ));
        }
        if self.eta_air > self.eta_ordinary {
            return Err(Error::validation(
                "eta_air",
                "must not exceed the LC ordinary index",
            ));
        }
        if self.elec_to_opt_ratio < 1.0 {
            return Err(Error::validation("elec_to_opt_ratio", "must be at least 1"));
        }
        if let Some(e) = self.electric_field {
            if !(e.is_finite() && e >= 0.0) {
                return Err(Error::validation("electric_field", "must be non-negative"));
            }
        }
        if !self.sensitivity_dbm.is_finite() {
            return Err(Error::validation("sensitivity_dbm", "must be finite"));
        }
        let b = &self.power_budget;
        for (field, value) in [
            ("power.dac", b.dac),
            ("power.filter", b.filter),
            ("power.power_amplifier", b.power_amplifier),
            ("power.led_driver", b.led_driver),
            ("power.tx_circuit", b.tx_circuit),
            ("power.mirror_unit", b.mirror_unit),
            ("power.adc", b.adc),
            ("power.tia", b.tia),
            ("power.lc", b.lc),
            ("power.rx_circuit", b.rx_circuit),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::validation(field, "must be non-negative"));
            }
        }
        Ok(())
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// A user's handheld receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct UserState {
    pub device_pos: Vec3,
    /// Azimuth of the device normal, radians in `[-pi, pi]`.
    pub azimuth: f64,
    /// Polar tilt of the device normal from the zenith, radians in `[0, pi/2]`.
    pub polar: f64,
    pub receiver: Receiver,
    /// The user's own body, if modelled.
    pub body: Option<CylinderBlocker>,
}

impl UserState {
    pub const DEVICE_HEIGHT: f64 = 0.85;
    pub const BODY_DISTANCE: f64 = 0.36;

    /// A user holding the device at `pos`, with the body 0.36 m behind along `-x`.
    pub fn holding_at(pos: Vec3, azimuth: f64, polar: f64, receiver: Receiver) -> Self {
        let body = CylinderBlocker::person_at(pos.x - Self::BODY_DISTANCE, pos.y);
        Self {
            device_pos: pos,
            azimuth,
            polar,
            receiver,
            body: Some(body),
        }
    }

    /// Unit normal of the device screen.
    pub fn normal(&self) -> Vec3 {
        Vec3::new(
            self.azimuth.cos() * self.polar.sin(),
            self.azimuth.sin() * self.polar.sin(),
            self.polar.cos(),
        )
    }

    pub fn validate(&self, idx: usize) -> Result<()> {
        if !(-PI..=PI).contains(&self.azimuth) {
            return Err(Error::validation(
                format!("users[{idx}].azimuth"),
                "must lie in [-180, 180] degrees",
            ));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.polar) {
            return Err(Error::validation(
                format!("users[{idx}].polar"),
                "must lie in [0, 90] degrees",
            ));
        }
        if let Some(b) = &self.body {
            validate_blocker(b, &format!("users[{idx}].body"))?;
        }
        Ok(())
    }
}

pub(crate) fn validate_blocker(b: &CylinderBlocker, field: &str) -> Result<()> {
    if !(b.radius > 0.0 && b.radius.is_finite()) {
        return Err(Error::validation(format!("{field}.radius"), "must be positive"));
    }
    if !(b.height > 0.0 && b.height.is_finite()) {
        return Err(Error::validation(format!("{field}.height"), "must be positive"));
    }
    Ok(())
}

/// Grid of square mirrors on a `x = const` wall, all sharing one orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorArray {
    pub rows: usize,
    pub cols: usize,
    /// Side of one square element, m.
    pub element_side: f64,
    /// Lower corner (min y, min z) of the panel on the wall plane.
    pub origin: Vec3,
    /// Roll ω, radians.
    pub roll: f64,
    /// Yaw γ, radians.
    pub yaw: f64,
}

impl Default for MirrorArray {
    fn default() -> Self {
        Self {
            rows: 10,
            cols: 30,
            element_side: 0.1,
            origin: Vec3::new(0.0, 1.0, 1.0),
            roll: 0.0,
            yaw: 0.0,
        }
    }
}

impl MirrorArray {
    pub fn count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn element_area(&self) -> f64 {
        self.element_side * self.element_side
    }

    /// Panel extent `(width along y, height along z)`.
    pub fn extent(&self) -> (f64, f64) {
        (
            self.cols as f64 * self.element_side,
            self.rows as f64 * self.element_side,
        )
    }

    pub fn center(&self) -> Vec3 {
        let (w, h) = self.extent();
        self.origin + Vec3::new(0.0, w / 2.0, h / 2.0)
    }

    /// Centre of element `k`, row-major from the lower corner.
    pub fn element_center(&self, k: usize) -> Vec3 {
        let (r, c) = (k / self.cols, k % self.cols);
        self.origin
            + Vec3::new(
                0.0,
                (c as f64 + 0.5) * self.element_side,
                (r as f64 + 0.5) * self.element_side,
            )
    }

    pub fn element_centers(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.count()).map(move |k| self.element_center(k))
    }

    /// Element normal for the shared orientation.
    pub fn normal(&self) -> Vec3 {
        mirror_normal(self.yaw, self.roll)
    }

    /// Re-lays the array to hold `count` elements around the same centre.
    ///
    /// Keeps the column count and changes the number of rows when `count` divides
    /// evenly and the result fits inside `max_width x max_height`. Otherwise picks
    /// the most compact grid that fits, ties going to fewer rows.
    pub fn resized(&self, count: usize, max_width: f64, max_height: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::validation("mirror_array.count", "must be at least 1"));
        }
        let max_cols = (max_width / self.element_side + 1e-9).floor() as usize;
        let max_rows = (max_height / self.element_side + 1e-9).floor() as usize;
        let fits = |r: usize| count % r == 0 && r <= max_rows && count / r <= max_cols;
        let same_width = (self.cols > 0 && count % self.cols == 0)
            .then(|| count / self.cols)
            .filter(|r| *r > 0 && fits(*r));
        let rows = same_width
            .or_else(|| {
                (1..=max_rows.min(count))
                    .filter(|r| fits(*r))
                    .min_by_key(|r| r.abs_diff(count / r))
            })
            .ok_or_else(|| {
                Error::validation(
                    "mirror_array.count",
                    format!("{count} elements do not fit on the wall"),
                )
            })?;
        let cols = count / rows;
        let center = self.center();
        let (w, h) = (
            cols as f64 * self.element_side,
            rows as f64 * self.element_side,
        );
        Ok(Self {
            rows,
            cols,
            origin: center - Vec3::new(0.0, w / 2.0, h / 2.0),
            ..self.clone()
        })
    }
}

/// Normal `(sin γ cos ω, cos γ cos ω, sin ω)` used for both mirror cosines.
pub fn mirror_normal(yaw: f64, roll: f64) -> Vec3 {
    Vec3::new(yaw.sin() * roll.cos(), yaw.cos() * roll.cos(), roll.sin())
}

/// Reflecting patch of plain wall on a `y = const` plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallPanel {
    /// Lower corner (min x, min z).
    pub origin: Vec3,
    /// Extent along x, m.
    pub width: f64,
    /// Extent along z, m.
    pub height: f64,
    pub patch_rows: usize,
    pub patch_cols: usize,
}

impl Default for WallPanel {
    fn default() -> Self {
        Self {
            origin: Vec3::new(1.0, 0.0, 1.0),
            width: 3.0,
            height: 1.0,
            patch_rows: 10,
            patch_cols: 30,
        }
    }
}

impl WallPanel {
    pub fn patch_count(&self) -> usize {
        self.patch_rows * self.patch_cols
    }

    pub fn patch_area(&self) -> f64 {
        (self.width / self.patch_cols as f64) * (self.height / self.patch_rows as f64)
    }

    pub fn patch_center(&self, k: usize) -> Vec3 {
        let (r, c) = (k / self.patch_cols, k % self.patch_cols);
        let dw = self.width / self.patch_cols as f64;
        let dh = self.height / self.patch_rows as f64;
        self.origin + Vec3::new((c as f64 + 0.5) * dw, 0.0, (r as f64 + 0.5) * dh)
    }

    /// Normal in the same convention as the mirrors: pointing into the wall, so that
    /// cosines are taken against vectors that end on the surface.
    pub fn normal(&self) -> Vec3 {
        Vec3::new(0.0, -1.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub room: Vec3,
    pub ap_pos: Vec3,
    pub users: Vec<UserState>,
    pub blockers: Vec<CylinderBlocker>,
    pub mirror_array: MirrorArray,
    pub wall_panel: WallPanel,
}

impl Scene {
    pub const ROOM: [f64; 3] = [5.0, 5.0, 3.0];

    /// The reference room with one user and no external blockers.
    pub fn reference(user: UserState) -> Self {
        let room = Vec3::from(Self::ROOM);
        Self {
            room,
            ap_pos: Vec3::new(room.x / 2.0, room.y / 2.0, room.z),
            users: vec![user],
            blockers: Vec::new(),
            mirror_array: MirrorArray::default(),
            wall_panel: WallPanel::default(),
        }
    }

    fn inside(&self, p: &Vec3) -> bool {
        let tol = 1e-9;
        (-tol..=self.room.x + tol).contains(&p.x)
            && (-tol..=self.room.y + tol).contains(&p.y)
            && (-tol..=self.room.z + tol).contains(&p.z)
    }

    pub fn validate(&self) -> Result<()> {
        if self.room.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::validation("scene.room", "dimensions must be positive"));
        }
        if (self.ap_pos.z - self.room.z).abs() > 1e-9 {
            return Err(Error::validation(
                "scene.ap_pos",
                "access point must be on the ceiling plane",
            ));
        }
        if !self.inside(&self.ap_pos) {
            return Err(Error::validation("scene.ap_pos", "outside the room"));
        }
        if self.users.is_empty() {
            return Err(Error::validation("scene.users", "at least one user is required"));
        }
        for (i, u) in self.users.iter().enumerate() {
            if !self.inside(&u.device_pos) {
                return Err(Error::validation(
                    format!("users[{i}].device_pos"),
                    "outside the room",
                ));
            }
            u.validate(i)?;
        }
        for (i, b) in self.blockers.iter().enumerate() {
            validate_blocker(b, &format!("blockers[{i}]"))?;
        }
        let m = &self.mirror_array;
        if m.count() == 0 {
            return Err(Error::validation("mirror_array", "rows and cols must be at least 1"));
        }
        if !(m.element_side > 0.0 && m.element_side.is_finite()) {
            return Err(Error::validation("mirror_array.element_side", "must be positive"));
        }
        let (w, h) = m.extent();
        let far = m.origin + Vec3::new(0.0, w, h);
        if !self.inside(&m.origin) || !self.inside(&far) {
            return Err(Error::validation(
                "mirror_array",
                "panel must lie on a room wall inside the room bounds",
            ));
        }
        if m.origin.x.abs() > 1e-9 && (m.origin.x - self.room.x).abs() > 1e-9 {
            return Err(Error::validation(
                "mirror_array.origin",
                "panel must lie on an x = 0 or x = room width wall",
            ));
        }
        let wp = &self.wall_panel;
        if wp.patch_count() == 0 || !(wp.width > 0.0) || !(wp.height > 0.0) {
            return Err(Error::validation("wall_panel", "extent and patch grid must be non-empty"));
        }
        let far = wp.origin + Vec3::new(wp.width, 0.0, wp.height);
        if !self.inside(&wp.origin) || !self.inside(&far) {
            return Err(Error::validation("wall_panel", "panel must lie inside the room bounds"));
        }
        Ok(())
    }

    /// All blockers that can interrupt a link, including every user's body.
    pub fn all_blockers(&self) -> impl Iterator<Item = &CylinderBlocker> {
        self.blockers
            .iter()
            .chain(self.users.iter().filter_map(|u| u.body.as_ref()))
    }
}

/// Cosine of the incidence angle at the device for light arriving from `src_pos`.
pub fn cos_incidence_at_device(src_pos: &Vec3, user: &UserState) -> Result<f64> {
    let v = src_pos - user.device_pos;
    let d = v.norm();
    if d <= 0.0 {
        return Err(Error::domain(
            "cos_incidence_at_device",
            "source coincides with the device",
        ));
    }
    let (sb, cb) = user.azimuth.sin_cos();
    let (sa, ca) = user.polar.sin_cos();
    Ok((v.x / d) * cb * sa + (v.y / d) * sb * sa + (v.z / d) * ca)
}

/// Cosine of the irradiance angle from mirror element at `mirror_center` toward the user.
pub fn cos_irradiance_from_mirror(
    mirror_center: &Vec3,
    user_pos: &Vec3,
    yaw: f64,
    roll: f64,
) -> Result<f64> {
    let v = mirror_center - user_pos;
    let d = v.norm();
    if d <= 0.0 {
        return Err(Error::domain(
            "cos_irradiance_from_mirror",
            "mirror coincides with the user",
        ));
    }
    let (sg, cg) = yaw.sin_cos();
    let (sw, cw) = roll.sin_cos();
    Ok((v.x / d) * sg * cw + (v.y / d) * cg * cw + (v.z / d) * sw)
}

/// LoS availability indicator ι ∈ {0, 1}.
///
/// Zero when any blocker cuts the AP–device segment, when the incidence angle is
/// outside the field of view, or when `received_power_los` (W) is below the
/// receiver sensitivity.
pub fn los_indicator(
    scene: &Scene,
    user: &UserState,
    params: &SystemParams,
    received_power_los: f64,
) -> u8 {
    if !los_visible(scene, user, params) {
        return 0;
    }
    if scene
        .all_blockers()
        .any(|b| segment_intersects_cylinder(&scene.ap_pos, &user.device_pos, b))
    {
        return 0;
    }
    u8::from(received_power_los >= params.sensitivity_watts())
}

/// Field-of-view part of the LoS test alone.
pub(crate) fn los_visible(scene: &Scene, user: &UserState, params: &SystemParams) -> bool {
    match cos_incidence_at_device(&scene.ap_pos, user) {
        Ok(c) => c > 0.0 && c.min(1.0).acos() <= params.fov,
        Err(_) => false,
    }
}

/// Polar-angle distribution: mean 41°, standard deviation 9°.
pub const POLAR_MEAN_DEG: f64 = 41.0;
pub const POLAR_STD_DEG: f64 = 9.0;

/// Draws a random device orientation `(azimuth, polar)`.
///
/// Azimuth is uniform on `[-pi, pi]`; the polar angle is Laplace distributed and
/// truncated to `[0, pi/2]` by rejection.
pub fn sample_orientation<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let azimuth = rng.random_range(-PI..=PI);
    let mean = POLAR_MEAN_DEG.to_radians();
    let scale = POLAR_STD_DEG.to_radians() / std::f64::consts::SQRT_2;
    let polar = loop {
        // Inverse CDF of the Laplace distribution.
        let u: f64 = rng.random::<f64>() - 0.5;
        let x = mean - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln();
        if (0.0..=FRAC_PI_2).contains(&x) {
            break x;
        }
    };
    (azimuth, polar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn user(pos: [f64; 3], az: f64, polar: f64) -> UserState {
        UserState {
            device_pos: Vec3::from(pos),
            azimuth: az,
            polar,
            receiver: Receiver::Plain,
            body: None,
        }
    }

    #[test]
    fn incidence_straight_below_ap() {
        let u = user([2.5, 2.5, 0.85], 1.3, 0.0);
        let c = cos_incidence_at_device(&Vec3::new(2.5, 2.5, 3.0), &u).unwrap();
        assert_relative_eq!(c, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn incidence_flat_device_is_height_over_distance() {
        for az in [-3.0, -1.0, 0.0, 0.7, 2.9] {
            let u = user([1.0, 2.0, 0.85], az, 0.0);
            let ap = Vec3::new(2.5, 2.5, 3.0);
            let d = (ap - u.device_pos).norm();
            let c = cos_incidence_at_device(&ap, &u).unwrap();
            assert_relative_eq!(c, (3.0 - 0.85) / d, max_relative = 1e-14);
        }
    }

    #[test]
    fn incidence_tilted_device_reference_value() {
        // Straight-line evaluation of the dot product.
        let (xa, ya, za) = (2.5f64, 2.5f64, 3.0f64);
        let (xu, yu, zu) = (1.0f64, 2.5f64, 1.0f64);
        let (b, a) = (0.0f64, 41f64.to_radians());
        let d = ((xa - xu).powi(2) + (ya - yu).powi(2) + (za - zu).powi(2)).sqrt();
        let expected = (xa - xu) / d * b.cos() * a.sin()
            + (ya - yu) / d * b.sin() * a.sin()
            + (za - zu) / d * a.cos();
        let u = user([1.0, 2.5, 1.0], 0.0, 41f64.to_radians());
        let c = cos_incidence_at_device(&Vec3::new(2.5, 2.5, 3.0), &u).unwrap();
        assert_relative_eq!(c, expected, max_relative = 1e-14);
        assert_relative_eq!(c, 0.997403081572522, max_relative = 1e-12);
    }

    #[test]
    fn incidence_zero_distance_is_domain_error() {
        let u = user([1.0, 1.0, 1.0], 0.0, 0.0);
        assert!(matches!(
            cos_incidence_at_device(&Vec3::new(1.0, 1.0, 1.0), &u),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn mirror_irradiance_special_orientations() {
        let m = Vec3::new(0.0, 2.2, 1.7);
        let u = Vec3::new(2.0, 2.5, 0.85);
        let d = (m - u).norm();
        let c = cos_irradiance_from_mirror(&m, &u, 0.8, FRAC_PI_2).unwrap();
        assert_relative_eq!(c, (m.z - u.z) / d, max_relative = 1e-12);
        let c = cos_irradiance_from_mirror(&m, &u, 0.0, 0.0).unwrap();
        assert_relative_eq!(c, (m.y - u.y) / d, max_relative = 1e-12);
    }

    #[test]
    fn mirror_irradiance_reference_value() {
        // mirror (0,2.5,1.5), user (2,2.5,0.85), yaw pi/4, roll 0.1
        let d = (4.0f64 + 0.65f64 * 0.65).sqrt();
        let (g, w) = (std::f64::consts::FRAC_PI_4, 0.1f64);
        let expected = (0.0 - 2.0) / d * g.sin() * w.cos() + 0.0 + (1.5 - 0.85) / d * w.sin();
        let c = cos_irradiance_from_mirror(
            &Vec3::new(0.0, 2.5, 1.5),
            &Vec3::new(2.0, 2.5, 0.85),
            g,
            w,
        )
        .unwrap();
        assert_relative_eq!(c, expected, max_relative = 1e-14);
        assert_relative_eq!(c, -0.638265908381143, max_relative = 1e-12);
    }

    #[test]
    fn mirror_grid_layout() {
        let m = MirrorArray::default();
        assert_eq!(m.count(), 300);
        let (w, h) = m.extent();
        assert_relative_eq!(w, 3.0, epsilon = 1e-12);
        assert_relative_eq!(h, 1.0, epsilon = 1e-12);
        let first = m.element_center(0);
        let next_col = m.element_center(1);
        let next_row = m.element_center(m.cols);
        assert_relative_eq!((next_col - first).norm(), 0.1, epsilon = 1e-12);
        assert_relative_eq!((next_row - first).norm(), 0.1, epsilon = 1e-12);
        assert!(m.element_centers().all(|c| c.x == 0.0));
        assert_relative_eq!(m.center(), Vec3::new(0.0, 2.5, 1.5), epsilon = 1e-12);
    }

    #[test]
    fn resized_array_keeps_center_and_fits_wall() {
        let m = MirrorArray::default();
        let r = m.resized(100, 5.0, 3.0).unwrap();
        assert_eq!((r.rows, r.cols), (10, 10));
        assert_relative_eq!(r.center(), m.center(), epsilon = 1e-12);
        let r = m.resized(600, 5.0, 3.0).unwrap();
        assert_eq!((r.rows, r.cols), (20, 30));
        assert!(r.origin.z >= -1e-9 && r.origin.z + r.extent().1 <= 3.0 + 1e-9);
        let r = m.resized(7, 5.0, 3.0).unwrap();
        assert_eq!((r.rows, r.cols), (1, 7));
        assert!(r.origin.y >= -1e-9 && r.origin.y + r.extent().0 <= 5.0 + 1e-9);
        assert!(m.resized(10_000, 5.0, 3.0).is_err());
    }

    #[test]
    fn los_indicator_cases() {
        let ap = Vec3::new(2.5, 2.5, 3.0);
        let u = user([2.0, 2.5, 0.85], 0.0, 0.0);
        let mut scene = Scene::reference(u.clone());
        let p = SystemParams::default();
        assert_eq!(los_indicator(&scene, &u, &p, 1e-3), 1);

        // Blocker centred on the segment midpoint.
        let mid = (ap + u.device_pos) / 2.0;
        scene.blockers.push(CylinderBlocker::person_at(mid.x, mid.y));
        assert_eq!(los_indicator(&scene, &u, &p, 1e-3), 0);
        scene.blockers.clear();

        // -40 dBm against a -35 dBm threshold.
        assert_eq!(los_indicator(&scene, &u, &p, dbm_to_watts(-40.0)), 0);
        assert_eq!(los_indicator(&scene, &u, &p, dbm_to_watts(-34.9)), 1);

        // Device facing away from the AP.
        let away = user([2.0, 2.5, 0.85], PI, FRAC_PI_2);
        assert_eq!(los_indicator(&scene, &away, &p, 1e-3), 0);
    }

    #[test]
    fn sample_orientation_is_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            assert_eq!(sample_orientation(&mut a), sample_orientation(&mut b));
        }
    }

    #[test]
    fn sample_orientation_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(2023);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let (b, a) = sample_orientation(&mut rng);
            assert!((-PI..=PI).contains(&b));
            assert!((0.0..=FRAC_PI_2).contains(&a));
            sum += a;
        }
        let mean = (sum / n as f64).to_degrees();
        assert!((mean - 41.0).abs() < 0.5, "mean polar {mean}");
    }

    #[test]
    fn default_params_validate() {
        SystemParams::default().validate().unwrap();
        let p = SystemParams { fov: 95f64.to_radians(), ..SystemParams::default() };
        assert!(matches!(p.validate(), Err(Error::Validation { field, .. }) if field == "fov"));
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn cosines_are_bounded(
            sx in 0.0..5.0f64, sy in 0.0..5.0f64, sz in 0.0..3.0f64,
            ux in 0.0..5.0f64, uy in 0.0..5.0f64, uz in 0.0..3.0f64,
            az in -PI..PI, polar in 0.0..FRAC_PI_2,
            yaw in -FRAC_PI_2..FRAC_PI_2, roll in -FRAC_PI_2..FRAC_PI_2,
        ) {
            let src = Vec3::new(sx, sy, sz);
            let u = user([ux, uy, uz], az, polar);
            prop_assume!((src - u.device_pos).norm() > 1e-6);
            let c = cos_incidence_at_device(&src, &u).unwrap();
            prop_assert!(c.abs() <= 1.0 + 1e-12);
            let c = cos_irradiance_from_mirror(&src, &u.device_pos, yaw, roll).unwrap();
            prop_assert!(c.abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn adding_a_blocker_never_restores_los(
            bx in 0.2..4.8f64, by in 0.2..4.8f64, ux in 0.5..4.5f64, uy in 0.5..4.5f64,
            polar in 0.0..1.2f64, az in -PI..PI,
        ) {
            let u = user([ux, uy, 0.85], az, polar);
            let mut scene = Scene::reference(u.clone());
            let p = SystemParams::default();
            let before = los_indicator(&scene, &u, &p, 1e-3);
            scene.blockers.push(CylinderBlocker::person_at(bx, by));
            let after = los_indicator(&scene, &u, &p, 1e-3);
            prop_assert!(after <= before);
        }
    }
}
