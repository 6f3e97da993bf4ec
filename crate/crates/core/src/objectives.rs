//! Rate, NOMA sum rate, power consumption and energy efficiency.

use std::f64::consts::{E, PI};

use crate::channel::{ChannelGain, PathSet};
use crate::error::{Error, Result};
use crate::optics::Receiver;
use crate::system::{PowerBudget, SystemParams};

/// Rate lower bound for an effective gain `h` and LC factor `amplification`, at
/// electrical signal power `signal_power` (A² scale, i.e. `(p/q)²` for one user).
pub fn rate_lower_bound(h: f64, amplification: f64, signal_power: f64, params: &SystemParams) -> Result<f64> {
    check_noise(params)?;
    let b = params.bandwidth;
    let current = params.responsivity * amplification * h;
    let snr = E / (2.0 * PI) * current * current * signal_power / (params.noise_psd * b);
    Ok(b * snr.ln_1p() / std::f64::consts::LN_2)
}

fn check_noise(params: &SystemParams) -> Result<()> {
    if !(params.bandwidth > 0.0) {
        return Err(Error::validation("bandwidth", "must be positive"));
    }
    if !(params.noise_psd > 0.0) {
        return Err(Error::validation("noise_psd", "must be positive"));
    }
    Ok(())
}

/// Achievable rate of a single user, bits/s.
pub fn achievable_rate(gain: &ChannelGain, receiver: &Receiver, params: &SystemParams) -> Result<f64> {
    if !(gain.h_total >= 0.0) {
        return Err(Error::Contract(format!("negative channel gain {}", gain.h_total)));
    }
    let amp = gain.amplification(receiver, params)?;
    rate_lower_bound(gain.h_total, amp, params.signal_power(), params)
}

/// Achievable rate when the only reflector is the plain wall.
pub fn wall_rate(gain: &ChannelGain, receiver: &Receiver, params: &SystemParams) -> Result<f64> {
    if gain.paths != PathSet::Wall {
        return Err(Error::Contract("wall rate needs a wall channel".into()));
    }
    achievable_rate(gain, receiver, params)
}

/// Power-domain NOMA configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct NomaConfig {
    pub zeta: f64,
    pub num_users: usize,
    pub power_ratios: Vec<f64>,
}

impl NomaConfig {
    pub fn new(zeta: f64, num_users: usize) -> Result<Self> {
        Ok(Self {
            zeta,
            num_users,
            power_ratios: noma_power_ratios(zeta, num_users)?,
        })
    }
}

/// Power ratios `c_u = ζ(1-ζ)^(u-1)` for all but the last user, who gets `(1-ζ)^(U-1)`.
pub fn noma_power_ratios(zeta: f64, users: usize) -> Result<Vec<f64>> {
    if !(zeta > 0.5 && zeta <= 1.0) {
        return Err(Error::domain("noma_power_ratios", format!("zeta {zeta} outside (0.5, 1]")));
    }
    if users == 0 {
        return Err(Error::domain("noma_power_ratios", "at least one user is required"));
    }
    let mut ratios: Vec<f64> = (0..users - 1)
        .map(|u| zeta * (1.0 - zeta).powi(u as i32))
        .collect();
    ratios.push((1.0 - zeta).powi(users as i32 - 1));
    Ok(ratios)
}

/// Sum rate over users ordered by ascending `h_total`, with perfect SIC.
///
/// The interference seen by user `u` is built from user `u`'s own channel.
pub fn noma_sum_rate(
    gains: &[ChannelGain],
    receivers: &[Receiver],
    cfg: &NomaConfig,
    params: &SystemParams,
) -> Result<f64> {
    let n = gains.len();
    if n != receivers.len() || n != cfg.power_ratios.len() {
        return Err(Error::Contract(format!(
            "{} gains, {} receivers, {} power ratios",
            n,
            receivers.len(),
            cfg.power_ratios.len()
        )));
    }
    if gains.windows(2).any(|w| w[0].h_total > w[1].h_total) {
        return Err(Error::Contract("gains must be sorted by ascending h_total".into()));
    }
    check_noise(params)?;
    let ps = params.signal_power();
    let noise = params.noise_psd * params.bandwidth;
    let k = E / (2.0 * PI);
    let mut sum = 0.0;
    for u in 0..n {
        let amp = gains[u].amplification(&receivers[u], params)?;
        let i2 = (params.responsivity * amp * gains[u].h_total).powi(2);
        let interference: f64 = cfg.power_ratios[u + 1..].iter().map(|c| i2 * c * ps).sum();
        let sinr = k * i2 * cfg.power_ratios[u] * ps / (interference + noise);
        sum += params.bandwidth * sinr.ln_1p() / std::f64::consts::LN_2;
    }
    Ok(sum)
}

/// Power drawn by the whole link, W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub p_signal: f64,
    pub p_dac: f64,
    pub p_filter: f64,
    pub p_pa: f64,
    pub p_driver: f64,
    pub p_t_circuit: f64,
    pub p_mirror_unit: f64,
    pub p_adc: f64,
    pub p_tia: f64,
    pub p_lc: f64,
    pub p_r_circuit: f64,
    pub k_elements: usize,
}

impl PowerModel {
    /// Model for `k` mirror elements; `with_lc` adds the LC module's draw.
    pub fn new(params: &SystemParams, k: usize, with_lc: bool) -> Self {
        let b: &PowerBudget = &params.power_budget;
        Self {
            p_signal: params.signal_power(),
            p_dac: b.dac,
            p_filter: b.filter,
            p_pa: b.power_amplifier,
            p_driver: b.led_driver,
            p_t_circuit: b.tx_circuit,
            p_mirror_unit: b.mirror_unit,
            p_adc: b.adc,
            p_tia: b.tia,
            p_lc: if with_lc { b.lc } else { 0.0 },
            p_r_circuit: b.rx_circuit,
            k_elements: k,
        }
    }

    pub fn transmitter(&self) -> f64 {
        self.p_signal + self.p_dac + self.p_filter + self.p_pa + self.p_driver + self.p_t_circuit
    }

    pub fn ris(&self) -> f64 {
        self.p_mirror_unit * self.k_elements as f64
    }

    pub fn receiver(&self) -> f64 {
        self.p_adc + self.p_tia + self.p_filter + self.p_lc + self.p_r_circuit
    }
}

pub fn total_power(pm: &PowerModel) -> f64 {
    pm.transmitter() + pm.ris() + pm.receiver()
}

/// Bits per joule.
pub fn energy_efficiency(rate: f64, pm: &PowerModel) -> Result<f64> {
    let p = total_power(pm);
    if !(p > 0.0) {
        return Err(Error::domain("energy_efficiency", "total power is zero"));
    }
    Ok(rate / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PathSet;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gain(h: f64) -> ChannelGain {
        ChannelGain {
            paths: PathSet::Ris,
            h_los: 0.0,
            h_nlos_per_mirror: vec![h],
            h_wall: 0.0,
            psi_los: 0.0,
            psi_nlos: 1.0,
            indicator: 0,
            h_total: h,
            los_incidence: None,
            nlos_incidence: None,
            gain_incidence: None,
        }
    }

    #[test]
    fn zero_gain_zero_rate() {
        let p = SystemParams::default();
        assert_eq!(achievable_rate(&gain(0.0), &Receiver::Plain, &p).unwrap(), 0.0);
    }

    #[test]
    fn rate_reference_value() {
        let p = SystemParams::default();
        let r = rate_lower_bound(1e-6, 1.2, p.signal_power(), &p).unwrap();
        assert_relative_eq!(r, 94_784_525.507_037_8, max_relative = 1e-10);
    }

    #[test]
    fn doubling_power_quadruples_snr() {
        let mut p = SystemParams::default();
        let snr = |p: &SystemParams| {
            let r = rate_lower_bound(1e-6, 1.0, p.signal_power(), p).unwrap();
            (r / p.bandwidth).exp2() - 1.0
        };
        let s1 = snr(&p);
        p.optical_power *= 2.0;
        assert_relative_eq!(snr(&p), 4.0 * s1, max_relative = 1e-9);
    }

    #[test]
    fn invalid_noise_is_rejected() {
        let p = SystemParams { noise_psd: 0.0, ..SystemParams::default() };
        assert!(achievable_rate(&gain(1e-6), &Receiver::Plain, &p).unwrap_err().is_validation());
    }

    #[test]
    fn wall_rate_requires_wall_channel() {
        let p = SystemParams::default();
        assert!(wall_rate(&gain(1e-6), &Receiver::Plain, &p).is_err());
        let mut g = gain(0.0);
        g.paths = PathSet::Wall;
        g.h_nlos_per_mirror.clear();
        assert_eq!(wall_rate(&g, &Receiver::Plain, &p).unwrap(), 0.0);
    }

    #[test]
    fn power_ratio_values() {
        assert_eq!(noma_power_ratios(0.7, 1).unwrap(), vec![1.0]);
        let c = noma_power_ratios(0.6, 4).unwrap();
        let expected = [0.6, 0.24, 0.096, 0.064];
        for (a, b) in c.iter().zip(expected) {
            assert_relative_eq!(*a, b, max_relative = 1e-12);
        }
        assert_eq!(c.iter().sum::<f64>(), 1.0);
        assert!(noma_power_ratios(0.5, 3).is_err());
        assert!(noma_power_ratios(1.1, 3).is_err());
    }

    #[test]
    fn noma_single_user_matches_rate() {
        let p = SystemParams::default();
        let cfg = NomaConfig::new(0.6, 1).unwrap();
        let g = gain(2e-6);
        let r = noma_sum_rate(std::slice::from_ref(&g), &[Receiver::Plain], &cfg, &p).unwrap();
        assert_relative_eq!(r, achievable_rate(&g, &Receiver::Plain, &p).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn noma_two_equal_users_reference() {
        let p = SystemParams::default();
        let cfg = NomaConfig::new(0.6, 2).unwrap();
        let g = [gain(1e-6), gain(1e-6)];
        let r = noma_sum_rate(&g, &[Receiver::Plain; 2], &cfg, &p).unwrap();
        assert_relative_eq!(r, 64_774_918.157_073_8, max_relative = 1e-10);
    }

    #[test]
    fn noma_rejects_unsorted_and_zero_gains_give_zero() {
        let p = SystemParams::default();
        let cfg = NomaConfig::new(0.6, 2).unwrap();
        let g = [gain(2e-6), gain(1e-6)];
        assert!(matches!(
            noma_sum_rate(&g, &[Receiver::Plain; 2], &cfg, &p),
            Err(Error::Contract(_))
        ));
        let g = [gain(0.0), gain(0.0)];
        assert_eq!(noma_sum_rate(&g, &[Receiver::Plain; 2], &cfg, &p).unwrap(), 0.0);
    }

    #[test]
    fn power_model_values() {
        let p = SystemParams::default();
        let pm0 = PowerModel::new(&p, 0, true);
        assert_eq!(pm0.ris(), 0.0);
        let pm = PowerModel::new(&p, 300, true);
        assert_relative_eq!(pm.ris(), 30.0, max_relative = 1e-14);
        assert_relative_eq!(total_power(&pm0), 9.829_344_444_444_44, max_relative = 1e-12);
        let ee = energy_efficiency(1e9, &PowerModel::new(&p, 100, true)).unwrap();
        assert_relative_eq!(ee, 50_430_310.633_903_4, max_relative = 1e-10);
    }

    #[test]
    fn ee_zero_rate_and_more_elements() {
        let p = SystemParams::default();
        assert_eq!(energy_efficiency(0.0, &PowerModel::new(&p, 10, true)).unwrap(), 0.0);
        let a = energy_efficiency(1e8, &PowerModel::new(&p, 100, true)).unwrap();
        let b = energy_efficiency(1e8, &PowerModel::new(&p, 200, true)).unwrap();
        assert!(b < a);
    }

    proptest! {
        #[test]
        fn ratios_sum_to_one(zeta in 0.5001..1.0f64, users in 1usize..12) {
            let c = noma_power_ratios(zeta, users).unwrap();
            prop_assert!((c.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
            prop_assert!(c.iter().all(|x| *x >= 0.0));
        }

        #[test]
        fn rate_monotone(h in 0.0..1e-5f64, dh in 0.0..1e-6f64, amp in 1.0..3.0f64) {
            let p = SystemParams::default();
            let ps = p.signal_power();
            let r = rate_lower_bound(h, amp, ps, &p).unwrap();
            prop_assert!(rate_lower_bound(h + dh, amp, ps, &p).unwrap() >= r);
            prop_assert!(rate_lower_bound(h, amp * 1.01, ps, &p).unwrap() >= r);
            prop_assert!(rate_lower_bound(h, amp, ps * 1.5, &p).unwrap() >= r);
        }

        #[test]
        fn noma_never_beats_best_single_user(
            mut hs in proptest::collection::vec(1e-8..1e-5f64, 2..6), zeta in 0.51..1.0f64,
        ) {
            let p = SystemParams::default();
            hs.sort_by(f64::total_cmp);
            let gains: Vec<_> = hs.iter().map(|h| gain(*h)).collect();
            let rx = vec![Receiver::Plain; gains.len()];
            let cfg = NomaConfig::new(zeta, gains.len()).unwrap();
            let sum = noma_sum_rate(&gains, &rx, &cfg, &p).unwrap();
            let best = achievable_rate(gains.last().unwrap(), &Receiver::Plain, &p).unwrap();
            prop_assert!(sum <= best * (1.0 + 1e-12));
        }
    }
}
