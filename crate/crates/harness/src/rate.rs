//! Entanglement distribution rate over a lossy fiber link.

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub distance_km: f64,
    pub loss_db_per_km: f64,
    /// Detection and coupling efficiency, in (0, 1].
    pub system_efficiency: f64,
    /// Attempts per second.
    pub repetition_rate_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkRate {
    pub transmissivity: f64,
    pub success_probability: f64,
    pub links_per_second: f64,
}

pub fn transmissivity(distance_km: f64, loss_db_per_km: f64) -> f64 {
    10f64.powf(-loss_db_per_km * distance_km / 10.0)
}

/// `rate = repetition rate * system efficiency * 10^(-loss * distance / 10)`.
///
/// Distance may be zero; every other parameter must be positive and finite.
pub fn estimate_link_rate(p: RateParams) -> Result<LinkRate, HarnessError> {
    let bad = |name: &str, v: f64| HarnessError::InvalidConfig(format!("{name} must be positive, got {v}"));
    if !(p.distance_km >= 0.0 && p.distance_km.is_finite()) {
        return Err(bad("distance", p.distance_km));
    }
    if !(p.loss_db_per_km > 0.0 && p.loss_db_per_km.is_finite()) {
        return Err(bad("loss", p.loss_db_per_km));
    }
    if !(p.system_efficiency > 0.0 && p.system_efficiency <= 1.0) {
        return Err(HarnessError::InvalidConfig(format!(
            "system efficiency must be in (0, 1], got {}",
            p.system_efficiency
        )));
    }
    if !(p.repetition_rate_hz > 0.0 && p.repetition_rate_hz.is_finite()) {
        return Err(bad("repetition rate", p.repetition_rate_hz));
    }
    let t = transmissivity(p.distance_km, p.loss_db_per_km);
    Ok(LinkRate {
        transmissivity: t,
        success_probability: t * p.system_efficiency,
        links_per_second: p.repetition_rate_hz * p.system_efficiency * t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: f64, loss: f64, eff: f64, rep: f64) -> RateParams {
        RateParams { distance_km: d, loss_db_per_km: loss, system_efficiency: eff, repetition_rate_hz: rep }
    }

    #[test]
    fn fifty_km() {
        let r = estimate_link_rate(params(50.0, 0.2, 0.1, 1e6)).unwrap();
        assert_eq!(r.transmissivity, 0.1);
        assert_eq!(r.links_per_second, 10_000.0);
    }

    #[test]
    fn zero_distance_is_lossless() {
        for loss in [0.1, 0.2, 3.0] {
            assert_eq!(estimate_link_rate(params(0.0, loss, 0.5, 10.0)).unwrap().transmissivity, 1.0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(estimate_link_rate(params(-1.0, 0.2, 0.1, 1e6)).is_err());
        assert!(estimate_link_rate(params(50.0, 0.0, 0.1, 1e6)).is_err());
        assert!(estimate_link_rate(params(50.0, 0.2, 0.0, 1e6)).is_err());
        assert!(estimate_link_rate(params(50.0, 0.2, 1.5, 1e6)).is_err());
        assert!(estimate_link_rate(params(50.0, 0.2, 0.1, 0.0)).is_err());
        assert!(estimate_link_rate(params(f64::NAN, 0.2, 0.1, 1e6)).is_err());
    }
}
