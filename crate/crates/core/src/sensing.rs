//! Analytical sensing subsystem: single-AP detection, network sensing
//! coverage, and the sensory packet inter-arrival MGF.
//!
//! Sensing APs are monostatic radars on a PPP of intensity lambda_s with
//! sector beams of half-width Theta. A target is covered when at least one
//! in-range, beam-aligned AP sees an echo SINR above the detection threshold.

use crate::error::{Error, Result};
use crate::numerics::{self, QuadratureSpec};
use crate::params::SystemParameters;
use crate::snc::MgfEvaluation;

/// Network sensing coverage and the sampled single-AP detection curve.
#[derive(Debug, Clone)]
pub struct SensingCoverage {
    /// Network coverage probability P_cv_s.
    pub p_cov_s: f64,
    /// Sampled (r, P_sg(r)) over [0, R].
    pub p_sg_curve: Vec<(f64, f64)>,
}

/// Echo-budget factor rho(r) = delta (4 pi)^3 r^(2 alpha) /
/// (gain_tx gain_rx N^2 lambda_w^2 rcs_mean); strictly increasing in r.
pub fn rho_factor(r: f64, p: &SystemParameters) -> f64 {
    let four_pi_cubed = (4.0 * std::f64::consts::PI).powi(3);
    let n = f64::from(p.n_antennas);
    let denom = p.gain_tx * p.gain_rx * n * n * p.wavelength * p.wavelength * p.rcs_mean;
    p.detect_threshold * four_pi_cubed * r.powf(2.0 * p.alpha) / denom
}

/// Single-AP detection probability P_sg(r) conditioned on beam alignment.
pub fn single_ap_detection(r: f64, p: &SystemParameters) -> Result<f64> {
    let rho = rho_factor(r, p);
    if rho == 0.0 {
        return Ok(1.0);
    }
    let noise_exp = rho * p.noise_sensing / p.power;
    let interference = numerics::interference_exponent_terms(rho, p.alpha)?;
    let exponent = -noise_exp - 2.0 * p.beam_halfwidth * p.lambda_s() * interference;
    Ok(exponent.exp())
}

/// Network sensing coverage probability (radial integral of r * P_sg(r)).
///
/// The integrand collapses over a few decades in r because rho(r) scales as
/// r^(2 alpha), so the radial range is pre-split on a log grid before the
/// adaptive pass.
pub fn sensing_coverage(p: &SystemParameters, quad: &QuadratureSpec) -> Result<SensingCoverage> {
    let r_max = p.max_range;
    let curve: Vec<(f64, f64)> = (0..=128)
        .map(|i| {
            let r = r_max * f64::from(i) / 128.0;
            single_ap_detection(r, p).map(|v| (r, v))
        })
        .collect::<Result<_>>()?;

    let p_cov_s = if p.lambda_s() == 0.0 {
        0.0
    } else {
        let mut breaks = vec![0.0];
        let mut scale = r_max * 1e-6;
        while scale < r_max {
            breaks.push(scale);
            scale *= 10.0;
        }
        breaks.push(r_max);
        let integral = numerics::integrate_segments(
            |r| match single_ap_detection(r, p) {
                Ok(v) => r * v,
                Err(_) => f64::NAN, // surfaced as a quadrature failure
            },
            &breaks,
            quad,
        )?;
        1.0 - (-2.0 * p.beam_halfwidth * p.lambda_s() * integral).exp()
    };
    debug_assert!((0.0..=1.0).contains(&p_cov_s));
    Ok(SensingCoverage {
        p_cov_s,
        p_sg_curve: curve,
    })
}

/// MGF of the packet inter-arrival time iota * T_s, iota geometric with
/// parameter P_cv_s. Finite for theta > 0 only while
/// (1 - P_cv_s) e^(theta T_s) < 1; always finite for theta <= 0.
pub fn arrival_mgf(
    theta: f64,
    p: &SystemParameters,
    cov: &SensingCoverage,
) -> Result<MgfEvaluation> {
    let pc = cov.p_cov_s;
    if pc <= 0.0 {
        return Err(Error::NoArrivals);
    }
    let ts = p.scan_interval;
    if theta > 0.0 && (1.0 - pc) * (theta * ts).exp() >= 1.0 {
        return Ok(MgfEvaluation::infinite());
    }
    let value = 1.0 / ((-theta * ts).exp_m1() / pc + 1.0);
    Ok(MgfEvaluation::finite(value))
}
