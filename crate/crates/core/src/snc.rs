//! Stochastic-network-calculus bound engine: queue stability, the
//! conditional PAVP bound, the network-wide bound, and optimization of the
//! free Chernoff parameter theta.
//!
//! The FCFS recursion itself lives in the simulator; this module consumes
//! only the inter-arrival and service MGFs.

use crate::comm::{self, CoverageBound};
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;
use crate::params::SystemParameters;
use crate::sensing::{self, SensingCoverage};

/// Value of an MGF at some theta, with an explicit domain flag.
#[derive(Debug, Clone, Copy)]
pub struct MgfEvaluation {
    pub value: f64,
    pub finite: bool,
}

impl MgfEvaluation {
    pub fn finite(value: f64) -> Self {
        MgfEvaluation {
            value,
            finite: true,
        }
    }

    pub fn infinite() -> Self {
        MgfEvaluation {
            value: f64::INFINITY,
            finite: false,
        }
    }
}

/// Network-wide PAVP evaluation at one (theta, zeta) point.
#[derive(Debug, Clone)]
pub struct PavpResult {
    /// Conditional bound for users in communication coverage.
    pub upsilon: f64,
    /// Network-wide bound 1 - P_cv_c * (1 - upsilon).
    pub upsilon_nw: f64,
    /// Chernoff parameter used (the optimum for `best_theta`).
    pub theta_star: Option<f64>,
    /// Whether a stable theta was found.
    pub stable: bool,
    /// Whether the raw conditional bound exceeded 1 and was clamped.
    pub clamped: bool,
    /// Communication coverage lower bound used in the composition.
    pub p_cov_c: f64,
    /// Sensing coverage probability.
    pub p_cov_s: f64,
}

impl PavpResult {
    /// Degenerate point: upsilon pinned at 1, so the composition
    /// 1 - p_cov_c (1 - upsilon) collapses to 1 for any coverage.
    fn degenerate(p_cov_c: f64, p_cov_s: f64) -> Self {
        PavpResult {
            upsilon: 1.0,
            upsilon_nw: 1.0,
            theta_star: None,
            stable: false,
            clamped: true,
            p_cov_c,
            p_cov_s,
        }
    }
}

/// Shared context for bound evaluations over theta at fixed parameters.
pub struct BoundContext<'a> {
    pub params: &'a SystemParameters,
    pub cov_s: SensingCoverage,
    pub cov_c: CoverageBound,
    pub gamma_th: f64,
    pub quad: QuadratureSpec,
}

impl<'a> BoundContext<'a> {
    pub fn new(params: &'a SystemParameters, gamma_th: f64, quad: &QuadratureSpec) -> Result<Self> {
        let cov_s = sensing::sensing_coverage(params, quad)?;
        let cov_c = comm::comm_coverage(gamma_th, params)?;
        Ok(BoundContext {
            params,
            cov_s,
            cov_c,
            gamma_th,
            quad: quad.clone(),
        })
    }

    fn arrival(&self, theta: f64) -> Result<MgfEvaluation> {
        sensing::arrival_mgf(theta, self.params, &self.cov_s)
    }

    fn service(&self, theta: f64) -> Result<MgfEvaluation> {
        comm::service_mgf(theta, self.gamma_th, self.params, &self.quad).map(|s| s.eval)
    }

    /// Stability condition M_TA(-theta) * M_TS(theta) < 1.
    pub fn stable_at(&self, theta: f64) -> Result<bool> {
        let ms = match self.service(theta) {
            Ok(m) => m,
            Err(Error::UnstableService { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        if !ms.finite {
            return Ok(false);
        }
        let ma = self.arrival(-theta)?;
        Ok(ma.value * ms.value < 1.0)
    }

    /// Conditional PAVP bound at theta, clamped to [0,1].
    pub fn upsilon_at(&self, theta: f64, zeta: f64) -> Result<(f64, bool)> {
        let ms = match self.service(theta) {
            Ok(m) => m,
            Err(Error::UnstableService { .. }) => {
                return Err(Error::UnstableAtTheta {
                    theta,
                    reason: "service MGF has a pole in range".into(),
                })
            }
            Err(e) => return Err(e),
        };
        if !ms.finite {
            return Err(Error::UnstableAtTheta {
                theta,
                reason: "service MGF infinite".into(),
            });
        }
        let ma_neg = self.arrival(-theta)?;
        if ma_neg.value * ms.value >= 1.0 {
            return Err(Error::UnstableAtTheta {
                theta,
                reason: "stability condition violated".into(),
            });
        }
        let ma_pos = self.arrival(theta)?;
        if !ma_pos.finite {
            return Err(Error::UnstableAtTheta {
                theta,
                reason: "arrival MGF infinite at +theta".into(),
            });
        }
        let denom = 1.0 / ms.value - ma_neg.value;
        let raw = (-theta * zeta).exp() * ma_pos.value / denom;
        let clamped = raw > 1.0;
        Ok((raw.clamp(0.0, 1.0), clamped))
    }

    /// Network-wide bound at theta: 1 - P_cv_c (1 - Upsilon).
    pub fn upsilon_nw_at(&self, theta: f64, zeta: f64) -> Result<PavpResult> {
        let (upsilon, clamped) = self.upsilon_at(theta, zeta)?;
        Ok(PavpResult {
            upsilon,
            upsilon_nw: 1.0 - self.cov_c.p_cov_c * (1.0 - upsilon),
            theta_star: Some(theta),
            stable: true,
            clamped,
            p_cov_c: self.cov_c.p_cov_c,
            p_cov_s: self.cov_s.p_cov_s,
        })
    }
}

/// Stability of the FCFS queue at a given Chernoff parameter.
pub fn stability(
    theta: f64,
    p: &SystemParameters,
    cov_s: &SensingCoverage,
    gamma_th: f64,
    quad: &QuadratureSpec,
) -> Result<bool> {
    if !(theta > 0.0) {
        return Err(Error::numerical("stability", "theta must be > 0"));
    }
    let ms = match comm::service_mgf(theta, gamma_th, p, quad) {
        Ok(m) => m.eval,
        Err(Error::UnstableService { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    if !ms.finite {
        return Ok(false);
    }
    let ma = sensing::arrival_mgf(-theta, p, cov_s)?;
    Ok(ma.value * ms.value < 1.0)
}

/// Conditional PAVP bound (valid for users in communication coverage).
pub fn pavp_conditional(
    theta: f64,
    zeta: f64,
    p: &SystemParameters,
    gamma_th: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let ctx = BoundContext::new(p, gamma_th, quad)?;
    ctx.upsilon_at(theta, zeta).map(|(v, _)| v)
}

/// Network-wide PAVP bound at a fixed theta.
pub fn pavp_networkwide(
    theta: f64,
    zeta: f64,
    p: &SystemParameters,
    gamma_th: f64,
    quad: &QuadratureSpec,
) -> Result<PavpResult> {
    match BoundContext::new(p, gamma_th, quad) {
        Ok(ctx) => match ctx.upsilon_nw_at(theta, zeta) {
            Ok(r) => Ok(r),
            Err(Error::UnstableAtTheta { .. }) => {
                Ok(PavpResult::degenerate(ctx.cov_c.p_cov_c, ctx.cov_s.p_cov_s))
            }
            Err(e) => Err(e),
        },
        Err(Error::NoCommunicationTier(_)) => Ok(PavpResult::degenerate(0.0, f64::NAN)),
        Err(Error::NoArrivals) => Ok(PavpResult::degenerate(f64::NAN, 0.0)),
        Err(e) => Err(e),
    }
}

const THETA_SCAN_LO: f64 = 1e-2;
const THETA_SCAN_HI: f64 = 1e6;
const THETA_SCAN_PER_DECADE: usize = 25;
const GOLDEN: f64 = 0.618033988749895;

/// Minimize the network-wide bound over the stable theta interval.
///
/// A log-spaced scan over [1e-2, 1e6] 1/s brackets the stable region
/// (T_c and T_s differ by orders of magnitude, so the scan is scale-free),
/// then golden-section refines around the best grid point. On ties the
/// search contracts toward smaller theta, which keeps flat or clamped
/// regions deterministic.
pub fn best_theta(
    zeta: f64,
    p: &SystemParameters,
    gamma_th: f64,
    quad: &QuadratureSpec,
) -> Result<PavpResult> {
    let ctx = match BoundContext::new(p, gamma_th, quad) {
        Ok(ctx) => ctx,
        Err(Error::NoCommunicationTier(_)) => return Ok(PavpResult::degenerate(0.0, f64::NAN)),
        Err(Error::NoArrivals) => return Ok(PavpResult::degenerate(f64::NAN, 0.0)),
        Err(e) => return Err(e),
    };
    if ctx.cov_s.p_cov_s <= 0.0 {
        return Ok(PavpResult::degenerate(ctx.cov_c.p_cov_c, 0.0));
    }

    let decades = (THETA_SCAN_HI / THETA_SCAN_LO).log10();
    let n = (decades * THETA_SCAN_PER_DECADE as f64).round() as usize;
    let theta_at = |i: usize| -> f64 { THETA_SCAN_LO * 10f64.powf(decades * i as f64 / n as f64) };

    let mut best: Option<(usize, f64)> = None;
    for i in 0..=n {
        let theta = theta_at(i);
        match ctx.upsilon_nw_at(theta, zeta) {
            Ok(r) => {
                let better = match best {
                    None => true,
                    Some((_, v)) => r.upsilon_nw < v,
                };
                if better {
                    best = Some((i, r.upsilon_nw));
                }
            }
            Err(Error::UnstableAtTheta { .. }) => continue,
            Err(e) => return Err(e),
        }
    }

    let Some((i_best, v_best)) = best else {
        return Ok(PavpResult::degenerate(ctx.cov_c.p_cov_c, ctx.cov_s.p_cov_s));
    };

    // Golden-section in log-theta on the bracket around the best grid point.
    let lo = if i_best == 0 {
        theta_at(0)
    } else {
        theta_at(i_best - 1)
    };
    let hi = if i_best == n {
        theta_at(n)
    } else {
        theta_at(i_best + 1)
    };
    let eval = |theta: f64| -> f64 {
        match ctx.upsilon_nw_at(theta, zeta) {
            Ok(r) => r.upsilon_nw,
            Err(_) => f64::INFINITY,
        }
    };
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = eval(x1.exp());
    let mut f2 = eval(x2.exp());
    for _ in 0..80 {
        if (b - a).abs() < 1e-6 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = eval(x1.exp());
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = eval(x2.exp());
        }
    }
    let theta_ref = 0.5 * (a + b);
    let refined = eval(theta_ref.exp());

    let (theta_star, _v) = if refined.is_finite() && refined < v_best {
        (theta_ref.exp(), refined)
    } else {
        (theta_at(i_best), v_best)
    };
    ctx.upsilon_nw_at(theta_star, zeta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParameters;

    fn table1() -> SystemParameters {
        let text = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/table1.json"
        ))
        .unwrap();
        SystemParameters::from_json(&text).unwrap()
    }

    /// Synthetic configuration in the regime where both tiers are live:
    /// strong sensing (long wavelength, lenient threshold) and a saturated
    /// communication bound (single-slot service limit).
    pub(crate) fn alive_sensing_params() -> SystemParameters {
        let mut p = table1();
        p.wavelength = 1.0;
        p.detect_threshold = 0.01;
        p.paoi_threshold = 10e-3;
        p
    }

    #[test]
    fn stability_matches_direct_mgf_composition() {
        let p = table1();
        let quad = QuadratureSpec::default();
        let cov_s = sensing::sensing_coverage(&p, &quad).unwrap();
        for theta in [10.0, 1e3, 1e4] {
            let ma = sensing::arrival_mgf(-theta, &p, &cov_s).unwrap();
            let ms = comm::service_mgf(theta, p.sinr_threshold, &p, &quad).unwrap();
            let direct = ms.eval.finite && ma.value * ms.eval.value < 1.0;
            assert_eq!(
                stability(theta, &p, &cov_s, p.sinr_threshold, &quad).unwrap(),
                direct
            );
        }
    }

    #[test]
    fn stability_small_theta_utilization_limit() {
        // Mean service 1 slot = 0.21 ms << mean inter-arrival; stable for small theta.
        let p = alive_sensing_params();
        let quad = QuadratureSpec::default();
        let cov_s = sensing::sensing_coverage(&p, &quad).unwrap();
        assert!(stability(1.0, &p, &cov_s, p.sinr_threshold, &quad).unwrap());
    }

    #[test]
    fn unstable_when_service_slower_than_arrivals() {
        // Scan interval shorter than the slot: arrivals outpace service.
        let mut p = alive_sensing_params();
        p.scan_interval = 0.1 * p.slot_duration();
        let quad = QuadratureSpec::default();
        let cov_s = sensing::sensing_coverage(&p, &quad).unwrap();
        // utilization = E[S]/E[A] = T_c * p_cov_s / T_s > 1 here
        assert!(cov_s.p_cov_s * p.slot_duration() > p.scan_interval);
        for theta in [1.0, 10.0, 100.0, 1e3, 1e4, 1e5] {
            assert!(!stability(theta, &p, &cov_s, p.sinr_threshold, &quad).unwrap());
        }
        let r = best_theta(p.paoi_threshold, &p, p.sinr_threshold, &quad).unwrap();
        assert!(!r.stable);
        assert_eq!(r.upsilon_nw, 1.0);
        assert!(r.theta_star.is_none());
    }

    #[test]
    fn upsilon_zeta_limits() {
        let p = alive_sensing_params();
        let quad = QuadratureSpec::default();
        let ctx = BoundContext::new(&p, p.sinr_threshold, &quad).unwrap();
        let theta = 2000.0;
        // zeta -> infinity kills the bound
        let (u_inf, _) = ctx.upsilon_at(theta, 10.0).unwrap();
        assert!(u_inf < 1e-300);
        // zeta = 0 reduces to M_A(theta)/(M_S^-1 - M_A(-theta)), clamped
        let ma_pos = ctx.arrival(theta).unwrap().value;
        let ma_neg = ctx.arrival(-theta).unwrap().value;
        let ms = ctx.service(theta).unwrap().value;
        let expect = (ma_pos / (1.0 / ms - ma_neg)).clamp(0.0, 1.0);
        let (u0, _) = ctx.upsilon_at(theta, 0.0).unwrap();
        assert!((u0 - expect).abs() < 1e-12);
        // monotone nonincreasing in zeta at fixed theta
        let (u1, _) = ctx.upsilon_at(theta, 5e-3).unwrap();
        let (u2, _) = ctx.upsilon_at(theta, 10e-3).unwrap();
        assert!(u2 <= u1);
    }

    #[test]
    fn networkwide_composition_identity() {
        let p = alive_sensing_params();
        let quad = QuadratureSpec::default();
        let r = best_theta(p.paoi_threshold, &p, p.sinr_threshold, &quad).unwrap();
        assert!(r.stable);
        let expect = 1.0 - r.p_cov_c * (1.0 - r.upsilon);
        assert_eq!(r.upsilon_nw, expect);
        assert!(r.theta_star.unwrap() > 0.0);
        assert!(r.upsilon_nw < 1.0, "alive config should dip below 1");
    }

    #[test]
    fn boundary_beta_conventions() {
        let quad = QuadratureSpec::default();
        // beta = 0: no communication tier
        let p0 = table1().with_beta(0.0);
        let r = best_theta(5e-3, &p0, p0.sinr_threshold, &quad).unwrap();
        assert_eq!(r.upsilon_nw, 1.0);
        assert_eq!(r.p_cov_c, 0.0);
        // beta = 1: sensing coverage zero, no arrivals
        let p1 = table1().with_beta(1.0);
        let r = best_theta(5e-3, &p1, p1.sinr_threshold, &quad).unwrap();
        assert_eq!(r.upsilon_nw, 1.0);
        assert_eq!(r.p_cov_s, 0.0);
        assert!(!r.stable);
    }

    #[test]
    fn best_theta_beats_log_grid_oracle() {
        let p = alive_sensing_params();
        let quad = QuadratureSpec::default();
        let zeta = p.paoi_threshold;
        let best = best_theta(zeta, &p, p.sinr_threshold, &quad).unwrap();
        let ctx = BoundContext::new(&p, p.sinr_threshold, &quad).unwrap();
        // Exhaustive 100-point log grid over the stable interval.
        let mut grid_best = f64::INFINITY;
        for i in 0..100 {
            let theta = 1e-2 * 10f64.powf(8.0 * i as f64 / 99.0);
            if let Ok(r) = ctx.upsilon_nw_at(theta, zeta) {
                grid_best = grid_best.min(r.upsilon_nw);
            }
        }
        assert!(
            best.upsilon_nw <= grid_best + 1e-6,
            "best_theta {} vs grid {}",
            best.upsilon_nw,
            grid_best
        );
    }

    #[test]
    fn best_theta_deterministic() {
        let p = alive_sensing_params();
        let quad = QuadratureSpec::default();
        let a = best_theta(p.paoi_threshold, &p, p.sinr_threshold, &quad).unwrap();
        let b = best_theta(p.paoi_threshold, &p, p.sinr_threshold, &quad).unwrap();
        assert_eq!(a.upsilon_nw, b.upsilon_nw);
        assert_eq!(a.theta_star, b.theta_star);
    }
}
