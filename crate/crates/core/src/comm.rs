//! Analytical communication subsystem: LMMSE estimation statistics, the
//! deterministic-equivalent downlink SINR, the coverage lower bound, the
//! finite-blocklength decoding error, and the packet service-time MGF.

use crate::error::{Error, Result};
use crate::montecarlo::SpatialRealization;
use crate::numerics::{self, QuadratureSpec};
use crate::params::SystemParameters;
use crate::snc::MgfEvaluation;

/// Per-(AP, user) channel estimation statistics.
#[derive(Debug, Clone, Copy)]
pub struct ChannelStats {
    /// Large-scale gain l_mk = min(1, r^-alpha).
    pub l_mk: f64,
    /// Pilot interference-plus-noise power d_mk.
    pub d_mk: f64,
    /// LMMSE estimate variance l_mk^2 / d_mk.
    pub sigma2_mk: f64,
}

/// Closed-form coverage lower bound and its ingredients.
#[derive(Debug, Clone, Copy)]
pub struct CoverageBound {
    /// Lower bound on the communication coverage probability.
    pub p_cov_c: f64,
    /// psi(aleph) from the bound's exponent.
    pub psi_value: f64,
    /// Alzer constant eta_c = aleph * (aleph!)^(-1/aleph).
    pub eta_c: f64,
    /// Effective E[aleph] used.
    pub aleph_eff: f64,
    /// psi <= 0: the bound degenerates to 1 and carries no information.
    pub saturated: bool,
}

/// Deterministic-equivalent SINR for one topology.
#[derive(Debug, Clone, Copy)]
pub struct DeSinr {
    pub value: f64,
    /// The DE denominator was nonpositive; SINR reported as 0.
    pub interference_dominated: bool,
}

/// Finite-blocklength decoding error probability.
#[derive(Debug, Clone, Copy)]
pub struct DepEval {
    pub value: f64,
    /// gamma <= 0 gives zero channel dispersion; reported as certain error.
    pub degenerate: bool,
}

/// Service-time MGF evaluation with its diagnostic flags.
#[derive(Debug, Clone, Copy)]
pub struct ServiceMgf {
    pub eval: MgfEvaluation,
    /// psi <= 0: single-slot limit e^(theta T_c) used.
    pub saturated: bool,
    /// eps(gamma_th) e^(theta T_c) within 0.1% of the pole; tolerance
    /// tightened tenfold for the integral.
    pub near_pole: bool,
}

/// Bounded path-loss gain min(1, r^-alpha).
pub fn large_scale_gain(r: f64, alpha: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else {
        r.powf(-alpha)
    }
}

/// LMMSE statistics for one (AP, user) pair in a realization.
pub fn channel_stats(
    real: &SpatialRealization,
    ap_index: usize,
    user_index: usize,
    p: &SystemParameters,
) -> ChannelStats {
    let ap = real.comm_aps[ap_index];
    let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let l_mk = large_scale_gain(dist(ap, real.users[user_index]), p.alpha);
    let pilot_k = real.pilot_of_user[user_index];
    let mut d_mk = 1.0 / (p.pilot_symbols * p.pilot_snr);
    for (j, user) in real.users.iter().enumerate() {
        if real.pilot_of_user[j] == pilot_k {
            d_mk += large_scale_gain(dist(ap, *user), p.alpha);
        }
    }
    ChannelStats {
        l_mk,
        d_mk,
        sigma2_mk: l_mk * l_mk / d_mk,
    }
}

/// Conditional deterministic-equivalent downlink SINR for `user_index`,
/// given a fixed topology and pilot assignment.
///
/// Scalar expansion: aleph / ((1/M) sum_i sum_m d_mi l_mi^-2 (l_mk + aleph/P) - 1)
/// with d_mi the Section-V per-(AP, user) pilot interference-plus-noise power
/// (the sum over i covers every user, the typical one included).
pub fn conditional_de_sinr(
    real: &SpatialRealization,
    user_index: usize,
    p: &SystemParameters,
) -> Result<DeSinr> {
    let m_aps = real.comm_aps.len();
    if m_aps == 0 {
        return Err(Error::NoCommunicationTier(
            "realization has no communication APs".into(),
        ));
    }
    let n_users = real.users.len();
    if user_index >= n_users {
        return Err(Error::Simulation(format!(
            "user index {user_index} out of range ({n_users} users)"
        )));
    }
    let aleph = (m_aps * p.n_antennas as usize) as f64;
    let aleph_over_p = aleph / p.power;
    let noise_term = 1.0 / (p.pilot_symbols * p.pilot_snr);
    let n_pilots = p.pilot_count().max(1);

    let mut gains = vec![0.0f64; n_users];
    let mut pilot_sum = vec![0.0f64; n_pilots];
    let mut total = 0.0f64;
    for ap in &real.comm_aps {
        pilot_sum.iter_mut().for_each(|s| *s = 0.0);
        for (i, user) in real.users.iter().enumerate() {
            let dx = ap[0] - user[0];
            let dy = ap[1] - user[1];
            let l = large_scale_gain((dx * dx + dy * dy).sqrt(), p.alpha);
            gains[i] = l;
            pilot_sum[real.pilot_of_user[i] as usize % n_pilots] += l;
        }
        let l_mk = gains[user_index];
        let signal_factor = l_mk + aleph_over_p;
        for i in 0..n_users {
            let d_mi = pilot_sum[real.pilot_of_user[i] as usize % n_pilots] + noise_term;
            total += d_mi / (gains[i] * gains[i]) * signal_factor;
        }
    }
    let denominator = total / m_aps as f64 - 1.0;
    if denominator <= 0.0 {
        return Ok(DeSinr {
            value: 0.0,
            interference_dominated: true,
        });
    }
    Ok(DeSinr {
        value: aleph / denominator,
        interference_dominated: false,
    })
}

/// psi(aleph) of the coverage bound exponent (product form, implemented
/// verbatim).
pub fn psi(p: &SystemParameters, aleph: f64) -> Result<f64> {
    let lc = p.lambda_c();
    if lc <= 0.0 {
        return Err(Error::NoCommunicationTier("lambda_c = 0".into()));
    }
    let a = p.alpha;
    let lu = p.lambda_u;
    let pilot_term = lu + (a - 2.0) / (a * std::f64::consts::PI * p.pilot_snr);
    let power_term = 1.0 + (a - 1.0) * aleph / ((a - 2.0) * p.power);
    Ok(lu / (lc * p.pilot_symbols) * pilot_term * power_term - 1.0)
}

/// The moment-sum route to the same exponent: I1 + I2 - 1 from the
/// printed per-term forms. Shipped as a diagnostic next to the product form;
/// the two printed routes coincide algebraically, and the comparator makes
/// that visible rather than assuming it.
pub fn psi_moment_sum(p: &SystemParameters, aleph: f64) -> Result<(f64, f64)> {
    let lc = p.lambda_c();
    if lc <= 0.0 {
        return Err(Error::NoCommunicationTier("lambda_c = 0".into()));
    }
    let a = p.alpha;
    let lu = p.lambda_u;
    let api = a * std::f64::consts::PI;
    let i1 = lu / (lc * p.pilot_symbols) * (lu + (a - 2.0) / (p.pilot_snr * api));
    let i2 = lu * aleph / (lc * p.pilot_symbols * p.power)
        * ((a - 1.0) / (a - 2.0) * lu + (a - 1.0) / (p.pilot_snr * api));
    Ok((i1, i2))
}

/// Relative difference between the product-form psi and the moment sum.
pub fn psi_diagnostic(p: &SystemParameters, aleph: f64) -> Result<f64> {
    let product = psi(p, aleph)?;
    let (i1, i2) = psi_moment_sum(p, aleph)?;
    let sum = i1 + i2 - 1.0;
    let scale = product.abs().max(sum.abs()).max(1e-300);
    Ok((product - sum).abs() / scale)
}

/// Communication coverage lower bound at threshold `gamma_th`.
pub fn comm_coverage(gamma_th: f64, p: &SystemParameters) -> Result<CoverageBound> {
    if !(gamma_th >= 0.0) {
        return Err(Error::numerical("comm_coverage", "gamma_th must be >= 0"));
    }
    if p.lambda_c() <= 0.0 {
        return Err(Error::NoCommunicationTier("lambda_c = 0".into()));
    }
    let aleph = p.effective_aleph()?;
    let psi_value = psi(p, aleph)?;
    let eta_c = numerics::alzer_eta(aleph);
    if psi_value <= 0.0 {
        return Ok(CoverageBound {
            p_cov_c: 1.0,
            psi_value,
            eta_c,
            aleph_eff: aleph,
            saturated: true,
        });
    }
    let x = (-eta_c * gamma_th * psi_value).exp();
    // (1 - x)^aleph for real aleph, stable at both ends.
    let miss = if x >= 1.0 {
        0.0
    } else {
        (aleph * (-x).ln_1p()).exp()
    };
    Ok(CoverageBound {
        p_cov_c: (1.0 - miss).clamp(0.0, 1.0),
        psi_value,
        eta_c,
        aleph_eff: aleph,
        saturated: false,
    })
}

/// Finite-blocklength decoding error probability at SINR `gamma`.
pub fn decoding_error(gamma: f64, p: &SystemParameters) -> DepEval {
    if !(gamma > 0.0) {
        return DepEval {
            value: 1.0,
            degenerate: true,
        };
    }
    let tau_d = p.tau_d();
    let dispersion = 1.0 - (1.0 + gamma).powi(-2);
    let num = (1.0 + gamma).ln() - p.packet_bits * std::f64::consts::LN_2 / tau_d;
    let value = numerics::q_function(num / (dispersion / tau_d).sqrt());
    DepEval {
        value,
        degenerate: false,
    }
}

/// SINR at which the FBC rate exactly matches the packet: eps = 1/2 there.
pub fn rate_matching_sinr(p: &SystemParameters) -> f64 {
    2f64.powf(p.packet_bits / p.tau_d()) - 1.0
}

/// Service-time MGF of the coverage-conditioned bound construction.
///
/// Finite only while eps(gamma_th) e^(theta T_c) < 1; eps is decreasing, so
/// the threshold is the supremum and a sign change of the denominator inside
/// the range is equivalent to that product reaching 1. When the coverage
/// bound saturates (psi <= 0) the conditional SINR density degenerates to
/// ever-larger gamma and the MGF limit is the single-slot value.
pub fn service_mgf(
    theta: f64,
    gamma_th: f64,
    p: &SystemParameters,
    quad: &QuadratureSpec,
) -> Result<ServiceMgf> {
    let cov = comm_coverage(gamma_th, p)?;
    let t_c = p.slot_duration();
    if cov.saturated {
        return Ok(ServiceMgf {
            eval: MgfEvaluation::finite((theta * t_c).exp()),
            saturated: true,
            near_pole: false,
        });
    }
    if cov.p_cov_c <= 0.0 {
        return Err(Error::numerical(
            "service_mgf",
            "coverage bound is zero at this threshold",
        ));
    }
    let eps_sup = decoding_error(gamma_th, p).value;
    let pole = eps_sup * (theta * t_c).exp();
    if pole >= 1.0 {
        return Err(Error::UnstableService { theta });
    }
    let near_pole = pole > 0.999;
    let quad_eff = if near_pole {
        quad.tightened(10.0)
    } else {
        quad.clone()
    };

    let a = cov.eta_c * cov.psi_value;
    let aleph = cov.aleph_eff;
    let exp_neg_theta_tc = (-theta * t_c).exp();
    // Prefactor folded into the integrand so the tolerances act on the
    // returned magnitude rather than on a vanishing raw integral.
    let scale = aleph * a / cov.p_cov_c;
    let integrand = |gamma: f64| {
        let eps = decoding_error(gamma, p).value;
        let x = (-a * gamma).exp();
        let tail = if x >= 1.0 {
            0.0
        } else {
            ((aleph - 1.0) * (-x).ln_1p()).exp()
        };
        scale * (1.0 - eps) * x * tail / (exp_neg_theta_tc - eps)
    };
    let value = numerics::integrate(integrand, gamma_th, f64::INFINITY, &quad_eff)?;
    Ok(ServiceMgf {
        eval: MgfEvaluation::finite(value),
        saturated: false,
        near_pole,
    })
}
