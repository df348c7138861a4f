//! Independent packet-level simulator: PPP topologies, radar detection
//! trials, conditional-SINR service sampling, the FCFS queue recursion, and
//! the empirical PAVP estimate.
//!
//! Every realization draws from its own counter-based substream, so runs are
//! reproducible bit-for-bit regardless of the parallel schedule.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::comm;
use crate::error::{Error, Result};
use crate::params::SystemParameters;
use crate::sensing;

/// A sensing AP: position and boresight orientation.
#[derive(Debug, Clone, Copy)]
pub struct SensingAp {
    pub pos: [f64; 2],
    pub orientation: f64,
}

/// One sampled topology. The typical user sits at the origin (users[0]),
/// as does the target.
#[derive(Debug, Clone)]
pub struct SpatialRealization {
    pub sensing_aps: Vec<SensingAp>,
    pub comm_aps: Vec<[f64; 2]>,
    pub users: Vec<[f64; 2]>,
    pub pilot_of_user: Vec<u16>,
    pub target: [f64; 2],
    pub region_radius: f64,
    pub rng_seed: u64,
}

/// Which tiers a realization needs; skipping unused tiers keeps the large
/// oracle loops cheap without touching their statistics.
#[derive(Debug, Clone, Copy)]
pub struct SampleScope {
    pub sensing: bool,
    pub comm: bool,
}

impl SampleScope {
    pub fn full() -> Self {
        SampleScope {
            sensing: true,
            comm: true,
        }
    }
    pub fn sensing_only() -> Self {
        SampleScope {
            sensing: true,
            comm: false,
        }
    }
    pub fn comm_only() -> Self {
        SampleScope {
            sensing: false,
            comm: true,
        }
    }
}

/// Per-packet queue trace with PAoI samples.
#[derive(Debug, Clone)]
pub struct QueueTrace {
    pub arrivals: Vec<f64>,
    pub services: Vec<f64>,
    pub departures: Vec<f64>,
    /// PAoI samples: paoi[n] = departures[n+1] - arrivals[n].
    pub paoi: Vec<f64>,
    /// Count of PAoI samples above the threshold.
    pub violations: usize,
}

/// Empirical PAVP estimate across spatial realizations.
#[derive(Debug, Clone)]
pub struct PavpEstimate {
    pub mean: f64,
    /// Realization-level sample standard error.
    pub std_err: f64,
    /// Fraction of realizations whose typical user was in coverage.
    pub coverage_fraction: f64,
    pub n_realizations: usize,
    pub packets_per_realization: usize,
}

/// Arrival-process sampling mode for the PAVP simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalMode {
    /// Geometric scan counts with the analytical coverage parameter.
    AnalyticGeometric,
    /// Physical sensing trials with a fresh sensing topology every scan.
    PhysicalFresh,
    /// Physical sensing trials over the realization's frozen topology
    /// (fading and RCS still refresh per scan).
    PhysicalFrozen,
}

/// Simulator switches.
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub arrival_mode: ArrivalMode,
    /// Per-attempt Rayleigh fading on top of the DE SINR instead of the
    /// hardened constant-SINR service model.
    pub rayleigh_service: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            arrival_mode: ArrivalMode::AnalyticGeometric,
            rayleigh_service: false,
        }
    }
}

/// Outcome of one service draw.
#[derive(Debug, Clone, Copy)]
pub enum ServiceSample {
    OutOfCoverage,
    Sample { slots: u64, gamma: f64 },
}

/// Counter-based substream: one independent ChaCha stream per work unit.
pub fn substream(master_seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn uniform_open(rng: &mut impl Rng) -> f64 {
    // (0, 1): keeps logs finite.
    loop {
        let u: f64 = rng.random();
        if u > 0.0 && u < 1.0 {
            return u;
        }
    }
}

fn exp1(rng: &mut impl Rng) -> f64 {
    -uniform_open(rng).ln()
}

/// Poisson(lambda * pi * R^2) points uniform on the disk.
pub fn sample_ppp(intensity: f64, region_radius: f64, rng: &mut impl Rng) -> Vec<[f64; 2]> {
    if intensity <= 0.0 || region_radius <= 0.0 {
        return Vec::new();
    }
    let mean = intensity * std::f64::consts::PI * region_radius * region_radius;
    let count = Poisson::new(mean).expect("positive mean").sample(rng) as usize;
    (0..count)
        .map(|_| {
            let r = region_radius * rng.random::<f64>().sqrt();
            let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            [r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

impl SpatialRealization {
    /// Sample a realization; the typical user and the target sit at the
    /// origin (Slivnyak), and each user draws one of tau_tr pilots uniformly.
    pub fn sample(
        p: &SystemParameters,
        region_radius: f64,
        seed: u64,
        scope: SampleScope,
        rng: &mut impl Rng,
    ) -> Self {
        let sensing_aps = if scope.sensing {
            sample_ppp(p.lambda_s(), region_radius, rng)
                .into_iter()
                .map(|pos| SensingAp {
                    pos,
                    orientation: 2.0 * std::f64::consts::PI * rng.random::<f64>(),
                })
                .collect()
        } else {
            Vec::new()
        };
        let (comm_aps, users, pilot_of_user) = if scope.comm {
            let comm_aps = sample_ppp(p.lambda_c(), region_radius, rng);
            let mut users = vec![[0.0, 0.0]];
            users.extend(sample_ppp(p.lambda_u, region_radius, rng));
            let n_pilots = p.pilot_count().max(1) as u16;
            let pilots = (0..users.len())
                .map(|_| rng.random_range(0..n_pilots))
                .collect();
            (comm_aps, users, pilots)
        } else {
            (Vec::new(), Vec::new(), Vec::new())
        };
        SpatialRealization {
            sensing_aps,
            comm_aps,
            users,
            pilot_of_user,
            target: [0.0, 0.0],
            region_radius,
            rng_seed: seed,
        }
    }
}

fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a % two_pi;
    if x > std::f64::consts::PI {
        x -= two_pi;
    } else if x < -std::f64::consts::PI {
        x += two_pi;
    }
    x
}

/// Mean interference from the unsampled exterior of the region disk.
///
/// With alpha just above 2 the far field converges like D^(2-alpha), so the
/// truncated mean is not negligible; its variance is O(D^(2-2*alpha)) and is.
/// The deterministic mean is added to every interference sum.
fn exterior_interference_mean(p: &SystemParameters, region_radius: f64) -> f64 {
    let d = region_radius.max(1.0);
    2.0 * p.beam_halfwidth * p.lambda_s() * p.power * d.powf(2.0 - p.alpha) / (p.alpha - 2.0)
}

/// One network sensing scan over a realization: true iff any in-range,
/// beam-aligned sensing AP sees echo SINR above the detection threshold.
///
/// Per-AP Swerling-I RCS draws, per-pair Rayleigh interference fading, and
/// sector interference selected by the receiver's stored orientation.
pub fn simulate_sensing_trial(
    real: &SpatialRealization,
    p: &SystemParameters,
    rng: &mut impl Rng,
) -> bool {
    let theta = p.beam_halfwidth;
    let full_beam = theta >= std::f64::consts::PI - 1e-12;
    let mu_tail = exterior_interference_mean(p, real.region_radius);

    // In-range candidates aligned with the target, nearest first.
    let mut candidates: Vec<(usize, f64)> = real
        .sensing_aps
        .iter()
        .enumerate()
        .filter_map(|(i, ap)| {
            let r = (ap.pos[0].powi(2) + ap.pos[1].powi(2)).sqrt();
            if r > p.max_range {
                return None;
            }
            let aligned = full_beam || {
                let dir = (-ap.pos[1]).atan2(-ap.pos[0]);
                wrap_angle(dir - ap.orientation).abs() <= theta
            };
            aligned.then_some((i, r))
        })
        .collect();
    candidates.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));

    for (i, r) in candidates {
        let rho = sensing::rho_factor(r, p);
        let e = exp1(rng); // sigma / rcs_mean
                           // Detection needs I + N_s < P e / rho; the exterior mean already
                           // bounds I from below, so hopeless candidates never price the field.
        let budget = if rho > 0.0 {
            p.power * e / rho - p.noise_sensing
        } else {
            f64::INFINITY
        };
        if budget <= mu_tail {
            continue;
        }
        let ap_i = real.sensing_aps[i];
        let mut interference = mu_tail;
        let mut detected = true;
        for (j, ap_j) in real.sensing_aps.iter().enumerate() {
            if j == i {
                continue;
            }
            let dx = ap_j.pos[0] - ap_i.pos[0];
            let dy = ap_j.pos[1] - ap_i.pos[1];
            let in_sector = full_beam || wrap_angle(dy.atan2(dx) - ap_i.orientation).abs() <= theta;
            if !in_sector {
                continue;
            }
            let dist = (dx * dx + dy * dy).sqrt();
            let h = exp1(rng);
            interference += p.power * h * comm::large_scale_gain(dist, p.alpha);
            if interference >= budget {
                detected = false;
                break;
            }
        }
        if detected && interference < budget {
            return true;
        }
    }
    false
}

/// Single-AP oracle: detection of a target at distance `r` by one aligned
/// AP, with the interferer field sampled around the receiver.
pub fn single_ap_detection_trial(
    r: f64,
    p: &SystemParameters,
    region_radius: f64,
    rng: &mut impl Rng,
) -> bool {
    let rho = sensing::rho_factor(r, p);
    if rho == 0.0 {
        return true;
    }
    let e = exp1(rng);
    let budget = p.power * e / rho - p.noise_sensing;
    let mu_tail = exterior_interference_mean(p, region_radius);
    if budget <= mu_tail {
        return false;
    }
    let theta = p.beam_halfwidth;
    let mut interference = mu_tail;
    // Interferers form a PPP thinned to the receive sector: intensity
    // lambda_s over a 2*Theta wedge, equivalently full disk * Theta/pi.
    let interferers = sample_ppp(
        p.lambda_s() * theta / std::f64::consts::PI,
        region_radius,
        rng,
    );
    for pos in interferers {
        let dist = (pos[0].powi(2) + pos[1].powi(2)).sqrt();
        interference += p.power * exp1(rng) * comm::large_scale_gain(dist, p.alpha);
        if interference >= budget {
            return false;
        }
    }
    interference < budget
}

/// One fresh-topology network sensing scan with lazy field sampling: the
/// in-range disk is always drawn, the exterior annulus only once some
/// candidate survives the detection budget prefilter. The split is an exact
/// decomposition of the PPP, so the detection law is unchanged while the
/// common no-chance trials stay cheap.
pub fn fresh_sensing_scan(p: &SystemParameters, region: f64, rng: &mut impl Rng) -> bool {
    let theta = p.beam_halfwidth;
    let full_beam = theta >= std::f64::consts::PI - 1e-12;
    let mu_tail = exterior_interference_mean(p, region);
    let r_near = p.max_range.min(region);

    let mut candidates: Vec<(SensingAp, f64)> = sample_ppp(p.lambda_s(), r_near, rng)
        .into_iter()
        .map(|pos| {
            let ap = SensingAp {
                pos,
                orientation: 2.0 * std::f64::consts::PI * rng.random::<f64>(),
            };
            let r = (pos[0].powi(2) + pos[1].powi(2)).sqrt();
            (ap, r)
        })
        .collect();
    candidates.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

    let mut annulus: Option<Vec<SensingAp>> = None;
    for idx in 0..candidates.len() {
        let (ap_i, r) = candidates[idx];
        if r > p.max_range {
            continue;
        }
        let aligned = full_beam || {
            let dir = (-ap_i.pos[1]).atan2(-ap_i.pos[0]);
            wrap_angle(dir - ap_i.orientation).abs() <= theta
        };
        if !aligned {
            continue;
        }
        let rho = sensing::rho_factor(r, p);
        let e = exp1(rng);
        let budget = if rho > 0.0 {
            p.power * e / rho - p.noise_sensing
        } else {
            f64::INFINITY
        };
        if budget <= mu_tail {
            continue;
        }
        let far = annulus.get_or_insert_with(|| sample_annulus(p.lambda_s(), r_near, region, rng));
        let mut interference = mu_tail;
        let mut blocked = false;
        let others = candidates
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, (ap, _))| ap)
            .chain(far.iter());
        for ap_j in others {
            let dx = ap_j.pos[0] - ap_i.pos[0];
            let dy = ap_j.pos[1] - ap_i.pos[1];
            let in_sector = full_beam || wrap_angle(dy.atan2(dx) - ap_i.orientation).abs() <= theta;
            if !in_sector {
                continue;
            }
            let dist = (dx * dx + dy * dy).sqrt();
            interference += p.power * exp1(rng) * comm::large_scale_gain(dist, p.alpha);
            if interference >= budget {
                blocked = true;
                break;
            }
        }
        if !blocked && interference < budget {
            return true;
        }
    }
    false
}

fn sample_annulus(
    intensity: f64,
    r_inner: f64,
    r_outer: f64,
    rng: &mut impl Rng,
) -> Vec<SensingAp> {
    if r_outer <= r_inner || intensity <= 0.0 {
        return Vec::new();
    }
    let area = std::f64::consts::PI * (r_outer * r_outer - r_inner * r_inner);
    let count = Poisson::new(intensity * area)
        .expect("positive mean")
        .sample(rng) as usize;
    (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let r = (r_inner * r_inner + u * (r_outer * r_outer - r_inner * r_inner)).sqrt();
            let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            SensingAp {
                pos: [r * phi.cos(), r * phi.sin()],
                orientation: 2.0 * std::f64::consts::PI * rng.random::<f64>(),
            }
        })
        .collect()
}

/// Empirical network sensing coverage over fresh realizations.
pub fn sensing_detection_rate(p: &SystemParameters, trials: usize, master_seed: u64) -> (f64, f64) {
    let region = p.simulation_region_radius();
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(master_seed, t as u64);
            usize::from(fresh_sensing_scan(p, region, &mut rng))
        })
        .sum();
    proportion_estimate(hits, trials)
}

/// Empirical communication coverage: fraction of realizations whose typical
/// user's DE SINR clears the threshold.
pub fn comm_coverage_rate(
    p: &SystemParameters,
    gamma_th: f64,
    n_realizations: usize,
    master_seed: u64,
) -> Result<(f64, f64)> {
    let region = p.simulation_region_radius();
    let hits = (0..n_realizations)
        .into_par_iter()
        .map(|t| -> Result<usize> {
            let mut rng = substream(master_seed, t as u64);
            let real = SpatialRealization::sample(
                p,
                region,
                master_seed,
                SampleScope::comm_only(),
                &mut rng,
            );
            if real.comm_aps.is_empty() {
                return Ok(0);
            }
            let sinr = comm::conditional_de_sinr(&real, 0, p)?;
            Ok(usize::from(
                !sinr.interference_dominated && sinr.value >= gamma_th,
            ))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(proportion_estimate(hits, n_realizations))
}

/// Agresti-Coull-smoothed standard error keeps 3-sigma tests meaningful at
/// the degenerate ends (0 or n hits).
fn proportion_estimate(hits: usize, n: usize) -> (f64, f64) {
    let rate = hits as f64 / n as f64;
    let smoothed = (hits as f64 + 2.0) / (n as f64 + 4.0);
    let se = (smoothed * (1.0 - smoothed) / n as f64).sqrt();
    (rate, se)
}

/// Geometric attempt count with failure probability `failure`; support {1,2,...}.
fn sample_geometric_attempts(failure: f64, rng: &mut impl Rng) -> u64 {
    if failure <= 0.0 {
        return 1;
    }
    if failure >= 1.0 {
        return u64::MAX;
    }
    let u = uniform_open(rng);
    let j = (u.ln() / failure.ln()).ceil();
    if j < 1.0 {
        1
    } else if j >= 9.007_199_254_740_992e15 {
        u64::MAX
    } else {
        j as u64
    }
}

/// Service draw for the typical user of a realization: the retransmission
/// count is geometric with the decoding error at the conditional DE SINR.
pub fn simulate_service_sample(
    real: &SpatialRealization,
    user_index: usize,
    p: &SystemParameters,
    rng: &mut impl Rng,
) -> Result<ServiceSample> {
    let sinr = comm::conditional_de_sinr(real, user_index, p)?;
    if sinr.interference_dominated || sinr.value < p.sinr_threshold {
        return Ok(ServiceSample::OutOfCoverage);
    }
    let eps = comm::decoding_error(sinr.value, p).value;
    let slots = sample_geometric_attempts(eps, rng);
    Ok(ServiceSample::Sample {
        slots,
        gamma: sinr.value,
    })
}

/// FCFS queue via the service-start recursion
/// Z(n) = max(T_A(n), Z(n-1) + T_S(n-1)); departures, PAoI, and violations
/// against the threshold `zeta`.
pub fn run_queue(arrival_times: &[f64], service_times: &[f64], zeta: f64) -> Result<QueueTrace> {
    if arrival_times.len() != service_times.len() {
        return Err(Error::Simulation(format!(
            "length mismatch: {} arrivals vs {} services",
            arrival_times.len(),
            service_times.len()
        )));
    }
    if arrival_times.is_empty() {
        return Err(Error::Simulation("empty trace".into()));
    }
    for w in arrival_times.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Simulation("arrivals must be nondecreasing".into()));
        }
    }
    if arrival_times[0] < 0.0 || service_times.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
        return Err(Error::Simulation("times must be positive".into()));
    }
    let n = arrival_times.len();
    let mut departures = Vec::with_capacity(n);
    let mut start = arrival_times[0];
    departures.push(start + service_times[0]);
    for i in 1..n {
        start = arrival_times[i].max(start + service_times[i - 1]);
        departures.push(start + service_times[i]);
    }
    let paoi: Vec<f64> = (0..n - 1)
        .map(|i| departures[i + 1] - arrival_times[i])
        .collect();
    let violations = paoi.iter().filter(|&&d| d > zeta).count();
    Ok(QueueTrace {
        arrivals: arrival_times.to_vec(),
        services: service_times.to_vec(),
        departures,
        paoi,
        violations,
    })
}

/// Scans until detection with a cap; the cap marks the realization stale.
const MAX_SCANS_PER_PACKET: u64 = 10_000_000;

fn sample_interarrival_scans(
    mode: ArrivalMode,
    p_cov_s: f64,
    frozen: Option<&SpatialRealization>,
    p: &SystemParameters,
    rng: &mut impl Rng,
) -> Option<u64> {
    match mode {
        ArrivalMode::AnalyticGeometric => {
            if p_cov_s <= 0.0 {
                return None;
            }
            let scans = sample_geometric_attempts(1.0 - p_cov_s, rng);
            (scans < MAX_SCANS_PER_PACKET).then_some(scans)
        }
        ArrivalMode::PhysicalFresh => {
            let region = p.simulation_region_radius();
            for scan in 1..=MAX_SCANS_PER_PACKET {
                if fresh_sensing_scan(p, region, rng) {
                    return Some(scan);
                }
            }
            None
        }
        ArrivalMode::PhysicalFrozen => {
            let real = frozen.expect("frozen topology required");
            for scan in 1..=MAX_SCANS_PER_PACKET {
                if simulate_sensing_trial(real, p, rng) {
                    return Some(scan);
                }
            }
            None
        }
    }
}

fn rayleigh_service_slots(gamma_bar: f64, p: &SystemParameters, rng: &mut impl Rng) -> u64 {
    for attempt in 1..=MAX_SCANS_PER_PACKET {
        let gamma = gamma_bar * exp1(rng);
        let eps = comm::decoding_error(gamma, p).value;
        if rng.random::<f64>() >= eps {
            return attempt;
        }
    }
    u64::MAX
}

/// Violation fraction for a single realization, or 1.0 when the realization
/// cannot deliver fresh packets at all (out of coverage, or no arrivals).
#[allow(clippy::too_many_arguments)]
fn realization_pavp(
    p: &SystemParameters,
    zeta: f64,
    gamma_th: f64,
    packets: usize,
    p_cov_s: f64,
    opts: &McOptions,
    rng: &mut impl Rng,
    region: f64,
) -> Result<(f64, bool)> {
    let scope = if opts.arrival_mode == ArrivalMode::PhysicalFrozen {
        SampleScope::full()
    } else {
        SampleScope::comm_only()
    };
    let real = SpatialRealization::sample(p, region, 0, scope, rng);
    if real.comm_aps.is_empty() {
        return Ok((1.0, false));
    }
    let sinr = comm::conditional_de_sinr(&real, 0, p)?;
    if sinr.interference_dominated || sinr.value < gamma_th {
        return Ok((1.0, false));
    }
    let eps = comm::decoding_error(sinr.value, p).value;

    let t_s = p.scan_interval;
    let t_c = p.slot_duration();
    let mut arrivals = Vec::with_capacity(packets);
    let mut services = Vec::with_capacity(packets);
    let mut clock = 0.0f64;
    for _ in 0..packets {
        let Some(scans) =
            sample_interarrival_scans(opts.arrival_mode, p_cov_s, Some(&real), p, rng)
        else {
            // Sensing cannot produce updates: stale with certainty.
            return Ok((1.0, true));
        };
        clock += scans as f64 * t_s;
        arrivals.push(clock);
        let slots = if opts.rayleigh_service {
            rayleigh_service_slots(sinr.value, p, rng)
        } else {
            sample_geometric_attempts(eps, rng)
        };
        if slots == u64::MAX {
            return Ok((1.0, true));
        }
        services.push(slots as f64 * t_c);
    }
    let trace = run_queue(&arrivals, &services, zeta)?;
    Ok((trace.violations as f64 / trace.paoi.len() as f64, true))
}

/// Empirical network-wide PAVP across independent spatial realizations.
///
/// Out-of-coverage realizations count as violation probability 1; the
/// estimate is the realization-level mean with its sample standard error.
pub fn simulate_pavp(
    p: &SystemParameters,
    zeta: f64,
    gamma_th: f64,
    n_realizations: usize,
    packets_per_realization: usize,
    master_seed: u64,
    opts: &McOptions,
) -> Result<PavpEstimate> {
    if n_realizations == 0 {
        return Err(Error::Simulation("need at least one realization".into()));
    }
    if packets_per_realization < 2 {
        return Err(Error::Simulation(
            "need at least two packets per realization for a PAoI sample".into(),
        ));
    }
    let p_cov_s = if opts.arrival_mode == ArrivalMode::AnalyticGeometric {
        if p.lambda_s() == 0.0 {
            0.0
        } else {
            sensing::sensing_coverage(p, &crate::numerics::QuadratureSpec::default())?.p_cov_s
        }
    } else {
        f64::NAN
    };
    let region = p.simulation_region_radius();

    let per_realization: Vec<(f64, bool)> = (0..n_realizations)
        .into_par_iter()
        .map(|idx| {
            let mut rng = substream(master_seed, idx as u64);
            realization_pavp(
                p,
                zeta,
                gamma_th,
                packets_per_realization,
                p_cov_s,
                opts,
                &mut rng,
                region,
            )
        })
        .collect::<Result<_>>()?;

    let n = per_realization.len() as f64;
    let mean = per_realization.iter().map(|(v, _)| v).sum::<f64>() / n;
    let var = if per_realization.len() > 1 {
        per_realization
            .iter()
            .map(|(v, _)| (v - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    let covered = per_realization.iter().filter(|(_, c)| *c).count();
    Ok(PavpEstimate {
        mean,
        std_err: (var / n).sqrt(),
        coverage_fraction: covered as f64 / n,
        n_realizations,
        packets_per_realization,
    })
}

/// One realization's full queue trace, for CSV export.
pub fn simulate_trace(
    p: &SystemParameters,
    zeta: f64,
    gamma_th: f64,
    packets: usize,
    master_seed: u64,
    opts: &McOptions,
) -> Result<Option<QueueTrace>> {
    if packets < 2 {
        return Err(Error::Simulation("need at least two packets".into()));
    }
    let p_cov_s = if opts.arrival_mode == ArrivalMode::AnalyticGeometric {
        if p.lambda_s() == 0.0 {
            0.0
        } else {
            sensing::sensing_coverage(p, &crate::numerics::QuadratureSpec::default())?.p_cov_s
        }
    } else {
        f64::NAN
    };
    let region = p.simulation_region_radius();
    let mut rng = substream(master_seed, 0);
    let scope = if opts.arrival_mode == ArrivalMode::PhysicalFrozen {
        SampleScope::full()
    } else {
        SampleScope::comm_only()
    };
    let real = SpatialRealization::sample(p, region, master_seed, scope, &mut rng);
    if real.comm_aps.is_empty() {
        return Ok(None);
    }
    let sinr = comm::conditional_de_sinr(&real, 0, p)?;
    if sinr.interference_dominated || sinr.value < gamma_th {
        return Ok(None);
    }
    let eps = comm::decoding_error(sinr.value, p).value;
    let mut arrivals = Vec::with_capacity(packets);
    let mut services = Vec::with_capacity(packets);
    let mut clock = 0.0;
    for _ in 0..packets {
        let Some(scans) =
            sample_interarrival_scans(opts.arrival_mode, p_cov_s, Some(&real), p, &mut rng)
        else {
            return Ok(None);
        };
        clock += scans as f64 * p.scan_interval;
        arrivals.push(clock);
        let slots = if opts.rayleigh_service {
            rayleigh_service_slots(sinr.value, p, &mut rng)
        } else {
            sample_geometric_attempts(eps, &mut rng)
        };
        services.push(slots as f64 * p.slot_duration());
    }
    run_queue(&arrivals, &services, zeta).map(Some)
}
