//! Special functions and adaptive quadrature shared by the analytical modules.

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for adaptive quadrature.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        // Bounds downstream are compared against Monte Carlo at ~1e-3
        // resolution; these defaults keep two orders of margin.
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::numerical("quadrature", "tolerances must be > 0"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::numerical(
                "quadrature",
                "max_subdivisions must be >= 1",
            ));
        }
        Ok(())
    }

    /// Copy with both tolerances tightened by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureSpec {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Gaussian tail probability Q(x) = P[N(0,1) > x].
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of the Gaussian Q-function on (0,1).
pub fn q_inverse(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::numerical(
            "q_inverse",
            format!("argument {eps} outside (0,1)"),
        ));
    }
    if eps > 0.5 {
        return Ok(-q_inverse(1.0 - eps)?);
    }
    // Newton on ln Q(x) = ln eps; asymptotic start covers the deep tail.
    let mut x = if eps > 0.3 {
        0.5
    } else {
        (-2.0 * eps.ln()).sqrt()
    };
    let target = eps.ln();
    for _ in 0..60 {
        let q = q_function(x);
        if q <= 0.0 {
            x -= 0.5; // fell off the representable tail; back up
            continue;
        }
        let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let g = q.ln() - target;
        let dg = -phi / q;
        let step = g / dg;
        x -= step;
        if step.abs() < 1e-13 * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    Err(Error::numerical(
        "q_inverse",
        format!("no convergence at eps = {eps}"),
    ))
}

/// ln Gamma(x) for x > 0.
pub fn log_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Alzer constant eta = a * (a!)^(-1/a) for real a >= 1, computed via ln Gamma.
pub fn alzer_eta(aleph: f64) -> f64 {
    aleph * (-log_gamma(aleph + 1.0) / aleph).exp()
}

/// Gauss hypergeometric value 2F1(1, 1 - 2/alpha; 2 - 2/alpha; -rho) for the
/// interference Laplace factor, rho >= 0 and alpha > 2.
///
/// For rho <= 1 the Pfaff transformation maps the argument to
/// rho/(1+rho) in [0, 1/2], where the series converges unconditionally. For
/// larger rho the series degrades (the mapped argument approaches 1), so the
/// value is recovered from the far-field integral it represents,
///   F(rho) = rho/(alpha-2) * 2F1(...) = (rho^(2/alpha)/alpha) *
///            integral_0^rho v^(-2/alpha)/(1+v) dv,
/// with the substitution v = s^(alpha/(alpha-2)) that removes the endpoint
/// singularity.
pub fn hyp2f1_interference(rho: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::numerical(
            "hyp2f1",
            format!("alpha = {alpha} must exceed 2"),
        ));
    }
    if !(rho >= 0.0) {
        return Err(Error::numerical(
            "hyp2f1",
            format!("rho = {rho} must be >= 0"),
        ));
    }
    if rho == 0.0 {
        return Ok(1.0);
    }
    if rho <= 1.0 {
        return hyp2f1_pfaff_series(rho, alpha);
    }
    let f = far_field_integral(rho, alpha)?;
    Ok((alpha - 2.0) * f / rho)
}

/// Pfaff series: (1+rho)^-1 * sum_n n!/(c)_n * w^n with c = 2 - 2/alpha and
/// w = rho/(1+rho).
fn hyp2f1_pfaff_series(rho: f64, alpha: f64) -> Result<f64> {
    let c = 2.0 - 2.0 / alpha;
    let w = rho / (1.0 + rho);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 1..20_000usize {
        let nf = n as f64;
        term *= nf / (c + nf - 1.0) * w;
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            return Ok(sum / (1.0 + rho));
        }
    }
    Err(Error::Numerical {
        context: "hyp2f1".into(),
        message: format!("series did not converge (rho = {rho}, alpha = {alpha})"),
        best_estimate: Some(sum / (1.0 + rho)),
        error_bound: Some(term.abs()),
    })
}

/// F(rho) = int_1^inf rho*u^(1-alpha)/(1+rho*u^-alpha) du via the smooth form
/// (rho^(2/alpha)/(alpha-2)) * int_0^S ds/(1+s^q), q = alpha/(alpha-2),
/// S = rho^((alpha-2)/alpha).
fn far_field_integral(rho: f64, alpha: f64) -> Result<f64> {
    let q = alpha / (alpha - 2.0);
    let s_max = rho.powf((alpha - 2.0) / alpha);
    let spec = QuadratureSpec::default();
    // The integrand knee sits at s = 1; split there when it is interior.
    let integral = if s_max > 1.0 {
        integrate_segments(|s| 1.0 / (1.0 + s.powf(q)), &[0.0, 1.0, s_max], &spec)?
    } else {
        integrate(|s| 1.0 / (1.0 + s.powf(q)), 0.0, s_max, &spec)?
    };
    Ok(rho.powf(2.0 / alpha) / (alpha - 2.0) * integral)
}

/// Sensing interference exponent terms: rho/(2(1+rho)) +
/// rho/(alpha-2) * 2F1(1, 1-2/alpha; 2-2/alpha; -rho).
pub fn interference_exponent_terms(rho: f64, alpha: f64) -> Result<f64> {
    let near = rho / (2.0 * (1.0 + rho));
    let far = if rho <= 1.0 {
        rho / (alpha - 2.0) * hyp2f1_pfaff_series(rho, alpha)?
    } else {
        far_field_integral(rho, alpha)?
    };
    Ok(near + far)
}

/// Adaptive-Simpson integral of `f` over [a, b]; `b` may be +infinity, in
/// which case x = a + t/(1-t) maps the range to [0, 1).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if b.is_infinite() {
        let g = move |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = 1.0 - t;
            f(a + t / u) / (u * u)
        };
        return adaptive_simpson(&g, 0.0, 1.0, spec);
    }
    if !(a < b) {
        if a == b {
            return Ok(0.0);
        }
        return Err(Error::numerical(
            "integrate",
            format!("bad range [{a}, {b}]"),
        ));
    }
    adaptive_simpson(&f, a, b, spec)
}

/// Integral over consecutive finite segments given by `breaks` (sorted).
/// Used where the integrand varies over many decades, e.g. a log-spaced
/// split near r = 0 for the radial sensing integral.
pub fn integrate_segments<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if breaks.len() < 2 {
        return Err(Error::numerical(
            "integrate",
            "need at least two breakpoints",
        ));
    }
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], spec)?;
    }
    Ok(total)
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::numerical(
            "integrate",
            format!("integrand non-finite at x = {x}"),
        ))
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = eval(f, a)?;
    let fb = eval(f, b)?;
    let m = 0.5 * (a + b);
    let fm = eval(f, m)?;
    let whole = simpson(fa, fm, fb, b - a);

    // Two passes: the first pass estimate scales the relative tolerance.
    let mut scale = whole.abs();
    for _ in 0..2 {
        let tol = spec.abs_tol.max(spec.rel_tol * scale);
        match adapt(f, a, m, b, fa, fm, fb, whole, tol, spec.max_subdivisions) {
            Ok((value, _)) => {
                let new_scale = value.abs();
                if new_scale <= scale * 4.0 + spec.abs_tol {
                    return Ok(value);
                }
                scale = new_scale; // first pass badly underestimated the magnitude
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::numerical(
        "integrate",
        "tolerance scaling did not settle",
    ))
}

/// Recursive refinement. Returns (value, subdivisions used) or a failure
/// carrying the best estimate so far.
#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    budget: usize,
) -> Result<(f64, usize)> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = (left + right - whole) / 15.0;
    if err.abs() <= tol || (b - a) < 1e-14 * (a.abs() + b.abs() + 1.0) {
        return Ok((left + right + err, 1));
    }
    if budget <= 1 {
        return Err(Error::Numerical {
            context: "integrate".into(),
            message: "subdivision budget exhausted before tolerance was met".into(),
            best_estimate: Some(left + right + err),
            error_bound: Some(err.abs()),
        });
    }
    let (lv, lc) = adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, budget - 1)?;
    let remaining = budget.saturating_sub(lc + 1).max(1);
    let (rv, rc) = adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, remaining)?;
    Ok((lv + rv, lc + rc + 1))
}
