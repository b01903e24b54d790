//! Pointwise evaluation of the third-order differential constraint that a
//! bivariate additive noise model must satisfy for a reverse-direction
//! additive model to exist, plus the closed-form families where it does.
//!
//! The residual measures how far the cause's log-density is from solving
//! that constraint: a residual that vanishes everywhere marks the model as
//! potentially reversible, a large residual certifies identifiability.

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use rand::Rng;

/// Boxed scalar function; named families and hand-rolled closures share it.
pub type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Points where |nu''(y - f(x)) * f'(x)| or |f'(x)| falls at or below this
/// are skipped: the constraint divides by both quantities.
pub const ADMISSIBILITY_GUARD: f64 = 1e-12;

/// How derivatives of f, xi, nu are obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeMode {
    /// Derivative closures were supplied; they are cross-checked against
    /// finite differences of the base functions on every evaluation grid.
    Analytic,
    /// Central differences of the base functions with base step h, widened
    /// per derivative order and scaled by max(1, |x|).
    CentralDifference { h: f64 },
}

/// A bivariate additive noise model y = f(x) + n held as log-densities:
/// xi is the log-density of the cause, nu the log-density of the noise.
/// Normalization constants are irrelevant here, only derivatives enter.
pub struct AnmTriple {
    f: ScalarFn,
    f1: Option<ScalarFn>,
    f2: Option<ScalarFn>,
    f3: Option<ScalarFn>,
    xi: ScalarFn,
    xi2: Option<ScalarFn>,
    xi3: Option<ScalarFn>,
    nu: ScalarFn,
    nu1: Option<ScalarFn>,
    nu2: Option<ScalarFn>,
    nu3: Option<ScalarFn>,
    mode: DerivativeMode,
}

/// One grid point; residual is None when the point was skipped by the
/// admissibility guard or evaluated non-finite.
#[derive(Clone, Copy, Debug)]
pub struct ResidualPoint {
    pub x: f64,
    pub y: f64,
    pub residual: Option<f64>,
}

/// Named log-density families accepted by the triple constructors.
#[derive(Clone, Copy, Debug)]
pub enum Family {
    /// Unnormalized Gaussian, -(x - mean)^2 / (2 variance).
    Gaussian { mean: f64, variance: f64 },
    /// c1 exp(c2 x) + c3 x + c4 with c1 < 0 and c2 c3 > 0.
    LogMixLinExp { c: [f64; 4] },
}

impl Family {
    /// Checks the family's parameter inequalities; the error lists every
    /// violated one, prefixed with `label`.
    pub fn validate(&self, label: &str) -> Result<()> {
        let fails = self.violations(label);
        if fails.is_empty() {
            Ok(())
        } else {
            Err(Error::FamilyConstraint(fails.join("; ")))
        }
    }

    fn violations(&self, label: &str) -> Vec<String> {
        let mut fails = Vec::new();
        match *self {
            Family::Gaussian { variance, .. } => {
                if !(variance > 0.0 && variance.is_finite()) {
                    fails.push(format!("{label}: variance > 0 violated (variance = {variance})"));
                }
            }
            Family::LogMixLinExp { c } => {
                if !(c[0] < 0.0) {
                    fails.push(format!("{label}: c1 < 0 violated (c1 = {})", c[0]));
                }
                if !(c[1] * c[2] > 0.0) {
                    fails.push(format!(
                        "{label}: c2*c3 > 0 violated (c2*c3 = {})",
                        c[1] * c[2]
                    ));
                }
            }
        }
        fails
    }

    fn log_density(&self) -> ScalarFn {
        self.deriv(0)
    }

    fn deriv(&self, order: u32) -> ScalarFn {
        match *self {
            Family::Gaussian { mean, variance } => match order {
                0 => Box::new(move |x| -(x - mean) * (x - mean) / (2.0 * variance)),
                1 => Box::new(move |x| -(x - mean) / variance),
                2 => Box::new(move |_| -1.0 / variance),
                _ => Box::new(|_| 0.0),
            },
            Family::LogMixLinExp { c } => match order {
                0 => Box::new(move |x| c[0] * (c[1] * x).exp() + c[2] * x + c[3]),
                1 => Box::new(move |x| c[0] * c[1] * (c[1] * x).exp() + c[2]),
                n => {
                    let scale = c[0] * c[1].powi(n as i32);
                    Box::new(move |x| scale * (c[1] * x).exp())
                }
            },
        }
    }
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn poly_deriv(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect()
}

fn poly_fn(coeffs: Vec<f64>) -> ScalarFn {
    Box::new(move |x| poly_eval(&coeffs, x))
}

// Central differences. The third-order stencil loses roughly eps/s^3 of the
// function value to rounding, so it gets a 10x wider step than the others.
fn fd1(g: &ScalarFn, x: f64, h: f64) -> f64 {
    let s = h * x.abs().max(1.0);
    (g(x + s) - g(x - s)) / (2.0 * s)
}

fn fd2(g: &ScalarFn, x: f64, h: f64) -> f64 {
    let s = h * x.abs().max(1.0);
    (g(x + s) - 2.0 * g(x) + g(x - s)) / (s * s)
}

fn fd3(g: &ScalarFn, x: f64, h: f64) -> f64 {
    let s = 10.0 * h * x.abs().max(1.0);
    (g(x + 2.0 * s) - 2.0 * g(x + s) + 2.0 * g(x - s) - g(x - 2.0 * s)) / (2.0 * s * s * s)
}

/// Step used when cross-checking analytic derivatives.
const CHECK_H: f64 = 1e-4;

impl AnmTriple {
    /// Builds a triple from explicit derivative closures. Order of the
    /// groups: f with its first three derivatives, xi with its second and
    /// third, nu with its first three.
    #[allow(clippy::too_many_arguments)]
    pub fn analytic(
        f: ScalarFn,
        f1: ScalarFn,
        f2: ScalarFn,
        f3: ScalarFn,
        xi: ScalarFn,
        xi2: ScalarFn,
        xi3: ScalarFn,
        nu: ScalarFn,
        nu1: ScalarFn,
        nu2: ScalarFn,
        nu3: ScalarFn,
    ) -> AnmTriple {
        AnmTriple {
            f,
            f1: Some(f1),
            f2: Some(f2),
            f3: Some(f3),
            xi,
            xi2: Some(xi2),
            xi3: Some(xi3),
            nu,
            nu1: Some(nu1),
            nu2: Some(nu2),
            nu3: Some(nu3),
            mode: DerivativeMode::Analytic,
        }
    }

    /// Builds a triple from the base functions alone; derivatives come from
    /// central differences with base step h.
    pub fn numeric(f: ScalarFn, xi: ScalarFn, nu: ScalarFn, h: f64) -> Result<AnmTriple> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParam(format!("step h must be positive, got {h}")));
        }
        Ok(AnmTriple {
            f,
            f1: None,
            f2: None,
            f3: None,
            xi,
            xi2: None,
            xi3: None,
            nu,
            nu1: None,
            nu2: None,
            nu3: None,
            mode: DerivativeMode::CentralDifference { h },
        })
    }

    /// Polynomial f (coefficients ascending by power) with named cause and
    /// noise log-density families; all derivatives are exact.
    pub fn from_families(f_coeffs: &[f64], xi: &Family, nu: &Family) -> Result<AnmTriple> {
        xi.validate("xi")?;
        nu.validate("nu")?;
        let d1 = poly_deriv(f_coeffs);
        let d2 = poly_deriv(&d1);
        let d3 = poly_deriv(&d2);
        Ok(AnmTriple::analytic(
            poly_fn(f_coeffs.to_vec()),
            poly_fn(d1),
            poly_fn(d2),
            poly_fn(d3),
            xi.log_density(),
            xi.deriv(2),
            xi.deriv(3),
            nu.log_density(),
            nu.deriv(1),
            nu.deriv(2),
            nu.deriv(3),
        ))
    }

    /// f(x) = a x + b with Gaussian cause and noise, both centered.
    pub fn linear_gaussian(a: f64, b: f64, var_x: f64, var_n: f64) -> Result<AnmTriple> {
        AnmTriple::from_families(
            &[b, a],
            &Family::Gaussian { mean: 0.0, variance: var_x },
            &Family::Gaussian { mean: 0.0, variance: var_n },
        )
    }

    /// f(x) = a x + b with log-mix-lin-exp cause (parameters c) and noise
    /// (parameters gamma), the family where exact reversibility can occur.
    pub fn log_mix_lin_exp_pair(a: f64, b: f64, c: [f64; 4], gamma: [f64; 4]) -> Result<AnmTriple> {
        if a == 0.0 {
            return Err(Error::InvalidParam("a must be nonzero, x and y would be independent".into()));
        }
        AnmTriple::from_families(
            &[b, a],
            &Family::LogMixLinExp { c },
            &Family::LogMixLinExp { c: gamma },
        )
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn f_at(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    // Analytic accessors unwrap: the analytic constructor fills every slot
    // and the numeric constructor never reads them.
    fn f1_at(&self, x: f64) -> f64 {
        match self.mode {
            DerivativeMode::Analytic => (self.f1.as_ref().unwrap())(x),
            DerivativeMode::CentralDifference { h } => fd1(&self.f, x, h),
        }
    }

    fn f2_at(&self, x: f64) -> f64 {
        match self.mode {
            DerivativeMode::Analytic => (self.f2.as_ref().unwrap())(x),
            DerivativeMode::CentralDifference { h } => fd2(&self.f, x, h),
        }
    }

    fn f3_at(&self, x: f64) -> f64 {
        match self.mode {
            DerivativeMode::Analytic => (self.f3.as_ref().unwrap())(x),
            DerivativeMode::CentralDifference { h } => fd3(&self.f, x, h),
        }
    }

    fn xi2_at(&self, x: f64) -> f64 {
        match self.mode {
            DerivativeMode::Analytic => (self.xi2.as_ref().unwrap())(x),
            DerivativeMode::CentralDifference { h } => fd2(&self.xi, x, h),
        }
    }

    fn xi3_at(&self, x: f64) -> f64 {
        match self.mode {
            DerivativeMode::Analytic => (self.xi3.as_ref().unwrap())(x),
            DerivativeMode::CentralDifference { h } => fd3(&self.xi, x, h),
        }
    }

    fn nu1_at(&self, n: f64) -> f64 {
        match self.mode {
            DerivativeMode::Analytic => (self.nu1.as_ref().unwrap())(n),
            DerivativeMode::CentralDifference { h } => fd1(&self.nu, n, h),
        }
    }

    fn nu2_at(&self, n: f64) -> f64 {
        match self.mode {
            DerivativeMode::Analytic => (self.nu2.as_ref().unwrap())(n),
            DerivativeMode::CentralDifference { h } => fd2(&self.nu, n, h),
        }
    }

    fn nu3_at(&self, n: f64) -> f64 {
        match self.mode {
            DerivativeMode::Analytic => (self.nu3.as_ref().unwrap())(n),
            DerivativeMode::CentralDifference { h } => fd3(&self.nu, n, h),
        }
    }

    // Supplied derivatives must agree with finite differences of the base
    // functions to 1e-4 relative at every grid point.
    fn check_analytic(&self, grid: &[(f64, f64)]) -> Result<()> {
        let agree = |a: f64, fd: f64| -> bool {
            if !a.is_finite() || !fd.is_finite() {
                return true;
            }
            (a - fd).abs() <= 1e-4 * a.abs().max(fd.abs()).max(1.0)
        };
        let fail = |name: &str, at: f64, a: f64, fd: f64| -> Result<()> {
            Err(Error::InvalidParam(format!(
                "analytic {name} at {at} is {a} but finite differences give {fd}"
            )))
        };
        for &(x, y) in grid {
            let n = y - (self.f)(x);
            let checks = [
                ("f'", x, self.f1_at(x), fd1(&self.f, x, CHECK_H)),
                ("f''", x, self.f2_at(x), fd2(&self.f, x, CHECK_H)),
                ("f'''", x, self.f3_at(x), fd3(&self.f, x, CHECK_H)),
                ("xi''", x, self.xi2_at(x), fd2(&self.xi, x, CHECK_H)),
                ("xi'''", x, self.xi3_at(x), fd3(&self.xi, x, CHECK_H)),
                ("nu'", n, self.nu1_at(n), fd1(&self.nu, n, CHECK_H)),
                ("nu''", n, self.nu2_at(n), fd2(&self.nu, n, CHECK_H)),
                ("nu'''", n, self.nu3_at(n), fd3(&self.nu, n, CHECK_H)),
            ];
            for (name, at, a, fd) in checks {
                if !agree(a, fd) {
                    return fail(name, at, a, fd);
                }
            }
        }
        Ok(())
    }
}

fn point_residual(t: &AnmTriple, x: f64, y: f64) -> Option<f64> {
    let f1 = t.f1_at(x);
    if f1.abs() <= ADMISSIBILITY_GUARD {
        return None;
    }
    let n = y - t.f_at(x);
    let nu2 = t.nu2_at(n);
    if (nu2 * f1).abs() <= ADMISSIBILITY_GUARD {
        return None;
    }
    let f2 = t.f2_at(x);
    let f3 = t.f3_at(x);
    let xi2 = t.xi2_at(x);
    let xi3 = t.xi3_at(x);
    let nu1 = t.nu1_at(n);
    let nu3 = t.nu3_at(n);
    let rhs = xi2 * (-nu3 * f1 / nu2 + f2 / f1) - 2.0 * nu2 * f2 * f1 + nu1 * f3
        + nu1 * nu3 * f2 * f1 / nu2
        - nu1 * f2 * f2 / f1;
    let r = xi3 - rhs;
    r.is_finite().then_some(r)
}

/// Evaluates the reversibility constraint residual
///
///   r(x, y) = xi'''(x) - [ xi''(-nu''' f'/nu'' + f''/f') - 2 nu'' f'' f'
///             + nu' f''' + nu' nu''' f'' f'/nu'' - nu' (f'')^2/f' ]
///
/// with nu-terms taken at y - f(x) and everything else at x. Points failing
/// the admissibility guard are returned with residual None. In analytic mode
/// the supplied derivatives are first cross-checked against finite
/// differences on the grid.
pub fn ode_residual(t: &AnmTriple, grid: &[(f64, f64)]) -> Result<Vec<ResidualPoint>> {
    if t.mode == DerivativeMode::Analytic {
        t.check_analytic(grid)?;
    }
    Ok(grid
        .iter()
        .map(|&(x, y)| ResidualPoint { x, y, residual: point_residual(t, x, y) })
        .collect())
}

/// Largest |residual| over the admissible points, with the admissible count.
pub fn max_abs_residual(points: &[ResidualPoint]) -> (f64, usize) {
    let mut best = 0.0f64;
    let mut admissible = 0;
    for p in points {
        if let Some(r) = p.residual {
            admissible += 1;
            best = best.max(r.abs());
        }
    }
    (best, admissible)
}

/// Outcome of the reversibility check for the linear-f log-mix-lin-exp
/// family, with the induced parameters of the reversed model.
#[derive(Clone, Copy, Debug)]
pub struct BackwardCheck {
    /// c2 = -a gamma2 within 1e-12; the exponential rates cancel.
    pub rate_matched: bool,
    /// c3 != a gamma3; equality degenerates the reversed model.
    pub slope_distinct: bool,
    /// Both conditions hold: an exact reverse-direction additive model exists.
    pub backward_exists: bool,
    /// Log-density parameters of the reversed model's noise, same
    /// exponential-plus-linear family. Free additive constants are set to 0.
    pub backward_noise: [f64; 4],
    /// Log-density parameters (d1..d6) of the implied effect marginal,
    /// d1 x + d2 log(d3 + d4 exp(d5 x)) + d6.
    pub effect_marginal: [f64; 6],
}

/// Decides whether y = a x + b + n with log-mix-lin-exp cause (c) and noise
/// (gamma) admits an exact backward additive model, and reports the
/// parameters the reversed model would have.
pub fn check_backward_model(a: f64, b: f64, c: [f64; 4], gamma: [f64; 4]) -> Result<BackwardCheck> {
    if a == 0.0 {
        return Err(Error::InvalidParam("a must be nonzero, x and y would be independent".into()));
    }
    let mut fails = Family::LogMixLinExp { c }.violations("c");
    fails.extend(Family::LogMixLinExp { c: gamma }.violations("gamma"));
    if !fails.is_empty() {
        return Err(Error::FamilyConstraint(fails.join("; ")));
    }

    let rate_matched = (c[1] + a * gamma[1]).abs() <= 1e-12;
    let slope_distinct = c[2] != a * gamma[2];
    // The reversed noise picks up an arbitrary integration constant; it and
    // the level of the effect marginal are normalization-only, fixed to 0.
    let backward_noise = [-1.0, c[1], c[2] - gamma[2] * a, 0.0];
    let effect_marginal = [
        gamma[2],
        -(c[2] - a * gamma[2]) / c[1],
        -c[0],
        -gamma[0] * (-gamma[1] * b).exp(),
        gamma[1],
        c[3] - gamma[2] * b + gamma[3],
    ];
    Ok(BackwardCheck {
        rate_matched,
        slope_distinct,
        backward_exists: rate_matched && slope_distinct,
        backward_noise,
        effect_marginal,
    })
}

// Cutoff, in log-density units below the peak, for the sampling window.
const LOG_DROP: f64 = 60.0;

// Unnormalized log-density tabulated on an adaptive grid; quantiles come
// from linear interpolation of trapezoid masses.
struct NumericDensity {
    xs: Vec<f64>,
    cum: Vec<f64>,
    total: f64,
}

impl NumericDensity {
    fn build(logd: &ScalarFn) -> Result<NumericDensity> {
        let coarse = 4001;
        let mut best_x = 0.0f64;
        let mut best_v = f64::NEG_INFINITY;
        for i in 0..coarse {
            let x = -100.0 + 200.0 * i as f64 / (coarse - 1) as f64;
            let v = logd(x);
            if v.is_nan() {
                return Err(Error::InvalidParam(format!("log-density is NaN at {x}")));
            }
            if v > best_v {
                best_v = v;
                best_x = x;
            }
        }
        if !best_v.is_finite() {
            return Err(Error::InvalidParam(
                "log-density has no finite maximum on the scan window [-100, 100]".into(),
            ));
        }
        let mut lo = best_x - 0.5;
        let mut hi = best_x + 0.5;
        while logd(lo) > best_v - LOG_DROP && best_x - lo < 1e4 {
            lo = best_x - 2.0 * (best_x - lo);
        }
        while logd(hi) > best_v - LOG_DROP && hi - best_x < 1e4 {
            hi = best_x + 2.0 * (hi - best_x);
        }
        let m = 20001;
        let dx = (hi - lo) / (m - 1) as f64;
        let mut xs = Vec::with_capacity(m);
        let mut w = Vec::with_capacity(m);
        for i in 0..m {
            let x = lo + dx * i as f64;
            let v = (logd(x) - best_v).exp();
            xs.push(x);
            w.push(if v.is_finite() { v } else { 0.0 });
        }
        let mut cum = Vec::with_capacity(m);
        cum.push(0.0);
        for i in 1..m {
            let inc = 0.5 * (w[i - 1] + w[i]) * dx;
            cum.push(cum[i - 1] + inc);
        }
        let total = *cum.last().unwrap();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidParam("log-density mass vanishes on the sampling window".into()));
        }
        Ok(NumericDensity { xs, cum, total })
    }

    fn quantile(&self, q: f64) -> f64 {
        let t = q.clamp(0.0, 1.0) * self.total;
        let i = self.cum.partition_point(|&c| c < t);
        if i == 0 {
            return self.xs[0];
        }
        if i >= self.xs.len() {
            return *self.xs.last().unwrap();
        }
        let (c0, c1) = (self.cum[i - 1], self.cum[i]);
        let frac = if c1 > c0 { (t - c0) / (c1 - c0) } else { 0.0 };
        self.xs[i - 1] + frac * (self.xs[i] - self.xs[i - 1])
    }
}

/// steps x steps grid covering the central 95% of the cause marginal on the
/// x axis and of the implied effect marginal on the y axis.
pub fn central_grid(t: &AnmTriple, steps: usize) -> Result<Vec<(f64, f64)>> {
    if steps < 2 {
        return Err(Error::InvalidParam(format!("grid needs at least 2 steps per axis, got {steps}")));
    }
    let dx = NumericDensity::build(&t.xi)?;
    let dn = NumericDensity::build(&t.nu)?;
    let (x_lo, x_hi) = (dx.quantile(0.025), dx.quantile(0.975));
    // Effect quantiles from the pushforward of marginal quantile atoms.
    let k = 201;
    let mut ys = Vec::with_capacity(k * k);
    for i in 0..k {
        let fx = t.f_at(dx.quantile((i as f64 + 0.5) / k as f64));
        for j in 0..k {
            ys.push(fx + dn.quantile((j as f64 + 0.5) / k as f64));
        }
    }
    ys.sort_by(f64::total_cmp);
    let y_lo = ys[(0.025 * (ys.len() - 1) as f64).round() as usize];
    let y_hi = ys[(0.975 * (ys.len() - 1) as f64).round() as usize];
    let lin = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (steps - 1) as f64;
    let mut grid = Vec::with_capacity(steps * steps);
    for i in 0..steps {
        for j in 0..steps {
            grid.push((lin(x_lo, x_hi, i), lin(y_lo, y_hi, j)));
        }
    }
    Ok(grid)
}

/// The default 21 x 21 central grid.
pub fn default_grid(t: &AnmTriple) -> Result<Vec<(f64, f64)>> {
    central_grid(t, 21)
}

/// Draws n (x, y) pairs from the triple by inverse-CDF sampling of the two
/// marginals on a fine grid.
pub fn sample_xy(t: &AnmTriple, n: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let dx = NumericDensity::build(&t.xi)?;
    let dn = NumericDensity::build(&t.nu)?;
    let mut rng = rng_from_seed(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x = dx.quantile(rng.gen::<f64>());
        let noise = dn.quantile(rng.gen::<f64>());
        xs.push(x);
        ys.push(t.f_at(x) + noise);
    }
    Ok((xs, ys))
}
