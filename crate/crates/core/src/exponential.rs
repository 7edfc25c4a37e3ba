//! The time-scale exponential, generalized monomials and the `Lambda`
//! function.
//!
//! Exponentials are accumulated in log space: each scattered point contributes
//! `Log(1 + mu z)`, each dense stretch contributes the integral of the
//! exponent. Real negative factors flip a separate sign bit instead of adding
//! `pi` to the phase, so real exponentials stay exactly real.

use num_complex::Complex64;

use crate::calculus::{integrate_dense, sorted_breakpoints, GridFunction, QuadratureConfig};
use crate::error::{Error, Result};
use crate::hilger::{log_one_plus, REGRESSIVE_EPS};
use crate::timescale::{lattice_point, Run, TimeScale};

/// `ln(f64::MAX)`; larger logarithms overflow.
const LN_MAX: f64 = 709.782_712_893_384;

/// A nonzero complex number stored as `(-1)^negative * exp(log_mod + i phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpValue {
    pub log_mod: f64,
    pub phase: f64,
    pub negative: bool,
}

impl ExpValue {
    pub const ONE: ExpValue = ExpValue { log_mod: 0.0, phase: 0.0, negative: false };

    /// Multiplies by `(1 + h z)^count`.
    fn push_factor(&mut self, h: f64, z: Complex64, count: u64) {
        let log = log_one_plus(h, z);
        let n = count as f64;
        self.log_mod += n * log.re;
        if z.im == 0.0 && 1.0 + h * z.re < 0.0 {
            self.negative ^= count % 2 == 1;
        } else {
            self.phase += n * log.im;
        }
    }

    /// Multiplies by `exp(w)`.
    fn push_exp(&mut self, w: Complex64) {
        self.log_mod += w.re;
        self.phase += w.im;
    }

    pub fn value(&self) -> Complex64 {
        let m = self.log_mod.exp();
        let v = if self.phase == 0.0 {
            Complex64::new(m, 0.0)
        } else {
            Complex64::from_polar(m, self.phase)
        };
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn ln_abs(&self) -> f64 {
        self.log_mod
    }

    pub fn recip(&self) -> ExpValue {
        ExpValue { log_mod: -self.log_mod, phase: -self.phase, negative: self.negative }
    }

    pub fn powi(&self, n: i64) -> ExpValue {
        let k = n as f64;
        ExpValue {
            log_mod: k * self.log_mod,
            phase: k * self.phase,
            negative: self.negative && n % 2 != 0,
        }
    }

    /// Real power of a value on the positive branch (`negative` must be
    /// false).
    pub fn powf(&self, lam: f64) -> Result<ExpValue> {
        if self.negative {
            return Err(Error::InvalidArgument("real power of a negative exponential".into()));
        }
        Ok(ExpValue { log_mod: lam * self.log_mod, phase: lam * self.phase, negative: false })
    }

    pub fn mul(&self, other: &ExpValue) -> ExpValue {
        ExpValue {
            log_mod: self.log_mod + other.log_mod,
            phase: self.phase + other.phase,
            negative: self.negative ^ other.negative,
        }
    }
}

/// Exponent of `e_f`: a constant or a function of time.
#[derive(Clone, Copy)]
pub enum ExponentArg<'a> {
    Constant(Complex64),
    Varying(&'a dyn GridFunction),
}

fn not_regressive(z: Complex64, eta: f64) -> Error {
    Error::NotRegressive { z, eta: Some(eta) }
}

/// `e_z(t, s)` in log form for canonical `s <= t`.
fn forward_const(ts: &TimeScale, z: Complex64, s: f64, t: f64) -> Result<ExpValue> {
    let mut acc = ExpValue::ONE;
    for run in ts.runs(s, t) {
        match run {
            Run::Dense { start, end } => acc.push_exp(z * (end - start)),
            Run::Lattice { origin, step, k0, k1 } => {
                if Complex64::new(1.0 + step * z.re, step * z.im).norm() < REGRESSIVE_EPS {
                    return Err(not_regressive(z, lattice_point(origin, step, k0)));
                }
                acc.push_factor(step, z, k1 - k0);
            }
        }
    }
    Ok(acc)
}

/// `e_z(t, s)` in log form, without argument validation beyond membership.
pub(crate) fn log_exp_const(ts: &TimeScale, z: Complex64, t: f64, s: f64) -> Result<ExpValue> {
    let t = ts.point(t)?.value();
    let s = ts.point(s)?.value();
    if t >= s {
        forward_const(ts, z, s, t)
    } else {
        Ok(forward_const(ts, z, t, s)?.recip())
    }
}

/// `e_z(t, s)` for a constant exponent.
pub fn exp_const(ts: &TimeScale, z: Complex64, t: f64, s: f64) -> Result<Complex64> {
    Ok(log_exp_const(ts, z, t, s)?.value())
}

fn forward_varying<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<ExpValue> {
    let bps = sorted_breakpoints(f);
    let mut acc = ExpValue::ONE;
    for run in ts.runs(s, t) {
        match run {
            Run::Dense { start, end } => acc.push_exp(integrate_dense(f, start, end, &bps, cfg)?),
            Run::Lattice { origin, step, k0, k1 } => {
                for k in k0..k1 {
                    let eta = lattice_point(origin, step, k);
                    let z = f.value(eta, step);
                    if Complex64::new(1.0 + step * z.re, step * z.im).norm() < REGRESSIVE_EPS {
                        return Err(not_regressive(z, eta));
                    }
                    acc.push_factor(step, z, 1);
                }
            }
        }
    }
    Ok(acc)
}

/// `e_f(t, s)` in log form.
pub fn log_exp_ts(
    ts: &TimeScale,
    arg: &ExponentArg<'_>,
    t: f64,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<ExpValue> {
    cfg.validate()?;
    match *arg {
        ExponentArg::Constant(z) => log_exp_const(ts, z, t, s),
        ExponentArg::Varying(f) => {
            let t = ts.point(t)?.value();
            let s = ts.point(s)?.value();
            if t >= s {
                forward_varying(ts, f, s, t, cfg)
            } else {
                Ok(forward_varying(ts, f, t, s, cfg)?.recip())
            }
        }
    }
}

/// The time-scale exponential `e_f(t, s)`.
pub fn exp_ts(
    ts: &TimeScale,
    arg: &ExponentArg<'_>,
    t: f64,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    Ok(log_exp_ts(ts, arg, t, s, cfg)?.value())
}

/// `e_{(-)z}(t, s) = 1 / e_z(t, s)`.
pub fn exp_ominus(
    ts: &TimeScale,
    z: Complex64,
    t: f64,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    cfg.validate()?;
    Ok(log_exp_const(ts, z, t, s)?.recip().value())
}

/// Carries `(h_0, ..., h_n)` across one run, from its start to its end or,
/// when `backward`, from its end to its start.
fn advance(h: &mut [f64], run: &Run, backward: bool) {
    let n = h.len();
    let mut coeff = vec![0.0; n];
    match *run {
        Run::Dense { start, end } => {
            let len = if backward { start - end } else { end - start };
            coeff[0] = 1.0;
            for j in 1..n {
                coeff[j] = coeff[j - 1] * len / j as f64;
            }
        }
        Run::Lattice { step, k0, k1, .. } => {
            // (1 + step D)^m with m negative when walking backward
            let m = if backward { -((k1 - k0) as f64) } else { (k1 - k0) as f64 };
            coeff[0] = 1.0;
            for j in 1..n {
                coeff[j] = coeff[j - 1] * (m - (j - 1) as f64) / j as f64 * step;
            }
        }
    }
    let old = h.to_vec();
    for k in 0..n {
        h[k] = (0..=k).map(|j| coeff[j] * old[k - j]).sum();
    }
}

/// Generalized monomials `h_0(., s), ..., h_n(., s)`.
///
/// Values are propagated exactly across runs: a dense stretch of length `L`
/// acts as the Taylor shift `h_k -> sum_j h_{k-j} L^j / j!` and `m` scattered
/// steps of size `mu` act as `h_k -> sum_j C(m, j) mu^j h_{k-j}`. Node vectors
/// at every run boundary of the window are computed once.
#[derive(Debug, Clone)]
pub struct MonomialTable {
    ts: TimeScale,
    s: f64,
    n_max: usize,
    /// Nodes at and above `s`, increasing.
    forward: Vec<(f64, Vec<f64>)>,
    /// Nodes at and below `s`, decreasing.
    backward: Vec<(f64, Vec<f64>)>,
}

impl MonomialTable {
    pub fn new(ts: &TimeScale, s: f64, n_max: usize) -> Result<Self> {
        let s = ts.point(s)?.value();
        let mut start = vec![0.0; n_max + 1];
        start[0] = 1.0;
        let mut forward = vec![(s, start.clone())];
        let end = ts.window_end();
        if s < end {
            let mut h = start.clone();
            for run in ts.runs(s, end) {
                advance(&mut h, &run, false);
                forward.push((run.end(), h.clone()));
            }
        }
        let mut backward = vec![(s, start.clone())];
        let begin = ts.window_start();
        if begin < s {
            let mut h = start;
            for run in ts.runs(begin, s).iter().rev() {
                advance(&mut h, run, true);
                backward.push((run.start(), h.clone()));
            }
        }
        Ok(MonomialTable { ts: ts.clone(), s, n_max, forward, backward })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `(h_0(t, s), ..., h_{n_max}(t, s))`.
    pub fn values(&self, t: f64) -> Result<Vec<f64>> {
        let t = self.ts.point(t)?.value();
        if t >= self.s {
            let i = self.forward.partition_point(|(p, _)| *p <= t) - 1;
            let (p, ref h) = self.forward[i];
            let mut h = h.clone();
            for run in self.ts.runs(p, t) {
                advance(&mut h, &run, false);
            }
            Ok(h)
        } else {
            let i = self.backward.partition_point(|(p, _)| *p >= t) - 1;
            let (p, ref h) = self.backward[i];
            let mut h = h.clone();
            for run in self.ts.runs(t, p).iter().rev() {
                advance(&mut h, run, true);
            }
            Ok(h)
        }
    }

    pub fn value(&self, n: usize, t: f64) -> Result<f64> {
        if n > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "monomial order {n} exceeds table order {}",
                self.n_max
            )));
        }
        Ok(self.values(t)?[n])
    }
}

/// Generalized monomial `h_n(t, s)`.
pub fn monomial(ts: &TimeScale, n: usize, t: f64, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if n == 0 {
        ts.point(t)?;
        ts.point(s)?;
        return Ok(1.0);
    }
    MonomialTable::new(ts, s, n)?.value(n, t)
}

fn require_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {x}")))
    }
}

/// `ln(x e_{(-)x}(t, s))` for `x > 0`.
fn ln_scaled_ominus(ts: &TimeScale, x: f64, t: f64, s: f64) -> Result<f64> {
    Ok(x.ln() - log_exp_const(ts, Complex64::new(x, 0.0), t, s)?.ln_abs())
}

/// `Lambda(x; t, s) = exp(-x e_{(-)x}(t, s))`.
pub fn lambda_fn(ts: &TimeScale, x: f64, t: f64, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    require_positive("x", x)?;
    // exp of a huge argument saturates to +inf, giving exactly 0
    Ok((-ln_scaled_ominus(ts, x, t, s)?.exp()).exp())
}

/// Partial sum `sum_{l=0}^{terms} (-y)^l / l!` with `y = varsigma e_{(-)varsigma}(t, s)`,
/// and the last included term.
pub fn lambda_series(
    ts: &TimeScale,
    varsigma: f64,
    t: f64,
    s: f64,
    terms: usize,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    require_positive("varsigma", varsigma)?;
    let y = ln_scaled_ominus(ts, varsigma, t, s)?.exp();
    if !y.is_finite() {
        return Err(Error::NoConvergence {
            reason: format!("series argument overflows at varsigma = {varsigma}"),
        });
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for l in 1..=terms {
        term *= -y / l as f64;
        sum += term;
    }
    Ok((sum, term))
}

/// `x^lam e_{(-)x}(t, s)`, or `+inf` when the product exceeds the range of
/// `f64`.
pub fn scaled_exp_decay(ts: &TimeScale, lam: f64, t: f64, s: f64, x: f64) -> Result<f64> {
    require_positive("x", x)?;
    require_positive("lambda", lam)?;
    let ln = lam * x.ln() - log_exp_const(ts, Complex64::new(x, 0.0), t, s)?.ln_abs();
    if ln > LN_MAX {
        return Ok(f64::INFINITY);
    }
    Ok(ln.exp())
}

/// `e_x(t, s) - x^n h_n(t, s)` for `t >= s`; never negative in exact
/// arithmetic.
pub fn taylor_lower_bound_check(
    ts: &TimeScale,
    x: f64,
    t: f64,
    s: f64,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    require_positive("x", x)?;
    let t = ts.point(t)?.value();
    let s = ts.point(s)?.value();
    if t < s {
        return Err(Error::EmptyRange { a: s, b: t });
    }
    let e = log_exp_const(ts, Complex64::new(x, 0.0), t, s)?.value().re;
    let h = monomial(ts, n, t, s, cfg)?;
    Ok(e - x.powi(n as i32) * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::{Segment, Tail};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn exponential_examples() {
        let z = TimeScale::integers(0.0);
        let r = TimeScale::reals(0.0);
        let e = exp_ts(&z, &ExponentArg::Constant(c(1.0)), 3.0, 0.0, &cfg()).unwrap();
        assert!(close(e.re, 8.0, 1e-14) && e.im == 0.0);
        let e = exp_ts(&r, &ExponentArg::Constant(c(2.0)), 1.0, 0.0, &cfg()).unwrap();
        assert!(close(e.re, 2f64.exp(), 1e-14));
        assert_eq!(exp_const(&z, Complex64::new(0.3, 2.0), 4.0, 4.0).unwrap(), c(1.0));
        let varying = |t: f64| c(t);
        let e = exp_ts(&r, &ExponentArg::Varying(&varying), 2.0, 0.0, &cfg()).unwrap();
        assert!(close(e.re, 2f64.exp(), 1e-12));
        let e = exp_ts(&z, &ExponentArg::Varying(&varying), 3.0, 0.0, &cfg()).unwrap();
        assert!(close(e.re, 6.0, 1e-14));
    }

    #[test]
    fn ominus_examples() {
        let z = TimeScale::integers(0.0);
        let e = exp_ominus(&z, c(1.0), 3.0, 0.0, &cfg()).unwrap();
        assert!(close(e.re, 0.125, 1e-14));
        assert_eq!(exp_ominus(&z, c(1.0), 2.0, 2.0, &cfg()).unwrap(), c(1.0));
        assert_eq!(exp_ominus(&z, c(-2.0), 2.0, 0.0, &cfg()).unwrap(), c(1.0));
        assert_eq!(exp_const(&z, c(-2.0), 3.0, 0.0).unwrap(), c(-1.0));
        assert!(matches!(
            exp_const(&z, c(-1.0), 3.0, 0.0),
            Err(Error::NotRegressive { eta: Some(_), .. })
        ));
    }

    #[test]
    fn monomial_examples() {
        let z = TimeScale::integers(0.0);
        let r = TimeScale::reals(0.0);
        assert_eq!(monomial(&z, 0, 5.0, 1.0, &cfg()).unwrap(), 1.0);
        assert_eq!(monomial(&z, 2, 4.0, 0.0, &cfg()).unwrap(), 6.0);
        assert!(close(monomial(&r, 3, 2.0, 0.0, &cfg()).unwrap(), 8.0 / 6.0, 1e-14));
        // h_2(-1, 0) on the integers starting at -3 is C(-1, 2) = 1
        let zz = TimeScale::integers(-3.0);
        assert_eq!(monomial(&zz, 2, -1.0, 0.0, &cfg()).unwrap(), 1.0);
        assert_eq!(monomial(&zz, 3, -3.0, 0.0, &cfg()).unwrap(), -10.0);
    }

    #[test]
    fn monomial_on_mixed_scale() {
        // [0, 1] then the integers: h_2(3, 0) = 1/2 + (1 + 2)
        let ts = TimeScale::new(
            vec![Segment::Dense { start: 0.0, end: 1.0 }],
            Tail::Uniform { step: 1.0 },
        )
        .unwrap();
        assert!(close(monomial(&ts, 2, 3.0, 0.0, &cfg()).unwrap(), 3.5, 1e-14));
        // backward from 2 to 0.5: h_1 = -(1.5)
        assert!(close(monomial(&ts, 1, 0.5, 2.0, &cfg()).unwrap(), -1.5, 1e-14));
        let table = MonomialTable::new(&ts, 2.0, 2).unwrap();
        // h_2(0.5, 2) = -(int_{0.5}^1 (tau - 2) dtau + 1 * (1 - 2))
        let exact = 1.625;
        assert!(close(table.value(2, 0.5).unwrap(), exact, 1e-14));
    }

    #[test]
    fn lambda_examples() {
        let z = TimeScale::integers(0.0);
        assert!(close(lambda_fn(&z, 1.0, 2.0, 2.0, &cfg()).unwrap(), (-1f64).exp(), 1e-14));
        assert!(close(lambda_fn(&z, 9.0, 1.0, 0.0, &cfg()).unwrap(), (-0.9f64).exp(), 1e-14));
        let v = lambda_fn(&z, 1e3, 2.0, 0.0, &cfg()).unwrap();
        assert!(close(v, (-1e3 / 1001f64.powi(2)).exp(), 1e-14));
        assert_eq!(lambda_fn(&z, 1e6, 0.0, 3.0, &cfg()).unwrap(), 0.0);
        assert!(lambda_fn(&z, -1.0, 0.0, 3.0, &cfg()).is_err());
    }

    #[test]
    fn series_examples() {
        let z = TimeScale::integers(0.0);
        assert_eq!(lambda_series(&z, 3.0, 4.0, 1.0, 0, &cfg()).unwrap().0, 1.0);
        let (sum, _) = lambda_series(&z, 1.0, 1.0, 0.0, 40, &cfg()).unwrap();
        assert!((sum - (-0.5f64).exp()).abs() < 1e-12);
        let (sum, last) = lambda_series(&z, 2.0, 0.0, 0.0, 60, &cfg()).unwrap();
        assert!((sum - (-2f64).exp()).abs() < 1e-12);
        assert!(last.abs() < 1e-60);
    }

    #[test]
    fn scaled_decay_examples() {
        let z = TimeScale::integers(0.0);
        let v = scaled_exp_decay(&z, 2.0, 3.0, 0.0, 1e3).unwrap();
        assert!(close(v, 1e6 / 1001f64.powi(3), 1e-13));
        let mut prev = f64::INFINITY;
        for k in 6..=20 {
            let v = scaled_exp_decay(&z, 2.0, 3.0, 0.0, 2f64.powi(k)).unwrap();
            assert!(v < prev);
            prev = v;
        }
        for k in 6..=20 {
            let x = 2f64.powi(k);
            assert!(scaled_exp_decay(&z, 2.0, 0.0, 3.0, x).unwrap() >= x * x);
        }
        // e_x(300, 0) on the integers overflows
        let zz = TimeScale::integers(0.0);
        assert_eq!(scaled_exp_decay(&zz, 1.0, 0.0, 300.0, 1e3).unwrap(), f64::INFINITY);
    }

    #[test]
    fn taylor_examples() {
        let z = TimeScale::integers(0.0);
        assert!(close(taylor_lower_bound_check(&z, 1.0, 3.0, 0.0, 2, &cfg()).unwrap(), 5.0, 1e-14));
        assert_eq!(taylor_lower_bound_check(&z, 2.0, 3.0, 3.0, 4, &cfg()).unwrap(), 1.0);
        assert!(taylor_lower_bound_check(&z, 2.0, 3.0, 0.0, 0, &cfg()).unwrap() >= 0.0);
    }
}
