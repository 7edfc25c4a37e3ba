//! Null functions and numerical checks of Lerch-type uniqueness.
//!
//! A function is null on `[s, inf)_T` when every partial integral
//! `int_s^t f` vanishes. Uniqueness says that a function whose modulated
//! transforms `L{f e_{(-)(n (.) varsigma_k)}(sigma(.), s)}(alpha)` all vanish
//! on a lattice of `(n, k)` is null. Numerically "vanishes" means `<= tol`
//! and "does not vanish" means `> 10 tol`; anything between is inconclusive.
//! A transform cell vanishes when it is at most `tol` times the integral of
//! the modulus of its integrand, so that small mass far out, where the kernel
//! is tiny, is not mistaken for a vanishing transform.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::calculus::{
    cumulative, delta_integral, Difference, GridFunction, Product, QuadratureConfig, Shifted,
    TransformResult,
};
use crate::error::{Error, Result};
use crate::exponential::lambda_fn;
use crate::hilger::{cdot, cplus, in_region, is_pos_regressive, RegionSpec};
use crate::laplace::{convergence_region, transform, DecayEnvelope, TransformOptions};
use crate::timescale::TimeScale;

pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NullVerdict {
    Null,
    NotNull,
    Inconclusive,
}

impl NullVerdict {
    pub fn classify(value: f64, tol: f64) -> NullVerdict {
        if value <= tol {
            NullVerdict::Null
        } else if value > 10.0 * tol {
            NullVerdict::NotNull
        } else {
            NullVerdict::Inconclusive
        }
    }
}

impl fmt::Display for NullVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NullVerdict::Null => "null",
            NullVerdict::NotNull => "not_null",
            NullVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullReport {
    pub verdict: NullVerdict,
    /// `max |int_s^node f|` over the checked nodes.
    pub max_cumulative: f64,
    pub worst_node: f64,
    pub nodes_checked: usize,
    pub tol: f64,
}

/// Lattice of modulated transforms: `alpha`, the increasing sequence
/// `varsigma_0 < varsigma_1 < ...` and the powers `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub alpha: Complex64,
    pub varsigma: Vec<f64>,
    pub n_max: u32,
}

impl LatticeSpec {
    pub fn k_max(&self) -> usize {
        self.varsigma.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.varsigma.is_empty() {
            return Err(Error::InvalidArgument("the varsigma sequence is empty".into()));
        }
        if self.varsigma.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("varsigma values must be finite and >= 0".into()));
        }
        if self.varsigma.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("varsigma must be strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LerchVerdict {
    /// Largest `|cell|` over the successfully evaluated cells.
    pub hypothesis_max: f64,
    /// Largest `|cell| / int |integrand|`, with `0 / 0 = 0`.
    pub relative_max: f64,
    /// Every cell evaluated, converged and `relative_max <= tol`.
    pub hypothesis_holds: bool,
    pub null_report: NullReport,
    /// Cell `(n, k)` with the largest magnitude; first in row-major order on
    /// ties.
    pub witness: Option<(u32, usize)>,
    /// The hypothesis held while the function is provably not null.
    pub falsification: bool,
    /// `cells[n][k]`.
    pub cells: Vec<Vec<Result<TransformResult>>>,
}

/// Classifies `f` by its partial integrals over `[s, t_max]_T`.
pub fn null_check<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    t_max: f64,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<NullReport> {
    let s = ts.point(s)?.value();
    let t_max = ts.point(t_max)?.value();
    if t_max <= s {
        return Err(Error::EmptyRange { a: s, b: t_max });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let table = cumulative(ts, f, s, t_max, cfg)?;
    let (max_cumulative, worst_node) = table.max_abs();
    Ok(NullReport {
        verdict: NullVerdict::classify(max_cumulative, tol),
        max_cumulative,
        worst_node,
        nodes_checked: table.nodes.len(),
        tol,
    })
}

/// [`null_check`] of `f_null g^sigma`.
pub fn modulated_null_check<F, G>(
    ts: &TimeScale,
    f_null: &F,
    g: &G,
    s: f64,
    t_max: f64,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<NullReport>
where
    F: GridFunction + ?Sized,
    G: GridFunction + ?Sized,
{
    let modulated = Product(f_null, &Shifted { ts, g });
    null_check(ts, &modulated, s, t_max, tol, cfg)
}

/// Every cell `int_s^inf f (e_{(-)varsigma_k}(sigma, s))^n e_{(-)alpha}(sigma, s)`,
/// indexed `[n][k]`. Cell failures are recorded and do not stop the sweep.
pub fn lattice_sweep<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    spec: &LatticeSpec,
    opts: &TransformOptions,
    cfg: &QuadratureConfig,
) -> Result<Vec<Vec<Result<TransformResult>>>> {
    sweep(ts, f, s, spec, opts, cfg, false)
}

type Cells = Vec<Vec<Result<TransformResult>>>;

fn sweep<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    spec: &LatticeSpec,
    opts: &TransformOptions,
    cfg: &QuadratureConfig,
    modulus: bool,
) -> Result<Cells> {
    spec.validate()?;
    cfg.validate()?;
    ts.require_unbounded()?;
    let s = ts.point(s)?.value();
    if !is_pos_regressive(ts, s, spec.alpha)? {
        return Err(Error::InvalidArgument(format!(
            "alpha = {} is not positively regressive",
            spec.alpha
        )));
    }
    let region = convergence_region(ts, s, opts.growth)?;
    if !opts.force && !in_region(region, spec.alpha)? {
        return Err(Error::OutsideRegion { z: spec.alpha, h: region.h, lambda: region.lambda });
    }
    let columns = spec.varsigma.len();
    let cells: Vec<(u32, usize)> =
        (0..=spec.n_max).flat_map(|n| (0..columns).map(move |k| (n, k))).collect();
    let results: Vec<Result<TransformResult>> = cells
        .par_iter()
        .map(|&(n, k)| {
            let exponents = vec![(spec.alpha, 1), (Complex64::new(spec.varsigma[k], 0.0), n)];
            let rate = DecayEnvelope::for_exponents(ts, s, &exponents, opts.growth)?.rate;
            transform(ts, f, s, exponents, rate > 0.0, region, opts, cfg, modulus)
        })
        .collect();
    let mut rows: Vec<Vec<Result<TransformResult>>> = Vec::with_capacity(spec.n_max as usize + 1);
    let mut it = results.into_iter();
    for _ in 0..=spec.n_max {
        rows.push(it.by_ref().take(columns).collect());
    }
    Ok(rows)
}

/// Runs the lattice sweep and the null check on `[s, t_max]_T` and compares
/// them. Transforms always integrate at least up to `t_max`.
#[allow(clippy::too_many_arguments)]
pub fn lerch_verify<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    spec: &LatticeSpec,
    t_max: f64,
    tol: f64,
    opts: &TransformOptions,
    cfg: &QuadratureConfig,
) -> Result<LerchVerdict> {
    let null_report = null_check(ts, f, s, t_max, tol, cfg)?;
    let min_truncation = opts.min_truncation.unwrap_or(t_max).max(t_max);
    let opts = TransformOptions { min_truncation: Some(min_truncation), ..*opts };
    let cells = sweep(ts, f, s, spec, &opts, cfg, false)?;
    let scales = sweep(ts, f, s, spec, &opts, cfg, true)?;
    let mut hypothesis_max: f64 = 0.0;
    let mut relative_max: f64 = 0.0;
    let mut witness = None;
    let mut all_ok = true;
    for (n, (row, scale_row)) in cells.iter().zip(&scales).enumerate() {
        for (k, (cell, scale)) in row.iter().zip(scale_row).enumerate() {
            match (cell, scale) {
                (Ok(r), Ok(a)) => {
                    all_ok &= r.converged && a.converged;
                    let m = r.value.norm();
                    if witness.is_none() || m > hypothesis_max {
                        hypothesis_max = m;
                        witness = Some((n as u32, k));
                    }
                    let a = a.value.re;
                    let ratio = if m == 0.0 { 0.0 } else if a > 0.0 { m / a } else { f64::INFINITY };
                    relative_max = relative_max.max(ratio);
                }
                _ => all_ok = false,
            }
        }
    }
    let hypothesis_holds = all_ok && relative_max <= tol;
    let falsification = hypothesis_holds && null_report.verdict == NullVerdict::NotNull;
    Ok(LerchVerdict {
        hypothesis_max,
        relative_max,
        hypothesis_holds,
        null_report,
        witness,
        falsification,
        cells,
    })
}

/// [`lerch_verify`] applied to `f - g`: equal transforms on the lattice
/// should force `f = g` up to a null function.
#[allow(clippy::too_many_arguments)]
pub fn lerch_verify_pair<F, G>(
    ts: &TimeScale,
    f: &F,
    g: &G,
    s: f64,
    spec: &LatticeSpec,
    t_max: f64,
    tol: f64,
    opts: &TransformOptions,
    cfg: &QuadratureConfig,
) -> Result<LerchVerdict>
where
    F: GridFunction + ?Sized,
    G: GridFunction + ?Sized,
{
    lerch_verify(ts, &Difference(f, g), s, spec, t_max, tol, opts, cfg)
}

/// `g(eta) Lambda(varsigma; sigma(eta), t)`.
struct LambdaWeighted<'a, G: ?Sized> {
    ts: &'a TimeScale,
    g: &'a G,
    t: f64,
    varsigma: f64,
    cfg: QuadratureConfig,
}

impl<G: GridFunction + ?Sized> LambdaWeighted<'_, G> {
    fn weight(&self, sigma: f64) -> f64 {
        lambda_fn(self.ts, self.varsigma, sigma, self.t, &self.cfg).unwrap_or(f64::NAN)
    }
}

impl<G: GridFunction + ?Sized> GridFunction for LambdaWeighted<'_, G> {
    fn value(&self, eta: f64, mu: f64) -> Complex64 {
        self.g.value(eta, mu) * self.weight(eta + mu)
    }

    fn dense_value(&self, eta: f64) -> Complex64 {
        self.g.dense_value(eta) * self.weight(eta)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.g.breakpoints();
        b.push(self.t);
        b
    }
}

/// `int_s^{r_trunc} g(eta) Lambda(varsigma; sigma(eta), t) Delta eta`.
pub fn char_approx<G: GridFunction + ?Sized>(
    ts: &TimeScale,
    g: &G,
    s: f64,
    t: f64,
    varsigma: f64,
    r_trunc: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if !(varsigma > 0.0 && varsigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("varsigma must be positive, got {varsigma}")));
    }
    let t = ts.point(t)?.value();
    let integrand = LambdaWeighted { ts, g, t, varsigma, cfg: *cfg };
    delta_integral(ts, &integrand, s, r_trunc, cfg)
}

/// Residual of `chi(sigma(eta)) = chi(eta) + mu(eta) chi^Delta(eta)` for the
/// indicator of `[s, t)_T`.
pub fn chi_shift_check(ts: &TimeScale, s: f64, t: f64, eta: f64) -> Result<f64> {
    let s = ts.point(s)?.value();
    let t = ts.point(t)?.value();
    let (eta, sigma) = ts.resolve(eta).ok_or(Error::NotInTimeScale { t: eta })?;
    let chi = |x: f64| if s <= x && x < t { 1.0 } else { 0.0 };
    let mu = sigma - eta;
    if mu == 0.0 {
        if eta == t {
            return Err(Error::DenseBoundary { t });
        }
        // chi is locally constant around right-dense points other than t
        return Ok(chi(sigma) - chi(eta));
    }
    // mu * chi^Delta is the rise itself; dividing by mu and multiplying back
    // would only add rounding
    let rise = chi(sigma) - chi(eta);
    Ok(chi(sigma) - (chi(eta) + rise))
}

/// Lattice for the constant-graininess reduction: `varsigma_k = k (.) varsigma`
/// for `k = 1..=k_max`, after checking that every point
/// `beta (+) ((n k) (.) varsigma)` lies in the convergence region.
pub fn constant_graininess_reduce(
    ts: &TimeScale,
    s: f64,
    beta: f64,
    varsigma: f64,
    n_max: u32,
    k_max: u32,
    growth: f64,
) -> Result<LatticeSpec> {
    ts.require_unbounded()?;
    let s = ts.point(s)?.value();
    let (lo, hi) = ts.mu_range(s)?;
    if hi - lo > 1e-12 * hi.max(1.0) {
        return Err(Error::NonConstantGraininess);
    }
    if !(varsigma > 0.0 && varsigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("varsigma must be positive, got {varsigma}")));
    }
    let h = lo;
    let beta_c = Complex64::new(beta, 0.0);
    if !is_pos_regressive(ts, s, beta_c)? {
        return Err(Error::InvalidArgument(format!("beta = {beta} is not positively regressive")));
    }
    let region = RegionSpec { h, lambda: growth };
    let sig = Complex64::new(varsigma, 0.0);
    for n in 0..=n_max {
        for k in 0..=k_max {
            let scaled = cdot(h, Complex64::new((n * k) as f64, 0.0), sig)?;
            let point = cplus(h, beta_c, scaled);
            if !in_region(region, point)? {
                return Err(Error::OutsideRegion { z: point, h, lambda: growth });
            }
        }
    }
    let seq = (1..=k_max)
        .map(|k| Ok(cdot(h, Complex64::new(k as f64, 0.0), sig)?.re))
        .collect::<Result<Vec<f64>>>()?;
    Ok(LatticeSpec { alpha: beta_c, varsigma: seq, n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{indicator, mixed_unit};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn null_check_examples() {
        let z = TimeScale::integers(0.0);
        let zero = |_t: f64| c(0.0);
        let r = null_check(&z, &zero, 0.0, 5.0, DEFAULT_TOL, &cfg()).unwrap();
        assert_eq!(r.verdict, NullVerdict::Null);
        assert_eq!(r.max_cumulative, 0.0);
        let r = null_check(&z, &indicator(0.0), 0.0, 5.0, DEFAULT_TOL, &cfg()).unwrap();
        assert_eq!(r.verdict, NullVerdict::NotNull);
        assert_eq!(r.max_cumulative, 1.0);
        let mixed = mixed_unit();
        let r = null_check(&mixed, &indicator(0.5), 0.0, 4.0, DEFAULT_TOL, &cfg()).unwrap();
        assert_eq!(r.verdict, NullVerdict::Null);
        assert_eq!(r.max_cumulative, 0.0);
    }

    #[test]
    fn modulated_null_examples() {
        let mixed = mixed_unit();
        let square = |t: f64| c(t * t);
        let r = modulated_null_check(&mixed, &indicator(0.5), &square, 0.0, 4.0, DEFAULT_TOL, &cfg())
            .unwrap();
        assert_eq!(r.verdict, NullVerdict::Null);
        let e1 = |t: f64| crate::exponential::exp_const(&mixed_unit(), c(1.0), t, 0.0).unwrap();
        let r = modulated_null_check(&mixed, &indicator(0.5), &e1, 0.0, 4.0, DEFAULT_TOL, &cfg())
            .unwrap();
        assert_eq!(r.verdict, NullVerdict::Null);
    }

    #[test]
    fn sweep_examples() {
        let z = TimeScale::integers(0.0);
        let spec = LatticeSpec { alpha: c(1.0), varsigma: vec![1.0, 2.0, 3.0], n_max: 2 };
        let opts = TransformOptions::default();
        let cells = lattice_sweep(&z, &indicator(0.0), 0.0, &spec, &opts, &cfg()).unwrap();
        for (n, row) in cells.iter().enumerate() {
            for (k, cell) in row.iter().enumerate() {
                let v = cell.as_ref().unwrap().value;
                let expect = 0.5 / (1.0 + spec.varsigma[k]).powi(n as i32);
                assert!((v - c(expect)).norm() < 1e-12, "({n},{k}) {v}");
            }
        }
        let first = cells[0][0].as_ref().unwrap().value;
        assert!(cells[0].iter().all(|cell| cell.as_ref().unwrap().value == first));
    }

    #[test]
    fn verify_examples() {
        let z = TimeScale::integers(0.0);
        let spec = LatticeSpec {
            alpha: c(1.0),
            varsigma: (0..=8).map(|k| (k + 1) as f64).collect(),
            n_max: 8,
        };
        let opts = TransformOptions::default();
        let v = lerch_verify(&z, &indicator(0.0), 0.0, &spec, 5.0, DEFAULT_TOL, &opts, &cfg()).unwrap();
        assert!(!v.hypothesis_holds && !v.falsification);
        assert_eq!(v.witness, Some((0, 0)));
        assert!((v.hypothesis_max - 0.5).abs() < 1e-12);
        assert_eq!(v.null_report.verdict, NullVerdict::NotNull);

        let zero = |_t: f64| c(0.0);
        let v = lerch_verify(&z, &zero, 0.0, &spec, 5.0, DEFAULT_TOL, &opts, &cfg()).unwrap();
        assert!(v.hypothesis_holds && v.null_report.verdict == NullVerdict::Null);

        let mixed = mixed_unit();
        let v = lerch_verify(&mixed, &indicator(0.5), 0.0, &spec, 4.0, DEFAULT_TOL, &opts, &cfg())
            .unwrap();
        assert!(v.hypothesis_holds && v.null_report.verdict == NullVerdict::Null);

        let v = lerch_verify_pair(&z, &indicator(0.0), &indicator(0.0), 0.0, &spec, 5.0, DEFAULT_TOL, &opts, &cfg())
            .unwrap();
        assert!(v.hypothesis_holds);
    }

    #[test]
    fn small_mass_far_out_is_not_a_vanishing_transform() {
        // every cell is below 1e-7 in absolute terms, yet f is not null
        let r = TimeScale::reals(0.0);
        let f = crate::fixtures::Fixture::new(vec![crate::fixtures::Term::Chi {
            a: 5.0,
            b: 5.0005,
            weight: c(2.0),
        }]);
        let spec = LatticeSpec { alpha: c(2.0), varsigma: vec![1.0, 2.0], n_max: 1 };
        let opts = TransformOptions { bound: Some(2.0), ..TransformOptions::default() };
        let v = lerch_verify(&r, &f, 0.0, &spec, 6.0, DEFAULT_TOL, &opts, &cfg()).unwrap();
        assert!(v.hypothesis_max < DEFAULT_TOL);
        assert!((v.relative_max - 1.0).abs() < 1e-6);
        assert_eq!(v.null_report.verdict, NullVerdict::NotNull);
        assert!(!v.hypothesis_holds && !v.falsification);
    }

    #[test]
    fn chi_examples() {
        let z = TimeScale::integers(0.0);
        assert_eq!(chi_shift_check(&z, 0.0, 3.0, 2.0).unwrap(), 0.0);
        assert_eq!(chi_shift_check(&z, 0.0, 3.0, 1.0).unwrap(), 0.0);
        assert_eq!(chi_shift_check(&z, 0.0, 30.0, 29.0).unwrap(), 0.0);
        let r = TimeScale::reals(0.0);
        assert_eq!(chi_shift_check(&r, 0.0, 3.0, 3.0), Err(Error::DenseBoundary { t: 3.0 }));
        assert_eq!(chi_shift_check(&r, 0.0, 3.0, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn char_approx_examples() {
        let z = TimeScale::integers(0.0);
        let zero = |_t: f64| c(0.0);
        assert_eq!(char_approx(&z, &zero, 0.0, 3.0, 10.0, 8.0, &cfg()).unwrap(), c(0.0));
        // on the integers Lambda(x; eta + 1, 3) = exp(-x / (1 + x)^(eta - 2)) for
        // eta >= 3 and underflows to 0 below
        let one = |_t: f64| c(1.0);
        let x = 1e3f64;
        let v = char_approx(&z, &one, 0.0, 3.0, x, 8.0, &cfg()).unwrap();
        let exact: f64 = (1..=5).map(|k| (-x / (1.0 + x).powi(k)).exp()).sum();
        assert!((v.re - exact).abs() < 1e-12, "{v} vs {exact}");
        assert!((v.re - (4.0 + (-1.0f64).exp())).abs() < 2e-2);
    }

    #[test]
    fn reduction_examples() {
        let z = TimeScale::integers(0.0);
        let spec = constant_graininess_reduce(&z, 0.0, 1.0, 1.0, 2, 3, 0.0).unwrap();
        for (v, expect) in spec.varsigma.iter().zip([1.0, 3.0, 7.0]) {
            assert!((v - expect).abs() < 1e-14);
        }
        let r = TimeScale::reals(0.0);
        let spec = constant_graininess_reduce(&r, 0.0, 1.0, 0.5, 2, 3, 0.0).unwrap();
        assert_eq!(spec.varsigma, vec![0.5, 1.0, 1.5]);
        let spec = constant_graininess_reduce(&z, 0.0, 1.0, 1.0, 2, 0, 0.0).unwrap();
        assert!(spec.varsigma.is_empty());
        assert_eq!(
            constant_graininess_reduce(&mixed_unit(), 0.0, 1.0, 1.0, 2, 3, 0.0),
            Err(Error::NonConstantGraininess)
        );
    }
}
