//! The Laplace transform `int_s^inf f(eta) e_{(-)z}(sigma(eta), s) Delta eta`.
//!
//! Convergence is guaranteed by the sufficient condition
//! `Re_{mu_*}(z) > lambda`, where `lambda` is a growth bound declared by the
//! caller: `|f(t)| <= C e_lambda(t, s)`. The library never infers decay.

use num_complex::Complex64;

use crate::calculus::{
    improper_from, truncated_integral, GridFunction, QuadratureConfig, TailBound,
    TransformResult,
};
use crate::error::{Error, Result};
use crate::exponential::{log_exp_const, ExpValue};
use crate::hilger::{in_region, is_pos_regressive, is_regressive, log_one_plus, RegionSpec};
use crate::timescale::TimeScale;

/// Doubling steps of a forced evaluation outside the convergence region.
pub const FORCED_DOUBLINGS: usize = 20;

/// Geometric-tail graininess values sampled when bounding the decay rate.
const GEOMETRIC_SAMPLES: i32 = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions {
    /// Declared growth bound `lambda` of `f`; must be positively regressive.
    pub growth: f64,
    /// Evaluate outside the convergence region; the result is then truncated
    /// after a fixed number of doublings and never marked converged.
    pub force: bool,
    /// Keep integrating at least up to this point even when the tail bound is
    /// already met.
    pub min_truncation: Option<f64>,
    /// Declared constant `C` in `|f(t)| <= C e_growth(t, s)`. Without it the
    /// constant is estimated from samples of the integrated range, which
    /// cannot see mass that only appears beyond the first truncation points.
    pub bound: Option<f64>,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions { growth: 0.0, force: false, min_truncation: None, bound: None }
    }
}

impl TransformOptions {
    pub fn with_growth(growth: f64) -> Self {
        TransformOptions { growth, ..Self::default() }
    }
}

/// Exponential bound `|f(t) prod e_{(-)z_i}(sigma(t), s)^{m_i}| <= C e_{(-)rate}(sigma(t), s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEnvelope {
    /// `None` when the constant is estimated from samples.
    pub constant: Option<f64>,
    pub rate: f64,
}

impl DecayEnvelope {
    /// Largest rate valid at every graininess of `[s, inf)_T` for the
    /// integrand `f prod e_{(-)z_i}^{m_i}` with `|f| <= C e_growth`. Per
    /// scattered step the rate `x` must satisfy
    /// `1 + mu x <= prod |1 + mu z_i|^{m_i} / (1 + mu growth)`.
    pub fn for_exponents(
        ts: &TimeScale,
        s: f64,
        exponents: &[(Complex64, u32)],
        growth: f64,
    ) -> Result<DecayEnvelope> {
        let grains = ts.grain_set(s)?;
        let rate_at = |mu: f64| -> f64 {
            if mu == 0.0 {
                return exponents.iter().map(|(z, m)| *m as f64 * z.re).sum::<f64>() - growth;
            }
            let q: f64 = exponents.iter().map(|(z, m)| *m as f64 * log_one_plus(mu, *z).re).sum::<f64>()
                - (mu * growth).ln_1p();
            q.exp_m1() / mu
        };
        let mut rate = f64::INFINITY;
        if grains.dense {
            rate = rate.min(rate_at(0.0));
        }
        for &mu in &grains.finite {
            rate = rate.min(rate_at(mu));
        }
        if let Some((first, ratio)) = grains.geometric {
            let total: u32 = exponents.iter().map(|(_, m)| *m).sum();
            if total == 0 || (total == 1 && growth > 0.0) {
                // the admissible rate tends to zero as the graininess grows
                rate = 0.0;
            }
            for j in 0..GEOMETRIC_SAMPLES {
                let mu = first * ratio.powi(j);
                if !mu.is_finite() {
                    break;
                }
                rate = rate.min(rate_at(mu));
            }
        }
        Ok(DecayEnvelope { constant: None, rate })
    }

    pub fn tail_bound(&self) -> TailBound {
        TailBound { rate: self.rate, constant: self.constant }
    }
}

/// `f(eta) prod e_{(-)z_i}(sigma(eta), s)^{m_i}`, or its modulus.
pub(crate) struct TransformIntegrand<'a, F: ?Sized> {
    pub(crate) ts: &'a TimeScale,
    pub(crate) f: &'a F,
    pub(crate) s: f64,
    pub(crate) exponents: Vec<(Complex64, u32)>,
    pub(crate) modulus: bool,
}

impl<F: GridFunction + ?Sized> TransformIntegrand<'_, F> {
    fn kernel(&self, sigma: f64) -> Complex64 {
        let mut acc = ExpValue::ONE;
        for &(z, m) in &self.exponents {
            match log_exp_const(self.ts, z, sigma, self.s) {
                Ok(e) => acc = acc.mul(&e.recip().powi(m as i64)),
                Err(_) => return Complex64::new(f64::NAN, f64::NAN),
            }
        }
        acc.value()
    }

    fn combine(&self, v: Complex64, sigma: f64) -> Complex64 {
        if v == Complex64::new(0.0, 0.0) {
            return v;
        }
        let k = self.kernel(sigma);
        if self.modulus {
            Complex64::new(v.norm() * k.norm(), 0.0)
        } else {
            v * k
        }
    }
}

impl<F: GridFunction + ?Sized> GridFunction for TransformIntegrand<'_, F> {
    fn value(&self, t: f64, mu: f64) -> Complex64 {
        self.combine(self.f.value(t, mu), t + mu)
    }

    fn dense_value(&self, t: f64) -> Complex64 {
        self.combine(self.f.dense_value(t), t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.f.breakpoints()
    }
}

/// `C_{mu_*(s)}(lambda)`: the region `Re_{mu_*}(z) > lambda`.
pub fn convergence_region(ts: &TimeScale, s: f64, growth: f64) -> Result<RegionSpec> {
    Ok(RegionSpec { h: ts.min_graininess(s)?, lambda: growth })
}

fn check_growth(ts: &TimeScale, s: f64, growth: f64) -> Result<()> {
    if !growth.is_finite() || !is_pos_regressive(ts, s, Complex64::new(growth, 0.0))? {
        return Err(Error::InvalidArgument(format!(
            "growth bound {growth} is not positively regressive"
        )));
    }
    Ok(())
}

/// Shared driver: `in_region` decides between the enveloped improper
/// integral and a forced truncated evaluation. With `modulus` the integral of
/// `|f prod e_{(-)z_i}^{m_i}|` is computed instead.
#[allow(clippy::too_many_arguments)]
pub(crate) fn transform<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    exponents: Vec<(Complex64, u32)>,
    in_region: bool,
    region: RegionSpec,
    opts: &TransformOptions,
    cfg: &QuadratureConfig,
    modulus: bool,
) -> Result<TransformResult> {
    let exponents: Vec<(Complex64, u32)> =
        exponents.into_iter().filter(|(z, m)| *m > 0 && *z != Complex64::new(0.0, 0.0)).collect();
    let integrand = TransformIntegrand { ts, f, s, exponents, modulus };
    if !in_region {
        if !opts.force {
            let z = integrand.exponents.first().map(|e| e.0).unwrap_or_default();
            return Err(Error::OutsideRegion { z, h: region.h, lambda: region.lambda });
        }
        return truncated_integral(ts, &integrand, s, cfg, FORCED_DOUBLINGS);
    }
    let mut envelope = DecayEnvelope::for_exponents(ts, s, &integrand.exponents, opts.growth)?;
    if let Some(c) = opts.bound {
        // e_growth(t, s) <= e_growth(sigma(t), s) / (1 + mu growth) when growth < 0
        let sup_mu = ts.mu_range(s)?.1;
        let shift = if opts.growth < 0.0 { 1.0 / (1.0 + sup_mu * opts.growth) } else { 1.0 };
        envelope.constant = Some(c * shift);
    }
    let min_r = opts.min_truncation.unwrap_or(s);
    improper_from(ts, &integrand, s, cfg, &envelope.tail_bound(), min_r)
}

/// `L{f}(z) = int_s^inf f(eta) e_{(-)z}(sigma(eta), s) Delta eta`.
pub fn laplace<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    z: Complex64,
    opts: &TransformOptions,
    cfg: &QuadratureConfig,
) -> Result<TransformResult> {
    cfg.validate()?;
    ts.require_unbounded()?;
    let s = ts.point(s)?.value();
    check_growth(ts, s, opts.growth)?;
    if !is_regressive(ts, s, z)? {
        return Err(Error::NotRegressive { z, eta: None });
    }
    let region = convergence_region(ts, s, opts.growth)?;
    let inside = in_region(region, z)?;
    transform(ts, f, s, vec![(z, 1)], inside, region, opts, cfg, false)
}

/// Transform of `f e_{(-)c}(sigma(.), s)` at `z`. The convergence check uses
/// the combined decay of both exponentials.
pub fn modulated_laplace<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    z: Complex64,
    c: Complex64,
    opts: &TransformOptions,
    cfg: &QuadratureConfig,
) -> Result<TransformResult> {
    if c == Complex64::new(0.0, 0.0) {
        return laplace(ts, f, s, z, opts, cfg);
    }
    cfg.validate()?;
    ts.require_unbounded()?;
    let s = ts.point(s)?.value();
    check_growth(ts, s, opts.growth)?;
    for w in [z, c] {
        if !is_regressive(ts, s, w)? {
            return Err(Error::NotRegressive { z: w, eta: None });
        }
    }
    let region = convergence_region(ts, s, opts.growth)?;
    let exponents = vec![(z, 1), (c, 1)];
    let rate = DecayEnvelope::for_exponents(ts, s, &exponents, opts.growth)?.rate;
    transform(ts, f, s, exponents, rate > 0.0, region, opts, cfg, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilger::cplus;
    use crate::timescale::{Segment, Tail};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn one(_t: f64) -> Complex64 {
        c(1.0)
    }

    #[test]
    fn transform_examples() {
        let opts = TransformOptions::default();
        let r = TimeScale::reals(0.0);
        let v = laplace(&r, &one, 0.0, c(1.0), &opts, &cfg()).unwrap();
        assert!(v.converged && (v.value - c(1.0)).norm() < 1e-8, "{v:?}");
        let z = TimeScale::integers(0.0);
        let v = laplace(&z, &one, 0.0, c(1.0), &opts, &cfg()).unwrap();
        assert!(v.converged && (v.value - c(1.0)).norm() < 1e-10, "{v:?}");
        assert!(v.tail_estimate <= cfg().abs_tol);
        let zero = |_t: f64| c(0.0);
        let v = laplace(&z, &zero, 0.0, Complex64::new(0.5, 1.0), &opts, &cfg()).unwrap();
        assert!(v.converged && v.value == c(0.0));
    }

    #[test]
    fn exponential_family_on_reals() {
        // L{e^{-2t}}(z) = 1 / (z + 2)
        let r = TimeScale::reals(0.0);
        let f = |t: f64| c((-2.0 * t).exp());
        let z = Complex64::new(0.5, 3.0);
        let v = laplace(&r, &f, 0.0, z, &TransformOptions::with_growth(-2.0), &cfg()).unwrap();
        assert!((v.value - 1.0 / (z + 2.0)).norm() < 1e-8, "{v:?}");
    }

    #[test]
    fn region_is_enforced() {
        let z = TimeScale::integers(0.0);
        let opts = TransformOptions::default();
        let outside = c(-0.5);
        assert!(matches!(
            laplace(&z, &one, 0.0, outside, &opts, &cfg()),
            Err(Error::OutsideRegion { .. })
        ));
        let forced = TransformOptions { force: true, ..opts };
        let v = laplace(&z, &one, 0.0, outside, &forced, &cfg()).unwrap();
        assert!(!v.converged);
        assert!(matches!(
            laplace(&z, &one, 0.0, c(-1.0), &opts, &cfg()),
            Err(Error::NotRegressive { .. })
        ));
    }

    #[test]
    fn region_examples() {
        let r = TimeScale::reals(0.0);
        assert_eq!(convergence_region(&r, 0.0, 0.0).unwrap(), RegionSpec { h: 0.0, lambda: 0.0 });
        let z = TimeScale::integers(0.0);
        let region = convergence_region(&z, 0.0, 0.0).unwrap();
        assert_eq!(region.h, 1.0);
        assert!(region.contains(Complex64::new(-1.0, 1.5)).unwrap());
        assert!(!region.contains(Complex64::new(-0.5, 0.5)).unwrap());
        let mixed = TimeScale::new(
            vec![Segment::Dense { start: 0.0, end: 1.0 }],
            Tail::Uniform { step: 1.0 },
        )
        .unwrap();
        assert_eq!(convergence_region(&mixed, 0.0, 0.0).unwrap().h, 0.0);
    }

    #[test]
    fn modulation_examples() {
        let z = TimeScale::integers(0.0);
        let opts = TransformOptions::default();
        let plain = laplace(&z, &one, 0.0, c(1.0), &opts, &cfg()).unwrap();
        let same = modulated_laplace(&z, &one, 0.0, c(1.0), c(0.0), &opts, &cfg()).unwrap();
        assert_eq!(plain, same);
        let v = modulated_laplace(&z, &one, 0.0, c(1.0), c(1.0), &opts, &cfg()).unwrap();
        assert_eq!(cplus(1.0, c(1.0), c(1.0)), c(3.0));
        assert!((v.value - c(1.0 / 3.0)).norm() < 1e-9, "{v:?}");
    }

    #[test]
    fn geometric_tail_rate() {
        let q = TimeScale::geometric(1.0, 2.0).unwrap();
        let env = DecayEnvelope::for_exponents(&q, 1.0, &[(c(1.0), 1)], 0.0).unwrap();
        assert!(env.rate > 0.0);
        let env = DecayEnvelope::for_exponents(&q, 1.0, &[(c(1.0), 1)], 0.5).unwrap();
        assert_eq!(env.rate, 0.0);
        let v = laplace(&q, &one, 1.0, c(1.0), &TransformOptions::default(), &cfg()).unwrap();
        // sum over 2^k of mu / prod (1 + mu) with mu = 2^k
        let mut exact = 0.0;
        let mut prod = 1.0;
        for k in 0..60 {
            let mu = 2f64.powi(k);
            prod *= 1.0 + mu;
            exact += mu / prod;
        }
        assert!((v.value.re - exact).abs() < 1e-10, "{v:?} vs {exact}");
    }
}
