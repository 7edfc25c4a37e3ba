//! Globally adaptive Gauss-Kronrod (7, 15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Hard cap on the number of live subintervals.
const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadResult {
    pub value: Complex64,
}

struct Interval {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    depth: u32,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let sum = f(center - x) + f(center + x);
        kronrod += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    (value, error)
}

/// Integrates `f` over `[a, b]`, bisecting the worst subinterval until the
/// summed error estimate is at most `abs_tol + rel_tol * |I|`.
pub(crate) fn integrate<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0) });
    }
    let (value, error) = gauss_kronrod(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, value, error, depth: 0 });
    let mut total = value;
    let mut total_err = error;
    loop {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::QuadratureFailure { a, b });
        }
        if total_err <= abs_tol + rel_tol * total.norm() {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= max_depth || heap.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailure { a: worst.a, b: worst.b });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureFailure { a: worst.a, b: worst.b });
        }
        let (v1, e1) = gauss_kronrod(f, worst.a, mid);
        let (v2, e2) = gauss_kronrod(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        let depth = worst.depth + 1;
        heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1, depth });
        heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2, depth });
    }
    // Re-sum in left-to-right order so the result does not depend on the
    // order in which subintervals were refined.
    let mut parts: Vec<Interval> = heap.into_vec();
    parts.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = parts.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value);
    Ok(QuadResult { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let f = |t: f64| Complex64::new(t.powi(5) - 3.0 * t * t, 2.0 * t);
        let r = integrate(&f, 0.0, 2.0, 1e-12, 1e-12, 40).unwrap();
        assert!((r.value - Complex64::new(64.0 / 6.0 - 8.0, 4.0)).norm() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        let f = |t: f64| Complex64::new(0.0, 10.0 * t).exp();
        let r = integrate(&f, 0.0, 3.0, 1e-11, 1e-11, 40).unwrap();
        let exact = (Complex64::new(0.0, 30.0).exp() - 1.0) / Complex64::new(0.0, 10.0);
        assert!((r.value - exact).norm() < 1e-10);
    }

    #[test]
    fn reports_failure_on_nonintegrable_singularity() {
        let f = |t: f64| Complex64::new(1.0 / t, 0.0);
        assert!(integrate(&f, 0.0, 1.0, 1e-10, 1e-10, 40).is_err());
    }
}
