//! Reusable time scales, test functions and random generators shared by the
//! property checks, the test suites and the command-line tool.

use num_complex::Complex64;
use rand::Rng;

use crate::calculus::GridFunction;
use crate::timescale::{tol_at, Segment, Tail, TimeScale};

/// `[0, 1]` followed by the integers `2, 3, ...`.
pub fn mixed_unit() -> TimeScale {
    TimeScale::new(vec![Segment::Dense { start: 0.0, end: 1.0 }], Tail::Uniform { step: 1.0 })
        .expect("valid fixture")
}

/// `{0, 0.5} u [1, 2] u {2.25, 3} u [4, 5]` then step `0.5`.
pub fn mixed_patchwork() -> TimeScale {
    TimeScale::new(
        vec![
            Segment::Point(0.0),
            Segment::Point(0.5),
            Segment::Dense { start: 1.0, end: 2.0 },
            Segment::Point(2.25),
            Segment::Point(3.0),
            Segment::Dense { start: 4.0, end: 5.0 },
        ],
        Tail::Uniform { step: 0.5 },
    )
    .expect("valid fixture")
}

/// Isolated points `0, 0.25, 1, 1.5` then the half-line `[2, inf)`.
pub fn points_then_reals() -> TimeScale {
    TimeScale::new(
        vec![
            Segment::Point(0.0),
            Segment::Point(0.25),
            Segment::Point(1.0),
            Segment::Point(1.5),
            Segment::Dense { start: 2.0, end: 3.0 },
        ],
        Tail::Continuous,
    )
    .expect("valid fixture")
}

/// `{2^k : k >= 0}`.
pub fn powers_of_two() -> TimeScale {
    TimeScale::geometric(1.0, 2.0).expect("valid fixture")
}

/// Named time scales covering every tail kind, with a starting point `s`.
pub fn fixture_scales() -> Vec<(&'static str, TimeScale, f64)> {
    vec![
        ("integers", TimeScale::integers(0.0), 0.0),
        ("half-integers", TimeScale::uniform(0.0, 0.5).expect("valid fixture"), 0.0),
        ("reals", TimeScale::reals(0.0), 0.0),
        ("mixed-unit", mixed_unit(), 0.0),
        ("patchwork", mixed_patchwork(), 0.0),
        ("points-then-reals", points_then_reals(), 0.0),
        ("powers-of-two", powers_of_two(), 1.0),
    ]
}

/// Scales whose tail is not geometric; used where transforms with a
/// positive growth bound must converge.
pub fn transform_scales() -> Vec<(&'static str, TimeScale, f64)> {
    fixture_scales().into_iter().filter(|(name, _, _)| *name != "powers-of-two").collect()
}

/// One summand of a [`Fixture`].
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Const(Complex64),
    /// `sum_i c_i t^i`.
    Poly(Vec<Complex64>),
    /// `amp exp(rate t)`.
    Exp { amp: Complex64, rate: Complex64 },
    /// `amp cos(freq t)`.
    Cos { amp: f64, freq: f64 },
    /// `weight` on `[a, b)`.
    Chi { a: f64, b: f64, weight: Complex64 },
    /// `weight` at the single point `at`; invisible to integrals when `at`
    /// is right-dense.
    Point { at: f64, weight: Complex64 },
}

impl Term {
    fn eval(&self, t: f64, with_points: bool) -> Complex64 {
        match self {
            Term::Const(c) => *c,
            Term::Poly(coeffs) => {
                coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
            }
            Term::Exp { amp, rate } => amp * (rate * t).exp(),
            Term::Cos { amp, freq } => Complex64::new(amp * (freq * t).cos(), 0.0),
            Term::Chi { a, b, weight } => {
                if *a <= t && t < *b {
                    *weight
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Term::Point { at, weight } => {
                if with_points && (t - at).abs() <= tol_at(*at) {
                    *weight
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }
}

/// A sum of simple terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fixture {
    pub terms: Vec<Term>,
}

impl Fixture {
    pub fn new(terms: Vec<Term>) -> Self {
        Fixture { terms }
    }

    /// `sup |f|` bound from the terms, or `None` for unbounded terms.
    pub fn sup_bound(&self) -> Option<f64> {
        self.terms.iter().try_fold(0.0, |acc, term| {
            let b = match term {
                Term::Const(c) => c.norm(),
                Term::Poly(coeffs) => {
                    if coeffs.iter().skip(1).any(|c| c.norm() != 0.0) {
                        return None;
                    }
                    coeffs.first().map_or(0.0, |c| c.norm())
                }
                Term::Exp { amp, rate } => {
                    if rate.re > 0.0 {
                        return None;
                    }
                    // bounded by |amp| only for t >= 0
                    amp.norm()
                }
                Term::Cos { amp, .. } => amp.abs(),
                Term::Chi { weight, .. } | Term::Point { weight, .. } => weight.norm(),
            };
            Some(acc + b)
        })
    }
}

impl GridFunction for Fixture {
    fn value(&self, t: f64, _mu: f64) -> Complex64 {
        self.terms.iter().map(|term| term.eval(t, true)).sum()
    }

    fn dense_value(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|term| term.eval(t, false)).sum()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.terms
            .iter()
            .flat_map(|term| match term {
                Term::Chi { a, b, .. } => vec![*a, *b],
                _ => Vec::new(),
            })
            .collect()
    }
}

/// Indicator of the single point `a`.
pub fn indicator(a: f64) -> Fixture {
    Fixture::new(vec![Term::Point { at: a, weight: Complex64::new(1.0, 0.0) }])
}

/// Indicator of `[a, b)`.
pub fn chi(a: f64, b: f64) -> Fixture {
    Fixture::new(vec![Term::Chi { a, b, weight: Complex64::new(1.0, 0.0) }])
}

pub fn constant(c: f64) -> Fixture {
    Fixture::new(vec![Term::Const(Complex64::new(c, 0.0))])
}

/// Points of `ts` in `[a, b]` that are right-scattered, in increasing order.
pub fn scattered_points(ts: &TimeScale, a: f64, b: f64) -> Vec<f64> {
    ts.enumerate(a, b)
        .map(|pieces| {
            pieces
                .into_iter()
                .filter_map(|p| match p {
                    crate::timescale::Piece::Scattered { t, .. } => Some(t.value()),
                    crate::timescale::Piece::Dense { .. } => None,
                })
                .collect()
        })
        .unwrap_or_default()
}

/// A random point of `[a, b]_T`: a scattered point or a point inside a dense
/// piece, chosen piece-uniformly.
pub fn random_point<R: Rng>(rng: &mut R, ts: &TimeScale, a: f64, b: f64) -> f64 {
    let pieces = ts.enumerate(a, b).unwrap_or_default();
    if pieces.is_empty() {
        return a;
    }
    match pieces[rng.gen_range(0..pieces.len())] {
        crate::timescale::Piece::Scattered { t, .. } => t.value(),
        crate::timescale::Piece::Dense { start, end } => rng.gen_range(start..end),
    }
}

/// A random time scale starting at 0 with an unbounded tail.
pub fn random_scale<R: Rng>(rng: &mut R) -> TimeScale {
    loop {
        let mut segments = Vec::new();
        let mut x = 0.0f64;
        let pieces = rng.gen_range(1..=5);
        for _ in 0..pieces {
            if rng.gen_bool(0.4) {
                let len = quantize(rng.gen_range(0.25..1.5));
                segments.push(Segment::Dense { start: x, end: x + len });
                x += len;
            } else {
                segments.push(Segment::Point(x));
            }
            x += quantize(rng.gen_range(0.125..1.0));
        }
        let tail = match rng.gen_range(0..3) {
            0 => Tail::Continuous,
            1 => Tail::Uniform { step: [0.25, 0.5, 1.0, 2.0][rng.gen_range(0..4)] },
            _ => Tail::Uniform { step: 1.0 },
        };
        if let Ok(ts) = TimeScale::new(segments, tail) {
            return ts;
        }
    }
}

/// Rounds to a multiple of 1/8 so that generated endpoints are exact.
fn quantize(x: f64) -> f64 {
    ((x * 8.0).round() / 8.0).max(0.125)
}

/// A random bounded function: indicators of ranges and scattered points in
/// `[s, t_max]_T` plus decaying oscillations. Declared growth 0 is valid for
/// it.
pub fn random_bounded<R: Rng>(rng: &mut R, ts: &TimeScale, s: f64, t_max: f64) -> Fixture {
    let mut terms = Vec::new();
    let count = rng.gen_range(1..=3);
    for _ in 0..count {
        let weight = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
        match rng.gen_range(0..3) {
            0 => {
                let a = random_point(rng, ts, s, t_max);
                let b = random_point(rng, ts, a, t_max).max(a);
                let b = if b > a { b } else { ts.sigma(a).map(|p| p.value()).unwrap_or(t_max) };
                terms.push(Term::Chi { a, b, weight });
            }
            1 => {
                let scattered = scattered_points(ts, s, t_max);
                if let Some(&at) = scattered.get(rng.gen_range(0..scattered.len().max(1))) {
                    terms.push(Term::Point { at, weight });
                } else {
                    terms.push(Term::Chi { a: s, b: t_max, weight });
                }
            }
            _ => {
                let rate = Complex64::new(-rng.gen_range(0.1..2.0), rng.gen_range(-3.0..3.0));
                terms.push(Term::Exp { amp: weight, rate });
            }
        }
    }
    Fixture::new(terms)
}
