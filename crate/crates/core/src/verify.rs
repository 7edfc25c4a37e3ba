//! Self-checks of the library's mathematical invariants.
//!
//! Each property runs on its own random stream derived from one seed, so a
//! report is reproducible and independent of the order properties run in.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::calculus::{
    cumulative, delta_integral, integration_by_parts_check, sigma_shift_residual, GridFunction,
    QuadratureConfig,
};
use crate::exponential::{exp_const, lambda_fn, lambda_series, log_exp_const, monomial};
use crate::fixtures::{
    self, chi, constant, fixture_scales, indicator, mixed_unit, random_bounded, random_point,
    random_scale, transform_scales, Fixture, Term,
};
use crate::hilger::{
    cdot, cminus, cneg, cplus, cylinder, hilger_re, in_region, is_regressive,
};
use crate::laplace::{convergence_region, laplace, modulated_laplace, TransformOptions};
use crate::lerch::{
    char_approx, lattice_sweep, lerch_verify, modulated_null_check, null_check, LatticeSpec,
    NullVerdict, DEFAULT_TOL,
};
use crate::timescale::{Piece, TimeScale};

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Randomized trials of the uniqueness soundness check.
    pub lerch_trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 20_240_601, lerch_trials: 300 }
    }
}

type Outcome = std::result::Result<String, String>;
type Check = fn(&mut ChaCha8Rng, &VerifyConfig) -> Outcome;

/// Every property, as `(module, name, check)`.
pub const PROPERTIES: &[(&str, &str, Check)] = &[
    ("timescale", "sigma and graininess agree", sigma_consistency),
    ("timescale", "enumerate partitions [a, b)", partition_lengths),
    ("timescale", "min_graininess is a lower bound", min_graininess_bound),
    ("hilger", "group laws", group_laws),
    ("hilger", "Re_h nondecreasing in h", re_monotone),
    ("hilger", "cylinder lands in its strip", cylinder_strip),
    ("hilger", "cdot agrees with repeated cplus", cdot_integer),
    ("hilger", "cylinder round trip", cylinder_round_trip),
    ("calculus", "linearity and additivity", integral_linearity),
    ("calculus", "integral of 1 is the length", integral_of_one),
    ("calculus", "cumulative ends at the integral", cumulative_last),
    ("calculus", "sigma shift residual vanishes", sigma_shift),
    ("calculus", "integration by parts", integration_by_parts),
    ("exponential", "semigroup", semigroup),
    ("exponential", "power identity", power_identity),
    ("exponential", "positivity and sign alternation", positivity),
    ("exponential", "Lambda tends to an indicator", lambda_limit),
    ("exponential", "monomial signs", monomial_signs),
    ("exponential", "e_lambda e_(-)z vanishes at infinity", growth_against_decay),
    ("laplace", "linearity", laplace_linearity),
    ("laplace", "modulation on constant graininess", modulation_identity),
    ("laplace", "null functions transform to 0", null_annihilation),
    ("laplace", "region is monotone along the real axis", region_monotone),
    ("lerch", "no falsification on random non-null functions", lerch_soundness),
    ("lerch", "null closure under modulation", null_closure),
    ("lerch", "char_approx converges", char_convergence),
    ("lerch", "n = 0 cells agree across k", lattice_zero_row),
    ("lerch", "Lambda series matches Lambda", lambda_series_identity),
];

/// Runs every property. Results come back in the order of [`PROPERTIES`].
pub fn run_all(cfg: &VerifyConfig) -> Vec<PropertyReport> {
    PROPERTIES
        .par_iter()
        .enumerate()
        .map(|(i, &(module, name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64 * 0x9e37_79b9));
            let outcome = check(&mut rng, cfg);
            let passed = outcome.is_ok();
            let detail = outcome.unwrap_or_else(|e| e);
            PropertyReport { module, name, passed, detail }
        })
        .collect()
}

/// Runs the properties whose name or module contains `filter`.
pub fn run_matching(cfg: &VerifyConfig, filter: &str) -> Vec<PropertyReport> {
    run_all(cfg)
        .into_iter()
        .filter(|r| r.module.contains(filter) || r.name.contains(filter))
        .collect()
}

fn qcfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rand_c<R: Rng>(rng: &mut R, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::error::Error) -> String {
    e.to_string()
}

/// Sorted pair of random points of `[s, s + span]_T`.
fn random_pair<R: Rng>(rng: &mut R, ts: &TimeScale, s: f64, span: f64) -> (f64, f64) {
    let hi = ts.snap_up(s + span).expect("unbounded fixture");
    let a = random_point(rng, ts, s, hi);
    let b = random_point(rng, ts, s, hi);
    (a.min(b), a.max(b))
}

/// Smooth random function: a cubic plus an exponential and a cosine.
fn random_smooth<R: Rng>(rng: &mut R) -> Fixture {
    Fixture::new(vec![
        Term::Poly((0..4).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect()),
        Term::Exp { amp: rand_c(rng, 1.0), rate: Complex64::new(rng.gen_range(-1.0..0.5), rng.gen_range(-2.0..2.0)) },
        Term::Cos { amp: rng.gen_range(-1.0..1.0), freq: rng.gen_range(0.0..3.0) },
    ])
}

fn random_poly<R: Rng>(rng: &mut R, degree: usize) -> Fixture {
    Fixture::new(vec![Term::Poly((0..=degree).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect())])
}

/// `a f + b g` over fixtures.
fn combine(a: Complex64, f: &Fixture, b: Complex64, g: &Fixture) -> Fixture {
    let scale = |w: Complex64, term: &Term| -> Vec<Term> {
        match term {
            Term::Const(c) => vec![Term::Const(w * c)],
            Term::Poly(coeffs) => vec![Term::Poly(coeffs.iter().map(|c| c * w).collect())],
            Term::Exp { amp, rate } => vec![Term::Exp { amp: w * amp, rate: *rate }],
            Term::Cos { amp, freq } => {
                vec![Term::Exp { amp: w * amp * 0.5, rate: Complex64::new(0.0, *freq) }, Term::Exp {
                    amp: w * amp * 0.5,
                    rate: Complex64::new(0.0, -freq),
                }]
            }
            Term::Chi { a, b, weight } => vec![Term::Chi { a: *a, b: *b, weight: w * weight }],
            Term::Point { at, weight } => vec![Term::Point { at: *at, weight: w * weight }],
        }
    };
    let mut terms = Vec::new();
    for t in &f.terms {
        terms.extend(scale(a, t));
    }
    for t in &g.terms {
        terms.extend(scale(b, t));
    }
    Fixture::new(terms)
}

fn sigma_consistency(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let mut checked = 0;
    for (name, ts, s) in fixture_scales() {
        let hi = ts.snap_up(s + 10.0).unwrap();
        for _ in 0..200 {
            let t = random_point(rng, &ts, s, hi);
            let sigma = ts.sigma(t).map_err(err)?.value();
            let mu = ts.graininess(t).map_err(err)?;
            ensure((sigma > t) == (mu > 0.0), || format!("{name}: t = {t}, sigma = {sigma}, mu = {mu}"))?;
            if mu == 0.0 {
                let again = ts.sigma(sigma).map_err(err)?.value();
                ensure(again == sigma, || format!("{name}: sigma not idempotent at {t}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} points"))
}

fn partition_lengths(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let mut checked = 0;
    for (name, ts, s) in fixture_scales() {
        for _ in 0..50 {
            let (a, b) = random_pair(rng, &ts, s, 12.0);
            let total: f64 = ts
                .enumerate(a, b)
                .map_err(err)?
                .iter()
                .map(|p| match *p {
                    Piece::Dense { start, end } => end - start,
                    Piece::Scattered { mu, .. } => mu,
                })
                .sum();
            ensure((total - (b - a)).abs() <= 1e-12 * b.abs().max(1.0), || {
                format!("{name}: [{a}, {b}) sums to {total}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} ranges"))
}

fn min_graininess_bound(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for (name, ts, s) in fixture_scales() {
        let m = ts.min_graininess(s).map_err(err)?;
        let hi = ts.snap_up(s + 50.0).unwrap();
        for _ in 0..1000 {
            let t = random_point(rng, &ts, s, hi);
            let mu = ts.graininess(t).map_err(err)?;
            ensure(mu >= m, || format!("{name}: mu({t}) = {mu} < {m}"))?;
        }
    }
    Ok("1000 points per scale".into())
}

const GRAININESS: [f64; 4] = [0.0, 0.1, 1.0, 3.0];

/// A random `z` with `|1 + h z|` bounded away from 0.
fn regressive_sample<R: Rng>(rng: &mut R, h: f64, r: f64) -> Complex64 {
    loop {
        let z = rand_c(rng, r);
        if (1.0 + h * z).norm() > 1e-3 {
            return z;
        }
    }
}

fn group_laws(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for h in GRAININESS {
        for _ in 0..1000 {
            let z = regressive_sample(rng, h, 3.0);
            let w = regressive_sample(rng, h, 3.0);
            let u = regressive_sample(rng, h, 3.0);
            let scale = 1.0 + (z.norm() + 1.0) * (w.norm() + 1.0) * (u.norm() + 1.0) * (1.0 + h * h);
            let left = cplus(h, cplus(h, z, w), u);
            let right = cplus(h, z, cplus(h, w, u));
            ensure((left - right).norm() <= 1e-12 * scale, || format!("associativity h={h} z={z} w={w} u={u}"))?;
            ensure(cplus(h, z, w) == cplus(h, w, z), || format!("commutativity h={h}"))?;
            let n = cneg(h, z).map_err(err)?;
            let zero = cplus(h, z, n);
            let s = z.norm() + n.norm() * (1.0 + h * z.norm());
            ensure(zero.norm() <= 1e-12 * (1.0 + s), || format!("inverse h={h} z={z}: {zero}"))?;
            let d1 = cminus(h, z, w).map_err(err)?;
            let d2 = cplus(h, z, cneg(h, w).map_err(err)?);
            ensure((d1 - d2).norm() <= 1e-12 * (1.0 + d1.norm() + s + z.norm() * w.norm()), || {
                format!("minus h={h} z={z} w={w}")
            })?;
        }
    }
    Ok("4000 cases".into())
}

fn re_monotone(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for _ in 0..1000 {
        let z = rand_c(rng, 3.0);
        let h1 = rng.gen_range(0.0..3.0);
        let h2 = rng.gen_range(0.0..h1);
        if (1.0 + h1 * z).norm() < 1e-3 || (1.0 + h2 * z).norm() < 1e-3 {
            continue;
        }
        let r1 = hilger_re(h1, z).map_err(err)?;
        let r2 = hilger_re(h2, z).map_err(err)?;
        ensure(r1 >= r2 - 1e-12 * (1.0 + z.norm_sqr()), || format!("Re_{h1}({z}) = {r1} < Re_{h2} = {r2}"))?;
    }
    Ok("1000 cases".into())
}

fn cylinder_strip(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for h in [0.1, 1.0, 3.0] {
        for i in 0..1000 {
            // every tenth sample sits on the branch cut
            let z = if i % 10 == 0 {
                Complex64::new(-1.0 / h - rng.gen_range(0.01..5.0), 0.0)
            } else {
                regressive_sample(rng, h, 5.0)
            };
            let im = cylinder(h, z).map_err(err)?.im;
            ensure(im > -PI / h && im <= PI / h, || format!("h={h} z={z}: Im = {im}"))?;
        }
    }
    Ok("3000 cases".into())
}

fn cdot_integer(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for h in GRAININESS {
        for _ in 0..250 {
            let z = regressive_sample(rng, h, 1.5);
            let m = rng.gen_range(1..=8u32);
            let mut folded = z;
            for _ in 1..m {
                folded = cplus(h, folded, z);
            }
            let direct = cdot(h, Complex64::new(m as f64, 0.0), z).map_err(err)?;
            ensure(close(direct, folded, 1e-10), || format!("h={h} m={m} z={z}: {direct} vs {folded}"))?;
        }
    }
    Ok("1000 cases".into())
}

fn cylinder_round_trip(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for h in GRAININESS {
        for _ in 0..250 {
            let z = regressive_sample(rng, h, 4.0);
            let back = (h * cylinder(h, z).map_err(err)?).exp();
            let expect = 1.0 + h * z;
            ensure((back - expect).norm() <= 1e-12 * (1.0 + expect.norm()), || format!("h={h} z={z}"))?;
        }
    }
    Ok("1000 cases".into())
}

fn integral_linearity(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let cfg = qcfg();
    for (name, ts, s) in fixture_scales() {
        for _ in 0..20 {
            let f = random_smooth(rng);
            let mut g = random_smooth(rng);
            let (a, b) = random_pair(rng, &ts, s, 8.0);
            g.terms.push(Term::Chi { a, b: (a + b) / 2.0, weight: rand_c(rng, 1.0) });
            let (alpha, beta) = (rand_c(rng, 2.0), rand_c(rng, 2.0));
            let combo = combine(alpha, &f, beta, &g);
            let lhs = delta_integral(&ts, &combo, a, b, &cfg).map_err(err)?;
            let rhs = alpha * delta_integral(&ts, &f, a, b, &cfg).map_err(err)?
                + beta * delta_integral(&ts, &g, a, b, &cfg).map_err(err)?;
            ensure(close(lhs, rhs, 1e-9), || format!("{name}: linearity on [{a}, {b}): {lhs} vs {rhs}"))?;
            let r = random_point(rng, &ts, a, b);
            let split = delta_integral(&ts, &f, a, r, &cfg).map_err(err)?
                + delta_integral(&ts, &f, r, b, &cfg).map_err(err)?;
            let whole = delta_integral(&ts, &f, a, b, &cfg).map_err(err)?;
            ensure(close(split, whole, 1e-9), || format!("{name}: additivity at {r}: {split} vs {whole}"))?;
        }
    }
    Ok("20 cases per scale".into())
}

fn integral_of_one(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let one = constant(1.0);
    for (name, ts, s) in fixture_scales() {
        for _ in 0..30 {
            let (a, b) = random_pair(rng, &ts, s, 20.0);
            let v = delta_integral(&ts, &one, a, b, &qcfg()).map_err(err)?;
            ensure((v.re - (b - a)).abs() <= 1e-12 * b.abs().max(1.0) && v.im == 0.0, || {
                format!("{name}: [{a}, {b}) gives {v}")
            })?;
        }
    }
    Ok("30 ranges per scale".into())
}

fn cumulative_last(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let cfg = qcfg();
    for (name, ts, s) in fixture_scales() {
        for _ in 0..10 {
            let f = random_smooth(rng);
            let (a, b) = random_pair(rng, &ts, s, 8.0);
            if a == b {
                continue;
            }
            let table = cumulative(&ts, &f, a, b, &cfg).map_err(err)?;
            let direct = delta_integral(&ts, &f, a, b, &cfg).map_err(err)?;
            ensure((table.last() - direct).norm() <= 1e-12 * direct.norm().max(1.0), || {
                format!("{name}: {} vs {direct}", table.last())
            })?;
        }
    }
    Ok("10 ranges per scale".into())
}

fn sigma_shift(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let scales = [mixed_unit(), fixtures::mixed_patchwork(), fixtures::points_then_reals()];
    let cfg = qcfg();
    for i in 0..1000 {
        let ts = &scales[i % scales.len()];
        let f = random_smooth(rng);
        let t = random_point(rng, ts, 0.0, 8.0);
        let r = sigma_shift_residual(ts, &f, t, &cfg).map_err(err)?;
        let sigma = ts.sigma(t).map_err(err)?.value();
        let bound = 1e-8 * (1.0 + f.value(sigma, ts.graininess(sigma).map_err(err)?).norm());
        ensure(r.norm() <= bound, || format!("t = {t}: residual {r}"))?;
    }
    Ok("1000 points".into())
}

fn integration_by_parts(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let scales = [mixed_unit(), fixtures::mixed_patchwork(), fixtures::points_then_reals()];
    let cfg = qcfg();
    for i in 0..30 {
        let ts = &scales[i % scales.len()];
        let f = random_poly(rng, 2);
        let g = random_poly(rng, 3);
        let (s, t) = random_pair(rng, ts, 0.0, 6.0);
        let r = integration_by_parts_check(ts, &f, &g, s, t, &cfg).map_err(err)?;
        ensure(r.norm() <= 1e-8, || format!("[{s}, {t}): residual {r}"))?;
    }
    Ok("30 cases".into())
}

fn semigroup(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for (name, ts, s) in fixture_scales() {
        for _ in 0..40 {
            let z = regressive_sample(rng, 2.0, 1.5);
            let hi = ts.snap_up(s + 8.0).unwrap();
            let pts: Vec<f64> = (0..3).map(|_| random_point(rng, &ts, s, hi)).collect();
            let e = |t: f64, r: f64| exp_const(&ts, z, t, r);
            let (t, r, u) = (pts[0], pts[1], pts[2]);
            let (tr, ru, tu) = match (e(t, r), e(r, u), e(t, u)) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                _ => continue,
            };
            ensure((tr * ru - tu).norm() <= 1e-10 * tu.norm().max(1e-300), || {
                format!("{name}: z={z} ({t},{r},{u}): {} vs {tu}", tr * ru)
            })?;
        }
    }
    Ok("40 triples per scale".into())
}

fn power_identity(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let constant_scales = [
        (TimeScale::integers(0.0), 1.0),
        (TimeScale::uniform(0.0, 0.5).unwrap(), 0.5),
        (TimeScale::reals(0.0), 0.0),
    ];
    for (ts, h) in &constant_scales {
        for _ in 0..50 {
            let z = Complex64::new(rng.gen_range(0.0..1.5), rng.gen_range(-1.0..1.0));
            let lam = rng.gen_range(0.5..3.0);
            let (s, t) = random_pair(rng, ts, 0.0, 6.0);
            let scaled = cdot(*h, Complex64::new(lam, 0.0), z).map_err(err)?;
            let lhs = exp_const(ts, scaled, t, s).map_err(err)?;
            let rhs = log_exp_const(ts, z, t, s).map_err(err)?.powf(lam).map_err(err)?.value();
            ensure((lhs - rhs).norm() <= 1e-10 * lhs.norm(), || format!("h={h} lam={lam} z={z}: {lhs} vs {rhs}"))?;
        }
    }
    for (name, ts, s) in fixture_scales() {
        for _ in 0..20 {
            let z = Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0));
            let m = rng.gen_range(1..=5);
            let (a, b) = random_pair(rng, &ts, s, 6.0);
            let e = log_exp_const(&ts, z, b, a).map_err(err)?;
            let mut power = Complex64::new(1.0, 0.0);
            for _ in 0..m {
                power *= e.value();
            }
            let via_log = e.powi(m).value();
            ensure((power - via_log).norm() <= 1e-10 * power.norm(), || format!("{name}: m={m} z={z}"))?;
        }
    }
    Ok("150 constant-graininess and 140 mixed cases".into())
}

fn positivity(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for (name, ts, s) in fixture_scales() {
        for _ in 0..40 {
            let x = rng.gen_range(0.0..2.0);
            let (a, b) = random_pair(rng, &ts, s, 8.0);
            let v = exp_const(&ts, Complex64::new(x, 0.0), b, a).map_err(err)?;
            ensure(v.im == 0.0 && v.re > 0.0, || format!("{name}: e_{x}({b}, {a}) = {v}"))?;
        }
    }
    let z = TimeScale::integers(0.0);
    for t in 0..30 {
        let here = exp_const(&z, Complex64::new(-2.0, 0.0), t as f64, 0.0).map_err(err)?;
        let next = exp_const(&z, Complex64::new(-2.0, 0.0), (t + 1) as f64, 0.0).map_err(err)?;
        ensure(here.re * next.re < 0.0, || format!("no sign change at {t}"))?;
    }
    Ok("positivity on 7 scales, alternation on 30 steps".into())
}

/// Doubles `x` from 1 until `|Lambda(x; t, s) - target| < 1e-6` and returns
/// the threshold.
pub fn lambda_threshold(ts: &TimeScale, t: f64, s: f64, target: f64) -> crate::error::Result<Option<f64>> {
    let mut x = 1.0;
    for _ in 0..120 {
        if (lambda_fn(ts, x, t, s, &qcfg())? - target).abs() < 1e-6 {
            return Ok(Some(x));
        }
        x *= 2.0;
    }
    Ok(None)
}

/// Whether `[s, t)_T` carries a dense stretch or at least two scattered
/// points; with a single scattered point `x e_{(-)x}(t, s)` tends to `1/mu`
/// instead of 0.
pub fn lambda_limit_is_indicator(ts: &TimeScale, s: f64, t: f64) -> bool {
    if t <= s {
        return true;
    }
    let pieces = ts.enumerate(s, t).unwrap_or_default();
    pieces.iter().any(|p| matches!(p, Piece::Dense { .. })) || pieces.len() >= 2
}

fn lambda_limit(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let scales = [TimeScale::integers(0.0), TimeScale::reals(0.0), mixed_unit()];
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    while pairs < 50 {
        let ts = &scales[pairs % 3];
        let s = random_point(rng, ts, 0.0, 6.0);
        let t = random_point(rng, ts, 0.0, 6.0);
        if !lambda_limit_is_indicator(ts, s, t) {
            continue;
        }
        let target = if s < t { 1.0 } else { 0.0 };
        let x = lambda_threshold(ts, t, s, target)
            .map_err(err)?
            .ok_or_else(|| format!("no threshold for ({t}, {s})"))?;
        // beyond the threshold the distance keeps shrinking
        let mut prev = (lambda_fn(ts, x, t, s, &qcfg()).map_err(err)? - target).abs();
        for k in 1..8 {
            let d = (lambda_fn(ts, x * 2f64.powi(k), t, s, &qcfg()).map_err(err)? - target).abs();
            ensure(d <= prev + 1e-15, || format!("({t}, {s}): not monotone beyond {x}"))?;
            prev = d;
        }
        worst = worst.max(x);
        pairs += 1;
    }
    Ok(format!("50 pairs, largest threshold {worst:e}"))
}

fn monomial_signs(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for (name, ts, s) in fixture_scales() {
        for _ in 0..40 {
            let hi = ts.snap_up(s + 8.0).unwrap();
            let t = random_point(rng, &ts, s, hi);
            let r = random_point(rng, &ts, s, hi);
            for n in 0..=6usize {
                let h = monomial(&ts, n, t, r, &qcfg()).map_err(err)?;
                let signed = if t >= r || n % 2 == 0 { h } else { -h };
                ensure(signed >= 0.0, || format!("{name}: h_{n}({t}, {r}) = {h}"))?;
            }
        }
    }
    Ok("40 pairs per scale, n <= 6".into())
}

fn growth_against_decay(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for (name, ts, s) in transform_scales() {
        for _ in 0..10 {
            let lam = rng.gen_range(0.1..1.0);
            let region = convergence_region(&ts, s, lam).map_err(err)?;
            let z = loop {
                let z = Complex64::new(rng.gen_range(0.0..3.0), rng.gen_range(-2.0..2.0));
                if in_region(region, z).map_err(err)? && is_regressive(&ts, s, z).map_err(err)? {
                    break z;
                }
            };
            let mut prev = f64::INFINITY;
            let mut last = 0.0;
            for k in 0..12 {
                let t = ts.snap_up(s + 2f64.powi(k)).unwrap();
                let ln = log_exp_const(&ts, Complex64::new(lam, 0.0), t, s).map_err(err)?.ln_abs()
                    - log_exp_const(&ts, z, t, s).map_err(err)?.ln_abs();
                ensure(ln <= prev + 1e-12, || format!("{name}: not decreasing at t = {t}"))?;
                prev = ln;
                last = ln;
            }
            ensure(last < (1e-10f64).ln(), || format!("{name}: lam={lam} z={z}: ln = {last}"))?;
        }
    }
    Ok("10 pairs per scale".into())
}

/// Options declaring the sup bound of a bounded fixture.
fn bounded_opts(f: &Fixture) -> TransformOptions {
    TransformOptions { bound: f.sup_bound(), ..TransformOptions::default() }
}

fn laplace_linearity(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for (name, ts, s) in transform_scales() {
        for _ in 0..5 {
            let f = random_bounded(rng, &ts, s, s + 4.0);
            let g = random_bounded(rng, &ts, s, s + 4.0);
            let (a, b) = (rand_c(rng, 2.0), rand_c(rng, 2.0));
            let region = convergence_region(&ts, s, 0.0).map_err(err)?;
            let z = loop {
                let z = Complex64::new(rng.gen_range(0.1..2.0), rng.gen_range(-2.0..2.0));
                if in_region(region, z).map_err(err)? {
                    break z;
                }
            };
            let fg = combine(a, &f, b, &g);
            let lf = laplace(&ts, &f, s, z, &bounded_opts(&f), &qcfg()).map_err(err)?.value;
            let lg = laplace(&ts, &g, s, z, &bounded_opts(&g), &qcfg()).map_err(err)?.value;
            let lc = laplace(&ts, &fg, s, z, &bounded_opts(&fg), &qcfg()).map_err(err)?.value;
            ensure(close(lc, a * lf + b * lg, 1e-9), || format!("{name}: {lc} vs {}", a * lf + b * lg))?;
        }
    }
    Ok("5 cases per scale".into())
}

fn modulation_identity(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for h in [0.0, 0.5, 1.0, 2.0] {
        let ts = if h == 0.0 { TimeScale::reals(0.0) } else { TimeScale::uniform(0.0, h).unwrap() };
        for _ in 0..5 {
            let f = random_bounded(rng, &ts, 0.0, 4.0);
            let opts = bounded_opts(&f);
            let z = Complex64::new(rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0));
            let c = Complex64::new(rng.gen_range(0.0..2.0), rng.gen_range(-1.0..1.0));
            let m = modulated_laplace(&ts, &f, 0.0, z, c, &opts, &qcfg()).map_err(err)?.value;
            let p = laplace(&ts, &f, 0.0, cplus(h, z, c), &opts, &qcfg()).map_err(err)?.value;
            ensure((m - p).norm() <= 1e-8, || format!("h={h} z={z} c={c}: {m} vs {p}"))?;
        }
    }
    Ok("20 cases".into())
}

/// Null functions on scales with right-dense points.
fn null_fixtures() -> Vec<(&'static str, TimeScale, Fixture)> {
    let mut both = indicator(0.25);
    both.terms.extend(indicator(0.75).terms);
    vec![
        ("zero on integers", TimeScale::integers(0.0), Fixture::default()),
        ("ind(0.5) on mixed-unit", mixed_unit(), indicator(0.5)),
        ("two dense masses on mixed-unit", mixed_unit(), both),
        ("ind(2.5) on points-then-reals", fixtures::points_then_reals(), indicator(2.5)),
        ("ind(1.5) on patchwork", fixtures::mixed_patchwork(), indicator(1.5)),
        ("ind(3) on reals", TimeScale::reals(0.0), indicator(3.0)),
    ]
}

fn null_annihilation(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let opts = TransformOptions::default();
    for (name, ts, f) in null_fixtures() {
        let region = convergence_region(&ts, 0.0, 0.0).map_err(err)?;
        let mut done = 0;
        while done < 20 {
            let z = rand_c(rng, 3.0);
            if !in_region(region, z).map_err(err)? || !is_regressive(&ts, 0.0, z).map_err(err)? {
                continue;
            }
            let v = laplace(&ts, &f, 0.0, z, &opts, &qcfg()).map_err(err)?.value;
            ensure(v.norm() <= 1e-8, || format!("{name}: z={z} gives {v}"))?;
            done += 1;
        }
    }
    Ok("20 z per null fixture".into())
}

/// Moving right along the real axis stays in the region as long as
/// `Re(1 + h z) >= 0`. Further left the region is the outside of a disc and a
/// shift to the right can enter it.
fn region_monotone(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let mut hits = 0;
    for h in GRAININESS {
        for _ in 0..500 {
            let z = regressive_sample(rng, h, 3.0);
            if 1.0 + h * z.re < 0.0 {
                continue;
            }
            let lam = rng.gen_range(-0.5..1.0);
            let region = crate::hilger::RegionSpec { h, lambda: lam };
            if in_region(region, z).map_err(err)? {
                hits += 1;
                let delta = rng.gen_range(0.0..3.0);
                ensure(in_region(region, z + delta).map_err(err)?, || format!("h={h} z={z} delta={delta}"))?;
            }
        }
    }
    Ok(format!("{hits} in-region samples"))
}

/// A random trial of the uniqueness check; returns whether it falsified.
pub fn lerch_trial<R: Rng>(rng: &mut R) -> crate::error::Result<(bool, NullVerdict)> {
    let ts = random_scale(rng);
    let t_max = ts.snap_up(ts.window_end() + rng.gen_range(0.5..3.0)).expect("unbounded");
    let f = loop {
        let f = random_bounded(rng, &ts, 0.0, t_max);
        let report = null_check(&ts, &f, 0.0, t_max, DEFAULT_TOL, &qcfg())?;
        if report.verdict == NullVerdict::NotNull {
            break f;
        }
    };
    let mut varsigma: Vec<f64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0.0..4.0)).collect();
    varsigma.sort_by(f64::total_cmp);
    varsigma.dedup();
    let spec = LatticeSpec {
        alpha: Complex64::new(rng.gen_range(0.25..2.0), 0.0),
        varsigma,
        n_max: rng.gen_range(0..=2),
    };
    let v = lerch_verify(&ts, &f, 0.0, &spec, t_max, DEFAULT_TOL, &bounded_opts(&f), &qcfg())?;
    Ok((v.falsification, v.null_report.verdict))
}

fn lerch_soundness(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Outcome {
    let seeds: Vec<u64> = (0..cfg.lerch_trials).map(|_| rng.gen()).collect();
    let outcomes: Vec<crate::error::Result<(bool, NullVerdict)>> = seeds
        .par_iter()
        .map(|&seed| lerch_trial(&mut ChaCha8Rng::seed_from_u64(seed)))
        .collect();
    let mut errors = 0;
    for (seed, outcome) in seeds.iter().zip(outcomes) {
        match outcome {
            Ok((true, _)) => return Err(format!("falsification with trial seed {seed}")),
            Ok(_) => {}
            Err(_) => errors += 1,
        }
    }
    Ok(format!("{} trials, {errors} evaluation errors, 0 falsifications", cfg.lerch_trials))
}

fn null_closure(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let mut count = 0;
    for (name, ts, f) in null_fixtures() {
        let base = null_check(&ts, &f, 0.0, 6.0, DEFAULT_TOL, &qcfg()).map_err(err)?;
        if base.verdict != NullVerdict::Null {
            return Err(format!("{name} is not null: {}", base.max_cumulative));
        }
        for _ in 0..5 {
            let g = random_smooth(rng);
            let r = modulated_null_check(&ts, &f, &g, 0.0, 6.0, DEFAULT_TOL, &qcfg()).map_err(err)?;
            ensure(r.verdict == NullVerdict::Null && r.max_cumulative <= 1e-8, || {
                format!("{name}: {}", r.max_cumulative)
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs"))
}

/// Limit of `char_approx` as `varsigma` grows: the integral of `g` over the
/// `eta` with `sigma(eta) > t`, except that a right-scattered `t` keeps the
/// weight `exp(-1 / mu(t))`.
pub fn char_limit<G: GridFunction + ?Sized>(
    ts: &TimeScale,
    g: &G,
    s: f64,
    t: f64,
    r_trunc: f64,
    cfg: &QuadratureConfig,
) -> crate::error::Result<Complex64> {
    let t = ts.point(t)?.value();
    let start = t.max(ts.point(s)?.value());
    let mut total = delta_integral(ts, g, start, r_trunc, cfg)?;
    let mu = ts.graininess(t)?;
    if mu > 0.0 && t >= s {
        total -= mu * g.value(t, mu) * (1.0 - (-1.0 / mu).exp());
    }
    Ok(total)
}

fn char_convergence(_rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    let cases: Vec<(&str, TimeScale, Fixture, f64)> = vec![
        ("integers", TimeScale::integers(0.0), constant(1.0), 3.0),
        ("reals", TimeScale::reals(0.0), constant(1.0), 1.5),
        ("mixed-unit", mixed_unit(), Fixture::new(vec![Term::Cos { amp: 1.0, freq: 1.0 }]), 0.5),
        ("mixed-unit scattered t", mixed_unit(), chi(0.0, 5.0), 1.0),
    ];
    let mut detail = Vec::new();
    for (name, ts, g, t) in cases {
        let r_trunc = 6.0;
        let oracle = char_limit(&ts, &g, 0.0, t, r_trunc, &qcfg()).map_err(err)?;
        let mut prev = f64::INFINITY;
        let mut last = 0.0;
        for k in 6..=20 {
            let x = 2f64.powi(k);
            let v = char_approx(&ts, &g, 0.0, t, x, r_trunc, &qcfg()).map_err(err)?;
            let d = (v - oracle).norm();
            ensure(d <= prev * (1.0 + 1e-9) + 1e-12, || format!("{name}: error grew at x = {x}"))?;
            prev = d;
            last = d;
        }
        ensure(last <= 1e-4, || format!("{name}: final error {last}"))?;
        detail.push(format!("{name} {last:.1e}"));
    }
    Ok(detail.join(", "))
}

fn lattice_zero_row(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for (name, ts, s) in transform_scales() {
        let f = random_bounded(rng, &ts, s, s + 3.0);
        let spec = LatticeSpec { alpha: Complex64::new(1.0, 0.0), varsigma: vec![0.5, 1.0, 2.0, 4.0], n_max: 1 };
        let cells = lattice_sweep(&ts, &f, s, &spec, &bounded_opts(&f), &qcfg()).map_err(err)?;
        let row: Vec<Complex64> = cells[0].iter().map(|c| c.as_ref().map(|r| r.value).map_err(|e| e.to_string())).collect::<std::result::Result<_, _>>()?;
        ensure(row.iter().all(|v| *v == row[0]), || format!("{name}: {row:?}"))?;
    }
    Ok("one sweep per scale".into())
}

fn lambda_series_identity(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Outcome {
    for (name, ts, s) in fixture_scales() {
        for _ in 0..30 {
            let varsigma = rng.gen_range(0.01..5.0);
            let (a, b) = random_pair(rng, &ts, s, 8.0);
            let (sum, _) = lambda_series(&ts, varsigma, b, a, 60, &qcfg()).map_err(err)?;
            let direct = lambda_fn(&ts, varsigma, b, a, &qcfg()).map_err(err)?;
            ensure((sum - direct).abs() <= 1e-10, || format!("{name}: varsigma={varsigma}: {sum} vs {direct}"))?;
        }
    }
    Ok("30 cases per scale".into())
}
