//! Delta derivatives and delta integrals.
//!
//! Integrals over `[a, b)_T` are the sum of `mu(t) f(t)` over the scattered
//! points plus adaptive quadrature over the dense components. Quadrature only
//! samples the open interior of dense components, so an integrand may jump at
//! scattered points without harming the result. Error bounds assume the
//! integrand is piecewise smooth on dense parts; rd-continuity is trusted, not
//! checked.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponential::log_exp_const;
use crate::quadrature;
use crate::timescale::{lattice_point, Run, TimeScale};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Doubling steps allowed before an improper integral gives up.
pub const MAX_DOUBLINGS: usize = 60;

/// Integrand evaluations allowed for one improper integral.
pub const MAX_EVALUATIONS: usize = 50_000_000;

/// A complex-valued function on the points of a time scale.
///
/// `value` receives the graininess of the point it is evaluated at, which lets
/// integrands built from `f(sigma(t))` avoid a second lookup. Inside dense
/// components the integrator calls `dense_value` instead; functions carrying
/// point masses at right-dense points return the value without those masses,
/// since a single right-dense point has zero delta measure.
pub trait GridFunction: Sync {
    fn value(&self, t: f64, mu: f64) -> Complex64;

    fn dense_value(&self, t: f64) -> Complex64 {
        self.value(t, 0.0)
    }

    /// Points inside dense components where the function may jump or kink.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F> GridFunction for F
where
    F: Fn(f64) -> Complex64 + Sync,
{
    fn value(&self, t: f64, _mu: f64) -> Complex64 {
        self(t)
    }
}

/// `t -> g(sigma(t))`.
pub struct Shifted<'a, G: ?Sized> {
    pub ts: &'a TimeScale,
    pub g: &'a G,
}

impl<G: GridFunction + ?Sized> GridFunction for Shifted<'_, G> {
    fn value(&self, t: f64, mu: f64) -> Complex64 {
        if mu == 0.0 {
            return self.g.dense_value(t);
        }
        let next = t + mu;
        let next_mu = self.ts.graininess(next).unwrap_or(0.0);
        self.g.value(next, next_mu)
    }

    fn dense_value(&self, t: f64) -> Complex64 {
        self.g.dense_value(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.g.breakpoints()
    }
}

/// Pointwise product of two grid functions.
pub struct Product<'a, A: ?Sized, B: ?Sized>(pub &'a A, pub &'a B);

impl<A: GridFunction + ?Sized, B: GridFunction + ?Sized> GridFunction for Product<'_, A, B> {
    fn value(&self, t: f64, mu: f64) -> Complex64 {
        self.0.value(t, mu) * self.1.value(t, mu)
    }

    fn dense_value(&self, t: f64) -> Complex64 {
        self.0.dense_value(t) * self.1.dense_value(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.0.breakpoints();
        b.extend(self.1.breakpoints());
        b
    }
}

/// Pointwise difference `a - b`.
pub struct Difference<'a, A: ?Sized, B: ?Sized>(pub &'a A, pub &'a B);

impl<A: GridFunction + ?Sized, B: GridFunction + ?Sized> GridFunction for Difference<'_, A, B> {
    fn value(&self, t: f64, mu: f64) -> Complex64 {
        self.0.value(t, mu) - self.1.value(t, mu)
    }

    fn dense_value(&self, t: f64) -> Complex64 {
        self.0.dense_value(t) - self.1.dense_value(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.0.breakpoints();
        b.extend(self.1.breakpoints());
        b
    }
}

/// Counts evaluations of the wrapped function.
pub(crate) struct Counted<'a, F: ?Sized> {
    inner: &'a F,
    count: AtomicUsize,
}

impl<'a, F: GridFunction + ?Sized> Counted<'a, F> {
    pub(crate) fn new(inner: &'a F) -> Self {
        Counted { inner, count: AtomicUsize::new(0) }
    }

    pub(crate) fn count(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }
}

impl<F: GridFunction + ?Sized> GridFunction for Counted<'_, F> {
    fn value(&self, t: f64, mu: f64) -> Complex64 {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.value(t, mu)
    }

    fn dense_value(&self, t: f64) -> Complex64 {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.dense_value(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Mesh nodes per dense component in cumulative tables.
    pub dense_mesh: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 40, dense_mesh: 64 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Partial integrals `int_s^{node} f` at increasing nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeTable {
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl CumulativeTable {
    pub fn last(&self) -> Complex64 {
        *self.values.last().expect("a table has at least one node")
    }

    /// Largest `|value|` and the node where it occurs (first one on ties).
    pub fn max_abs(&self) -> (f64, f64) {
        let mut best = (0.0, self.nodes[0]);
        for (node, v) in self.nodes.iter().zip(&self.values) {
            if v.norm() > best.0 {
                best = (v.norm(), *node);
            }
        }
        best
    }

    /// Index of the last node `<= t`.
    fn node_before(&self, t: f64) -> usize {
        self.nodes.partition_point(|&n| n <= t).saturating_sub(1)
    }
}

/// Result of an improper integral or transform evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformResult {
    pub value: Complex64,
    /// Right end `R` of the last integrated range `[s, R)`.
    pub truncation_point: f64,
    /// Bound on `|int_R^inf|` from the decay envelope.
    pub tail_estimate: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Decay envelope for improper integrals: `|f(t)| <= C e_{(-)rate}(sigma(t), s)`.
///
/// With `constant = None` the constant is estimated a posteriori from samples
/// of the last integrated block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub rate: f64,
    pub constant: Option<f64>,
}

pub(crate) fn sorted_breakpoints<F: GridFunction + ?Sized>(f: &F) -> Vec<f64> {
    let mut b: Vec<f64> = f.breakpoints().into_iter().filter(|p| p.is_finite()).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

pub(crate) fn integrate_dense<F: GridFunction + ?Sized>(
    f: &F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let g = |t: f64| f.dense_value(t);
    let mut total = ZERO;
    let mut left = lo;
    let first = breakpoints.partition_point(|&p| p <= lo);
    for &p in breakpoints[first..].iter().take_while(|&&p| p < hi) {
        total += quadrature::integrate(&g, left, p, cfg.abs_tol, cfg.rel_tol, cfg.max_depth)?.value;
        left = p;
    }
    total += quadrature::integrate(&g, left, hi, cfg.abs_tol, cfg.rel_tol, cfg.max_depth)?.value;
    Ok(total)
}

/// `int_a^b f` for canonical points `a <= b`, without validation.
pub(crate) fn integrate_range<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let bps = sorted_breakpoints(f);
    let mut total = ZERO;
    for run in ts.runs(a, b) {
        match run {
            Run::Dense { start, end } => total += integrate_dense(f, start, end, &bps, cfg)?,
            Run::Lattice { origin, step, k0, k1 } => {
                for k in k0..k1 {
                    total += f.value(lattice_point(origin, step, k), step) * step;
                }
            }
        }
    }
    Ok(total)
}

/// Delta integral `int_a^b f(eta) Delta eta`; `a > b` gives `-int_b^a`.
pub fn delta_integral<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    cfg.validate()?;
    let a = ts.point(a)?.value();
    let b = ts.point(b)?.value();
    if a <= b {
        integrate_range(ts, f, a, b, cfg)
    } else {
        Ok(-integrate_range(ts, f, b, a, cfg)?)
    }
}

/// Partial integrals `int_s^node f` at every scattered point of
/// `[s, t_max]_T` and on a mesh of `cfg.dense_mesh` cells per dense component.
pub fn cumulative<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    t_max: f64,
    cfg: &QuadratureConfig,
) -> Result<CumulativeTable> {
    cfg.validate()?;
    let s = ts.point(s)?.value();
    let t_max = ts.point(t_max)?.value();
    if t_max < s {
        return Err(Error::EmptyRange { a: s, b: t_max });
    }
    let bps = sorted_breakpoints(f);
    let mesh = cfg.dense_mesh.max(1);
    let mut nodes = vec![s];
    let mut values = vec![ZERO];
    let mut acc = ZERO;
    for run in ts.runs(s, t_max) {
        match run {
            Run::Dense { start, end } => {
                let width = (end - start) / mesh as f64;
                let mut left = start;
                for i in 1..=mesh {
                    let right = if i == mesh { end } else { start + i as f64 * width };
                    acc += integrate_dense(f, left, right, &bps, cfg)?;
                    nodes.push(right);
                    values.push(acc);
                    left = right;
                }
            }
            Run::Lattice { origin, step, k0, k1 } => {
                for k in k0..k1 {
                    let t = lattice_point(origin, step, k);
                    acc += f.value(t, step) * step;
                    nodes.push(lattice_point(origin, step, k + 1));
                    values.push(acc);
                }
            }
        }
    }
    if let Some(last) = nodes.last_mut() {
        *last = t_max;
    }
    Ok(CumulativeTable { nodes, values })
}

/// Richardson extrapolation of a difference quotient with error expansion in
/// powers `h^order, h^(2 order), ...`.
fn richardson<Q: Fn(f64) -> Complex64>(
    quotient: Q,
    h0: f64,
    order: i32,
    levels: usize,
) -> (Complex64, f64) {
    let mut prev: Vec<Complex64> = Vec::new();
    let mut best = quotient(h0);
    let mut change = f64::INFINITY;
    let mut h = h0;
    prev.push(best);
    for _ in 1..levels {
        h *= 0.5;
        let mut row = vec![quotient(h)];
        for j in 1..=prev.len() {
            let factor = 2f64.powi(order * j as i32);
            let next = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
            row.push(next);
        }
        let diag = *row.last().unwrap();
        change = (diag - best).norm();
        best = diag;
        prev = row;
    }
    (best, change)
}

fn dense_derivative<F: GridFunction + ?Sized>(
    f: &F,
    t: f64,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let scale = t.abs().max(1.0);
    let room_l = t - lo;
    let room_r = hi - t;
    let accept = |d: Complex64, change: f64| {
        change <= 10.0 * (cfg.rel_tol * d.norm()).max(cfg.abs_tol)
    };
    for shrink in [1.0, 0.125, 0.015625] {
        let cap = 0.01 * scale * shrink;
        let h_central = room_l.min(room_r).min(cap);
        let (d, change) = if h_central >= 1e-4 * scale * shrink {
            let q = |h: f64| (f.dense_value(t + h) - f.dense_value(t - h)) / (2.0 * h);
            richardson(q, h_central, 2, 4)
        } else {
            let h = room_r.min(cap);
            let ft = f.dense_value(t);
            let q = |h: f64| (f.dense_value(t + h) - ft) / h;
            richardson(q, h, 1, 6)
        };
        if accept(d, change) {
            return Ok(d);
        }
    }
    Err(Error::NonDifferentiable { t })
}

/// Delta derivative: the forward difference quotient at right-scattered
/// points, an extrapolated difference quotient inside dense components.
pub fn delta_derivative<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let (t, sigma) = ts.resolve(t).ok_or(Error::NotInTimeScale { t })?;
    let mu = sigma - t;
    if mu > 0.0 {
        let next_mu = ts.graininess(sigma)?;
        return Ok((f.value(sigma, next_mu) - f.value(t, mu)) / mu);
    }
    let (lo, hi) = ts.dense_component(t).ok_or(Error::NonDifferentiable { t })?;
    if hi <= t {
        // maximum of a bounded time scale
        return Err(Error::NonDifferentiable { t });
    }
    dense_derivative(f, t, lo, hi, cfg)
}

/// `f(sigma(t)) - f(t) - mu(t) f^Delta(t)`.
pub fn sigma_shift_residual<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let (t, sigma) = ts.resolve(t).ok_or(Error::NotInTimeScale { t })?;
    let mu = sigma - t;
    let derivative = delta_derivative(ts, f, t, cfg)?;
    if mu == 0.0 {
        return Ok(f.dense_value(sigma) - f.dense_value(t) - derivative * mu);
    }
    let next_mu = ts.graininess(sigma)?;
    Ok(f.value(sigma, next_mu) - f.value(t, mu) - derivative * mu)
}

/// `F(eta) = int_s^eta f`, served from a cumulative table plus a short
/// quadrature from the nearest node.
struct Antiderivative<'a, F: ?Sized> {
    ts: &'a TimeScale,
    f: &'a F,
    table: CumulativeTable,
    breakpoints: Vec<f64>,
    cfg: QuadratureConfig,
}

impl<F: GridFunction + ?Sized> Antiderivative<'_, F> {
    fn at(&self, eta: f64) -> Result<Complex64> {
        let i = self.table.node_before(eta);
        let node = self.table.nodes[i];
        if node == eta {
            return Ok(self.table.values[i]);
        }
        match self.ts.dense_component(node) {
            Some((_, hi)) if eta <= hi => Ok(self.table.values[i]
                + integrate_dense(self.f, node, eta, &self.breakpoints, &self.cfg)?),
            _ => {
                let a = self.ts.point(node)?.value();
                let b = self.ts.point(eta)?.value();
                Ok(self.table.values[i] + integrate_range(self.ts, self.f, a, b, &self.cfg)?)
            }
        }
    }
}

/// Integrand `F(eta) g^Delta(eta)` of the integration-by-parts identity.
struct PartsIntegrand<'a, F: ?Sized, G: ?Sized> {
    antiderivative: Antiderivative<'a, F>,
    g: &'a G,
    failure: Mutex<Option<Error>>,
}

impl<F: GridFunction + ?Sized, G: GridFunction + ?Sized> PartsIntegrand<'_, F, G> {
    fn record(&self, r: Result<Complex64>) -> Complex64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.failure.lock().unwrap().get_or_insert(e);
                ZERO
            }
        }
    }
}

impl<F: GridFunction + ?Sized, G: GridFunction + ?Sized> GridFunction for PartsIntegrand<'_, F, G> {
    fn value(&self, t: f64, _mu: f64) -> Complex64 {
        let ad = &self.antiderivative;
        let r = ad
            .at(t)
            .and_then(|big_f| Ok(big_f * delta_derivative(ad.ts, self.g, t, &ad.cfg)?));
        self.record(r)
    }

    fn dense_value(&self, t: f64) -> Complex64 {
        self.value(t, 0.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.antiderivative.breakpoints.clone();
        b.extend(self.g.breakpoints());
        b
    }
}

/// Residual of integration by parts,
/// `int_s^t f g^sigma - ([F g]_s^t - int_s^t F g^Delta)` with `F = int_s f`.
pub fn integration_by_parts_check<F, G>(
    ts: &TimeScale,
    f: &F,
    g: &G,
    s: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64>
where
    F: GridFunction + ?Sized,
    G: GridFunction + ?Sized,
{
    let s = ts.point(s)?.value();
    let t = ts.point(t)?.value();
    let lhs = delta_integral(ts, &Product(f, &Shifted { ts, g }), s, t, cfg)?;
    let table = cumulative(ts, f, s, t, cfg)?;
    let big_f_t = table.last();
    let integrand = PartsIntegrand {
        antiderivative: Antiderivative {
            ts,
            f,
            table,
            breakpoints: sorted_breakpoints(f),
            cfg: *cfg,
        },
        g,
        failure: Mutex::new(None),
    };
    let correction = delta_integral(ts, &integrand, s, t, cfg)?;
    if let Some(e) = integrand.failure.lock().unwrap().take() {
        return Err(e);
    }
    let g_t = g.value(t, ts.graininess(t)?);
    // F(s) = 0
    let rhs = big_f_t * g_t - correction;
    Ok(lhs - rhs)
}

/// `ln e_x(sigma(t), s)` for the real envelope rate `x > 0`.
fn log_envelope(ts: &TimeScale, rate: f64, t: f64, mu: f64, s: f64) -> f64 {
    log_exp_const(ts, Complex64::new(rate, 0.0), t + mu, s)
        .map(|e| e.ln_abs())
        .unwrap_or(f64::NAN)
}

/// Sample-based estimate of `sup |f(t)| e_x(sigma(t), s)` over `[lo, hi)_T`.
fn probe_constant<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    lo: f64,
    hi: f64,
    rate: f64,
) -> f64 {
    const PROBES: u64 = 9;
    let mut best: f64 = 0.0;
    let mut take = |v: Complex64, t: f64, mu: f64| {
        let m = v.norm();
        if m > 0.0 {
            best = best.max((m.ln() + log_envelope(ts, rate, t, mu, s)).exp());
        } else if m.is_nan() {
            best = f64::NAN;
        }
    };
    for run in ts.runs(lo, hi) {
        match run {
            Run::Dense { start, end } => {
                for j in 0..PROBES {
                    let t = start + (end - start) * (j as f64 + 0.5) / PROBES as f64;
                    take(f.dense_value(t), t, 0.0);
                }
            }
            Run::Lattice { origin, step, k0, k1 } => {
                let n = k1 - k0;
                let picks = n.min(PROBES);
                for j in 0..picks {
                    let k = if picks == 1 { k0 } else { k0 + j * (n - 1) / (picks - 1) };
                    let t = lattice_point(origin, step, k);
                    take(f.value(t, step), t, step);
                }
            }
        }
    }
    best
}

/// Safety factor on the a-posteriori envelope constant.
const PROBE_SAFETY: f64 = 2.0;

/// `int_s^inf f`, integrating `[s, R)` over a doubling schedule of truncation
/// points until the envelope bound on the remaining tail is below `abs_tol`.
pub fn improper_delta_integral<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    cfg: &QuadratureConfig,
    bound: &TailBound,
) -> Result<TransformResult> {
    improper_from(ts, f, s, cfg, bound, s)
}

/// [`improper_delta_integral`] that keeps doubling at least until `min_r`.
/// An estimated envelope constant is the running maximum over every block
/// integrated so far.
pub(crate) fn improper_from<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    cfg: &QuadratureConfig,
    bound: &TailBound,
    min_r: f64,
) -> Result<TransformResult> {
    cfg.validate()?;
    ts.require_unbounded()?;
    let s = ts.point(s)?.value();
    if !(bound.rate > 0.0 && bound.rate.is_finite()) {
        return Err(Error::NoConvergence {
            reason: format!("no decaying envelope (rate {})", bound.rate),
        });
    }
    let counted = Counted::new(f);
    let mut schedule = TruncationSchedule::new(ts, s)?;
    let mut lo = s;
    let mut value = ZERO;
    let mut estimated: f64 = 0.0;
    for _ in 0..=MAX_DOUBLINGS {
        let hi = schedule.next_point();
        value += integrate_range(ts, &counted, lo, hi, cfg)?;
        let constant = match bound.constant {
            Some(c) => c,
            None => {
                estimated = estimated.max(PROBE_SAFETY * probe_constant(ts, f, s, lo, hi, bound.rate));
                estimated
            }
        };
        let log_decay = log_exp_const(ts, Complex64::new(bound.rate, 0.0), hi, s)?.ln_abs();
        let tail_estimate = if constant == 0.0 {
            0.0
        } else {
            constant / bound.rate * (-log_decay).exp()
        };
        if tail_estimate.is_nan() || !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NoConvergence { reason: format!("non-finite integrand below R = {hi}") });
        }
        if tail_estimate <= cfg.abs_tol && hi >= min_r {
            return Ok(TransformResult {
                value,
                truncation_point: hi,
                tail_estimate,
                converged: true,
                evaluations: counted.count(),
            });
        }
        if counted.count() > MAX_EVALUATIONS {
            break;
        }
        lo = hi;
    }
    Err(Error::NoConvergence {
        reason: format!("tail estimate still above {} at R = {lo}", cfg.abs_tol),
    })
}

/// Truncation points `R_0 < R_1 < ...` with `R_{k+1} - s >= 2 (R_k - s)`,
/// each snapped up to a point of the time scale.
pub(crate) struct TruncationSchedule<'a> {
    ts: &'a TimeScale,
    s: f64,
    current: Option<f64>,
}

impl<'a> TruncationSchedule<'a> {
    pub(crate) fn new(ts: &'a TimeScale, s: f64) -> Result<Self> {
        ts.require_unbounded()?;
        Ok(TruncationSchedule { ts, s, current: None })
    }

    pub(crate) fn next_point(&mut self) -> f64 {
        let target = match self.current {
            None => ts_first_cut(self.ts, self.s),
            Some(r) => self.s + 2.0 * (r - self.s),
        };
        let r = self.ts.snap_up(target).expect("unbounded time scale");
        self.current = Some(r);
        r
    }
}

fn ts_first_cut(ts: &TimeScale, s: f64) -> f64 {
    ts.window_end().max(s + 1.0)
}

/// Like [`improper_delta_integral`] but without an envelope: integrates over
/// `doublings` blocks and reports the last block's magnitude as the tail
/// estimate. The result is never marked converged.
pub(crate) fn truncated_integral<F: GridFunction + ?Sized>(
    ts: &TimeScale,
    f: &F,
    s: f64,
    cfg: &QuadratureConfig,
    doublings: usize,
) -> Result<TransformResult> {
    let s = ts.point(s)?.value();
    let counted = Counted::new(f);
    let mut schedule = TruncationSchedule::new(ts, s)?;
    let mut lo = s;
    let mut value = ZERO;
    let mut last_block = 0.0;
    for _ in 0..doublings.max(1) {
        let hi = schedule.next_point();
        let block = integrate_range(ts, &counted, lo, hi, cfg)?;
        value += block;
        last_block = block.norm();
        lo = hi;
    }
    Ok(TransformResult {
        value,
        truncation_point: lo,
        tail_estimate: last_block,
        converged: false,
        evaluations: counted.count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::{Segment, Tail};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mixed() -> TimeScale {
        TimeScale::new(vec![Segment::Dense { start: 0.0, end: 1.0 }], Tail::Uniform { step: 1.0 })
            .unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn derivative_examples() {
        let z = TimeScale::integers(0.0);
        let sq = |t: f64| c(t * t);
        assert_eq!(delta_derivative(&z, &sq, 3.0, &cfg()).unwrap(), c(7.0));
        let d = delta_derivative(&mixed(), &sq, 0.5, &cfg()).unwrap();
        assert!((d - c(1.0)).norm() < 1e-8);
        // left endpoint of a dense component uses a one-sided stencil
        let d = delta_derivative(&mixed(), &sq, 0.0, &cfg()).unwrap();
        assert!(d.norm() < 1e-8, "{d}");
        // e_2(t, 0) = 3^t on the integers
        let e2 = |t: f64| c(3f64.powf(t));
        assert!((delta_derivative(&z, &e2, 4.0, &cfg()).unwrap() - c(162.0)).norm() < 1e-10);
    }

    #[test]
    fn derivative_rejects_jumps() {
        let r = TimeScale::reals(0.0);
        let step = |t: f64| c(if t < 1.0 { 0.0 } else { 1.0 });
        assert_eq!(
            delta_derivative(&r, &step, 1.0, &cfg()),
            Err(Error::NonDifferentiable { t: 1.0 })
        );
    }

    #[test]
    fn integral_examples() {
        let z = TimeScale::integers(0.0);
        let five = delta_integral(&z, &|_t: f64| c(2.5), 0.0, 5.0, &cfg()).unwrap();
        assert_eq!(five, c(12.5));
        let v = delta_integral(&mixed(), &|t: f64| c(t), 0.0, 3.0, &cfg()).unwrap();
        assert!((v - c(3.5)).norm() < 1e-12);
        let zero = delta_integral(&mixed(), &|_t: f64| c(0.0), 0.0, 3.0, &cfg()).unwrap();
        assert_eq!(zero, c(0.0));
        let back = delta_integral(&mixed(), &|t: f64| c(t), 3.0, 0.0, &cfg()).unwrap();
        assert!((back + c(3.5)).norm() < 1e-12);
    }

    #[test]
    fn cumulative_examples() {
        let z = TimeScale::integers(0.0);
        let alt = |t: f64| c(if (t.round() as i64) % 2 == 0 { 1.0 } else { -1.0 });
        let table = cumulative(&z, &alt, 0.0, 4.0, &cfg()).unwrap();
        assert_eq!(table.nodes, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        let re: Vec<f64> = table.values.iter().map(|v| v.re).collect();
        assert_eq!(re, vec![0.0, 1.0, 0.0, 1.0, 0.0]);

        let r = TimeScale::reals(0.0);
        let cfg4 = QuadratureConfig { dense_mesh: 4, ..cfg() };
        let table = cumulative(&r, &|_t: f64| c(1.0), 0.0, 1.0, &cfg4).unwrap();
        for (k, (node, v)) in table.nodes.iter().zip(&table.values).enumerate() {
            assert!((node - k as f64 / 4.0).abs() < 1e-15);
            assert!((v.re - k as f64 / 4.0).abs() < 1e-14);
        }
        let zero = cumulative(&mixed(), &|_t: f64| c(0.0), 0.0, 3.0, &cfg()).unwrap();
        assert!(zero.values.iter().all(|v| *v == c(0.0)));
    }

    #[test]
    fn improper_examples() {
        let r = TimeScale::reals(0.0);
        let bound = TailBound { rate: 1.0, constant: None };
        let v = improper_delta_integral(&r, &|t: f64| c((-t).exp()), 0.0, &cfg(), &bound).unwrap();
        assert!(v.converged);
        assert!((v.value - c(1.0)).norm() < 1e-8);

        let z = TimeScale::integers(0.0);
        let geo = |t: f64| c(0.5f64.powf(t + 1.0));
        let v = improper_delta_integral(&z, &geo, 0.0, &cfg(), &bound).unwrap();
        assert!((v.value - c(1.0)).norm() < 1e-10, "{v:?}");

        let v = improper_delta_integral(&z, &|_t: f64| c(0.0), 0.0, &cfg(), &bound).unwrap();
        assert_eq!(v.value, c(0.0));
        assert!(v.converged);
        assert_eq!(v.truncation_point, 1.0);

        let missing = TailBound { rate: 0.0, constant: None };
        assert!(matches!(
            improper_delta_integral(&z, &geo, 0.0, &cfg(), &missing),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn shift_residuals() {
        let z = TimeScale::integers(0.0);
        let cube = |t: f64| c(t * t * t);
        assert_eq!(sigma_shift_residual(&z, &cube, 2.0, &cfg()).unwrap(), c(0.0));
        let r = sigma_shift_residual(&mixed(), &cube, 0.3, &cfg()).unwrap();
        assert_eq!(r, c(0.0));
    }

    #[test]
    fn parts_examples() {
        let z = TimeScale::integers(0.0);
        let one = |_t: f64| c(1.0);
        let id = |t: f64| c(t);
        let r = integration_by_parts_check(&z, &one, &id, 0.0, 3.0, &cfg()).unwrap();
        assert!(r.norm() < 1e-12);
        let r = integration_by_parts_check(&z, &|_t: f64| c(0.0), &id, 0.0, 3.0, &cfg()).unwrap();
        assert_eq!(r, c(0.0));
        let r = integration_by_parts_check(&mixed(), &id, &one, 0.0, 3.0, &cfg()).unwrap();
        assert!(r.norm() < 1e-10);
        let sq = |t: f64| c(t * t - 1.0);
        let r = integration_by_parts_check(&mixed(), &id, &sq, 0.0, 4.0, &cfg()).unwrap();
        assert!(r.norm() < 1e-8, "{r}");
    }
}
