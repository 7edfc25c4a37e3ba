//! Time scales described by a finite window plus a lazily generated tail.
//!
//! The window `[window_start, window_end]` is an ordered list of dense
//! intervals and isolated points. Above `window_end` the time scale continues
//! according to its [`Tail`]. `window_end` itself always belongs to the time
//! scale and is the base point of the tail.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Absolute membership tolerance.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Membership tolerance at `t`: the absolute tolerance, widened to a few ulps
/// of `t` once `t` is large enough that generated points carry rounding error.
pub(crate) fn tol_at(t: f64) -> f64 {
    MEMBERSHIP_TOL.max(16.0 * f64::EPSILON * t.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Closed interval `[start, end]`, `start < end`.
    Dense { start: f64, end: f64 },
    Point(f64),
}

impl Segment {
    pub fn start(&self) -> f64 {
        match *self {
            Segment::Dense { start, .. } => start,
            Segment::Point(p) => p,
        }
    }

    pub fn end(&self) -> f64 {
        match *self {
            Segment::Dense { end, .. } => end,
            Segment::Point(p) => p,
        }
    }
}

/// Behaviour of the time scale above `window_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// `[window_end, inf)` is dense.
    Continuous,
    /// Points `window_end + k * step`, `k >= 0`.
    Uniform { step: f64 },
    /// Points `window_end * ratio^k`, `k >= 0`; needs `window_end > 0`.
    Geometric { ratio: f64 },
    /// Nothing above the window; `window_end = max T`.
    WindowOnly,
}

/// A real number known to be a point of some time scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TimePoint(f64);

impl TimePoint {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<TimePoint> for f64 {
    fn from(p: TimePoint) -> f64 {
        p.0
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One element of the partition of `[a, b)_T` returned by [`TimeScale::enumerate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    /// Maximal dense subinterval `[start, end)`.
    Dense { start: f64, end: f64 },
    Scattered { t: TimePoint, mu: f64 },
}

/// Compressed partition element. A lattice is a run of equally spaced
/// right-scattered points `origin + k * step`, `k0 <= k < k1`, each with
/// graininess `step`; a single isolated point is a lattice with one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Run {
    Dense { start: f64, end: f64 },
    Lattice { origin: f64, step: f64, k0: u64, k1: u64 },
}

impl Run {
    pub(crate) fn single(t: f64, mu: f64) -> Run {
        Run::Lattice { origin: t, step: mu, k0: 0, k1: 1 }
    }

    pub(crate) fn start(&self) -> f64 {
        match *self {
            Run::Dense { start, .. } => start,
            Run::Lattice { origin, step, k0, .. } => lattice_point(origin, step, k0),
        }
    }

    pub(crate) fn end(&self) -> f64 {
        match *self {
            Run::Dense { end, .. } => end,
            Run::Lattice { origin, step, k1, .. } => lattice_point(origin, step, k1),
        }
    }
}

#[inline]
pub(crate) fn lattice_point(origin: f64, step: f64, k: u64) -> f64 {
    if k == 0 {
        origin
    } else {
        origin + k as f64 * step
    }
}

/// Distinct graininess values met on `[s, inf)_T`.
#[derive(Debug, Clone, Default)]
pub(crate) struct GrainSet {
    pub(crate) finite: Vec<f64>,
    /// Some point of `[s, inf)_T` is right-dense.
    pub(crate) dense: bool,
    /// Geometric tail: first graininess on the tail and the ratio between
    /// consecutive graininess values.
    pub(crate) geometric: Option<(f64, f64)>,
}

impl GrainSet {
    pub(crate) fn inf(&self) -> f64 {
        let mut m = f64::INFINITY;
        if self.dense {
            m = 0.0;
        }
        for &mu in &self.finite {
            m = m.min(mu);
        }
        if let Some((first, _)) = self.geometric {
            m = m.min(first);
        }
        if m.is_infinite() {
            0.0
        } else {
            m
        }
    }

    pub(crate) fn sup(&self) -> f64 {
        if self.geometric.is_some() {
            return f64::INFINITY;
        }
        self.finite.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn has_scattered(&self) -> bool {
        self.geometric.is_some() || self.finite.iter().any(|&mu| mu > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    segments: Vec<Segment>,
    tail: Tail,
}

impl TimeScale {
    /// Builds a time scale from ordered segments. Touching dense intervals are
    /// merged; any other overlap is rejected.
    pub fn new(segments: Vec<Segment>, tail: Tail) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidTimeScale("no segments".into()));
        }
        let mut merged: Vec<Segment> = Vec::with_capacity(segments.len());
        for seg in segments {
            match seg {
                Segment::Dense { start, end } => {
                    if !start.is_finite() || !end.is_finite() || start >= end {
                        return Err(Error::InvalidTimeScale(format!(
                            "interval [{start}, {end}] must have finite endpoints and positive length"
                        )));
                    }
                }
                Segment::Point(p) => {
                    if !p.is_finite() {
                        return Err(Error::InvalidTimeScale(format!("point {p} is not finite")));
                    }
                }
            }
            if let Some(prev) = merged.last_mut() {
                match (*prev, seg) {
                    (Segment::Dense { start, end }, Segment::Dense { start: s2, end: e2 })
                        if end == s2 =>
                    {
                        *prev = Segment::Dense { start, end: e2 };
                        continue;
                    }
                    _ if prev.end() >= seg.start() => {
                        return Err(Error::InvalidTimeScale(format!(
                            "segments ending at {} and starting at {} overlap or are out of order",
                            prev.end(),
                            seg.start()
                        )));
                    }
                    _ => {}
                }
            }
            merged.push(seg);
        }
        let end = merged.last().map(Segment::end).unwrap_or_default();
        match tail {
            Tail::Uniform { step } if !(step > 0.0 && step.is_finite()) => {
                return Err(Error::InvalidTimeScale(format!("uniform step {step} must be positive")));
            }
            Tail::Geometric { ratio } if !(ratio > 1.0 && ratio.is_finite()) => {
                return Err(Error::InvalidTimeScale(format!("geometric ratio {ratio} must exceed 1")));
            }
            Tail::Geometric { .. } if end <= 0.0 => {
                return Err(Error::InvalidTimeScale(format!(
                    "a geometric tail needs a positive base, window ends at {end}"
                )));
            }
            _ => {}
        }
        Ok(TimeScale { segments: merged, tail })
    }

    /// `start + step * Z_{>=0}`.
    pub fn uniform(start: f64, step: f64) -> Result<Self> {
        Self::new(vec![Segment::Point(start)], Tail::Uniform { step })
    }

    /// The integers from `start` on.
    pub fn integers(start: f64) -> Self {
        Self::uniform(start, 1.0).expect("unit step is valid")
    }

    /// `[start, inf)`.
    pub fn reals(start: f64) -> Self {
        Self::new(vec![Segment::Point(start)], Tail::Continuous).expect("valid")
    }

    /// `{base * ratio^k : k >= 0}`.
    pub fn geometric(base: f64, ratio: f64) -> Result<Self> {
        Self::new(vec![Segment::Point(base)], Tail::Geometric { ratio })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn window_start(&self) -> f64 {
        self.segments[0].start()
    }

    pub fn window_end(&self) -> f64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn is_unbounded(&self) -> bool {
        self.tail != Tail::WindowOnly
    }

    pub(crate) fn require_unbounded(&self) -> Result<()> {
        if self.is_unbounded() {
            Ok(())
        } else {
            Err(Error::UnboundedWindowOnly)
        }
    }

    fn tail_successor(&self) -> f64 {
        let end = self.window_end();
        match self.tail {
            Tail::Continuous | Tail::WindowOnly => end,
            Tail::Uniform { step } => end + step,
            Tail::Geometric { ratio } => end * ratio,
        }
    }

    fn next_start(&self, i: usize) -> f64 {
        match self.segments.get(i + 1) {
            Some(seg) => seg.start(),
            None => self.tail_successor(),
        }
    }

    /// Canonical representative of `t` and its forward jump, or `None` when
    /// `t` is not a point of the time scale.
    pub(crate) fn resolve(&self, t: f64) -> Option<(f64, f64)> {
        if !t.is_finite() {
            return None;
        }
        let tol = tol_at(t);
        let end = self.window_end();
        if (t - end).abs() <= tol {
            return Some((end, self.tail_successor()));
        }
        if t < end {
            let idx = self.segments.partition_point(|seg| seg.start() <= t + tol);
            if idx == 0 {
                return None;
            }
            let i = idx - 1;
            return match self.segments[i] {
                Segment::Dense { start, end: e } => {
                    if t < e - tol {
                        let c = t.max(start);
                        Some((c, c))
                    } else if (t - e).abs() <= tol {
                        Some((e, self.next_start(i)))
                    } else {
                        None
                    }
                }
                Segment::Point(p) => {
                    if (t - p).abs() <= tol {
                        Some((p, self.next_start(i)))
                    } else {
                        None
                    }
                }
            };
        }
        match self.tail {
            Tail::Continuous => Some((t, t)),
            Tail::Uniform { step } => {
                let k = ((t - end) / step).round();
                let p = end + k * step;
                ((p - t).abs() <= tol).then_some((p, end + (k + 1.0) * step))
            }
            Tail::Geometric { ratio } => {
                let k = ((t / end).ln() / ratio.ln()).round();
                let p = end * ratio.powf(k);
                ((p - t).abs() <= tol).then(|| (p, end * ratio.powf(k + 1.0)))
            }
            Tail::WindowOnly => None,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.resolve(t).is_some()
    }

    /// Validates `t` and returns its canonical representative.
    pub fn point(&self, t: f64) -> Result<TimePoint> {
        self.resolve(t).map(|(c, _)| TimePoint(c)).ok_or(Error::NotInTimeScale { t })
    }

    /// Forward jump operator: `inf (t, inf)_T`, or `t` when right-dense.
    pub fn sigma(&self, t: f64) -> Result<TimePoint> {
        self.resolve(t).map(|(_, s)| TimePoint(s)).ok_or(Error::NotInTimeScale { t })
    }

    pub fn graininess(&self, t: f64) -> Result<f64> {
        self.resolve(t).map(|(c, s)| s - c).ok_or(Error::NotInTimeScale { t })
    }

    /// `inf { mu(t) : t in [s, inf)_T }`.
    pub fn min_graininess(&self, s: f64) -> Result<f64> {
        self.point(s)?;
        self.require_unbounded()?;
        Ok(self.grain_set(s)?.inf())
    }

    /// Infimum and supremum of the graininess on `[s, inf)_T`.
    pub fn mu_range(&self, s: f64) -> Result<(f64, f64)> {
        let g = self.grain_set(s)?;
        Ok((g.inf(), g.sup()))
    }

    pub(crate) fn grain_set(&self, s: f64) -> Result<GrainSet> {
        let s = self.point(s)?.value();
        let end = self.window_end();
        let mut g = GrainSet::default();
        let note = |mu: f64, g: &mut GrainSet| {
            if !g.finite.contains(&mu) {
                g.finite.push(mu);
            }
        };
        for run in self.runs(s, end) {
            match run {
                Run::Dense { .. } => g.dense = true,
                Run::Lattice { step, .. } => note(step, &mut g),
            }
        }
        match self.tail {
            Tail::Continuous => g.dense = true,
            Tail::Uniform { step } => note(step, &mut g),
            Tail::Geometric { ratio } => {
                let base = s.max(end);
                g.geometric = Some(((ratio - 1.0) * base, ratio));
            }
            Tail::WindowOnly => g.dense = true,
        }
        Ok(g)
    }

    /// Partition of `[a, b)_T` into scattered points and maximal dense
    /// subintervals, in increasing order.
    pub fn enumerate(&self, a: f64, b: f64) -> Result<Vec<Piece>> {
        let a = self.point(a)?.value();
        let b = self.point(b)?.value();
        if a > b {
            return Err(Error::EmptyRange { a, b });
        }
        let mut out = Vec::new();
        for run in self.runs(a, b) {
            match run {
                Run::Dense { start, end } => out.push(Piece::Dense { start, end }),
                Run::Lattice { origin, step, k0, k1 } => {
                    for k in k0..k1 {
                        out.push(Piece::Scattered {
                            t: TimePoint(lattice_point(origin, step, k)),
                            mu: step,
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Compressed partition of `[a, b)_T`; `a` and `b` are assumed to be
    /// canonical points with `a <= b`.
    pub(crate) fn runs(&self, a: f64, b: f64) -> Vec<Run> {
        let mut out = Vec::new();
        if b.is_nan() || a.is_nan() || b <= a {
            return out;
        }
        let end = self.window_end();
        let tol_a = tol_at(a);
        let tol_b = tol_at(b);
        let n = self.segments.len();
        if a < end {
            let first = self.segments.partition_point(|seg| seg.end() < a - tol_a);
            for i in first..n {
                let seg = self.segments[i];
                if seg.start() >= b - tol_b {
                    break;
                }
                if let Segment::Dense { start, end: e } = seg {
                    let lo = start.max(a);
                    let hi = e.min(b);
                    if hi > lo {
                        push_dense(&mut out, lo, hi);
                    }
                }
                let e = seg.end();
                if i + 1 < n && e >= a - tol_a && e < b - tol_b {
                    out.push(Run::single(e, self.segments[i + 1].start() - e));
                }
            }
        }
        match self.tail {
            Tail::Continuous => {
                let lo = a.max(end);
                if b > lo {
                    push_dense(&mut out, lo, b);
                }
            }
            Tail::Uniform { step } => {
                let k0 = ((a - end) / step - 1e-9).ceil().max(0.0) as u64;
                let k1 = ((b - end) / step - 1e-9).ceil().max(0.0) as u64;
                if k1 > k0 {
                    out.push(Run::Lattice { origin: end, step, k0, k1 });
                }
            }
            Tail::Geometric { ratio } => {
                let mut k = if a <= end {
                    0.0
                } else {
                    ((a / end).ln() / ratio.ln() - 1e-9).ceil()
                };
                loop {
                    let p = end * ratio.powf(k);
                    if p >= b - tol_b {
                        break;
                    }
                    let next = end * ratio.powf(k + 1.0);
                    out.push(Run::single(p, next - p));
                    k += 1.0;
                }
            }
            Tail::WindowOnly => {}
        }
        out
    }

    /// Smallest point of the time scale that is `>= x`.
    pub fn snap_up(&self, x: f64) -> Option<f64> {
        let end = self.window_end();
        if x <= end {
            if x <= self.window_start() {
                return Some(self.window_start());
            }
            let idx = self.segments.partition_point(|seg| seg.end() < x);
            return Some(match self.segments[idx] {
                Segment::Dense { start, .. } => start.max(x),
                Segment::Point(p) => p,
            });
        }
        match self.tail {
            Tail::Continuous => Some(x),
            Tail::Uniform { step } => Some(end + ((x - end) / step - 1e-9).ceil() * step),
            Tail::Geometric { ratio } => {
                Some(end * ratio.powf(((x / end).ln() / ratio.ln() - 1e-9).ceil()))
            }
            Tail::WindowOnly => None,
        }
    }

    /// Maximal dense interval `[lo, hi]` around a right-dense point `t`; `hi`
    /// is infinite on a continuous tail.
    pub(crate) fn dense_component(&self, t: f64) -> Option<(f64, f64)> {
        let (c, sigma) = self.resolve(t)?;
        if sigma != c {
            return None;
        }
        let end = self.window_end();
        let continuous = self.tail == Tail::Continuous;
        let last_dense_start = match self.segments[self.segments.len() - 1] {
            Segment::Dense { start, .. } => start,
            Segment::Point(p) => p,
        };
        if c >= end {
            return continuous.then_some((last_dense_start, f64::INFINITY));
        }
        let idx = self.segments.partition_point(|seg| seg.start() <= c);
        match self.segments[idx - 1] {
            Segment::Dense { start, end: e } => {
                if e == end && continuous {
                    Some((start, f64::INFINITY))
                } else {
                    Some((start, e))
                }
            }
            Segment::Point(_) => None,
        }
    }
}

fn push_dense(out: &mut Vec<Run>, lo: f64, hi: f64) {
    if let Some(Run::Dense { end, .. }) = out.last_mut() {
        if *end == lo {
            *end = hi;
            return;
        }
    }
    out.push(Run::Dense { start: lo, end: hi });
}

impl fmt::Display for TimeScale {
    /// Writes the line-oriented description format accepted by [`FromStr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "window {} {}", self.window_start(), self.window_end())?;
        let mut points = Vec::new();
        for seg in &self.segments {
            match *seg {
                Segment::Dense { start, end } => writeln!(f, "interval {start} {end}")?,
                Segment::Point(p) => points.push(p.to_string()),
            }
        }
        if !points.is_empty() {
            writeln!(f, "points {}", points.join(" "))?;
        }
        match self.tail {
            Tail::Continuous => writeln!(f, "tail continuous"),
            Tail::Uniform { step } => writeln!(f, "tail uniform {step}"),
            Tail::Geometric { ratio } => writeln!(f, "tail geometric {ratio}"),
            Tail::WindowOnly => writeln!(f, "tail none"),
        }
    }
}

impl FromStr for TimeScale {
    type Err = Error;

    /// Parses the line-oriented description format:
    ///
    /// ```text
    /// window <start> <end>
    /// interval <a> <b>        # repeatable
    /// points <t1> <t2> ...    # repeatable
    /// tail continuous | uniform <h> | geometric <q> | none
    /// ```
    fn from_str(text: &str) -> Result<Self> {
        let mut window: Option<(usize, f64, f64)> = None;
        let mut tail: Option<(usize, Tail)> = None;
        let mut entries: Vec<(usize, Segment)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut words = content.split_whitespace();
            let keyword = words.next().unwrap_or_default();
            let args: Vec<&str> = words.collect();
            let err = |message: String| Error::Parse { line, message };
            let num = |w: &str| -> Result<f64> {
                w.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(format!("`{w}` is not a finite number")))
            };
            match keyword {
                "window" => {
                    if window.is_some() {
                        return Err(err("duplicate `window` line".into()));
                    }
                    if args.len() != 2 {
                        return Err(err("expected `window <start> <end>`".into()));
                    }
                    let (a, b) = (num(args[0])?, num(args[1])?);
                    if a > b {
                        return Err(err(format!("window start {a} exceeds end {b}")));
                    }
                    window = Some((line, a, b));
                }
                "interval" => {
                    if args.len() != 2 {
                        return Err(err("expected `interval <a> <b>`".into()));
                    }
                    let (a, b) = (num(args[0])?, num(args[1])?);
                    if a >= b {
                        return Err(err(format!("interval [{a}, {b}] has no interior")));
                    }
                    entries.push((line, Segment::Dense { start: a, end: b }));
                }
                "points" => {
                    if args.is_empty() {
                        return Err(err("`points` needs at least one value".into()));
                    }
                    for w in args {
                        entries.push((line, Segment::Point(num(w)?)));
                    }
                }
                "tail" => {
                    if tail.is_some() {
                        return Err(err("duplicate `tail` line".into()));
                    }
                    let t = match args.as_slice() {
                        ["continuous"] => Tail::Continuous,
                        ["none"] => Tail::WindowOnly,
                        ["uniform", h] => Tail::Uniform { step: num(h)? },
                        ["geometric", q] => Tail::Geometric { ratio: num(q)? },
                        _ => {
                            return Err(err(
                                "expected `tail continuous | uniform <h> | geometric <q> | none`"
                                    .into(),
                            ))
                        }
                    };
                    tail = Some((line, t));
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }

        let (wline, ws, we) = window.ok_or(Error::Parse {
            line: 0,
            message: "missing `window` line".into(),
        })?;
        let (tline, tail) = tail.ok_or(Error::Parse {
            line: 0,
            message: "missing `tail` line".into(),
        })?;
        for &(line, seg) in &entries {
            if seg.start() < ws || seg.end() > we {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "entry [{}, {}] lies outside the window [{ws}, {we}]",
                        seg.start(),
                        seg.end()
                    ),
                });
            }
        }
        entries.sort_by(|x, y| x.1.start().total_cmp(&y.1.start()));
        for pair in entries.windows(2) {
            let (prev, next) = (pair[0].1, pair[1].1);
            let touching_dense = matches!(
                (prev, next),
                (Segment::Dense { .. }, Segment::Dense { .. })
            ) && prev.end() == next.start();
            if prev.end() >= next.start() && !touching_dense {
                return Err(Error::Parse {
                    line: pair[1].0.max(pair[0].0),
                    message: format!(
                        "entry starting at {} overlaps the entry ending at {}",
                        next.start(),
                        prev.end()
                    ),
                });
            }
        }
        let segs: Vec<Segment> = entries.into_iter().map(|(_, s)| s).collect();
        if segs.first().map(Segment::start) != Some(ws) || segs.last().map(Segment::end) != Some(we)
        {
            return Err(Error::Parse {
                line: wline,
                message: format!("both window endpoints {ws} and {we} must be points of the time scale"),
            });
        }
        TimeScale::new(segs, tail).map_err(|e| Error::Parse {
            line: tline,
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed() -> TimeScale {
        // [0, 1] followed by the integers from 1 on
        TimeScale::new(vec![Segment::Dense { start: 0.0, end: 1.0 }], Tail::Uniform { step: 1.0 })
            .unwrap()
    }

    #[test]
    fn membership() {
        let ts = mixed();
        assert!(ts.contains(0.5));
        assert!(!ts.contains(1.5));
        assert!(ts.contains(7.0));
        assert!(!ts.contains(-0.5));
        assert!(ts.contains(1.0 + 1e-13));
    }

    #[test]
    fn jumps_and_graininess() {
        let z = TimeScale::integers(0.0);
        assert_eq!(z.sigma(3.0).unwrap().value(), 4.0);
        assert_eq!(z.graininess(3.0).unwrap(), 1.0);

        let ts = mixed();
        assert_eq!(ts.sigma(0.5).unwrap().value(), 0.5);
        assert_eq!(ts.graininess(0.5).unwrap(), 0.0);
        assert_eq!(ts.sigma(1.0).unwrap().value(), 2.0);

        let g = TimeScale::geometric(1.0, 2.0).unwrap();
        assert_eq!(g.sigma(4.0).unwrap().value(), 8.0);
        assert_eq!(g.graininess(4.0).unwrap(), 4.0);
        assert_eq!(g.sigma(3.0), Err(Error::NotInTimeScale { t: 3.0 }));
    }

    #[test]
    fn minimal_graininess() {
        assert_eq!(TimeScale::integers(0.0).min_graininess(0.0).unwrap(), 1.0);
        assert_eq!(mixed().min_graininess(0.0).unwrap(), 0.0);
        assert_eq!(mixed().min_graininess(1.0).unwrap(), 1.0);
        let g = TimeScale::geometric(1.0, 2.0).unwrap();
        assert_eq!(g.min_graininess(1.0).unwrap(), 1.0);
        assert_eq!(g.min_graininess(8.0).unwrap(), 8.0);

        let bounded = TimeScale::new(vec![Segment::Point(0.0), Segment::Point(1.0)], Tail::WindowOnly)
            .unwrap();
        assert_eq!(bounded.min_graininess(0.0), Err(Error::UnboundedWindowOnly));
    }

    #[test]
    fn mu_ranges() {
        assert_eq!(TimeScale::integers(0.0).mu_range(0.0).unwrap(), (1.0, 1.0));
        assert_eq!(mixed().mu_range(0.0).unwrap(), (0.0, 1.0));
        let (lo, hi) = TimeScale::geometric(1.0, 2.0).unwrap().mu_range(1.0).unwrap();
        assert_eq!(lo, 1.0);
        assert!(hi.is_infinite());
    }

    #[test]
    fn enumeration() {
        let z = TimeScale::integers(0.0);
        let pieces = z.enumerate(0.0, 3.0).unwrap();
        assert_eq!(pieces.len(), 3);
        for (k, p) in pieces.iter().enumerate() {
            assert_eq!(*p, Piece::Scattered { t: TimePoint(k as f64), mu: 1.0 });
        }

        let pieces = mixed().enumerate(0.0, 3.0).unwrap();
        assert_eq!(
            pieces,
            vec![
                Piece::Dense { start: 0.0, end: 1.0 },
                Piece::Scattered { t: TimePoint(1.0), mu: 1.0 },
                Piece::Scattered { t: TimePoint(2.0), mu: 1.0 },
            ]
        );

        let g = TimeScale::geometric(1.0, 2.0).unwrap();
        let mus: Vec<_> = g
            .enumerate(1.0, 8.0)
            .unwrap()
            .into_iter()
            .map(|p| match p {
                Piece::Scattered { t, mu } => (t.value(), mu),
                _ => panic!("dense piece on a geometric scale"),
            })
            .collect();
        assert_eq!(mus, vec![(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)]);

        assert!(matches!(z.enumerate(3.0, 1.0), Err(Error::EmptyRange { .. })));
        assert!(matches!(z.enumerate(0.5, 1.0), Err(Error::NotInTimeScale { .. })));
    }

    #[test]
    fn touching_intervals_merge() {
        let ts = TimeScale::new(
            vec![
                Segment::Dense { start: 0.0, end: 1.0 },
                Segment::Dense { start: 1.0, end: 2.0 },
                Segment::Point(3.0),
            ],
            Tail::WindowOnly,
        )
        .unwrap();
        assert_eq!(ts.segments().len(), 2);
        assert_eq!(ts.graininess(2.0).unwrap(), 1.0);
        assert_eq!(ts.graininess(1.0).unwrap(), 0.0);
        assert!(TimeScale::new(
            vec![Segment::Dense { start: 0.0, end: 1.0 }, Segment::Point(1.0)],
            Tail::WindowOnly
        )
        .is_err());
    }

    #[test]
    fn dense_components() {
        let ts = mixed();
        assert_eq!(ts.dense_component(0.5), Some((0.0, 1.0)));
        assert_eq!(ts.dense_component(2.0), None);
        let r = TimeScale::new(vec![Segment::Dense { start: 0.0, end: 1.0 }], Tail::Continuous).unwrap();
        assert_eq!(r.dense_component(0.5), Some((0.0, f64::INFINITY)));
        assert_eq!(r.dense_component(3.0), Some((0.0, f64::INFINITY)));
        assert_eq!(TimeScale::reals(0.0).dense_component(0.0), Some((0.0, f64::INFINITY)));
    }

    #[test]
    fn snapping() {
        let g = TimeScale::geometric(1.0, 2.0).unwrap();
        assert_eq!(g.snap_up(5.0), Some(8.0));
        assert_eq!(g.snap_up(8.0), Some(8.0));
        assert_eq!(mixed().snap_up(1.5), Some(2.0));
        assert_eq!(mixed().snap_up(0.25), Some(0.25));
    }

    #[test]
    fn parse_round_trip() {
        let text = "# mixed scale\nwindow 0 4\ninterval 0 1\npoints 2 2.5 # comment\ninterval 3 4\ntail uniform 0.5\n";
        let ts: TimeScale = text.parse().unwrap();
        assert_eq!(ts.graininess(1.0).unwrap(), 1.0);
        assert_eq!(ts.graininess(2.5).unwrap(), 0.5);
        assert_eq!(ts.graininess(4.0).unwrap(), 0.5);
        let again: TimeScale = ts.to_string().parse().unwrap();
        assert_eq!(again, ts);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let overlap = "window 0 3\ninterval 0 2\npoints 1.5 3\ntail none\n";
        assert!(matches!(overlap.parse::<TimeScale>(), Err(Error::Parse { line: 3, .. })));
        let outside = "window 0 3\ninterval 0 2\npoints 3 5\ntail none\n";
        assert!(matches!(outside.parse::<TimeScale>(), Err(Error::Parse { line: 3, .. })));
        let bad_tail = "window 0 0\npoints 0\ntail geometric 2\n";
        assert!(matches!(bad_tail.parse::<TimeScale>(), Err(Error::Parse { line: 3, .. })));
        let junk = "window 0 1\ninterval 0 1\ntail sideways\n";
        assert!(matches!(junk.parse::<TimeScale>(), Err(Error::Parse { line: 3, .. })));
    }
}
