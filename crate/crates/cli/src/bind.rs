//! Evaluation of a parsed expression on a time scale.

use std::sync::Mutex;

use num_complex::Complex64;
use tscalc::timescale::MEMBERSHIP_TOL;
use tscalc::{exp_const, GridFunction, MonomialTable, TimeScale};

use crate::expr::{Expr, Func};

/// An expression together with its time scale and base point `s`.
pub struct BoundExpr {
    expr: Expr,
    ts: TimeScale,
    s: f64,
    monomials: Option<MonomialTable>,
    /// First evaluation failure, reported after the fact.
    failure: Mutex<Option<String>>,
}

impl BoundExpr {
    pub fn new(expr: Expr, ts: &TimeScale, s: f64) -> tscalc::Result<Self> {
        let s = ts.point(s)?.value();
        let monomials = match expr.max_hk() {
            Some(n) => Some(MonomialTable::new(ts, s, n as usize)?),
            None => None,
        };
        Ok(BoundExpr { expr, ts: ts.clone(), s, monomials, failure: Mutex::new(None) })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Message of the first point where evaluation failed, if any.
    pub fn failure(&self) -> Option<String> {
        self.failure.lock().map(|f| f.clone()).unwrap_or(None)
    }

    fn record(&self, message: String) -> Complex64 {
        if let Ok(mut slot) = self.failure.lock() {
            slot.get_or_insert(message);
        }
        Complex64::new(f64::NAN, f64::NAN)
    }

    fn eval(&self, e: &Expr, t: f64, with_points: bool) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match e {
            Expr::Num(v) => Complex64::new(*v, 0.0),
            Expr::T => Complex64::new(t, 0.0),
            Expr::I => Complex64::i(),
            Expr::Neg(a) => -self.eval(a, t, with_points),
            Expr::Add(a, b) => self.eval(a, t, with_points) + self.eval(b, t, with_points),
            Expr::Sub(a, b) => self.eval(a, t, with_points) - self.eval(b, t, with_points),
            Expr::Mul(a, b) => self.eval(a, t, with_points) * self.eval(b, t, with_points),
            Expr::Div(a, b) => self.eval(a, t, with_points) / self.eval(b, t, with_points),
            Expr::Pow(a, p) => {
                let base = self.eval(a, t, with_points);
                if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                    base.powi(*p as i32)
                } else {
                    base.powf(*p)
                }
            }
            Expr::Call(func, a) => {
                let v = self.eval(a, t, with_points);
                match func {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                }
            }
            Expr::Hk(n) => match self.monomials.as_ref().map(|m| m.value(*n as usize, t)) {
                Some(Ok(v)) => Complex64::new(v, 0.0),
                Some(Err(err)) => self.record(format!("hk({n}) at t = {t}: {err}")),
                None => self.record("monomial table missing".into()),
            },
            Expr::Ets(c) | Expr::EtsInv(c) => match exp_const(&self.ts, *c, t, self.s) {
                Ok(v) if matches!(e, Expr::Ets(_)) => v,
                Ok(v) => one / v,
                Err(err) => self.record(format!("{e} at t = {t}: {err}")),
            },
            Expr::Chi(a, b) => {
                if *a <= t && t < *b {
                    one
                } else {
                    zero
                }
            }
            Expr::Ind(a) => {
                if with_points && (t - a).abs() <= MEMBERSHIP_TOL * a.abs().max(1.0) {
                    one
                } else {
                    zero
                }
            }
        }
    }
}

impl GridFunction for BoundExpr {
    fn value(&self, t: f64, _mu: f64) -> Complex64 {
        self.eval(&self.expr, t, true)
    }

    /// Point indicators carry no mass inside dense stretches.
    fn dense_value(&self, t: f64) -> Complex64 {
        self.eval(&self.expr, t, false)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.expr.breakpoints()
    }
}
