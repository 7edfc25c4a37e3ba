//! Arithmetic in the Hilger complex plane.
//!
//! Every operation takes the graininess `h >= 0` explicitly. `h = 0` is handled
//! by the closed-form limits (classical real part, identity cylinder map, plain
//! addition and scalar multiplication). Branch cuts follow the principal
//! argument in `(-pi, pi]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::timescale::TimeScale;

/// `|1 + h z|` below this counts as `1 + h z = 0`.
pub const REGRESSIVE_EPS: f64 = 1e-14;

/// Imaginary parts of magnitude at most this count as zero when deciding
/// positive regressivity.
pub const REAL_EPS: f64 = 1e-12;

#[inline]
fn one_plus(h: f64, z: Complex64) -> Complex64 {
    Complex64::new(1.0 + h * z.re, h * z.im)
}

fn checked_one_plus(h: f64, z: Complex64) -> Result<Complex64> {
    let w = one_plus(h, z);
    if h > 0.0 && w.norm() < REGRESSIVE_EPS {
        return Err(Error::NotRegressive { z, eta: None });
    }
    Ok(w)
}

/// Principal argument with range `(-pi, pi]`.
pub(crate) fn principal_arg(w: Complex64) -> f64 {
    if w.im == 0.0 && w.re < 0.0 {
        PI
    } else {
        w.im.atan2(w.re)
    }
}

/// `ln |1 + h z|` without cancellation for small `h z`.
fn ln_abs_one_plus(h: f64, z: Complex64) -> f64 {
    0.5 * (h * (2.0 * z.re + h * z.norm_sqr())).ln_1p()
}

/// Principal `Log(1 + h z)`.
pub(crate) fn log_one_plus(h: f64, z: Complex64) -> Complex64 {
    Complex64::new(ln_abs_one_plus(h, z), principal_arg(one_plus(h, z)))
}

/// `exp(w) - 1` accurate for small `w`.
pub(crate) fn expm1(w: Complex64) -> Complex64 {
    let half = (0.5 * w.im).sin();
    let re = w.re.exp_m1() * w.im.cos() - 2.0 * half * half;
    let im = w.re.exp() * w.im.sin();
    Complex64::new(re, im)
}

/// Hilger real part `(|1 + h z| - 1) / h`.
pub fn hilger_re(h: f64, z: Complex64) -> Result<f64> {
    let w = checked_one_plus(h, z)?;
    if h == 0.0 {
        return Ok(z.re);
    }
    // (|w| - 1) / h = (|w|^2 - 1) / (h (|w| + 1))
    Ok((2.0 * z.re + h * z.norm_sqr()) / (w.norm() + 1.0))
}

/// Hilger imaginary part `Arg(1 + h z) / h`.
pub fn hilger_im(h: f64, z: Complex64) -> Result<f64> {
    let w = checked_one_plus(h, z)?;
    if h == 0.0 {
        return Ok(z.im);
    }
    Ok(principal_arg(w) / h)
}

/// Cylinder transformation `Log(1 + h z) / h`, landing in the strip
/// `-pi/h < Im <= pi/h`.
pub fn cylinder(h: f64, z: Complex64) -> Result<Complex64> {
    checked_one_plus(h, z)?;
    if h == 0.0 {
        return Ok(z);
    }
    Ok(log_one_plus(h, z) / h)
}

/// `z (+) w = z + w + h z w`.
pub fn cplus(h: f64, z: Complex64, w: Complex64) -> Complex64 {
    z + w + h * (z * w)
}

/// `z (-) w = (z - w) / (1 + h w)`.
pub fn cminus(h: f64, z: Complex64, w: Complex64) -> Result<Complex64> {
    let d = checked_one_plus(h, w)?;
    Ok((z - w) / d)
}

/// `(-) z = -z / (1 + h z)`.
pub fn cneg(h: f64, z: Complex64) -> Result<Complex64> {
    cminus(h, Complex64::new(0.0, 0.0), z)
}

/// `lam (.) z = ((1 + h z)^lam - 1) / h` on the principal branch.
pub fn cdot(h: f64, lam: Complex64, z: Complex64) -> Result<Complex64> {
    checked_one_plus(h, z)?;
    if h == 0.0 {
        return Ok(lam * z);
    }
    Ok(expm1(lam * log_one_plus(h, z)) / h)
}

/// A complex number paired with the graininess it lives under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilgerNumber {
    z: Complex64,
    h: f64,
}

impl HilgerNumber {
    pub fn new(z: Complex64, h: f64) -> Result<Self> {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("graininess {h} must be finite and >= 0")));
        }
        checked_one_plus(h, z)?;
        Ok(HilgerNumber { z, h })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn re(&self) -> f64 {
        hilger_re(self.h, self.z).expect("validated on construction")
    }

    pub fn im(&self) -> f64 {
        hilger_im(self.h, self.z).expect("validated on construction")
    }

    pub fn cylinder(&self) -> Complex64 {
        cylinder(self.h, self.z).expect("validated on construction")
    }

    pub fn plus(&self, other: Complex64) -> Result<Self> {
        HilgerNumber::new(cplus(self.h, self.z, other), self.h)
    }

    pub fn minus(&self, other: Complex64) -> Result<Self> {
        HilgerNumber::new(cminus(self.h, self.z, other)?, self.h)
    }

    pub fn neg(&self) -> Self {
        let z = cneg(self.h, self.z).expect("validated on construction");
        HilgerNumber { z, h: self.h }
    }

    pub fn scale(&self, lam: Complex64) -> Result<Self> {
        HilgerNumber::new(cdot(self.h, lam, self.z)?, self.h)
    }
}

/// The set `C_h(lambda) = { z : Re_h(z) > lambda }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub h: f64,
    pub lambda: f64,
}

impl RegionSpec {
    pub fn contains(&self, z: Complex64) -> Result<bool> {
        in_region(*self, z)
    }
}

pub fn in_region(region: RegionSpec, z: Complex64) -> Result<bool> {
    Ok(hilger_re(region.h, z)? > region.lambda)
}

/// `1 + z mu(t) != 0` for every `t` in `[s, inf)_T`.
pub fn is_regressive(ts: &TimeScale, s: f64, z: Complex64) -> Result<bool> {
    let grains = ts.grain_set(s)?;
    let hits = |mu: f64| mu > 0.0 && one_plus(mu, z).norm() < REGRESSIVE_EPS;
    if grains.finite.iter().any(|&mu| hits(mu)) {
        return Ok(false);
    }
    if let Some((first, ratio)) = grains.geometric {
        // graininess values first * ratio^k; only a negative real z can hit -1/mu
        if z.im.abs() <= REAL_EPS && z.re < 0.0 {
            let k = ((-1.0 / (z.re * first)).ln() / ratio.ln()).round();
            if k >= 0.0 && hits(first * ratio.powf(k)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `1 + z mu(t)` is real and positive for every `t` in `[s, inf)_T`.
pub fn is_pos_regressive(ts: &TimeScale, s: f64, z: Complex64) -> Result<bool> {
    let grains = ts.grain_set(s)?;
    if !grains.has_scattered() {
        return Ok(true);
    }
    if z.im.abs() > REAL_EPS {
        return Ok(false);
    }
    let sup = grains.sup();
    if sup.is_infinite() {
        return Ok(z.re >= 0.0);
    }
    Ok(1.0 + z.re * sup > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::TimeScale;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_and_imaginary_parts() {
        assert_eq!(hilger_re(0.0, c(3.0, 4.0)).unwrap(), 3.0);
        assert!((hilger_re(1.0, c(0.0, 1.0)).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(hilger_re(1.0, c(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(hilger_im(0.0, c(3.0, 4.0)).unwrap(), 4.0);
        assert!((hilger_im(1.0, c(0.0, 1.0)).unwrap() - PI / 4.0).abs() < 1e-15);
        assert_eq!(hilger_im(1.0, c(1.0, 0.0)).unwrap(), 0.0);
        assert!(matches!(hilger_re(1.0, c(-1.0, 0.0)), Err(Error::NotRegressive { .. })));
    }

    #[test]
    fn negative_axis_maps_to_pi() {
        // 1 + h z = -1 with a negative-zero imaginary part
        assert_eq!(hilger_im(1.0, c(-2.0, -0.0)).unwrap(), PI);
        assert_eq!(cylinder(1.0, c(-2.0, -0.0)).unwrap().im, PI);
    }

    #[test]
    fn cylinder_values() {
        assert_eq!(cylinder(0.0, c(2.0, 1.0)).unwrap(), c(2.0, 1.0));
        let v = cylinder(0.5, c(2.0, 0.0)).unwrap();
        assert!((v.re - 2.0 * 2f64.ln()).abs() < 1e-15 && v.im == 0.0);
        assert_eq!(cylinder(1.0, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn circle_operations() {
        assert_eq!(cplus(1.0, c(1.0, 0.0), c(1.0, 0.0)), c(3.0, 0.0));
        assert_eq!(cneg(1.0, c(1.0, 0.0)).unwrap(), c(-0.5, 0.0));
        let z = c(0.3, -2.0);
        assert_eq!(cplus(0.7, z, c(0.0, 0.0)), z);
        assert!((cdot(1.0, c(2.0, 0.0), c(1.0, 0.0)).unwrap() - c(3.0, 0.0)).norm() < 1e-15);
        assert!((cdot(0.4, c(1.0, 0.0), z).unwrap() - z).norm() < 1e-14);
        assert_eq!(cdot(0.0, c(5.0, 0.0), c(2.0, 1.0)).unwrap(), c(10.0, 5.0));
        assert!(cminus(2.0, z, c(-0.5, 0.0)).is_err());
    }

    #[test]
    fn regions() {
        let r = RegionSpec { h: 0.0, lambda: 0.0 };
        assert!(in_region(r, c(1.0, 5.0)).unwrap());
        assert!(in_region(RegionSpec { h: 1.0, lambda: 0.0 }, c(0.0, 1.0)).unwrap());
        assert!(!in_region(RegionSpec { h: 1.0, lambda: 0.5 }, c(0.0, 1.0)).unwrap());
    }

    #[test]
    fn regressivity_predicates() {
        let z = TimeScale::integers(0.0);
        assert!(!is_regressive(&z, 0.0, c(-1.0, 0.0)).unwrap());
        assert!(is_regressive(&z, 0.0, c(-2.0, 0.0)).unwrap());
        assert!(is_pos_regressive(&z, 0.0, c(-0.5, 0.0)).unwrap());
        assert!(!is_pos_regressive(&z, 0.0, c(-1.5, 0.0)).unwrap());
        assert!(!is_pos_regressive(&z, 0.0, c(0.5, 0.1)).unwrap());

        let g = TimeScale::geometric(1.0, 2.0).unwrap();
        assert!(is_pos_regressive(&g, 1.0, c(0.3, 0.0)).unwrap());
        assert!(!is_pos_regressive(&g, 1.0, c(-0.01, 0.0)).unwrap());
        // mu = 4 at t = 4, so z = -1/4 is not regressive there
        assert!(!is_regressive(&g, 1.0, c(-0.25, 0.0)).unwrap());
        assert!(is_regressive(&g, 8.0, c(-0.25, 0.0)).unwrap());

        let r = TimeScale::reals(0.0);
        assert!(is_pos_regressive(&r, 0.0, c(1.0, 3.0)).unwrap());
        assert!(is_regressive(&r, 0.0, c(-1.0, 0.0)).unwrap());
    }

    #[test]
    fn hilger_number_wraps_free_functions() {
        let x = HilgerNumber::new(c(0.0, 1.0), 1.0).unwrap();
        assert!((x.re() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let back = x.plus(x.neg().z()).unwrap();
        assert!(back.z().norm() < 1e-15);
        assert!(HilgerNumber::new(c(-1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn region_is_not_monotone_left_of_the_pole() {
        // for h = 1 the region Re_1(z) > 0 is |1 + z| > 1
        let region = RegionSpec { h: 1.0, lambda: 0.0 };
        assert!(in_region(region, c(-2.5, 0.0)).unwrap());
        assert!(!in_region(region, c(-1.5, 0.0)).unwrap());
        assert!(in_region(region, c(0.5, 0.0)).unwrap());
    }
}
