//! Gauss hypergeometric function on the real axis and a real-part artanh.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const SERIES_CAP: usize = 1000;
const SERIES_TOL: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl Hyp2F1Params {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        Self { a, b, c, z }
    }

    pub fn eval(&self) -> Result<f64> {
        hyp2f1(self.a, self.b, self.c, self.z)
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < 1e-14
}

/// `2F1(a, b; c; z)` for real `z < 1`.
///
/// Direct series for `|z| <= 1/2`; for `z < -1/2` the Pfaff transform maps
/// the argument to `w = z/(z-1)`. Arguments close to 1 are reached by
/// re-expanding the hypergeometric ODE in Taylor steps from `w = 1/2`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if ![a, b, c, z].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("2F1 arguments must be finite".into()));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::InvalidParameter(format!("2F1 undefined for c = {c}")));
    }
    if z >= 1.0 {
        return Err(Error::InvalidParameter(format!("2F1 requires z < 1, got {z}")));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if z.abs() <= 0.5 {
        return series(a, b, c, z);
    }
    if z > 0.5 {
        return continued(a, b, c, z);
    }
    let w = z / (z - 1.0);
    let pre = (1.0 - z).powf(-a);
    let inner = if w <= 0.75 { series(a, c - b, c, w)? } else { continued(a, c - b, c, w)? };
    Ok(pre * inner)
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 || (term.abs() < SERIES_TOL * sum.abs() && ratio.abs() < 1.0) {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence { iterations: SERIES_CAP, residual: term.abs() })
}

/// Evaluate at `target` in (1/2, 1) by Taylor re-expansion of
/// `w(1-w) y'' + (c - (a+b+1) w) y' - a b y = 0` starting at `w = 1/2`.
fn continued(a: f64, b: f64, c: f64, target: f64) -> Result<f64> {
    let mut w = 0.5;
    let mut y = series(a, b, c, w)?;
    let mut dy = a * b / c * series(a + 1.0, b + 1.0, c + 1.0, w)?;
    let mut steps = 0;
    while w < target {
        let dist = w.min(1.0 - w);
        let h = (target - w).min(0.5 * dist);
        let (ny, ndy) = taylor_step(a, b, c, w, y, dy, h)?;
        y = ny;
        dy = ndy;
        w = if target - w <= 0.5 * dist { target } else { w + h };
        steps += 1;
        if steps > 200 {
            return Err(Error::NoConvergence { iterations: steps, residual: 1.0 - w });
        }
    }
    Ok(y)
}

fn taylor_step(a: f64, b: f64, c: f64, w0: f64, y: f64, dy: f64, h: f64) -> Result<(f64, f64)> {
    let p0 = w0 * (1.0 - w0);
    let p1 = 1.0 - 2.0 * w0;
    let p2 = -1.0;
    let q0 = c - (a + b + 1.0) * w0;
    let q1 = -(a + b + 1.0);
    let r = -a * b;
    // scaled coefficients c_n = y_n h^n
    let mut cm = y;
    let mut cn = dy * h;
    let mut val = cm + cn;
    let mut der = cn / h;
    let mut small = 0;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        let next = -((p1 * nf + q0) * (nf + 1.0) * cn * h + (p2 * nf * (nf - 1.0) + q1 * nf + r) * cm * h * h)
            / (p0 * (nf + 2.0) * (nf + 1.0));
        val += next;
        der += (nf + 2.0) * next / h;
        cm = cn;
        cn = next;
        if next.abs() <= 1e-17 * val.abs().max(f64::MIN_POSITIVE) && ((nf + 2.0) * next / h).abs() <= 1e-17 * der.abs().max(1e-300) {
            small += 1;
            if small >= 2 {
                return Ok((val, der));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence { iterations: SERIES_CAP, residual: cn.abs() })
}

/// Euler-integral evaluation, valid for `c > b > 0` and `z < 1`.
///
/// The integral of `t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a)` over [0, 1] is taken
/// with tanh-sinh quadrature, which absorbs the endpoint singularities.
pub fn hyp2f1_oracle(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(c > b && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Euler integral needs c > b > 0, got b={b}, c={c}"
        )));
    }
    if !(z < 1.0) {
        return Err(Error::InvalidParameter(format!("Euler integral needs z < 1, got {z}")));
    }
    let e = c - b;
    // t = (1 + tanh u)/2 with u = (pi/2) sinh x, so dt = pi t (1-t) cosh x dx
    let integrand = |x: f64| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * x.sinh();
        let ln_t = -(-2.0 * u).exp().ln_1p();
        let ln_1mt = -(2.0 * u).exp().ln_1p();
        let kernel = (1.0 - z * ln_t.exp()).powf(-a);
        std::f64::consts::PI * x.cosh() * (b * ln_t + e * ln_1mt).exp() * kernel
    };
    // tails decay like exp(-pi min(b, e) sinh x); cut them below 1e-18
    let xmax = (42.0 / (std::f64::consts::PI * b.min(e))).asinh().max(3.0);
    let mut h = 0.5;
    let mut sum = integrand(0.0);
    let mut k = 1.0;
    while k * h <= xmax {
        sum += integrand(k * h) + integrand(-k * h);
        k += 1.0;
    }
    let mut est = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1.0;
        while k * h <= xmax {
            sum += integrand(k * h) + integrand(-k * h);
            k += 2.0;
        }
        let next = sum * h;
        let done = (next - est).abs() <= 1e-14 * next.abs();
        est = next;
        if done {
            break;
        }
    }
    Ok((ln_gamma(c) - ln_gamma(b) - ln_gamma(e)).exp() * est)
}

/// Real part of `artanh(x)`: `1/2 ln |(1+x)/(1-x)|`. Poles at `x = +-1`.
pub fn artanh_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter("artanh argument must be finite".into()));
    }
    if x.abs() == 1.0 {
        return Err(Error::InvalidParameter(format!("artanh has a pole at x = {x}")));
    }
    if x.abs() < 1.0 {
        Ok(x.atanh())
    } else {
        Ok(0.5 * ((x + 1.0) / (x - 1.0)).ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    // Reference values from an arbitrary-precision evaluation.
    const REFERENCE: [(f64, f64, f64, f64, f64); 10] = [
        (0.5, 0.5, 1.5, -1.0, 0.881_373_587_019_543),
        (-1.5, 0.5, -0.5, -2.0, -5.196_152_422_706_632),
        (0.3, 0.5, 1.7, -0.3, 0.976_019_785_295_919_6),
        (1.2, 0.5, 2.5, -7.0, 0.523_671_587_981_973_8),
        (-0.5, 0.25, 1.25, -50.0, 2.751_211_511_459_294),
        (-0.5, 1.0, 2.0, -49.0, 4.796_644_769_976_514),
        (0.5, 0.5, 1.5, -1e4, 0.052_983_423_656_105_89),
        (2.0, 0.5, 1.5, -0.9, 0.663_223_022_280_726_5),
        (0.7, -0.4, 0.35, -20.0, 5.001_783_638_240_014),
        (-0.5, 0.5, 1.5, -1e6, 500.004_050_451_292_3),
    ];

    #[test]
    fn matches_reference_values() {
        for &(a, b, c, z, v) in &REFERENCE {
            let f = hyp2f1(a, b, c, z).unwrap();
            assert!(rel(f, v) < 1e-11, "2F1({a},{b};{c};{z}) = {f}, expected {v}");
        }
    }

    #[test]
    fn positive_argument_continuation() {
        assert!(rel(hyp2f1(0.25, 0.5, 1.5, 0.8).unwrap(), 1.106_053_147_148_420_5) < 1e-11);
    }

    #[test]
    fn log_identity() {
        let f = hyp2f1(0.5, 0.5, 1.5, -1.0).unwrap();
        assert!((f - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_pole_in_c() {
        assert!(hyp2f1(0.5, 0.5, -2.0, -0.3).is_err());
        assert!(hyp2f1(0.5, 0.5, 1.5, 1.0).is_err());
    }

    #[test]
    fn polynomial_case_terminates() {
        // 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
        let (b, c, z) = (0.7, 1.9, -3.0);
        let exact = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!(rel(hyp2f1(-2.0, b, c, z).unwrap(), exact) < 1e-14);
    }

    #[test]
    fn oracle_domain() {
        assert!(hyp2f1_oracle(-1.5, 0.5, -0.5, -2.0).is_err());
        let v = hyp2f1_oracle(0.5, 0.5, 1.5, -1.0).unwrap();
        assert!((v - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-10);
    }

    #[test]
    fn artanh_branches() {
        assert!((artanh_real(0.5).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((artanh_real(3.0).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(artanh_real(1.0).is_err());
        assert!(artanh_real(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_euler_integral(a in -2.0f64..2.0, c in 0.6f64..3.0, z in -50.0f64..0.0) {
            let f = hyp2f1(a, 0.5, c, z).unwrap();
            let g = hyp2f1_oracle(a, 0.5, c, z).unwrap();
            prop_assert!((f - g).abs() <= 1e-9 * g.abs().max(1.0), "{f} vs {g}");
        }

        #[test]
        fn arcsinh_identity(x in 0.01f64..100.0) {
            let f = hyp2f1(0.5, 0.5, 1.5, -x).unwrap();
            let g = x.sqrt().asinh() / x.sqrt();
            prop_assert!(rel(f, g) < 1e-11);
        }
    }
}
