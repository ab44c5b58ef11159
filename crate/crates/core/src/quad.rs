//! Quadrature and ODE stepping helpers.

use crate::error::{Error, Result};

const GL8_X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL8_W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Composite 8-point Gauss-Legendre rule with panels no wider than `max_panel`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, max_panel: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = ((b - a).abs() / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let mid = a + (k as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for i in 0..4 {
            s += GL8_W[i] * (f(mid - half * GL8_X[i]) + f(mid + half * GL8_X[i]));
        }
        sum += s * half;
    }
    sum
}

/// Vector-valued variant of [`gauss_legendre`].
pub fn gauss_legendre_vec<const N: usize, F: Fn(f64) -> [f64; N]>(f: F, a: f64, b: f64, max_panel: f64) -> [f64; N] {
    let mut sum = [0.0; N];
    if a == b {
        return sum;
    }
    let n = ((b - a).abs() / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let half = 0.5 * h;
    for k in 0..n {
        let mid = a + (k as f64 + 0.5) * h;
        for i in 0..4 {
            let l = f(mid - half * GL8_X[i]);
            let r = f(mid + half * GL8_X[i]);
            for j in 0..N {
                sum[j] += half * GL8_W[i] * (l[j] + r[j]);
            }
        }
    }
    sum
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let v = simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter("integrand is not finite".into()))
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Classic RK4 step for a scalar ODE `y' = f(x, y)`.
pub fn rk4_step<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, h: f64) -> f64 {
    let k1 = f(x, y);
    let k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
    let k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
    let k4 = f(x + h, y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_degree_15() {
        let v = gauss_legendre(|x| x.powi(15) + x.powi(14), 0.0, 1.0, 1.0);
        assert!((v - (1.0 / 16.0 + 1.0 / 15.0)).abs() < 1e-15);
    }

    #[test]
    fn simpson_handles_smooth_integrand() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13, 50).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn rk4_integrates_exponential() {
        let mut y = 1.0;
        let h = 1e-2;
        for i in 0..100 {
            y = rk4_step(&|_x, y| y, i as f64 * h, y, h);
        }
        assert!((y - 1f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 10.0);
    }
}
