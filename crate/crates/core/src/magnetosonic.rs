//! Riemann velocity of fast magnetosonic waves with the field transverse
//! to the propagation direction: `v(rho) = int c(rho)/rho d rho`, where
//! `c^2 = kappa A0 rho^(kappa-1) + rho |H0|^2` and `H = rho H0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{artanh_real, hyp2f1};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `kappa = 1`, real part of artanh.
    Isothermal,
    /// `kappa = 2`, square root law.
    Quadratic,
    /// `1 < kappa < 2`, hypergeometric in `beta0 rho^(2-kappa)`.
    HypergeometricLow,
    /// `kappa > 2`, hypergeometric in `rho^(kappa-2)/beta0`.
    HypergeometricHigh,
    /// No magnetic field: `2 a / (kappa - 1)` or `sqrt(A0) ln rho`.
    Acoustic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Magnetosonic {
    pub kappa: f64,
    pub a0: f64,
    /// Magnitude of `H0` in `H = rho H0`.
    pub h0: f64,
}

impl Magnetosonic {
    pub fn new(kappa: f64, a0: f64, h0: f64) -> Result<Self> {
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "magnetosonic velocity needs kappa >= 1, got {kappa}"
            )));
        }
        if !(a0 > 0.0 && a0.is_finite()) {
            return Err(Error::InvalidParameter(format!("A0 must be > 0, got {a0}")));
        }
        if !h0.is_finite() {
            return Err(Error::InvalidParameter("H0 must be finite".into()));
        }
        Ok(Self { kappa, a0, h0: h0.abs() })
    }

    pub fn beta0(&self) -> f64 {
        self.h0 * self.h0 / (self.kappa * self.a0)
    }

    pub fn branch(&self) -> Branch {
        let k = self.kappa;
        if self.h0 == 0.0 {
            Branch::Acoustic
        } else if (k - 1.0).abs() < 1e-12 {
            Branch::Isothermal
        } else if (k - 2.0).abs() < 1e-12 {
            Branch::Quadratic
        } else if k < 2.0 {
            Branch::HypergeometricLow
        } else {
            Branch::HypergeometricHigh
        }
    }

    /// Fast speed `c(rho)` for `H` orthogonal to the wave direction.
    pub fn speed(&self, rho: f64) -> f64 {
        (self.kappa * self.a0 * rho.powf(self.kappa - 1.0) + rho * self.h0 * self.h0).sqrt()
    }

    pub fn velocity(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::InvalidState(format!("density must be > 0, got {rho}")));
        }
        let k = self.kappa;
        let b0 = self.beta0();
        Ok(match self.branch() {
            Branch::Acoustic => {
                if (k - 1.0).abs() < 1e-12 {
                    self.a0.sqrt() * rho.ln()
                } else {
                    2.0 * (k * self.a0).sqrt() * rho.powf(0.5 * (k - 1.0)) / (k - 1.0)
                }
            }
            Branch::Isothermal => {
                let q = (b0 * rho + 1.0).sqrt();
                2.0 * self.a0.sqrt() * (q - artanh_real(q)?)
            }
            Branch::Quadratic => 2.0 * (2.0 * self.a0 * (1.0 + b0)).sqrt() * rho.sqrt(),
            Branch::HypergeometricHigh => {
                let m = 0.5 / (k - 2.0);
                2.0 * self.h0 * rho.sqrt() * hyp2f1(-0.5, m, 1.0 + m, -rho.powf(k - 2.0) / b0)?
            }
            Branch::HypergeometricLow => {
                let m = (k - 1.0) / (2.0 * (2.0 - k));
                2.0 * (k * self.a0).sqrt() / (k - 1.0)
                    * rho.powf(0.5 * (k - 1.0))
                    * hyp2f1(-0.5, m, 1.0 + m, -b0 * rho.powf(2.0 - k))?
            }
        })
    }

    /// Inverse of `G(rho) = 2 v(rho)` on a bracket.
    pub fn invert_double_velocity(&self, target: f64, lo: f64, hi: f64) -> Result<f64> {
        let g = |r: f64| -> Result<f64> { Ok(2.0 * self.velocity(r)? - target) };
        let (mut a, mut b) = (lo, hi);
        let (ga, gb) = (g(a)?, g(b)?);
        if ga * gb > 0.0 {
            return Err(Error::Construction(format!(
                "density inversion target {target} outside bracket [{lo}, {hi}]"
            )));
        }
        if ga == 0.0 {
            return Ok(a);
        }
        if gb == 0.0 {
            return Ok(b);
        }
        let mut x = 0.5 * (a + b);
        for _ in 0..200 {
            let gx = g(x)?;
            if gx.abs() <= 1e-15 * target.abs().max(1.0) {
                return Ok(x);
            }
            if (gx < 0.0) == (ga < 0.0) {
                a = x;
            } else {
                b = x;
            }
            let newton = x - gx / (2.0 * self.speed(x) / x);
            x = if newton > a.min(b) && newton < a.max(b) { newton } else { 0.5 * (a + b) };
            if (b - a).abs() <= 1e-16 * x.abs() {
                return Ok(x);
            }
        }
        Ok(x)
    }
}
