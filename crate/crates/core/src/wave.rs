//! Common interface of the constructed exact solutions.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::mhd::{FluidModel, State, Vec3};

/// Derived vector fields that some constructions know in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `(H . grad) H - grad |H|^2 / 2`
    LorentzForce,
    /// `curl v`
    Vorticity,
    /// `curl H`
    Current,
}

/// An exact solution that can be evaluated pointwise.
pub trait Solution: Send + Sync {
    /// Family tag such as `E1` or `FF_planar`.
    fn tag(&self) -> &str;
    fn fluid(&self) -> FluidModel;
    /// Upper bound for the rank of the Jacobian of the solution.
    fn rank_bound(&self) -> usize;
    fn evaluate(&self, t: f64, x: &Vec3) -> Result<State>;
    /// Closed-form value of a derived field, if the construction gives one.
    fn closed_form(&self, _q: Quantity, _t: f64, _x: &Vec3) -> Option<Result<Vec3>> {
        None
    }
    /// Constants, validity window and construction diagnostics.
    fn manifest(&self) -> Value;
}

/// Range of the Riemann invariant on which density and pressure stay positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityWindow {
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    pub rho_min: f64,
    pub p_min: f64,
    pub valid: bool,
}

pub const WINDOW_SAMPLES: usize = 1024;

impl ValidityWindow {
    /// Sample `state(r)` at `WINDOW_SAMPLES` points of `[a, b]`.
    pub fn scan<F: Fn(f64) -> Result<State>>(a: f64, b: f64, state: F) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidParameter(format!("window needs max > min, got [{a}, {b}]")));
        }
        let mut rho_min = f64::INFINITY;
        let mut p_min = f64::INFINITY;
        let mut finite = true;
        for i in 0..WINDOW_SAMPLES {
            let r = a + (b - a) * i as f64 / (WINDOW_SAMPLES - 1) as f64;
            let u = state(r)?;
            finite &= u.is_finite();
            rho_min = rho_min.min(u.rho);
            p_min = p_min.min(u.p);
        }
        Ok(Self {
            r_min: a,
            r_max: b,
            samples: WINDOW_SAMPLES,
            rho_min,
            p_min,
            valid: finite && rho_min > 0.0 && p_min > 0.0,
        })
    }

    pub fn require(&self, what: &str) -> Result<()> {
        if self.valid {
            Ok(())
        } else {
            Err(Error::Construction(format!(
                "{what}: density or pressure not positive on [{}, {}] (min rho {}, min p {})",
                self.r_min, self.r_max, self.rho_min, self.p_min
            )))
        }
    }
}

pub(crate) fn default_window() -> [f64; 2] {
    [-1.0, 1.0]
}

/// Unit vector or an error naming the degenerate quantity.
pub fn unit(v: Vec3, what: &str) -> Result<Vec3> {
    let n = v.norm();
    if !(n > 1e-12) || !n.is_finite() {
        return Err(Error::Degenerate(format!("{what} vanishes")));
    }
    Ok(v / n)
}

/// Fourth-order central difference of a vector-valued function of one variable.
pub fn derivative<const N: usize, F: Fn(f64) -> Result<[f64; N]>>(f: F, r: f64) -> Result<[f64; N]> {
    let h = 1e-3 * (1.0 + r.abs());
    let (a, b, c, d) = (f(r - 2.0 * h)?, f(r - h)?, f(r + h)?, f(r + 2.0 * h)?);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h);
    }
    Ok(out)
}
