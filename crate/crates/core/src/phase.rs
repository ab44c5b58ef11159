//! Damped Newton solvers for the implicit Riemann-invariant equations.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PHASE_TOL: f64 = 1e-12;
pub const MAX_ITER: usize = 50;
pub const CATASTROPHE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSolve {
    pub r: f64,
    /// Derivative of the residual with respect to `r` at the root.
    pub phi: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Jacobian of the two phase residuals with respect to `(s, r)`.
pub type PhiMatrix = Matrix2<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSolve2 {
    pub s: f64,
    pub r: f64,
    pub phi: PhiMatrix,
    pub iterations: usize,
}

fn fd_step(x: f64) -> f64 {
    1e-6 * (1.0 + x.abs())
}

/// Solve `F(r) = 0` for a scalar residual by damped Newton.
pub fn newton1<F: Fn(f64) -> Result<f64>>(f: F, guess: f64) -> Result<PhaseSolve> {
    let deriv = |r: f64| -> Result<f64> {
        let h = fd_step(r);
        Ok((f(r + h)? - f(r - h)?) / (2.0 * h))
    };
    let mut r = guess;
    let mut fr = f(r)?;
    for it in 0..MAX_ITER {
        let d = deriv(r)?;
        if !d.is_finite() || d.abs() < CATASTROPHE {
            return Err(Error::GradientCatastrophe { phi: d });
        }
        if fr.abs() <= PHASE_TOL {
            // one polishing step so that finite differences of r see roundoff only
            let cand = r - fr / d;
            if let Ok(fc) = f(cand) {
                if fc.abs() <= fr.abs() {
                    r = cand;
                }
            }
            return Ok(PhaseSolve { r, phi: d, iterations: it, converged: true });
        }
        let step = fr / d;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = r - lambda * step;
            if let Ok(fc) = f(cand) {
                if fc.is_finite() && fc.abs() < fr.abs() {
                    r = cand;
                    fr = fc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if fr.abs() <= PHASE_TOL {
        let d = deriv(r)?;
        return Ok(PhaseSolve { r, phi: d, iterations: MAX_ITER, converged: true });
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, residual: fr.abs() })
}

/// Solve `F(s, r) = 0` for two residuals by damped Newton.
pub fn newton2<F: Fn(f64, f64) -> Result<[f64; 2]>>(f: F, guess: (f64, f64)) -> Result<PhaseSolve2> {
    let jac = |s: f64, r: f64| -> Result<PhiMatrix> {
        let hs = fd_step(s);
        let hr = fd_step(r);
        let a = f(s + hs, r)?;
        let b = f(s - hs, r)?;
        let c = f(s, r + hr)?;
        let d = f(s, r - hr)?;
        Ok(PhiMatrix::new(
            (a[0] - b[0]) / (2.0 * hs),
            (c[0] - d[0]) / (2.0 * hr),
            (a[1] - b[1]) / (2.0 * hs),
            (c[1] - d[1]) / (2.0 * hr),
        ))
    };
    let norm = |v: [f64; 2]| v[0].abs().max(v[1].abs());
    let (mut s, mut r) = guess;
    let mut fv = f(s, r)?;
    for it in 0..MAX_ITER {
        let j = jac(s, r)?;
        let det = j.determinant();
        if !det.is_finite() || det.abs() < CATASTROPHE {
            return Err(Error::GradientCatastrophe { phi: det });
        }
        let inv = j.try_inverse().ok_or(Error::GradientCatastrophe { phi: det })?;
        let ds = inv[(0, 0)] * fv[0] + inv[(0, 1)] * fv[1];
        let dr = inv[(1, 0)] * fv[0] + inv[(1, 1)] * fv[1];
        if norm(fv) <= PHASE_TOL {
            if let Ok(fc) = f(s - ds, r - dr) {
                if norm(fc) <= norm(fv) {
                    s -= ds;
                    r -= dr;
                }
            }
            return Ok(PhaseSolve2 { s, r, phi: j, iterations: it });
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (cs, cr) = (s - lambda * ds, r - lambda * dr);
            if let Ok(fc) = f(cs, cr) {
                if norm(fc).is_finite() && norm(fc) < norm(fv) {
                    s = cs;
                    r = cr;
                    fv = fc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm(fv) <= PHASE_TOL {
        let j = jac(s, r)?;
        return Ok(PhaseSolve2 { s, r, phi: j, iterations: MAX_ITER });
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, residual: norm(fv) })
}
