//! Compatibility checks of the generalized method of characteristics and
//! the numerical rank of the solution Jacobian.

use nalgebra::{SMatrix, SVector, Vector4};

use crate::double::{lstsq2, DoubleWaveSolution};
use crate::error::Result;
use crate::mhd::Vec3;
use crate::wave::{derivative, Solution};

type V8 = SVector<f64, 8>;

fn dd<F: Fn(f64, f64) -> Result<[f64; 8]>>(f: &F, s: f64, r: f64) -> Result<(V8, V8)> {
    let ds = derivative(|a| f(a, r), s)?;
    let dr = derivative(|b| f(s, b), r)?;
    Ok((V8::from(ds), V8::from(dr)))
}

/// Coordinates `(a, b)` of `y` in the basis `{u, w}` by least squares.
fn coords(u: &V8, w: &V8, y: &V8) -> (f64, f64) {
    let (uu, uw, ww) = (u.dot(u), u.dot(w), w.dot(w));
    let det = uu * ww - uw * uw;
    if det.abs() <= 1e-300 {
        return if uu > 0.0 { (u.dot(y) / uu, 0.0) } else { (0.0, 0.0) };
    }
    let (uy, wy) = (u.dot(y), w.dot(y));
    ((ww * uy - uw * wy) / det, (uu * wy - uw * uy) / det)
}

/// Largest commutator `[gamma1, gamma2]` of two tangent fields on the surface
/// `f(s, r)`, relative to `max(1, |gamma1| |gamma2|)`.
pub fn commutator_residual<F, G1, G2>(f: F, g1: G1, g2: G2, points: &[(f64, f64)]) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<[f64; 8]>,
    G1: Fn(f64, f64) -> Result<[f64; 8]>,
    G2: Fn(f64, f64) -> Result<[f64; 8]>,
{
    let mut worst = 0.0f64;
    for &(s, r) in points {
        let (fs, fr) = dd(&f, s, r)?;
        let (y1, y2) = (V8::from(g1(s, r)?), V8::from(g2(s, r)?));
        let (d1s, d1r) = dd(&g1, s, r)?;
        let (d2s, d2r) = dd(&g2, s, r)?;
        let (a1, b1) = coords(&fs, &fr, &y1);
        let (a2, b2) = coords(&fs, &fr, &y2);
        let bracket = (a1 * d2s + b1 * d2r) - (a2 * d1s + b2 * d1r);
        worst = worst.max(bracket.norm() / (y1.norm() * y2.norm()).max(1.0));
    }
    Ok(worst)
}

/// Largest distance of `d lambda^1 / dr` and `d lambda^2 / ds` from
/// `span{lambda^1, lambda^2}`, relative to the differentiated vector.
pub fn span_residual<L>(lambda: L, points: &[(f64, f64)]) -> Result<f64>
where
    L: Fn(f64, f64) -> Result<[Vector4<f64>; 2]>,
{
    let as4 = |v: Vector4<f64>| -> [f64; 4] { [v[0], v[1], v[2], v[3]] };
    let mut worst = 0.0f64;
    for &(s, r) in points {
        let [l1, l2] = lambda(s, r)?;
        let d1 = Vector4::from(derivative(|b| Ok(as4(lambda(s, b)?[0])), r)?);
        let d2 = Vector4::from(derivative(|a| Ok(as4(lambda(a, r)?[1])), s)?);
        for (l, d) in [(l1, d1), (l2, d2)] {
            if l.norm() < 1e-14 {
                continue;
            }
            worst = worst.max(lstsq2(&l1, &l2, &d).norm() / l.norm());
        }
    }
    Ok(worst)
}

/// Commutator of `gamma_1 = df/ds`, `gamma_2 = df/dr` on an `n x n` sample of the window.
pub fn gmc_commutator_residual(sol: &DoubleWaveSolution, n: usize) -> Result<f64> {
    let f = |s: f64, r: f64| Ok(sol.state_at(s, r)?.to_array());
    let g1 = |s: f64, r: f64| derivative(|a| f(a, r), s);
    let g2 = |s: f64, r: f64| derivative(|b| f(s, b), r);
    commutator_residual(f, g1, g2, &sol.window.sample_points(n))
}

pub fn gmc_span_residual(sol: &DoubleWaveSolution, n: usize) -> Result<f64> {
    span_residual(|s, r| sol.wave_vectors(s, r), &sol.window.sample_points(n))
}

/// Singular values of `du/d(t, x, y, z)` by fourth-order differences.
pub fn jacobian_singular_values(sol: &dyn Solution, t: f64, x: &Vec3) -> Result<[f64; 4]> {
    let at = |q: [f64; 4]| -> Result<[f64; 8]> { Ok(sol.evaluate(q[0], &Vec3::new(q[1], q[2], q[3]))?.to_array()) };
    let base = [t, x.x, x.y, x.z];
    let mut jac = SMatrix::<f64, 8, 4>::zeros();
    for k in 0..4 {
        let col = derivative(
            |c| {
                let mut q = base;
                q[k] = c;
                at(q)
            },
            base[k],
        )?;
        for (i, v) in col.iter().enumerate() {
            jac[(i, k)] = *v;
        }
    }
    let sv = jac.singular_values();
    let mut out = [sv[0], sv[1], sv[2], sv[3]];
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Numerical rank with threshold `1e-6 sigma_1`; zero for a locally constant state.
pub fn jacobian_rank(sol: &dyn Solution, t: f64, x: &Vec3) -> Result<usize> {
    let sv = jacobian_singular_values(sol, t, x)?;
    if sv[0] < 1e-12 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&v| v > 1e-6 * sv[0]).count())
}
