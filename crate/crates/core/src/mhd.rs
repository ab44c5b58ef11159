//! Ideal MHD state, flux Jacobians and the characteristic eigenstructure.
//!
//! Unknowns are ordered `(rho, p, u, v, w, H1, H2, H3)` with unit magnetic
//! permeability.

use nalgebra::{SMatrix, SVector, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Matrix8 = SMatrix<f64, 8, 8>;
pub type Vector8 = SVector<f64, 8>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub rho: f64,
    pub p: f64,
    pub v: Vec3,
    pub h: Vec3,
}

impl State {
    pub fn new(rho: f64, p: f64, v: Vec3, h: Vec3) -> Self {
        Self { rho, p, v, h }
    }

    pub fn to_vector(&self) -> Vector8 {
        Vector8::from_column_slice(&self.to_array())
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.rho, self.p, self.v.x, self.v.y, self.v.z, self.h.x, self.h.y, self.h.z,
        ]
    }

    pub fn from_slice(u: &[f64]) -> Self {
        Self {
            rho: u[0],
            p: u[1],
            v: Vec3::new(u[2], u[3], u[4]),
            h: Vec3::new(u[5], u[6], u[7]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Checks positivity of density and pressure.
    pub fn validate(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::InvalidState("non-finite component".into()));
        }
        if self.rho <= 0.0 {
            return Err(Error::InvalidState(format!("density must be > 0, got {}", self.rho)));
        }
        if self.p <= 0.0 {
            return Err(Error::InvalidState(format!("pressure must be > 0, got {}", self.p)));
        }
        Ok(())
    }
}

/// Polytropic fluid: `p = A0 rho^kappa` when `a0` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidModel {
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
}

impl FluidModel {
    pub fn new(kappa: f64) -> Self {
        Self { kappa, a0: None }
    }

    pub fn polytropic(kappa: f64, a0: f64) -> Self {
        Self { kappa, a0: Some(a0) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::InvalidParameter(format!("kappa must be > 0, got {}", self.kappa)));
        }
        if let Some(a0) = self.a0 {
            if !(a0.is_finite() && a0 > 0.0) {
                return Err(Error::InvalidParameter(format!("A0 must be > 0, got {a0}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveVector {
    pub lambda0: f64,
    pub lvec: Vec3,
}

impl WaveVector {
    pub fn new(lambda0: f64, lvec: Vec3) -> Self {
        Self { lambda0, lvec }
    }

    pub fn as_vector4(&self) -> Vector4<f64> {
        Vector4::new(self.lambda0, self.lvec.x, self.lvec.y, self.lvec.z)
    }

    pub fn from_vector4(v: &Vector4<f64>) -> Self {
        Self::new(v[0], Vec3::new(v[1], v[2], v[3]))
    }
}

/// Direction sign `epsilon = +1 | -1`, serialized as an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl TryFrom<i32> for Sign {
    type Error = String;
    fn try_from(v: i32) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("epsilon must be +1 or -1, got {v}")),
        }
    }
}

impl From<Sign> for i32 {
    fn from(s: Sign) -> i32 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    E1,
    E2,
    E3,
    Alfven,
    Slow,
    Fast,
}

impl FamilyKind {
    pub fn is_entropic(self) -> bool {
        matches!(self, FamilyKind::E1 | FamilyKind::E2 | FamilyKind::E3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WaveFamily {
    pub kind: FamilyKind,
    pub epsilon: Sign,
}

impl WaveFamily {
    pub fn new(kind: FamilyKind, epsilon: Sign) -> Self {
        Self { kind, epsilon }
    }

    pub fn label(&self) -> String {
        let base = match self.kind {
            FamilyKind::E1 => "E1",
            FamilyKind::E2 => "E2",
            FamilyKind::E3 => "E3",
            FamilyKind::Alfven => "A",
            FamilyKind::Slow => "S",
            FamilyKind::Fast => "F",
        };
        if self.kind.is_entropic() {
            base.to_string()
        } else {
            let s = if self.epsilon == Sign::Plus { "+" } else { "-" };
            format!("{base}{s}")
        }
    }
}

/// Values of `delta |lambda|` for `epsilon = +1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSpeeds {
    #[serde(rename = "deltaE")]
    pub entropic: f64,
    #[serde(rename = "deltaA")]
    pub alfven: f64,
    #[serde(rename = "deltaS")]
    pub slow: f64,
    #[serde(rename = "deltaF")]
    pub fast: f64,
}

impl CharacteristicSpeeds {
    pub fn of(&self, kind: FamilyKind) -> f64 {
        match kind {
            FamilyKind::E1 | FamilyKind::E2 | FamilyKind::E3 => self.entropic,
            FamilyKind::Alfven => self.alfven,
            FamilyKind::Slow => self.slow,
            FamilyKind::Fast => self.fast,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvector {
    pub family: WaveFamily,
    /// Unit-normalized right eigenvector.
    pub gamma: Vector8,
    /// Signed relative speed `delta |lambda| = lambda0 + v . lambda`.
    pub speed: f64,
    pub wave_vector: WaveVector,
}

/// Free components of the entropic eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropicChoice {
    pub gamma_rho: f64,
    pub gamma_v: Vec3,
    /// Defaults to `lambda` itself.
    pub h: Option<Vec3>,
}

impl Default for EntropicChoice {
    fn default() -> Self {
        Self { gamma_rho: 1.0, gamma_v: Vec3::zeros(), h: None }
    }
}

fn check_state(state: &State, model: &FluidModel) -> Result<()> {
    state.validate()?;
    model.validate()
}

pub fn flux_jacobian(state: &State, model: &FluidModel, axis: usize) -> Result<Matrix8> {
    let State { rho, p, v, h } = *state;
    let k = model.kappa;
    let (h1, h2, h3) = (h.x, h.y, h.z);
    let m = match axis {
        1 => {
            let u = v.x;
            #[rustfmt::skip]
            let a = [
                u,   0.0,       rho,    0.0,  0.0,  0.0, 0.0,       0.0,
                0.0, u,         k * p,  0.0,  0.0,  0.0, 0.0,       0.0,
                0.0, 1.0 / rho, u,      0.0,  0.0,  0.0, h2 / rho,  h3 / rho,
                0.0, 0.0,       0.0,    u,    0.0,  0.0, -h1 / rho, 0.0,
                0.0, 0.0,       0.0,    0.0,  u,    0.0, 0.0,       -h1 / rho,
                0.0, 0.0,       0.0,    0.0,  0.0,  u,   0.0,       0.0,
                0.0, 0.0,       h2,     -h1,  0.0,  0.0, u,         0.0,
                0.0, 0.0,       h3,     0.0,  -h1,  0.0, 0.0,       u,
            ];
            a
        }
        2 => {
            let w = v.y;
            #[rustfmt::skip]
            let a = [
                w,   0.0,       0.0, rho,   0.0, 0.0,      0.0, 0.0,
                0.0, w,         0.0, k * p, 0.0, 0.0,      0.0, 0.0,
                0.0, 0.0,       w,   0.0,   0.0, -h2 / rho, 0.0, 0.0,
                0.0, 1.0 / rho, 0.0, w,     0.0, h1 / rho, 0.0, h3 / rho,
                0.0, 0.0,       0.0, 0.0,   w,   0.0,      0.0, -h2 / rho,
                0.0, 0.0,       -h2, h1,    0.0, w,        0.0, 0.0,
                0.0, 0.0,       0.0, 0.0,   0.0, 0.0,      w,   0.0,
                0.0, 0.0,       0.0, h3,    -h2, 0.0,      0.0, w,
            ];
            a
        }
        3 => {
            let w = v.z;
            #[rustfmt::skip]
            let a = [
                w,   0.0,       0.0, 0.0, rho,   0.0,       0.0,       0.0,
                0.0, w,         0.0, 0.0, k * p, 0.0,       0.0,       0.0,
                0.0, 0.0,       w,   0.0, 0.0,   -h3 / rho, 0.0,       0.0,
                0.0, 0.0,       0.0, w,   0.0,   0.0,       -h3 / rho, 0.0,
                0.0, 1.0 / rho, 0.0, 0.0, w,     h1 / rho,  h2 / rho,  0.0,
                0.0, 0.0,       -h3, 0.0, h1,    w,         0.0,       0.0,
                0.0, 0.0,       0.0, -h3, h2,    0.0,       w,         0.0,
                0.0, 0.0,       0.0, 0.0, 0.0,   0.0,       0.0,       w,
            ];
            a
        }
        other => return Err(Error::InvalidAxis(other)),
    };
    Ok(Matrix8::from_row_slice(&m))
}

pub fn sound_speed(state: &State, model: &FluidModel) -> Result<f64> {
    if !(state.rho > 0.0) || !(state.p > 0.0) {
        return Err(Error::InvalidState(format!(
            "sound speed needs rho > 0 and p > 0, got rho={}, p={}",
            state.rho, state.p
        )));
    }
    model.validate()?;
    Ok((model.kappa * state.p / state.rho).sqrt())
}

pub fn characteristic_speeds(state: &State, model: &FluidModel, lvec: &Vec3) -> Result<CharacteristicSpeeds> {
    let a = sound_speed(state, model)?;
    let norm = lvec.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidParameter("wave vector must be nonzero".into()));
    }
    let n = lvec / norm;
    let b = state.h / state.rho.sqrt();
    let plus = (a * n + b).norm();
    let minus = (a * n - b).norm();
    let fast = 0.5 * (plus + minus);
    // (plus - minus)/2 rewritten to avoid cancellation.
    let slow = if plus + minus > 0.0 { 2.0 * a * b.dot(&n) / (plus + minus) } else { 0.0 };
    Ok(CharacteristicSpeeds {
        entropic: 0.0,
        alfven: b.dot(&n) * norm,
        slow: slow * norm,
        fast: fast * norm,
    })
}

/// Left-hand side of the dispersion relation at `d = lambda0 + v . lambda`.
pub fn dispersion_residual(state: &State, model: &FluidModel, wv: &WaveVector) -> Result<f64> {
    let a = sound_speed(state, model)?;
    let l = wv.lvec;
    let d = wv.lambda0 + state.v.dot(&l);
    let d2 = d * d;
    let hl2 = state.h.dot(&l).powi(2) / state.rho;
    let quartic = d2 * d2 - d2 * (state.h.norm_squared() / state.rho + a * a) * l.norm_squared() + a * a * hl2 * l.norm_squared();
    Ok(d2 * (d2 - hl2) * quartic)
}

/// Dispersion residual divided by `(|lambda| (|v| + a + |H|/sqrt(rho)))^8`.
pub fn dispersion_residual_scaled(state: &State, model: &FluidModel, wv: &WaveVector) -> Result<f64> {
    let raw = dispersion_residual(state, model, wv)?;
    let a = sound_speed(state, model)?;
    let scale = wv.lvec.norm() * (state.v.norm() + a + state.h.norm() / state.rho.sqrt());
    if scale == 0.0 {
        return Ok(raw.abs());
    }
    Ok(raw.abs() / scale.powi(8))
}

pub fn wave_matrix(state: &State, model: &FluidModel, wv: &WaveVector) -> Result<Matrix8> {
    let mut m = Matrix8::identity() * wv.lambda0;
    for axis in 1..=3 {
        let li = wv.lvec[axis - 1];
        if li != 0.0 {
            m += flux_jacobian(state, model, axis)? * li;
        }
    }
    Ok(m)
}

pub fn wave_relation_residual(state: &State, model: &FluidModel, wv: &WaveVector, gamma: &Vector8) -> Result<f64> {
    Ok((wave_matrix(state, model, wv)? * gamma).norm())
}

pub fn eigenvector(state: &State, model: &FluidModel, lvec: &Vec3, family: WaveFamily) -> Result<Eigenvector> {
    eigenvector_with(state, model, lvec, family, &EntropicChoice::default(), None)
}

/// Eigenvector with explicit free components. `alfven_h` overrides the
/// default Alfven polarization `lambda x H`.
pub fn eigenvector_with(
    state: &State,
    model: &FluidModel,
    lvec: &Vec3,
    family: WaveFamily,
    entropic: &EntropicChoice,
    alfven_h: Option<Vec3>,
) -> Result<Eigenvector> {
    check_state(state, model)?;
    let speeds = characteristic_speeds(state, model, lvec)?;
    let eps = family.epsilon.value();
    let l = *lvec;
    let ln = l.norm();
    let hvec = state.h;
    let rho = state.rho;
    let hl = hvec.dot(&l);
    let mut g = [0.0; 8];
    let d;
    match family.kind {
        FamilyKind::E1 | FamilyKind::E2 => {
            if hl.abs() > 1e-10 * hvec.norm().max(1.0) * ln {
                return Err(Error::Degenerate(format!(
                    "{} eigenvector requires H . lambda = 0, got {hl:e}",
                    family.label()
                )));
            }
            d = 0.0;
            let hh = entropic.h.unwrap_or(l);
            g[0] = entropic.gamma_rho;
            g[1] = -hvec.dot(&hh);
            g[2..5].copy_from_slice(entropic.gamma_v.as_slice());
            g[5..8].copy_from_slice(hh.as_slice());
        }
        FamilyKind::E3 => {
            d = 0.0;
            g[0] = entropic.gamma_rho;
        }
        FamilyKind::Alfven => {
            d = eps * speeds.alfven;
            let hh = match alfven_h {
                Some(h) => h,
                None => {
                    let c = l.cross(&hvec);
                    if c.norm() > 1e-8 * ln * hvec.norm() {
                        c / c.norm()
                    } else {
                        // H parallel to lambda: any h orthogonal to lambda works.
                        any_orthogonal(&l)
                    }
                }
            };
            let gv = eps * hh / rho.sqrt();
            g[2..5].copy_from_slice(gv.as_slice());
            g[5..8].copy_from_slice(hh.as_slice());
        }
        FamilyKind::Slow | FamilyKind::Fast => {
            let s = speeds.of(family.kind);
            d = eps * s;
            let delta2 = d * d / (ln * ln);
            g[0] = rho * d * d - hl * hl;
            g[1] = model.kappa * state.p * (d * d - hl * hl / rho);
            let gv = -d * (delta2 * l - hl * hvec / rho);
            let hh = delta2 * (ln * ln * hvec - hl * l);
            g[2..5].copy_from_slice(gv.as_slice());
            g[5..8].copy_from_slice(hh.as_slice());
        }
    }
    let gamma = Vector8::from_column_slice(&g);
    let norm = gamma.norm();
    let scale = ln * ln * (rho + state.p + hvec.norm_squared() + 1.0) * (1.0 + speeds.fast.powi(2));
    if norm <= 1e-12 * scale.max(1e-300) || norm == 0.0 {
        return Err(Error::Degenerate(format!(
            "{} eigenvector vanishes at this state",
            family.label()
        )));
    }
    let wave_vector = WaveVector::new(d - state.v.dot(&l), l);
    Ok(Eigenvector { family, gamma: gamma / norm, speed: d, wave_vector })
}

fn any_orthogonal(l: &Vec3) -> Vec3 {
    let ax = l.iamax();
    let seed = Vec3::ith((ax + 1) % 3, 1.0);
    let c = l.cross(&seed);
    c / c.norm()
}

pub fn riemann_phase(wv: &WaveVector, t: f64, x: &Vec3) -> f64 {
    wv.lambda0 * t + wv.lvec.dot(x)
}

/// Three orthonormal 4-vectors orthogonal to `(lambda0, lambda)`, built by
/// Gram-Schmidt from the standard basis skipping the dominant component.
pub fn orthogonal_complement(wv: &WaveVector) -> Result<[Vector4<f64>; 3]> {
    let l = wv.as_vector4();
    let n = l.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::InvalidParameter("wave vector must be nonzero".into()));
    }
    let skip = l.iamax();
    let mut basis: Vec<Vector4<f64>> = vec![l / n];
    let mut out = Vec::with_capacity(3);
    for i in (0..4).filter(|&i| i != skip) {
        let mut e = Vector4::<f64>::zeros();
        e[i] = 1.0;
        for b in &basis {
            e -= b * b.dot(&e);
        }
        // second pass for stability
        for b in &basis {
            e -= b * b.dot(&e);
        }
        let en = e.norm();
        let e = e / en;
        basis.push(e);
        out.push(e);
    }
    Ok([out[0], out[1], out[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn st(rho: f64, p: f64, v: [f64; 3], h: [f64; 3]) -> State {
        State::new(rho, p, Vec3::from(v), Vec3::from(h))
    }

    #[test]
    fn flux_jacobian_axis1_layout() {
        let s = st(1.0, 1.0, [0.0; 3], [0.0; 3]);
        let a = flux_jacobian(&s, &FluidModel::new(5.0 / 3.0), 1).unwrap();
        assert_eq!(a[(0, 2)], 1.0);
        assert_relative_eq!(a[(1, 2)], 5.0 / 3.0);
        assert_eq!(a[(2, 1)], 1.0);
        for i in 0..8 {
            assert_eq!(a[(i, i)], 0.0);
        }
        assert!(matches!(flux_jacobian(&s, &FluidModel::new(1.4), 4), Err(Error::InvalidAxis(4))));
    }

    #[test]
    fn speeds_for_field_along_lambda() {
        let s = st(1.0, 0.6, [0.0; 3], [2.0, 0.0, 0.0]);
        let sp = characteristic_speeds(&s, &FluidModel::new(5.0 / 3.0), &Vec3::x()).unwrap();
        assert_relative_eq!(sp.alfven, 2.0, epsilon = 1e-15);
        assert_relative_eq!(sp.slow, 1.0, epsilon = 1e-15);
        assert_relative_eq!(sp.fast, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn sound_speed_rejects_vacuum() {
        let s = st(0.0, 1.0, [0.0; 3], [0.0; 3]);
        assert!(sound_speed(&s, &FluidModel::new(1.4)).is_err());
    }

    #[test]
    fn sound_speed_matches_quartic_factor() {
        // Recover a^2 from the delta^2 coefficient of the quartic by least squares.
        let s = st(1.3, 0.7, [0.1, 0.2, -0.3], [0.4, -0.5, 0.9]);
        let m = FluidModel::new(1.4);
        let l = Vec3::new(0.3, 0.8, -0.2);
        let hl2 = s.h.dot(&l).powi(2) / s.rho;
        let a2 = m.kappa * s.p / s.rho;
        let quartic = |d: f64| {
            let d2 = d * d;
            d2 * d2 - d2 * (s.h.norm_squared() / s.rho + a2) * l.norm_squared() + a2 * hl2 * l.norm_squared()
        };
        let xs: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        let rows: Vec<[f64; 3]> = xs.iter().map(|&d| [d.powi(4), d * d, 1.0]).collect();
        let a = nalgebra::DMatrix::from_fn(xs.len(), 3, |i, j| rows[i][j]);
        let b = nalgebra::DVector::from_iterator(xs.len(), xs.iter().map(|&d| quartic(d)));
        let coef = a.svd(true, true).solve(&b, 1e-14).unwrap();
        let fitted = -coef[1] / l.norm_squared() - s.h.norm_squared() / s.rho;
        assert_relative_eq!(fitted, sound_speed(&s, &m).unwrap().powi(2), max_relative = 1e-10);
    }

    #[test]
    fn alfven_eigenvector_with_given_h() {
        let s = st(4.0, 1.0, [0.0; 3], [0.0, 0.0, 1.0]);
        let l = Vec3::new(0.0, 0.0, 1.0);
        let h = Vec3::new(1.0, 0.0, 0.0);
        let fam = WaveFamily::new(FamilyKind::Alfven, Sign::Plus);
        let e = eigenvector_with(&s, &FluidModel::new(1.4), &l, fam, &EntropicChoice::default(), Some(h)).unwrap();
        let expect = Vector8::from_column_slice(&[0.0, 0.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_relative_eq!(e.gamma, expect / expect.norm(), epsilon = 1e-15);
    }

    #[test]
    fn slow_wave_degenerates_for_perpendicular_field() {
        let s = st(1.0, 1.0, [0.0; 3], [0.0, 1.0, 0.0]);
        let fam = WaveFamily::new(FamilyKind::Slow, Sign::Plus);
        assert!(matches!(eigenvector(&s, &FluidModel::new(1.4), &Vec3::x(), fam), Err(Error::Degenerate(_))));
    }

    #[test]
    fn e1_requires_orthogonal_field() {
        let s = st(1.0, 1.0, [0.0; 3], [1.0, 0.0, 0.0]);
        let fam = WaveFamily::new(FamilyKind::E1, Sign::Plus);
        assert!(eigenvector(&s, &FluidModel::new(1.4), &Vec3::x(), fam).is_err());
        let e = eigenvector(&s, &FluidModel::new(1.4), &Vec3::y(), fam).unwrap();
        let r = wave_relation_residual(&s, &FluidModel::new(1.4), &e.wave_vector, &e.gamma).unwrap();
        assert!(r < 1e-14);
    }

    #[test]
    fn orthogonal_complement_of_axis() {
        let c = orthogonal_complement(&WaveVector::new(0.0, Vec3::x())).unwrap();
        assert_eq!(c[0], Vector4::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(c[1], Vector4::new(0.0, 0.0, 1.0, 0.0));
        assert_eq!(c[2], Vector4::new(0.0, 0.0, 0.0, 1.0));
        assert!(orthogonal_complement(&WaveVector::new(0.0, Vec3::zeros())).is_err());
    }

    #[test]
    fn riemann_phase_is_linear() {
        let wv = WaveVector::new(-0.5, Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(riemann_phase(&wv, 2.0, &Vec3::new(1.0, 1.0, 1.0)), 5.0);
    }

    fn arb_state() -> impl Strategy<Value = State> {
        (0.1f64..10.0, 0.1f64..10.0, prop::array::uniform3(-2.0f64..2.0), prop::array::uniform3(-2.0f64..2.0))
            .prop_map(|(r, p, v, h)| st(r, p, v, h))
    }

    fn arb_l() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-1.0f64..1.0)
            .prop_filter("nonzero", |l| Vec3::from(*l).norm() > 0.1)
            .prop_map(Vec3::from)
    }

    proptest! {
        #[test]
        fn speeds_interlace(s in arb_state(), l in arb_l(), k in 1.0f64..3.0) {
            let sp = characteristic_speeds(&s, &FluidModel::new(k), &l).unwrap();
            let tol = 1e-12 * sp.fast.abs().max(1.0);
            prop_assert!(sp.slow.abs() <= sp.alfven.abs() + tol);
            prop_assert!(sp.alfven.abs() <= sp.fast.abs() + tol);
        }

        #[test]
        fn speeds_are_homogeneous(s in arb_state(), l in arb_l(), c in 0.1f64..10.0) {
            let m = FluidModel::new(1.4);
            let a = characteristic_speeds(&s, &m, &l).unwrap();
            let b = characteristic_speeds(&s, &m, &(l * c)).unwrap();
            prop_assert!((b.fast - c * a.fast).abs() <= 1e-12 * b.fast.abs().max(1.0));
            prop_assert!((b.slow - c * a.slow).abs() <= 1e-12 * b.fast.abs().max(1.0));
            prop_assert!((b.alfven - c * a.alfven).abs() <= 1e-12 * b.fast.abs().max(1.0));
        }

        #[test]
        fn magnetoacoustic_eigenvectors_satisfy_wave_relation(
            s in arb_state(), l in arb_l(), plus in any::<bool>(), fast in any::<bool>()
        ) {
            let m = FluidModel::new(5.0 / 3.0);
            let eps = if plus { Sign::Plus } else { Sign::Minus };
            let kind = if fast { FamilyKind::Fast } else { FamilyKind::Slow };
            if let Ok(e) = eigenvector(&s, &m, &l, WaveFamily::new(kind, eps)) {
                let r = wave_relation_residual(&s, &m, &e.wave_vector, &e.gamma).unwrap();
                prop_assert!(r <= 1e-8, "residual {r}");
            }
        }

        #[test]
        fn alfven_eigenvectors_satisfy_wave_relation(s in arb_state(), l in arb_l(), plus in any::<bool>()) {
            let m = FluidModel::new(1.4);
            let eps = if plus { Sign::Plus } else { Sign::Minus };
            let e = eigenvector(&s, &m, &l, WaveFamily::new(FamilyKind::Alfven, eps)).unwrap();
            let r = wave_relation_residual(&s, &m, &e.wave_vector, &e.gamma).unwrap();
            prop_assert!(r <= 1e-10);
        }

        #[test]
        fn complement_is_orthonormal(l in prop::array::uniform4(-1.0f64..1.0)) {
            let v = Vector4::from(l);
            prop_assume!(v.norm() > 1e-3);
            let wv = WaveVector::from_vector4(&v);
            let c = orthogonal_complement(&wv).unwrap();
            for i in 0..3 {
                prop_assert!((c[i].dot(&v)).abs() < 1e-12);
                prop_assert!((c[i].norm() - 1.0).abs() < 1e-12);
                for j in 0..i {
                    prop_assert!(c[i].dot(&c[j]).abs() < 1e-12);
                }
            }
        }
    }
}
