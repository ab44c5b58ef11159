//! Rank-two solutions: double waves parameterized by two Riemann invariants.
//!
//! Each solution is a surface `u = f(s, r)` together with wave vectors
//! `lambda^1(s, r)`, `lambda^2(s, r)`; the invariants solve the coupled
//! implicit system `s = lambda^1 . (t, x)`, `r = lambda^2 . (t, x)`.

use std::io::Write;

use nalgebra::{Matrix2, Vector2, Vector4};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::magnetosonic::Magnetosonic;
use crate::mhd::{FamilyKind, FluidModel, Sign, State, Vec3};
use crate::phase::{newton2, PhaseSolve2};
use crate::profiles::{Profile, Profile2, VectorProfile};
use crate::quad::rk4_step;
use crate::wave::{default_window, Quantity, Solution};

fn default_kappa() -> f64 {
    5.0 / 3.0
}

/// Both invariants entropic with constant planar wave vectors at angles
/// `phi0` and `theta0` in the `xy` plane; `v` and `H` along `e3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EeAlignedParams {
    pub p0: f64,
    pub phi0: f64,
    pub theta0: f64,
    pub rho: Profile2,
    #[serde(default)]
    pub w: Profile2,
    #[serde(default)]
    pub h: Profile2,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// Entropic pair with `v` and `H` perpendicular to the rotating wave vector
/// `(cos theta(r), sin theta(r), 0)`; `s = lambda(r) . x`, `r = z - w(s) t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EePerpAParams {
    pub p0: f64,
    pub theta: Profile,
    pub w: Profile,
    pub rho: Profile2,
    #[serde(default)]
    pub vmag: Profile2,
    #[serde(default)]
    pub hmag: Profile2,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// Entropic pair with a constant wave vector at angle `theta0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EePerpBParams {
    pub p0: f64,
    pub theta0: f64,
    pub w: Profile,
    #[serde(default)]
    pub vmag: Profile,
    #[serde(default)]
    pub hperp: Profile,
    #[serde(default)]
    pub h3: Profile,
    pub rho: Profile2,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// Double Alfven wave: `H . e1 = h1(r)`, `H . n = h2(s)` with
/// `n = (cos gamma, sin gamma, 0)` and `|H| = hmag0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AaParams {
    pub rho0: f64,
    pub p0: f64,
    pub hmag0: f64,
    pub gamma: f64,
    pub h1: Profile,
    pub h2: Profile,
    pub epsilon: Sign,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// Alfven-entropic wave: `H = alpha phi' + beta phi'' + psi`, `v = eps H / sqrt(rho) + phi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ae1Params {
    pub phi: VectorProfile,
    pub psi: VectorProfile,
    pub hmag: Profile,
    pub rho: Profile,
    pub p0: f64,
    /// Initial value `beta(r0)`.
    pub beta0: f64,
    #[serde(default)]
    pub r0: f64,
    /// Sign in front of the square root of the discriminant.
    pub branch: Sign,
    pub epsilon: Sign,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// Planar fast pair with `H = rho H0 e3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfPlanarParams {
    pub kappa: f64,
    pub a0: f64,
    pub h0: f64,
    pub f: Profile,
    pub g: Profile,
    #[serde(default)]
    pub w: Profile,
    /// Constant `C` in `v(s, r) = delta_F - f / 2 - C`.
    #[serde(default)]
    pub c: f64,
    pub epsilon: Sign,
    pub rho_bracket: [f64; 2],
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// Counter-propagating fast pair along `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfCounterParams {
    pub kappa: f64,
    pub a0: f64,
    pub h0: f64,
    pub f: Profile,
    pub g: Profile,
    #[serde(default)]
    pub v: Profile,
    #[serde(default)]
    pub w: Profile,
    #[serde(default)]
    pub phi: Profile,
    #[serde(default = "plus")]
    pub epsilon: Sign,
    pub rho_bracket: [f64; 2],
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

fn plus() -> Sign {
    Sign::Plus
}

/// Closed-form counter-propagating fast pair for `kappa = 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfKappa2Params {
    pub a0: f64,
    pub h0: f64,
    pub f: Profile,
    pub g: Profile,
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// Fast wave along `z` with an entropic wave carried by the fluid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fe1CounterParams {
    pub kappa: f64,
    pub a0: f64,
    pub h0: f64,
    pub rho: Profile,
    #[serde(default)]
    pub phi: Profile,
    #[serde(default)]
    pub alpha: VectorProfile,
    pub epsilon: Sign,
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// `kappa = 2` variant with `p = A(r) rho^2` and `2 A + Hc^2 = C2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fe1Kappa2Params {
    pub c2: f64,
    pub rho: Profile,
    pub a: Profile,
    #[serde(default)]
    pub phi: Profile,
    #[serde(default)]
    pub alpha: VectorProfile,
    pub epsilon: Sign,
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// Fast wave along `x` and entropic wave along `y`, `kappa = 2`, `H` along `e3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fe1PerpKappa2Params {
    pub c2: f64,
    pub v0: f64,
    pub rho: Profile,
    pub b: Profile,
    #[serde(default)]
    pub w: Profile,
    pub a: Profile,
    pub epsilon: Sign,
    #[serde(default = "default_window")]
    pub window_s: [f64; 2],
    #[serde(default = "default_window")]
    pub window_r: [f64; 2],
}

/// `beta(r)` on a fine grid with cubic Hermite interpolation.
#[derive(Clone, Debug, PartialEq)]
pub struct Ae1Table {
    pub r: Vec<f64>,
    pub beta: Vec<f64>,
    pub dbeta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub delta: Vec<f64>,
}

pub const AE1_STEP: f64 = 1e-3;
const AE1_MARGIN: f64 = 0.05;

impl Ae1Table {
    /// `(beta, dbeta/dr)` of the interpolant.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        let n = self.r.len();
        if !(r >= self.r[0] && r <= self.r[n - 1]) {
            return Err(Error::InvalidState(format!(
                "r = {r} outside integrated range [{}, {}]",
                self.r[0],
                self.r[n - 1]
            )));
        }
        let i = self.r.partition_point(|&x| x <= r).clamp(1, n - 1) - 1;
        let h = self.r[i + 1] - self.r[i];
        let u = (r - self.r[i]) / h;
        let (y0, y1) = (self.beta[i], self.beta[i + 1]);
        let (m0, m1) = (self.dbeta[i] * h, self.dbeta[i + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * m1;
        let dv = ((6.0 * u2 - 6.0 * u) * y0 + (3.0 * u2 - 4.0 * u + 1.0) * m0 + (-6.0 * u2 + 6.0 * u) * y1
            + (3.0 * u2 - 2.0 * u) * m1)
            / h;
        Ok((v, dv))
    }

    /// CSV with columns `r,beta,alpha,Delta`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,beta,alpha,Delta")?;
        for i in 0..self.r.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.r[i], self.beta[i], self.alpha[i], self.delta[i]
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Kind {
    EeAligned(EeAlignedParams),
    EePerpA(EePerpAParams),
    EePerpB(EePerpBParams),
    Aa(AaParams),
    Ae1 { p: Ae1Params, table: Ae1Table },
    FfPlanar { p: FfPlanarParams, ms: Magnetosonic },
    FfCounter { p: FfCounterParams, ms: Magnetosonic },
    FfKappa2 { p: FfKappa2Params, c2: f64 },
    Fe1Counter { p: Fe1CounterParams, ms: Magnetosonic },
    Fe1Kappa2(Fe1Kappa2Params),
    Fe1PerpKappa2(Fe1PerpKappa2Params),
}

/// Range of `(s, r)` on which density and pressure stay positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceWindow {
    pub s: [f64; 2],
    pub r: [f64; 2],
    pub samples: usize,
    pub rho_min: f64,
    pub p_min: f64,
    pub valid: bool,
}

pub const SURFACE_SAMPLES: usize = 33;

impl SurfaceWindow {
    fn scan<F: Fn(f64, f64) -> Result<State>>(s: [f64; 2], r: [f64; 2], state: F) -> Result<Self> {
        for w in [s, r] {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(format!("window needs max > min, got {w:?}")));
            }
        }
        let n = SURFACE_SAMPLES;
        let mut rho_min = f64::INFINITY;
        let mut p_min = f64::INFINITY;
        let mut finite = true;
        for i in 0..n {
            for j in 0..n {
                let a = s[0] + (s[1] - s[0]) * i as f64 / (n - 1) as f64;
                let b = r[0] + (r[1] - r[0]) * j as f64 / (n - 1) as f64;
                let u = state(a, b)?;
                finite &= u.is_finite();
                rho_min = rho_min.min(u.rho);
                p_min = p_min.min(u.p);
            }
        }
        Ok(Self { s, r, samples: n * n, rho_min, p_min, valid: finite && rho_min > 0.0 && p_min > 0.0 })
    }

    pub fn sample_points(&self, n: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let a = self.s[0] + (self.s[1] - self.s[0]) * (i as f64 + 0.5) / n as f64;
                let b = self.r[0] + (self.r[1] - self.r[0]) * (j as f64 + 0.5) / n as f64;
                out.push((a, b));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct DoubleWaveSolution {
    tag: &'static str,
    pub pair: (FamilyKind, FamilyKind),
    fluid: FluidModel,
    kind: Kind,
    pub window: SurfaceWindow,
    pub diagnostics: Map<String, Value>,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {x}")))
    }
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite")))
    }
}

fn planar(angle: f64) -> Vector4<f64> {
    Vector4::new(0.0, angle.cos(), angle.sin(), 0.0)
}

fn spacetime(t: f64, x: &Vec3) -> Vector4<f64> {
    Vector4::new(t, x.x, x.y, x.z)
}

fn check_hmag(name: &str, c2: f64, a: f64) -> Result<f64> {
    let h2 = c2 - 2.0 * a;
    if h2 < 0.0 {
        return Err(Error::Construction(format!("{name}: C2 - 2A < 0 ({h2})")));
    }
    Ok(h2.sqrt())
}

impl DoubleWaveSolution {
    fn build(
        tag: &'static str,
        pair: (FamilyKind, FamilyKind),
        fluid: FluidModel,
        kind: Kind,
        ws: [f64; 2],
        wr: [f64; 2],
    ) -> Result<Self> {
        fluid.validate()?;
        let mut sol = Self {
            tag,
            pair,
            fluid,
            kind,
            window: SurfaceWindow { s: ws, r: wr, samples: 0, rho_min: 0.0, p_min: 0.0, valid: false },
            diagnostics: Map::new(),
        };
        sol.window = SurfaceWindow::scan(ws, wr, |s, r| {
            sol.wave_vectors(s, r)?;
            sol.state_at(s, r)
        })
        .map_err(|e| match e {
            Error::Construction(m) => Error::Construction(m),
            e => Error::Construction(format!("{tag}: {e}")),
        })?;
        if !sol.window.valid {
            return Err(Error::Construction(format!(
                "{tag}: density or pressure not positive on s in {ws:?}, r in {wr:?} (min rho {}, min p {})",
                sol.window.rho_min, sol.window.p_min
            )));
        }
        Ok(sol)
    }

    pub fn ee_aligned(p: EeAlignedParams) -> Result<Self> {
        finite("p0", p.p0)?;
        if (p.phi0 - p.theta0).sin().abs() < 1e-8 {
            return Err(Error::Construction("E1E1_aligned: coincident wave vectors".into()));
        }
        let (ws, wr) = (p.window_s, p.window_r);
        let fluid = FluidModel::new(p.kappa);
        Self::build("E1E1_aligned", (FamilyKind::E1, FamilyKind::E1), fluid, Kind::EeAligned(p), ws, wr)
    }

    pub fn ee_perp_a(p: EePerpAParams) -> Result<Self> {
        finite("p0", p.p0)?;
        if !p.theta.is_constant() && !p.w.is_constant() {
            return Err(Error::Construction(
                "EE_2a: div v vanishes only if w or theta is constant".into(),
            ));
        }
        let (ws, wr) = (p.window_s, p.window_r);
        let fluid = FluidModel::new(p.kappa);
        Self::build("EE_2a", (FamilyKind::E1, FamilyKind::E1), fluid, Kind::EePerpA(p), ws, wr)
    }

    pub fn ee_perp_b(p: EePerpBParams) -> Result<Self> {
        finite("p0", p.p0)?;
        finite("theta0", p.theta0)?;
        let (ws, wr) = (p.window_s, p.window_r);
        let fluid = FluidModel::new(p.kappa);
        Self::build("EE_2b", (FamilyKind::E1, FamilyKind::E1), fluid, Kind::EePerpB(p), ws, wr)
    }

    pub fn aa(p: AaParams) -> Result<Self> {
        positive("rho0", p.rho0)?;
        positive("p0", p.p0)?;
        positive("hmag0", p.hmag0)?;
        if p.gamma.sin().abs() < 1e-8 {
            return Err(Error::Degenerate("AA: wave vectors must not be parallel".into()));
        }
        let (ws, wr) = (p.window_s, p.window_r);
        let fluid = FluidModel::new(p.kappa);
        Self::build("AA", (FamilyKind::Alfven, FamilyKind::Alfven), fluid, Kind::Aa(p), ws, wr)
    }

    pub fn ae1(p: Ae1Params) -> Result<Self> {
        finite("p0", p.p0)?;
        finite("beta0", p.beta0)?;
        let [a, b] = p.window_r;
        if !(p.r0 >= a && p.r0 <= b) {
            return Err(Error::InvalidParameter(format!("r0 = {} outside window [{a}, {b}]", p.r0)));
        }
        let table = integrate_beta(&p, a - AE1_MARGIN, b + AE1_MARGIN)?;
        let fluid = FluidModel::new(p.kappa);
        let wr = p.window_r;
        let mut sol = Self::build(
            "AE1",
            (FamilyKind::Alfven, FamilyKind::E1),
            fluid,
            Kind::Ae1 { p, table },
            default_window(),
            wr,
        )?;
        let summary = sol.ae1_summary()?;
        sol.diagnostics.extend(summary);
        Ok(sol)
    }

    pub fn ff_planar(p: FfPlanarParams) -> Result<Self> {
        positive("a0", p.a0)?;
        let ms = Magnetosonic::new(p.kappa, p.a0, p.h0.abs())?;
        let (ws, wr) = (p.window_s, p.window_r);
        let fluid = FluidModel::polytropic(p.kappa, p.a0);
        let mut s = Self::build("FF_planar", (FamilyKind::Fast, FamilyKind::Fast), fluid, Kind::FfPlanar { p, ms }, ws, wr)?;
        s.diagnostics.insert("beta0".into(), json!(ms.beta0()));
        Ok(s)
    }

    pub fn ff_counter(p: FfCounterParams) -> Result<Self> {
        positive("a0", p.a0)?;
        let ms = Magnetosonic::new(p.kappa, p.a0, p.h0.abs())?;
        let (ws, wr) = (p.window_s, p.window_r);
        let fluid = FluidModel::polytropic(p.kappa, p.a0);
        let mut s = Self::build("FF_counter", (FamilyKind::Fast, FamilyKind::Fast), fluid, Kind::FfCounter { p, ms }, ws, wr)?;
        s.diagnostics.insert("beta0".into(), json!(ms.beta0()));
        Ok(s)
    }

    pub fn ff_kappa2(p: FfKappa2Params) -> Result<Self> {
        positive("a0", p.a0)?;
        finite("h0", p.h0)?;
        let c2 = 2.0 * p.a0 + p.h0 * p.h0;
        let (ws, wr) = (p.window_s, p.window_r);
        let fluid = FluidModel::polytropic(2.0, p.a0);
        let mut s = Self::build("FF_kappa2", (FamilyKind::Fast, FamilyKind::Fast), fluid, Kind::FfKappa2 { p, c2 }, ws, wr)?;
        s.diagnostics.insert("C2".into(), json!(c2));
        Ok(s)
    }

    pub fn fe1_counter(p: Fe1CounterParams) -> Result<Self> {
        positive("a0", p.a0)?;
        let ms = Magnetosonic::new(p.kappa, p.a0, p.h0.abs())?;
        let (ws, wr) = (p.window_s, p.window_r);
        let fluid = FluidModel::polytropic(p.kappa, p.a0);
        let mut s = Self::build("FE1_counter", (FamilyKind::Fast, FamilyKind::E1), fluid, Kind::Fe1Counter { p, ms }, ws, wr)?;
        s.diagnostics.insert("beta0".into(), json!(ms.beta0()));
        Ok(s)
    }

    pub fn fe1_kappa2(p: Fe1Kappa2Params) -> Result<Self> {
        positive("C2", p.c2)?;
        let (ws, wr) = (p.window_s, p.window_r);
        Self::build("FE1_kappa2", (FamilyKind::Fast, FamilyKind::E1), FluidModel::new(2.0), Kind::Fe1Kappa2(p), ws, wr)
    }

    pub fn fe1_perp_kappa2(p: Fe1PerpKappa2Params) -> Result<Self> {
        positive("C2", p.c2)?;
        finite("v0", p.v0)?;
        if !p.b.is_constant() {
            return Err(Error::Construction("FE1_perp_kappa2: b must be constant".into()));
        }
        let (ws, wr) = (p.window_s, p.window_r);
        Self::build(
            "FE1_perp_kappa2",
            (FamilyKind::Fast, FamilyKind::E1),
            FluidModel::new(2.0),
            Kind::Fe1PerpKappa2(p),
            ws,
            wr,
        )
    }

    pub fn tag_str(&self) -> &'static str {
        self.tag
    }

    pub fn ae1_table(&self) -> Option<&Ae1Table> {
        match &self.kind {
            Kind::Ae1 { table, .. } => Some(table),
            _ => None,
        }
    }

    /// The surface `f(s, r)`.
    pub fn state_at(&self, s: f64, r: f64) -> Result<State> {
        let u = match &self.kind {
            Kind::EeAligned(p) => {
                let h = p.h.value(s, r);
                State::new(p.rho.value(s, r), p.p0 - 0.5 * h * h, Vec3::new(0.0, 0.0, p.w.value(s, r)), Vec3::new(0.0, 0.0, h))
            }
            Kind::EePerpA(p) => {
                let th = p.theta.value(r);
                let perp = Vec3::new(-th.sin(), th.cos(), 0.0);
                let h = p.hmag.value(s, r);
                let v = p.vmag.value(s, r) * perp + p.w.value(s) * Vec3::z();
                State::new(p.rho.value(s, r), p.p0 - 0.5 * h * h, v, h * perp)
            }
            Kind::EePerpB(p) => {
                let e0 = Vec3::new(-p.theta0.sin(), p.theta0.cos(), 0.0);
                let v = p.vmag.value(s) * e0 + p.w.value(s) * Vec3::z();
                let h = p.hperp.value(s) * e0 + p.h3.value(s) * Vec3::z();
                State::new(p.rho.value(s, r), p.p0 - 0.5 * h.norm_squared(), v, h)
            }
            Kind::Aa(p) => {
                let h = aa_field(p, s, r)?;
                State::new(p.rho0, p.p0, p.epsilon.value() * h / p.rho0.sqrt(), h)
            }
            Kind::Ae1 { p, table } => {
                let f = ae1_fields(p, table, r)?;
                let rho = p.rho.value(r);
                let hm = p.hmag.value(r);
                State::new(rho, p.p0 - 0.5 * hm * hm, p.epsilon.value() * f.h / rho.sqrt() + p.phi.value(r), f.h)
            }
            Kind::FfPlanar { p, ms } => {
                let (f, g) = (p.f.value(r), p.g.value(s));
                let rho = ms.invert_double_velocity(p.epsilon.value() * (f - g), p.rho_bracket[0], p.rho_bracket[1])?;
                let vv = p.epsilon.value() * ms.speed(rho) - 0.5 * f - p.c;
                State::new(
                    rho,
                    p.a0 * rho.powf(p.kappa),
                    Vec3::new(vv + 0.5 * (f + g), vv, p.w.value(s - r)),
                    Vec3::new(0.0, 0.0, rho * p.h0),
                )
            }
            Kind::FfCounter { p, ms } => {
                let (f, g) = (p.f.value(r), p.g.value(s));
                let rho = ms.invert_double_velocity(p.epsilon.value() * (f - g), p.rho_bracket[0], p.rho_bracket[1])?;
                let q = s + r;
                let ph = p.phi.value(q);
                State::new(
                    rho,
                    p.a0 * rho.powf(p.kappa),
                    Vec3::new(0.5 * (f + g), p.v.value(q), p.w.value(q)),
                    rho * p.h0 * Vec3::new(0.0, ph.cos(), ph.sin()),
                )
            }
            Kind::FfKappa2 { p, c2 } => {
                let (f, g) = (p.f.value(r), p.g.value(s));
                let rho = (f - g).powi(2) / (16.0 * c2);
                State::new(rho, p.a0 * rho * rho, Vec3::new(0.5 * (f + g), 0.0, 0.0), Vec3::new(0.0, 0.0, rho * p.h0))
            }
            Kind::Fe1Counter { p, ms } => {
                let rho = p.rho.value(s);
                let w = -p.epsilon.value() * ms.velocity(rho)?;
                let a = p.alpha.value(r);
                let ph = p.phi.value(r);
                State::new(
                    rho,
                    p.a0 * rho.powf(p.kappa),
                    Vec3::new(a.y, -a.x, w),
                    p.h0 * rho * Vec3::new(ph.cos(), ph.sin(), 0.0),
                )
            }
            Kind::Fe1Kappa2(p) => {
                let rho = p.rho.value(s);
                let ar = p.a.value(r);
                let hm = check_hmag("FE1_kappa2", p.c2, ar)?;
                let w = -2.0 * p.epsilon.value() * (p.c2 * rho).sqrt();
                let al = p.alpha.value(r);
                let ph = p.phi.value(r);
                State::new(rho, ar * rho * rho, Vec3::new(al.y, -al.x, w), rho * hm * Vec3::new(ph.cos(), ph.sin(), 0.0))
            }
            Kind::Fe1PerpKappa2(p) => {
                let rho = p.rho.value(s);
                let ar = p.a.value(r);
                let hm = check_hmag("FE1_perp_kappa2", p.c2, ar)?;
                let u = p.b.value(r) - 2.0 * p.epsilon.value() * (p.c2 * rho).sqrt();
                State::new(rho, ar * rho * rho, Vec3::new(u, p.v0, p.w.value(r)), Vec3::new(0.0, 0.0, rho * hm))
            }
        };
        if !u.is_finite() {
            return Err(Error::InvalidState(format!("non-finite state at (s, r) = ({s}, {r})")));
        }
        Ok(u)
    }

    /// Wave vectors `(lambda0, lambda)` of both invariants as 4-vectors.
    pub fn wave_vectors(&self, s: f64, r: f64) -> Result<[Vector4<f64>; 2]> {
        Ok(match &self.kind {
            Kind::EeAligned(p) => [planar(p.phi0), planar(p.theta0)],
            Kind::EePerpA(p) => [planar(p.theta.value(r)), Vector4::new(-p.w.value(s), 0.0, 0.0, 1.0)],
            Kind::EePerpB(p) => [planar(p.theta0), Vector4::new(-p.w.value(s), 0.0, 0.0, 1.0)],
            Kind::Aa(p) => [planar(0.0), planar(p.gamma)],
            Kind::Ae1 { p, table } => {
                let f = ae1_fields(p, table, r)?;
                let rho = p.rho.value(r);
                let v = p.epsilon.value() * f.h / rho.sqrt() + p.phi.value(r);
                let l = f.h.cross(&f.dh) / f.h.norm_squared();
                if !(l.norm() > 1e-12) {
                    return Err(Error::Degenerate(format!("AE1: H parallel to dH/dr at r = {r}")));
                }
                [Vector4::zeros(), Vector4::new(-v.dot(&l), l.x, l.y, l.z)]
            }
            Kind::FfPlanar { .. } => {
                let u = self.state_at(s, r)?;
                let d = self.fast_speed(&u) * self.sign();
                let half = 0.5 * (self.f_g(s, r).0 + self.f_g(s, r).1);
                [Vector4::new(d - half - u.v.y, 1.0, 0.0, 0.0), Vector4::new(d - u.v.y, 0.0, 1.0, 0.0)]
            }
            Kind::FfCounter { .. } => {
                let u = self.state_at(s, r)?;
                let d = self.fast_speed(&u);
                [Vector4::new(d - u.v.x, 1.0, 0.0, 0.0), Vector4::new(-(d + u.v.x), 1.0, 0.0, 0.0)]
            }
            Kind::FfKappa2 { p, .. } => {
                let (f, g) = (p.f.value(r), p.g.value(s));
                [Vector4::new(-0.25 * (3.0 * g + f), 1.0, 0.0, 0.0), Vector4::new(-0.25 * (3.0 * f + g), 1.0, 0.0, 0.0)]
            }
            Kind::Fe1Counter { .. } | Kind::Fe1Kappa2(_) => {
                let u = self.state_at(s, r)?;
                let c = self.fast_speed(&u) * self.sign();
                [Vector4::new(c - u.v.z, 0.0, 0.0, 1.0), Vector4::new(-u.v.z, 0.0, 0.0, 1.0)]
            }
            Kind::Fe1PerpKappa2(p) => {
                let c = (p.c2 * p.rho.value(s)).sqrt();
                [
                    Vector4::new(3.0 * p.epsilon.value() * c - p.b.value(r), 1.0, 0.0, 0.0),
                    Vector4::new(-p.v0, 0.0, 1.0, 0.0),
                ]
            }
        })
    }

    fn sign(&self) -> f64 {
        match &self.kind {
            Kind::FfPlanar { p, .. } => p.epsilon.value(),
            Kind::FfCounter { p, .. } => p.epsilon.value(),
            Kind::Fe1Counter { p, .. } => p.epsilon.value(),
            Kind::Fe1Kappa2(p) => p.epsilon.value(),
            Kind::Fe1PerpKappa2(p) => p.epsilon.value(),
            Kind::Aa(p) => p.epsilon.value(),
            Kind::Ae1 { p, .. } => p.epsilon.value(),
            _ => 1.0,
        }
    }

    fn f_g(&self, s: f64, r: f64) -> (f64, f64) {
        match &self.kind {
            Kind::FfPlanar { p, .. } => (p.f.value(r), p.g.value(s)),
            Kind::FfCounter { p, .. } => (p.f.value(r), p.g.value(s)),
            Kind::FfKappa2 { p, .. } => (p.f.value(r), p.g.value(s)),
            _ => (0.0, 0.0),
        }
    }

    /// Unsigned fast speed for `H` orthogonal to the wave vector.
    fn fast_speed(&self, u: &State) -> f64 {
        ((self.fluid.kappa * u.p + u.h.norm_squared()) / u.rho).sqrt()
    }

    /// Residuals of the implicit system defining `(s, r)` at `(t, x)`.
    pub fn phase_residual(&self, s: f64, r: f64, t: f64, x: &Vec3) -> Result<[f64; 2]> {
        match &self.kind {
            Kind::Fe1Counter { .. } | Kind::Fe1Kappa2(_) => {
                // s is the fast phase; r is the Lagrangian label of the entropic wave
                let u = self.state_at(s, r)?;
                let c = self.fast_speed(&u) * self.sign();
                let rho = self.fe1_rho();
                let mass = |a: f64| rho.integral(0.0, a);
                Ok([s - x.z + (u.v.z - c) * t, mass(r) - mass(s) + t * u.rho * c])
            }
            _ => {
                let [l1, l2] = self.wave_vectors(s, r)?;
                let xx = spacetime(t, x);
                Ok([s - l1.dot(&xx), r - l2.dot(&xx)])
            }
        }
    }

    fn fe1_rho(&self) -> &Profile {
        match &self.kind {
            Kind::Fe1Counter { p, .. } => &p.rho,
            Kind::Fe1Kappa2(p) => &p.rho,
            _ => unreachable!("density profile requested for a non-FE1 solution"),
        }
    }

    fn initial_guess(&self, t: f64, x: &Vec3) -> Result<(f64, f64)> {
        match &self.kind {
            Kind::Fe1Counter { .. } | Kind::Fe1Kappa2(_) => Ok((x.z, x.z)),
            _ => {
                let [l1, l2] = self.wave_vectors(0.0, 0.0)?;
                let xx = spacetime(t, x);
                Ok((l1.dot(&xx), l2.dot(&xx)))
            }
        }
    }

    /// Solve for `(s, r)` and return the Jacobian of the implicit system at the root.
    pub fn solve_phase2(&self, t: f64, x: &Vec3, guess: Option<(f64, f64)>) -> Result<PhaseSolve2> {
        let g = match guess {
            Some(g) => g,
            None => self.initial_guess(t, x)?,
        };
        newton2(|s, r| self.phase_residual(s, r, t, x), g)
    }

    /// `(s, r, grad s, grad r)` by implicit differentiation of the phase system.
    pub fn grad_sr(&self, t: f64, x: &Vec3) -> Result<(f64, f64, Vec3, Vec3)> {
        let ph = self.solve_phase2(t, x, None)?;
        let inv = ph.phi.try_inverse().ok_or(Error::GradientCatastrophe { phi: ph.phi.determinant() })?;
        let mut gs = Vec3::zeros();
        let mut gr = Vec3::zeros();
        for i in 0..3 {
            let h = 1e-6 * (1.0 + x[i].abs());
            let mut xp = *x;
            let mut xm = *x;
            xp[i] += h;
            xm[i] -= h;
            let a = self.phase_residual(ph.s, ph.r, t, &xp)?;
            let b = self.phase_residual(ph.s, ph.r, t, &xm)?;
            let dfdx = Vector2::new((a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h));
            let d = -(inv * dfdx);
            gs[i] = d[0];
            gr[i] = d[1];
        }
        Ok((ph.s, ph.r, gs, gr))
    }

    fn params_json(&self) -> Value {
        let v = match &self.kind {
            Kind::EeAligned(p) => serde_json::to_value(p),
            Kind::EePerpA(p) => serde_json::to_value(p),
            Kind::EePerpB(p) => serde_json::to_value(p),
            Kind::Aa(p) => serde_json::to_value(p),
            Kind::Ae1 { p, .. } => serde_json::to_value(p),
            Kind::FfPlanar { p, .. } => serde_json::to_value(p),
            Kind::FfCounter { p, .. } => serde_json::to_value(p),
            Kind::FfKappa2 { p, .. } => serde_json::to_value(p),
            Kind::Fe1Counter { p, .. } => serde_json::to_value(p),
            Kind::Fe1Kappa2(p) => serde_json::to_value(p),
            Kind::Fe1PerpKappa2(p) => serde_json::to_value(p),
        };
        v.unwrap_or(Value::Null)
    }

    /// Discriminant sign, beta trajectory summary and residuals of the
    /// orthogonality relations between `phi`, `psi` and the wave vector.
    fn ae1_summary(&self) -> Result<Map<String, Value>> {
        let Kind::Ae1 { p, table } = &self.kind else {
            return Ok(Map::new());
        };
        let [a, b] = p.window_r;
        let mut delta_min = f64::INFINITY;
        let mut beta_min = f64::INFINITY;
        let mut beta_max = f64::NEG_INFINITY;
        let mut h_err = 0.0f64;
        let mut vea = 0.0f64;
        let n = 256;
        for i in 0..n {
            let r = a + (b - a) * i as f64 / (n - 1) as f64;
            let f = ae1_fields(p, table, r)?;
            delta_min = delta_min.min(f.delta);
            beta_min = beta_min.min(f.beta);
            beta_max = beta_max.max(f.beta);
            h_err = h_err.max((f.h.norm_squared() - p.hmag.value(r).powi(2)).abs());
            let l = f.h.cross(&f.dh) / f.h.norm_squared();
            let checks = [p.phi.d(r, 1), p.phi.d(r, 2), p.phi.d(r, 3), p.psi.value(r), p.psi.d(r, 1)];
            for c in checks {
                vea = vea.max(c.dot(&l).abs());
            }
        }
        let mut m = Map::new();
        m.insert("delta_min".into(), json!(delta_min));
        m.insert("delta_sign".into(), json!(if delta_min > 0.0 { "positive" } else { "zero" }));
        m.insert("beta_min".into(), json!(beta_min));
        m.insert("beta_max".into(), json!(beta_max));
        m.insert("beta_steps".into(), json!(table.r.len() - 1));
        m.insert("h_norm_error".into(), json!(h_err));
        m.insert("orthogonality_residual".into(), json!(vea));
        m.insert("dependence".into(), json!("alpha and beta depend on r only"));
        Ok(m)
    }
}

/// Field of the double Alfven wave on the sphere `|H| = hmag0`.
fn aa_field(p: &AaParams, s: f64, r: f64) -> Result<Vec3> {
    let (sg, cg) = (p.gamma.sin(), p.gamma.cos());
    let h1 = p.h1.value(r);
    let h2 = (p.h2.value(s) - cg * h1) / sg;
    let h3sq = p.hmag0 * p.hmag0 - h1 * h1 - h2 * h2;
    if !(h3sq > 0.0) {
        return Err(Error::InvalidState(format!("AA: field leaves the sphere at (s, r) = ({s}, {r})")));
    }
    Ok(Vec3::new(h1, h2, h3sq.sqrt()))
}

struct Ae1Point {
    alpha: f64,
    delta: f64,
    dbeta: f64,
}

/// `alpha`, the discriminant and `dbeta/dr` at `(r, beta)`.
fn ae1_point(p: &Ae1Params, r: f64, beta: f64) -> Result<Ae1Point> {
    let d1 = p.phi.d(r, 1);
    let d2 = p.phi.d(r, 2);
    let d3 = p.phi.d(r, 3);
    let psi = p.psi.value(r);
    let dpsi = p.psi.d(r, 1);
    let hm = p.hmag.value(r);
    let n1 = d1.norm_squared();
    if !(n1 > 1e-24) {
        return Err(Error::Construction(format!("AE1: phi' vanishes at r = {r}")));
    }
    let b = d1.dot(&d2) * beta + d1.dot(&psi);
    let delta = b * b - n1 * (d2.norm_squared() * beta * beta + 2.0 * d2.dot(&psi) * beta + psi.norm_squared() - hm * hm);
    if !(delta >= 0.0) {
        return Err(Error::Construction(format!("AE1: discriminant negative at r = {r} (Delta = {delta:e})")));
    }
    let alpha = (-b + p.branch.value() * delta.sqrt()) / n1;
    let lead = d1.cross(&psi).dot(&d2);
    if lead.abs() < 1e-12 {
        return Err(Error::Construction(format!("AE1: leading coefficient (phi' x psi).phi'' vanishes at r = {r}")));
    }
    let c12 = d1.cross(&d2);
    let c1p = d1.cross(&psi);
    let num = beta * beta * c12.dot(&d3) + beta * (c12.dot(&dpsi) + c1p.dot(&d3)) + c1p.dot(&dpsi);
    Ok(Ae1Point { alpha, delta, dbeta: -num / lead - alpha })
}

fn integrate_beta(p: &Ae1Params, a: f64, b: f64) -> Result<Ae1Table> {
    let rhs = |r: f64, beta: f64| ae1_point(p, r, beta).map(|q| q.dbeta).unwrap_or(f64::NAN);
    let sweep = |end: f64| -> Result<Vec<(f64, f64)>> {
        let n = ((end - p.r0).abs() / AE1_STEP).ceil().max(1.0) as usize;
        let h = (end - p.r0) / n as f64;
        let mut out = vec![(p.r0, p.beta0)];
        let (mut r, mut y) = (p.r0, p.beta0);
        for i in 0..n {
            y = rk4_step(&rhs, r, y, h);
            r = p.r0 + (i + 1) as f64 * h;
            if !y.is_finite() {
                // surface the precise failure (negative discriminant, vanishing coefficient)
                ae1_point(p, r - h, out.last().map(|q| q.1).unwrap_or(p.beta0))?;
                return Err(Error::Construction(format!(
                    "AE1: discriminant negative along the beta trajectory near r = {r}"
                )));
            }
            out.push((r, y));
        }
        Ok(out)
    };
    let mut back = sweep(a)?;
    let fwd = sweep(b)?;
    back.reverse();
    back.pop();
    back.extend(fwd);
    let mut table = Ae1Table { r: vec![], beta: vec![], dbeta: vec![], alpha: vec![], delta: vec![] };
    for (r, beta) in back {
        let q = ae1_point(p, r, beta)?;
        table.r.push(r);
        table.beta.push(beta);
        table.dbeta.push(q.dbeta);
        table.alpha.push(q.alpha);
        table.delta.push(q.delta);
    }
    Ok(table)
}

struct Ae1Fields {
    h: Vec3,
    dh: Vec3,
    beta: f64,
    delta: f64,
}

/// `H(r)` and its exact derivative along the interpolated `beta`.
fn ae1_fields(p: &Ae1Params, table: &Ae1Table, r: f64) -> Result<Ae1Fields> {
    let (beta, dbeta) = table.eval(r)?;
    let q = ae1_point(p, r, beta)?;
    let d1 = p.phi.d(r, 1);
    let d2 = p.phi.d(r, 2);
    let h = q.alpha * d1 + beta * d2 + p.psi.value(r);
    let k = (q.alpha + dbeta) * d2 + beta * p.phi.d(r, 3) + p.psi.d(r, 1);
    let hd1 = h.dot(&d1);
    if hd1.abs() < 1e-14 {
        return Err(Error::Degenerate(format!("AE1: H orthogonal to phi' at r = {r}")));
    }
    let dalpha = (p.hmag.value(r) * p.hmag.d(r, 1) - h.dot(&k)) / hd1;
    Ok(Ae1Fields { h, dh: dalpha * d1 + k, beta, delta: q.delta })
}

impl Solution for DoubleWaveSolution {
    fn tag(&self) -> &str {
        self.tag
    }

    fn fluid(&self) -> FluidModel {
        self.fluid
    }

    fn rank_bound(&self) -> usize {
        2
    }

    fn evaluate(&self, t: f64, x: &Vec3) -> Result<State> {
        let ph = self.solve_phase2(t, x, None)?;
        self.state_at(ph.s, ph.r)
    }

    fn closed_form(&self, q: Quantity, t: f64, x: &Vec3) -> Option<Result<Vec3>> {
        match (&self.kind, q) {
            (Kind::FfKappa2 { p, c2 }, Quantity::Current) => Some(self.grad_sr(t, x).map(|(s, r, gs, gr)| {
                let (f, g) = (p.f.value(r), p.g.value(s));
                let j = p.h0 / (8.0 * c2) * (f - g) * (p.g.d(s, 1) * gs.x - p.f.d(r, 1) * gr.x);
                Vec3::new(0.0, j, 0.0)
            })),
            (Kind::Fe1Counter { p, .. }, Quantity::LorentzForce) => Some(self.grad_sr(t, x).map(|(s, _, gs, _)| {
                let rho = p.rho.value(s);
                -p.h0 * p.h0 * rho * p.rho.d(s, 1) * gs.z * Vec3::z()
            })),
            (Kind::Fe1PerpKappa2(p), Quantity::Vorticity) => Some(self.grad_sr(t, x).map(|(_, r, _, gr)| {
                Vec3::new(p.w.d(r, 1) * gr.y, 0.0, -p.b.d(r, 1) * gr.y)
            })),
            _ => None,
        }
    }

    fn manifest(&self) -> Value {
        json!({
            "tag": self.tag,
            "pair": [self.pair.0, self.pair.1],
            "rank": 2,
            "fluid": self.fluid,
            "constants": self.params_json(),
            "window": self.window,
            "diagnostics": self.diagnostics,
        })
    }
}

/// Families in the order used by [`existence_table`].
pub const TABLE_FAMILIES: [&str; 4] = ["E", "A", "F", "S"];

/// Which pairs of simple waves superpose into double waves.
pub fn existence_table() -> [[bool; 4]; 4] {
    [
        [true, true, true, false],
        [true, true, false, false],
        [true, false, true, false],
        [false, false, false, false],
    ]
}

/// Constructors implemented for an entry of [`existence_table`].
pub fn covering_constructors(i: usize, j: usize) -> Vec<&'static str> {
    let (a, b) = (i.min(j), i.max(j));
    match (a, b) {
        (0, 0) => vec!["E1E1_aligned", "EE_2a", "EE_2b"],
        (0, 1) => vec!["AE1"],
        (1, 1) => vec!["AA"],
        (0, 2) => vec!["FE1_counter", "FE1_kappa2", "FE1_perp_kappa2"],
        (2, 2) => vec!["FF_planar", "FF_counter", "FF_kappa2"],
        _ => vec![],
    }
}

/// Pseudo-inverse solve of the 4x2 least-squares problem `[a b] c = y`.
pub(crate) fn lstsq2(a: &Vector4<f64>, b: &Vector4<f64>, y: &Vector4<f64>) -> Vector4<f64> {
    let g = Matrix2::new(a.dot(a), a.dot(b), a.dot(b), b.dot(b));
    let rhs = Vector2::new(a.dot(y), b.dot(y));
    match g.try_inverse() {
        Some(inv) => {
            let c = inv * rhs;
            y - c[0] * a - c[1] * b
        }
        None => {
            let (u, n) = if a.norm() >= b.norm() { (a, a.norm()) } else { (b, b.norm()) };
            if n == 0.0 {
                *y
            } else {
                y - u * (u.dot(y) / (n * n))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aa_fixture() -> AaParams {
        AaParams {
            rho0: 1.0,
            p0: 1.0,
            hmag0: 2.0,
            gamma: 1.0,
            h1: Profile::sin(0.4, 1.0, 0.0),
            h2: Profile::sin(0.3, 1.0, 0.5),
            epsilon: Sign::Plus,
            kappa: 5.0 / 3.0,
            window_s: [-1.0, 1.0],
            window_r: [-1.0, 1.0],
        }
    }

    pub(crate) fn ae1_fixture() -> Ae1Params {
        Ae1Params {
            phi: VectorProfile::new(
                Profile::sin(1.0, 1.0, std::f64::consts::FRAC_PI_2),
                Profile::sin(1.0, 1.0, 0.0),
                Profile::poly(&[0.0, 0.5]),
            ),
            psi: VectorProfile::constant(Vec3::z()),
            hmag: Profile::constant(1.5),
            rho: Profile::constant(1.0).plus(Profile::sin(0.2, 1.0, std::f64::consts::FRAC_PI_2)),
            p0: 3.0,
            beta0: 0.8,
            r0: 0.0,
            branch: Sign::Plus,
            epsilon: Sign::Plus,
            kappa: 5.0 / 3.0,
            window_r: [-1.0, 1.0],
        }
    }

    #[test]
    fn table_matches_known_matrix() {
        let t = existence_table();
        assert!(t[0][1] && t[1][0]);
        assert!(!t[3][3]);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(t[i][j], t[j][i]);
                assert_eq!(t[i][j], !covering_constructors(i, j).is_empty());
            }
        }
    }

    #[test]
    fn aa_keeps_field_on_sphere_and_divergence_free() {
        let s = DoubleWaveSolution::aa(aa_fixture()).unwrap();
        let x = Vec3::new(0.2, -0.3, 0.0);
        let u = s.evaluate(0.0, &x).unwrap();
        assert!((u.h.norm() - 2.0).abs() < 1e-14);
        let h = 1e-4;
        let dx = s.evaluate(0.0, &(x + Vec3::x() * h)).unwrap().h.x - s.evaluate(0.0, &(x - Vec3::x() * h)).unwrap().h.x;
        let dy = s.evaluate(0.0, &(x + Vec3::y() * h)).unwrap().h.y - s.evaluate(0.0, &(x - Vec3::y() * h)).unwrap().h.y;
        assert!(((dx + dy) / (2.0 * h)).abs() < 1e-8);
    }

    #[test]
    fn ee_aligned_axes() {
        let s = DoubleWaveSolution::ee_aligned(EeAlignedParams {
            p0: 2.0,
            phi0: 0.0,
            theta0: std::f64::consts::FRAC_PI_2,
            rho: Profile2::constant(1.0),
            w: Profile2::of_s(Profile::sin(1.0, 1.0, 0.0)),
            h: Profile2::of_r(Profile::sin(0.5, 1.0, 0.0)),
            kappa: 1.4,
            window_s: [-2.0, 2.0],
            window_r: [-2.0, 2.0],
        })
        .unwrap();
        let ph = s.solve_phase2(0.3, &Vec3::new(0.4, -0.7, 9.0), None).unwrap();
        assert!((ph.s - 0.4).abs() < 1e-15 && (ph.r + 0.7).abs() < 1e-15);
        let u = s.state_at(0.4, -0.7).unwrap();
        assert!((u.p + 0.5 * u.h.norm_squared() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ee_aligned_rejects_coincident_vectors() {
        let r = DoubleWaveSolution::ee_aligned(EeAlignedParams {
            p0: 2.0,
            phi0: 0.3,
            theta0: 0.3,
            rho: Profile2::constant(1.0),
            w: Profile2::default(),
            h: Profile2::default(),
            kappa: 1.4,
            window_s: [-1.0, 1.0],
            window_r: [-1.0, 1.0],
        });
        assert!(matches!(r, Err(Error::Construction(_))));
    }

    #[test]
    fn ee_perp_constant_w_gives_explicit_phase() {
        let s = DoubleWaveSolution::ee_perp_a(EePerpAParams {
            p0: 2.0,
            theta: Profile::sin(0.5, 1.0, 0.0),
            w: Profile::constant(0.7),
            rho: Profile2::constant(1.0),
            vmag: Profile2::of_s(Profile::constant(0.2)),
            hmag: Profile2::of_r(Profile::constant(0.4)),
            kappa: 1.4,
            window_s: [-2.0, 2.0],
            window_r: [-2.0, 2.0],
        })
        .unwrap();
        let x = Vec3::new(0.1, 0.2, 0.5);
        let ph = s.solve_phase2(0.4, &x, None).unwrap();
        assert!((ph.r - (0.5 - 0.7 * 0.4)).abs() < 1e-13);
    }

    #[test]
    fn ee_perp_a_rejects_varying_w_and_theta() {
        let r = DoubleWaveSolution::ee_perp_a(EePerpAParams {
            p0: 2.0,
            theta: Profile::sin(0.5, 1.0, 0.0),
            w: Profile::sin(0.5, 1.0, 0.0),
            rho: Profile2::constant(1.0),
            vmag: Profile2::default(),
            hmag: Profile2::default(),
            kappa: 1.4,
            window_s: [-1.0, 1.0],
            window_r: [-1.0, 1.0],
        });
        assert!(r.is_err());
    }

    #[test]
    fn ae1_keeps_field_magnitude() {
        let s = DoubleWaveSolution::ae1(ae1_fixture()).unwrap();
        let err = s.diagnostics["h_norm_error"].as_f64().unwrap();
        assert!(err < 1e-8, "{err}");
        let t = s.ae1_table().unwrap();
        assert!(t.delta.iter().all(|d| *d >= 0.0));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("r,beta,alpha,Delta\n"));
    }

    #[test]
    fn ae1_degenerate_alpha_collapses() {
        // phi'' = 0 and psi = 0: alpha = +-Hc / |phi'|
        let p = Ae1Params {
            phi: VectorProfile::new(Profile::poly(&[0.0, 2.0]), Profile::default(), Profile::default()),
            psi: VectorProfile::default(),
            hmag: Profile::constant(1.5),
            ..ae1_fixture()
        };
        let q = ae1_point(&p, 0.3, 0.7);
        // the leading ODE coefficient vanishes for this choice
        assert!(matches!(q, Err(Error::Construction(_))));
        let d1 = p.phi.d(0.3, 1);
        let b = 0.0;
        let delta: f64 = b * b - d1.norm_squared() * (0.0 - 1.5 * 1.5);
        assert!(((-b + delta.sqrt()) / d1.norm_squared() - 1.5 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn ae1_negative_discriminant_is_reported() {
        let p = Ae1Params { hmag: Profile::constant(0.1), ..ae1_fixture() };
        let e = DoubleWaveSolution::ae1(p).unwrap_err();
        assert!(e.to_string().contains("discriminant negative"), "{e}");
    }

    #[test]
    fn hermite_table_reproduces_cubic() {
        let xs: Vec<f64> = (0..5).map(|i| i as f64 * 0.5).collect();
        let f = |x: f64| x * x * x - x;
        let df = |x: f64| 3.0 * x * x - 1.0;
        let t = Ae1Table {
            r: xs.clone(),
            beta: xs.iter().map(|&x| f(x)).collect(),
            dbeta: xs.iter().map(|&x| df(x)).collect(),
            alpha: vec![0.0; 5],
            delta: vec![0.0; 5],
        };
        for &x in &[0.1, 0.77, 1.9] {
            let (v, d) = t.eval(x).unwrap();
            assert!((v - f(x)).abs() < 1e-13 && (d - df(x)).abs() < 1e-12);
        }
        assert!(t.eval(2.5).is_err());
    }

    #[test]
    fn ff_kappa2_symmetric_profiles_are_static() {
        // f = -g = 2 sqrt(2 A0 + H0^2) c gives rho = c^2 and v = 0
        let (a0, h0, c): (f64, f64, f64) = (1.0, 0.5, 1.3);
        let k = 2.0 * (2.0 * a0 + h0 * h0).sqrt() * c;
        let s = DoubleWaveSolution::ff_kappa2(FfKappa2Params {
            a0,
            h0,
            f: Profile::constant(k),
            g: Profile::constant(-k),
            window_s: [-1.0, 1.0],
            window_r: [-1.0, 1.0],
        })
        .unwrap();
        let u = s.evaluate(0.5, &Vec3::new(0.3, 0.0, 0.0)).unwrap();
        assert!((u.rho - c * c).abs() < 1e-14);
        assert_eq!(u.v, Vec3::zeros());
    }

    #[test]
    fn ff_planar_density_inverts_velocity() {
        let s = DoubleWaveSolution::ff_planar(FfPlanarParams {
            kappa: 2.0,
            a0: 1.0,
            h0: 1.0,
            f: Profile::constant(8.0).plus(Profile::sin(0.5, 1.0, 0.0)),
            g: Profile::sin(0.5, 1.0, 0.3),
            w: Profile::default(),
            c: 0.0,
            epsilon: Sign::Plus,
            rho_bracket: [1e-3, 100.0],
            window_s: [-1.0, 1.0],
            window_r: [-1.0, 1.0],
        })
        .unwrap();
        let u = s.state_at(0.2, 0.1).unwrap();
        let target = 8.0 + 0.5 * 0.1f64.sin() - 0.5 * 0.5f64.sin();
        // kappa = 2: 2 v(rho) = 4 sqrt(C2 rho)
        assert!((4.0 * (3.0 * u.rho).sqrt() - target).abs() < 1e-12);
    }

    #[test]
    fn fe1_counter_label_is_position_at_rest() {
        let s = DoubleWaveSolution::fe1_counter(Fe1CounterParams {
            kappa: 5.0 / 3.0,
            a0: 1.0,
            h0: 0.8,
            rho: Profile::constant(1.0).plus(Profile::sin(0.1, 1.0, 0.0)),
            phi: Profile::poly(&[0.0, 1.0]),
            alpha: VectorProfile::new(Profile::sin(0.2, 1.0, 0.0), Profile::default(), Profile::default()),
            epsilon: Sign::Plus,
            window_s: [-1.0, 1.0],
            window_r: [-1.0, 1.0],
        })
        .unwrap();
        let ph = s.solve_phase2(0.0, &Vec3::new(0.0, 0.0, 0.4), None).unwrap();
        assert!((ph.s - 0.4).abs() < 1e-12 && (ph.r - 0.4).abs() < 1e-12);
    }

    #[test]
    fn fe1_perp_requires_constant_b() {
        let p = Fe1PerpKappa2Params {
            c2: 3.0,
            v0: 0.1,
            rho: Profile::constant(1.0),
            b: Profile::sin(0.1, 1.0, 0.0),
            w: Profile::default(),
            a: Profile::constant(1.0),
            epsilon: Sign::Plus,
            window_s: [-1.0, 1.0],
            window_r: [-1.0, 1.0],
        };
        assert!(DoubleWaveSolution::fe1_perp_kappa2(p.clone()).is_err());
        let q = Fe1PerpKappa2Params { b: Profile::constant(0.2), a: Profile::constant(2.0), ..p };
        let e = DoubleWaveSolution::fe1_perp_kappa2(q).unwrap_err();
        assert!(e.to_string().contains("C2 - 2A"), "{e}");
    }

    #[test]
    fn lstsq_projects_out_span() {
        let a = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let b = Vector4::new(0.0, 1.0, 1.0, 0.0);
        let y = Vector4::new(3.0, 2.0, 2.0, 5.0);
        let res = lstsq2(&a, &b, &y);
        assert!((res - Vector4::new(0.0, 0.0, 0.0, 5.0)).norm() < 1e-14);
    }
}
