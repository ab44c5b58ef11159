//! Rank-one solutions: simple entropic, Alfven and magnetoacoustic waves.
//!
//! Every simple wave has the form `u = f(r)` with the Riemann invariant
//! defined implicitly by `r = lambda0(r) t + lambda(r) . x`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::magnetosonic::Magnetosonic;
use crate::mhd::{sound_speed, wave_matrix, FamilyKind, FluidModel, Sign, State, Vec3, WaveFamily, WaveVector};
use crate::phase::{newton1, PhaseSolve};
use crate::profiles::{Profile, VectorProfile};
use crate::quad::gauss_legendre_vec;
use crate::specfun::hyp2f1;
use crate::wave::{default_window, derivative, unit, Quantity, Solution, ValidityWindow};

fn default_kappa() -> f64 {
    5.0 / 3.0
}

/// Entropic wave `E1`: `v' = alpha H + beta H'`, `lambda = H x H' / |H|^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct E1Params {
    pub p0: f64,
    #[serde(default)]
    pub v0: Vec3,
    pub rho: Profile,
    pub h: VectorProfile,
    #[serde(default)]
    pub alpha: Profile,
    #[serde(default)]
    pub beta: Profile,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

/// Entropic wave `E2` with `r = x + y - U0 t` and `u + v = U0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct E2Params {
    pub p0: f64,
    pub u0: f64,
    pub rho: Profile,
    pub u: Profile,
    #[serde(default)]
    pub w: Profile,
    pub hmag: Profile,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

/// Entropic wave `E3`: only the density varies, `r = x + y + z - C0 t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct E3Params {
    pub p0: f64,
    #[serde(default)]
    pub v0: Vec3,
    #[serde(default)]
    pub h0: Vec3,
    pub rho: Profile,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

/// Alfven wave with `H` on the sphere `|H| = hmag0`, given by polar angle
/// `theta(r)` and azimuth `phi(r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlfvenParams {
    pub rho0: f64,
    pub p0: f64,
    pub hmag0: f64,
    #[serde(default)]
    pub v0: Vec3,
    pub theta: Profile,
    pub phi: Profile,
    pub epsilon: Sign,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

/// Fast wave with `H = rho H0` orthogonal to a constant direction `lambda_f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FastOrthoParams {
    pub kappa: f64,
    pub a0: f64,
    pub h0: Vec3,
    pub lambda_f: Vec3,
    pub rho: Profile,
    pub epsilon: Sign,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

/// Slow wave with `H = H0 lambda(r)`, `lambda = (cos chi, sin chi, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlowParallelParams {
    pub kappa: f64,
    pub a0: f64,
    pub h0: f64,
    #[serde(default)]
    pub chi: Profile,
    pub epsilon: Sign,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

#[derive(Clone, Debug)]
enum Kind {
    E1(E1Params),
    E2(E2Params),
    E3 { p: E3Params, c0: f64 },
    Alfven { p: AlfvenParams, aux: Vec3 },
    Fast { p: FastOrthoParams, lf: Vec3, ms: Magnetosonic },
    Slow { p: SlowParallelParams, beta0: f64 },
}

#[derive(Clone, Debug)]
pub struct SimpleWaveSolution {
    tag: &'static str,
    pub family: WaveFamily,
    fluid: FluidModel,
    kind: Kind,
    pub window: ValidityWindow,
    pub diagnostics: Map<String, Value>,
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite")))
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {x}")))
    }
}

impl SimpleWaveSolution {
    fn build(tag: &'static str, family: WaveFamily, fluid: FluidModel, kind: Kind, window: [f64; 2]) -> Result<Self> {
        fluid.validate()?;
        let mut sol = Self {
            tag,
            family,
            fluid,
            kind,
            window: ValidityWindow {
                r_min: window[0],
                r_max: window[1],
                samples: 0,
                rho_min: 0.0,
                p_min: 0.0,
                valid: false,
            },
            diagnostics: Map::new(),
        };
        sol.window = ValidityWindow::scan(window[0], window[1], |r| {
            sol.wave_vector_at(r)?;
            sol.state_at(r)
        })?;
        sol.window.require(tag)?;
        let reduced = sol.max_reduced_residual(64)?;
        sol.diagnostics.insert("reduced_residual".into(), json!(reduced));
        Ok(sol)
    }

    pub fn entropic_e1(p: E1Params) -> Result<Self> {
        check_finite("p0", p.p0)?;
        let fluid = FluidModel::new(p.kappa);
        let w = p.window;
        Self::build("E1", WaveFamily::new(FamilyKind::E1, Sign::Plus), fluid, Kind::E1(p), w)
    }

    pub fn entropic_e2(p: E2Params) -> Result<Self> {
        check_finite("p0", p.p0)?;
        check_finite("u0", p.u0)?;
        let fluid = FluidModel::new(p.kappa);
        let w = p.window;
        Self::build("E2", WaveFamily::new(FamilyKind::E2, Sign::Plus), fluid, Kind::E2(p), w)
    }

    pub fn entropic_e3(p: E3Params) -> Result<Self> {
        check_finite("p0", p.p0)?;
        let c0 = p.v0.x + p.v0.y + p.v0.z;
        let fluid = FluidModel::new(p.kappa);
        let w = p.window;
        let mut s = Self::build("E3", WaveFamily::new(FamilyKind::E3, Sign::Plus), fluid, Kind::E3 { p, c0 }, w)?;
        s.diagnostics.insert("C0".into(), json!(c0));
        Ok(s)
    }

    pub fn alfven(p: AlfvenParams) -> Result<Self> {
        positive("rho0", p.rho0)?;
        positive("p0", p.p0)?;
        positive("hmag0", p.hmag0)?;
        // auxiliary vector for lambda = H' x c, fixed once per solution
        let [a, b] = p.window;
        let mut worst = 0.0f64;
        for i in 0..crate::wave::WINDOW_SAMPLES {
            let r = a + (b - a) * i as f64 / (crate::wave::WINDOW_SAMPLES - 1) as f64;
            let dh = unit(alfven_field(&p, r, 1), "dH/dr")?;
            worst = worst.max(dh.z.abs());
        }
        let aux = if worst < 0.9 { Vec3::z() } else { Vec3::x() };
        let fluid = FluidModel::new(p.kappa);
        let family = WaveFamily::new(FamilyKind::Alfven, p.epsilon);
        let w = p.window;
        let mut s = Self::build("A", family, fluid, Kind::Alfven { p, aux }, w)?;
        s.diagnostics.insert("aux".into(), json!([aux.x, aux.y, aux.z]));
        Ok(s)
    }

    pub fn fast_ortho(p: FastOrthoParams) -> Result<Self> {
        positive("a0", p.a0)?;
        let lf = unit(p.lambda_f, "lambda_f")?;
        if p.h0.dot(&lf).abs() > 1e-12 * p.h0.norm().max(1.0) {
            return Err(Error::InvalidParameter("H0 must be orthogonal to lambda_f".into()));
        }
        let ms = Magnetosonic::new(p.kappa, p.a0, p.h0.norm())?;
        let fluid = FluidModel::polytropic(p.kappa, p.a0);
        let family = WaveFamily::new(FamilyKind::Fast, p.epsilon);
        let w = p.window;
        let mut s = Self::build("F_ortho", family, fluid, Kind::Fast { p, lf, ms }, w)?;
        s.diagnostics.insert("beta0".into(), json!(ms.beta0()));
        s.diagnostics.insert("branch".into(), serde_json::to_value(ms.branch())?);
        Ok(s)
    }

    pub fn slow_parallel(p: SlowParallelParams) -> Result<Self> {
        positive("a0", p.a0)?;
        positive("kappa", p.kappa)?;
        if p.h0 == 0.0 || !p.h0.is_finite() {
            return Err(Error::InvalidParameter("H0 must be nonzero".into()));
        }
        let beta0 = p.h0 * p.h0 / (p.kappa * p.a0);
        let fluid = FluidModel::polytropic(p.kappa, p.a0);
        let family = WaveFamily::new(FamilyKind::Slow, p.epsilon);
        let w = p.window;
        let mut s = Self::build("S_parallel", family, fluid, Kind::Slow { p, beta0 }, w)?;
        s.diagnostics.insert("beta0".into(), json!(beta0));
        Ok(s)
    }

    /// The profile `f(r)` of the solution.
    pub fn state_at(&self, r: f64) -> Result<State> {
        let u = match &self.kind {
            Kind::E1(p) => {
                let h = p.h.value(r);
                State::new(p.rho.value(r), p.p0 - 0.5 * h.norm_squared(), e1_velocity(p, r), h)
            }
            Kind::E2(p) => {
                let h = p.hmag.value(r);
                let u = p.u.value(r);
                State::new(
                    p.rho.value(r),
                    p.p0 - 0.5 * h * h,
                    Vec3::new(u, p.u0 - u, p.w.value(r)),
                    Vec3::new(0.0, 0.0, h),
                )
            }
            Kind::E3 { p, .. } => State::new(p.rho.value(r), p.p0, p.v0, p.h0),
            Kind::Alfven { p, .. } => {
                let h = alfven_field(p, r, 0);
                let v = p.epsilon.value() * h / p.rho0.sqrt() + p.v0;
                State::new(p.rho0, p.p0, v, h)
            }
            Kind::Fast { p, lf, ms } => {
                let rho = p.rho.value(r);
                let v = p.epsilon.value() * ms.velocity(rho)? * lf;
                State::new(rho, p.a0 * rho.powf(p.kappa), v, rho * p.h0)
            }
            Kind::Slow { p, beta0 } => {
                let rho = slow_density(p, *beta0, r)?;
                let (l, lp) = slow_directions(p, r);
                let theta = slow_angle(p, rho);
                let vn = slow_velocity(p, *beta0, rho)?;
                let v = p.epsilon.value() * vn * (theta.sin() * l - theta.cos() * lp);
                State::new(rho, p.a0 * rho.powf(p.kappa), v, p.h0 * l)
            }
        };
        if !u.is_finite() {
            return Err(Error::InvalidState(format!("non-finite state at r = {r}")));
        }
        Ok(u)
    }

    /// Wave vector `(lambda0, lambda)` as a function of the invariant.
    pub fn wave_vector_at(&self, r: f64) -> Result<WaveVector> {
        Ok(match &self.kind {
            Kind::E1(p) => {
                let h = p.h.value(r);
                let dh = p.h.d(r, 1);
                let l = h.cross(&dh) / h.norm_squared();
                if !(l.norm() > 1e-12) {
                    return Err(Error::Degenerate(format!("H parallel to dH/dr at r = {r}")));
                }
                WaveVector::new(-e1_velocity(p, r).dot(&l), l)
            }
            Kind::E2(p) => WaveVector::new(-p.u0, Vec3::new(1.0, 1.0, 0.0)),
            Kind::E3 { c0, .. } => WaveVector::new(-c0, Vec3::new(1.0, 1.0, 1.0)),
            Kind::Alfven { p, aux } => {
                let dh = alfven_field(p, r, 1);
                let l = unit(dh.cross(aux), "dH/dr x c")?;
                WaveVector::new(-p.v0.dot(&l), l)
            }
            Kind::Fast { p, lf, ms } => {
                let rho = p.rho.value(r);
                let lambda0 = -p.epsilon.value() * (ms.speed(rho) + ms.velocity(rho)?);
                WaveVector::new(lambda0, *lf)
            }
            Kind::Slow { p, beta0 } => {
                let rho = slow_density(p, *beta0, r)?;
                let (l, _) = slow_directions(p, r);
                let delta_a = p.h0 / rho.sqrt();
                let lambda0 = delta_a - slow_velocity(p, *beta0, rho)? * slow_angle(p, rho).sin();
                WaveVector::new(lambda0, l)
            }
        })
    }

    /// Solve `r = lambda0(r) t + lambda(r) . x` by damped Newton.
    pub fn solve_phase(&self, t: f64, x: &Vec3, guess: Option<f64>) -> Result<PhaseSolve> {
        let r0 = match guess {
            Some(g) => g,
            None => {
                let wv = self.wave_vector_at(0.0)?;
                wv.lambda0 * t + wv.lvec.dot(x)
            }
        };
        newton1(
            |r| {
                let wv = self.wave_vector_at(r)?;
                Ok(r - wv.lambda0 * t - wv.lvec.dot(x))
            },
            r0,
        )
    }

    pub fn evaluate_simple(&self, t: f64, x: &Vec3) -> Result<State> {
        let ph = self.solve_phase(t, x, None)?;
        self.state_at(ph.r)
    }

    /// Gradient of the invariant, `lambda / phi` with `phi = 1 - lambda'.x - lambda0' t`.
    pub fn grad_r(&self, t: f64, x: &Vec3) -> Result<(f64, Vec3)> {
        let ph = self.solve_phase(t, x, None)?;
        let wv = self.wave_vector_at(ph.r)?;
        let d = derivative(|r| Ok(self.wave_vector_at(r)?.as_vector4().into()), ph.r)?;
        let phi = 1.0 - d[0] * t - (d[1] * x.x + d[2] * x.y + d[3] * x.z);
        Ok((ph.r, wv.lvec / phi))
    }

    /// Relative residual `|(lambda0 I + lambda_i A^i) f'(r)|` of the wave relation
    /// along the profile; zero for a genuine simple wave.
    pub fn reduced_residual(&self, r: f64) -> Result<f64> {
        let u = self.state_at(r)?;
        let wv = self.wave_vector_at(r)?;
        let df = derivative(|q| Ok(self.state_at(q)?.to_array()), r)?;
        let g = crate::mhd::Vector8::from_column_slice(&df);
        let gn = g.norm();
        if gn < 1e-14 {
            return Ok(0.0);
        }
        let m = wave_matrix(&u, &self.fluid, &wv)?;
        let a = sound_speed(&u, &self.fluid).unwrap_or(0.0);
        let scale = wv.lambda0.abs() + wv.lvec.norm() * (u.v.norm() + a + u.h.norm() / u.rho.sqrt());
        Ok((m * g).norm() / (gn * scale.max(1e-300)))
    }

    pub fn max_reduced_residual(&self, n: usize) -> Result<f64> {
        let (a, b) = (self.window.r_min, self.window.r_max);
        let mut worst = 0.0f64;
        for i in 0..n {
            let r = a + (b - a) * (i as f64 + 0.5) / n as f64;
            worst = worst.max(self.reduced_residual(r)?);
        }
        Ok(worst)
    }

    fn params_json(&self) -> Value {
        let v = match &self.kind {
            Kind::E1(p) => serde_json::to_value(p),
            Kind::E2(p) => serde_json::to_value(p),
            Kind::E3 { p, .. } => serde_json::to_value(p),
            Kind::Alfven { p, .. } => serde_json::to_value(p),
            Kind::Fast { p, .. } => serde_json::to_value(p),
            Kind::Slow { p, .. } => serde_json::to_value(p),
        };
        v.unwrap_or(Value::Null)
    }
}

fn e1_velocity(p: &E1Params, r: f64) -> Vec3 {
    if p.alpha.terms.is_empty() && p.beta.terms.is_empty() {
        return p.v0;
    }
    let dv = gauss_legendre_vec(
        |q| {
            let d = p.alpha.value(q) * p.h.value(q) + p.beta.value(q) * p.h.d(q, 1);
            [d.x, d.y, d.z]
        },
        0.0,
        r,
        0.25,
    );
    p.v0 + Vec3::new(dv[0], dv[1], dv[2])
}

/// `H(r)` (order 0) or `dH/dr` (order 1) on the sphere of radius `hmag0`.
fn alfven_field(p: &AlfvenParams, r: f64, order: usize) -> Vec3 {
    let (th, ph) = (p.theta.value(r), p.phi.value(r));
    let (st, ct, sp, cp) = (th.sin(), th.cos(), ph.sin(), ph.cos());
    if order == 0 {
        p.hmag0 * Vec3::new(st * cp, st * sp, ct)
    } else {
        let (dth, dph) = (p.theta.d(r, 1), p.phi.d(r, 1));
        p.hmag0 * (dth * Vec3::new(ct * cp, ct * sp, -st) + dph * st * Vec3::new(-sp, cp, 0.0))
    }
}

fn slow_density(p: &SlowParallelParams, beta0: f64, r: f64) -> Result<f64> {
    let k = p.kappa;
    let base = ((2.0 * k + 1.0) / (2.0 * beta0)).powf(1.0 + 2.0 / k) - (k + 2.0) / beta0 * r;
    if !(base > 0.0) {
        return Err(Error::InvalidState(format!("slow-wave density undefined at r = {r}")));
    }
    Ok(base.powf(-1.0 / (k + 2.0)))
}

fn slow_directions(p: &SlowParallelParams, r: f64) -> (Vec3, Vec3) {
    let chi = p.chi.value(r);
    (Vec3::new(chi.cos(), chi.sin(), 0.0), Vec3::new(-chi.sin(), chi.cos(), 0.0))
}

/// `theta` with `tan theta = -delta_A^2 / a^2`.
fn slow_angle(p: &SlowParallelParams, rho: f64) -> f64 {
    let da2 = p.h0 * p.h0 / rho;
    let a2 = p.kappa * p.a0 * rho.powf(p.kappa - 1.0);
    (-da2 / a2).atan()
}

fn slow_velocity(p: &SlowParallelParams, beta0: f64, rho: f64) -> Result<f64> {
    let k = p.kappa;
    let a1 = -(1.0 + 2.0 * k) / (4.0 * k);
    let z = -rho.powf(2.0 * k) / (beta0 * beta0);
    let f = hyp2f1(a1, 0.5, 1.0 + a1, z)?;
    Ok(2.0 * p.h0 * rho.powf(-(k + 0.5))
        * ((rho.powf(2.0 * k) + beta0 * beta0).sqrt() - 2.0 * k * beta0 / (1.0 + 2.0 * k) * f))
}

impl Solution for SimpleWaveSolution {
    fn tag(&self) -> &str {
        self.tag
    }

    fn fluid(&self) -> FluidModel {
        self.fluid
    }

    fn rank_bound(&self) -> usize {
        1
    }

    fn evaluate(&self, t: f64, x: &Vec3) -> Result<State> {
        self.evaluate_simple(t, x)
    }

    fn closed_form(&self, q: Quantity, t: f64, x: &Vec3) -> Option<Result<Vec3>> {
        match (&self.kind, q) {
            (Kind::Alfven { p, .. }, Quantity::LorentzForce) => Some(self.grad_r(t, x).map(|(r, g)| {
                let h = alfven_field(p, r, 0);
                h.dot(&g) * alfven_field(p, r, 1)
            })),
            (Kind::Fast { .. }, Quantity::Vorticity) => Some(Ok(Vec3::zeros())),
            (Kind::Fast { p, .. }, Quantity::LorentzForce) => Some(self.grad_r(t, x).map(|(r, g)| {
                let rho = p.rho.value(r);
                -p.h0.norm_squared() * rho * p.rho.d(r, 1) * g
            })),
            (Kind::E1(p), Quantity::LorentzForce) => Some(self.grad_r(t, x).map(|(r, g)| {
                -p.h.value(r).dot(&p.h.d(r, 1)) * g
            })),
            _ => None,
        }
    }

    fn manifest(&self) -> Value {
        json!({
            "tag": self.tag,
            "family": self.family.label(),
            "rank": 1,
            "fluid": self.fluid,
            "constants": self.params_json(),
            "window": self.window,
            "diagnostics": self.diagnostics,
        })
    }
}
