//! Grid sampling and finite-difference verification of solutions against
//! the ideal MHD equations.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mhd::{FluidModel, State, Vec3};
use crate::quad::CompensatedSum;
use crate::wave::{Quantity, Solution};

/// Residuals below this on every level count as exact.
pub const EXACT_TOL: f64 = 1e-10;
/// Minimum fraction of nodes where the solution must evaluate.
pub const MIN_VALID_FRACTION: f64 = 0.8;
/// Minimum nodes per active axis of a residual grid.
pub const MIN_ACTIVE_NODES: usize = 8;

pub const EQUATIONS: [&str; 9] = [
    "continuity",
    "momentum_x",
    "momentum_y",
    "momentum_z",
    "pressure",
    "induction_x",
    "induction_y",
    "induction_z",
    "div_h",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn point(x: f64) -> Self {
        Self { min: x, max: x, n: 1 }
    }

    pub fn is_active(&self) -> bool {
        self.n > 1
    }

    pub fn nodes(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![0.5 * (self.min + self.max)];
        }
        let d = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i + 1 == self.n { self.max } else { self.min + d * i as f64 }).collect()
    }

    fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }
}

/// A single time slice or a range of times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    Slice(f64),
    Range { t0: f64, t1: f64, nt: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t: TimeSpec,
    pub x: Axis,
    pub y: Axis,
    pub z: Axis,
}

impl GridSpec {
    pub fn axes(&self) -> [Axis; 4] {
        let t = match self.t {
            TimeSpec::Slice(t) => Axis::point(t),
            TimeSpec::Range { t0, t1, nt } => Axis { min: t0, max: t1, n: nt },
        };
        [t, self.x, self.y, self.z]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in ["t", "x", "y", "z"].iter().zip(self.axes()) {
            if a.n == 0 || !a.min.is_finite() || !a.max.is_finite() {
                return Err(Error::Verification(format!("axis {name}: need n >= 1 and finite bounds")));
            }
            if a.n > 1 && !(a.max > a.min) {
                return Err(Error::Verification(format!("axis {name}: need max > min")));
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> [Vec<f64>; 4] {
        self.axes().map(|a| a.nodes())
    }

    /// Smallest spacing over the active axes.
    pub fn spacing(&self) -> Result<f64> {
        self.axes()
            .iter()
            .filter(|a| a.is_active())
            .map(Axis::spacing)
            .reduce(f64::min)
            .ok_or_else(|| Error::Verification("grid has no active axis".into()))
    }

    /// Nodes for residual evaluation: inactive axes become three nodes at
    /// spacing `h` around their coordinate.
    pub fn with_ghosts(&self) -> Result<[Vec<f64>; 4]> {
        self.validate()?;
        let h = self.spacing()?;
        let axes = self.axes();
        let mut out: [Vec<f64>; 4] = Default::default();
        for (k, a) in axes.iter().enumerate() {
            out[k] = if a.is_active() {
                if a.n < MIN_ACTIVE_NODES {
                    return Err(Error::Verification(format!(
                        "grid too coarse: {} nodes on an active axis, need >= {MIN_ACTIVE_NODES}",
                        a.n
                    )));
                }
                a.nodes()
            } else {
                let c = 0.5 * (a.min + a.max);
                vec![c - h, c, c + h]
            };
        }
        Ok(out)
    }

    /// The same box with `level + 1` nodes on every active axis.
    pub fn at_level(&self, level: usize) -> Self {
        let mut g = *self;
        for a in [&mut g.x, &mut g.y, &mut g.z] {
            if a.is_active() {
                a.n = level + 1;
            }
        }
        if let TimeSpec::Range { nt, .. } = &mut g.t {
            if *nt > 1 {
                *nt = level + 1;
            }
        }
        g
    }
}

/// Solution values on a tensor grid, `z` varying fastest.
#[derive(Clone, Debug)]
pub struct SolutionField {
    pub tag: String,
    pub nodes: [Vec<f64>; 4],
    pub values: Vec<State>,
    pub valid: Vec<bool>,
}

impl SolutionField {
    pub fn shape(&self) -> [usize; 4] {
        [self.nodes[0].len(), self.nodes[1].len(), self.nodes[2].len(), self.nodes[3].len()]
    }

    pub fn index(&self, i: [usize; 4]) -> usize {
        let s = self.shape();
        ((i[0] * s[1] + i[1]) * s[2] + i[2]) * s[3] + i[3]
    }

    pub fn coords(&self, i: [usize; 4]) -> [f64; 4] {
        [self.nodes[0][i[0]], self.nodes[1][i[1]], self.nodes[2][i[2]], self.nodes[3][i[3]]]
    }

    pub fn valid_fraction(&self) -> f64 {
        self.valid.iter().filter(|&&v| v).count() as f64 / self.valid.len().max(1) as f64
    }

    /// Multi-indices of every node, in storage order.
    pub fn indices(&self) -> Vec<[usize; 4]> {
        let s = self.shape();
        let mut out = Vec::with_capacity(s.iter().product());
        for a in 0..s[0] {
            for b in 0..s[1] {
                for c in 0..s[2] {
                    for d in 0..s[3] {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
        out
    }

    fn interior(&self) -> Vec<[usize; 4]> {
        let s = self.shape();
        self.indices()
            .into_iter()
            .filter(|i| (0..4).all(|k| i[k] >= 1 && i[k] + 1 < s[k]))
            .collect()
    }

    fn spacing(&self, axis: usize, i: usize) -> f64 {
        0.5 * (self.nodes[axis][i + 1] - self.nodes[axis][i - 1])
    }

    /// Central difference of `g(state)` along `axis`; `None` if a node is masked.
    fn diff<const N: usize, G: Fn(&State) -> [f64; N]>(&self, i: [usize; 4], axis: usize, g: G) -> Option<[f64; N]> {
        let mut lo = i;
        let mut hi = i;
        lo[axis] -= 1;
        hi[axis] += 1;
        let (a, b) = (self.index(lo), self.index(hi));
        if !self.valid[a] || !self.valid[b] {
            return None;
        }
        let (ga, gb) = (g(&self.values[a]), g(&self.values[b]));
        let h2 = 2.0 * self.spacing(axis, i[axis]);
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = (gb[k] - ga[k]) / h2;
        }
        Some(out)
    }

    fn center(&self, i: [usize; 4]) -> Option<&State> {
        let k = self.index(i);
        self.valid[k].then(|| &self.values[k])
    }

    /// Derivatives of all eight unknowns along `t, x, y, z`.
    fn gradient(&self, i: [usize; 4]) -> Option<[[f64; 8]; 4]> {
        Some([
            self.diff(i, 0, State::to_array)?,
            self.diff(i, 1, State::to_array)?,
            self.diff(i, 2, State::to_array)?,
            self.diff(i, 3, State::to_array)?,
        ])
    }

    /// Curl of `g(state)` by central differences.
    fn curl<G: Fn(&State) -> Vec3 + Copy>(&self, i: [usize; 4], g: G) -> Option<Vec3> {
        let arr = move |u: &State| -> [f64; 3] {
            let v = g(u);
            [v.x, v.y, v.z]
        };
        let dx = self.diff(i, 1, arr)?;
        let dy = self.diff(i, 2, arr)?;
        let dz = self.diff(i, 3, arr)?;
        Some(Vec3::new(dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]))
    }
}

fn evaluate_nodes(sol: &dyn Solution, nodes: [Vec<f64>; 4]) -> SolutionField {
    let mut field = SolutionField { tag: sol.tag().to_string(), nodes, values: vec![], valid: vec![] };
    let idx = field.indices();
    let results: Vec<Option<State>> = idx
        .par_iter()
        .map(|&i| {
            let c = field.coords(i);
            sol.evaluate(c[0], &Vec3::new(c[1], c[2], c[3])).ok().filter(State::is_finite)
        })
        .collect();
    let nan = State::new(f64::NAN, f64::NAN, Vec3::repeat(f64::NAN), Vec3::repeat(f64::NAN));
    field.valid = results.iter().map(Option::is_some).collect();
    field.values = results.into_iter().map(|u| u.unwrap_or(nan)).collect();
    field
}

fn require_valid(field: SolutionField) -> Result<SolutionField> {
    let frac = field.valid_fraction();
    if frac < MIN_VALID_FRACTION {
        return Err(Error::Sampling(format!(
            "only {:.1}% of nodes valid, need {:.0}%",
            100.0 * frac,
            100.0 * MIN_VALID_FRACTION
        )));
    }
    Ok(field)
}

/// Evaluate the solution at every grid node; phase-solve failures are masked.
pub fn sample_field(sol: &dyn Solution, grid: &GridSpec) -> Result<SolutionField> {
    grid.validate()?;
    require_valid(evaluate_nodes(sol, grid.nodes()))
}

/// Sample including the ghost nodes needed by the difference stencils.
pub fn sample_for_residuals(sol: &dyn Solution, grid: &GridSpec) -> Result<SolutionField> {
    require_valid(evaluate_nodes(sol, grid.with_ghosts()?))
}

/// Convergence order, or exactness when the residual vanishes to round-off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Rate(f64),
    Exact,
}

impl Order {
    pub fn passes(&self, min_rate: f64) -> bool {
        match self {
            Order::Exact => true,
            Order::Rate(r) => *r >= min_rate,
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Rate(r) => s.serialize_f64(*r),
            Order::Exact => s.serialize_str("exact"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "exact" => Ok(Order::Exact),
            serde_json::Value::Number(n) => Ok(Order::Rate(n.as_f64().unwrap_or(f64::NAN))),
            v => Err(serde::de::Error::custom(format!("invalid order {v}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationResidual {
    pub equation: String,
    pub l2: f64,
    pub linf: f64,
    pub h: f64,
    pub order: Option<Order>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub tag: String,
    pub h: f64,
    pub points: usize,
    pub equations: Vec<EquationResidual>,
}

impl ResidualReport {
    pub fn get(&self, equation: &str) -> Option<&EquationResidual> {
        self.equations.iter().find(|e| e.equation == equation)
    }
}

/// RMS and maximum norm with compensated summation.
pub fn norms<I: IntoIterator<Item = f64>>(values: I) -> (f64, f64) {
    let mut sum = CompensatedSum::default();
    let mut max = 0.0f64;
    let mut n = 0usize;
    for v in values {
        sum.add(v * v);
        max = max.max(v.abs());
        n += 1;
    }
    if n == 0 {
        return (0.0, 0.0);
    }
    ((sum.value() / n as f64).sqrt(), max)
}

fn field_spacing(field: &SolutionField) -> f64 {
    field
        .nodes
        .iter()
        .filter(|n| n.len() > 1)
        .map(|n| (n[n.len() - 1] - n[0]) / (n.len() - 1) as f64)
        .fold(f64::INFINITY, f64::min)
}

/// Evaluate `term` at every interior node whose stencil is unmasked.
fn interior_map<const N: usize, F>(field: &SolutionField, term: F) -> Result<Vec<[f64; N]>>
where
    F: Fn([usize; 4]) -> Option<[f64; N]> + Sync,
{
    let interior = field.interior();
    if interior.is_empty() {
        return Err(Error::Verification("grid too coarse: no interior nodes".into()));
    }
    let out: Vec<[f64; N]> = interior.par_iter().map(|&i| term(i)).collect::<Vec<_>>().into_iter().flatten().collect();
    if out.is_empty() {
        return Err(Error::Verification("no interior node with a complete stencil".into()));
    }
    Ok(out)
}

fn report<const N: usize>(tag: &str, h: f64, names: [&str; N], rows: &[[f64; N]]) -> ResidualReport {
    let equations = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let (l2, linf) = norms(rows.iter().map(|r| r[k]));
            EquationResidual { equation: name.to_string(), l2, linf, h, order: None }
        })
        .collect();
    ResidualReport { tag: tag.to_string(), h, points: rows.len(), equations }
}

/// Pointwise residuals of the nine scalar equations.
fn pde_terms(field: &SolutionField, i: [usize; 4], kappa: f64) -> Option<[f64; 9]> {
    let u = field.center(i)?;
    let g = field.gradient(i)?;
    // g[axis][component], components (rho, p, u, v, w, H1, H2, H3)
    let dt = g[0];
    let grad = |c: usize| Vec3::new(g[1][c], g[2][c], g[3][c]);
    let div = |c0: usize| g[1][c0] + g[2][c0 + 1] + g[3][c0 + 2];
    let div_v = div(2);
    let curl_h = field.curl(i, |s| s.h)?;
    let lorentz = u.h.cross(&curl_h) / u.rho;
    let mut out = [0.0; 9];
    out[0] = dt[0] + u.v.dot(&grad(0)) + u.rho * div_v;
    let gp = grad(1);
    for k in 0..3 {
        let adv = u.v.dot(&grad(2 + k));
        out[1 + k] = dt[2 + k] + adv + gp[k] / u.rho + lorentz[k];
    }
    out[4] = dt[1] + u.v.dot(&gp) + kappa * u.p * div_v;
    let curl_e = field.curl(i, |s| s.v.cross(&s.h))?;
    for k in 0..3 {
        out[5 + k] = dt[5 + k] - curl_e[k];
    }
    out[8] = div(5);
    Some(out)
}

/// Residual norms of continuity, momentum, pressure, induction and divergence.
pub fn pde_residual(field: &SolutionField, model: &FluidModel) -> Result<ResidualReport> {
    let kappa = model.kappa;
    let rows = interior_map(field, |i| pde_terms(field, i, kappa))?;
    Ok(report(&field.tag, field_spacing(field), EQUATIONS, &rows))
}

/// L2 and L-infinity norms of `div H`.
pub fn div_h(field: &SolutionField) -> Result<(f64, f64)> {
    let rows = interior_map(field, |i| {
        let d = [field.diff(i, 1, |u| [u.h.x])?, field.diff(i, 2, |u| [u.h.y])?, field.diff(i, 3, |u| [u.h.z])?];
        Some([d[0][0] + d[1][0] + d[2][0]])
    })?;
    Ok(norms(rows.iter().map(|r| r[0])))
}

/// A vector field on the interior nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct InteriorField {
    pub points: Vec<[f64; 4]>,
    pub values: Vec<Vec3>,
}

fn interior_vectors<F>(field: &SolutionField, f: F) -> Result<InteriorField>
where
    F: Fn([usize; 4]) -> Option<Vec3> + Sync,
{
    let rows = interior_map(field, |i| {
        let v = f(i)?;
        let c = field.coords(i);
        Some([c[0], c[1], c[2], c[3], v.x, v.y, v.z])
    })?;
    Ok(InteriorField {
        points: rows.iter().map(|r| [r[0], r[1], r[2], r[3]]).collect(),
        values: rows.iter().map(|r| Vec3::new(r[4], r[5], r[6])).collect(),
    })
}

/// `(H . grad) H - grad |H|^2 / 2`.
pub fn lorentz_force(field: &SolutionField) -> Result<InteriorField> {
    interior_vectors(field, |i| {
        let u = field.center(i)?;
        let curl = field.curl(i, |s| s.h)?;
        Some(-u.h.cross(&curl))
    })
}

pub fn vorticity(field: &SolutionField) -> Result<InteriorField> {
    interior_vectors(field, |i| field.curl(i, |s| s.v))
}

pub fn current(field: &SolutionField) -> Result<InteriorField> {
    interior_vectors(field, |i| field.curl(i, |s| s.h))
}

pub fn derived_field(field: &SolutionField, q: Quantity) -> Result<InteriorField> {
    match q {
        Quantity::LorentzForce => lorentz_force(field),
        Quantity::Vorticity => vorticity(field),
        Quantity::Current => current(field),
    }
}

/// Norms of the difference between a finite-difference field and the
/// solution's closed form; `None` if the solution has no closed form.
pub fn closed_form_error(sol: &dyn Solution, field: &SolutionField, q: Quantity) -> Result<Option<(f64, f64)>> {
    let c = field.coords([1, 1, 1, 1]);
    if sol.closed_form(q, c[0], &Vec3::new(c[1], c[2], c[3])).is_none() {
        return Ok(None);
    }
    let fd = derived_field(field, q)?;
    let diffs: Vec<Option<f64>> = fd
        .points
        .par_iter()
        .zip(fd.values.par_iter())
        .map(|(p, v)| match sol.closed_form(q, p[0], &Vec3::new(p[1], p[2], p[3])) {
            Some(Ok(exact)) => Some((v - exact).norm()),
            _ => None,
        })
        .collect();
    Ok(Some(norms(diffs.into_iter().flatten())))
}

/// Order between consecutive levels, or `Exact` when all errors vanish.
pub fn order_of(errors: &[f64], spacings: &[f64]) -> Option<Order> {
    if errors.len() < 2 {
        return None;
    }
    if errors.iter().all(|&e| e <= EXACT_TOL) {
        return Some(Order::Exact);
    }
    let rate = errors
        .windows(2)
        .zip(spacings.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .map(|r| if r.is_nan() { f64::NEG_INFINITY } else { r })
        .fold(f64::INFINITY, f64::min);
    Some(Order::Rate(rate))
}

/// Residual reports on several refinement levels and per-equation orders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub tag: String,
    pub levels: Vec<usize>,
    pub reports: Vec<ResidualReport>,
    /// Finest-level norms with the order over all levels.
    pub summary: Vec<EquationResidual>,
}

impl ConvergenceReport {
    pub fn get(&self, equation: &str) -> Option<&EquationResidual> {
        self.summary.iter().find(|e| e.equation == equation)
    }

    pub fn passes(&self, min_rate: f64) -> bool {
        self.summary.iter().all(|e| e.order.is_some_and(|o| o.passes(min_rate)))
    }
}

fn summarize(tag: &str, levels: &[usize], reports: Vec<ResidualReport>) -> ConvergenceReport {
    let hs: Vec<f64> = reports.iter().map(|r| r.h).collect();
    let last = reports.last().expect("at least one level");
    let summary = last
        .equations
        .iter()
        .map(|e| {
            let errs: Vec<f64> = reports.iter().map(|r| r.get(&e.equation).map_or(f64::NAN, |x| x.l2)).collect();
            EquationResidual { order: order_of(&errs, &hs), ..e.clone() }
        })
        .collect();
    ConvergenceReport { tag: tag.to_string(), levels: levels.to_vec(), reports, summary }
}

/// PDE residuals of `sol` on `grid` refined to each of `levels` intervals per active axis.
pub fn convergence_order(sol: &dyn Solution, grid: &GridSpec, levels: &[usize]) -> Result<ConvergenceReport> {
    if levels.len() < 2 {
        return Err(Error::Verification("need at least two grid levels".into()));
    }
    let model = sol.fluid();
    let reports = levels
        .iter()
        .map(|&n| pde_residual(&sample_for_residuals(sol, &grid.at_level(n))?, &model))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(sol.tag(), levels, reports))
}

/// Finite-difference versus closed-form error of a derived field on each level.
pub fn closed_form_convergence(
    sol: &dyn Solution,
    grid: &GridSpec,
    levels: &[usize],
    q: Quantity,
) -> Result<Option<ConvergenceReport>> {
    let mut reports = Vec::new();
    for &n in levels {
        let field = sample_for_residuals(sol, &grid.at_level(n))?;
        let Some((l2, linf)) = closed_form_error(sol, &field, q)? else {
            return Ok(None);
        };
        let h = field_spacing(&field);
        let name = serde_json::to_value(q)?.as_str().unwrap_or("closed_form").to_string();
        reports.push(ResidualReport {
            tag: sol.tag().to_string(),
            h,
            points: 0,
            equations: vec![EquationResidual { equation: name, l2, linf, h, order: None }],
        });
    }
    Ok(Some(summarize(sol.tag(), levels, reports)))
}

/// Residuals of the reduced entropic system: material derivatives of all
/// unknowns, `div v`, force balance, `(H . grad) v` and `div H`.
pub fn ee_general_check(field: &SolutionField) -> Result<ResidualReport> {
    let rows = interior_map(field, |i| {
        let u = field.center(i)?;
        let g = field.gradient(i)?;
        let mut material = 0.0f64;
        for c in 0..8 {
            let d = g[0][c] + u.v.x * g[1][c] + u.v.y * g[2][c] + u.v.z * g[3][c];
            material = material.max(d.abs());
        }
        let div = |c0: usize| g[1][c0] + g[2][c0 + 1] + g[3][c0 + 2];
        let curl_h = field.curl(i, |s| s.h)?;
        let force = Vec3::new(g[1][1], g[2][1], g[3][1]) + u.h.cross(&curl_h);
        let mut hv = Vec3::zeros();
        for k in 0..3 {
            hv[k] = u.h.x * g[1][2 + k] + u.h.y * g[2][2 + k] + u.h.z * g[3][2 + k];
        }
        Some([material, div(2), force.norm(), hv.norm(), div(5)])
    })?;
    Ok(report(
        &field.tag,
        field_spacing(field),
        ["material_derivative", "div_v", "force_balance", "h_grad_v", "div_h"],
        &rows,
    ))
}

/// Circulation of `v` around a closed polyline advected with the flow by
/// explicit Euler steps of size `dt`; returns the value at each step.
pub fn circulation(sol: &dyn Solution, curve: &[Vec3], t0: f64, dt: f64, steps: usize) -> Result<Vec<f64>> {
    if curve.len() < 3 {
        return Err(Error::Verification("circulation curve needs >= 3 nodes".into()));
    }
    let mut pts = curve.to_vec();
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = t0 + k as f64 * dt;
        let vel = pts.iter().map(|p| Ok(sol.evaluate(t, p)?.v)).collect::<Result<Vec<_>>>()?;
        let mut sum = CompensatedSum::default();
        for i in 0..pts.len() {
            let j = (i + 1) % pts.len();
            sum.add(0.5 * (vel[i] + vel[j]).dot(&(pts[j] - pts[i])));
        }
        out.push(sum.value());
        for (p, v) in pts.iter_mut().zip(&vel) {
            *p += dt * v;
        }
    }
    Ok(out)
}

/// Polygon with `n` nodes on a circle in the plane spanned by `e1`, `e2`.
pub fn circle(center: Vec3, radius: f64, e1: Vec3, e2: Vec3, n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            center + radius * (a.cos() * e1 + a.sin() * e2)
        })
        .collect()
}

/// A solution with a smooth, non-solenoidal perturbation of `H`; a negative
/// control for the residual checks.
pub struct Perturbed<'a> {
    pub inner: &'a dyn Solution,
    pub amplitude: f64,
}

impl Solution for Perturbed<'_> {
    fn tag(&self) -> &str {
        self.inner.tag()
    }
    fn fluid(&self) -> FluidModel {
        self.inner.fluid()
    }
    fn rank_bound(&self) -> usize {
        4
    }
    fn evaluate(&self, t: f64, x: &Vec3) -> Result<State> {
        let mut u = self.inner.evaluate(t, x)?;
        u.h += self.amplitude * Vec3::new((3.0 * x.x + 0.3).sin(), (2.0 * x.y - 0.2).sin(), (x.z + t).cos());
        Ok(u)
    }
    fn manifest(&self) -> serde_json::Value {
        serde_json::json!({"perturbed": self.inner.manifest(), "amplitude": self.amplitude})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::Solution;
    use serde_json::Value;

    /// Closed-form test fields.
    struct Field<F: Fn(f64, &Vec3) -> State + Send + Sync> {
        f: F,
        kappa: f64,
    }

    impl<F: Fn(f64, &Vec3) -> State + Send + Sync> Solution for Field<F> {
        fn tag(&self) -> &str {
            "test"
        }
        fn fluid(&self) -> FluidModel {
            FluidModel::new(self.kappa)
        }
        fn rank_bound(&self) -> usize {
            4
        }
        fn evaluate(&self, t: f64, x: &Vec3) -> Result<State> {
            Ok((self.f)(t, x))
        }
        fn manifest(&self) -> Value {
            Value::Null
        }
    }

    fn line_grid() -> GridSpec {
        GridSpec {
            t: TimeSpec::Slice(0.1),
            x: Axis { min: -1.0, max: 1.0, n: 17 },
            y: Axis::point(0.2),
            z: Axis::point(-0.1),
        }
    }

    #[test]
    fn constant_state_is_exact() {
        let sol = Field {
            f: |_, _| State::new(1.0, 2.0, Vec3::new(0.1, 0.2, 0.3), Vec3::new(0.5, 0.0, 1.0)),
            kappa: 1.4,
        };
        let rep = convergence_order(&sol, &line_grid(), &[16, 32]).unwrap();
        assert!(rep.summary.iter().all(|e| e.order == Some(Order::Exact)));
        let field = sample_field(&sol, &line_grid()).unwrap();
        assert!(field.values.iter().all(|u| *u == field.values[0]));
    }

    #[test]
    fn linear_field_has_zero_divergence() {
        let sol = Field { f: |_, x| State::new(1.0, 1.0, Vec3::zeros(), Vec3::new(x.x, -x.y, 0.0)), kappa: 1.4 };
        let mut g = line_grid();
        g.y = Axis { min: -1.0, max: 1.0, n: 9 };
        let field = sample_for_residuals(&sol, &g).unwrap();
        let (l2, linf) = div_h(&field).unwrap();
        assert!(l2 < 1e-14 && linf < 1e-14);
    }

    #[test]
    fn manufactured_defect_converges_at_second_order() {
        // rho = 1 + 0.1 sin(x - t/2) advected at speed 1/2 satisfies continuity
        // exactly; the residual is pure truncation error
        let sol = Field {
            f: |t, x| State::new(1.0 + 0.1 * (x.x - 0.5 * t).sin(), 1.0, Vec3::new(0.5, 0.0, 0.0), Vec3::zeros()),
            kappa: 1.4,
        };
        let rep = convergence_order(&sol, &line_grid(), &[16, 32, 64]).unwrap();
        let c = rep.get("continuity").unwrap();
        match c.order.unwrap() {
            Order::Rate(r) => assert!((r - 2.0).abs() < 0.1, "{r}"),
            Order::Exact => panic!("expected a finite rate"),
        }
    }

    #[test]
    fn non_solution_has_o1_residual() {
        let sol = Field { f: |_, x| State::new(1.0 + 0.5 * x.x, 1.0, Vec3::new(x.x, 0.0, 0.0), Vec3::zeros()), kappa: 1.4 };
        let rep = convergence_order(&sol, &line_grid(), &[16, 32]).unwrap();
        let c = rep.get("continuity").unwrap();
        assert!(c.l2 > 0.5);
        assert!(!c.order.unwrap().passes(1.8));
    }

    #[test]
    fn masked_nodes_fail_sampling_below_threshold() {
        struct Bad;
        impl Solution for Bad {
            fn tag(&self) -> &str {
                "bad"
            }
            fn fluid(&self) -> FluidModel {
                FluidModel::new(1.4)
            }
            fn rank_bound(&self) -> usize {
                0
            }
            fn evaluate(&self, _: f64, x: &Vec3) -> Result<State> {
                if x.x > -0.5 {
                    Err(Error::InvalidState("masked".into()))
                } else {
                    Ok(State::new(1.0, 1.0, Vec3::zeros(), Vec3::zeros()))
                }
            }
            fn manifest(&self) -> Value {
                Value::Null
            }
        }
        assert!(matches!(sample_field(&Bad, &line_grid()), Err(Error::Sampling(_))));
    }

    #[test]
    fn uniform_flow_preserves_circulation() {
        let sol = Field { f: |_, _| State::new(1.0, 1.0, Vec3::new(0.3, -0.2, 0.1), Vec3::zeros()), kappa: 1.4 };
        let c = circle(Vec3::zeros(), 0.2, Vec3::x(), Vec3::y(), 32);
        let g = circulation(&sol, &c, 0.0, 0.01, 10).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-15));
        let rot = Field { f: |_, x| State::new(1.0, 1.0, Vec3::new(-x.y, x.x, 0.0), Vec3::zeros()), kappa: 1.4 };
        let g = circulation(&rot, &c, 0.0, 0.0, 1).unwrap();
        let exact = 2.0 * std::f64::consts::PI * 0.04;
        assert!((g[0] - exact).abs() / exact < 1e-2);
    }

    #[test]
    fn order_serializes_as_number_or_exact() {
        assert_eq!(serde_json::to_string(&Order::Exact).unwrap(), "\"exact\"");
        assert_eq!(serde_json::to_string(&Order::Rate(2.0)).unwrap(), "2.0");
        let back: Order = serde_json::from_str("\"exact\"").unwrap();
        assert_eq!(back, Order::Exact);
    }

    #[test]
    fn time_spec_accepts_scalar_and_range() {
        let g: GridSpec = serde_json::from_str(
            r#"{"t": 0.5, "x": {"min": 0, "max": 1, "n": 9}, "y": {"min": 0, "max": 0, "n": 1}, "z": {"min": 0, "max": 0, "n": 1}}"#,
        )
        .unwrap();
        assert_eq!(g.t, TimeSpec::Slice(0.5));
        let r: TimeSpec = serde_json::from_str(r#"{"t0": 0, "t1": 1, "nt": 3}"#).unwrap();
        assert_eq!(r, TimeSpec::Range { t0: 0.0, t1: 1.0, nt: 3 });
    }
}
