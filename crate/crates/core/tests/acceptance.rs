//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::Instant;

use nalgebra::SMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riemann_mhd::cli::{cmd_sample, with_threads};
use riemann_mhd::config::Built;
use riemann_mhd::double::existence_table;
use riemann_mhd::fixtures::{self, Fixture};
use riemann_mhd::gmc::{commutator_residual, gmc_commutator_residual, gmc_span_residual, jacobian_rank, span_residual};
use riemann_mhd::mhd::{
    characteristic_speeds, dispersion_residual_scaled, eigenvector, flux_jacobian, wave_relation_residual, FamilyKind,
    FluidModel, Sign, State, Vec3, WaveFamily,
};
use riemann_mhd::specfun::{hyp2f1, hyp2f1_oracle};
use riemann_mhd::verify::{closed_form_convergence, convergence_order, Axis, ConvergenceReport, GridSpec, Order};
use riemann_mhd::wave::{Quantity, Solution};

const KAPPAS: [f64; 5] = [1.0, 1.4, 5.0 / 3.0, 2.0, 3.0];
const LEVELS: [usize; 3] = [64, 128, 256];
const MIN_ORDER: f64 = 1.8;

struct Sample {
    state: State,
    model: FluidModel,
    l: Vec3,
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn random_ball(rng: &mut ChaCha8Rng, radius: f64) -> Vec3 {
    radius * random_unit(rng) * rng.gen::<f64>().cbrt()
}

fn samples() -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    (0..200)
        .map(|_| {
            let state = State::new(
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
                random_ball(&mut rng, 5.0),
                random_ball(&mut rng, 5.0),
            );
            let kappa = KAPPAS[rng.gen_range(0..KAPPAS.len())];
            Sample { state, model: FluidModel::new(kappa), l: random_unit(&mut rng) }
        })
        .collect()
}

fn families() -> Vec<WaveFamily> {
    let mut v: Vec<_> = [FamilyKind::E1, FamilyKind::E2, FamilyKind::E3].map(|k| WaveFamily::new(k, Sign::Plus)).to_vec();
    for k in [FamilyKind::Alfven, FamilyKind::Slow, FamilyKind::Fast] {
        v.push(WaveFamily::new(k, Sign::Plus));
        v.push(WaveFamily::new(k, Sign::Minus));
    }
    v
}

/// Closed-form `lambda0` roots: `-v.l + {0, 0, +-dA, +-dS, +-dF}`.
fn closed_roots(s: &Sample) -> [f64; 8] {
    let c = characteristic_speeds(&s.state, &s.model, &s.l).unwrap();
    let vl = s.state.v.dot(&s.l);
    let mut r = [0.0, 0.0, c.alfven, -c.alfven, c.slow, -c.slow, c.fast, -c.fast].map(|d| d - vl);
    r.sort_by(f64::total_cmp);
    r
}

fn criterion_1(samples: &[Sample]) -> (bool, String) {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for s in samples {
        let mut m = SMatrix::<f64, 8, 8>::zeros();
        for axis in 1..=3 {
            m += s.l[axis - 1] * flux_jacobian(&s.state, &s.model, axis).unwrap();
        }
        // det(lambda0 I + M) = 0  <=>  lambda0 = -eig(M)
        let mut num: Vec<f64> = m.complex_eigenvalues().iter().map(|z| -z.re).collect();
        num.sort_by(f64::total_cmp);
        let exact = closed_roots(s);
        let scale = exact.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        for (a, b) in num.iter().zip(exact) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (worst <= 1e-8 && secs < 5.0, format!("max relative root error {worst:.2e} over {} states, {secs:.2} s", samples.len()))
}

fn criterion_2(samples: &[Sample]) -> (bool, String) {
    let mut disp = 0.0f64;
    let mut wave = 0.0f64;
    let mut degenerate = 0;
    for s in samples {
        for fam in families() {
            match eigenvector(&s.state, &s.model, &s.l, fam) {
                Ok(ev) => {
                    disp = disp.max(dispersion_residual_scaled(&s.state, &s.model, &ev.wave_vector).unwrap());
                    wave = wave.max(wave_relation_residual(&s.state, &s.model, &ev.wave_vector, &ev.gamma).unwrap());
                }
                Err(_) => degenerate += 1,
            }
        }
    }
    (
        disp <= 1e-10 && wave <= 1e-8,
        format!("max scaled dispersion {disp:.2e}, max wave relation {wave:.2e}, {degenerate} flagged degeneracies skipped"),
    )
}

struct Pde {
    name: &'static str,
    report: Result<ConvergenceReport, String>,
}

fn run_pde(fx: &Fixture) -> Pde {
    let report = fx
        .solution
        .build()
        .map_err(|e| e.to_string())
        .and_then(|b| convergence_order(b.solution(), &fx.grid, &LEVELS).map_err(|e| e.to_string()));
    Pde { name: fx.name, report }
}

fn fmt_order(o: Option<Order>) -> String {
    match o {
        Some(Order::Exact) => "exact".into(),
        Some(Order::Rate(r)) => format!("{r:.3}"),
        None => "n/a".into(),
    }
}

fn worst_equation(rep: &ConvergenceReport) -> String {
    let worst = rep.summary.iter().min_by(|a, b| {
        let key = |o: Option<Order>| match o {
            Some(Order::Rate(r)) => r,
            _ => f64::INFINITY,
        };
        key(a.order).total_cmp(&key(b.order))
    });
    match worst {
        Some(e) => format!("min order {} ({})", fmt_order(e.order), e.equation),
        None => "no equations".into(),
    }
}

fn criterion_3(pde: &[Pde], secs: f64) -> (bool, String) {
    let mut ok = secs < 120.0;
    let mut failed = Vec::new();
    for p in pde {
        let pass = match &p.report {
            Ok(rep) => {
                println!("    {:<16} {}", p.name, worst_equation(rep));
                rep.passes(MIN_ORDER)
            }
            Err(e) => {
                println!("    {:<16} error: {e}", p.name);
                false
            }
        };
        if !pass {
            failed.push(p.name);
        }
        ok &= pass;
    }
    let detail = if failed.is_empty() {
        format!("all {} constructors converge at order >= {MIN_ORDER}, {secs:.1} s", pde.len())
    } else {
        format!("below order {MIN_ORDER}: {}; {secs:.1} s", failed.join(", "))
    };
    (ok, detail)
}

fn criterion_4(pde: &[Pde]) -> (bool, String) {
    let mut failed = Vec::new();
    for p in pde {
        let order = p.report.as_ref().ok().and_then(|r| r.get("div_h")).and_then(|e| e.order);
        println!("    {:<16} div H order {}", p.name, fmt_order(order));
        if !order.is_some_and(|o| o.passes(MIN_ORDER)) {
            failed.push(p.name);
        }
    }
    let detail = if failed.is_empty() { format!("{} constructors", pde.len()) } else { format!("failed: {}", failed.join(", ")) };
    (failed.is_empty(), detail)
}

fn criterion_5() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = rng.gen_range(-2.0..2.0);
        let c = rng.gen_range(0.6..3.0);
        let z = rng.gen_range(-50.0..0.0);
        let f = hyp2f1(a, 0.5, c, z).unwrap();
        let g = hyp2f1_oracle(a, 0.5, c, z).unwrap();
        worst = worst.max((f - g).abs() / g.abs().max(1e-300));
    }
    let mut ident = 0.0f64;
    for x in [0.25f64, 1.0, 4.0] {
        let exact = x.sqrt().asinh() / x.sqrt();
        ident = ident.max((hyp2f1(0.5, 0.5, 1.5, -x).unwrap() - exact).abs() / exact);
    }
    (worst <= 1e-9 && ident <= 1e-10, format!("series vs oracle {worst:.2e}, arcsinh identity {ident:.2e}"))
}

fn criterion_6(ff: &Pde) -> (bool, String) {
    let fx = fixtures::ff_kappa2();
    let pde_ok = ff.report.as_ref().is_ok_and(|r| r.passes(MIN_ORDER));
    let pde = match &ff.report {
        Ok(r) => worst_equation(r),
        Err(e) => e.clone(),
    };
    let built = fx.solution.build().unwrap();
    let current = closed_form_convergence(built.solution(), &fx.grid, &LEVELS, Quantity::Current);
    let (cur_ok, cur) = match current {
        Ok(Some(rep)) => {
            let e = &rep.summary[0];
            (rep.passes(MIN_ORDER), format!("current order {} (l2 {:.2e})", fmt_order(e.order), e.l2))
        }
        Ok(None) => (false, "no closed-form current".into()),
        Err(e) => (false, e.to_string()),
    };
    (pde_ok && cur_ok, format!("PDE {pde}; {cur}"))
}

fn criterion_7() -> (bool, String) {
    let expected = [
        [true, true, true, false],
        [true, true, false, false],
        [true, false, true, false],
        [false, false, false, false],
    ];
    let t = existence_table();
    let mismatches = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&(i, j)| t[i][j] != expected[i][j]).count();
    (mismatches == 0, format!("{mismatches} of 16 entries differ"))
}

/// Random points in the fixture box, thin axes widened by 0.1.
fn random_points(grid: &GridSpec, rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, Vec3)> {
    let axes = grid.axes();
    let widen = |a: Axis| if a.n > 1 { (a.min, a.max) } else { (a.min - 0.1, a.max + 0.1) };
    let r = axes.map(widen);
    (0..n)
        .map(|_| {
            let mut q = [0.0; 4];
            for k in 0..4 {
                q[k] = rng.gen_range(r[k].0..=r[k].1);
            }
            (q[0], Vec3::new(q[1], q[2], q[3]))
        })
        .collect()
}

fn criterion_8() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ok = true;
    let mut notes = Vec::new();
    for fx in fixtures::all() {
        let built = fx.solution.build().unwrap();
        let bound = match built {
            Built::Simple(_) => 1,
            Built::Double(_) => 2,
        };
        let sol = built.solution();
        let mut worst = 0;
        let mut evaluated = 0;
        for (t, x) in random_points(&fx.grid, &mut rng, 100) {
            if let Ok(r) = jacobian_rank(sol, t, &x) {
                worst = worst.max(r);
                evaluated += 1;
            }
        }
        println!("    {:<16} max rank {worst} (bound {bound}) at {evaluated}/100 points", fx.name);
        if worst > bound || evaluated < 90 {
            ok = false;
            notes.push(fx.name);
        }
    }
    (ok, if notes.is_empty() { "all fixtures within bound".into() } else { format!("failed: {}", notes.join(", ")) })
}

fn criterion_9() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for fx in [fixtures::aa(), fixtures::ff_planar(), fixtures::fe1_counter()] {
        let built = fx.solution.build().unwrap();
        let d = built.as_double().unwrap();
        let c = gmc_commutator_residual(d, 8).unwrap();
        let s = gmc_span_residual(d, 8).unwrap();
        ok &= c <= 1e-6 && s <= 1e-6;
        parts.push(format!("{} [{c:.1e}, {s:.1e}]", fx.name));
    }
    let pts: Vec<(f64, f64)> = (0..25).map(|k| (-0.8 + 0.4 * (k / 5) as f64, -0.8 + 0.4 * (k % 5) as f64)).collect();
    let f = |s: f64, r: f64| Ok([s, r, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let g1 = |_: f64, _: f64| Ok([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let g2 = |s: f64, _: f64| Ok([0.0, s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let neg_c = commutator_residual(f, g1, g2, &pts).unwrap();
    let lam = |_: f64, r: f64| {
        Ok([nalgebra::Vector4::new(0.0, r.cos(), 0.0, r.sin()), nalgebra::Vector4::new(0.0, 0.0, 1.0, 0.0)])
    };
    let neg_s = span_residual(lam, &pts).unwrap();
    ok &= neg_c > 1e-2 && neg_s > 1e-2;
    (ok, format!("{}; negative controls [{neg_c:.2e}, {neg_s:.2e}]", parts.join(", ")))
}

fn criterion_10() -> (bool, String) {
    let fx = fixtures::aa();
    let built = fx.solution.build().unwrap();
    let mut grid = fx.grid;
    grid.x = Axis { min: -0.5, max: 0.5, n: 24 };
    grid.y = Axis { min: -0.4, max: 0.6, n: 24 };
    grid.z = Axis { min: 0.0, max: 0.2, n: 5 };
    let sol: &dyn Solution = built.solution();
    let one = with_threads(Some(1), || cmd_sample(sol, &grid)).unwrap();
    let eight = with_threads(Some(8), || cmd_sample(sol, &grid)).unwrap();
    let rows = one.lines().count() - 1;
    (one == eight, format!("{rows} rows, {} bytes, identical = {}", one.len(), one == eight))
}

fn report(n: usize, (ok, detail): (bool, String), all: &mut bool) {
    println!("criterion {n:>2}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    *all &= ok;
}

fn main() {
    let mut all = true;
    let s = samples();
    report(1, criterion_1(&s), &mut all);
    report(2, criterion_2(&s), &mut all);

    let start = Instant::now();
    let mut fx = fixtures::simple();
    fx.extend(fixtures::double());
    let pde: Vec<Pde> = fx.iter().map(run_pde).collect();
    let secs = start.elapsed().as_secs_f64();
    report(3, criterion_3(&pde, secs), &mut all);
    report(4, criterion_4(&pde), &mut all);
    report(5, criterion_5(), &mut all);
    report(6, criterion_6(&run_pde(&fixtures::ff_kappa2())), &mut all);
    report(7, criterion_7(), &mut all);
    report(8, criterion_8(), &mut all);
    report(9, criterion_9(), &mut all);
    report(10, criterion_10(), &mut all);
    if !all {
        std::process::exit(1);
    }
}
