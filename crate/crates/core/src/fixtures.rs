//! Reference parameter sets with verification grids, one per constructor.
//!
//! Each grid has a single active axis; the difference stencils still sample
//! the three other directions at spacing `h`, so every derivative in the
//! equations is exercised. Axes are chosen so that both invariants of a
//! double wave vary along the active direction where the geometry allows.

use std::f64::consts::FRAC_PI_2;

use crate::config::SolutionConfig;
use crate::double::{
    Ae1Params, AaParams, EeAlignedParams, EePerpAParams, EePerpBParams, Fe1CounterParams, Fe1Kappa2Params,
    Fe1PerpKappa2Params, FfCounterParams, FfKappa2Params, FfPlanarParams,
};
use crate::mhd::{Sign, Vec3};
use crate::profiles::{Profile, Profile2, VectorProfile};
use crate::simple::{AlfvenParams, E1Params, E2Params, E3Params, FastOrthoParams, SlowParallelParams};
use crate::verify::{Axis, GridSpec, TimeSpec};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub about: &'static str,
    pub solution: SolutionConfig,
    pub grid: GridSpec,
}

/// Line of 65 nodes along `axis` (1 = x, 2 = y, 3 = z) through `at`, at time `t`.
fn line(axis: usize, t: f64, at: Vec3, half: f64) -> GridSpec {
    let ax = |k: usize| {
        if k == axis {
            Axis { min: at[k - 1] - half, max: at[k - 1] + half, n: 65 }
        } else {
            Axis::point(at[k - 1])
        }
    };
    GridSpec { t: TimeSpec::Slice(t), x: ax(1), y: ax(2), z: ax(3) }
}

fn fixture<P: serde::Serialize>(name: &'static str, family: &str, about: &'static str, p: &P, grid: GridSpec) -> Fixture {
    let solution = SolutionConfig::from_params(family, p).expect("fixture parameters serialize");
    Fixture { name, about, solution, grid }
}

fn bump(c: f64, a: f64, k: f64, phase: f64) -> Profile {
    Profile::constant(c).plus(Profile::sin(a, k, phase))
}

pub fn e1() -> Fixture {
    let p = E1Params {
        p0: 3.0,
        v0: Vec3::new(0.1, 0.0, 0.2),
        rho: bump(1.0, 0.2, 1.0, 0.0),
        h: VectorProfile::new(Profile::sin(1.0, 1.0, FRAC_PI_2), Profile::sin(1.0, 1.0, 0.0), Profile::poly(&[0.0, 0.3])),
        alpha: Profile::constant(0.3),
        beta: Profile::sin(0.2, 2.0, 0.0),
        kappa: 5.0 / 3.0,
        window: [-1.5, 1.5],
    };
    fixture("E1", "E1", "helical field (cos r, sin r, 0.3 r); wave vector turns with r", &p, line(3, 0.1, Vec3::new(0.1, 0.2, 0.0), 0.8))
}

pub fn e2() -> Fixture {
    let p = E2Params {
        p0: 2.0,
        u0: 0.4,
        rho: bump(1.0, 0.2, 2.0, 0.0),
        u: Profile::sin(0.5, 1.0, 0.0),
        w: Profile::sin(0.3, 1.0, 1.0),
        hmag: bump(0.5, 0.2, 1.0, 0.0),
        kappa: 1.4,
        window: [-2.0, 2.0],
    };
    fixture("E2", "E2", "r = x + y - U0 t with sinusoidal u, w, |H|", &p, line(1, 0.2, Vec3::new(0.0, 0.1, 0.3), 1.0))
}

pub fn e3() -> Fixture {
    let p = E3Params {
        p0: 1.0,
        v0: Vec3::new(0.1, 0.2, 0.3),
        h0: Vec3::new(0.3, -0.2, 0.5),
        rho: bump(2.0, 0.5, 1.0, 0.0),
        kappa: 1.4,
        window: [-4.0, 4.0],
    };
    fixture("E3", "E3", "density wave along (1, 1, 1) advected by a uniform flow", &p, line(1, 0.3, Vec3::new(0.0, 0.2, -0.1), 1.0))
}

pub fn alfven() -> Fixture {
    let p = AlfvenParams {
        rho0: 1.5,
        p0: 1.0,
        hmag0: 1.2,
        v0: Vec3::new(0.1, -0.2, 0.05),
        theta: Profile::constant(1.1),
        phi: Profile::poly(&[0.0, 1.0]),
        epsilon: Sign::Plus,
        kappa: 5.0 / 3.0,
        window: [-2.0, 2.0],
    };
    fixture("A", "A", "circularly polarized Alfven wave, Phi = r", &p, line(1, 0.1, Vec3::new(0.0, 0.2, 0.1), 1.0))
}

fn fast_params(kappa: f64, h0: f64) -> FastOrthoParams {
    FastOrthoParams {
        kappa,
        a0: 1.0,
        h0: Vec3::new(0.0, h0, 0.0),
        lambda_f: Vec3::x(),
        rho: bump(1.0, 0.2, 1.0, 0.0),
        epsilon: Sign::Plus,
        window: [-3.0, 3.0],
    }
}

pub fn fast_ortho() -> Fixture {
    fixture(
        "F_ortho",
        "F_ortho",
        "fast wave across a uniform field, kappa = 5/3 (hypergeometric branch)",
        &fast_params(5.0 / 3.0, 0.8),
        line(1, 0.05, Vec3::new(0.0, 0.1, 0.2), 1.0),
    )
}

pub fn fast_ortho_kappa2() -> Fixture {
    fixture(
        "F_ortho_kappa2",
        "F_ortho",
        "fast wave across a uniform field, kappa = 2 (square-root branch)",
        &fast_params(2.0, 2f64.sqrt()),
        line(1, 0.05, Vec3::new(0.0, 0.1, 0.2), 1.0),
    )
}

pub fn slow_parallel() -> Fixture {
    let p = SlowParallelParams {
        kappa: 5.0 / 3.0,
        a0: 1.0,
        h0: 1.0,
        chi: Profile::poly(&[0.0, 0.5]),
        epsilon: Sign::Plus,
        window: [-1.0, 1.0],
    };
    fixture("S_parallel", "S_parallel", "slow wave with field along the turning wave vector", &p, line(1, 0.05, Vec3::new(0.0, 0.1, 0.0), 0.5))
}

pub fn ee_aligned() -> Fixture {
    let p = EeAlignedParams {
        p0: 2.0,
        phi0: 0.3,
        theta0: 1.2,
        rho: Profile2::constant(1.0).plus(Profile2::product(Profile::sin(0.2, 1.0, 0.0), Profile::sin(1.0, 1.0, FRAC_PI_2))),
        w: Profile2::of_s(Profile::sin(0.5, 1.0, 0.0)).plus(Profile2::of_r(Profile::sin(0.3, 2.0, 0.0))),
        h: Profile2::of_r(bump(0.5, 0.2, 1.0, 0.0)).plus(Profile2::of_s(Profile::sin(0.1, 1.0, 0.0))),
        kappa: 1.4,
        window_s: [-2.0, 2.0],
        window_r: [-2.0, 2.0],
    };
    fixture("E1E1_aligned", "E1E1_aligned", "two planar entropic waves at angles 0.3 and 1.2", &p, line(1, 0.2, Vec3::new(0.0, 0.1, 0.0), 1.0))
}

pub fn ee_perp_a() -> Fixture {
    let p = EePerpAParams {
        p0: 2.0,
        theta: bump(0.3, 0.2, 1.0, 0.0),
        w: Profile::constant(0.7),
        rho: Profile2::constant(1.0).plus(Profile2::product(Profile::sin(0.2, 1.0, 0.0), Profile::sin(1.0, 1.0, FRAC_PI_2))),
        vmag: Profile2::of_s(Profile::sin(0.3, 1.0, 0.0)).plus(Profile2::of_r(Profile::constant(0.1))),
        hmag: Profile2::of_r(bump(0.4, 0.1, 1.0, 0.0)).plus(Profile2::of_s(Profile::sin(0.1, 1.0, 0.0))),
        kappa: 1.4,
        window_s: [-2.0, 2.0],
        window_r: [-2.0, 2.0],
    };
    fixture("EE_2a", "EE_2a", "planar angle theta(r) with constant axial speed", &p, line(3, 0.2, Vec3::new(0.5, 0.3, 0.0), 1.0))
}

pub fn ee_perp_b() -> Fixture {
    let p = EePerpBParams {
        p0: 2.0,
        theta0: 0.4,
        w: Profile::sin(0.5, 1.0, 0.0),
        vmag: Profile::sin(0.3, 1.0, 0.5),
        hperp: bump(0.4, 0.1, 1.0, 0.0),
        h3: Profile::sin(0.2, 1.0, 1.0),
        rho: Profile2::constant(1.0).plus(Profile2::product(Profile::sin(0.2, 1.0, 0.0), Profile::sin(1.0, 1.0, FRAC_PI_2))),
        kappa: 1.4,
        window_s: [-2.0, 2.0],
        window_r: [-2.0, 2.0],
    };
    fixture("EE_2b", "EE_2b", "constant planar angle with axial speed w(s)", &p, line(1, 0.5, Vec3::new(0.0, 0.1, 0.2), 1.0))
}

pub fn aa() -> Fixture {
    let p = AaParams {
        rho0: 1.0,
        p0: 1.0,
        hmag0: 2.0,
        gamma: 1.0,
        h1: Profile::sin(0.4, 1.0, 0.0),
        h2: Profile::sin(0.3, 1.0, 0.5),
        epsilon: Sign::Plus,
        kappa: 5.0 / 3.0,
        window_s: [-1.5, 1.5],
        window_r: [-1.5, 1.5],
    };
    fixture("AA", "AA", "two Alfven waves on the sphere |H| = 2", &p, line(1, 0.1, Vec3::new(0.0, 0.1, 0.0), 0.8))
}

pub fn ae1() -> Fixture {
    let p = Ae1Params {
        phi: VectorProfile::new(Profile::sin(1.0, 1.0, FRAC_PI_2), Profile::sin(1.0, 1.0, 0.0), Profile::poly(&[0.0, 0.5])),
        psi: VectorProfile::constant(Vec3::z()),
        hmag: Profile::constant(1.5),
        rho: bump(1.0, 0.2, 1.0, FRAC_PI_2),
        p0: 3.0,
        beta0: 0.8,
        r0: 0.0,
        branch: Sign::Plus,
        epsilon: Sign::Plus,
        kappa: 5.0 / 3.0,
        window_r: [-1.0, 1.0],
    };
    fixture("AE1", "AE1", "Alfven-entropic pair with helical phi and beta(0) = 0.8", &p, line(3, 0.05, Vec3::new(0.1, 0.1, 0.0), 0.5))
}

pub fn ff_planar() -> Fixture {
    let p = FfPlanarParams {
        kappa: 2.0,
        a0: 1.0,
        h0: 1.0,
        f: bump(8.0, 0.5, 1.0, 0.0),
        g: Profile::sin(0.5, 1.0, 0.3),
        w: Profile::sin(0.2, 1.0, 0.0),
        c: 0.0,
        epsilon: Sign::Plus,
        rho_bracket: [1e-3, 100.0],
        window_s: [-2.0, 2.0],
        window_r: [-2.0, 2.0],
    };
    fixture("FF_planar", "FF_planar", "fast waves along x and y, kappa = 2", &p, line(1, 0.02, Vec3::new(0.0, 0.1, 0.0), 0.5))
}

pub fn ff_counter() -> Fixture {
    let p = FfCounterParams {
        kappa: 2.0,
        a0: 1.0,
        h0: 1.0,
        f: bump(8.0, 0.5, 1.0, 0.0),
        g: Profile::sin(0.5, 1.0, 0.3),
        v: Profile::sin(0.1, 1.0, 0.0),
        w: Profile::default(),
        phi: Profile::poly(&[0.0, 0.2]),
        epsilon: Sign::Plus,
        rho_bracket: [1e-3, 100.0],
        window_s: [-2.0, 2.0],
        window_r: [-2.0, 2.0],
    };
    fixture("FF_counter", "FF_counter", "counter-propagating fast waves along x, kappa = 2", &p, line(1, 0.02, Vec3::new(0.0, 0.1, 0.0), 0.5))
}

pub fn ff_kappa2() -> Fixture {
    let p = FfKappa2Params {
        a0: 1.0,
        h0: 1.0,
        f: bump(8.0, 0.5, 1.0, 0.0),
        g: Profile::sin(0.5, 1.0, 0.3),
        window_s: [-2.0, 2.0],
        window_r: [-2.0, 2.0],
    };
    fixture("FF_kappa2", "FF_kappa2", "closed-form counter-propagating pair for kappa = 2", &p, line(1, 0.02, Vec3::new(0.0, 0.1, 0.0), 0.5))
}

pub fn fe1_counter() -> Fixture {
    let p = Fe1CounterParams {
        kappa: 5.0 / 3.0,
        a0: 1.0,
        h0: 0.8,
        rho: bump(1.0, 0.1, 1.0, 0.0),
        phi: Profile::poly(&[0.0, 1.0]),
        alpha: VectorProfile::new(Profile::sin(0.2, 1.0, 0.0), Profile::sin(0.1, 1.0, 0.4), Profile::default()),
        epsilon: Sign::Plus,
        window_s: [-1.5, 1.5],
        window_r: [-1.5, 1.5],
    };
    fixture("FE1_counter", "FE1_counter", "fast wave along z over a twisted entropic background", &p, line(3, 0.05, Vec3::new(0.1, 0.2, 0.0), 0.8))
}

pub fn fe1_kappa2() -> Fixture {
    let p = Fe1Kappa2Params {
        c2: 3.0,
        rho: bump(1.0, 0.1, 1.0, 0.0),
        a: bump(1.0, 0.1, 1.0, 0.5),
        phi: Profile::poly(&[0.0, 1.0]),
        alpha: VectorProfile::new(Profile::sin(0.2, 1.0, 0.0), Profile::default(), Profile::default()),
        epsilon: Sign::Plus,
        window_s: [-1.5, 1.5],
        window_r: [-1.5, 1.5],
    };
    fixture("FE1_kappa2", "FE1_kappa2", "kappa = 2 variant with 2A + |H|^2 = C2", &p, line(3, 0.05, Vec3::new(0.1, 0.2, 0.0), 0.8))
}

pub fn fe1_perp_kappa2() -> Fixture {
    let p = Fe1PerpKappa2Params {
        c2: 3.0,
        v0: 0.1,
        rho: bump(1.0, 0.1, 1.0, 0.0),
        b: Profile::constant(0.2),
        w: Profile::sin(0.3, 1.0, 0.0),
        a: bump(1.0, 0.1, 1.0, 0.5),
        epsilon: Sign::Plus,
        window_s: [-1.5, 1.5],
        window_r: [-1.5, 1.5],
    };
    fixture("FE1_perp_kappa2", "FE1_perp_kappa2", "fast wave along x, entropic wave along y", &p, line(1, 0.05, Vec3::new(0.0, 0.3, 0.0), 0.8))
}

/// The seven simple-wave fixtures.
pub fn simple() -> Vec<Fixture> {
    vec![e1(), e2(), e3(), alfven(), fast_ortho(), fast_ortho_kappa2(), slow_parallel()]
}

/// The nine double-wave fixtures.
pub fn double() -> Vec<Fixture> {
    vec![ee_aligned(), ee_perp_a(), ee_perp_b(), aa(), ae1(), ff_planar(), ff_counter(), fe1_counter(), fe1_perp_kappa2()]
}

/// Every fixture, including the closed-form kappa = 2 variants.
pub fn all() -> Vec<Fixture> {
    let mut v = simple();
    v.extend(double());
    v.push(ff_kappa2());
    v.push(fe1_kappa2());
    v
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}
