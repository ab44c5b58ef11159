//! Arbitrary-function profiles: finite sums of analytic terms with exact
//! derivatives up to third order.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::mhd::Vec3;
use crate::quad::gauss_legendre;

pub const MAX_POLY_DEGREE: usize = 6;
pub const MAX_ORDER: usize = 3;

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Term {
    /// `c`
    Const { c: f64 },
    /// `sum coeffs[k] r^k`
    Poly { coeffs: Vec<f64> },
    /// `a sin(k r + phase)`
    Sin {
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "one")]
        k: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `a exp(-(r - mu)^2 / (2 sigma^2))`
    Gauss { a: f64, mu: f64, sigma: f64 },
    /// `a tanh(k (r - r0))`
    Tanh {
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "one")]
        k: f64,
        #[serde(default)]
        r0: f64,
    },
}

impl Term {
    fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let ok = match self {
            Term::Const { c } => finite(&[*c]),
            Term::Poly { coeffs } => {
                if coeffs.len() > MAX_POLY_DEGREE + 1 {
                    return Err(Error::Profile(format!(
                        "poly degree must be <= {MAX_POLY_DEGREE}, got {}",
                        coeffs.len() - 1
                    )));
                }
                finite(coeffs)
            }
            Term::Sin { a, k, phase } => finite(&[*a, *k, *phase]),
            Term::Gauss { a, mu, sigma } => {
                if !(*sigma > 0.0) {
                    return Err(Error::Profile("sigma must be > 0".into()));
                }
                finite(&[*a, *mu, *sigma])
            }
            Term::Tanh { a, k, r0 } => finite(&[*a, *k, *r0]),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Profile("profile coefficients must be finite".into()))
        }
    }

    fn eval(&self, r: f64, order: usize) -> f64 {
        match self {
            Term::Const { c } => {
                if order == 0 {
                    *c
                } else {
                    0.0
                }
            }
            Term::Poly { coeffs } => {
                let mut acc = 0.0;
                for (k, &ck) in coeffs.iter().enumerate().skip(order).rev() {
                    let mut fall = 1.0;
                    for j in 0..order {
                        fall *= (k - j) as f64;
                    }
                    acc = acc * r + ck * fall;
                }
                // Horner over the shifted powers
                acc
            }
            Term::Sin { a, k, phase } => {
                let arg = k * r + phase + order as f64 * std::f64::consts::FRAC_PI_2;
                a * k.powi(order as i32) * arg.sin()
            }
            Term::Gauss { a, mu, sigma } => {
                let u = (r - mu) / sigma;
                let g = a * (-0.5 * u * u).exp();
                let he = match order {
                    0 => 1.0,
                    1 => -u,
                    2 => u * u - 1.0,
                    _ => -(u * u * u - 3.0 * u),
                };
                g * he / sigma.powi(order as i32)
            }
            Term::Tanh { a, k, r0 } => {
                let t = (k * (r - r0)).tanh();
                let s = 1.0 - t * t;
                a * match order {
                    0 => t,
                    1 => k * s,
                    2 => -2.0 * k * k * t * s,
                    _ => -2.0 * k.powi(3) * s * (1.0 - 3.0 * t * t),
                }
            }
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Term::Const { .. } => true,
            Term::Poly { coeffs } => coeffs.iter().skip(1).all(|&c| c == 0.0),
            Term::Sin { a, k, .. } => *a == 0.0 || *k == 0.0,
            Term::Gauss { a, .. } => *a == 0.0,
            Term::Tanh { a, k, .. } => *a == 0.0 || *k == 0.0,
        }
    }
}

/// Scalar function of one Riemann invariant.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Profile {
    pub terms: Vec<Term>,
}

impl Profile {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            t.validate()?;
        }
        Ok(Self { terms })
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: vec![Term::Const { c }] }
    }

    pub fn poly(coeffs: &[f64]) -> Self {
        Self { terms: vec![Term::Poly { coeffs: coeffs.to_vec() }] }
    }

    pub fn sin(a: f64, k: f64, phase: f64) -> Self {
        Self { terms: vec![Term::Sin { a, k, phase }] }
    }

    pub fn gauss(a: f64, mu: f64, sigma: f64) -> Self {
        Self { terms: vec![Term::Gauss { a, mu, sigma }] }
    }

    pub fn tanh(a: f64, k: f64, r0: f64) -> Self {
        Self { terms: vec![Term::Tanh { a, k, r0 }] }
    }

    pub fn plus(mut self, other: Profile) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn eval(&self, r: f64, order: usize) -> Result<f64> {
        if order > MAX_ORDER {
            return Err(Error::Profile(format!("derivative order must be <= {MAX_ORDER}, got {order}")));
        }
        Ok(self.d(r, order))
    }

    /// Derivative of order `order <= 3`.
    pub fn d(&self, r: f64, order: usize) -> f64 {
        debug_assert!(order <= MAX_ORDER);
        self.terms.iter().map(|t| t.eval(r, order)).sum()
    }

    pub fn value(&self, r: f64) -> f64 {
        self.d(r, 0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(Term::is_constant)
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        gauss_legendre(|r| self.value(r), a, b, 0.25)
    }
}

/// Parse `{"terms": [...]}`, a single term object, or a bare number.
pub fn parse_profile(v: &Value) -> Result<Profile> {
    match v {
        Value::Number(n) => Ok(Profile::constant(n.as_f64().unwrap_or(f64::NAN))),
        Value::Object(map) if map.contains_key("terms") => {
            let terms = map
                .get("terms")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Profile("'terms' must be an array".into()))?;
            let parsed = terms.iter().map(parse_term).collect::<Result<Vec<_>>>()?;
            Profile::new(parsed)
        }
        Value::Object(map) if map.contains_key("kind") => Profile::new(vec![parse_term(v)?]),
        _ => Err(Error::Profile(format!("cannot read profile from {v}"))),
    }
}

fn parse_term(v: &Value) -> Result<Term> {
    let kind = v.get("kind").and_then(Value::as_str).unwrap_or("");
    if !["const", "poly", "sin", "gauss", "tanh"].contains(&kind) {
        return Err(Error::Profile(format!("unknown profile kind '{kind}'")));
    }
    let t: Term = serde_json::from_value(v.clone()).map_err(|e| Error::Profile(format!("{kind}: {e}")))?;
    t.validate()?;
    Ok(t)
}

#[derive(Serialize)]
struct ProfileRepr<'a> {
    terms: &'a [Term],
}

impl Serialize for Profile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProfileRepr { terms: &self.terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        parse_profile(&v).map_err(serde::de::Error::custom)
    }
}

/// Three scalar profiles forming a vector function.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct VectorProfile(pub [Profile; 3]);

impl VectorProfile {
    pub fn new(x: Profile, y: Profile, z: Profile) -> Self {
        Self([x, y, z])
    }

    pub fn constant(v: Vec3) -> Self {
        Self([Profile::constant(v.x), Profile::constant(v.y), Profile::constant(v.z)])
    }

    pub fn eval(&self, r: f64, order: usize) -> Result<Vec3> {
        Ok(Vec3::new(self.0[0].eval(r, order)?, self.0[1].eval(r, order)?, self.0[2].eval(r, order)?))
    }

    pub fn d(&self, r: f64, order: usize) -> Vec3 {
        Vec3::new(self.0[0].d(r, order), self.0[1].d(r, order), self.0[2].d(r, order))
    }

    pub fn value(&self, r: f64) -> Vec3 {
        self.d(r, 0)
    }
}

fn const_one() -> Profile {
    Profile::constant(1.0)
}

/// Product term `s(s) * r(r)` of a separable two-variable profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separable {
    #[serde(default = "const_one")]
    pub s: Profile,
    #[serde(default = "const_one")]
    pub r: Profile,
}

/// Function of two Riemann invariants as a sum of separable products.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Profile2 {
    pub terms: Vec<Separable>,
}

impl Profile2 {
    pub fn constant(c: f64) -> Self {
        Self { terms: vec![Separable { s: Profile::constant(c), r: const_one() }] }
    }

    pub fn of_s(p: Profile) -> Self {
        Self { terms: vec![Separable { s: p, r: const_one() }] }
    }

    pub fn of_r(p: Profile) -> Self {
        Self { terms: vec![Separable { s: const_one(), r: p }] }
    }

    pub fn product(s: Profile, r: Profile) -> Self {
        Self { terms: vec![Separable { s, r }] }
    }

    pub fn plus(mut self, other: Profile2) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// Mixed derivative `d^(ds+dr) / ds^ds dr^dr`.
    pub fn d(&self, s: f64, r: f64, ds: usize, dr: usize) -> f64 {
        self.terms.iter().map(|t| t.s.d(s, ds) * t.r.d(r, dr)).sum()
    }

    pub fn value(&self, s: f64, r: f64) -> f64 {
        self.d(s, r, 0, 0)
    }
}
