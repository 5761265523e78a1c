//! Coefficient backends and the level rings `Λ/πⁿ` they induce.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::int::Int;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    /// Discrete ℤ: every open ideal is zero.
    #[serde(alias = "z")]
    DiscreteIntegers,
    /// ℤ_p presented by the tower ℤ/pⁿ.
    #[serde(alias = "padic")]
    PAdic,
    /// 𝔽_p[[x]] presented by the tower 𝔽_p[x]/xⁿ.
    #[serde(alias = "pseries")]
    PowerSeries,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Backend {
    pub kind: BackendKind,
    #[serde(default)]
    pub prime: u64,
}

/// Annihilation level of a module: `Iₙ` kills it, or `∞` over discrete ℤ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Finite(u32),
    Infinite,
}

impl Level {
    pub fn finite(self) -> Option<u32> {
        match self {
            Level::Finite(n) => Some(n),
            Level::Infinite => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(n) => write!(f, "{n}"),
            Level::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Level::Finite(n) => s.serialize_u32(*n),
            Level::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Level::Finite(n)),
            Raw::S(s) if s == "inf" || s == "infinity" => Ok(Level::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad level {s:?}"))),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Backend {
    pub fn discrete_integers() -> Backend {
        Backend { kind: BackendKind::DiscreteIntegers, prime: 0 }
    }

    pub fn padic(prime: u64) -> Result<Backend> {
        Backend { kind: BackendKind::PAdic, prime }.validated()
    }

    pub fn power_series(prime: u64) -> Result<Backend> {
        Backend { kind: BackendKind::PowerSeries, prime }.validated()
    }

    pub fn validated(self) -> Result<Backend> {
        match self.kind {
            BackendKind::DiscreteIntegers => Ok(Backend { prime: self.prime, ..self }),
            _ if is_prime(self.prime) => Ok(self),
            _ => Err(Error::InvalidInput(format!("{} is not a prime", self.prime))),
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.kind == BackendKind::DiscreteIntegers
    }

    /// Level of the `n`-th quotient ring; constant `∞` over discrete ℤ.
    pub fn level(&self, n: u32) -> Level {
        if self.is_discrete() {
            Level::Infinite
        } else {
            Level::Finite(n)
        }
    }

    /// The ring `Rₙ = Λ/Iₙ`.
    pub fn level_ring(&self, level: Level) -> Ring {
        match (self.kind, level) {
            (BackendKind::DiscreteIntegers, _) => Ring::Integers,
            (BackendKind::PAdic, Level::Finite(n)) => Ring::integers_mod(self.prime, n),
            (BackendKind::PowerSeries, Level::Finite(n)) => Ring::PolyMod { p: self.prime, n },
            (_, Level::Infinite) => self.base_ring(),
        }
    }

    /// The principal ideal domain `Λ` underlying the tower.
    pub fn base_ring(&self) -> Ring {
        match self.kind {
            BackendKind::DiscreteIntegers | BackendKind::PAdic => Ring::Integers,
            BackendKind::PowerSeries => Ring::Poly { p: self.prime },
        }
    }

    /// `π^e` in `Λ`; over discrete ℤ only `e = 0` is meaningful and larger
    /// powers are zero, as for [`Ring::pi_pow`].
    pub fn base_pi_pow(&self, e: u32) -> Scalar {
        let ring = self.base_ring();
        match self.kind {
            BackendKind::DiscreteIntegers => ring.pi_pow(e),
            BackendKind::PAdic => ring.from_int(&Int::from(self.prime).pow(e)),
            BackendKind::PowerSeries => Ring::PolyMod { p: self.prime, n: e + 1 }.pi_pow(e),
        }
    }

    /// Short display name of the uniformizer.
    pub fn uniformizer_name(&self) -> String {
        match self.kind {
            BackendKind::DiscreteIntegers => "0".into(),
            BackendKind::PAdic => self.prime.to_string(),
            BackendKind::PowerSeries => "x".into(),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BackendKind::DiscreteIntegers => write!(f, "Z"),
            BackendKind::PAdic => write!(f, "Z_{}", self.prime),
            BackendKind::PowerSeries => write!(f, "F_{}[[x]]", self.prime),
        }
    }
}

/// A ring element. Integers (including residues modulo `pⁿ`) are kept in
/// their canonical representative; polynomials are coefficient vectors,
/// constant term first, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Int(Int),
    Poly(Vec<u64>),
}

impl Scalar {
    pub fn as_int(&self) -> Option<&Int> {
        match self {
            Scalar::Int(i) => Some(i),
            Scalar::Poly(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Poly(c) => {
                if c.is_empty() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (k, a) in c.iter().enumerate().filter(|(_, a)| **a != 0) {
                    if !first {
                        write!(f, "+")?;
                    }
                    first = false;
                    match (k, a) {
                        (0, a) => write!(f, "{a}")?,
                        (1, 1) => write!(f, "x")?,
                        (1, a) => write!(f, "{a}x")?,
                        (k, 1) => write!(f, "x^{k}")?,
                        (k, a) => write!(f, "{a}x^{k}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Int(i) => s.serialize_str(&i.to_string()),
            Scalar::Poly(c) => c.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
            List(Vec<u64>),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Scalar::Int(Int::from(n))),
            Raw::Str(s) => s
                .parse::<Int>()
                .map(Scalar::Int)
                .map_err(|e| serde::de::Error::custom(format!("bad integer {s:?}: {e}"))),
            Raw::List(mut c) => {
                while c.last() == Some(&0) {
                    c.pop();
                }
                Ok(Scalar::Poly(c))
            }
        }
    }
}

/// Size used to pick elimination pivots: absolute value over ℤ, degree over
/// `𝔽_p[x]`, valuation over the chain rings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Size {
    Finite(Int),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    /// ℤ.
    Integers,
    /// ℤ/pⁿ; `modulus = pⁿ`.
    IntegersMod { p: u64, n: u32, modulus: Int },
    /// 𝔽_p[x]/xⁿ.
    PolyMod { p: u64, n: u32 },
    /// 𝔽_p[x].
    Poly { p: u64 },
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod_prime(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn trim(mut c: Vec<u64>) -> Vec<u64> {
    while c.last() == Some(&0) {
        c.pop();
    }
    c
}

fn poly_add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = ((x as u128 + y as u128) % p as u128) as u64;
    }
    trim(out)
}

fn poly_neg(a: &[u64], p: u64) -> Vec<u64> {
    a.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect()
}

fn poly_mul(a: &[u64], b: &[u64], p: u64, trunc: Option<usize>) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut len = a.len() + b.len() - 1;
    if let Some(t) = trunc {
        len = len.min(t);
    }
    let mut out = vec![0u64; len];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 || i >= len {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    trim(out)
}

fn poly_scale(a: &[u64], c: u64, p: u64) -> Vec<u64> {
    trim(a.iter().map(|&x| mulmod(x, c, p)).collect())
}

/// Long division in `𝔽_p[x]`.
fn poly_div_rem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod_prime(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = mulmod(*r.last().unwrap(), lead_inv, p);
        q[shift] = c;
        for (j, &y) in b.iter().enumerate() {
            let sub = mulmod(c, y, p);
            r[shift + j] = (r[shift + j] + p - sub) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

/// Inverse of a power series with nonzero constant term, modulo `xⁿ`.
fn series_inverse(a: &[u64], n: usize, p: u64) -> Vec<u64> {
    let c0 = inv_mod_prime(a[0], p);
    let mut inv = vec![0u64; n];
    for k in 0..n {
        // coefficient k of a*inv must be [k == 0]
        let mut s: u128 = 0;
        for j in 1..=k.min(a.len().saturating_sub(1)) {
            s += a[j] as u128 * inv[k - j] as u128;
        }
        let s = (s % p as u128) as u64;
        let target = if k == 0 { 1 } else { 0 };
        inv[k] = mulmod((target + p - s) % p, c0, p);
    }
    trim(inv)
}

fn low_valuation(a: &[u64]) -> Option<u32> {
    a.iter().position(|&x| x != 0).map(|v| v as u32)
}

impl Ring {
    pub fn integers_mod(p: u64, n: u32) -> Ring {
        Ring::IntegersMod { p, n, modulus: Int::from(p).pow(n) }
    }

    /// Finite level of the ring (`None` for ℤ and `𝔽_p[x]`).
    pub fn level(&self) -> Option<u32> {
        match self {
            Ring::IntegersMod { n, .. } | Ring::PolyMod { n, .. } => Some(*n),
            _ => None,
        }
    }

    pub fn is_chain(&self) -> bool {
        self.level().is_some()
    }

    pub fn is_poly(&self) -> bool {
        matches!(self, Ring::Poly { .. } | Ring::PolyMod { .. })
    }

    /// Same family (both integer-based or both polynomial-based over the same prime).
    pub fn same_family(&self, other: &Ring) -> bool {
        match (self, other) {
            (Ring::Integers | Ring::IntegersMod { .. }, Ring::Integers) => true,
            (Ring::Integers, Ring::IntegersMod { .. }) => true,
            (Ring::IntegersMod { p: a, .. }, Ring::IntegersMod { p: b, .. }) => a == b,
            (
                Ring::Poly { p: a } | Ring::PolyMod { p: a, .. },
                Ring::Poly { p: b } | Ring::PolyMod { p: b, .. },
            ) => a == b,
            _ => false,
        }
    }

    /// Same ring with a different finite level.
    pub fn at_level(&self, level: u32) -> Ring {
        match self {
            Ring::IntegersMod { p, .. } => Ring::integers_mod(*p, level),
            Ring::PolyMod { p, .. } => Ring::PolyMod { p: *p, n: level },
            other => other.clone(),
        }
    }

    pub fn zero(&self) -> Scalar {
        if self.is_poly() {
            Scalar::Poly(Vec::new())
        } else {
            Scalar::Int(Int::ZERO)
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.from_int(&Int::from(v))
    }

    pub fn from_int(&self, v: &Int) -> Scalar {
        match self {
            Ring::Integers => Scalar::Int(v.clone()),
            Ring::IntegersMod { modulus, .. } => Scalar::Int(v.rem_euclid(modulus)),
            Ring::Poly { p } | Ring::PolyMod { p, .. } => {
                let c = v.rem_euclid(&Int::from(*p)).to_i64().unwrap() as u64;
                self.canonical(&Scalar::Poly(vec![c]))
            }
        }
    }

    /// Canonical representative: least nonnegative residue, or a polynomial
    /// of degree below the level.
    pub fn canonical(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Ring::Integers, Scalar::Int(_)) => a.clone(),
            (Ring::IntegersMod { modulus, .. }, Scalar::Int(v)) => Scalar::Int(v.rem_euclid(modulus)),
            (Ring::Poly { p }, Scalar::Poly(c)) => Scalar::Poly(trim(c.iter().map(|x| x % p).collect())),
            (Ring::PolyMod { p, n }, Scalar::Poly(c)) => {
                Scalar::Poly(trim(c.iter().take(*n as usize).map(|x| x % p).collect()))
            }
            _ => panic!("scalar {a:?} does not belong to {self:?}"),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Int(v) => v.is_zero(),
            Scalar::Poly(c) => c.is_empty(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Ring::Integers, Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x.add(y)),
            (Ring::IntegersMod { modulus, .. }, Scalar::Int(x), Scalar::Int(y)) => {
                let s = x.add(y);
                Scalar::Int(if s >= *modulus { s.sub(modulus) } else { s })
            }
            (Ring::Poly { p } | Ring::PolyMod { p, .. }, Scalar::Poly(x), Scalar::Poly(y)) => {
                Scalar::Poly(poly_add(x, y, *p))
            }
            _ => panic!("mismatched scalars for {self:?}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Ring::Integers, Scalar::Int(x)) => Scalar::Int(x.neg()),
            (Ring::IntegersMod { modulus, .. }, Scalar::Int(x)) => {
                Scalar::Int(if x.is_zero() { Int::ZERO } else { modulus.sub(x) })
            }
            (Ring::Poly { p } | Ring::PolyMod { p, .. }, Scalar::Poly(x)) => Scalar::Poly(poly_neg(x, *p)),
            _ => panic!("mismatched scalar for {self:?}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Ring::Integers, Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x.mul(y)),
            (Ring::IntegersMod { modulus, .. }, Scalar::Int(x), Scalar::Int(y)) => {
                Scalar::Int(x.mul(y).rem_euclid(modulus))
            }
            (Ring::Poly { p }, Scalar::Poly(x), Scalar::Poly(y)) => Scalar::Poly(poly_mul(x, y, *p, None)),
            (Ring::PolyMod { p, n }, Scalar::Poly(x), Scalar::Poly(y)) => {
                Scalar::Poly(poly_mul(x, y, *p, Some(*n as usize)))
            }
            _ => panic!("mismatched scalars for {self:?}"),
        }
    }

    /// `a·b + c`, the inner step of matrix products.
    pub fn mul_add(&self, a: &Scalar, b: &Scalar, c: &Scalar) -> Scalar {
        self.add(&self.mul(a, b), c)
    }

    /// The uniformizer `π` (`p` or `x`); zero over plain ℤ where no open
    /// ideal is nontrivial.
    pub fn uniformizer(&self) -> Scalar {
        match self {
            Ring::Integers => Scalar::Int(Int::ZERO),
            Ring::IntegersMod { p, .. } => self.from_int(&Int::from(*p)),
            Ring::Poly { .. } | Ring::PolyMod { .. } => self.canonical(&Scalar::Poly(vec![0, 1])),
        }
    }

    pub fn pi_pow(&self, e: u32) -> Scalar {
        match self {
            Ring::Integers => {
                if e == 0 {
                    self.one()
                } else {
                    self.zero()
                }
            }
            Ring::IntegersMod { p, .. } => self.from_int(&Int::from(*p).pow(e)),
            Ring::Poly { .. } | Ring::PolyMod { .. } => {
                let mut c = vec![0u64; e as usize + 1];
                c[e as usize] = 1;
                self.canonical(&Scalar::Poly(c))
            }
        }
    }

    /// `π`-adic valuation for the chain rings; `None` for zero. Over ℤ and
    /// `𝔽_p[x]` the valuation at `p` resp. `x` is returned.
    pub fn valuation(&self, a: &Scalar) -> Option<u32> {
        match (self, a) {
            (Ring::Integers, Scalar::Int(_)) => None,
            (Ring::IntegersMod { p, .. }, Scalar::Int(x)) => x.valuation(&Int::from(*p)),
            (_, Scalar::Poly(c)) => low_valuation(c),
            _ => None,
        }
    }

    pub fn size(&self, a: &Scalar) -> Size {
        if self.is_zero(a) {
            return Size::Infinite;
        }
        match (self, a) {
            (Ring::Integers, Scalar::Int(x)) => Size::Finite(x.abs()),
            (Ring::Poly { .. }, Scalar::Poly(c)) => Size::Finite(Int::from(c.len() as i64 - 1)),
            _ => Size::Finite(Int::from(self.valuation(a).unwrap() as i64)),
        }
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        match (self, a) {
            (Ring::Integers, Scalar::Int(x)) => x.abs().is_one(),
            (Ring::IntegersMod { modulus, .. }, _) => modulus.is_one() || self.valuation(a) == Some(0),
            (Ring::PolyMod { n, .. }, _) => *n == 0 || self.valuation(a) == Some(0),
            (Ring::Poly { .. }, Scalar::Poly(c)) => c.len() == 1,
            _ => false,
        }
    }

    pub fn unit_inverse(&self, a: &Scalar) -> Option<Scalar> {
        if !self.is_unit(a) {
            return None;
        }
        Some(match (self, a) {
            (Ring::Integers, _) => a.clone(),
            (Ring::IntegersMod { modulus, .. }, Scalar::Int(x)) => {
                let (_, s, _) = Int::ext_gcd(x, modulus);
                Scalar::Int(s.rem_euclid(modulus))
            }
            (Ring::PolyMod { p, n }, Scalar::Poly(c)) => {
                if *n == 0 {
                    return Some(self.zero());
                }
                Scalar::Poly(series_inverse(c, *n as usize, *p))
            }
            (Ring::Poly { p }, Scalar::Poly(c)) => Scalar::Poly(vec![inv_mod_prime(c[0], *p)]),
            _ => unreachable!(),
        })
    }

    /// Returns `(u, a')` with `u` a unit and `u·a = a'` the preferred
    /// associate: `πᵉ` in chain rings, nonnegative over ℤ, monic over `𝔽_p[x]`.
    pub fn normalize(&self, a: &Scalar) -> (Scalar, Scalar) {
        if self.is_zero(a) {
            return (self.one(), a.clone());
        }
        match (self, a) {
            (Ring::Integers, Scalar::Int(x)) => {
                if x.signum() < 0 {
                    (self.from_i64(-1), Scalar::Int(x.neg()))
                } else {
                    (self.one(), a.clone())
                }
            }
            (Ring::Poly { p }, Scalar::Poly(c)) => {
                let u = inv_mod_prime(*c.last().unwrap(), *p);
                (Scalar::Poly(vec![u]), Scalar::Poly(poly_scale(c, u, *p)))
            }
            _ => {
                let v = self.valuation(a).unwrap();
                let unit_part = self.shift_down(a, v);
                let u = self.unit_inverse(&unit_part).expect("unit part");
                (u, self.pi_pow(v))
            }
        }
    }

    /// `a / πᵛ` for `a` divisible by `πᵛ`, with the canonical lift.
    fn shift_down(&self, a: &Scalar, v: u32) -> Scalar {
        match (self, a) {
            (Ring::IntegersMod { p, .. }, Scalar::Int(x)) => {
                Scalar::Int(x.exact_div(&Int::from(*p).pow(v)).expect("divisible"))
            }
            (_, Scalar::Poly(c)) => Scalar::Poly(c[v as usize..].to_vec()),
            _ => unreachable!(),
        }
    }

    /// Division with remainder: `a = q·b + r` with `size(r) < size(b)` or `r = 0`.
    pub fn div_rem(&self, a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
        assert!(!self.is_zero(b), "division by zero");
        match (self, a, b) {
            (Ring::Integers, Scalar::Int(x), Scalar::Int(y)) => {
                let (q, r) = x.div_rem_euclid(y);
                // prefer the remainder of least absolute value
                let half = y.abs();
                if r.add(&r) > half {
                    let q2 = if y.signum() > 0 { q.add(&Int::ONE) } else { q.sub(&Int::ONE) };
                    (Scalar::Int(q2), Scalar::Int(r.sub(&half)))
                } else {
                    (Scalar::Int(q), Scalar::Int(r))
                }
            }
            (Ring::Poly { p }, Scalar::Poly(x), Scalar::Poly(y)) => {
                let (q, r) = poly_div_rem(x, y, *p);
                (Scalar::Poly(q), Scalar::Poly(r))
            }
            _ => match self.exact_div(a, b) {
                Some(q) => (q, self.zero()),
                None => (self.zero(), a.clone()),
            },
        }
    }

    /// Some `q` with `q·b = a`, if one exists.
    pub fn exact_div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if self.is_zero(b) {
            return None;
        }
        match self {
            Ring::Integers | Ring::Poly { .. } => {
                let (q, r) = self.div_rem(a, b);
                self.is_zero(&r).then_some(q)
            }
            _ => {
                let va = self.valuation(a)?;
                let vb = self.valuation(b)?;
                if va < vb {
                    return None;
                }
                let (u, _) = self.normalize(b);
                // b = u⁻¹·π^vb, so a/b = u·(a/π^vb)
                let a_shift = self.canonical(&self.shift_down(a, vb));
                Some(self.mul(&u, &a_shift))
            }
        }
    }

    /// Moves a scalar from `from` into `self` (reduction, or canonical lift
    /// when going up a level).
    pub fn coerce(&self, a: &Scalar, from: &Ring) -> Scalar {
        debug_assert!(self.same_family(from), "coerce between {from:?} and {self:?}");
        self.canonical(a)
    }

    pub fn parse_scalar(&self, v: &Scalar) -> Result<Scalar> {
        match (self.is_poly(), v) {
            (false, Scalar::Int(_)) | (true, Scalar::Poly(_)) => Ok(self.canonical(v)),
            (true, Scalar::Int(i)) => Ok(self.from_int(i)),
            (false, Scalar::Poly(_)) => Err(Error::BackendMismatch(format!(
                "polynomial entry in integer ring {self}"
            ))),
        }
    }

    pub fn compare_size(&self, a: &Scalar, b: &Scalar) -> Ordering {
        self.size(a).cmp(&self.size(b))
    }

    /// Number of elements for the finite chain rings.
    pub fn cardinality(&self) -> Option<Int> {
        match self {
            Ring::IntegersMod { modulus, .. } => Some(modulus.clone()),
            Ring::PolyMod { p, n } => Some(Int::from(*p).pow(*n)),
            _ => None,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::IntegersMod { p, n, .. } => write!(f, "Z/{p}^{n}"),
            Ring::PolyMod { p, n } => write!(f, "F_{p}[x]/x^{n}"),
            Ring::Poly { p } => write!(f, "F_{p}[x]"),
        }
    }
}
