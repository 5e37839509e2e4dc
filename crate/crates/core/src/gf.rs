//! Exact arithmetic in GF(q) for small prime powers q.
//!
//! Elements are represented in the polynomial basis over GF(p): the raw value
//! `v` of an element stands for the polynomial whose coefficient of `x^i` is
//! the i-th base-p digit of `v`. Addition, multiplication and inversion are
//! precomputed into tables when a [`Field`] is built, so every operation on
//! raw values is a table lookup.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::poly;

/// Largest field order accepted by [`Field::new`].
///
/// Raw element values are stored in a `u8`, and the multiplication table has
/// `q^2` entries.
pub const MAX_ORDER: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{e} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooLarge { p: u32, e: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("cannot parse {0:?} as an element of GF({1})")]
    Parse(String, usize),
}

/// Description of GF(p^e) together with its operation tables.
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: usize,
    /// Monic irreducible modulus over GF(p), lowest degree first (length e+1).
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Shared handle to a finite field. Cloning is cheap.
#[derive(Clone)]
pub struct Field(Arc<FieldSpec>);

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn cache() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Field {
    /// Builds GF(p^e) with the lexicographically least monic irreducible modulus.
    pub fn new(p: u32, e: u32) -> Result<Field, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if e == 0 {
            return Err(GfError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(e).filter(|&q| q <= MAX_ORDER as u64);
        let Some(q) = q else {
            return Err(GfError::OrderTooLarge { p, e });
        };
        if let Some(f) = cache().lock().unwrap().get(&(p, e)) {
            return Ok(f.clone());
        }
        let field = if e == 1 {
            Self::prime(p)
        } else {
            Self::extension(p, e, q as usize)
        };
        cache().lock().unwrap().insert((p, e), field.clone());
        Ok(field)
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn from_order(q: u64) -> Result<Field, GfError> {
        if q < 2 {
            return Err(GfError::NotPrimePower(q));
        }
        let p = (2..=q).find(|d| q % d == 0).unwrap();
        let mut rest = q;
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if rest != 1 || p > u32::MAX as u64 {
            return Err(GfError::NotPrimePower(q));
        }
        Field::new(p as u32, e)
    }

    fn prime(p: u32) -> Field {
        let q = p as usize;
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = ((a + b) % q) as u8;
                mul[a * q + b] = ((a * b) % q) as u8;
            }
        }
        let neg = (0..q).map(|a| ((q - a) % q) as u8).collect();
        let inv = Self::inverse_table(q, &mul);
        Field(Arc::new(FieldSpec {
            p,
            e: 1,
            q,
            modulus: vec![0, 1],
            add,
            mul,
            neg,
            inv,
        }))
    }

    fn extension(p: u32, e: u32, q: usize) -> Field {
        let base = Self::prime(p);
        let modulus = poly::least_irreducible(&base, e as usize);
        let digits = |v: usize| -> Vec<u8> {
            let mut out = Vec::with_capacity(e as usize);
            let mut v = v;
            for _ in 0..e {
                out.push((v % p as usize) as u8);
                v /= p as usize;
            }
            out
        };
        let value = |c: &[u8]| -> u8 {
            c.iter()
                .rev()
                .fold(0usize, |acc, &d| acc * p as usize + d as usize) as u8
        };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u8> = da.iter().zip(&db).map(|(&x, &y)| base.add(x, y)).collect();
                add[a * q + b] = value(&sum);
                let prod = poly::rem_monic(&base, &poly::mul(&base, &da, &db), &modulus);
                mul[a * q + b] = value(&prod);
            }
        }
        let neg = (0..q)
            .map(|a| {
                let d: Vec<u8> = digits(a).iter().map(|&x| base.neg(x)).collect();
                value(&d)
            })
            .collect();
        let inv = Self::inverse_table(q, &mul);
        Field(Arc::new(FieldSpec {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        }))
    }

    fn inverse_table(q: usize, mul: &[u8]) -> Vec<u8> {
        let mut inv = vec![0u8; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
        }
        inv
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.e
    }

    pub fn order(&self) -> usize {
        self.0.q
    }

    /// Coefficients of the modulus, lowest degree first. For prime fields this
    /// is the placeholder `x`, which is never used.
    pub fn modulus(&self) -> &[u8] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.0.add[a as usize * self.0.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.0.mul[a as usize * self.0.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.0.neg[a as usize]
    }

    /// Multiplicative inverse, `None` for zero.
    #[inline]
    pub fn inv(&self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.0.inv[a as usize])
    }

    pub fn pow(&self, a: u8, mut exp: u64) -> u8 {
        let mut base = a;
        let mut acc = 1u8;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn element(&self, value: u8) -> Result<FieldElement, GfError> {
        if (value as usize) < self.0.q {
            Ok(FieldElement {
                value,
                field: self.clone(),
            })
        } else {
            Err(GfError::Parse(value.to_string(), self.0.q))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        (0..self.0.q).map(|v| v as u8)
    }

    /// Text encoding of a raw value: decimal for prime fields, otherwise the
    /// base-p digits of the coefficients, most significant first.
    pub fn encode(&self, value: u8) -> String {
        if self.0.e == 1 {
            return value.to_string();
        }
        let p = self.0.p as usize;
        let mut v = value as usize;
        let mut digits = vec!['0'; self.0.e as usize];
        for slot in digits.iter_mut().rev() {
            *slot = std::char::from_digit((v % p) as u32, 36).unwrap();
            v /= p;
        }
        digits.into_iter().collect()
    }

    pub fn decode(&self, text: &str) -> Result<u8, GfError> {
        let err = || GfError::Parse(text.to_string(), self.0.q);
        if self.0.e == 1 {
            let v: usize = text.parse().map_err(|_| err())?;
            return if v < self.0.q { Ok(v as u8) } else { Err(err()) };
        }
        if text.chars().count() != self.0.e as usize {
            return Err(err());
        }
        let p = self.0.p;
        let mut v = 0usize;
        for c in text.chars() {
            let d = c.to_digit(36).filter(|&d| d < p).ok_or_else(err)?;
            v = v * p as usize + d as usize;
        }
        Ok(v as u8)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.q)
    }
}

/// A field element bound to its field; arithmetic checks that operands agree.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    value: u8,
    field: Field,
}

impl FieldElement {
    pub fn value(&self) -> u8 {
        self.value
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Polynomial-basis coefficients, lowest degree first.
    pub fn coeffs(&self) -> Vec<u32> {
        let p = self.field.characteristic();
        let mut v = self.value as u32;
        (0..self.field.degree())
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<(), GfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GfError::FieldMismatch)
        }
    }

    fn with(&self, value: u8) -> FieldElement {
        FieldElement {
            value,
            field: self.field.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<FieldElement, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<FieldElement, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<FieldElement, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement, GfError> {
        self.field
            .inv(self.value)
            .map(|v| self.with(v))
            .ok_or(GfError::ZeroInverse)
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        self.with(self.field.pow(self.value, exp))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.encode(self.value))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.field.encode(self.value), self.field)
    }
}
