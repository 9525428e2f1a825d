//! Exact arithmetic in prime fields `GF(p)` and extension fields `GF(p^m)`.
//!
//! Elements are identified by an integer *code*: the element
//! `c_0 + c_1 x + ... + c_{m-1} x^{m-1}` has code `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`.
//! For prime fields the code is the residue itself. Matrices and vectors in the
//! rest of the crate store codes and do arithmetic through the owning [`FieldSpec`].
//!
//! Field sizes are limited to `q <= 65536`; fields with `q <= 256` get
//! precomputed addition and multiplication tables.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::MatrixF;

const MAX_ORDER: u64 = 1 << 16;
const TABLE_ORDER: u32 = 256;

/// Description of a finite field together with its arithmetic tables.
///
/// Cloning is cheap. Two specs are equal iff `p`, `m` and the modulus agree.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

struct Inner {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, low-to-high, length `m + 1`. Empty for prime fields.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// The prime field `GF(p)`.
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if u64::from(p) > MAX_ORDER {
            return Err(Error::InvalidField(format!("order {p} exceeds {MAX_ORDER}")));
        }
        Ok(Self::build(p, 1, Vec::new()))
    }

    /// `GF(p^m)` with the built-in modulus: the smallest monic irreducible
    /// polynomial of degree `m`, comparing coefficient codes with `c_{m-1}`
    /// most significant.
    pub fn extension(p: u32, m: u32) -> Result<Self> {
        let base = Self::prime(p)?;
        if m == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        if m == 1 {
            return Ok(base);
        }
        Self::check_order(p, m)?;
        let modulus = poly::smallest_irreducible(&base, m as usize);
        Ok(Self::build(p, m, modulus))
    }

    /// `GF(p^m)` with a caller-provided monic irreducible modulus (low-to-high,
    /// `m + 1` coefficients). Irreducibility is verified.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Self> {
        let base = Self::prime(p)?;
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree at least 1".into()));
        }
        let m = (modulus.len() - 1) as u32;
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!("modulus coefficient out of range for p = {p}")));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if m == 1 {
            return Ok(base);
        }
        Self::check_order(p, m)?;
        if !poly::is_irreducible(&base, modulus) {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:?} is reducible over GF({p})"
            )));
        }
        Ok(Self::build(p, m, modulus.to_vec()))
    }

    /// Field of order `q`, which must be a prime power, with the built-in modulus.
    pub fn of_order(q: u32) -> Result<Self> {
        let p = (2..=q.max(2))
            .find(|d| q % d == 0)
            .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        let mut rest = q;
        let mut m = 0;
        while rest % p == 0 {
            rest /= p;
            m += 1;
        }
        if rest != 1 || q < 2 {
            return Err(Error::InvalidField(format!("{q} is not a prime power")));
        }
        Self::extension(p, m)
    }

    fn check_order(p: u32, m: u32) -> Result<()> {
        let q = u64::from(p).checked_pow(m).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(Error::InvalidField(format!("order {p}^{m} exceeds {MAX_ORDER}")));
        }
        Ok(())
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(m);
        let mut inner = Inner { p, m, q, modulus, tables: None };
        if q <= TABLE_ORDER {
            let n = q as usize;
            let mut add = vec![0u16; n * n];
            let mut mul = vec![0u16; n * n];
            let mut neg = vec![0u16; n];
            let mut inv = vec![0u16; n];
            for a in 0..q {
                neg[a as usize] = inner.slow_neg(a) as u16;
                for b in 0..q {
                    add[a as usize * n + b as usize] = inner.slow_add(a, b) as u16;
                    let prod = inner.slow_mul(a, b);
                    mul[a as usize * n + b as usize] = prod as u16;
                    if prod == 1 {
                        inv[a as usize] = b as u16;
                    }
                }
            }
            inner.tables = Some(Tables { add, mul, neg, inv });
        }
        FieldSpec(Arc::new(inner))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.m
    }

    /// Number of elements `q = p^m`.
    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients low-to-high; `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        if self.0.m == 1 {
            None
        } else {
            Some(&self.0.modulus)
        }
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.m == 1
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { spec: self.clone(), code: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { spec: self.clone(), code: 1 }
    }

    /// Element with the given code; fails if `code >= q`.
    pub fn element(&self, code: u32) -> Result<FieldElement> {
        if code >= self.0.q {
            return Err(Error::Domain(format!("element code {code} out of range for {self}")));
        }
        Ok(FieldElement { spec: self.clone(), code })
    }

    /// Element from its coefficient vector over `GF(p)` (low-to-high, length at most `m`).
    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.0.m as usize {
            return Err(Error::Domain(format!(
                "{} coefficients given for a degree-{} field",
                coeffs.len(),
                self.0.m
            )));
        }
        let mut code = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= self.0.p {
                return Err(Error::Domain(format!("coefficient {c} not reduced mod {}", self.0.p)));
            }
            code = code * self.0.p + c;
        }
        Ok(FieldElement { spec: self.clone(), code })
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.q).map(move |code| FieldElement { spec: self.clone(), code })
    }

    pub(crate) fn same(&self, other: &FieldSpec) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }

    pub(crate) fn ensure_same(&self, other: &FieldSpec) -> Result<()> {
        if self.same(other) {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.to_string(), other.to_string()))
        }
    }

    // Code-level arithmetic. Callers guarantee codes are `< q`.

    #[inline]
    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        match &self.0.tables {
            Some(t) => t.add[(a * self.0.q + b) as usize] as u32,
            None => self.0.slow_add(a, b),
        }
    }

    #[inline]
    pub(crate) fn neg(&self, a: u32) -> u32 {
        match &self.0.tables {
            Some(t) => t.neg[a as usize] as u32,
            None => self.0.slow_neg(a),
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub(crate) fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.0.tables {
            Some(t) => t.mul[(a * self.0.q + b) as usize] as u32,
            None => self.0.slow_mul(a, b),
        }
    }

    /// `a + b * c`.
    #[inline]
    pub(crate) fn mul_add(&self, a: u32, b: u32, c: u32) -> u32 {
        self.add(a, self.mul(b, c))
    }

    pub(crate) fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0.tables {
            Some(t) => t.inv[a as usize] as u32,
            None => self.pow(a, u64::from(self.0.q) - 2),
        })
    }

    pub(crate) fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Coefficient vector over `GF(p)` of the element with the given code.
    pub(crate) fn digits(&self, code: u32) -> Vec<u32> {
        self.0.digits(code)
    }
}

impl Inner {
    fn digits(&self, mut code: u32) -> Vec<u32> {
        let mut out = vec![0; self.m as usize];
        for d in out.iter_mut() {
            *d = code % self.p;
            code /= self.p;
        }
        out
    }

    fn undigits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn slow_add(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return (a + b) % self.p;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.undigits(&sum)
    }

    fn slow_neg(&self, a: u32) -> u32 {
        if self.m == 1 {
            return (self.p - a) % self.p;
        }
        let d: Vec<u32> = self.digits(a).iter().map(|x| (self.p - x) % self.p).collect();
        self.undigits(&d)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = u64::from(self.p);
        if self.m == 1 {
            return ((u64::from(a) * u64::from(b)) % p) as u32;
        }
        let m = self.m as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % p;
            }
        }
        // Reduce with the monic modulus, highest degree first.
        for deg in (m..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            for (k, &mk) in self.modulus.iter().enumerate().take(m) {
                let idx = deg - m + k;
                prod[idx] = (prod[idx] + (p - c) * u64::from(mk)) % p;
            }
            prod[deg] = 0;
        }
        let reduced: Vec<u32> = prod[..m].iter().map(|&x| x as u32).collect();
        self.undigits(&reduced)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.m.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            let coeffs: Vec<String> = self.0.modulus.iter().map(u32::to_string).collect();
            write!(f, "GF({}^{}; {})", self.0.p, self.0.m, coeffs.join(","))
        }
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `GF(p)`, `GF(p^m; c0,c1,...,cm)` and, as a shorthand for the
/// built-in modulus, `GF(p^m)`.
impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidField(format!("cannot parse field description `{s}`"));
        let inner = s
            .trim()
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (order, modulus) = match inner.split_once(';') {
            Some((o, m)) => (o.trim(), Some(m.trim())),
            None => (inner.trim(), None),
        };
        let (p, m) = match order.split_once('^') {
            Some((p, m)) => (
                p.trim().parse::<u32>().map_err(|_| bad())?,
                m.trim().parse::<u32>().map_err(|_| bad())?,
            ),
            None => (order.parse::<u32>().map_err(|_| bad())?, 1),
        };
        match modulus {
            None => Self::extension(p, m),
            Some(list) => {
                let coeffs = list
                    .split(',')
                    .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                if coeffs.len() != m as usize + 1 {
                    return Err(Error::InvalidField(format!(
                        "modulus for degree {m} needs {} coefficients, got {}",
                        m + 1,
                        coeffs.len()
                    )));
                }
                Self::with_modulus(p, &coeffs)
            }
        }
    }
}

/// An element of a finite field. Always stored reduced.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    spec: FieldSpec,
    code: u32,
}

impl FieldElement {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    /// Coefficients over `GF(p)` in the power basis, low-to-high.
    pub fn coefficients(&self) -> Vec<u32> {
        self.spec.digits(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    fn with(&self, code: u32) -> FieldElement {
        FieldElement { spec: self.spec.clone(), code }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.spec.ensure_same(&other.spec)?;
        Ok(self.with(self.spec.add(self.code, other.code)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.spec.ensure_same(&other.spec)?;
        Ok(self.with(self.spec.sub(self.code, other.code)))
    }

    pub fn neg(&self) -> FieldElement {
        self.with(self.spec.neg(self.code))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.spec.ensure_same(&other.spec)?;
        Ok(self.with(self.spec.mul(self.code, other.code)))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.with(self.spec.inv(self.code)?))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.spec.ensure_same(&other.spec)?;
        let inv = self.spec.inv(other.code)?;
        Ok(self.with(self.spec.mul(self.code, inv)))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)
    }
}

/// Matrix over `base` of `v ↦ v·f` on the extension field of `f`, in the
/// power basis `(1, x, ..., x^{m-1})`. Row `i` holds the coordinates of `x^i · f`.
pub fn regular_representation(f: &FieldElement, base: &FieldSpec) -> Result<MatrixF> {
    let ext = f.spec();
    if !base.is_prime_field() || base.characteristic() != ext.characteristic() {
        return Err(Error::FieldMismatch(ext.to_string(), base.to_string()));
    }
    let m = ext.degree() as usize;
    let x = if m == 1 { 0 } else { ext.0.p };
    let mut rows = Vec::with_capacity(m * m);
    let mut power = 1u32;
    for _ in 0..m {
        rows.extend(ext.digits(ext.mul(power, f.code)));
        power = ext.mul(power, x);
    }
    MatrixF::from_codes(base, m, m, rows)
}

/// Polynomials over a [`FieldSpec`], as coefficient-code vectors low-to-high.
pub mod poly {
    use super::FieldSpec;

    fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    /// Remainder of `a` modulo the monic polynomial `b`.
    pub fn rem_monic(field: &FieldSpec, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let db = b.len() - 1;
        while r.len() > db {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - db;
            for (k, &bk) in b.iter().enumerate() {
                r[shift + k] = field.sub(r[shift + k], field.mul(lead, bk));
            }
            r = trim(r);
        }
        r
    }

    /// Monic polynomial of `degree` whose lower coefficients are the base-`q` digits of `index`.
    pub fn monic_from_index(field: &FieldSpec, degree: usize, mut index: u64) -> Vec<u32> {
        let q = u64::from(field.order());
        let mut out = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            out.push((index % q) as u32);
            index /= q;
        }
        out.push(1);
        out
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(field: &FieldSpec, f: &[u32]) -> bool {
        let deg = f.len() - 1;
        if deg <= 1 {
            return deg == 1;
        }
        let q = u64::from(field.order());
        for d in 1..=deg / 2 {
            for idx in 0..q.pow(d as u32) {
                let g = monic_from_index(field, d, idx);
                if rem_monic(field, f, &g).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Smallest monic irreducible polynomial of the given degree, ordering the
    /// lower coefficients as a base-`q` number with the highest one most significant.
    pub fn smallest_irreducible(field: &FieldSpec, degree: usize) -> Vec<u32> {
        let q = u64::from(field.order());
        (0..q.pow(degree as u32))
            .map(|idx| monic_from_index(field, degree, idx))
            .find(|f| is_irreducible(field, f))
            .expect("irreducible polynomials exist in every degree")
    }
}
