//! Exact arithmetic on residues modulo m^n stored as base-m digit vectors.
//!
//! A [`Residue`] is a length-n vector of digits in [0, m), least significant
//! first, so truncation and digit-window extraction are slice operations.
//! Addition, subtraction and multiplication are plain column arithmetic with
//! carries/borrows in base m; every value is immutable after construction and
//! every operation is pure.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Ring parameters: base m ≥ 2 and digit count n ≥ 1. The modulus m^n is
/// never materialized implicitly; everything that needs it asks for it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingSpec {
    m: u64,
    n: usize,
}

impl RingSpec {
    /// Largest accepted base. One digit per machine word with u128 column
    /// accumulators is exact up to here.
    pub const MAX_BASE: u64 = 1 << 32;

    pub fn new(m: u64, n: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidSpec(format!("base m = {m} must be at least 2")));
        }
        if m > Self::MAX_BASE {
            return Err(Error::InvalidSpec(format!(
                "base m = {m} exceeds the supported maximum 2^32"
            )));
        }
        if n < 1 {
            return Err(Error::InvalidSpec("digit count n must be at least 1".into()));
        }
        Ok(RingSpec { m, n })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// m^e as an unbounded integer.
    pub fn base_pow(&self, e: usize) -> BigUint {
        BigUint::from(self.m).pow(e as u32)
    }

    /// The modulus m^n.
    pub fn modulus(&self) -> BigUint {
        self.base_pow(self.n)
    }

    /// m^e as u128 if it fits.
    pub fn base_pow_u128(&self, e: usize) -> Option<u128> {
        let mut acc: u128 = 1;
        for _ in 0..e {
            acc = acc.checked_mul(self.m as u128)?;
        }
        Some(acc)
    }

    pub fn zero(&self) -> Residue {
        Residue { digits: vec![0; self.n], spec: *self }
    }

    /// Least nonnegative residue of `v` modulo m^n, as a digit vector.
    /// Negative inputs take the canonical representative. Idempotent on
    /// values already in range.
    pub fn reduce(&self, v: &BigInt) -> Residue {
        let modulus = BigInt::from(self.modulus());
        let r = v.mod_floor(&modulus);
        let mag = r.magnitude().clone();
        self.reduce_biguint(&mag)
    }

    /// Reduce a nonnegative unbounded integer.
    pub fn reduce_biguint(&self, v: &BigUint) -> Residue {
        let modulus = self.modulus();
        let mut rest = if v < &modulus { v.clone() } else { v % &modulus };
        let m = BigUint::from(self.m);
        let mut digits = vec![0u64; self.n];
        for d in digits.iter_mut() {
            if rest.is_zero() {
                break;
            }
            let (q, r) = rest.div_rem(&m);
            *d = r.to_u64().expect("digit below base fits u64");
            rest = q;
        }
        Residue { digits, spec: *self }
    }

    /// Reduce a signed machine integer.
    pub fn reduce_int(&self, v: i128) -> Residue {
        self.reduce(&BigInt::from(v))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.m, self.n)
    }
}

/// An element of [m^n] as base-m digits, least significant first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    digits: Vec<u64>,
    spec: RingSpec,
}

/// The arithmetic dispatch used by the CLI and the oracle suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
}

/// Column arithmetic on matching specs; the public entry point for callers
/// that carry the operation as data.
pub fn arith(kind: ArithKind, a: &Residue, b: &Residue) -> Result<Residue> {
    match kind {
        ArithKind::Add => a.add(b),
        ArithKind::Sub => a.sub(b),
        ArithKind::Mul => a.mul(b),
    }
}

impl Residue {
    /// Wrap an explicit digit vector. Length must equal spec.n and every
    /// digit must be below the base.
    pub fn from_digits(digits: Vec<u64>, spec: RingSpec) -> Result<Self> {
        if digits.len() != spec.n() {
            return Err(Error::Usage(format!(
                "digit vector length {} does not match spec n = {}",
                digits.len(),
                spec.n()
            )));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= spec.m()) {
            return Err(Error::Usage(format!("digit {d} is not below base {}", spec.m())));
        }
        Ok(Residue { digits, spec })
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    pub fn to_biguint(&self) -> BigUint {
        let m = BigUint::from(self.spec.m);
        let mut acc = BigUint::zero();
        for &d in self.digits.iter().rev() {
            acc = acc * &m + BigUint::from(d);
        }
        acc
    }

    /// Integer value if it fits in u128.
    pub fn to_u128(&self) -> Option<u128> {
        let mut acc: u128 = 0;
        for &d in self.digits.iter().rev() {
            acc = acc.checked_mul(self.spec.m as u128)?.checked_add(d as u128)?;
        }
        Some(acc)
    }

    fn check_same_spec(&self, rhs: &Residue) -> Result<()> {
        if self.spec != rhs.spec {
            return Err(Error::Usage(format!(
                "operands live in different rings: ({}) vs ({})",
                self.spec, rhs.spec
            )));
        }
        Ok(())
    }

    /// Column addition with carries, mod m^n.
    pub fn add(&self, rhs: &Residue) -> Result<Residue> {
        self.check_same_spec(rhs)?;
        let m = self.spec.m;
        let mut digits = vec![0u64; self.spec.n];
        let mut carry = 0u64;
        for (t, d) in digits.iter_mut().enumerate() {
            let s = self.digits[t] + rhs.digits[t] + carry;
            if s >= m {
                *d = s - m;
                carry = 1;
            } else {
                *d = s;
                carry = 0;
            }
        }
        Ok(Residue { digits, spec: self.spec })
    }

    /// Column subtraction with borrows, mod m^n.
    pub fn sub(&self, rhs: &Residue) -> Result<Residue> {
        self.check_same_spec(rhs)?;
        let m = self.spec.m as i128;
        let mut digits = vec![0u64; self.spec.n];
        let mut borrow = 0i128;
        for (t, d) in digits.iter_mut().enumerate() {
            let mut v = self.digits[t] as i128 - rhs.digits[t] as i128 - borrow;
            if v < 0 {
                v += m;
                borrow = 1;
            } else {
                borrow = 0;
            }
            *d = v as u64;
        }
        Ok(Residue { digits, spec: self.spec })
    }

    /// Schoolbook column multiplication, truncated to n columns. Column
    /// accumulators are u128, which is exact for bases up to 2^32.
    pub fn mul(&self, rhs: &Residue) -> Result<Residue> {
        self.check_same_spec(rhs)?;
        let n = self.spec.n;
        let m = self.spec.m as u128;
        let mut acc = vec![0u128; n];
        for i in 0..n {
            let a = self.digits[i] as u128;
            if a == 0 {
                continue;
            }
            for j in 0..n - i {
                acc[i + j] += a * rhs.digits[j] as u128;
            }
        }
        let mut digits = vec![0u64; n];
        let mut carry: u128 = 0;
        for (t, d) in digits.iter_mut().enumerate() {
            let v = acc[t] + carry;
            *d = (v % m) as u64;
            carry = v / m;
        }
        Ok(Residue { digits, spec: self.spec })
    }

    /// The digit window at positions j..i-1, i.e. (x mod m^i − x mod m^j)/m^j,
    /// an integer in [m^(i−j)]. Requires i > j and i ≤ n. The result is an
    /// unbounded integer because windows routinely cross ring boundaries.
    pub fn substr(&self, i: usize, j: usize) -> Result<BigUint> {
        if i <= j {
            return Err(Error::Usage(format!("substr needs i > j, got i = {i}, j = {j}")));
        }
        if i > self.spec.n {
            return Err(Error::Usage(format!(
                "substr upper index {i} exceeds digit count {}",
                self.spec.n
            )));
        }
        let m = BigUint::from(self.spec.m);
        let mut acc = BigUint::zero();
        for &d in self.digits[j..i].iter().rev() {
            acc = acc * &m + BigUint::from(d);
        }
        Ok(acc)
    }

    /// Digit window as u128. Callers guarantee the window fits; hot loops use
    /// this after a one-time capacity check.
    pub(crate) fn window_u128(&self, i: usize, j: usize) -> u128 {
        debug_assert!(i > j && i <= self.spec.n);
        let mut acc: u128 = 0;
        for &d in self.digits[j..i].iter().rev() {
            acc = acc * self.spec.m as u128 + d as u128;
        }
        acc
    }

    /// The same value in a ring with fewer digits (low digits are kept).
    pub fn truncate(&self, n: usize) -> Result<Residue> {
        if n < 1 || n > self.spec.n {
            return Err(Error::Usage(format!(
                "truncate target {n} outside 1..={}",
                self.spec.n
            )));
        }
        let spec = RingSpec::new(self.spec.m, n)?;
        Ok(Residue { digits: self.digits[..n].to_vec(), spec })
    }

    /// Normalized coordinate value/m^n, exact.
    pub fn to_unit_point(&self) -> UnitPoint {
        UnitPoint {
            numerator: self.to_biguint(),
            base: self.spec.m,
            exponent: self.spec.n,
        }
    }

    /// In-place x += m^pos, carries propagating, overflow beyond digit n−1
    /// dropped (mod m^n). Used by the ascending enumeration.
    pub(crate) fn increment_at(&mut self, pos: usize) {
        let m = self.spec.m;
        let mut p = pos;
        while p < self.spec.n {
            self.digits[p] += 1;
            if self.digits[p] == m {
                self.digits[p] = 0;
                p += 1;
            } else {
                break;
            }
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_biguint())
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Residue({} mod {}^{})", self.to_biguint(), self.spec.m, self.spec.n)
    }
}

/// Digit window of a plain nonnegative integer: (x mod m^i − x mod m^j)/m^j.
/// Unlike the residue flavor there is no upper bound on i.
pub fn substr_int(x: &BigUint, m: u64, i: usize, j: usize) -> Result<BigUint> {
    if m < 2 {
        return Err(Error::InvalidSpec(format!("base m = {m} must be at least 2")));
    }
    if i <= j {
        return Err(Error::Usage(format!("substr needs i > j, got i = {i}, j = {j}")));
    }
    let mb = BigUint::from(m);
    let hi = x % mb.pow(i as u32);
    let lo = x % mb.pow(j as u32);
    Ok((hi - lo) / mb.pow(j as u32))
}

/// An exact point of [0,1): numerator / m^exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitPoint {
    numerator: BigUint,
    base: u64,
    exponent: usize,
}

impl UnitPoint {
    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::from(self.base).pow(self.exponent as u32)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator.clone()),
            BigInt::from(self.denominator()),
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// "numerator/denominator" with both parts in decimal.
    pub fn exact_string(&self) -> String {
        format!("{}/{}", self.numerator, self.denominator())
    }
}

impl fmt::Display for UnitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact_string())
    }
}
