//! Integer polynomials as compatible functions of the digit ring, their
//! evaluation and iteration mod m^n, collection builders, and integer-matrix
//! transforms of collections.
//!
//! Evaluation is Horner's scheme entirely inside the ring: congruent inputs
//! give congruent outputs at every digit count, so a single polynomial serves
//! a whole sweep over n. Coefficients stay unbounded signed integers at rest;
//! reduction happens during evaluation.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mring::{Residue, RingSpec};

/// A polynomial with signed unbounded integer coefficients, lowest degree
/// first. Trailing zero coefficients are stripped; the zero polynomial keeps
/// a single zero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(Zero::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    /// The identity map x.
    pub fn identity() -> Self {
        Self::from_i64s(&[0, 1])
    }

    /// coefficient · x^power.
    pub fn monomial(coefficient: BigInt, power: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); power + 1];
        coeffs[power] = coefficient;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn add(&self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![BigInt::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        IntPolynomial::new(out)
    }

    pub fn scale(&self, factor: &BigInt) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn mul(&self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    /// Symbolic composition self(g(x)). Degrees multiply and coefficients
    /// explode quickly; this exists for matrix transforms, not for iteration.
    pub fn compose(&self, g: &IntPolynomial) -> IntPolynomial {
        let mut acc = IntPolynomial::new(vec![self.coeffs.last().cloned().unwrap_or_default()]);
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(g).add(&IntPolynomial::new(vec![c.clone()]));
        }
        acc
    }

    /// Evaluation over unbounded integers.
    pub fn eval_big(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner's scheme with every step reduced mod m^n.
    pub fn eval_mod(&self, x: &Residue) -> Residue {
        let spec = x.spec();
        let mut acc = spec.reduce(self.coeffs.last().expect("coeffs nonempty"));
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc
                .mul(x)
                .and_then(|p| p.add(&spec.reduce(c)))
                .expect("same spec by construction");
        }
        acc
    }

    /// i-fold composition applied by repeated modular evaluation; i = 0
    /// returns x unchanged.
    pub fn iterate_mod(&self, x: &Residue, i: usize) -> Residue {
        let mut acc = x.clone();
        for _ in 0..i {
            acc = self.eval_mod(&acc);
        }
        acc
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Comma-separated signed decimal coefficients, lowest degree first
    /// ("1,1,1" is 1 + x + x^2).
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                BigInt::from_str(t.trim())
                    .map_err(|_| Error::Parse(format!("bad polynomial coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        Ok(IntPolynomial::new(coeffs))
    }
}

/// One entry of a collection: an explicit polynomial, an iteration f^(i) of a
/// base polynomial (i = 0 is the identity map), or the monomial x^j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSpec {
    Explicit(IntPolynomial),
    Iterate { base: IntPolynomial, count: usize },
    Monomial { power: usize },
}

impl FunctionSpec {
    /// Symbolic expansion to an explicit polynomial. For iteration entries
    /// the degree grows as (deg f)^i; use modular evaluation for anything
    /// beyond matrix transforms.
    pub fn to_polynomial(&self) -> IntPolynomial {
        match self {
            FunctionSpec::Explicit(p) => p.clone(),
            FunctionSpec::Iterate { base, count } => {
                let mut acc = IntPolynomial::identity();
                for _ in 0..*count {
                    acc = base.compose(&acc);
                }
                acc
            }
            FunctionSpec::Monomial { power } => IntPolynomial::monomial(BigInt::one(), *power),
        }
    }

    pub fn eval_mod(&self, x: &Residue) -> Residue {
        match self {
            FunctionSpec::Explicit(p) => p.eval_mod(x),
            FunctionSpec::Iterate { base, count } => base.iterate_mod(x, *count),
            FunctionSpec::Monomial { power } => pow_mod(x, *power),
        }
    }
}

fn pow_mod(x: &Residue, power: usize) -> Residue {
    debug_assert!(power >= 1);
    let mut acc = x.clone();
    let bits = usize::BITS - power.leading_zeros();
    for b in (0..bits - 1).rev() {
        acc = acc.mul(&acc).expect("same spec");
        if power >> b & 1 == 1 {
            acc = acc.mul(x).expect("same spec");
        }
    }
    acc
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Explicit(p) => write!(f, "{p}"),
            FunctionSpec::Iterate { base, count } => write!(f, "iterate({base}; {count})"),
            FunctionSpec::Monomial { power } => write!(f, "x^{power}"),
        }
    }
}

/// An ordered tuple (f_1, ..., f_s) of function specifications sharing no
/// state; s ≥ 1 always.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collection {
    entries: Vec<FunctionSpec>,
}

impl Collection {
    pub fn from_specs(entries: Vec<FunctionSpec>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Usage("a collection needs at least one entry".into()));
        }
        Ok(Collection { entries })
    }

    pub fn explicit(polys: Vec<IntPolynomial>) -> Result<Self> {
        Self::from_specs(polys.into_iter().map(FunctionSpec::Explicit).collect())
    }

    /// (x, x^2, ..., x^s).
    pub fn monomials(s: usize) -> Result<Self> {
        if s < 1 {
            return Err(Error::Usage("monomials needs s >= 1".into()));
        }
        Self::from_specs((1..=s).map(|power| FunctionSpec::Monomial { power }).collect())
    }

    /// (x, f, f^(2), ..., f^(s−1)) as iteration specs.
    pub fn iterations(f: IntPolynomial, s: usize) -> Result<Self> {
        if s < 1 {
            return Err(Error::Usage("iterations needs s >= 1".into()));
        }
        Self::from_specs(
            (0..s)
                .map(|count| FunctionSpec::Iterate { base: f.clone(), count })
                .collect(),
        )
    }

    /// (2x, 3x^2, ..., s·x^(s−1)): the termwise derivatives of the monomial
    /// collection, s−1 entries. s = 1 would be empty and is rejected.
    pub fn derivative(s: usize) -> Result<Self> {
        if s < 2 {
            return Err(Error::Usage("derivative needs s >= 2 (it yields s-1 entries)".into()));
        }
        Self::from_specs(
            (2..=s)
                .map(|j| {
                    FunctionSpec::Explicit(IntPolynomial::monomial(BigInt::from(j as u64), j - 1))
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[FunctionSpec] {
        &self.entries
    }

    pub fn to_polynomials(&self) -> Vec<IntPolynomial> {
        self.entries.iter().map(FunctionSpec::to_polynomial).collect()
    }

    /// Resolve every entry against a concrete ring once, so enumeration
    /// loops pay no per-point coefficient reduction.
    pub fn prepare(&self, spec: RingSpec) -> PreparedCollection {
        PreparedCollection {
            entries: self.entries.iter().map(|e| PreparedEntry::new(e, spec)).collect(),
        }
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join("; "))
    }
}

impl FromStr for Collection {
    type Err = Error;

    /// "monomials:s" | "iterations:`<poly>`:s" | "derivative:s" |
    /// semicolon-joined explicit polynomials ("0,1;1,0,1").
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("monomials:") {
            let s = parse_count(rest)?;
            return Collection::monomials(s);
        }
        if let Some(rest) = s.strip_prefix("iterations:") {
            let (poly_text, count_text) = rest
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse("iterations wants iterations:<poly>:s".into()))?;
            let f = IntPolynomial::from_str(poly_text)?;
            return Collection::iterations(f, parse_count(count_text)?);
        }
        if let Some(rest) = s.strip_prefix("derivative:") {
            return Collection::derivative(parse_count(rest)?);
        }
        let polys = s
            .split(';')
            .map(IntPolynomial::from_str)
            .collect::<Result<Vec<_>>>()?;
        Collection::explicit(polys)
    }
}

fn parse_count(text: &str) -> Result<usize> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad collection size {text:?}")))
}

/// A collection with all coefficients pre-reduced into one ring.
#[derive(Clone, Debug)]
pub struct PreparedCollection {
    entries: Vec<PreparedEntry>,
}

#[derive(Clone, Debug)]
enum PreparedEntry {
    Explicit(Vec<Residue>),
    Iterate { coeffs: Vec<Residue>, count: usize },
    Monomial { power: usize },
}

impl PreparedEntry {
    fn new(spec_entry: &FunctionSpec, spec: RingSpec) -> Self {
        let reduce_all =
            |p: &IntPolynomial| p.coeffs().iter().map(|c| spec.reduce(c)).collect::<Vec<_>>();
        match spec_entry {
            FunctionSpec::Explicit(p) => PreparedEntry::Explicit(reduce_all(p)),
            FunctionSpec::Iterate { base, count } => {
                PreparedEntry::Iterate { coeffs: reduce_all(base), count: *count }
            }
            FunctionSpec::Monomial { power } => PreparedEntry::Monomial { power: *power },
        }
    }

    fn eval(&self, x: &Residue) -> Residue {
        match self {
            PreparedEntry::Explicit(coeffs) => horner(coeffs, x),
            PreparedEntry::Iterate { coeffs, count } => {
                let mut acc = x.clone();
                for _ in 0..*count {
                    acc = horner(coeffs, &acc);
                }
                acc
            }
            PreparedEntry::Monomial { power } => pow_mod(x, *power),
        }
    }
}

fn horner(coeffs: &[Residue], x: &Residue) -> Residue {
    let mut acc = coeffs.last().expect("coeffs nonempty").clone();
    for c in coeffs.iter().rev().skip(1) {
        acc = acc.mul(x).and_then(|p| p.add(c)).expect("same spec");
    }
    acc
}

impl PreparedCollection {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn eval(&self, x: &Residue) -> Vec<Residue> {
        self.entries.iter().map(|e| e.eval(x)).collect()
    }
}

/// A square matrix with signed unbounded integer entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "a {dim}x{dim} matrix needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(IntMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        Self::new(dim, entries)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Dimension("matrix rows must all have length dim".into()));
            }
            entries.extend(row.iter().map(|&v| BigInt::from(v)));
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim + col]
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut entries = Vec::with_capacity(self.dim * self.dim);
        for col in 0..self.dim {
            for row in 0..self.dim {
                entries.push(self.get(row, col).clone());
            }
        }
        IntMatrix { dim: self.dim, entries }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.dim {
            return Err(Error::Dimension(format!(
                "matrix dim {} vs vector length {}",
                self.dim,
                v.len()
            )));
        }
        Ok((0..self.dim)
            .map(|row| (0..self.dim).map(|col| self.get(row, col) * &v[col]).sum())
            .collect())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.dim;
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c).clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                // pivot swap; a zero column means a zero determinant
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = &num / &prev; // exact division in Bareiss
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.determinant().is_zero()
    }
}

impl FromStr for IntMatrix {
    type Err = Error;

    /// Semicolon-separated rows of comma-separated entries: "1,0;1,1".
    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<Vec<BigInt>> = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|t| {
                        BigInt::from_str(t.trim())
                            .map_err(|_| Error::Parse(format!("bad matrix entry {t:?}")))
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Parse("matrix must be square".into()));
        }
        IntMatrix::new(dim, rows.into_iter().flatten().collect())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self.get(r, c).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

/// g_i = sum over j of A(i,j)·f_j plus shift_i, as explicit polynomials. Iteration entries
/// are expanded symbolically first, which is the one place expansion is
/// required.
pub fn transform_affine(
    a: &IntMatrix,
    shift: &[BigInt],
    c: &Collection,
) -> Result<Collection> {
    if a.dim() != c.dim() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but the collection has {} entries",
            a.dim(),
            a.dim(),
            c.dim()
        )));
    }
    if shift.len() != c.dim() {
        return Err(Error::Dimension(format!(
            "shift vector length {} vs collection size {}",
            shift.len(),
            c.dim()
        )));
    }
    let polys = c.to_polynomials();
    let rows = (0..a.dim())
        .map(|row| {
            let mut acc = IntPolynomial::new(vec![shift[row].clone()]);
            for (col, f) in polys.iter().enumerate() {
                acc = acc.add(&f.scale(a.get(row, col)));
            }
            acc
        })
        .collect();
    Collection::explicit(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mring::RingSpec;

    fn spec(m: u64, n: usize) -> RingSpec {
        RingSpec::new(m, n).unwrap()
    }

    #[test]
    fn eval_mod_matches_unbounded_oracle() {
        // oracle: unbounded evaluation then reduce
        let f = IntPolynomial::from_i64s(&[1, 0, 1]); // x^2 + 1
        let s = spec(2, 4);
        let x = s.reduce_int(3);
        let expect = s.reduce(&f.eval_big(&BigInt::from(3)));
        assert_eq!(f.eval_mod(&x), expect);
        assert_eq!(f.eval_mod(&x).to_u128(), Some(10));

        let g = IntPolynomial::from_i64s(&[1, 1, 1]);
        let s3 = spec(3, 2);
        assert_eq!(g.eval_mod(&s3.reduce_int(2)).to_u128(), Some(7));
    }

    #[test]
    fn identity_polynomial_is_identity() {
        let f = IntPolynomial::identity();
        let x = spec(5, 3).reduce_int(77);
        assert_eq!(f.eval_mod(&x), x);
    }

    #[test]
    fn iterate_examples() {
        let f = IntPolynomial::from_i64s(&[1, 0, 1]);
        let s = spec(2, 4);
        let x = s.reduce_int(3);
        assert_eq!(f.iterate_mod(&x, 2).to_u128(), Some(5)); // 3 -> 10 -> 101 mod 16
        assert_eq!(f.iterate_mod(&x, 0), x);
        assert_eq!(f.iterate_mod(&x, 1), f.eval_mod(&x));
    }

    #[test]
    fn collection_builders() {
        let mono = Collection::monomials(3).unwrap();
        assert_eq!(mono.dim(), 3);
        assert_eq!(
            mono.entries()[1],
            FunctionSpec::Monomial { power: 2 }
        );

        let der = Collection::derivative(3).unwrap();
        assert_eq!(der.dim(), 2);
        assert_eq!(der.to_polynomials()[0], IntPolynomial::from_i64s(&[0, 2]));
        assert_eq!(der.to_polynomials()[1], IntPolynomial::from_i64s(&[0, 0, 3]));
        assert!(Collection::derivative(1).is_err());

        let f = IntPolynomial::from_i64s(&[1, 0, 1]);
        let it = Collection::iterations(f.clone(), 3).unwrap();
        assert_eq!(it.dim(), 3);
        assert_eq!(it.entries()[0], FunctionSpec::Iterate { base: f.clone(), count: 0 });
        assert_eq!(it.entries()[2], FunctionSpec::Iterate { base: f, count: 2 });
    }

    #[test]
    fn collection_text_round_trip() {
        for text in ["monomials:2", "iterations:1,1,1:2", "derivative:3", "0,1;1,0,1"] {
            let c: Collection = text.parse().unwrap();
            assert!(c.dim() >= 1, "parsed {text}");
        }
        let c: Collection = "iterations:1,1,1:2".parse().unwrap();
        assert_eq!(c.dim(), 2);
        assert!("monomials:zero".parse::<Collection>().is_err());
    }

    #[test]
    fn transform_identity_and_shear() {
        let c = Collection::monomials(2).unwrap();
        let id = IntMatrix::identity(2).unwrap();
        let z = vec![BigInt::zero(), BigInt::zero()];
        let t = transform_affine(&id, &z, &c).unwrap();
        assert_eq!(t.to_polynomials(), c.to_polynomials());

        let shear = IntMatrix::from_i64_rows(&[&[1, 0], &[1, 1]]).unwrap();
        let t = transform_affine(&shear, &z, &c).unwrap();
        assert_eq!(t.to_polynomials()[0], IntPolynomial::from_i64s(&[0, 1]));
        assert_eq!(t.to_polynomials()[1], IntPolynomial::from_i64s(&[0, 1, 1]));
    }

    #[test]
    fn transform_constant_shift() {
        let c = Collection::explicit(vec![IntPolynomial::identity()]).unwrap();
        let id = IntMatrix::identity(1).unwrap();
        let t = transform_affine(&id, &[BigInt::from(5)], &c).unwrap();
        assert_eq!(t.to_polynomials()[0], IntPolynomial::from_i64s(&[5, 1]));
    }

    #[test]
    fn transform_rejects_dimension_mismatch() {
        let c = Collection::monomials(2).unwrap();
        let a = IntMatrix::identity(3).unwrap();
        assert!(matches!(
            transform_affine(&a, &vec![BigInt::zero(); 3], &c),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn determinants() {
        assert!(IntMatrix::identity(3).unwrap().is_nondegenerate());
        let singular = IntMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).unwrap();
        assert!(!singular.is_nondegenerate());
        let unimodular = IntMatrix::from_i64_rows(&[&[2, 3], &[1, 2]]).unwrap();
        assert_eq!(unimodular.determinant(), BigInt::one());
        // pivot-swap path
        let swapped = IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(swapped.determinant(), BigInt::from(-1));
        let wide = IntMatrix::from_i64_rows(&[&[2, 1, 3], &[0, 0, 5], &[1, 4, 2]]).unwrap();
        assert_eq!(wide.determinant(), BigInt::from(-35));
    }

    #[test]
    fn symbolic_iteration_matches_modular_iteration() {
        let f = IntPolynomial::from_i64s(&[1, 2, 1]);
        let spec = spec(3, 5);
        let entry = FunctionSpec::Iterate { base: f.clone(), count: 3 };
        let expanded = entry.to_polynomial();
        for x in [0i128, 1, 7, 100, 242] {
            let r = spec.reduce_int(x);
            assert_eq!(expanded.eval_mod(&r), f.iterate_mod(&r, 3));
        }
    }

    #[test]
    fn prepared_collection_agrees_with_direct_eval() {
        let c: Collection = "iterations:1,1,1:3".parse().unwrap();
        let spec = spec(2, 6);
        let prepared = c.prepare(spec);
        for x in 0..64i128 {
            let r = spec.reduce_int(x);
            let via_prepared = prepared.eval(&r);
            for (i, e) in c.entries().iter().enumerate() {
                assert_eq!(via_prepared[i], e.eval_mod(&r));
            }
        }
    }
}
