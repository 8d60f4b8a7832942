//! Cube hit frequencies, neighborhoods, Weyl exponential sums, discrepancy
//! and convergence sweeps over the digit count.
//!
//! Frequencies and deviations are exact rationals built from integer counts;
//! floats appear only in Weyl values and rendered output. Half-open boxes
//! [lo, hi) are used everywhere. Hit counting, Weyl accumulation and table
//! construction are commutative reductions over enumeration partitions, so
//! integer results are bit-identical for every thread count.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::functions::Collection;
use crate::mring::RingSpec;
use crate::pointset::{
    fold_points, EnumerationLimits, EnumerationMode, EnumerationPlan, Point, SuffixCondition,
};
use crate::report::{ratio_serde, ratio_vec_serde, u128_vec_serde};

/// Default cap on dense cell tables (frequency histograms, grid prefix
/// tables): k·s beyond roughly 24 base-2-equivalent digits must be raised
/// explicitly.
pub const DEFAULT_TABLE_CELLS: u128 = 1 << 24;

/// Guard on the number of corner pairs the grid/exact suprema may enumerate.
const BOX_ENUM_CAP: u128 = 300_000_000;

/// The cube J_k(a): side m^(−k), corner a/m^k, half-open on every axis.
/// Membership of a point equals a digit-window match on every coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBox {
    k: usize,
    #[serde(with = "u128_vec_serde")]
    corner: Vec<u128>,
}

impl GridBox {
    pub fn new(k: usize, corner: Vec<u128>, m: u64) -> Result<Self> {
        if k < 1 {
            return Err(Error::Usage("box resolution k must be at least 1".into()));
        }
        if corner.is_empty() {
            return Err(Error::Dimension("box corner needs at least one coordinate".into()));
        }
        let g = pow_u128(m, k).ok_or_else(|| {
            Error::Capacity(format!("m^k = {m}^{k} does not fit the box representation"))
        })?;
        if let Some(c) = corner.iter().find(|&&c| c >= g) {
            return Err(Error::Usage(format!("corner entry {c} is not below m^k = {g}")));
        }
        Ok(GridBox { k, corner })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn corner(&self) -> &[u128] {
        &self.corner
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    /// V(J) = m^(−ks).
    pub fn volume(&self, m: u64) -> BigRational {
        let denom = BigUint::from(m).pow((self.k * self.dim()) as u32);
        BigRational::new(BigInt::one(), BigInt::from(denom))
    }
}

fn pow_u128(base: u64, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

/// True iff substr(coord_i, n, n−k) = a_i for every coordinate.
pub fn box_contains(bx: &GridBox, p: &Point) -> Result<bool> {
    let spec = p.spec();
    if bx.k > spec.n() {
        return Err(Error::Usage(format!(
            "box resolution k = {} exceeds digit count n = {}",
            bx.k,
            spec.n()
        )));
    }
    if bx.dim() != p.dim() {
        return Err(Error::Dimension(format!(
            "box dimension {} vs point dimension {}",
            bx.dim(),
            p.dim()
        )));
    }
    // revalidate against the point's own base: the box may have been built
    // for a different ring
    let g = spec.base_pow_u128(bx.k).ok_or_else(|| {
        Error::Capacity(format!("m^k = {}^{} overflows the window representation", spec.m(), bx.k))
    })?;
    if let Some(&c) = bx.corner.iter().find(|&&c| c >= g) {
        return Err(Error::Usage(format!("corner entry {c} is not below m^k = {g}")));
    }
    let n = spec.n();
    Ok(p
        .coords()
        .iter()
        .zip(&bx.corner)
        .all(|(c, &a)| c.window_u128(n, n - bx.k) == a))
}

/// Exact hit frequency of one cube against its m^(−ks) target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub cube: GridBox,
    pub hits: u64,
    pub total: u64,
    #[serde(with = "ratio_serde")]
    pub frequency: BigRational,
    pub frequency_float: f64,
    #[serde(with = "ratio_serde")]
    pub target: BigRational,
    pub target_float: f64,
    #[serde(with = "ratio_serde")]
    pub deviation: BigRational,
    pub deviation_float: f64,
}

impl FrequencyReport {
    fn build(cube: GridBox, hits: u64, total: u64, m: u64) -> Self {
        let frequency = BigRational::new(BigInt::from(hits), BigInt::from(total));
        let target = cube.volume(m);
        let deviation = (&frequency - &target).abs();
        FrequencyReport {
            frequency_float: frequency.to_f64().unwrap_or(f64::NAN),
            target_float: target.to_f64().unwrap_or(f64::NAN),
            deviation_float: deviation.to_f64().unwrap_or(f64::NAN),
            cube,
            hits,
            total,
            frequency,
            target,
            deviation,
        }
    }
}

/// Count hits of a single cube over the planned enumeration. The exhaustive
/// mode yields the exact conditional probability at finite n.
pub fn cube_frequency(
    spec: RingSpec,
    c: &Collection,
    bx: &GridBox,
    cond: Option<SuffixCondition>,
    mode: EnumerationMode,
    limits: EnumerationLimits,
    threads: usize,
) -> Result<FrequencyReport> {
    if bx.k > spec.n() {
        return Err(Error::Usage(format!(
            "box resolution k = {} exceeds digit count n = {}",
            bx.k,
            spec.n()
        )));
    }
    if bx.dim() != c.dim() {
        return Err(Error::Dimension(format!(
            "box dimension {} vs collection size {}",
            bx.dim(),
            c.dim()
        )));
    }
    let plan = EnumerationPlan::new(spec, cond, mode, limits)?;
    let prepared = c.prepare(spec);
    let n = spec.n();
    let k = bx.k;
    let corner = bx.corner.clone();
    let hits = fold_points(
        &plan,
        threads,
        || 0u64,
        |acc, x| {
            let coords = prepared.eval(x);
            if coords
                .iter()
                .zip(&corner)
                .all(|(cd, &a)| cd.window_u128(n, n - k) == a)
            {
                *acc += 1;
            }
        },
        |a, b| a + b,
    );
    let total = plan.total_points() as u64;
    Ok(FrequencyReport::build(bx.clone(), hits, total, spec.m()))
}

/// Hit counts for every cube a ∈ [m^k]^s at once, one enumeration pass.
#[derive(Clone, Debug)]
pub struct FrequencyTable {
    spec: RingSpec,
    k: usize,
    dim: usize,
    g: u128,
    counts: Vec<u64>,
    total: u64,
}

/// Build the full m^(ks)-cell histogram of cube hits.
#[allow(clippy::too_many_arguments)]
pub fn frequency_table(
    spec: RingSpec,
    c: &Collection,
    k: usize,
    cond: Option<SuffixCondition>,
    mode: EnumerationMode,
    limits: EnumerationLimits,
    max_cells: u128,
    threads: usize,
) -> Result<FrequencyTable> {
    if k < 1 {
        return Err(Error::Usage("resolution k must be at least 1".into()));
    }
    if k > spec.n() {
        return Err(Error::Usage(format!(
            "resolution k = {k} exceeds digit count n = {}",
            spec.n()
        )));
    }
    let s = c.dim();
    let g = pow_u128(spec.m(), k)
        .ok_or_else(|| Error::Capacity(format!("m^k = {}^{k} overflows", spec.m())))?;
    let cells = checked_pow_u128(g, s)
        .filter(|&cl| cl <= max_cells && cl <= usize::MAX as u128)
        .ok_or_else(|| {
            Error::Capacity(format!(
                "cell table m^(ks) = {}^({k}*{s}) exceeds the {max_cells}-cell cap",
                spec.m()
            ))
        })? as usize;
    let plan = EnumerationPlan::new(spec, cond, mode, limits)?;
    let prepared = c.prepare(spec);
    let n = spec.n();
    let counts = fold_points(
        &plan,
        threads,
        || vec![0u64; cells],
        |acc, x| {
            let coords = prepared.eval(x);
            let mut idx: u128 = 0;
            for cd in coords.iter().rev() {
                idx = idx * g + cd.window_u128(n, n - k);
            }
            acc[idx as usize] += 1;
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    Ok(FrequencyTable {
        spec,
        k,
        dim: s,
        g,
        counts,
        total: plan.total_points() as u64,
    })
}

fn checked_pow_u128(base: u128, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl FrequencyTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn cells(&self) -> usize {
        self.counts.len()
    }

    fn corner_of(&self, mut idx: usize) -> Vec<u128> {
        let mut corner = vec![0u128; self.dim];
        for c in corner.iter_mut() {
            *c = idx as u128 % self.g;
            idx = (idx as u128 / self.g) as usize;
        }
        corner
    }

    fn index_of(&self, corner: &[u128]) -> usize {
        let mut idx: u128 = 0;
        for &c in corner.iter().rev() {
            idx = idx * self.g + c;
        }
        idx as usize
    }

    pub fn hits(&self, corner: &[u128]) -> u64 {
        self.counts[self.index_of(corner)]
    }

    pub fn report_for(&self, corner: &[u128]) -> Result<FrequencyReport> {
        let bx = GridBox::new(self.k, corner.to_vec(), self.spec.m())?;
        Ok(FrequencyReport::build(bx, self.hits(corner), self.total, self.spec.m()))
    }

    pub fn reports(&self) -> impl Iterator<Item = FrequencyReport> + '_ {
        (0..self.counts.len()).map(|idx| {
            let corner = self.corner_of(idx);
            let bx = GridBox { k: self.k, corner };
            FrequencyReport::build(bx, self.counts[idx], self.total, self.spec.m())
        })
    }

    /// Largest |frequency − m^(−ks)| over all cells, with a witness corner.
    /// Exact: compared as |hits·g^s − total| over the common denominator.
    pub fn max_deviation(&self) -> (BigRational, Vec<u128>) {
        let cells = self.counts.len() as u128;
        let mut best_num: u128 = 0;
        let mut best_idx = 0usize;
        for (idx, &cnt) in self.counts.iter().enumerate() {
            let num = (cnt as u128 * cells).abs_diff(self.total as u128);
            if num > best_num {
                best_num = num;
                best_idx = idx;
            }
        }
        let denom = BigInt::from(self.total as u128) * BigInt::from(cells);
        (
            BigRational::new(BigInt::from(best_num), denom),
            self.corner_of(best_idx),
        )
    }

    /// Grid-mode discrepancy at this table's own resolution.
    pub fn grid_discrepancy(&self) -> Result<GridSup> {
        grid_sup_from_cells(&self.counts, self.g, self.dim, self.total)
    }
}

/// Result of a grid-corner supremum scan.
#[derive(Clone, Debug)]
pub struct GridSup {
    pub value: BigRational,
    /// Box corner indices on the m^(−k) grid.
    pub lo: Vec<u128>,
    pub hi: Vec<u128>,
    pub grid: u128,
}

/// Normalized exponential sum over the enumerated point set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeylSumResult {
    #[serde(with = "crate::report::bigint_vec_serde")]
    pub h: Vec<BigInt>,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub points: u64,
    /// Documented worst-case float budget for this run: N·2^(−50).
    pub error_budget: f64,
}

#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    // Neumaier variant: safe to merge by feeding both parts to the other side.
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: Compensated) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// (1/N)·Σ exp(2πi⟨h, φ_n(x)⟩). The inner product is computed exactly as an
/// integer multiple of m^(−n); one sin_cos call per point; compensated
/// accumulation.
pub fn weyl_sum(
    spec: RingSpec,
    c: &Collection,
    h: &[BigInt],
    cond: Option<SuffixCondition>,
    mode: EnumerationMode,
    limits: EnumerationLimits,
    threads: usize,
) -> Result<WeylSumResult> {
    if h.len() != c.dim() {
        return Err(Error::Dimension(format!(
            "frequency vector length {} vs collection size {}",
            h.len(),
            c.dim()
        )));
    }
    let plan = EnumerationPlan::new(spec, cond, mode, limits)?;
    let prepared = c.prepare(spec);
    let modulus = BigInt::from(spec.modulus());
    let h_reduced: Vec<BigUint> = h
        .iter()
        .map(|hi| hi.mod_floor(&modulus).magnitude().clone())
        .collect();
    let modulus = spec.modulus();
    let modulus_f = modulus.to_f64().unwrap_or(f64::INFINITY);

    let (re, im, n_points) = fold_points(
        &plan,
        threads,
        || (Compensated::default(), Compensated::default(), 0u64),
        |(re, im, n), x| {
            let coords = prepared.eval(x);
            let mut phase = BigUint::zero();
            for (cd, hr) in coords.iter().zip(&h_reduced) {
                if !hr.is_zero() {
                    phase += hr * cd.to_biguint();
                }
            }
            phase %= &modulus;
            let t = phase.to_f64().unwrap_or(0.0) / modulus_f;
            let (s, c) = (TAU * t).sin_cos();
            re.add(c);
            im.add(s);
            *n += 1;
        },
        |(mut re, mut im, n), (re2, im2, n2)| {
            re.merge(re2);
            im.merge(im2);
            (re, im, n + n2)
        },
    );
    let total = plan.total_points() as u64;
    debug_assert_eq!(n_points, total);
    let re = re.value() / total as f64;
    let im = im.value() / total as f64;
    Ok(WeylSumResult {
        h: h.to_vec(),
        re,
        im,
        magnitude: re.hypot(im),
        points: total,
        error_budget: total as f64 * (2.0f64).powi(-50),
    })
}

/// The neighborhood O_K(b): all c with (b_i − c_i) mod m^K ∈ {0, 1, m^K−1}
/// on every coordinate, deduplicated (size min(3, m^K)^s).
pub fn neighborhood(b: &[u128], big_k: usize, m: u64) -> Result<Vec<Vec<u128>>> {
    if b.is_empty() {
        return Err(Error::Dimension("neighborhood needs at least one coordinate".into()));
    }
    let g = pow_u128(m, big_k)
        .ok_or_else(|| Error::Capacity(format!("m^K = {m}^{big_k} overflows")))?;
    if let Some(&bad) = b.iter().find(|&&v| v >= g) {
        return Err(Error::Usage(format!("coordinate {bad} is not below m^K = {g}")));
    }
    let per_coord: Vec<Vec<u128>> = b
        .iter()
        .map(|&v| {
            let mut vals = vec![v, (v + g - 1) % g, (v + 1) % g];
            vals.sort_unstable();
            vals.dedup();
            vals
        })
        .collect();
    let mut out = Vec::new();
    let mut cursor = vec![0usize; b.len()];
    loop {
        out.push(
            cursor
                .iter()
                .zip(&per_coord)
                .map(|(&i, vals)| vals[i])
                .collect::<Vec<u128>>(),
        );
        let mut axis = 0;
        loop {
            if axis == b.len() {
                return Ok(out);
            }
            cursor[axis] += 1;
            if cursor[axis] < per_coord[axis].len() {
                break;
            }
            cursor[axis] = 0;
            axis += 1;
        }
    }
}

/// The core set M(K) of a cube J_k(a) plus the closed-form counts
/// |M(K)| = (m^(K−k)−2)^s and |M'(K)| = m^((K−k)s).
#[derive(Clone, Debug)]
pub struct InnerCore {
    pub members: Vec<Vec<u128>>,
    pub core_count: BigUint,
    pub outer_count: BigUint,
}

/// Members are the b with substr(b_i, K, K−k) = a_i and
/// b_i mod m^(K−k) ∈ {1, ..., m^(K−k)−2} on every coordinate.
pub fn inner_core(k: usize, big_k: usize, a: &[u128], m: u64) -> Result<InnerCore> {
    if k < 1 || big_k <= k {
        return Err(Error::Usage(format!("inner core needs K > k >= 1, got K = {big_k}, k = {k}")));
    }
    if a.is_empty() {
        return Err(Error::Dimension("corner needs at least one coordinate".into()));
    }
    let s = a.len();
    let gk = pow_u128(m, k)
        .ok_or_else(|| Error::Capacity(format!("m^k = {m}^{k} overflows")))?;
    if let Some(&bad) = a.iter().find(|&&v| v >= gk) {
        return Err(Error::Usage(format!("corner entry {bad} is not below m^k = {gk}")));
    }
    let low = pow_u128(m, big_k - k)
        .ok_or_else(|| Error::Capacity(format!("m^(K−k) = {m}^{} overflows", big_k - k)))?;
    let per_len = low.saturating_sub(2);
    let member_count = checked_pow_u128(per_len, s);
    if member_count.map(|c| c > (1 << 22)).unwrap_or(true) {
        return Err(Error::Capacity(format!(
            "core set would hold {per_len}^{s} members; too many to materialize"
        )));
    }
    let per_coord: Vec<Vec<u128>> = a
        .iter()
        .map(|&ai| (1..=low.saturating_sub(2)).map(|r| ai * low + r).collect())
        .collect();
    let mut members = Vec::new();
    if per_coord.iter().all(|v| !v.is_empty()) {
        let mut cursor = vec![0usize; s];
        'outer: loop {
            members.push(
                cursor
                    .iter()
                    .zip(&per_coord)
                    .map(|(&i, vals)| vals[i])
                    .collect::<Vec<u128>>(),
            );
            let mut axis = 0;
            loop {
                if axis == s {
                    break 'outer;
                }
                cursor[axis] += 1;
                if cursor[axis] < per_coord[axis].len() {
                    break;
                }
                cursor[axis] = 0;
                axis += 1;
            }
        }
    }
    let core_count = BigUint::from(per_len).pow(s as u32);
    let outer_count = BigUint::from(m).pow(((big_k - k) * s) as u32);
    debug_assert_eq!(BigUint::from(members.len() as u64), core_count);
    Ok(InnerCore { members, core_count, outer_count })
}

/// How the discrepancy supremum is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscrepancyMode {
    /// All half-open boxes with corners on the m^(−k) grid, from a dense
    /// cumulative table.
    Grid { k: usize },
    /// All half-open boxes with per-axis corners drawn from the realized
    /// coordinate values, those values shifted up by one grid step m^(−n),
    /// and {0, 1}. On point sets with denominator m^n this attains the same
    /// supremum as the grid mode at k = n.
    Exact,
}

/// sup over the box family of |empirical frequency − volume|, with the
/// witness box as exact rationals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub mode: DiscrepancyMode,
    #[serde(with = "ratio_serde")]
    pub value: BigRational,
    pub value_float: f64,
    #[serde(with = "ratio_vec_serde")]
    pub witness_lo: Vec<BigRational>,
    #[serde(with = "ratio_vec_serde")]
    pub witness_hi: Vec<BigRational>,
    pub points: u64,
}

/// Grid-mode report straight from a streamed frequency table, without
/// materializing the point multiset.
pub fn grid_report_from_table(table: &FrequencyTable) -> Result<DiscrepancyReport> {
    let sup = table.grid_discrepancy()?;
    let gq = BigInt::from(sup.grid);
    let to_ratio = |v: &u128| BigRational::new(BigInt::from(*v), gq.clone());
    Ok(DiscrepancyReport {
        mode: DiscrepancyMode::Grid { k: table.k() },
        value_float: sup.value.to_f64().unwrap_or(f64::NAN),
        witness_lo: sup.lo.iter().map(&to_ratio).collect(),
        witness_hi: sup.hi.iter().map(&to_ratio).collect(),
        value: sup.value,
        points: table.total(),
    })
}

/// Discrepancy of a realized point multiset.
pub fn discrepancy(
    points: &[Point],
    mode: DiscrepancyMode,
    max_cells: u128,
) -> Result<DiscrepancyReport> {
    if points.is_empty() {
        return Err(Error::Usage("discrepancy needs at least one point".into()));
    }
    let spec = points[0].spec();
    let dim = points[0].dim();
    if points.iter().any(|p| p.spec() != spec || p.dim() != dim) {
        return Err(Error::Usage("all points must share one ring spec and dimension".into()));
    }
    match mode {
        DiscrepancyMode::Grid { k } => {
            if k < 1 || k > spec.n() {
                return Err(Error::Usage(format!(
                    "grid resolution k = {k} outside 1..={}",
                    spec.n()
                )));
            }
            let g = pow_u128(spec.m(), k)
                .ok_or_else(|| Error::Capacity(format!("m^k = {}^{k} overflows", spec.m())))?;
            let cells = checked_pow_u128(g, dim)
                .filter(|&cl| cl <= max_cells && cl <= usize::MAX as u128)
                .ok_or_else(|| {
                    Error::Capacity(format!("grid table {g}^{dim} exceeds the {max_cells}-cell cap"))
                })? as usize;
            let n = spec.n();
            let mut counts = vec![0u64; cells];
            for p in points {
                let mut idx: u128 = 0;
                for cd in p.coords().iter().rev() {
                    idx = idx * g + cd.window_u128(n, n - k);
                }
                counts[idx as usize] += 1;
            }
            let sup = grid_sup_from_cells(&counts, g, dim, points.len() as u64)?;
            let gq = BigInt::from(g);
            let to_ratio = |v: &u128| BigRational::new(BigInt::from(*v), gq.clone());
            Ok(DiscrepancyReport {
                mode,
                value_float: sup.value.to_f64().unwrap_or(f64::NAN),
                witness_lo: sup.lo.iter().map(&to_ratio).collect(),
                witness_hi: sup.hi.iter().map(&to_ratio).collect(),
                value: sup.value,
                points: points.len() as u64,
            })
        }
        DiscrepancyMode::Exact => exact_discrepancy(points, spec, dim),
    }
}

/// Supremum over all half-open grid boxes from a dense cell table, by an
/// (g+1)^s cumulative table and inclusion-exclusion.
pub(crate) fn grid_sup_from_cells(
    cells: &[u64],
    g: u128,
    dim: usize,
    total: u64,
) -> Result<GridSup> {
    let gp = g as usize + 1;
    let table_len = checked_pow_u128(gp as u128, dim)
        .filter(|&t| t <= usize::MAX as u128)
        .ok_or_else(|| Error::Capacity("cumulative table overflows".into()))?
        as usize;
    let pairs = g * (g + 1) / 2;
    let boxes = checked_pow_u128(pairs, dim)
        .filter(|&b| b <= BOX_ENUM_CAP)
        .ok_or_else(|| {
            Error::Capacity(format!(
                "grid supremum would enumerate more than {BOX_ENUM_CAP} boxes"
            ))
        })?;
    let _ = boxes;

    // strides for the cumulative table, axis 0 fastest
    let mut stride = vec![1usize; dim];
    for i in 1..dim {
        stride[i] = stride[i - 1] * gp;
    }
    let mut prefix = vec![0u64; table_len];
    // seed: prefix[idx+1 on every axis] = cell count
    for (ci, &cnt) in cells.iter().enumerate() {
        if cnt == 0 {
            continue;
        }
        let mut rest = ci;
        let mut pi = 0usize;
        for st in stride.iter() {
            let coord = rest % g as usize;
            rest /= g as usize;
            pi += (coord + 1) * st;
        }
        prefix[pi] = cnt;
    }
    // cumulative along each axis
    for &st in stride.iter().take(dim) {
        for idx in 0..table_len {
            let coord = idx / st % gp;
            if coord > 0 {
                prefix[idx] += prefix[idx - st];
            }
        }
    }

    let gs = checked_pow_u128(g, dim).expect("checked above");
    let count_box = |lo: &[u128], hi: &[u128]| -> u64 {
        let mut acc: i128 = 0;
        for mask in 0..1usize << dim {
            let mut pi = 0usize;
            let mut sign = 1i128;
            for axis in 0..dim {
                if mask >> axis & 1 == 1 {
                    pi += hi[axis] as usize * stride[axis];
                } else {
                    pi += lo[axis] as usize * stride[axis];
                    sign = -sign;
                }
            }
            acc += sign * prefix[pi] as i128;
        }
        acc as u64
    };

    let mut best_num: u128 = 0;
    let mut best_lo = vec![0u128; dim];
    let mut best_hi = vec![g; dim];
    let mut lo = vec![0u128; dim];
    let mut hi = vec![1u128; dim];
    // enumerate every (lo < hi) pair per axis
    loop {
        let cnt = count_box(&lo, &hi);
        let vol_units: u128 = lo.iter().zip(&hi).map(|(&l, &h)| h - l).product();
        let num = (cnt as u128 * gs).abs_diff(total as u128 * vol_units);
        if num > best_num {
            best_num = num;
            best_lo = lo.clone();
            best_hi = hi.clone();
        }
        // advance (lo, hi) odometer
        let mut axis = 0;
        loop {
            if axis == dim {
                let denom = BigInt::from(total as u128) * BigInt::from(gs);
                return Ok(GridSup {
                    value: BigRational::new(BigInt::from(best_num), denom),
                    lo: best_lo,
                    hi: best_hi,
                    grid: g,
                });
            }
            hi[axis] += 1;
            if hi[axis] <= g {
                break;
            }
            lo[axis] += 1;
            if lo[axis] < g {
                hi[axis] = lo[axis] + 1;
                break;
            }
            lo[axis] = 0;
            hi[axis] = 1;
            axis += 1;
        }
    }
}

/// Exact-mode supremum: candidate corners per axis are the realized values,
/// realized+ulp and {0,1}; the innermost axis is solved by a prefix scan.
fn exact_discrepancy(points: &[Point], spec: RingSpec, dim: usize) -> Result<DiscrepancyReport> {
    let n_points = points.len();
    if dim > 3 {
        return Err(Error::Capacity(format!(
            "exact-mode discrepancy supports s <= 3, got s = {dim}"
        )));
    }
    if n_points > 10_000 {
        return Err(Error::Capacity(format!(
            "exact-mode discrepancy supports at most 10^4 points, got {n_points}"
        )));
    }
    // scaled-integer budget: all deviations live over the denominator N·M^s
    let modulus = spec.modulus();
    let scale_bits = modulus.bits() as usize * dim + 64 - (n_points as u64).leading_zeros() as usize;
    if scale_bits + 2 > 126 {
        return Err(Error::Capacity(
            "exact-mode discrepancy: m^(n·s)·N exceeds the 128-bit scaled-integer budget".into(),
        ));
    }
    let m_units = modulus.to_u128().expect("bits checked");

    // coordinates as integers scaled by m^n
    let coords: Vec<Vec<u128>> = points
        .iter()
        .map(|p| {
            p.coords()
                .iter()
                .map(|c| c.to_u128().expect("bits checked"))
                .collect()
        })
        .collect();

    // per-axis candidates: realized, realized+1, 0, M
    let mut cands: Vec<Vec<u128>> = Vec::with_capacity(dim);
    for axis in 0..dim {
        let mut v: Vec<u128> = coords.iter().flat_map(|c| [c[axis], c[axis] + 1]).collect();
        v.push(0);
        v.push(m_units);
        v.sort_unstable();
        v.dedup();
        cands.push(v);
    }

    // enumeration budget: outer pair counts times an inner linear scan
    let mut work: u128 = (cands[dim - 1].len() + n_points) as u128;
    for c in cands.iter().take(dim - 1) {
        let pairs = (c.len() * (c.len() + 1) / 2) as u128;
        work = work.saturating_mul(pairs);
    }
    if work > BOX_ENUM_CAP {
        return Err(Error::Capacity(format!(
            "exact-mode discrepancy would scan ~{work} candidate boxes"
        )));
    }

    let ms_units = checked_pow_u128(m_units, dim).expect("bits checked") as i128;
    let total = n_points as i128;

    struct Best {
        num: i128,
        lo: Vec<u128>,
        hi: Vec<u128>,
    }

    // recursive slab scan; the innermost axis runs the prefix decomposition
    struct Scan<'a> {
        dim: usize,
        coords: &'a [Vec<u128>],
        cands: &'a [Vec<u128>],
        ms_units: i128,
        total: i128,
        lo_acc: Vec<u128>,
        hi_acc: Vec<u128>,
        best: Best,
    }

    impl Scan<'_> {
        fn run(&mut self, axis: usize, subset: &[usize], outer_vol: u128) {
            if axis == self.dim - 1 {
                self.innermost(axis, subset, outer_vol);
                return;
            }
            let cand = self.cands[axis].clone();
            for li in 0..cand.len() {
                for hi_i in li + 1..cand.len() {
                    let (l, h) = (cand[li], cand[hi_i]);
                    let filtered: Vec<usize> = subset
                        .iter()
                        .copied()
                        .filter(|&i| {
                            let v = self.coords[i][axis];
                            l <= v && v < h
                        })
                        .collect();
                    self.lo_acc[axis] = l;
                    self.hi_acc[axis] = h;
                    self.run(axis + 1, &filtered, outer_vol * (h - l));
                }
            }
        }

        fn innermost(&mut self, axis: usize, subset: &[usize], outer_vol: u128) {
            let cand = &self.cands[axis];
            // prefix counts of subset coords against the sorted candidates
            let mut vals: Vec<u128> = subset.iter().map(|&i| self.coords[i][axis]).collect();
            vals.sort_unstable();
            let mut pre = Vec::with_capacity(cand.len());
            let mut vi = 0usize;
            for &t in cand {
                while vi < vals.len() && vals[vi] < t {
                    vi += 1;
                }
                pre.push(vi as i128);
            }
            let a_factor = self.total * outer_vol as i128;
            // g(t) = pre(t)·M^s − N·W·t; dev over [l,h) is ±(g(h) − g(l))
            let g_at = |i: usize| pre[i] * self.ms_units - a_factor * cand[i] as i128;
            let mut min_i = 0usize;
            let mut max_i = 0usize;
            let mut min_v = g_at(0);
            let mut max_v = min_v;
            for i in 1..cand.len() {
                let v = g_at(i);
                // candidates before index i serve as lo for hi = i
                let up = v - min_v;
                if up > self.best.num {
                    self.best.num = up;
                    self.best.lo[axis] = cand[min_i];
                    self.best.hi[axis] = cand[i];
                    self.best.lo[..axis].copy_from_slice(&self.lo_acc[..axis]);
                    self.best.hi[..axis].copy_from_slice(&self.hi_acc[..axis]);
                }
                let down = max_v - v;
                if down > self.best.num {
                    self.best.num = down;
                    self.best.lo[axis] = cand[max_i];
                    self.best.hi[axis] = cand[i];
                    self.best.lo[..axis].copy_from_slice(&self.lo_acc[..axis]);
                    self.best.hi[..axis].copy_from_slice(&self.hi_acc[..axis]);
                }
                if v < min_v {
                    min_v = v;
                    min_i = i;
                }
                if v > max_v {
                    max_v = v;
                    max_i = i;
                }
            }
        }
    }

    let all: Vec<usize> = (0..n_points).collect();
    let mut scan = Scan {
        dim,
        coords: &coords,
        cands: &cands,
        ms_units,
        total,
        lo_acc: vec![0u128; dim],
        hi_acc: vec![0u128; dim],
        best: Best { num: -1, lo: vec![0; dim], hi: vec![m_units; dim] },
    };
    scan.run(0, &all, 1);
    let best = scan.best;

    let denom = BigInt::from(total) * BigInt::from(ms_units);
    let value = BigRational::new(BigInt::from(best.num.max(0)), denom);
    let mq = BigInt::from(m_units);
    let to_ratio = |v: &u128| BigRational::new(BigInt::from(*v), mq.clone());
    Ok(DiscrepancyReport {
        mode: DiscrepancyMode::Exact,
        value_float: value.to_f64().unwrap_or(f64::NAN),
        witness_lo: best.lo.iter().map(&to_ratio).collect(),
        witness_hi: best.hi.iter().map(&to_ratio).collect(),
        value,
        points: n_points as u64,
    })
}

/// One row of a convergence sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    #[serde(with = "ratio_serde")]
    pub max_deviation: BigRational,
    pub max_deviation_float: f64,
    #[serde(with = "ratio_serde")]
    pub grid_discrepancy: BigRational,
    pub grid_discrepancy_float: f64,
}

/// Exhaustive cube-frequency deviations and grid discrepancy for every n in
/// the range, one exact row per n.
#[allow(clippy::too_many_arguments)]
pub fn convergence_sweep(
    m: u64,
    n_lo: usize,
    n_hi: usize,
    c: &Collection,
    k: usize,
    cond: Option<SuffixCondition>,
    limits: EnumerationLimits,
    max_cells: u128,
    threads: usize,
) -> Result<Vec<SweepRow>> {
    if n_lo > n_hi {
        return Err(Error::Usage(format!("empty sweep range {n_lo}:{n_hi}")));
    }
    let d = cond.as_ref().map(|cd| cd.d()).unwrap_or(0);
    if n_lo < k + d {
        return Err(Error::Usage(format!(
            "sweep needs n_lo >= k + d = {} to fit the windows",
            k + d
        )));
    }
    let mut rows = Vec::with_capacity(n_hi - n_lo + 1);
    for n in n_lo..=n_hi {
        let spec = RingSpec::new(m, n)?;
        let table = frequency_table(
            spec,
            c,
            k,
            cond.clone(),
            EnumerationMode::Exhaustive,
            limits,
            max_cells,
            threads,
        )?;
        let (max_deviation, _) = table.max_deviation();
        let sup = table.grid_discrepancy()?;
        rows.push(SweepRow {
            n,
            max_deviation_float: max_deviation.to_f64().unwrap_or(f64::NAN),
            max_deviation,
            grid_discrepancy_float: sup.value.to_f64().unwrap_or(f64::NAN),
            grid_discrepancy: sup.value,
        });
    }
    Ok(rows)
}
