//! Symmetry-reduced semidefinite programs for covering-code lower bounds.
//!
//! Variables are the orbit values `x_{i,j}^{t,p}` of the invariant matrix
//! `M'`; classes forced equal by symmetry share one variable. Blocks come from
//! the block diagonalization of the Terwilliger algebra, with every square-root
//! normalization removed by a positive diagonal congruence.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{
    alpha_nonbinary_scaled, beta_binary, binomial, for_each_eta, index_set, lambda_weights, orbit_size, upow, OrbitIndex,
};
use crate::inequalities::{InequalityError, InequalitySet};
use crate::linear::{int_rat, rat, LinearForm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SdpError {
    InvalidParameters { q: usize, n: usize, r: usize },
    NotMember(OrbitIndex),
    Inequality(InequalityError),
    UnknownVariable(usize),
    AsymmetricBlock(String),
}

impl fmt::Display for SdpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SdpError::InvalidParameters { q, n, r } => write!(f, "invalid parameters q={q} n={n} r={r}"),
            SdpError::NotMember(idx) => write!(f, "{idx} is not an orbit of word pairs"),
            SdpError::Inequality(e) => write!(f, "{e}"),
            SdpError::UnknownVariable(id) => write!(f, "variable {id} is not in the table"),
            SdpError::AsymmetricBlock(label) => write!(f, "block {label} is not symmetric"),
        }
    }
}

impl core::error::Error for SdpError {}

impl From<InequalityError> for SdpError {
    fn from(e: InequalityError) -> Self {
        SdpError::Inequality(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    Triple,
    Pair,
    Single,
}

impl ObjectiveKind {
    /// Power of `|C|` the scaled objective bounds.
    pub fn exponent(&self) -> u32 {
        match self {
            ObjectiveKind::Triple => 3,
            ObjectiveKind::Pair => 2,
            ObjectiveKind::Single => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::Triple => "triple",
            ObjectiveKind::Pair => "pair",
            ObjectiveKind::Single => "single",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "triple" => Some(ObjectiveKind::Triple),
            "pair" => Some(ObjectiveKind::Pair),
            "single" => Some(ObjectiveKind::Single),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Variables

fn class_key(idx: &OrbitIndex) -> ([usize; 3], usize) {
    let mut tri = [idx.i, idx.j, idx.distance()];
    tri.sort_unstable();
    (tri, idx.t - idx.p)
}

/// Canonical variables of `I(q, n)`.
///
/// Two classes share a variable when `(i, j, dist)` agree up to permutation
/// (and, for `q ≥ 3`, `t - p` agrees). Ids follow the lexicographic order of
/// the representatives, each the smallest member of its class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableTable {
    q: usize,
    n: usize,
    reps: Vec<OrbitIndex>,
    ids: BTreeMap<OrbitIndex, usize>,
    multiplicity: Vec<usize>,
}

impl VariableTable {
    pub fn new(q: usize, n: usize) -> Self {
        let mut by_key: BTreeMap<([usize; 3], usize), usize> = BTreeMap::new();
        let mut reps = Vec::new();
        let mut ids = BTreeMap::new();
        let mut multiplicity = Vec::new();
        for idx in index_set(q, n) {
            let id = *by_key.entry(class_key(&idx)).or_insert_with(|| {
                reps.push(idx);
                multiplicity.push(0);
                reps.len() - 1
            });
            multiplicity[id] += 1;
            ids.insert(idx, id);
        }
        VariableTable { q, n, reps, ids, multiplicity }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Representative of each id.
    pub fn representatives(&self) -> &[OrbitIndex] {
        &self.reps
    }

    /// Number of members of `I(q, n)` sharing each id.
    pub fn multiplicity(&self, id: usize) -> usize {
        self.multiplicity[id]
    }

    pub fn id(&self, idx: OrbitIndex) -> Result<usize, SdpError> {
        self.ids.get(&idx).copied().ok_or(SdpError::NotMember(idx))
    }

    /// Every member of `I(q, n)` with its id.
    pub fn members(&self) -> impl Iterator<Item = (OrbitIndex, usize)> + '_ {
        self.ids.iter().map(|(&idx, &id)| (idx, id))
    }

    fn x(&self, idx: OrbitIndex) -> LinearForm {
        LinearForm::var(self.ids[&idx])
    }

    fn pair(&self, a: usize) -> LinearForm {
        self.x(OrbitIndex::pair(a))
    }

    fn diagonal(&self, i: usize) -> LinearForm {
        self.x(OrbitIndex::diagonal(i))
    }
}

/// Variable id of `idx`.
pub fn canonicalize(q: usize, n: usize, idx: OrbitIndex) -> Result<usize, SdpError> {
    if !idx.is_member(q, n) {
        return Err(SdpError::NotMember(idx));
    }
    VariableTable::new(q, n).id(idx)
}

// ---------------------------------------------------------------------------
// Problem data

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsdBlock {
    pub label: String,
    pub matrix: Vec<Vec<LinearForm>>,
}

impl PsdBlock {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| self.matrix[r].len() == d && (0..r).all(|c| self.matrix[r][c] == self.matrix[c][r]))
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Vec<Vec<BigRational>> {
        self.matrix.iter().map(|row| row.iter().map(|f| f.evaluate(point)).collect()).collect()
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Vec<Vec<f64>> {
        self.matrix.iter().map(|row| row.iter().map(|f| f.evaluate_f64(point)).collect()).collect()
    }
}

/// Minimize `objective` subject to `block ⪰ 0` for every block and `form ≥ 0`
/// for every linear constraint. The bound on `|C|^exponent` is
/// `q^scale_power` times the optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdpProblem {
    pub q: usize,
    pub n: usize,
    pub r: usize,
    pub variables: VariableTable,
    pub blocks: Vec<PsdBlock>,
    pub linear: Vec<LinearForm>,
    pub objective: LinearForm,
    pub kind: ObjectiveKind,
    pub scale_power: usize,
}

impl SdpProblem {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn exponent(&self) -> u32 {
        self.kind.exponent()
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        let nv = self.num_vars();
        let check = |f: &LinearForm| match f.max_var() {
            Some(id) if id >= nv => Err(SdpError::UnknownVariable(id)),
            _ => Ok(()),
        };
        for b in &self.blocks {
            if !b.is_symmetric() {
                return Err(SdpError::AsymmetricBlock(b.label.clone()));
            }
            for row in &b.matrix {
                row.iter().try_for_each(check)?;
            }
        }
        self.linear.iter().try_for_each(check)?;
        check(&self.objective)
    }
}

// ---------------------------------------------------------------------------
// Block sectors

/// One block of the Terwilliger decomposition: rows `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Sector {
    a: usize,
    k: usize,
    lo: usize,
    hi: usize,
}

impl Sector {
    fn is_top(&self) -> bool {
        self.a == 0 && self.k == 0
    }

    fn label(&self, q: usize) -> String {
        if q == 2 {
            format!("k={}", self.k)
        } else {
            format!("a={},k={}", self.a, self.k)
        }
    }
}

fn sectors(q: usize, n: usize) -> Vec<Sector> {
    let mut out = Vec::new();
    if q == 2 {
        for k in 0..=n / 2 {
            out.push(Sector { a: 0, k, lo: k, hi: n - k });
        }
    } else {
        for k in 0..=n {
            for a in 0..=k {
                if k <= n + a - k {
                    out.push(Sector { a, k, lo: k, hi: n + a - k });
                }
            }
        }
    }
    out
}

/// Block coefficients `(t, p, coef)` of entry `(i, j)` in `sector`.
fn entry_coefficients(q: usize, n: usize, s: Sector, i: usize, j: usize) -> Vec<(OrbitIndex, BigInt)> {
    let mut out = Vec::new();
    for t in 0..=i.min(j) {
        if i + j > n + t {
            continue;
        }
        if q == 2 {
            let c = beta_binary(n, i, j, s.k, t);
            if !c.is_zero() {
                out.push((OrbitIndex::binary(i, j, t), c));
            }
        } else {
            for p in 0..=t {
                let c = alpha_nonbinary_scaled(q, n, i, j, t, p, s.a, s.k);
                if !c.is_zero() {
                    out.push((OrbitIndex::new(i, j, t, p), c));
                }
            }
        }
    }
    out
}

/// Class coefficients of one block entry.
type EntryCoefficients = Vec<(OrbitIndex, BigInt)>;

/// Cached block coefficients for every sector and entry.
struct BlockCoefficients {
    sectors: Vec<Sector>,
    /// Indexed by sector, row, column; only `row ≤ column` is filled.
    entries: Vec<Vec<Vec<EntryCoefficients>>>,
}

impl BlockCoefficients {
    fn new(q: usize, n: usize) -> Self {
        let sectors = sectors(q, n);
        let entries = sectors
            .iter()
            .map(|&s| {
                (s.lo..=s.hi)
                    .map(|i| (s.lo..=s.hi).map(|j| if j < i { Vec::new() } else { entry_coefficients(q, n, s, i, j) }).collect())
                    .collect()
            })
            .collect();
        BlockCoefficients { sectors, entries }
    }

    /// `(Σ coef · value(idx))` over the sector, for a class-valued form.
    #[allow(clippy::needless_range_loop)]
    fn assemble(&self, sector: usize, value: &dyn Fn(OrbitIndex) -> LinearForm) -> Vec<Vec<LinearForm>> {
        let s = self.sectors[sector];
        let dim = s.hi - s.lo + 1;
        let mut m = vec![vec![LinearForm::zero(); dim]; dim];
        for r in 0..dim {
            for c in r..dim {
                let mut f = LinearForm::zero();
                for (idx, coef) in &self.entries[sector][r][c] {
                    f.add_scaled(&value(*idx), &int_rat(coef.clone()));
                }
                m[c][r] = f.clone();
                m[r][c] = f;
            }
        }
        m
    }
}

fn sphere_size(q: usize, n: usize, i: usize) -> BigUint {
    binomial(n as u64, i as i64) * upow(q as u64 - 1, i as u64)
}

/// `[[corner, yᵀ], [y, inner]]`.
fn bordered(corner: LinearForm, y: Vec<LinearForm>, inner: Vec<Vec<LinearForm>>) -> Vec<Vec<LinearForm>> {
    let dim = inner.len() + 1;
    let mut m = Vec::with_capacity(dim);
    let mut top = Vec::with_capacity(dim);
    top.push(corner);
    top.extend(y.iter().cloned());
    m.push(top);
    for (r, row) in inner.into_iter().enumerate() {
        let mut full = Vec::with_capacity(dim);
        full.push(y[r].clone());
        full.extend(row);
        m.push(full);
    }
    m
}

// ---------------------------------------------------------------------------
// Constraint families

/// Deduplicates constraints up to positive scaling, keeping first occurrences.
fn push_unique(out: &mut Vec<LinearForm>, seen: &mut BTreeSet<LinearForm>, f: LinearForm) {
    if f.is_constant() && !f.constant().is_negative() {
        return;
    }
    if seen.insert(f.normalized()) {
        out.push(f);
    }
}

/// Nonnegativity, domination by the diagonal, and the two-sided bounds coming
/// from `0 ≤ M''_{u,v} ≤ M''_{u,u}`, each as `form ≥ 0`.
pub fn basic_linear_constraints(table: &VariableTable) -> Vec<LinearForm> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let x00 = table.x(OrbitIndex::zero());
    for (idx, _) in table.members() {
        let x = table.x(idx);
        let xd = table.pair(idx.distance());
        push_unique(&mut out, &mut seen, x.clone());
        push_unique(&mut out, &mut seen, &table.diagonal(idx.i) - &x);
        let mut lower = &x - &table.pair(idx.i);
        lower -= &xd;
        lower += &x00;
        push_unique(&mut out, &mut seen, lower);
        push_unique(&mut out, &mut seen, &xd - &x);
    }
    out
}

/// Blocks of `M'` and `M''` for every sector; the top `M''` block is bordered
/// by `1 - x_0` and `y_i = C(n,i)(q-1)^i (x_0 - x_{i,0})`.
pub fn psd_blocks(table: &VariableTable) -> Vec<PsdBlock> {
    let (q, n) = (table.q, table.n);
    let coefs = BlockCoefficients::new(q, n);
    psd_blocks_with(table, &coefs)
}

fn psd_blocks_with(table: &VariableTable, coefs: &BlockCoefficients) -> Vec<PsdBlock> {
    let (q, n) = (table.q, table.n);
    let x00 = table.x(OrbitIndex::zero());
    let mut out = Vec::new();
    for (si, s) in coefs.sectors.iter().enumerate() {
        let m1 = coefs.assemble(si, &|idx| table.x(idx));
        out.push(PsdBlock { label: format!("M1[{}]", s.label(q)), matrix: m1 });
        let m2 = coefs.assemble(si, &|idx| &table.pair(idx.distance()) - &table.x(idx));
        if s.is_top() {
            let corner = &LinearForm::constant_form(BigRational::one()) - &x00;
            let y = (0..=n)
                .map(|i| (&x00 - &table.pair(i)).scaled(&int_rat(sphere_size(q, n, i))))
                .collect();
            out.push(PsdBlock { label: format!("M2[{}]+border", s.label(q)), matrix: bordered(corner, y, m2) });
        } else {
            out.push(PsdBlock { label: format!("M2[{}]", s.label(q)), matrix: m2 });
        }
    }
    out
}

/// `N(idx) = Σ_d λ_d Σ_dst η^{idx}_{dst,d} x_dst - β x_{dist,0}` for every member.
fn lasserre_entries(table: &VariableTable, ineq: &InequalitySet) -> BTreeMap<OrbitIndex, LinearForm> {
    let (q, n) = (table.q, table.n);
    let lambdas = ineq.lambdas();
    let max_weight = ineq.max_support().unwrap_or(0);
    let mut out = BTreeMap::new();
    for (idx, _) in table.members() {
        let mut f = table.pair(idx.distance()).scaled(&-ineq.beta().clone());
        for_each_eta(q, n, idx, max_weight, |dst, d, count| {
            let l = &lambdas[d];
            if !l.is_zero() {
                f.add_term(table.ids[&dst], l * int_rat(count.clone()));
            }
        });
        out.insert(idx, f);
    }
    out
}

/// Lasserre blocks for one inequality family; the top block is bordered by
/// `c = Σ_i C(n,i)(q-1)^i λ_i x_0 - β` and `y_i = C(n,i)(q-1)^i N(i,i,i,i)`.
pub fn lasserre_blocks(table: &VariableTable, ineq: &InequalitySet) -> Result<Vec<PsdBlock>, SdpError> {
    let coefs = BlockCoefficients::new(table.q, table.n);
    lasserre_blocks_with(table, ineq, &coefs)
}

fn lasserre_blocks_with(table: &VariableTable, ineq: &InequalitySet, coefs: &BlockCoefficients) -> Result<Vec<PsdBlock>, SdpError> {
    let (q, n) = (table.q, table.n);
    ineq.check_length(n)?;
    let entries = lasserre_entries(table, ineq);
    let tag = ineq.provenance().name();
    let mut out = Vec::new();
    for (si, s) in coefs.sectors.iter().enumerate() {
        let inner = coefs.assemble(si, &|idx| entries[&idx].clone());
        if s.is_top() {
            let mut weight = BigRational::zero();
            for (i, l) in ineq.lambdas().iter().enumerate() {
                weight += l * int_rat(sphere_size(q, n, i));
            }
            let mut corner = table.x(OrbitIndex::zero()).scaled(&weight);
            corner.add_constant(-ineq.beta().clone());
            let y = (0..=n)
                .map(|i| entries[&OrbitIndex::diagonal(i)].scaled(&int_rat(sphere_size(q, n, i))))
                .collect();
            out.push(PsdBlock { label: format!("N[{tag}][{}]+border", s.label(q)), matrix: bordered(corner, y, inner) });
        } else {
            out.push(PsdBlock { label: format!("N[{tag}][{}]", s.label(q)), matrix: inner });
        }
    }
    Ok(out)
}

/// The four matrix-cut families for every member of `I(q, n)`, as `form ≥ 0`,
/// with duplicates removed.
pub fn matrix_cut_constraints(table: &VariableTable, ineq: &InequalitySet) -> Result<Vec<LinearForm>, SdpError> {
    let (q, n) = (table.q, table.n);
    ineq.check_length(n)?;
    let beta = ineq.beta();
    let one = LinearForm::constant_form(BigRational::one());
    let x00 = table.x(OrbitIndex::zero());
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (src, _) in table.members() {
        let weights = lambda_weights(q, n, ineq, src);
        let xi0 = table.pair(src.i);
        let mut f1 = xi0.scaled(&-beta.clone());
        let mut f2 = (&x00 - &xi0).scaled(&-beta.clone());
        let mut f3 = f2.clone();
        let mut rhs4 = &one - &x00.scaled(&rat(2));
        rhs4 += &xi0;
        let mut f4 = rhs4.scaled(&-beta.clone());
        for (target, w) in &weights {
            let x = table.x(*target);
            let xw = table.pair(target.j);
            let xuw = table.pair(target.distance());
            f1.add_scaled(&x, w);
            f2.add_scaled(&(&xw - &x), w);
            f3.add_scaled(&(&xuw - &x), w);
            let mut g = &x00 - &xw;
            g -= &xuw;
            g += &x;
            f4.add_scaled(&g, w);
        }
        for f in [f1, f2, f3, f4] {
            push_unique(&mut out, &mut seen, f);
        }
    }
    Ok(out)
}

/// Objective without the `q^n` factor.
pub fn objective_form(table: &VariableTable, kind: ObjectiveKind) -> LinearForm {
    let (q, n) = (table.q, table.n);
    let mut f = LinearForm::zero();
    match kind {
        ObjectiveKind::Triple => {
            for (idx, id) in table.members() {
                f.add_term(id, int_rat(orbit_size(q, n, idx)));
            }
        }
        ObjectiveKind::Pair => {
            for i in 0..=n {
                f.add_scaled(&table.diagonal(i), &int_rat(sphere_size(q, n, i)));
            }
        }
        ObjectiveKind::Single => f = table.x(OrbitIndex::zero()),
    }
    f
}

/// Full SDP: basic constraints, `M'`/`M''` blocks, then a Lasserre family and
/// matrix cuts for each inequality family, in the given order.
pub fn build_sdp(q: usize, n: usize, r: usize, ineqs: &[InequalitySet], kind: ObjectiveKind) -> Result<SdpProblem, SdpError> {
    if q < 2 || n == 0 || r > n {
        return Err(SdpError::InvalidParameters { q, n, r });
    }
    for ineq in ineqs {
        ineq.check_length(n)?;
    }
    let table = VariableTable::new(q, n);
    let coefs = BlockCoefficients::new(q, n);
    let mut linear = basic_linear_constraints(&table);
    let mut blocks = psd_blocks_with(&table, &coefs);
    let mut seen: BTreeSet<LinearForm> = linear.iter().map(|f| f.normalized()).collect();
    for ineq in ineqs {
        blocks.extend(lasserre_blocks_with(&table, ineq, &coefs)?);
        for f in matrix_cut_constraints(&table, ineq)? {
            push_unique(&mut linear, &mut seen, f);
        }
    }
    let objective = objective_form(&table, kind);
    Ok(SdpProblem { q, n, r, variables: table, blocks, linear, objective, kind, scale_power: n })
}

/// Exact semidefiniteness test for a symmetric rational matrix, by symmetric
/// elimination on positive diagonal pivots.
pub fn is_psd_exact(matrix: &[Vec<BigRational>]) -> bool {
    let mut a: Vec<Vec<BigRational>> = matrix.to_vec();
    let mut active: Vec<usize> = (0..a.len()).collect();
    while !active.is_empty() {
        if active.iter().any(|&k| a[k][k].is_negative()) {
            return false;
        }
        let Some(pos) = active.iter().position(|&k| a[k][k].is_positive()) else {
            // A PSD matrix with zero diagonal is zero.
            return active.iter().all(|&r| active.iter().all(|&c| a[r][c].is_zero()));
        };
        let k = active.remove(pos);
        let pivot = a[k][k].clone();
        for &r in &active {
            if a[r][k].is_zero() {
                continue;
            }
            let f = &a[r][k] / &pivot;
            for &c in &active {
                if !a[k][c].is_zero() {
                    let delta = &f * &a[k][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::{sphere_covering, van_wee};

    #[test]
    fn canonical_classes() {
        let a = canonicalize(2, 3, OrbitIndex::binary(1, 0, 0)).unwrap();
        assert_eq!(canonicalize(2, 3, OrbitIndex::binary(0, 1, 0)).unwrap(), a);
        assert_eq!(canonicalize(2, 3, OrbitIndex::binary(1, 1, 1)).unwrap(), a);
        let table = VariableTable::new(2, 3);
        let zero = table.id(OrbitIndex::zero()).unwrap();
        assert_eq!(table.multiplicity(zero), 1);
        assert_eq!(
            canonicalize(3, 2, OrbitIndex::new(1, 1, 1, 1)).unwrap(),
            canonicalize(3, 2, OrbitIndex::new(1, 0, 0, 0)).unwrap()
        );
        assert!(canonicalize(2, 3, OrbitIndex::binary(2, 2, 0)).is_err());
    }

    #[test]
    fn representatives_are_minimal() {
        for (q, n) in [(2, 5), (3, 4), (4, 3)] {
            let table = VariableTable::new(q, n);
            for (idx, id) in table.members() {
                assert!(table.representatives()[id] <= idx);
            }
            assert!(table.representatives().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn basic_constraints_example() {
        let table = VariableTable::new(2, 2);
        let cons = basic_linear_constraints(&table);
        assert!(cons.len() <= 4 * index_set(2, 2).len());
        let x110 = table.x(OrbitIndex::binary(1, 1, 0));
        let x20 = table.pair(2);
        let x10 = table.pair(1);
        let x00 = table.x(OrbitIndex::zero());
        let upper = &x20 - &x110;
        let mut lower = &x110 - &x10.scaled(&rat(2));
        lower += &x00;
        assert!(cons.iter().any(|f| f.normalized() == upper.normalized()));
        assert!(cons.iter().any(|f| f.normalized() == lower.normalized()));
    }

    #[test]
    fn block_sizes_binary() {
        let blocks = psd_blocks(&VariableTable::new(2, 4));
        let sizes: Vec<usize> = blocks.iter().map(|b| b.dim()).collect();
        assert_eq!(sizes, vec![5, 6, 3, 3, 1, 1]);
        assert!(blocks.iter().all(|b| b.is_symmetric()));
    }

    #[test]
    fn block_sizes_qary() {
        let blocks = psd_blocks(&VariableTable::new(3, 2));
        // sectors (0,0), (0,1), (1,1), (1,2): sizes 3, 1, 2, 1
        let sizes: Vec<usize> = blocks.iter().map(|b| b.dim()).collect();
        assert_eq!(sizes, vec![3, 4, 1, 1, 2, 2, 1, 1]);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn top_block_is_rank_one_at_constant_point() {
        let n = 4;
        let table = VariableTable::new(2, n);
        let point = vec![rat(3); table.len()];
        let m = psd_blocks(&table)[0].evaluate(&point);
        for i in 0..=n {
            for j in 0..=n {
                let expected = int_rat(binomial(n as u64, i as i64) * binomial(n as u64, j as i64)) * rat(3);
                assert_eq!(m[i][j], expected);
            }
        }
    }

    #[test]
    fn lasserre_corners() {
        let table = VariableTable::new(2, 3);
        let blocks = lasserre_blocks(&table, &sphere_covering(2, 3, 1).unwrap()).unwrap();
        let mut expected = LinearForm::term(table.id(OrbitIndex::zero()).unwrap(), rat(4));
        expected.add_constant(rat(-1));
        assert_eq!(blocks[0].matrix[0][0], expected);

        let table = VariableTable::new(3, 4);
        let blocks = lasserre_blocks(&table, &sphere_covering(3, 4, 1).unwrap()).unwrap();
        let mut expected = LinearForm::term(table.id(OrbitIndex::zero()).unwrap(), rat(9));
        expected.add_constant(rat(-1));
        assert_eq!(blocks[0].matrix[0][0], expected);
    }

    #[test]
    fn block_counts() {
        let ineqs = [sphere_covering(2, 4, 1).unwrap(), van_wee(4, 1).unwrap()];
        let sdp = build_sdp(2, 4, 1, &ineqs, ObjectiveKind::Triple).unwrap();
        assert_eq!(sdp.blocks.len(), 6 + 2 * 3);
        sdp.validate().unwrap();
    }

    #[test]
    fn objective_multiplicities() {
        let table = VariableTable::new(2, 1);
        let f = objective_form(&table, ObjectiveKind::Triple);
        let id = table.id(OrbitIndex::binary(1, 0, 0)).unwrap();
        assert_eq!(f.coeff(id), rat(3));
        assert_eq!(f.coeff(table.id(OrbitIndex::zero()).unwrap()), rat(1));
    }

    #[test]
    fn exact_psd() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<BigRational>> { rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect() };
        assert!(is_psd_exact(&m(&[&[1, 1], &[1, 1]])));
        assert!(!is_psd_exact(&m(&[&[1, 2], &[2, 1]])));
        assert!(!is_psd_exact(&m(&[&[0, 1], &[1, 0]])));
        assert!(is_psd_exact(&m(&[&[0, 0], &[0, 2]])));
        assert!(!is_psd_exact(&m(&[&[-1]])));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_sdp(2, 3, 4, &[], ObjectiveKind::Single).is_err());
        let wrong = sphere_covering(2, 4, 1).unwrap();
        assert!(build_sdp(2, 3, 1, &[wrong], ObjectiveKind::Single).is_err());
    }
}
