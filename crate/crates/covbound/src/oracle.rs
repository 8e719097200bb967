//! Brute-force ground truth on small Hamming spaces.
//!
//! Everything here enumerates words explicitly, so it is limited to desk-scale
//! spaces: at most 4096 words for counting and 1024 for eigenvalue checks.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use covbound_core::combinatorics::{
    alpha_nonbinary_scaled, beta_binary, binomial, for_each_alpha4, for_each_eta, index_set, intersection_number, krawtchouk,
    orbit_size, OrbitIndex,
};
use covbound_core::sdpmodel::build_sdp;
use covbound_core::{BigInt, BigRational, BigUint, InequalitySet, ObjectiveKind, VariableTable};
use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::solverio::{certify_feasibility, FeasibilityReport};

pub const COUNT_CAP: usize = 4096;
pub const EIGEN_CAP: usize = 1024;

pub type Word = Vec<u8>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("[{q}]^{n} exceeds the desk-scale limit of {limit} words")]
    TooLarge { q: usize, n: usize, limit: usize },
    #[error("{0} is not a class of word pairs")]
    NotMember(OrbitIndex),
    #[error("invalid code: {0}")]
    BadCode(String),
    #[error("classes sharing variable {id} get different witness values")]
    InconsistentWitness { id: usize },
}

/// `q^n`, or an error above `limit`.
pub fn space_size(q: usize, n: usize, limit: usize) -> Result<usize, OracleError> {
    let mut size: usize = 1;
    for _ in 0..n {
        size = size.checked_mul(q).filter(|&s| s <= limit).ok_or(OracleError::TooLarge { q, n, limit })?;
    }
    Ok(size)
}

/// All words of `[q]^n` in lexicographic order.
pub fn all_words(q: usize, n: usize) -> Vec<Word> {
    let total = q.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut w = vec![0u8; n];
            for slot in w.iter_mut().rev() {
                *slot = (code % q) as u8;
                code /= q;
            }
            w
        })
        .collect()
}

pub fn weight(w: &[u8]) -> usize {
    w.iter().filter(|&&x| x != 0).count()
}

pub fn distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Coordinatewise `a - b` modulo `q`.
pub fn difference(q: usize, a: &[u8], b: &[u8]) -> Word {
    a.iter().zip(b).map(|(&x, &y)| ((x as usize + q - y as usize) % q) as u8).collect()
}

/// Class of `(u, v)` relative to the zero word.
pub fn class_of(u: &[u8], v: &[u8]) -> OrbitIndex {
    let mut idx = OrbitIndex::zero();
    for (&a, &b) in u.iter().zip(v) {
        idx.i += (a != 0) as usize;
        idx.j += (b != 0) as usize;
        idx.t += (a != 0 && b != 0) as usize;
        idx.p += (a != 0 && a == b) as usize;
    }
    idx
}

/// Positional pair in class `idx`: first the positions where `u = v ≠ 0`,
/// then `u = 1, v = 2`, then `u` alone, then `v` alone.
pub fn representative(q: usize, n: usize, idx: OrbitIndex) -> Result<(Word, Word), OracleError> {
    if !idx.is_member(q, n) {
        return Err(OracleError::NotMember(idx));
    }
    let OrbitIndex { i, j, t, p } = idx;
    let mut u = vec![0u8; n];
    let mut v = vec![0u8; n];
    let mut pos = 0;
    for _ in 0..p {
        u[pos] = 1;
        v[pos] = 1;
        pos += 1;
    }
    for _ in p..t {
        u[pos] = 1;
        v[pos] = 2;
        pos += 1;
    }
    for _ in t..i {
        u[pos] = 1;
        pos += 1;
    }
    for _ in t..j {
        v[pos] = 1;
        pos += 1;
    }
    Ok((u, v))
}

// ---------------------------------------------------------------------------
// Codes

/// An explicit code in `[q]^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeWitness {
    pub q: usize,
    pub n: usize,
    pub words: BTreeSet<Word>,
}

impl CodeWitness {
    pub fn new(q: usize, n: usize, words: impl IntoIterator<Item = Word>) -> Result<Self, OracleError> {
        if q < 2 || n == 0 {
            return Err(OracleError::BadCode(format!("need q >= 2 and n >= 1, got q={q} n={n}")));
        }
        let words: BTreeSet<Word> = words.into_iter().collect();
        if words.is_empty() {
            return Err(OracleError::BadCode("no words".into()));
        }
        for w in &words {
            if w.len() != n || w.iter().any(|&x| x as usize >= q) {
                return Err(OracleError::BadCode(format!("word {} is not in [{q}]^{n}", render_word(w))));
            }
        }
        Ok(CodeWitness { q, n, words })
    }

    pub fn whole_space(q: usize, n: usize) -> Result<Self, OracleError> {
        space_size(q, n, COUNT_CAP)?;
        CodeWitness::new(q, n, all_words(q, n))
    }

    /// Words written as digit strings, e.g. `["000", "111"]`.
    pub fn from_strings(q: usize, n: usize, words: &[&str]) -> Result<Self, OracleError> {
        let parsed = words.iter().map(|s| parse_word(s)).collect::<Result<Vec<_>, _>>()?;
        CodeWitness::new(q, n, parsed)
    }

    /// Reads the witness format: `q n` on the first line, then one digit
    /// string per word. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, OracleError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| OracleError::BadCode("empty file".into()))?;
        let nums: Vec<usize> = header.split_whitespace().map(|t| t.parse::<usize>()).collect::<Result<_, _>>().map_err(|_| OracleError::BadCode(format!("bad header {header:?}")))?;
        let [q, n] = nums[..] else {
            return Err(OracleError::BadCode(format!("header must be `q n`, got {header:?}")));
        };
        let words = lines.map(parse_word).collect::<Result<Vec<_>, _>>()?;
        CodeWitness::new(q, n, words)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl fmt::Display for CodeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.q, self.n)?;
        for w in &self.words {
            writeln!(f, "{}", render_word(w))?;
        }
        Ok(())
    }
}

fn parse_word(s: &str) -> Result<Word, OracleError> {
    s.chars()
        .map(|c| c.to_digit(36).map(|d| d as u8).ok_or_else(|| OracleError::BadCode(format!("bad symbol {c:?} in {s:?}"))))
        .collect()
}

fn render_word(w: &[u8]) -> String {
    w.iter().map(|&d| char::from_digit(d as u32, 36).unwrap_or('?')).collect()
}

/// `max_u min_{c ∈ C} d(u, c)`.
pub fn covering_radius(code: &CodeWitness) -> Result<usize, OracleError> {
    space_size(code.q, code.n, COUNT_CAP)?;
    Ok(all_words(code.q, code.n)
        .iter()
        .map(|u| code.words.iter().map(|c| distance(u, c)).min().unwrap_or(usize::MAX))
        .max()
        .unwrap_or(0))
}

/// `min_u Σ_i λ_i |C ∩ S_i(u)| - β`.
pub fn verify_inequality_on_code(code: &CodeWitness, ineq: &InequalitySet) -> Result<BigRational, OracleError> {
    space_size(code.q, code.n, COUNT_CAP)?;
    if ineq.lambdas().len() != code.n + 1 {
        return Err(OracleError::BadCode(format!("inequality has {} weights for length {}", ineq.lambdas().len(), code.n)));
    }
    let mut worst: Option<BigRational> = None;
    for u in all_words(code.q, code.n) {
        let mut counts = vec![0u64; code.n + 1];
        for c in &code.words {
            counts[distance(&u, c)] += 1;
        }
        let mut total = -ineq.beta().clone();
        for (l, &a) in ineq.lambdas().iter().zip(&counts) {
            total += l * BigRational::from_integer(BigInt::from(a));
        }
        if worst.as_ref().is_none_or(|w| total < *w) {
            worst = Some(total);
        }
    }
    Ok(worst.unwrap_or_else(BigRational::zero))
}

/// Number of triples `(u, v, w) ∈ C³` with `class(v - u, w - u) = idx`.
pub fn triple_counts(code: &CodeWitness) -> BTreeMap<OrbitIndex, u64> {
    let mut out = BTreeMap::new();
    let q = code.q;
    for u in &code.words {
        let diffs: Vec<Word> = code.words.iter().map(|v| difference(q, v, u)).collect();
        for a in &diffs {
            for b in &diffs {
                *out.entry(class_of(a, b)).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Orbit values `x_idx = λ_idx / (q^n γ_idx)` induced by `code`, indexed by
/// variable id.
pub fn witness_x(code: &CodeWitness) -> Result<Vec<BigRational>, OracleError> {
    space_size(code.q, code.n, COUNT_CAP)?;
    let (q, n) = (code.q, code.n);
    let counts = triple_counts(code);
    let table = VariableTable::new(q, n);
    let total = BigInt::from(q).pow(n as u32);
    let mut values: Vec<Option<BigRational>> = vec![None; table.len()];
    for (idx, id) in table.members() {
        let lambda = counts.get(&idx).copied().unwrap_or(0);
        let gamma = BigInt::from(orbit_size(q, n, idx));
        let x = BigRational::new(BigInt::from(lambda), &total * gamma);
        match &values[id] {
            Some(prev) if *prev != x => return Err(OracleError::InconsistentWitness { id }),
            _ => values[id] = Some(x),
        }
    }
    Ok(values.into_iter().map(|v| v.unwrap_or_else(BigRational::zero)).collect())
}

/// Outcome of substituting a code's witness point into a model.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub radius: usize,
    pub feasibility: FeasibilityReport,
    /// Objective value times `q^scale_power`.
    pub scaled_objective: BigRational,
    /// `|C|^e` for the objective exponent `e`.
    pub expected_objective: BigRational,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.feasibility.is_feasible() && self.scaled_objective == self.expected_objective
    }
}

/// Builds the model for `code` at radius `r` (its covering radius when
/// `None`) and checks that the witness point satisfies it.
pub fn check_witness(code: &CodeWitness, r: Option<usize>, ineqs: &[InequalitySet], kind: ObjectiveKind, eigen_tolerance: f64) -> Result<WitnessReport, String> {
    space_size(code.q, code.n, EIGEN_CAP).map_err(|e| e.to_string())?;
    let radius = covering_radius(code).map_err(|e| e.to_string())?;
    let r = r.unwrap_or(radius);
    if radius > r {
        return Err(format!("code has covering radius {radius} > {r}"));
    }
    let problem = build_sdp(code.q, code.n, r, ineqs, kind).map_err(|e| e.to_string())?;
    let x = witness_x(code).map_err(|e| e.to_string())?;
    let feasibility = certify_feasibility(&problem, &x, eigen_tolerance).map_err(|e| e.to_string())?;
    let scale = BigRational::from_integer(BigInt::from(code.q).pow(problem.scale_power as u32));
    let scaled_objective = problem.objective.evaluate(&x) * scale;
    let expected_objective = BigRational::from_integer(BigInt::from(code.len()).pow(problem.exponent()));
    Ok(WitnessReport { radius, feasibility, scaled_objective, expected_objective })
}

// ---------------------------------------------------------------------------
// Coefficient counting

/// `(dst, d) ↦` number of words `w` of weight `d` with `class(u - w, v - w) = dst`.
pub fn eta_table_bruteforce(q: usize, n: usize, src: OrbitIndex) -> Result<BTreeMap<(OrbitIndex, usize), u64>, OracleError> {
    space_size(q, n, COUNT_CAP)?;
    let (u, v) = representative(q, n, src)?;
    let mut out = BTreeMap::new();
    for w in all_words(q, n) {
        let dst = class_of(&difference(q, &u, &w), &difference(q, &v, &w));
        *out.entry((dst, weight(&w))).or_insert(0) += 1;
    }
    Ok(out)
}

pub fn count_eta_bruteforce(q: usize, n: usize, src: OrbitIndex, dst: OrbitIndex, d: usize) -> Result<u64, OracleError> {
    Ok(eta_table_bruteforce(q, n, src)?.get(&(dst, d)).copied().unwrap_or(0))
}

/// `(target, d) ↦` number of words `w` with `class(u, w) = target` and `d(v, w) = d`.
pub fn alpha4_table_bruteforce(q: usize, n: usize, src: OrbitIndex) -> Result<BTreeMap<(OrbitIndex, usize), u64>, OracleError> {
    space_size(q, n, COUNT_CAP)?;
    let (u, v) = representative(q, n, src)?;
    let mut out = BTreeMap::new();
    for w in all_words(q, n) {
        *out.entry((class_of(&u, &w), distance(&v, &w))).or_insert(0) += 1;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn count_alpha4_bruteforce(q: usize, n: usize, src: OrbitIndex, j2: usize, t2: usize, p2: usize, d: usize) -> Result<u64, OracleError> {
    let p2 = if q == 2 { t2 } else { p2 };
    let target = OrbitIndex::new(src.i, j2, t2, p2);
    Ok(alpha4_table_bruteforce(q, n, src)?.get(&(target, d)).copied().unwrap_or(0))
}

/// Number of pairs in each class.
pub fn orbit_sizes_bruteforce(q: usize, n: usize) -> Result<BTreeMap<OrbitIndex, u64>, OracleError> {
    space_size(q, n, COUNT_CAP)?;
    let words = all_words(q, n);
    let mut out = BTreeMap::new();
    for u in &words {
        for v in &words {
            *out.entry(class_of(u, v)).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// Words `v` with `wt(v) = i` and `d(u, v) = j` for `u` of weight `k`.
pub fn intersection_bruteforce(q: usize, n: usize, k: usize, i: usize, j: usize) -> Result<u64, OracleError> {
    space_size(q, n, COUNT_CAP)?;
    let u: Word = (0..n).map(|x| (x < k) as u8).collect();
    Ok(all_words(q, n).iter().filter(|v| weight(v) == i && distance(&u, v) == j).count() as u64)
}

/// `Σ_{wt(y) = k} ω^{⟨x, y⟩}` for a word `x` of weight `i`, `ω = e^{2πi/q}`.
pub fn krawtchouk_bruteforce(q: usize, n: usize, k: usize, i: usize) -> Result<i64, OracleError> {
    space_size(q, n, COUNT_CAP)?;
    let x: Word = (0..n).map(|p| (p < i) as u8).collect();
    let mut by_residue = vec![0i64; q];
    for y in all_words(q, n).iter().filter(|y| weight(y) == k) {
        let dot: usize = x.iter().zip(y).map(|(&a, &b)| a as usize * b as usize).sum();
        by_residue[dot % q] += 1;
    }
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for (s, &c) in by_residue.iter().enumerate() {
        let angle = 2.0 * std::f64::consts::PI * s as f64 / q as f64;
        re += c as f64 * angle.cos();
        im += c as f64 * angle.sin();
    }
    let rounded = re.round();
    assert!((re - rounded).abs() < 1e-6 && im.abs() < 1e-6, "character sum is not an integer");
    Ok(rounded as i64)
}

/// A disagreement between a closed form and enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub what: String,
    pub closed_form: String,
    pub enumerated: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: closed form {} but enumeration gives {}", self.what, self.closed_form, self.enumerated)
    }
}

fn mismatch(what: String, closed: impl fmt::Display, counted: impl fmt::Display) -> Mismatch {
    Mismatch { what, closed_form: closed.to_string(), enumerated: counted.to_string() }
}

fn check<T: PartialEq + fmt::Display>(checked: &mut usize, what: impl FnOnce() -> String, closed: T, counted: T) -> Result<(), Mismatch> {
    *checked += 1;
    if closed == counted {
        Ok(())
    } else {
        Err(mismatch(what(), closed, counted))
    }
}

/// Compares every coefficient family on `[q]^n` with enumeration and returns
/// the number of values compared. Point evaluations (`eta_binary`, …) are
/// checked on every tuple when `pointwise` is set; the aggregated visitors
/// used by the model are always checked.
pub fn check_coefficients(q: usize, n: usize, pointwise: bool) -> Result<usize, Mismatch> {
    let mut checked = 0;
    let (qq, nn) = (q as u64, n as u64);
    let members = index_set(q, n);
    let member_set: BTreeSet<OrbitIndex> = members.iter().copied().collect();
    let sizes = orbit_sizes_bruteforce(q, n).map_err(|e| mismatch(format!("q={q} n={n}"), "-", e))?;
    let seen: BTreeSet<OrbitIndex> = sizes.keys().copied().collect();
    check(&mut checked, || format!("index set q={q} n={n}"), format!("{} classes", member_set.len()), format!("{} classes", seen.len()))?;
    if seen != member_set {
        return Err(mismatch(format!("index set q={q} n={n}"), format!("{member_set:?}"), format!("{seen:?}")));
    }
    for idx in &members {
        check(&mut checked, || format!("orbit size {idx} q={q} n={n}"), orbit_size(q, n, *idx), BigUint::from(sizes[idx]))?;
    }
    for k in 0..=n {
        for i in 0..=n {
            let kr = krawtchouk_bruteforce(q, n, k, i).unwrap_or(i64::MIN);
            check(&mut checked, || format!("krawtchouk q={q} n={n} k={k} i={i}"), krawtchouk(qq, nn, k as u64, i as u64), BigInt::from(kr))?;
            for j in 0..=n {
                let count = intersection_bruteforce(q, n, k, i, j).unwrap_or(u64::MAX);
                check(&mut checked, || format!("intersection q={q} n={n} k={k} i={i} j={j}"), intersection_number(qq, nn, k as u64, i as u64, j as u64), BigUint::from(count))?;
            }
        }
    }
    for &src in &members {
        let eta = eta_table_bruteforce(q, n, src).map_err(|e| mismatch(format!("eta {src}"), "-", e))?;
        let mut visited: BTreeMap<(OrbitIndex, usize), BigUint> = BTreeMap::new();
        for_each_eta(q, n, src, n, |dst, d, count| *visited.entry((dst, d)).or_default() += count);
        visited.retain(|_, v| !v.is_zero());
        compare_tables(&mut checked, &format!("eta q={q} n={n} src={src}"), &visited, &eta)?;

        let alpha = alpha4_table_bruteforce(q, n, src).map_err(|e| mismatch(format!("alpha4 {src}"), "-", e))?;
        let mut visited: BTreeMap<(OrbitIndex, usize), BigUint> = BTreeMap::new();
        for_each_alpha4(q, n, src, |dst, d, count| *visited.entry((dst, d)).or_default() += count);
        visited.retain(|_, v| !v.is_zero());
        compare_tables(&mut checked, &format!("alpha4 q={q} n={n} src={src}"), &visited, &alpha)?;

        if pointwise {
            for &dst in &members {
                for d in 0..=n {
                    let closed = if q == 2 {
                        covbound_core::combinatorics::eta_binary(n, src, dst, d)
                    } else {
                        covbound_core::combinatorics::eta_qary(q, n, src, dst, d)
                    };
                    let counted = BigUint::from(eta.get(&(dst, d)).copied().unwrap_or(0));
                    check(&mut checked, || format!("eta q={q} n={n} src={src} dst={dst} d={d}"), closed, counted)?;
                }
            }
            for j2 in 0..=n {
                for t2 in 0..=j2.min(src.i) {
                    let p_range = if q == 2 { t2..=t2 } else { 0..=t2 };
                    for p2 in p_range {
                        for d in 0..=n {
                            let closed = if q == 2 {
                                covbound_core::combinatorics::alpha4_binary(n, src, j2, t2, d)
                            } else {
                                covbound_core::combinatorics::alpha4_qary(q, n, src, j2, t2, p2, d)
                            };
                            let target = OrbitIndex::new(src.i, j2, t2, p2);
                            let counted = BigUint::from(alpha.get(&(target, d)).copied().unwrap_or(0));
                            check(&mut checked, || format!("alpha4 q={q} n={n} src={src} target={target} d={d}"), closed, counted)?;
                        }
                    }
                }
            }
        }
    }
    Ok(checked)
}

fn compare_tables(
    checked: &mut usize,
    what: &str,
    closed: &BTreeMap<(OrbitIndex, usize), BigUint>,
    counted: &BTreeMap<(OrbitIndex, usize), u64>,
) -> Result<(), Mismatch> {
    let keys: BTreeSet<&(OrbitIndex, usize)> = closed.keys().chain(counted.keys()).collect();
    for key in keys {
        let a = closed.get(key).cloned().unwrap_or_default();
        let b = BigUint::from(counted.get(key).copied().unwrap_or(0));
        check(checked, || format!("{what} dst={} d={}", key.0, key.1), a, b)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Block diagonalization

/// A dense matrix indexed by the words of `[q]^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseWordMatrix {
    pub q: usize,
    pub n: usize,
    pub entries: DMatrix<f64>,
}

impl DenseWordMatrix {
    /// `Σ_idx coef(idx) M_idx`, where `M_idx` is the 0/1 matrix of class `idx`.
    pub fn from_classes(q: usize, n: usize, coef: &BTreeMap<OrbitIndex, f64>) -> Result<Self, OracleError> {
        let size = space_size(q, n, EIGEN_CAP)?;
        let words = all_words(q, n);
        let entries = DMatrix::from_fn(size, size, |r, c| coef.get(&class_of(&words[r], &words[c])).copied().unwrap_or(0.0));
        Ok(DenseWordMatrix { q, n, entries })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.entries.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Sector `(a, k)` with rows `lo..=hi`; binary sectors have `a = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Sector {
    a: usize,
    k: usize,
    lo: usize,
    hi: usize,
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
                if 2 * k <= n + a {
                    out.push(Sector { a, k, lo: k, hi: n + a - k });
                }
            }
        }
    }
    out
}

fn to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn binom_f64(n: usize, k: usize) -> f64 {
    binomial(n as u64, k as i64).to_f64().unwrap_or(f64::NAN)
}

/// Block images of `Σ coef(idx) M_idx`. With `normalized`, the entries are
/// those of the *-isomorphism (square-root normalizations included);
/// otherwise they are the integer-scaled entries the model uses.
pub fn block_images(q: usize, n: usize, coef: &BTreeMap<OrbitIndex, f64>, normalized: bool) -> Vec<DMatrix<f64>> {
    sectors(q, n)
        .into_iter()
        .map(|s| {
            let dim = s.hi - s.lo + 1;
            DMatrix::from_fn(dim, dim, |r, c| {
                let (i, j) = (s.lo + r, s.lo + c);
                let mut total = 0.0;
                for t in 0..=i.min(j) {
                    if i + j > n + t {
                        continue;
                    }
                    let p_range = if q == 2 { t..=t } else { 0..=t };
                    for p in p_range {
                        let Some(&x) = coef.get(&OrbitIndex::new(i, j, t, p)) else { continue };
                        let c = if q == 2 { beta_binary(n, i, j, s.k, t) } else { alpha_nonbinary_scaled(q, n, i, j, t, p, s.a, s.k) };
                        total += x * to_f64(&c);
                    }
                }
                if normalized {
                    let m = n + s.a - 2 * s.k;
                    let scale = ((q - 1) as f64).powf((i + j) as f64 / 2.0) * (binom_f64(m, i - s.k) * binom_f64(m, j - s.k)).sqrt();
                    total /= scale;
                }
                total
            })
        })
        .collect()
}

/// Coefficients of `A·B` in the class basis, from one representative pair per class.
pub fn class_product(q: usize, n: usize, x: &BTreeMap<OrbitIndex, f64>, y: &BTreeMap<OrbitIndex, f64>) -> Result<BTreeMap<OrbitIndex, f64>, OracleError> {
    space_size(q, n, EIGEN_CAP)?;
    let words = all_words(q, n);
    let mut out = BTreeMap::new();
    for idx in index_set(q, n) {
        let (u, v) = representative(q, n, idx)?;
        let z: f64 = words
            .iter()
            .map(|w| x.get(&class_of(&u, w)).copied().unwrap_or(0.0) * y.get(&class_of(w, &v)).copied().unwrap_or(0.0))
            .sum();
        out.insert(idx, z);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockMapReport {
    pub trials: usize,
    /// Largest `|φ(A)φ(B) - φ(AB)|` entry relative to the entry scale.
    pub homomorphism_error: f64,
    /// Largest `|λ_min(A) - min_blocks λ_min(φ(A))|` relative to `‖A‖`.
    pub spectrum_error: f64,
    /// Shifted matrices whose semidefiniteness differs between the full
    /// matrix and the integer-scaled blocks.
    pub sign_disagreements: usize,
    pub border_error: f64,
    pub identity_error: f64,
    pub tolerance: f64,
}

impl BlockMapReport {
    pub fn passed(&self) -> bool {
        self.homomorphism_error <= self.tolerance
            && self.spectrum_error <= self.tolerance
            && self.sign_disagreements == 0
            && self.border_error <= self.tolerance
            && self.identity_error <= self.tolerance
    }
}

fn random_element(q: usize, n: usize, rng: &mut ChaCha8Rng, symmetric: bool) -> BTreeMap<OrbitIndex, f64> {
    let mut out = BTreeMap::new();
    for idx in index_set(q, n) {
        let key = if symmetric && idx.j < idx.i { idx.transposed() } else { idx };
        let value = match out.get(&key) {
            Some(&v) if symmetric => v,
            _ => rng.gen_range(-1.0..1.0),
        };
        out.insert(idx, value);
        out.insert(key, value);
    }
    out
}

fn max_abs(ms: &[DMatrix<f64>]) -> f64 {
    ms.iter().flat_map(|m| m.iter()).fold(0.0f64, |a, &b| a.max(b.abs()))
}

fn min_eig(ms: &[DMatrix<f64>]) -> f64 {
    ms.iter()
        .filter(|m| m.nrows() > 0)
        .map(|m| SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min)
}

/// Checks that the block map is a multiplicative, spectrum-preserving
/// bijection on `[q]^n`, that all-ones blocks map to the stated border
/// entries, and that the identity maps to identities.
pub fn verify_block_map(q: usize, n: usize, trials: usize, tolerance: f64, seed: u64) -> Result<BlockMapReport, OracleError> {
    space_size(q, n, EIGEN_CAP)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BlockMapReport {
        trials,
        homomorphism_error: 0.0,
        spectrum_error: 0.0,
        sign_disagreements: 0,
        border_error: 0.0,
        identity_error: 0.0,
        tolerance,
    };
    for _ in 0..trials {
        // (a) φ(A)φ(B) = φ(AB)
        let x = random_element(q, n, &mut rng, false);
        let y = random_element(q, n, &mut rng, false);
        let z = class_product(q, n, &x, &y)?;
        let (pa, pb, pz) = (block_images(q, n, &x, true), block_images(q, n, &y, true), block_images(q, n, &z, true));
        let scale = max_abs(&pz).max(1.0);
        for ((a, b), c) in pa.iter().zip(&pb).zip(&pz) {
            let err = (a * b - c).iter().fold(0.0f64, |m, &e| m.max(e.abs())) / scale;
            report.homomorphism_error = report.homomorphism_error.max(err);
        }

        // (b) A = BBᵀ: same smallest eigenvalue, same semidefiniteness after shifts.
        let b = random_element(q, n, &mut rng, false);
        let bt: BTreeMap<OrbitIndex, f64> = b.iter().map(|(idx, v)| (idx.transposed(), *v)).collect();
        let gram = class_product(q, n, &b, &bt)?;
        let full = DenseWordMatrix::from_classes(q, n, &gram)?;
        let full_min = full.min_eigenvalue();
        let norm = full.entries.iter().fold(0.0f64, |m, &e| m.max(e.abs())).max(1.0);
        let block_min = min_eig(&block_images(q, n, &gram, true));
        report.spectrum_error = report.spectrum_error.max((full_min - block_min).abs() / norm);
        for shift in [full_min - 1e-3 * norm, full_min + 1e-3 * norm] {
            let mut shifted = gram.clone();
            for i in 0..=n {
                *shifted.entry(OrbitIndex::diagonal(i)).or_insert(0.0) -= shift;
            }
            let full_psd = full_min - shift >= 0.0;
            let blocks = block_images(q, n, &shifted, false);
            let blocks_psd = blocks.iter().all(|m| {
                let s = m.iter().fold(0.0f64, |a, &e| a.max(e.abs())).max(1.0);
                min_eig(std::slice::from_ref(m)) >= -1e-9 * s
            });
            if full_psd != blocks_psd {
                report.sign_disagreements += 1;
            }
        }
    }

    // (c) border: φ(1_{S_i} 1_{S_j}ᵀ) lives in entry (i, j) of the top block.
    for i in 0..=n {
        for j in 0..=n {
            let coef: BTreeMap<OrbitIndex, f64> = index_set(q, n).into_iter().filter(|idx| idx.i == i && idx.j == j).map(|idx| (idx, 1.0)).collect();
            let images = block_images(q, n, &coef, true);
            let expected = ((q - 1) as f64).powf((i + j) as f64 / 2.0) * (binom_f64(n, i) * binom_f64(n, j)).sqrt();
            for (b, m) in images.iter().enumerate() {
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        let target = if b == 0 && r == i && c == j { expected } else { 0.0 };
                        let err = (m[(r, c)] - target).abs() / expected.max(1.0);
                        report.border_error = report.border_error.max(err);
                    }
                }
            }
        }
    }

    // φ(I) = I
    let identity: BTreeMap<OrbitIndex, f64> = (0..=n).map(|i| (OrbitIndex::diagonal(i), 1.0)).collect();
    for m in block_images(q, n, &identity, true) {
        let err = (&m - DMatrix::identity(m.nrows(), m.ncols())).iter().fold(0.0f64, |a, &e| a.max(e.abs()));
        report.identity_error = report.identity_error.max(err);
    }
    Ok(report)
}
