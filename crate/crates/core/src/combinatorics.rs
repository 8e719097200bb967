//! Exact combinatorial coefficients of the Hamming scheme and its Terwilliger
//! algebra.
//!
//! Every value is an arbitrary-precision integer (or a rational when weighted by
//! an inequality family). Binomials follow the convention `C(s, t) = 0` whenever
//! `s < t`, `t < 0` or `s < 0`, so the defining sums can run over generous
//! ranges without special cases.
//!
//! Pair classes relative to the zero word are described by [`OrbitIndex`]. The
//! binary scheme is the special case `p == t` of the q-ary one, which lets the
//! model code treat both uniformly: the Hamming distance between the two words
//! of a class is always `i + j - t - p`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::inequalities::InequalitySet;

/// Orbit of a word pair `(u, v)` under the stabilizer of the zero word.
///
/// `i = wt(u)`, `j = wt(v)`, `t = |supp u ∩ supp v|` and `p` counts the
/// positions where `u` and `v` agree and are nonzero. For `q = 2` the last
/// field always equals `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitIndex {
    pub i: usize,
    pub j: usize,
    pub t: usize,
    pub p: usize,
}

impl OrbitIndex {
    pub const fn new(i: usize, j: usize, t: usize, p: usize) -> Self {
        OrbitIndex { i, j, t, p }
    }

    /// Binary class `(i, j, t)`.
    pub const fn binary(i: usize, j: usize, t: usize) -> Self {
        OrbitIndex { i, j, t, p: t }
    }

    /// The class of `(0, 0)`.
    pub const fn zero() -> Self {
        OrbitIndex::new(0, 0, 0, 0)
    }

    /// `(a, 0, 0, 0)`: the class whose variable carries the pair distribution at distance `a`.
    pub const fn pair(a: usize) -> Self {
        OrbitIndex::new(a, 0, 0, 0)
    }

    /// `(i, i, i, i)`: the class of `(u, u)` with `wt(u) = i`.
    pub const fn diagonal(i: usize) -> Self {
        OrbitIndex::new(i, i, i, i)
    }

    /// Membership in `I(q, n)`.
    pub fn is_member(&self, q: usize, n: usize) -> bool {
        let OrbitIndex { i, j, t, p } = *self;
        if q < 2 || p > t || t > i || t > j || i + j > n + t {
            return false;
        }
        q != 2 || p == t
    }

    /// Hamming distance between the two words of the class.
    pub fn distance(&self) -> usize {
        self.i + self.j - self.t - self.p
    }

    /// The class of `(v, u)`.
    pub fn transposed(&self) -> Self {
        OrbitIndex::new(self.j, self.i, self.t, self.p)
    }
}

impl fmt::Display for OrbitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.i, self.j, self.t, self.p)
    }
}

/// All members of `I(q, n)` in lexicographic order of `(i, j, t, p)`.
///
/// The order is the variable-numbering contract for problem emission.
pub fn index_set(q: usize, n: usize) -> Vec<OrbitIndex> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            for t in 0..=i.min(j) {
                if i + j > n + t {
                    continue;
                }
                if q == 2 {
                    out.push(OrbitIndex::binary(i, j, t));
                } else {
                    for p in 0..=t {
                        out.push(OrbitIndex::new(i, j, t, p));
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Binomials and powers

fn small_binomial(s: u64, t: u64) -> Option<u128> {
    if s > 120 {
        return None;
    }
    let t = t.min(s - t);
    let mut acc: u128 = 1;
    for k in 0..t {
        acc = acc * u128::from(s - k) / u128::from(k + 1);
    }
    Some(acc)
}

/// `C(s, t)` with the zero convention for out-of-range arguments.
pub(crate) fn binom(s: i64, t: i64) -> BigUint {
    if s < 0 || t < 0 || t > s {
        return BigUint::zero();
    }
    let (s, t) = (s as u64, t as u64);
    if let Some(v) = small_binomial(s, t) {
        return BigUint::from(v);
    }
    let t = t.min(s - t);
    let mut acc = BigUint::one();
    for k in 0..t {
        acc *= s - k;
        acc /= k + 1;
    }
    acc
}

/// `base^exp` with `0^0 = 1`.
pub(crate) fn upow(base: u64, exp: u64) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}

fn sign(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Binomial coefficient `C(n, k)`; zero for `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    binom(n as i64, k)
}

/// `n! / (parts! · (n - Σ parts)!)`, zero when a part is negative or the parts exceed `n`.
pub fn multinomial(n: u64, parts: &[i64]) -> BigUint {
    let mut rest = n as i64;
    let mut acc = BigUint::one();
    for &part in parts {
        if part < 0 || part > rest {
            return BigUint::zero();
        }
        acc *= binom(rest, part);
        rest -= part;
    }
    acc
}

/// Number of nonzero entries of the basis matrix of class `idx`, i.e. the
/// number of pairs `(u, v)` in that orbit.
pub fn orbit_size(q: usize, n: usize, idx: OrbitIndex) -> BigUint {
    if !idx.is_member(q, n) {
        return BigUint::zero();
    }
    let OrbitIndex { i, j, t, p } = idx;
    let q = q as u64;
    let parts = [p as i64, (t - p) as i64, (i - t) as i64, (j - t) as i64];
    upow(q - 1, (i + j - t) as u64) * upow(q - 2, (t - p) as u64) * multinomial(n as u64, &parts)
}

// ---------------------------------------------------------------------------
// Bose-Mesner coefficients

/// Krawtchouk polynomial `P_k(i) = Σ_s (-1)^s C(i,s) C(n-i,k-s) (q-1)^(k-s)`.
pub fn krawtchouk(q: u64, n: u64, k: u64, i: u64) -> BigInt {
    let (n, k, i) = (n as i64, k as i64, i as i64);
    let mut acc = BigInt::zero();
    for s in 0..=k {
        let mag = binom(i, s) * binom(n - i, k - s) * upow(q - 1, (k - s) as u64);
        acc += sign(s) * BigInt::from(mag);
    }
    acc
}

/// Intersection number `α_{i,j}^k`: the number of words `v` with `wt(v) = i`
/// and `d(u, v) = j` for a fixed `u` of weight `k`.
pub fn intersection_number(q: u64, n: u64, k: u64, i: u64, j: u64) -> BigUint {
    let (n, k, i, j) = (n as i64, k as i64, i as i64, j as i64);
    let mut acc = BigUint::zero();
    if q == 2 {
        let twice_t = k + i - j;
        if twice_t < 0 || twice_t % 2 != 0 {
            return acc;
        }
        let t = twice_t / 2;
        return binom(k, t) * binom(n - k, i - t);
    }
    for t in 0..=i.min(k) {
        let p = k + i - j - t;
        if p < 0 || p > t {
            continue;
        }
        let choose = multinomial(k as u64, &[t - p, p]);
        acc += choose * binom(n - k, i - t) * upow(q - 1, (i - t) as u64) * upow(q - 2, (t - p) as u64);
    }
    acc
}

// ---------------------------------------------------------------------------
// Terwilliger block coefficients

/// `β_{i,j,k}^t` for word length `n`, allowing arbitrary integer arguments.
pub(crate) fn beta_general(n: i64, i: i64, j: i64, k: i64, t: i64) -> BigInt {
    if n < 0 {
        return BigInt::zero();
    }
    let mut acc = BigInt::zero();
    for u in 0..=n {
        let mag = binom(u, t) * binom(n - 2 * k, u - k) * binom(n - k - u, i - u) * binom(n - k - u, j - u);
        if !mag.is_zero() {
            acc += sign(t - u) * BigInt::from(mag);
        }
    }
    acc
}

/// Binary block coefficient `β_{i,j,k}^t = Σ_u (-1)^(t-u) C(u,t) C(n-2k,u-k) C(n-k-u,i-u) C(n-k-u,j-u)`.
pub fn beta_binary(n: usize, i: usize, j: usize, k: usize, t: usize) -> BigInt {
    beta_general(n as i64, i as i64, j as i64, k as i64, t as i64)
}

/// Nonbinary block coefficient, rescaled by `(q-1)^((i+j)/2)` so that it is an
/// integer:
///
/// `β^{n-a,t-a}_{i-a,j-a,k-a} · (q-1)^(i+j-t) · Σ_g (-1)^(a-g) C(a,g) C(t-a,p-g) (q-2)^(t-a-p+g)`.
///
/// Block entries built from these values differ from the normalized ones by a
/// positive diagonal congruence, which leaves semidefiniteness unchanged.
#[allow(clippy::too_many_arguments)]
pub fn alpha_nonbinary_scaled(q: usize, n: usize, i: usize, j: usize, t: usize, p: usize, a: usize, k: usize) -> BigInt {
    if a > k || t > i + j {
        return BigInt::zero();
    }
    let (n, i, j, t, p, a, k) = (n as i64, i as i64, j as i64, t as i64, p as i64, a as i64, k as i64);
    let beta = beta_general(n - a, i - a, j - a, k - a, t - a);
    if beta.is_zero() {
        return beta;
    }
    let q = q as u64;
    let mut inner = BigInt::zero();
    for g in 0..=p {
        let exp = t - a - p + g;
        if exp < 0 {
            continue;
        }
        let mag = binom(a, g) * binom(t - a, p - g) * upow(q - 2, exp as u64);
        if !mag.is_zero() {
            inner += sign(a - g) * BigInt::from(mag);
        }
    }
    beta * BigInt::from(upow(q - 1, (i + j - t) as u64)) * inner
}

// ---------------------------------------------------------------------------
// Four-word extension counts
//
// Each count partitions the support of the extra word w by the symbols of
// (u, v) at each position. A group lists the ways w can meet one part of that
// partition: how many positions it occupies, how the tracked statistics move,
// and how many words realize that choice.

struct GroupOption {
    weight: usize,
    delta: [i64; 4],
    count: BigUint,
}

fn enumerate_groups<F>(groups: &[Vec<GroupOption>], max_weight: usize, mut visit: F)
where
    F: FnMut(usize, [i64; 4], &BigUint),
{
    fn rec<F: FnMut(usize, [i64; 4], &BigUint)>(
        groups: &[Vec<GroupOption>],
        max_weight: usize,
        weight: usize,
        delta: [i64; 4],
        count: &BigUint,
        visit: &mut F,
    ) {
        let Some((first, rest)) = groups.split_first() else {
            visit(weight, delta, count);
            return;
        };
        for opt in first {
            if weight + opt.weight > max_weight || opt.count.is_zero() {
                continue;
            }
            let mut d = delta;
            for (acc, step) in d.iter_mut().zip(opt.delta) {
                *acc += step;
            }
            let c = count * &opt.count;
            rec(rest, max_weight, weight + opt.weight, d, &c, visit);
        }
    }
    rec(groups, max_weight, 0, [0; 4], &BigUint::one(), &mut visit);
}

/// Options for choosing `m` positions out of `size`, each with symbol count `mult`.
fn single_group(size: usize, mult: u64, delta_per: [i64; 4]) -> Vec<GroupOption> {
    (0..=size)
        .map(|m| GroupOption {
            weight: m,
            delta: delta_per.map(|x| x * m as i64),
            count: binom(size as i64, m as i64) * upow(mult, m as u64),
        })
        .collect()
}

/// Options for two disjoint choices `(m1, m2)` out of `size`.
fn double_group(size: usize, mults: [u64; 2], deltas: [[i64; 4]; 2]) -> Vec<GroupOption> {
    let mut out = Vec::new();
    for m1 in 0..=size {
        for m2 in 0..=size - m1 {
            let mut delta = [0i64; 4];
            for (k, d) in delta.iter_mut().enumerate() {
                *d = deltas[0][k] * m1 as i64 + deltas[1][k] * m2 as i64;
            }
            out.push(GroupOption {
                weight: m1 + m2,
                delta,
                count: multinomial(size as u64, &[m1 as i64, m2 as i64]) * upow(mults[0], m1 as u64) * upow(mults[1], m2 as u64),
            });
        }
    }
    out
}

/// Options for three disjoint choices out of `size`.
fn triple_group(size: usize, mults: [u64; 3], deltas: [[i64; 4]; 3]) -> Vec<GroupOption> {
    let mut out = Vec::new();
    for m1 in 0..=size {
        for m2 in 0..=size - m1 {
            for m3 in 0..=size - m1 - m2 {
                let ms = [m1, m2, m3];
                let mut delta = [0i64; 4];
                for (k, d) in delta.iter_mut().enumerate() {
                    *d = (0..3).map(|g| deltas[g][k] * ms[g] as i64).sum();
                }
                let mut count = multinomial(size as u64, &[m1 as i64, m2 as i64, m3 as i64]);
                for g in 0..3 {
                    count *= upow(mults[g], ms[g] as u64);
                }
                out.push(GroupOption { weight: m1 + m2 + m3, delta, count });
            }
        }
    }
    out
}

fn to_index(v: [i64; 4]) -> Option<OrbitIndex> {
    if v.iter().any(|&x| x < 0) {
        return None;
    }
    Some(OrbitIndex::new(v[0] as usize, v[1] as usize, v[2] as usize, v[3] as usize))
}

/// Visits every `(dst, d, count)` such that `count` words `w` of weight `d`
/// (summed over one partition pattern) put `(u - w, v - w)` in class `dst`,
/// where `(u, v)` is in class `src`. Only weights `d <= max_weight` are
/// visited. The same `(dst, d)` may be reported more than once.
pub fn for_each_eta<F>(q: usize, n: usize, src: OrbitIndex, max_weight: usize, mut visit: F)
where
    F: FnMut(OrbitIndex, usize, &BigUint),
{
    if !src.is_member(q, n) {
        return;
    }
    let OrbitIndex { i, j, t, p } = src;
    let outside = n + t - i - j;
    let base = [i as i64, j as i64, t as i64, p as i64];
    let qq = q as u64;
    if q == 2 {
        // Deltas track (i', j', -, -); t' follows from distance preservation.
        let groups = [
            single_group(i - t, 1, [-1, 1, 0, 0]),
            single_group(j - t, 1, [1, -1, 0, 0]),
            single_group(t, 1, [-1, -1, 0, 0]),
            single_group(outside, 1, [1, 1, 0, 0]),
        ];
        let dist = src.distance() as i64;
        enumerate_groups(&groups, max_weight, |d, delta, count| {
            let i2 = base[0] + delta[0];
            let j2 = base[1] + delta[1];
            let t2 = (i2 + j2 - dist) / 2;
            if let Some(dst) = to_index([i2, j2, t2, t2]) {
                visit(dst, d, count);
            }
        });
        return;
    }
    // Deltas track (i', j', t', p').
    let groups = [
        // u ≠ 0, v = 0: w = u, or w ∉ {0, u}
        double_group(i - t, [1, qq - 2], [[-1, 1, 0, 0], [0, 1, 1, 0]]),
        // u = 0, v ≠ 0: w = v, or w ∉ {0, v}
        double_group(j - t, [1, qq - 2], [[1, -1, 0, 0], [1, 0, 1, 0]]),
        // u = v ≠ 0: w = u, or w ∉ {0, u}
        double_group(p, [1, qq - 2], [[-1, -1, -1, -1], [0, 0, 0, 0]]),
        // u ≠ v, both nonzero: w = u, w = v, or w ∉ {0, u, v}
        triple_group(t - p, [1, 1, qq.saturating_sub(3)], [[-1, 0, -1, 0], [0, -1, -1, 0], [0, 0, 0, 0]]),
        // u = v = 0
        single_group(outside, qq - 1, [1, 1, 1, 1]),
    ];
    enumerate_groups(&groups, max_weight, |d, delta, count| {
        let mut v = base;
        for (x, dx) in v.iter_mut().zip(delta) {
            *x += dx;
        }
        if let Some(dst) = to_index(v) {
            visit(dst, d, count);
        }
    });
}

/// Visits every `(j', t', p', d, count)`: `count` words `w` with
/// `class(u, w) = (i, j', t', p')` and `d(v, w) = d`, where `(u, v)` is in class
/// `src`. For `q = 2`, `p' = t'`.
pub fn for_each_alpha4<F>(q: usize, n: usize, src: OrbitIndex, mut visit: F)
where
    F: FnMut(OrbitIndex, usize, &BigUint),
{
    if !src.is_member(q, n) {
        return;
    }
    let OrbitIndex { i, j, t, p } = src;
    let outside = n + t - i - j;
    let qq = q as u64;
    // Deltas track (j', t', p', d - j).
    if q == 2 {
        let groups = [
            single_group(i - t, 1, [1, 1, 1, 1]),
            single_group(j - t, 1, [1, 0, 0, -1]),
            single_group(t, 1, [1, 1, 1, -1]),
            single_group(outside, 1, [1, 0, 0, 1]),
        ];
        enumerate_groups(&groups, n, |_, delta, count| {
            let d = j as i64 + delta[3];
            if let Some(dst) = to_index([i as i64, delta[0], delta[1], delta[2]]) {
                if d >= 0 {
                    visit(dst, d as usize, count);
                }
            }
        });
        return;
    }
    let groups = [
        // u ≠ 0, v = 0: w = u, or w ∉ {0, u}; v differs from w either way
        double_group(i - t, [1, qq - 2], [[1, 1, 1, 1], [1, 1, 0, 1]]),
        // u = 0, v ≠ 0: w = v, or w ∉ {0, v}
        double_group(j - t, [1, qq - 2], [[1, 0, 0, -1], [1, 0, 0, 0]]),
        // u = v ≠ 0
        double_group(p, [1, qq - 2], [[1, 1, 1, -1], [1, 1, 0, 0]]),
        // u ≠ v, both nonzero: w = u, w = v, or neither
        triple_group(t - p, [1, 1, qq.saturating_sub(3)], [[1, 1, 1, 0], [1, 1, 0, -1], [1, 1, 0, 0]]),
        // u = v = 0
        single_group(outside, qq - 1, [1, 0, 0, 1]),
    ];
    enumerate_groups(&groups, n, |_, delta, count| {
        let d = j as i64 + delta[3];
        if let Some(dst) = to_index([i as i64, delta[0], delta[1], delta[2]]) {
            if d >= 0 {
                visit(dst, d as usize, count);
            }
        }
    });
}

/// `η^{src}_{dst,d}` for `q = 2`: words `w` of weight `d` with `class(u-w, v-w) = dst`.
pub fn eta_binary(n: usize, src: OrbitIndex, dst: OrbitIndex, d: usize) -> BigUint {
    eta(2, n, src, dst, d)
}

/// `η^{src}_{dst,d}` for `q >= 3`.
pub fn eta_qary(q: usize, n: usize, src: OrbitIndex, dst: OrbitIndex, d: usize) -> BigUint {
    eta(q, n, src, dst, d)
}

fn eta(q: usize, n: usize, src: OrbitIndex, dst: OrbitIndex, d: usize) -> BigUint {
    let mut acc = BigUint::zero();
    if src.distance() != dst.distance() || !dst.is_member(q, n) {
        return acc;
    }
    for_each_eta(q, n, src, d, |found, weight, count| {
        if weight == d && found == dst {
            acc += count;
        }
    });
    acc
}

/// `α^{(i,j,t)}_{(i,j',t'),d}` for `q = 2`: words `w` with `class(u, w) = (i, j', t')` and `d(v, w) = d`.
pub fn alpha4_binary(n: usize, src: OrbitIndex, j2: usize, t2: usize, d: usize) -> BigUint {
    alpha4(2, n, src, OrbitIndex::binary(src.i, j2, t2), d)
}

/// `α^{(i,j,t,p)}_{(i,j',t',p'),d}` for `q >= 3`.
pub fn alpha4_qary(q: usize, n: usize, src: OrbitIndex, j2: usize, t2: usize, p2: usize, d: usize) -> BigUint {
    alpha4(q, n, src, OrbitIndex::new(src.i, j2, t2, p2), d)
}

fn alpha4(q: usize, n: usize, src: OrbitIndex, target: OrbitIndex, d: usize) -> BigUint {
    let mut acc = BigUint::zero();
    if !target.is_member(q, n) {
        return acc;
    }
    for_each_alpha4(q, n, src, |found, dist, count| {
        if dist == d && found == target {
            acc += count;
        }
    });
    acc
}

/// All weights `λ^{src}_{(i,j',t',p')} = Σ_d λ_d α^{src}_{(i,j',t',p'),d}` keyed by the target class.
pub fn lambda_weights(q: usize, n: usize, ineq: &InequalitySet, src: OrbitIndex) -> BTreeMap<OrbitIndex, BigRational> {
    let lambdas = ineq.lambdas();
    let mut counts: BTreeMap<(OrbitIndex, usize), BigUint> = BTreeMap::new();
    for_each_alpha4(q, n, src, |dst, d, count| {
        if d < lambdas.len() && !lambdas[d].is_zero() {
            *counts.entry((dst, d)).or_default() += count;
        }
    });
    let mut out: BTreeMap<OrbitIndex, BigRational> = BTreeMap::new();
    for ((dst, d), count) in counts {
        let w = &lambdas[d] * BigRational::from_integer(BigInt::from(count));
        *out.entry(dst).or_insert_with(BigRational::zero) += w;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `λ^{src}_{dst} = Σ_d λ_d · α4(src, dst, d)` for a single target class.
pub fn lambda_weighted(q: usize, n: usize, ineq: &InequalitySet, src: OrbitIndex, j2: usize, t2: usize, p2: usize) -> BigRational {
    let p2 = if q == 2 { t2 } else { p2 };
    let target = OrbitIndex::new(src.i, j2, t2, p2);
    lambda_weights(q, n, ineq, src).remove(&target).unwrap_or_else(BigRational::zero)
}

// ---------------------------------------------------------------------------
// Keys and memoization

/// Identifies one coefficient value together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoefficientKey {
    Krawtchouk { q: usize, n: usize, k: usize, i: usize },
    Intersection { q: usize, n: usize, k: usize, i: usize, j: usize },
    BetaBinary { n: usize, i: usize, j: usize, k: usize, t: usize },
    AlphaNonbinary { q: usize, n: usize, i: usize, j: usize, t: usize, p: usize, a: usize, k: usize },
    EtaBinary { n: usize, src: OrbitIndex, dst: OrbitIndex, d: usize },
    Alpha4Binary { n: usize, src: OrbitIndex, j: usize, t: usize, d: usize },
    EtaQary { q: usize, n: usize, src: OrbitIndex, dst: OrbitIndex, d: usize },
    Alpha4Qary { q: usize, n: usize, src: OrbitIndex, j: usize, t: usize, p: usize, d: usize },
}

impl CoefficientKey {
    pub fn kind(&self) -> &'static str {
        match self {
            CoefficientKey::Krawtchouk { .. } => "krawtchouk",
            CoefficientKey::Intersection { .. } => "intersection",
            CoefficientKey::BetaBinary { .. } => "betaBinary",
            CoefficientKey::AlphaNonbinary { .. } => "alphaNonbinary",
            CoefficientKey::EtaBinary { .. } => "etaBinary",
            CoefficientKey::Alpha4Binary { .. } => "alpha4Binary",
            CoefficientKey::EtaQary { .. } => "etaQary",
            CoefficientKey::Alpha4Qary { .. } => "alpha4Qary",
        }
    }

    /// Flat parameter list, in the order of the defining formula.
    pub fn params(&self) -> Vec<usize> {
        let idx = |o: &OrbitIndex, binary: bool| {
            if binary {
                vec![o.i, o.j, o.t]
            } else {
                vec![o.i, o.j, o.t, o.p]
            }
        };
        match *self {
            CoefficientKey::Krawtchouk { q, n, k, i } => vec![q, n, k, i],
            CoefficientKey::Intersection { q, n, k, i, j } => vec![q, n, k, i, j],
            CoefficientKey::BetaBinary { n, i, j, k, t } => vec![n, i, j, k, t],
            CoefficientKey::AlphaNonbinary { q, n, i, j, t, p, a, k } => vec![q, n, i, j, t, p, a, k],
            CoefficientKey::EtaBinary { n, src, dst, d } => {
                let mut v = vec![n];
                v.extend(idx(&src, true));
                v.extend(idx(&dst, true));
                v.push(d);
                v
            }
            CoefficientKey::Alpha4Binary { n, src, j, t, d } => {
                let mut v = vec![n];
                v.extend(idx(&src, true));
                v.extend([j, t, d]);
                v
            }
            CoefficientKey::EtaQary { q, n, src, dst, d } => {
                let mut v = vec![q, n];
                v.extend(idx(&src, false));
                v.extend(idx(&dst, false));
                v.push(d);
                v
            }
            CoefficientKey::Alpha4Qary { q, n, src, j, t, p, d } => {
                let mut v = vec![q, n];
                v.extend(idx(&src, false));
                v.extend([j, t, p, d]);
                v
            }
        }
    }

    pub fn evaluate(&self) -> BigInt {
        match *self {
            CoefficientKey::Krawtchouk { q, n, k, i } => krawtchouk(q as u64, n as u64, k as u64, i as u64),
            CoefficientKey::Intersection { q, n, k, i, j } => intersection_number(q as u64, n as u64, k as u64, i as u64, j as u64).into(),
            CoefficientKey::BetaBinary { n, i, j, k, t } => beta_binary(n, i, j, k, t),
            CoefficientKey::AlphaNonbinary { q, n, i, j, t, p, a, k } => alpha_nonbinary_scaled(q, n, i, j, t, p, a, k),
            CoefficientKey::EtaBinary { n, src, dst, d } => eta_binary(n, src, dst, d).into(),
            CoefficientKey::Alpha4Binary { n, src, j, t, d } => alpha4_binary(n, src, j, t, d).into(),
            CoefficientKey::EtaQary { q, n, src, dst, d } => eta_qary(q, n, src, dst, d).into(),
            CoefficientKey::Alpha4Qary { q, n, src, j, t, p, d } => alpha4_qary(q, n, src, j, t, p, d).into(),
        }
    }
}

/// Per-invocation memo table. Values are identical with or without it.
#[derive(Debug, Default, Clone)]
pub struct CoefficientCache {
    values: BTreeMap<CoefficientKey, BigInt>,
}

impl CoefficientCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, key: CoefficientKey) -> &BigInt {
        self.values.entry(key).or_insert_with(|| key.evaluate())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(4, 0), BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(3, -1), BigUint::zero());
        // beyond the u128 fast path
        assert_eq!(binomial(130, 1), BigUint::from(130u32));
        assert_eq!(binomial(200, 199), BigUint::from(200u32));
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(4, &[1, 1, 1]), BigUint::from(24u32));
        assert_eq!(multinomial(3, &[3]), BigUint::one());
        assert_eq!(multinomial(3, &[2, 2]), BigUint::zero());
        assert_eq!(multinomial(3, &[-1]), BigUint::zero());
    }

    #[test]
    fn krawtchouk_examples() {
        assert_eq!(krawtchouk(2, 4, 0, 2), big(1));
        assert_eq!(krawtchouk(2, 4, 1, 1), big(2));
        assert_eq!(krawtchouk(3, 2, 1, 0), big(4));
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection_number(2, 3, 0, 2, 2), BigUint::from(3u32));
        assert_eq!(intersection_number(3, 2, 1, 1, 1), BigUint::one());
        let total: BigUint = (0..=2).map(|j| intersection_number(3, 2, 1, 1, j)).sum();
        assert_eq!(total, BigUint::from(4u32));
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_binary(1, 0, 0, 0, 0), big(1));
    }

    #[test]
    fn alpha_scaled_trivial() {
        assert_eq!(alpha_nonbinary_scaled(3, 1, 0, 0, 0, 0, 0, 0), big(1));
        assert_eq!(alpha_nonbinary_scaled(3, 3, 1, 1, 1, 1, 2, 1), big(0));
    }

    #[test]
    fn index_set_small() {
        let expected = [
            OrbitIndex::binary(0, 0, 0),
            OrbitIndex::binary(0, 1, 0),
            OrbitIndex::binary(1, 0, 0),
            OrbitIndex::binary(1, 1, 1),
        ];
        assert_eq!(index_set(2, 1), expected);
        for q in 2..5 {
            for n in 1..6 {
                let set = index_set(q, n);
                assert!(set.iter().all(|x| x.is_member(q, n)));
                assert!(set.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_binary(2, OrbitIndex::zero(), OrbitIndex::binary(1, 1, 1), 1), BigUint::from(2u32));
        assert_eq!(eta_qary(3, 1, OrbitIndex::zero(), OrbitIndex::diagonal(1), 1), BigUint::from(2u32));
        // distance mismatch
        assert_eq!(eta_binary(3, OrbitIndex::zero(), OrbitIndex::binary(1, 0, 0), 1), BigUint::zero());
    }

    #[test]
    fn alpha4_examples() {
        let src = OrbitIndex::new(1, 1, 1, 1);
        assert_eq!(alpha4_qary(4, 2, src, 0, 0, 0, 1), BigUint::one());
    }

    #[test]
    fn cache_is_transparent() {
        let mut cache = CoefficientCache::new();
        let key = CoefficientKey::BetaBinary { n: 6, i: 3, j: 2, k: 1, t: 1 };
        let first = cache.get(key).clone();
        assert_eq!(first, beta_binary(6, 3, 2, 1, 1));
        assert_eq!(cache.get(key), &first);
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn key_params_layout() {
        let key = CoefficientKey::EtaBinary { n: 3, src: OrbitIndex::zero(), dst: OrbitIndex::binary(1, 1, 1), d: 1 };
        assert_eq!(key.params(), vec![3, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(key.kind(), "etaBinary");
    }
}
