//! Valid inequality families `(λ_0, …, λ_n)β` for covering codes.
//!
//! A code `C` satisfies the family when `Σ_i λ_i |C ∩ S_i(u)| ≥ β` holds for
//! every word `u`.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{binomial, upow};
use crate::linear::rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    SphereCovering,
    VanWee,
    CeilStrengthened,
    Custom,
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::SphereCovering => "sphereCovering",
            Provenance::VanWee => "vanWee",
            Provenance::CeilStrengthened => "ceilStrengthened",
            Provenance::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InequalityError {
    Empty,
    NegativeLambda { index: usize },
    NonPositiveBeta,
    RadiusOutOfRange { n: usize, r: usize },
    LengthMismatch { expected: usize, found: usize },
    /// Every λ_i with a nonempty sphere is zero, so the averaged bound is undefined.
    DegenerateWeights,
}

impl fmt::Display for InequalityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InequalityError::Empty => write!(f, "inequality needs at least one coefficient"),
            InequalityError::NegativeLambda { index } => write!(f, "lambda_{index} is negative"),
            InequalityError::NonPositiveBeta => write!(f, "beta must be positive"),
            InequalityError::RadiusOutOfRange { n, r } => write!(f, "radius {r} out of range for length {n}"),
            InequalityError::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} coefficients, found {found}")
            }
            InequalityError::DegenerateWeights => write!(f, "all weights on nonempty spheres are zero"),
        }
    }
}

impl core::error::Error for InequalityError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalitySet {
    lambdas: Vec<BigRational>,
    beta: BigRational,
    provenance: Provenance,
}

impl InequalitySet {
    pub fn new(lambdas: Vec<BigRational>, beta: BigRational, provenance: Provenance) -> Result<Self, InequalityError> {
        if lambdas.is_empty() {
            return Err(InequalityError::Empty);
        }
        if let Some(index) = lambdas.iter().position(|l| l.is_negative()) {
            return Err(InequalityError::NegativeLambda { index });
        }
        if !beta.is_positive() {
            return Err(InequalityError::NonPositiveBeta);
        }
        Ok(InequalitySet { lambdas, beta, provenance })
    }

    /// Word length the family was built for.
    pub fn n(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn lambdas(&self) -> &[BigRational] {
        &self.lambdas
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Largest `d` with `λ_d ≠ 0`.
    pub fn max_support(&self) -> Option<usize> {
        self.lambdas.iter().rposition(|l| !l.is_zero())
    }

    pub fn check_length(&self, n: usize) -> Result<(), InequalityError> {
        if self.lambdas.len() != n + 1 {
            return Err(InequalityError::LengthMismatch { expected: n + 1, found: self.lambdas.len() });
        }
        Ok(())
    }
}

/// `Σ_{i ≤ r} A_i(u) ≥ 1`: every word is within distance `r` of the code.
pub fn sphere_covering(q: usize, n: usize, r: usize) -> Result<InequalitySet, InequalityError> {
    let _ = q;
    if r > n {
        return Err(InequalityError::RadiusOutOfRange { n, r });
    }
    let lambdas = (0..=n).map(|i| if i <= r { BigRational::one() } else { BigRational::zero() }).collect();
    InequalitySet::new(lambdas, BigRational::one(), Provenance::SphereCovering)
}

/// Binary van Wee family: with `m = ⌈(n+1)/(r+1)⌉`, `λ_i = m` for `i < r`,
/// `λ_r = λ_{r+1} = 1`, and `β = m`.
pub fn van_wee(n: usize, r: usize) -> Result<InequalitySet, InequalityError> {
    if r >= n {
        return Err(InequalityError::RadiusOutOfRange { n, r });
    }
    let m = (n + 1).div_ceil(r + 1) as i64;
    let lambdas = (0..=n)
        .map(|i| match i {
            _ if i < r => rat(m),
            _ if i == r || i == r + 1 => rat(1),
            _ => rat(0),
        })
        .collect();
    InequalitySet::new(lambdas, rat(m), Provenance::VanWee)
}

/// Rounds every coefficient and `β` up; valid because the left side is an integer combination.
pub fn ceil_strengthen(ineq: &InequalitySet) -> InequalitySet {
    let lambdas = ineq.lambdas.iter().map(|l| l.ceil()).collect();
    InequalitySet { lambdas, beta: ineq.beta.ceil(), provenance: Provenance::CeilStrengthened }
}

/// Averaged bound `β q^n / Σ_i λ_i C(n,i)(q-1)^i`.
pub fn plain_lower_bound(q: usize, n: usize, ineq: &InequalitySet) -> Result<BigRational, InequalityError> {
    ineq.check_length(n)?;
    let mut denom = BigRational::zero();
    for (i, l) in ineq.lambdas.iter().enumerate() {
        let size = binomial(n as u64, i as i64) * upow(q as u64 - 1, i as u64);
        denom += l * BigRational::from_integer(BigInt::from(size));
    }
    if denom.is_zero() {
        return Err(InequalityError::DegenerateWeights);
    }
    let total = BigRational::from_integer(BigInt::from(upow(q as u64, n as u64)));
    Ok(&ineq.beta * total / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn sphere_examples() {
        let s = sphere_covering(2, 3, 1).unwrap();
        assert_eq!(s.lambdas(), &[rat(1), rat(1), rat(0), rat(0)]);
        assert_eq!(s.beta(), &rat(1));
        let s = sphere_covering(3, 6, 2).unwrap();
        assert_eq!(s.lambdas().iter().filter(|l| l.is_one()).count(), 3);
        assert!(sphere_covering(2, 4, 4).unwrap().lambdas().iter().all(|l| l.is_one()));
        assert!(sphere_covering(2, 4, 5).is_err());
    }

    #[test]
    fn van_wee_examples() {
        let v = van_wee(12, 3).unwrap();
        assert_eq!(&v.lambdas()[..6], &[rat(4), rat(4), rat(4), rat(1), rat(1), rat(0)]);
        assert_eq!(v.beta(), &rat(4));
        let v = van_wee(5, 1).unwrap();
        assert_eq!(v.lambdas(), &[rat(3), rat(1), rat(1), rat(0), rat(0), rat(0)]);
        assert_eq!(v.beta(), &rat(3));
        assert_eq!(van_wee(7, 1).unwrap().beta(), &rat(4));
        assert!(van_wee(4, 4).is_err());
    }

    #[test]
    fn ceiling_examples() {
        let a = InequalitySet::new(vec![frac(1, 2), rat(1), rat(0)], frac(3, 2), Provenance::Custom).unwrap();
        let c = ceil_strengthen(&a);
        assert_eq!(c.lambdas(), &[rat(1), rat(1), rat(0)]);
        assert_eq!(c.beta(), &rat(2));
        let b = InequalitySet::new(vec![rat(0), frac(7, 3)], rat(1), Provenance::Custom).unwrap();
        assert_eq!(ceil_strengthen(&b).lambdas(), &[rat(0), rat(3)]);
        let s = sphere_covering(2, 4, 1).unwrap();
        assert_eq!(ceil_strengthen(&s).lambdas(), s.lambdas());
    }

    #[test]
    fn plain_bound_examples() {
        assert_eq!(plain_lower_bound(2, 5, &sphere_covering(2, 5, 1).unwrap()).unwrap(), frac(32, 6));
        assert_eq!(plain_lower_bound(3, 4, &sphere_covering(3, 4, 1).unwrap()).unwrap(), rat(9));
        assert_eq!(plain_lower_bound(2, 5, &van_wee(5, 1).unwrap()).unwrap(), frac(16, 3));
    }

    #[test]
    fn validation() {
        assert_eq!(
            InequalitySet::new(vec![rat(-1)], rat(1), Provenance::Custom),
            Err(InequalityError::NegativeLambda { index: 0 })
        );
        assert_eq!(InequalitySet::new(vec![rat(1)], rat(0), Provenance::Custom), Err(InequalityError::NonPositiveBeta));
        let zero = InequalitySet::new(vec![rat(0), rat(0)], rat(1), Provenance::Custom).unwrap();
        assert_eq!(plain_lower_bound(2, 1, &zero), Err(InequalityError::DegenerateWeights));
    }
}
