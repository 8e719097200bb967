//! Sparse affine forms over exact rationals.

use alloc::collections::BTreeMap;
use core::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `Σ coeff_id · x_id + constant`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    coeffs: BTreeMap<usize, BigRational>,
    constant: BigRational,
}

pub(crate) fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub(crate) fn int_rat(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant_form(c: BigRational) -> Self {
        LinearForm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(id: usize) -> Self {
        Self::term(id, BigRational::one())
    }

    pub fn term(id: usize, c: BigRational) -> Self {
        let mut f = Self::zero();
        f.add_term(id, c);
        f
    }

    pub fn add_term(&mut self, id: usize, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(id).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&id);
        }
    }

    pub fn add_constant(&mut self, c: BigRational) {
        self.constant += c;
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &LinearForm, factor: &BigRational) {
        if factor.is_zero() {
            return;
        }
        for (&id, c) in &other.coeffs {
            self.add_term(id, c * factor);
        }
        self.constant += &other.constant * factor;
    }

    pub fn scaled(&self, factor: &BigRational) -> LinearForm {
        let mut out = LinearForm::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn coeff(&self, id: usize) -> BigRational {
        self.coeffs.get(&id).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.coeffs.iter().map(|(&id, c)| (id, c))
    }

    pub fn constant(&self) -> &BigRational {
        &self.constant
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    /// Value at `point`; variables beyond the slice count as zero.
    pub fn evaluate(&self, point: &[BigRational]) -> BigRational {
        let mut acc = self.constant.clone();
        for (&id, c) in &self.coeffs {
            if let Some(v) = point.get(id) {
                acc += c * v;
            }
        }
        acc
    }

    /// Floating-point evaluation, for numerical checks.
    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        let mut acc = self.constant.to_f64().unwrap_or(f64::NAN);
        for (&id, c) in &self.coeffs {
            acc += c.to_f64().unwrap_or(f64::NAN) * point.get(id).copied().unwrap_or(0.0);
        }
        acc
    }

    /// Multiplies by the positive rational making every coefficient and the
    /// constant coprime integers. Used to recognize duplicate constraints.
    pub fn normalized(&self) -> LinearForm {
        use num_integer::Integer;
        let mut lcm = BigInt::one();
        let mut gcd = BigInt::zero();
        for c in self.coeffs.values().chain(core::iter::once(&self.constant)) {
            lcm = lcm.lcm(c.denom());
        }
        for c in self.coeffs.values().chain(core::iter::once(&self.constant)) {
            let scaled = c.numer() * (&lcm / c.denom());
            gcd = gcd.gcd(&scaled);
        }
        if gcd.is_zero() {
            return self.clone();
        }
        self.scaled(&BigRational::new(lcm, gcd))
    }
}

impl From<BigRational> for LinearForm {
    fn from(c: BigRational) -> Self {
        LinearForm::constant_form(c)
    }
}

impl AddAssign<&LinearForm> for LinearForm {
    fn add_assign(&mut self, rhs: &LinearForm) {
        self.add_scaled(rhs, &BigRational::one());
    }
}

impl SubAssign<&LinearForm> for LinearForm {
    fn sub_assign(&mut self, rhs: &LinearForm) {
        self.add_scaled(rhs, &-BigRational::one());
    }
}

impl Add<&LinearForm> for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&LinearForm> for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self.scaled(&-BigRational::one())
    }
}
