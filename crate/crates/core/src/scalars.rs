//! Exact field arithmetic over the rationals and over prime fields `F_p`, `p` odd.
//!
//! Every [`Scalar`] carries its field. Binary operations between scalars of
//! different fields are rejected: the checked API returns
//! [`ScalarError::MixedField`], the operator impls panic.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

/// Largest modulus accepted, so that residue products fit in a `u64`.
const MAX_MODULUS: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} and {1})")]
    MixedField(FieldSpec, FieldSpec),
    #[error("unsupported characteristic {0}: expected 0 or an odd prime below 2^31")]
    BadCharacteristic(u64),
}

/// The coefficient field: `Q` (characteristic 0) or `F_p` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    characteristic: u64,
}

impl FieldSpec {
    pub const RATIONALS: FieldSpec = FieldSpec { characteristic: 0 };

    pub fn new(characteristic: u64) -> Result<Self, ScalarError> {
        if characteristic == 0
            || (characteristic > 2 && characteristic <= MAX_MODULUS && is_prime(characteristic))
        {
            Ok(FieldSpec { characteristic })
        } else {
            Err(ScalarError::BadCharacteristic(characteristic))
        }
    }

    pub fn characteristic(self) -> u64 {
        self.characteristic
    }

    pub fn is_rational(self) -> bool {
        self.characteristic == 0
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rational(Rational::Small(v, 1)),
            p => Scalar::Residue {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    pub fn from_bigint(self, v: &BigInt) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rational(Rational::from_big(BigRational::from_integer(v.clone()))),
            p => {
                let r = v.mod_floor(&BigInt::from(p));
                Scalar::Residue {
                    value: r.to_u64().expect("residue fits"),
                    modulus: p,
                }
            }
        }
    }

    /// `num / den` read in this field.
    pub fn from_fraction(self, num: &BigInt, den: &BigInt) -> Result<Scalar, ScalarError> {
        let d = self.from_bigint(den);
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        self.from_bigint(num).checked_div(&d)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.characteristic {
            0 => write!(f, "Q"),
            p => write!(f, "F_{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact rational in lowest terms with positive denominator.
///
/// Values that fit in `i64` stay unboxed; everything else spills into a
/// `BigRational`. The representation is canonical, so structural equality is
/// value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    Small(i64, i64),
    Big(BigRational),
}

impl Rational {
    fn from_i128(num: i128, den: i128) -> Rational {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = if g == 0 { (0, 1) } else { (num / g, den / g) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational::Small(n, d),
            _ => Rational::Big(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: BigRational) -> Rational {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational::Small(n, d),
            _ => Rational::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(n, _) => BigInt::from(*n),
            Rational::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(_, d) => BigInt::from(*d),
            Rational::Big(r) => r.denom().clone(),
        }
    }

    fn add(&self, other: &Rational) -> Rational {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, other) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if b == d {
                return Rational::from_i128(a + c, b);
            }
            if let (Some(x), Some(y), Some(z)) = (a.checked_mul(d), c.checked_mul(b), b.checked_mul(d)) {
                if let Some(s) = x.checked_add(y) {
                    return Rational::from_i128(s, z);
                }
            }
        }
        Rational::from_big(self.to_big() + other.to_big())
    }

    fn mul(&self, other: &Rational) -> Rational {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, other) {
            return Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        Rational::from_big(self.to_big() * other.to_big())
    }

    fn neg(&self) -> Rational {
        match self {
            Rational::Small(n, d) if *n != i64::MIN => Rational::Small(-n, *d),
            _ => Rational::from_big(-self.to_big()),
        }
    }

    fn inv(&self) -> Option<Rational> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Rational::Small(n, d) => Rational::from_i128(*d as i128, *n as i128),
            Rational::Big(r) => Rational::from_big(r.recip()),
        })
    }

    fn cmp_value(&self, other: &Rational) -> Ordering {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Rational::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

/// An element of a [`FieldSpec`].
#[derive(Debug, Clone)]
pub enum Scalar {
    Rational(Rational),
    Residue { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::RATIONALS,
            Scalar::Residue { modulus, .. } => FieldSpec {
                characteristic: *modulus,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => matches!(r, Rational::Small(1, 1)),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<(), ScalarError> {
        let (a, b) = (self.field(), other.field());
        if a == b {
            Ok(())
        } else {
            Err(ScalarError::MixedField(a, b))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.add(b)),
            (Scalar::Residue { value: a, modulus: p }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: (a + b) % p,
                    modulus: *p,
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.mul(b)),
            (Scalar::Residue { value: a, modulus: p }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: (a * b) % p,
                    modulus: *p,
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rational(r) => r.inv().map(Scalar::Rational).ok_or(ScalarError::DivisionByZero),
            Scalar::Residue { value, modulus } => {
                if *value == 0 {
                    return Err(ScalarError::DivisionByZero);
                }
                Ok(Scalar::Residue {
                    value: pow_mod(*value, modulus - 2, *modulus),
                    modulus: *modulus,
                })
            }
        }
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.neg()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }

    /// Integer value as a canonical `i64` when the scalar is an integer that fits
    /// (for residues: the representative in `[0, p)`).
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(Rational::Small(n, 1)) => Some(*n),
            Scalar::Rational(_) => None,
            Scalar::Residue { value, .. } => Some(*value as i64),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Residue { .. } => None,
        }
    }

    /// Sign for display: rationals below zero print with a leading minus.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.cmp_value(&Rational::Small(0, 1)) == Ordering::Less,
            Scalar::Residue { .. } => false,
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            self.neg_ref()
        } else {
            self.clone()
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (
                Scalar::Residue { value: a, modulus: p },
                Scalar::Residue { value: b, modulus: q },
            ) => a == b && p == q,
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Rational(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Scalar::Residue { value, modulus } => {
                1u8.hash(state);
                value.hash(state);
                modulus.hash(state);
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl From<&Rational> for BigRational {
    fn from(r: &Rational) -> BigRational {
        r.to_big()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        FieldSpec::RATIONALS
            .from_fraction(&BigInt::from(n), &BigInt::from(d))
            .unwrap()
    }

    #[test]
    fn rational_examples() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
        assert_eq!(q(4, -6), q(-2, 3));
        assert_eq!(q(-2, 3).to_string(), "-2/3");
        assert_eq!(q(6, 3).to_string(), "2");
        assert!(q(0, 5).is_zero());
    }

    #[test]
    fn residue_examples() {
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(f5.from_i64(2).inv().unwrap(), f5.from_i64(3));
        let f3 = FieldSpec::new(3).unwrap();
        assert!(f3.from_i64(3).is_zero());
        assert_eq!(f3.from_i64(-1).to_string(), "2");
        assert_eq!(
            f5.from_fraction(&BigInt::from(1), &BigInt::from(2)).unwrap(),
            f5.from_i64(3)
        );
    }

    #[test]
    fn errors() {
        let f5 = FieldSpec::new(5).unwrap();
        let f7 = FieldSpec::new(7).unwrap();
        assert_eq!(
            f5.one().checked_add(&f7.one()),
            Err(ScalarError::MixedField(f5, f7))
        );
        assert_eq!(f5.zero().inv(), Err(ScalarError::DivisionByZero));
        assert_eq!(FieldSpec::RATIONALS.zero().inv(), Err(ScalarError::DivisionByZero));
        assert_eq!(FieldSpec::new(4), Err(ScalarError::BadCharacteristic(4)));
        assert_eq!(FieldSpec::new(2), Err(ScalarError::BadCharacteristic(2)));
        assert!(f5.from_fraction(&BigInt::from(1), &BigInt::from(5)).is_err());
    }

    #[test]
    fn overflow_spills_to_big() {
        let big = FieldSpec::RATIONALS.from_i64(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq.as_rational(), Some(Rational::Big(_))));
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back.as_rational(), Some(Rational::Small(..))));
    }

    fn scalar_in(c: u64) -> impl Strategy<Value = Scalar> {
        let f = FieldSpec::new(c).unwrap();
        (-50i64..50, 1i64..20).prop_map(move |(n, d)| {
            let d = if c != 0 && (d as u64).is_multiple_of(c) { 1 } else { d };
            f.from_fraction(&BigInt::from(n), &BigInt::from(d)).unwrap()
        })
    }

    fn axioms(a: Scalar, b: Scalar, c: Scalar) {
        assert_eq!(&a + &b, &b + &a);
        assert_eq!(&a * &b, &b * &a);
        assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        let same = a.clone();
        assert!((&a - &same).is_zero());
        if !a.is_zero() {
            assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    proptest! {
        #[test]
        fn field_axioms_q(a in scalar_in(0), b in scalar_in(0), c in scalar_in(0)) { axioms(a, b, c) }
        #[test]
        fn field_axioms_f3(a in scalar_in(3), b in scalar_in(3), c in scalar_in(3)) { axioms(a, b, c) }
        #[test]
        fn field_axioms_f5(a in scalar_in(5), b in scalar_in(5), c in scalar_in(5)) { axioms(a, b, c) }
        #[test]
        fn field_axioms_f7(a in scalar_in(7), b in scalar_in(7), c in scalar_in(7)) { axioms(a, b, c) }
    }
}
