//! Exact arithmetic over the Gaussian rationals ℚ[i] and projective
//! single-qubit covectors.
//!
//! Everything downstream only ever asks whether an amplitude is zero or
//! whether two covectors are proportional, so states are kept as
//! unnormalised projective classes with the first nonzero component scaled
//! to one. No floating point is used here.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::ExactError;

/// A complex number `re + im·i` with exact rational parts.
///
/// `BigRational` keeps both parts reduced with a positive denominator, so
/// derived equality is equality of the canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    /// `re_num/re_den + (im_num/im_den)·i`.
    pub fn from_fractions(re: (i64, i64), im: (i64, i64)) -> Result<Self, ExactError> {
        if re.1 == 0 || im.1 == 0 {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Self::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        ))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|² as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        Ok(self * &rhs.inv()?)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        &self + &rhs
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        &self - &rhs
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        &self * &rhs
    }
}

/// Which arithmetic operation [`gq_arith`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn gq_arith(
    a: &GaussianRational,
    b: &GaussianRational,
    op: ArithOp,
) -> Result<GaussianRational, ExactError> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.checked_div(b),
    }
}

fn write_fraction(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    write!(f, "{}/{}", q.numer().abs(), q.denom())
}

/// Textual form `a/b+c/di`, e.g. `1/2-3/4i`. Both parts are always written,
/// including unit denominators, so the form is canonical.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.re.is_negative() {
            f.write_str("-")?;
        }
        write_fraction(f, &self.re)?;
        f.write_str(if self.im.is_negative() { "-" } else { "+" })?;
        write_fraction(f, &self.im)?;
        f.write_str("i")
    }
}

fn parse_fraction(s: &str) -> Result<BigRational, ExactError> {
    let bad = || ExactError::Parse(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    if num.is_empty() || den.is_empty() || den.starts_with(['+', '-']) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ExactError::DivisionByZero);
    }
    Ok(BigRational::new(num, den))
}

impl FromStr for GaussianRational {
    type Err = ExactError;

    /// Accepts the canonical `a/b+c/di` form; denominators may be omitted
    /// (`1+0i`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let body = s
            .strip_suffix('i')
            .ok_or_else(|| ExactError::Parse(s.to_string()))?;
        // the imaginary part starts at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(|| ExactError::Parse(s.to_string()))?;
        let (re, im) = body.split_at(split);
        let im = im.strip_prefix('+').unwrap_or(im);
        Ok(Self::new(parse_fraction(re)?, parse_fraction(im)?))
    }
}

/// Scales `(c0, c1)` so the first nonzero component is one.
fn canonicalize(
    c0: GaussianRational,
    c1: GaussianRational,
) -> Result<(GaussianRational, GaussianRational), ExactError> {
    if !c0.is_zero() {
        let s = c0.inv()?;
        Ok((GaussianRational::one(), &c1 * &s))
    } else if !c1.is_zero() {
        Ok((GaussianRational::zero(), GaussianRational::one()))
    } else {
        Err(ExactError::ZeroVector)
    }
}

/// A single-qubit row covector `⟨α| = (c0, c1)` up to a nonzero scalar.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraState {
    c0: GaussianRational,
    c1: GaussianRational,
}

/// A single-qubit column vector up to a nonzero scalar.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ket {
    c0: GaussianRational,
    c1: GaussianRational,
}

impl BraState {
    pub fn new(c0: GaussianRational, c1: GaussianRational) -> Result<Self, ExactError> {
        let (c0, c1) = canonicalize(c0, c1)?;
        Ok(Self { c0, c1 })
    }

    pub fn from_ints(c0: i64, c1: i64) -> Result<Self, ExactError> {
        Self::new(
            GaussianRational::from_ints(c0, 0),
            GaussianRational::from_ints(c1, 0),
        )
    }

    pub fn c0(&self) -> &GaussianRational {
        &self.c0
    }

    pub fn c1(&self) -> &GaussianRational {
        &self.c1
    }

    pub fn components(&self) -> [&GaussianRational; 2] {
        [&self.c0, &self.c1]
    }

    /// `⟨α|k⟩ = c0·k0 + c1·k1` (the bra is already a row covector; no
    /// conjugation happens here).
    pub fn apply(&self, k: &Ket) -> GaussianRational {
        &(&self.c0 * &k.c0) + &(&self.c1 * &k.c1)
    }

    /// The one-dimensional kernel `|ᾱ⟩` of this covector.
    pub fn kernel_ket(&self) -> Ket {
        Ket::new(-&self.c1, self.c0.clone()).expect("a valid bra has a nonzero component")
    }
}

impl Ket {
    pub fn new(c0: GaussianRational, c1: GaussianRational) -> Result<Self, ExactError> {
        let (c0, c1) = canonicalize(c0, c1)?;
        Ok(Self { c0, c1 })
    }

    pub fn c0(&self) -> &GaussianRational {
        &self.c0
    }

    pub fn c1(&self) -> &GaussianRational {
        &self.c1
    }
}

/// True iff the two covectors agree up to a nonzero scalar.
pub fn proportional(a: &BraState, b: &BraState) -> bool {
    a == b
}

impl fmt::Display for BraState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.c0, self.c1)
    }
}

impl FromStr for BraState {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        Self::new(a.parse()?, b.parse()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gq(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
        GaussianRational::from_fractions(re, im).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let a = GaussianRational::from_ints(1, 1);
        let b = GaussianRational::from_ints(1, -1);
        assert_eq!(
            gq_arith(&a, &b, ArithOp::Mul).unwrap(),
            GaussianRational::from_ints(2, 0)
        );

        let two = GaussianRational::from_ints(2, 0);
        let four = GaussianRational::from_ints(4, 0);
        assert_eq!(
            gq_arith(&two, &four, ArithOp::Div).unwrap(),
            gq((1, 2), (0, 1))
        );

        let x = gq((3, 2), (1, 2));
        let y = gq((1, 2), (-1, 2));
        assert_eq!(gq_arith(&x, &y, ArithOp::Add).unwrap(), two);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let a = GaussianRational::one();
        assert_eq!(
            gq_arith(&a, &GaussianRational::zero(), ArithOp::Div),
            Err(ExactError::DivisionByZero)
        );
    }

    #[test]
    fn reduced_form_is_structural() {
        assert_eq!(gq((2, 4), (-3, 6)), gq((1, 2), (1, -2)));
        assert_eq!(gq((2, 4), (0, 5)).to_string(), "1/2+0/1i");
    }

    #[test]
    fn text_form() {
        let z: GaussianRational = "1/2-3/4i".parse().unwrap();
        assert_eq!(z, gq((1, 2), (-3, 4)));
        assert_eq!(z.to_string(), "1/2-3/4i");
        let w: GaussianRational = "-5/3+0/1i".parse().unwrap();
        assert_eq!(w.to_string(), "-5/3+0/1i");
        assert_eq!(
            "1+1i".parse::<GaussianRational>().unwrap(),
            GaussianRational::from_ints(1, 1)
        );
        assert!("1/2".parse::<GaussianRational>().is_err());
        assert!("1/0+0i".parse::<GaussianRational>().is_err());
        assert!("x+yi".parse::<GaussianRational>().is_err());

        let b: BraState = "(1/1+0/1i,-1/1+0/1i)".parse().unwrap();
        assert_eq!(b, BraState::from_ints(1, -1).unwrap());
        assert_eq!(b.to_string(), "(1/1+0/1i,-1/1+0/1i)");
    }

    #[test]
    fn kernel_examples() {
        let k = BraState::from_ints(1, 0).unwrap().kernel_ket();
        assert_eq!(
            k,
            Ket::new(GaussianRational::zero(), GaussianRational::one()).unwrap()
        );

        let k = BraState::from_ints(0, 1).unwrap().kernel_ket();
        assert_eq!(
            k,
            Ket::new(GaussianRational::one(), GaussianRational::zero()).unwrap()
        );

        let b = BraState::from_ints(1, 1).unwrap();
        let k = b.kernel_ket();
        assert_eq!(
            k,
            Ket::new(GaussianRational::one(), GaussianRational::from_ints(-1, 0)).unwrap()
        );
        assert!(b.apply(&k).is_zero());
    }

    #[test]
    fn proportional_examples() {
        let e0 = BraState::from_ints(1, 0).unwrap();
        let e1 = BraState::from_ints(0, 1).unwrap();
        assert!(proportional(&e0, &e0));
        assert!(!proportional(&e0, &e1));
        assert!(proportional(
            &BraState::from_ints(2, 2).unwrap(),
            &BraState::from_ints(1, 1).unwrap()
        ));
        assert_eq!(BraState::from_ints(0, 0), Err(ExactError::ZeroVector));
    }

    fn arb_gq() -> impl Strategy<Value = GaussianRational> {
        (-4i64..=4, 1i64..=3, -4i64..=4, 1i64..=3).prop_map(|(a, b, c, d)| gq((a, b), (c, d)))
    }

    fn arb_bra() -> impl Strategy<Value = BraState> {
        (arb_gq(), arb_gq())
            .prop_filter("nonzero", |(a, b)| !(a.is_zero() && b.is_zero()))
            .prop_map(|(a, b)| BraState::new(a, b).unwrap())
    }

    proptest! {
        #[test]
        fn kernel_is_annihilated(b in arb_bra()) {
            prop_assert!(b.apply(&b.kernel_ket()).is_zero());
        }

        #[test]
        fn canonicalization_is_idempotent(b in arb_bra(), s in arb_gq()) {
            prop_assume!(!s.is_zero());
            let again = BraState::new(b.c0().clone(), b.c1().clone()).unwrap();
            prop_assert_eq!(&again, &b);
            let scaled = BraState::new(&s * b.c0(), &s * b.c1()).unwrap();
            prop_assert!(proportional(&scaled, &b));
        }

        #[test]
        fn proportional_is_an_equivalence(a in arb_bra(), b in arb_bra(), c in arb_bra()) {
            prop_assert!(proportional(&a, &a));
            prop_assert_eq!(proportional(&a, &b), proportional(&b, &a));
            if proportional(&a, &b) && proportional(&b, &c) {
                prop_assert!(proportional(&a, &c));
            }
        }

        #[test]
        fn text_round_trip(z in arb_gq()) {
            prop_assert_eq!(z.to_string().parse::<GaussianRational>().unwrap(), z);
        }

        #[test]
        fn field_axioms_hold(a in arb_gq(), b in arb_gq()) {
            prop_assume!(!b.is_zero());
            let q = a.checked_div(&b).unwrap();
            prop_assert_eq!(&q * &b, a.clone());
            prop_assert_eq!(&(&a - &b) + &b, a);
        }
    }
}
