use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::{BigInt, BigRational, One, Signed, Zero};

/// Laurent polynomial in `q` with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPoly {
    terms: BTreeMap<i64, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl QPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: i64, exp: i64) -> Self {
        Self::term(rat(c), exp)
    }

    pub fn term(c: BigRational, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p
    }

    /// `1 + q + ... + q^n`; zero when `n < 0`.
    pub fn geometric(n: i64) -> Self {
        Self::from_int_terms((0..=n).map(|e| (e, 1)))
    }

    pub fn from_int_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, rat(c));
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigRational {
        self.terms.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.terms.values().next_back()
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&rat(c))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Drops every term with exponent below `min_exp`.
    pub fn truncate_below(&self, min_exp: i64) -> Self {
        Self {
            terms: self.terms.range(min_exp..).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    /// Exact value at `q = x`. Fails only for negative powers at `x = 0`.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            if *e < 0 && x.is_zero() {
                return None;
            }
            acc += c * pow_rat(x, *e);
        }
        Some(acc)
    }

    pub fn eval_int(&self, x: i64) -> Option<BigRational> {
        self.eval(&rat(x))
    }

    /// Exact quotient `self / divisor` when the division leaves no remainder.
    pub fn div_exact(&self, divisor: &QPoly) -> Option<QPoly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let d_low = divisor.low_degree()?;
        let d_high = divisor.degree()?;
        let d_lead = divisor.leading_coeff()?.clone();
        let mut rem = self.clone();
        let mut quot = QPoly::zero();
        while let Some(r_high) = rem.degree() {
            let r_low = rem.low_degree()?;
            if r_high - d_high < r_low - d_low {
                return None;
            }
            let shift = r_high - d_high;
            let c = rem.leading_coeff()? / &d_lead;
            quot.add_term(shift, c.clone());
            rem = &rem - &divisor.shift(shift).scale(&c);
        }
        Some(quot)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

pub(crate) fn pow_rat(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num::pow(base, e.unsigned_abs() as usize)
}

impl From<i64> for QPoly {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl From<BigRational> for QPoly {
    fn from(c: BigRational) -> Self {
        Self::term(c, 0)
    }
}

impl AddAssign<&QPoly> for QPoly {
    fn add_assign(&mut self, rhs: &QPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&QPoly> for QPoly {
    fn sub_assign(&mut self, rhs: &QPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl Add<&QPoly> for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&QPoly> for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&QPoly> for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                (&self).$m(rhs)
            }
        }
    )*};
}
pub(crate) use forward_owned;

forward_owned!(QPoly, Add add, Sub sub, Mul mul);

impl Neg for QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        -&self
    }
}

fn fmt_monomial(f: &mut fmt::Formatter<'_>, abs: &BigRational, exp: i64, var: &str) -> fmt::Result {
    let unit = abs.is_one();
    if exp == 0 {
        return write!(f, "{abs}");
    }
    if !unit {
        if abs.is_integer() {
            write!(f, "{abs}")?;
        } else {
            write!(f, "({abs})")?;
        }
    }
    if exp == 1 {
        write!(f, "{var}")
    } else {
        write!(f, "{var}^{exp}")
    }
}

pub(crate) fn fmt_signed_terms<'a, I>(f: &mut fmt::Formatter<'_>, terms: I, var: &str) -> fmt::Result
where
    I: Iterator<Item = (i64, &'a BigRational)>,
{
    let mut first = true;
    for (e, c) in terms {
        let abs = c.abs();
        match (first, c.is_negative()) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        fmt_monomial(f, &abs, e, var)?;
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for QPoly {
    /// Descending powers: `2q^3 + q^2 + q + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_signed_terms(f, self.terms().rev(), "q")
    }
}
