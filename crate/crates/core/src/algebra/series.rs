use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::{BigRational, Signed};

use super::qpoly::{forward_owned, rat, QPoly};

/// Finite Laurent series in `T = q^s` whose coefficients are [`QPoly`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    terms: BTreeMap<i64, QPoly>,
}

impl LaurentSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(QPoly::one(), 0)
    }

    pub fn term(c: QPoly, k: i64) -> Self {
        let mut s = Self::zero();
        s.add_term(k, &c);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, QPoly)>>(terms: I) -> Self {
        let mut s = Self::zero();
        for (k, c) in terms {
            s.add_term(k, &c);
        }
        s
    }

    pub fn add_term(&mut self, k: i64, c: &QPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: i64) -> QPoly {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &QPoly)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &QPoly) -> Self {
        let mut out = Self::zero();
        for (k, x) in &self.terms {
            out.add_term(*k, &(x * c));
        }
        out
    }

    /// Value at `T = 1`, i.e. at `s = 0`.
    pub fn at_one(&self) -> QPoly {
        let mut acc = QPoly::zero();
        for c in self.terms.values() {
            acc += c;
        }
        acc
    }

    /// `d/ds` at `s = 0`, divided by `log q`: the sum of `k * coeff_k`.
    pub fn log_derivative_at_zero(&self) -> QPoly {
        let mut acc = QPoly::zero();
        for (k, c) in &self.terms {
            acc += &c.scale(&rat(*k));
        }
        acc
    }
}

pub fn series_at_one(s: &LaurentSeries) -> QPoly {
    s.at_one()
}

pub fn series_log_derivative_at_zero(s: &LaurentSeries) -> QPoly {
    s.log_derivative_at_zero()
}

impl AddAssign<&LaurentSeries> for LaurentSeries {
    fn add_assign(&mut self, rhs: &LaurentSeries) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, c);
        }
    }
}

impl SubAssign<&LaurentSeries> for LaurentSeries {
    fn sub_assign(&mut self, rhs: &LaurentSeries) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, &-c);
        }
    }
}

impl Add<&LaurentSeries> for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&LaurentSeries> for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&LaurentSeries> for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        let mut out = LaurentSeries::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                out.add_term(k1 + k2, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

forward_owned!(LaurentSeries, Add add, Sub sub, Mul mul);

/// Integer tally of `coeff * q^e * T^k` contributions, converted once at the end.
///
/// Orbital sums add hundreds of small integer monomials; summing machine
/// integers first keeps the rational arithmetic out of the inner loops.
#[derive(Clone, Debug, Default)]
pub struct SeriesTally {
    counts: BTreeMap<(i64, i64), i128>,
}

impl SeriesTally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, k: i64, e: i64, c: i128) {
        if c != 0 {
            *self.counts.entry((k, e)).or_insert(0) += c;
        }
    }

    pub fn finish(self) -> LaurentSeries {
        let mut grouped: BTreeMap<i64, QPoly> = BTreeMap::new();
        for ((k, e), c) in self.counts {
            if c != 0 {
                grouped
                    .entry(k)
                    .or_default()
                    .add_term(e, BigRational::from_integer(c.into()));
            }
        }
        LaurentSeries::from_terms(grouped)
    }
}

impl fmt::Display for LaurentSeries {
    /// Ascending powers of `T`: `-T^-1 + 1 - T + T^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let negative = c.terms().all(|(_, x)| x.is_negative());
            let body = if negative { -c } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let t = match *k {
                0 => String::new(),
                1 => "T".to_string(),
                k => format!("T^{k}"),
            };
            let unit = body == QPoly::one();
            if unit {
                if t.is_empty() {
                    write!(f, "1")?;
                } else {
                    write!(f, "{t}")?;
                }
            } else if body.is_monomial() || t.is_empty() {
                write!(f, "{body}{t}")?;
            } else {
                write!(f, "({body}){t}")?;
            }
        }
        Ok(())
    }
}

impl LaurentSeries {
    /// True when every coefficient times `(-1)^k` has nonnegative coefficients.
    pub fn has_alternating_sign_pattern(&self) -> bool {
        self.terms.iter().all(|(k, c)| {
            let signed = if k.rem_euclid(2) == 0 { c.clone() } else { -c };
            signed.has_nonnegative_coeffs()
        })
    }
}
