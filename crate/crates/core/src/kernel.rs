//! Matrices of orbital derivatives across `(v(e), r)`, their row reduction and exact rank.

use std::fmt;

use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::QPoly;
use crate::orbital::{derivative_closed_form, derivative_of_vector, HeckeVector, OrbitalParams, ParamError, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("N = {0} must be nonnegative")]
    NegativeN(i64),
    #[error("r = {r} is too small: need r >= {min}")]
    RTooSmall { r: i64, min: i64 },
    #[error("fraction-free elimination hit an inexact division")]
    InexactDivision,
    #[error(transparent)]
    Params(#[from] ParamError),
}

/// Matrix with entry `(i, r)` equal to `D(r, v(b)+v(c), v(e) = i, v(d-a))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivMatrix {
    pub sum_bc: i64,
    pub vda: Valuation,
    pub n: i64,
    pub entries: Vec<Vec<QPoly>>,
}

impl DerivMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn entry(&self, i: usize, r: usize) -> &QPoly {
        &self.entries[i][r]
    }

    fn params(sum_bc: i64, vda: Valuation) -> OrbitalParams {
        OrbitalParams::new(0, 0, sum_bc, 0, vda)
    }

    pub fn theta(&self) -> i64 {
        Self::params(self.sum_bc, self.vda).theta()
    }

    fn with_entries(&self, entries: Vec<Vec<QPoly>>) -> Self {
        Self { entries, ..self.clone() }
    }
}

impl fmt::Display for DerivMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(ToString::to_string).collect())
            .collect();
        let widths: Vec<usize> = (0..self.cols())
            .map(|c| cells.iter().map(|row| row[c].len()).max().unwrap_or(0))
            .collect();
        for row in &cells {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect();
            writeln!(f, "{}", padded.join(" | "))?;
        }
        Ok(())
    }
}

pub fn build_matrix(sum_bc: i64, vda: Valuation, n: i64) -> Result<DerivMatrix, KernelError> {
    if n < 0 {
        return Err(KernelError::NegativeN(n));
    }
    let base = DerivMatrix::params(sum_bc, vda).validate(false)?;
    let rows = n + base.theta() / 2 + 2;
    let mut entries = Vec::with_capacity(rows as usize);
    for i in 0..rows {
        let row = (0..=n)
            .map(|r| derivative_closed_form(&base.with_r(r).with_ve(i)))
            .collect::<Result<Vec<_>, _>>()?;
        entries.push(row);
    }
    Ok(DerivMatrix { sum_bc, vda, n, entries })
}

/// `M'_i = M_i - M_{i-1}` and then `M''_i = M'_i - M'_{i-2}`.
pub fn row_reduce(m: &DerivMatrix) -> (DerivMatrix, DerivMatrix) {
    let diff = |rows: &[Vec<QPoly>], step: usize| -> Vec<Vec<QPoly>> {
        (0..rows.len())
            .map(|i| {
                if i < step {
                    rows[i].clone()
                } else {
                    rows[i].iter().zip(&rows[i - step]).map(|(a, b)| a - b).collect()
                }
            })
            .collect()
    };
    let m1 = diff(&m.entries, 1);
    let m2 = diff(&m1, 2);
    (m.with_entries(m1), m.with_entries(m2))
}

/// Result of fraction-free elimination over `Q[q^{+-1}]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub rank: usize,
    /// Original indices of the pivot rows, in pivot order.
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    /// Determinant of the minor on `pivot_rows` (in pivot order) and `pivot_cols`.
    pub minor_det: QPoly,
}

/// Bareiss elimination with exact polynomial division.
pub fn bareiss(m: &[Vec<QPoly>]) -> Result<Elimination, KernelError> {
    let mut a: Vec<Vec<QPoly>> = m.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut perm: Vec<usize> = (0..nrows).collect();
    let mut prev = QPoly::one();
    let mut k = 0;
    let mut pivot_cols = Vec::new();
    for c in 0..ncols {
        if k == nrows {
            break;
        }
        let Some(p) = (k..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(k, p);
        perm.swap(k, p);
        for i in k + 1..nrows {
            for j in c + 1..ncols {
                let num = &(&a[k][c] * &a[i][j]) - &(&a[i][c] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).ok_or(KernelError::InexactDivision)?;
            }
            a[i][c] = QPoly::zero();
        }
        prev = a[k][c].clone();
        pivot_cols.push(c);
        k += 1;
    }
    Ok(Elimination {
        rank: k,
        pivot_rows: perm[..k].to_vec(),
        pivot_cols,
        minor_det: if k == 0 { QPoly::zero() } else { prev },
    })
}

/// Determinant of a square polynomial matrix.
pub fn determinant(m: &[Vec<QPoly>]) -> Result<QPoly, KernelError> {
    let n = m.len();
    let e = bareiss(m)?;
    if e.rank < n {
        return Ok(QPoly::zero());
    }
    // Sign of the row permutation chosen by the elimination.
    let mut perm = e.pivot_rows.clone();
    let mut sign = 1;
    for i in 0..n {
        while perm[i] != i {
            let t = perm[i];
            perm.swap(i, t);
            sign = -sign;
        }
    }
    Ok(e.minor_det.scale_int(sign))
}

/// Closed form of `M''` at `i = r + floor(theta/2) + 1`, negative powers of `q` dropped.
pub fn antidiagonal_closed_form(sum_bc: i64, vda: Valuation, r: i64) -> QPoly {
    let theta = DerivMatrix::params(sum_bc, vda).theta();
    let k = theta / 2;
    let full = if theta % 2 == 1 {
        QPoly::from_int_terms([(r + k, 1), (r + k - 1, -1)])
    } else {
        let vda = vda.finite().expect("even theta has finite v(d-a)");
        QPoly::from_int_terms([
            (r + k, -(sum_bc - 1 - 2 * vda) / 2),
            (r + k - 1, -(sum_bc + 1 - 2 * vda) / 2),
        ])
    };
    full.truncate_below(0)
}

/// The factor whose `(N+1)`-st power the structural determinant takes, up to a monomial.
pub fn determinant_base_factor(sum_bc: i64, vda: Valuation) -> QPoly {
    let theta = DerivMatrix::params(sum_bc, vda).theta();
    if theta % 2 == 1 {
        QPoly::from_int_terms([(1, 1), (0, -1)])
    } else {
        let vda = vda.finite().expect("even theta has finite v(d-a)");
        QPoly::from_int_terms([(1, (sum_bc - 1 - 2 * vda) / 2), (0, (sum_bc + 1 - 2 * vda) / 2)])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub sum_bc: i64,
    pub vda: Valuation,
    pub n: i64,
    pub full_rank: bool,
    pub elimination: Elimination,
    /// `minor_det` evaluated at `q = 3, 5, 7`.
    pub spot_checks: Vec<(i64, String)>,
    pub spot_checks_nonzero: bool,
    /// `M''_{i,r} = 0` for every `i >= r + floor(theta/2) + 2`.
    pub zero_below_antidiagonal: bool,
    /// `M''` on the anti-diagonal matches the closed form.
    pub antidiagonal_matches: bool,
    /// Rows of the upper-triangular submatrix of `M''` (row 0 replaces a vanishing first pivot).
    pub structural_rows: Vec<usize>,
    pub structural_det: QPoly,
    /// Each structural pivot is a monomial times the base factor, or a nonzero constant at the edge.
    pub det_shape_ok: bool,
}

impl RankCertificate {
    pub fn pass(&self) -> bool {
        self.full_rank
            && self.spot_checks_nonzero
            && self.zero_below_antidiagonal
            && self.antidiagonal_matches
            && self.det_shape_ok
    }
}

fn is_monomial_multiple(d: &QPoly, base: &QPoly) -> bool {
    d.div_exact(base).is_some_and(|m| m.is_monomial())
}

pub fn certify_full_rank(m: &DerivMatrix) -> Result<RankCertificate, KernelError> {
    let cols = m.cols();
    let elimination = bareiss(&m.entries)?;
    let full_rank = elimination.rank == cols;
    let spot_checks: Vec<(i64, BigRational)> = [3, 5, 7]
        .iter()
        .map(|&x| (x, elimination.minor_det.eval_int(x).unwrap_or_else(BigRational::zero)))
        .collect();
    let spot_checks_nonzero = full_rank && spot_checks.iter().all(|(_, v)| !v.is_zero());

    let (_, m2) = row_reduce(m);
    let k = (m.theta() / 2) as usize;
    let zero_below_antidiagonal = (0..m.rows())
        .all(|i| (0..cols).all(|r| i < r + k + 2 || m2.entry(i, r).is_zero()));
    let antidiagonal_matches = (0..cols).all(|r| {
        *m2.entry(r + k + 1, r) == antidiagonal_closed_form(m.sum_bc, m.vda, r as i64)
    });

    let base = determinant_base_factor(m.sum_bc, m.vda);
    let mut structural_rows = Vec::with_capacity(cols);
    let mut det_shape_ok = true;
    for r in 0..cols {
        let mut row = r + k + 1;
        if r == 0 && m2.entry(row, 0).is_zero() {
            row = 0;
        }
        let d = m2.entry(row, r);
        let at_edge = row == 0 || (r == 0 && k == 0);
        det_shape_ok &= if at_edge {
            d.len() == 1 && d.degree() == Some(0)
        } else {
            is_monomial_multiple(d, &base)
        };
        structural_rows.push(row);
    }
    let sub: Vec<Vec<QPoly>> = structural_rows.iter().map(|&i| m2.entries[i].clone()).collect();
    let structural_det = determinant(&sub)?;
    let diag_product = (0..cols).fold(QPoly::one(), |acc, r| &acc * &sub[r][r]);
    det_shape_ok &= structural_det == diag_product && !structural_det.is_zero();

    Ok(RankCertificate {
        sum_bc: m.sum_bc,
        vda: m.vda,
        n: m.n,
        full_rank,
        spot_checks: spot_checks.into_iter().map(|(x, v)| (x, v.to_string())).collect(),
        spot_checks_nonzero,
        elimination,
        zero_below_antidiagonal,
        antidiagonal_matches,
        structural_rows,
        structural_det,
        det_shape_ok,
    })
}

/// Value of a combination that should vanish, with whether vanishing is asserted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub params: OrbitalParams,
    pub value: QPoly,
    pub asserted: bool,
    pub pass: bool,
}

impl VanishingReport {
    fn new(params: OrbitalParams, value: QPoly, asserted: bool) -> Self {
        let pass = !asserted || value.is_zero();
        Self { params, value, asserted, pass }
    }
}

/// `dOrb(1_{<=r} + 2 * 1_{<=r-1} + 1_{<=r-2})`, asserted zero for `r >= v(e) + 2`.
pub fn test_large_r_vanishing(p: &OrbitalParams) -> Result<VanishingReport, KernelError> {
    let v = HeckeVector::from_int_terms([(p.r, 1), (p.r - 1, 2), (p.r - 2, 1)]);
    let value = derivative_of_vector(p, &v)?;
    Ok(VanishingReport::new(*p, value, p.r >= p.ve + 2))
}

/// `phi_r = 1_{<=r} + 1_{<=r-1} - q^2 (1_{<=r-2} + 1_{<=r-3})`.
pub fn phi(r: i64) -> HeckeVector {
    let q2 = QPoly::monomial(-1, 2);
    HeckeVector::from_terms([(r, QPoly::one()), (r - 1, QPoly::one()), (r - 2, q2.clone()), (r - 3, q2)])
}

/// `phi_r + (q+1) phi_{r-1} + q phi_{r-2}`.
pub fn phi_combination(r: i64) -> HeckeVector {
    let mut v = phi(r);
    v.add_vector(&phi(r - 1), &QPoly::from_int_terms([(1, 1), (0, 1)]));
    v.add_vector(&phi(r - 2), &QPoly::q());
    v
}

/// The three exceptional values `v(e) - min((s-1)/2, v(d-a)) + 2 ..= + 4`.
pub fn phi_exceptional_window(p: &OrbitalParams) -> (i64, i64) {
    let m = p.vda.min_plus(0, (p.sum_bc() - 1) / 2);
    let lo = p.ve - m + 2;
    (lo, lo + 2)
}

pub fn test_phi_sequence(p: &OrbitalParams, r: i64) -> Result<VanishingReport, KernelError> {
    if r < 5 {
        return Err(KernelError::RTooSmall { r, min: 5 });
    }
    let value = derivative_of_vector(p, &phi_combination(r))?;
    let (lo, hi) = phi_exceptional_window(p);
    Ok(VanishingReport::new(p.with_r(r), value, !(lo..=hi).contains(&r)))
}
