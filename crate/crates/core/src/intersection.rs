//! Gross–Keating intersection numbers and their comparison with orbital derivatives.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{ratio, sign, QPoly};
use crate::orbital::{
    derivative_closed_form, derivative_combo, derivative_of_vector, transfer_factor, HeckeVector,
    OrbitalParams, ParamError, Valuation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntersectionError {
    #[error("Gross-Keating invariants need n1 <= n2 (got n1 = {n1}, n2 = {n2})")]
    Unordered { n1: i64, n2: i64 },
    #[error("v(e) = {0} must be nonnegative here")]
    NegativeVe(i64),
    #[error("the clean formula needs r >= 1 and v(e) >= 1 (got r = {r}, v(e) = {ve})")]
    CleanFormulaRange { r: i64, ve: i64 },
    #[error(transparent)]
    Params(#[from] ParamError),
}

/// Gross–Keating invariants; `n1 < 0` encodes the empty divisor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GkPair {
    pub n1: i64,
    pub n2: i64,
}

impl GkPair {
    pub const EMPTY: GkPair = GkPair { n1: -1, n2: -1 };

    pub fn is_empty(&self) -> bool {
        self.n1 < 0
    }
}

pub fn gross_keating(g: GkPair) -> Result<QPoly, IntersectionError> {
    let GkPair { n1, n2 } = g;
    if n1 < 0 {
        return Ok(QPoly::zero());
    }
    if n2 < n1 {
        return Err(IntersectionError::Unordered { n1, n2 });
    }
    let main = |upto: i64| QPoly::from_int_terms((0..upto).map(|j| (j, n1 + n2 - 4 * j)));
    if n1 % 2 == 1 {
        Ok(main((n1 + 1) / 2))
    } else {
        let mut p = main(n1 / 2);
        p.add_term(n1 / 2, ratio(n2 - n1 + 1, 2));
        Ok(p)
    }
}

pub fn gk_from_params(p: &OrbitalParams) -> GkPair {
    if p.ve < 0 {
        return GkPair::EMPTY;
    }
    let total = 2 * p.ve + p.sum_bc() + 2 * p.r;
    let mut n1 = (2 * p.ve).min(p.sum_bc() + 2 * p.r);
    if let Some(v) = p.vda.finite() {
        n1 = n1.min(2 * v + 2 * p.r);
    }
    GkPair { n1, n2: total - n1 }
}

fn gk_at(p: &OrbitalParams) -> Result<QPoly, IntersectionError> {
    p.validate(true)?;
    gross_keating(gk_from_params(p))
}

/// `Int°((g,u), 1_{K,<=r}) = GK(v(e)) - GK(v(e)-1)`.
pub fn int_circ(p: &OrbitalParams) -> Result<QPoly, IntersectionError> {
    if p.ve < 0 {
        return Err(IntersectionError::NegativeVe(p.ve));
    }
    Ok(gk_at(p)? - gk_at(&p.with_ve(p.ve - 1))?)
}

/// `Int((g,u), 1_{K,<=r}) = sum_i Int°` over `u / pi^i`, i.e. `v(e)` dropping by two.
pub fn int_total(p: &OrbitalParams) -> Result<QPoly, IntersectionError> {
    if p.ve < 0 {
        return Err(IntersectionError::NegativeVe(p.ve));
    }
    let mut acc = QPoly::zero();
    let mut ve = p.ve;
    while ve >= 0 {
        acc += &int_circ(&p.with_ve(ve))?;
        ve -= 2;
    }
    Ok(acc)
}

/// Closed formula for `Int°((g,u), 1_{K,r})` with `r >= 1`, `v(e) >= 1`.
pub fn int_circ_kr_closed(p: &OrbitalParams) -> Result<QPoly, IntersectionError> {
    p.validate(false)?;
    if p.r < 1 || p.ve < 1 {
        return Err(IntersectionError::CleanFormulaRange { r: p.r, ve: p.ve });
    }
    let half = (p.sum_bc() - 1) / 2;
    let n = p.big_n();
    Ok(match p.vda.finite() {
        Some(vda) if p.ve - p.r == vda && vda <= half => {
            let c = (p.sum_bc() - 2 * vda - 1) / 2;
            QPoly::from_int_terms([(n, c + 1), (n - 1, c + 2)])
        }
        _ if half + p.r < p.vda.min_plus(p.r, p.ve) => QPoly::monomial(2, n),
        _ => QPoly::from_int_terms([(n, 1), (n - 1, 1)]),
    })
}

/// Valuations of the geometric data `(u, g)`: `v(Nm u)`, `v(beta)`, `v(alpha - alpha-bar)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricParams {
    pub v_nm_u: i64,
    pub v_beta: i64,
    pub v_alpha_diff: Valuation,
}

/// The orbital valuations determined by the geometric side; `v(b)` and `v(c)` only through their sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedValuations {
    pub sum_bc: i64,
    pub ve: i64,
    pub vda: Valuation,
}

impl MatchedValuations {
    /// Any split `v(b) + v(c) = sum_bc`; the derivative side depends only on the sum.
    pub fn complete(self, r: i64, vb: i64) -> OrbitalParams {
        OrbitalParams::new(r, vb, self.sum_bc - vb, self.ve, self.vda)
    }
}

pub fn geom_to_orbital(g: GeometricParams) -> MatchedValuations {
    MatchedValuations {
        sum_bc: 2 * g.v_beta + 1,
        ve: g.v_nm_u,
        vda: g.v_alpha_diff,
    }
}

/// The clean intersection formula phrased purely in geometric valuations.
pub fn clean_intersection_geometric(g: GeometricParams, r: i64) -> Result<QPoly, IntersectionError> {
    if r < 1 || g.v_nm_u < 1 {
        return Err(IntersectionError::CleanFormulaRange { r, ve: g.v_nm_u });
    }
    let n = g.v_nm_u.min(g.v_beta + r);
    let n = g.v_alpha_diff.min_plus(r, n);
    Ok(match g.v_alpha_diff.finite() {
        Some(a) if g.v_nm_u - r == a && a <= g.v_beta => {
            let c = g.v_beta - a;
            QPoly::from_int_terms([(n, c + 1), (n - 1, c + 2)])
        }
        _ if g.v_beta + r < g.v_alpha_diff.min_plus(r, g.v_nm_u) => QPoly::monomial(2, n),
        _ => QPoly::from_int_terms([(n, 1), (n - 1, 1)]),
    })
}

/// Outcome of comparing two sides of an identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub params: OrbitalParams,
    pub lhs: QPoly,
    pub rhs: QPoly,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(params: OrbitalParams, lhs: QPoly, rhs: QPoly) -> Self {
        let pass = lhs == rhs;
        Self { params, lhs, rhs, pass }
    }
}

/// `GK(p) == D(v(e)) + D(v(e)-1)`.
pub fn verify_miracle(p: &OrbitalParams) -> Result<IdentityReport, IntersectionError> {
    let lhs = gk_at(p)?;
    let rhs = derivative_closed_form(p)? + derivative_closed_form(&p.with_ve(p.ve - 1))?;
    Ok(IdentityReport::new(*p, lhs, rhs))
}

/// `Int = (-1)^{v(c)+r}/log q * dOrb(1_{<=r})`.
pub fn verify_int_total(p: &OrbitalParams) -> Result<IdentityReport, IntersectionError> {
    Ok(IdentityReport::new(*p, int_total(p)?, derivative_closed_form(p)?))
}

/// `Int((g,u), (-1)^r (1_{K,<=r} - 1_{K,<=r-1})) == -omega/log q * dOrb(1_{<=r} + 1_{<=r-1})`.
///
/// The right side is evaluated through the basis expansion, independently of the combo formula,
/// and the combo formula is checked against it as well.
pub fn verify_afl(p: &OrbitalParams) -> Result<IdentityReport, IntersectionError> {
    let sg = sign(p.r);
    let lhs = (int_total(p)? - int_total(&p.with_r(p.r - 1))?).scale_int(sg);
    let d_orb = derivative_of_vector(p, &HeckeVector::from_int_terms([(p.r, 1), (p.r - 1, 1)]))?;
    let rhs = d_orb.scale_int(-transfer_factor(p));
    let via_combo = derivative_combo(p)?.scale_int(sg);
    let mut report = IdentityReport::new(*p, lhs, rhs);
    report.pass &= report.rhs == via_combo;
    Ok(report)
}

/// `Int°(1_{K,r})` by closed formula versus the Gross–Keating difference.
pub fn verify_clean_intersection(p: &OrbitalParams) -> Result<IdentityReport, IntersectionError> {
    let lhs = int_circ_kr_closed(p)?;
    let rhs = int_circ(p)? - int_circ(&p.with_r(p.r - 1))?;
    Ok(IdentityReport::new(*p, lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gk(n1: i64, n2: i64) -> QPoly {
        gross_keating(GkPair { n1, n2 }).unwrap()
    }

    fn p(r: i64, vb: i64, vc: i64, ve: i64, vda: i64) -> OrbitalParams {
        OrbitalParams::new(r, vb, vc, ve, vda)
    }

    #[test]
    fn gk_values() {
        assert_eq!(gk(1, 1), QPoly::constant(2));
        assert_eq!(gk(2, 3), QPoly::from_int_terms([(1, 1), (0, 5)]));
        assert_eq!(gk(0, 5), QPoly::constant(3));
        assert!(gk(-1, -1).is_zero());
        assert_eq!(
            gross_keating(GkPair { n1: 3, n2: 2 }),
            Err(IntersectionError::Unordered { n1: 3, n2: 2 })
        );
    }

    #[test]
    fn gk_translation() {
        assert_eq!(gk_from_params(&p(0, 0, 3, 1, 1)), GkPair { n1: 2, n2: 3 });
        assert_eq!(gk_from_params(&p(1, 0, 3, 0, 0)), GkPair { n1: 0, n2: 5 });
        assert!(gk_from_params(&p(0, 0, 1, -1, 0)).is_empty());
        let inf = OrbitalParams::new(2, 1, 4, 9, Valuation::Infinite);
        let g = gk_from_params(&inf);
        assert_eq!(g.n1, 9);
        assert_eq!(g.n1 + g.n2, 2 * 9 + 5 + 4);
    }

    #[test]
    fn int_circ_examples() {
        assert_eq!(int_circ(&p(0, 0, 3, 1, 1)).unwrap(), QPoly::from_int_terms([(1, 1), (0, 3)]));
        assert_eq!(int_circ(&p(1, 0, 3, 0, 0)).unwrap(), QPoly::constant(3));
        assert!(int_circ(&p(1, 0, 3, -1, 0)).is_err());
    }

    #[test]
    fn int_total_examples() {
        assert_eq!(int_total(&p(0, 0, 3, 1, 1)).unwrap(), QPoly::from_int_terms([(1, 1), (0, 3)]));
        assert_eq!(int_total(&p(0, 0, 1, 0, 0)).unwrap(), QPoly::one());
    }

    #[test]
    fn clean_formula_cases() {
        let first = p(1, 0, 3, 1, 0);
        assert_eq!(int_circ_kr_closed(&first).unwrap(), QPoly::from_int_terms([(1, 2), (0, 3)]));
        let second = p(1, 0, 1, 3, 1);
        assert_eq!(int_circ_kr_closed(&second).unwrap(), QPoly::monomial(2, 1));
        let third = p(1, 0, 5, 1, 3);
        assert_eq!(int_circ_kr_closed(&third).unwrap(), QPoly::from_int_terms([(1, 1), (0, 1)]));
        for q in [first, second, third] {
            assert!(verify_clean_intersection(&q).unwrap().pass, "{q}");
        }
    }

    #[test]
    fn geometric_translation() {
        let m = geom_to_orbital(GeometricParams { v_nm_u: 1, v_beta: 1, v_alpha_diff: 1.into() });
        assert_eq!((m.sum_bc, m.ve, m.vda), (3, 1, Valuation::Finite(1)));
        let m = geom_to_orbital(GeometricParams { v_nm_u: 0, v_beta: 0, v_alpha_diff: Valuation::Infinite });
        assert_eq!((m.sum_bc, m.ve, m.vda), (1, 0, Valuation::Infinite));
    }

    #[test]
    fn miracle_examples() {
        let r = verify_miracle(&p(0, 0, 3, 1, 1)).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs, QPoly::from_int_terms([(1, 1), (0, 5)]));
        assert!(verify_miracle(&p(0, 0, 1, 0, 0)).unwrap().pass);
    }
}
