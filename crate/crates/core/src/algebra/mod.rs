//! Exact rational arithmetic on Laurent polynomials in `q` and series in `T = q^s`.

mod json;
mod qpoly;
mod series;

pub use json::{rational_from_json, rational_to_json};
pub(crate) use json::serde_via_json;
pub use qpoly::{rat, ratio, QPoly};
pub use series::{series_at_one, series_log_derivative_at_zero, LaurentSeries, SeriesTally};

/// `(-1)^k` as an integer.
pub fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}
