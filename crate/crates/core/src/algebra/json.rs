//! JSON shapes: `{"q_terms": [[exp, num, den], ...]}` and
//! `{"t_terms": [[k, {"q_terms": ...}], ...]}`, exponents ascending.

use num::{BigInt, BigRational, ToPrimitive, Zero};
use serde_json::Value;

use super::{LaurentSeries, QPoly};

/// Integer written as a JSON number when it fits in `i64`, otherwise as a decimal string.
pub(crate) fn int_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

pub(crate) fn int_from_json(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub fn rational_to_json(c: &BigRational) -> Value {
    Value::Array(vec![int_to_json(c.numer()), int_to_json(c.denom())])
}

pub fn rational_from_json(v: &Value) -> Option<BigRational> {
    let arr = v.as_array()?;
    if arr.len() != 2 {
        return None;
    }
    let den = int_from_json(&arr[1])?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(int_from_json(&arr[0])?, den))
}

impl QPoly {
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(e, c)| {
                Value::Array(vec![Value::from(e), int_to_json(c.numer()), int_to_json(c.denom())])
            })
            .collect();
        serde_json::json!({ "q_terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let terms = v
            .get("q_terms")
            .and_then(Value::as_array)
            .ok_or("expected object with a \"q_terms\" array")?;
        let mut p = QPoly::zero();
        for t in terms {
            let arr = t.as_array().filter(|a| a.len() == 3).ok_or("q_terms entry must be [exp, num, den]")?;
            let e = arr[0].as_i64().ok_or("exponent must be an integer")?;
            let num = int_from_json(&arr[1]).ok_or("bad numerator")?;
            let den = int_from_json(&arr[2]).ok_or("bad denominator")?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            p.add_term(e, BigRational::new(num, den));
        }
        Ok(p)
    }
}

impl LaurentSeries {
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(k, c)| Value::Array(vec![Value::from(k), c.to_json()]))
            .collect();
        serde_json::json!({ "t_terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let terms = v
            .get("t_terms")
            .and_then(Value::as_array)
            .ok_or("expected object with a \"t_terms\" array")?;
        let mut s = LaurentSeries::zero();
        for t in terms {
            let arr = t.as_array().filter(|a| a.len() == 2).ok_or("t_terms entry must be [k, q_poly]")?;
            let k = arr[0].as_i64().ok_or("T exponent must be an integer")?;
            s.add_term(k, &QPoly::from_json(&arr[1])?);
        }
        Ok(s)
    }
}

macro_rules! serde_via_json {
    ($t:ty) => {
        impl ::serde::Serialize for $t {
            fn serialize<S: ::serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
                ::serde::Serialize::serialize(&self.to_json(), ser)
            }
        }
        impl<'de> ::serde::Deserialize<'de> for $t {
            fn deserialize<D: ::serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
                let v = <::serde_json::Value as ::serde::Deserialize>::deserialize(de)?;
                <$t>::from_json(&v).map_err(<D::Error as ::serde::de::Error>::custom)
            }
        }
    };
}
pub(crate) use serde_via_json;

serde_via_json!(QPoly);
serde_via_json!(LaurentSeries);
