//! Wire formats: matrices and polynomials as arrays of decimal integer
//! strings, rationals as `"p/q"` strings, enclosures as decimal endpoint
//! pairs. Every numeric in an output document is either exact (a rational
//! string) or an enclosure; bare floats appear only for Monte-Carlo
//! estimates, which carry their standard error.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exact::{IntMatrix, IntPolynomial, RealInterval, UnimodularMatrix};
use crate::spectrum::ZlAction;
use crate::toral::{CRational, TrigPolynomial};

pub fn bigint_from_str(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| Error::validation(format!("not a decimal integer: {:?}", s)))
}

/// Accepts `"p/q"`, plain integers, and decimal notation like `"0.125"`.
pub fn rational_from_str(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Some((num, den)) = t.split_once('/') {
        let d = bigint_from_str(den)?;
        if d.is_zero() {
            return Err(Error::validation("zero denominator"));
        }
        return Ok(BigRational::new(bigint_from_str(num)?, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let digits = frac_part.len() as u32;
        let scale = BigInt::from(10u32).pow(digits);
        let neg = int_part.starts_with('-');
        let ip = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            bigint_from_str(int_part)?
        };
        let fp = if frac_part.is_empty() { BigInt::zero() } else { bigint_from_str(frac_part)? };
        if fp.is_negative() {
            return Err(Error::validation("malformed decimal"));
        }
        let magnitude = ip.abs() * &scale + fp;
        let signed = if neg { -magnitude } else { magnitude };
        return Ok(BigRational::new(signed, scale));
    }
    Ok(BigRational::from(bigint_from_str(t)?))
}

pub fn rational_to_string(q: &BigRational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn interval_to_json(iv: &RealInterval) -> Value {
    let (lo, hi) = iv.endpoints_dec();
    json!({ "lo": lo, "hi": hi })
}

pub fn crational_to_json(c: &CRational) -> Value {
    json!({ "re": rational_to_string(&c.re), "im": rational_to_string(&c.im) })
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::validation(format!("{} must be a string", what)))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::validation(format!("{} must be an array", what)))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::validation(format!("{} must be an object", what)))
}

pub fn get<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    as_object(obj, "document")?
        .get(key)
        .ok_or_else(|| Error::validation(format!("missing field {:?}", key)))
}

pub fn i64_from(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::validation(format!("{} must be an integer", what)))
}

pub fn ivec_from(v: &Value, what: &str) -> Result<Vec<i64>> {
    as_array(v, what)?.iter().map(|x| i64_from(x, what)).collect()
}

/// `{ "rank": l, "generators": [[["2","1"],["1","1"]], ...] }`
pub fn action_from_json(v: &Value) -> Result<ZlAction> {
    let rank = i64_from(get(v, "rank")?, "rank")? as usize;
    let gens_json = as_array(get(v, "generators")?, "generators")?;
    if gens_json.len() != rank {
        return Err(Error::validation("generator count differs from rank"));
    }
    let mut gens = Vec::with_capacity(rank);
    for g in gens_json {
        let rows = as_array(g, "generator")?;
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            let cells = as_array(row, "generator row")?;
            if cells.len() != dim {
                return Err(Error::validation("generator matrix is not square"));
            }
            for c in cells {
                entries.push(bigint_from_str(as_str(c, "matrix entry")?)?);
            }
        }
        gens.push(UnimodularMatrix::new(IntMatrix::new(dim, entries)?)?);
    }
    ZlAction::new(gens)
}

pub fn action_to_json(a: &ZlAction) -> Value {
    let gens: Vec<Value> = a
        .generators()
        .iter()
        .map(|g| {
            let d = g.dim();
            let rows: Vec<Value> = (0..d)
                .map(|r| {
                    Value::Array(
                        (0..d).map(|c| Value::String(g.at(r, c).to_string())).collect(),
                    )
                })
                .collect();
            Value::Array(rows)
        })
        .collect();
    json!({ "rank": a.rank(), "generators": gens })
}

/// `{ "dim": d, "coeffs": [{"freq": [..], "re": "p/q", "im": "p/q"}], "tail": "decimal" }`
pub fn trigpoly_from_json(v: &Value) -> Result<TrigPolynomial> {
    let dim = i64_from(get(v, "dim")?, "dim")? as usize;
    let mut coeffs: BTreeMap<Vec<i64>, CRational> = BTreeMap::new();
    for entry in as_array(get(v, "coeffs")?, "coeffs")? {
        let freq = ivec_from(get(entry, "freq")?, "freq")?;
        let re = rational_from_str(as_str(get(entry, "re")?, "re")?)?;
        let im = match as_object(entry, "coefficient")?.get("im") {
            Some(x) => rational_from_str(as_str(x, "im")?)?,
            None => BigRational::zero(),
        };
        let c = CRational::new(re, im);
        let prev = coeffs.insert(freq, c);
        if prev.is_some() {
            return Err(Error::validation("duplicate frequency in coefficient list"));
        }
    }
    let tail = match as_object(v, "function")?.get("tail") {
        Some(t) => rational_from_str(as_str(t, "tail")?)?,
        None => BigRational::zero(),
    };
    TrigPolynomial::with_tail(dim, coeffs, tail)
}

pub fn trigpoly_to_json(f: &TrigPolynomial) -> Value {
    let coeffs: Vec<Value> = f
        .coeffs()
        .iter()
        .map(|(k, c)| {
            json!({
                "freq": k,
                "re": rational_to_string(&c.re),
                "im": rational_to_string(&c.im),
            })
        })
        .collect();
    json!({
        "dim": f.dim(),
        "coeffs": coeffs,
        "tail": rational_to_string(f.tail_bound()),
    })
}

/// Polynomial as ascending coefficient strings.
pub fn poly_from_json(v: &Value) -> Result<IntPolynomial> {
    let coeffs: Vec<BigInt> = as_array(v, "polynomial")?
        .iter()
        .map(|c| bigint_from_str(as_str(c, "coefficient")?))
        .collect::<Result<_>>()?;
    Ok(IntPolynomial::new(coeffs))
}

pub fn poly_to_json(p: &IntPolynomial) -> Value {
    Value::Array(p.coeffs().iter().map(|c| Value::String(c.to_string())).collect())
}

pub fn rationals_from_json(v: &Value, what: &str) -> Result<Vec<BigRational>> {
    as_array(v, what)?
        .iter()
        .map(|x| rational_from_str(as_str(x, what)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_roundtrip() {
        let v = json!({
            "rank": 1,
            "generators": [[["2", "1"], ["1", "1"]]],
        });
        let a = action_from_json(&v).unwrap();
        assert_eq!(a.dim(), 2);
        let back = action_to_json(&a);
        assert_eq!(v, back);
        // malformed: non-square
        let bad = json!({"rank": 1, "generators": [[["1","0","0"],["0","1","0"]]]});
        assert!(action_from_json(&bad).is_err());
    }

    #[test]
    fn trigpoly_roundtrip() {
        let v = json!({
            "dim": 2,
            "coeffs": [
                {"freq": [-1, 0], "re": "1/2", "im": "1/3"},
                {"freq": [1, 0], "re": "1/2", "im": "-1/3"},
            ],
            "tail": "0.25",
        });
        let f = trigpoly_from_json(&v).unwrap();
        assert_eq!(f.support_size(), 2);
        assert!(f.is_real_valued());
        assert_eq!(*f.tail_bound(), BigRational::new(1.into(), 4.into()));
        let back = trigpoly_to_json(&f);
        let f2 = trigpoly_from_json(&back).unwrap();
        assert_eq!(f, f2);
    }

    #[test]
    fn rational_parsing_forms() {
        assert_eq!(rational_from_str("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(rational_from_str("-7").unwrap(), BigRational::from(BigInt::from(-7)));
        assert_eq!(rational_from_str("0.125").unwrap(), BigRational::new(1.into(), 8.into()));
        assert_eq!(rational_from_str("-2.5").unwrap(), BigRational::new((-5).into(), 2.into()));
        assert!(rational_from_str("1/0").is_err());
        assert!(rational_from_str("abc").is_err());
    }
}
