//! JSON DSL for growth functions.
//!
//! ```json
//! {
//!   "label": "t^4",
//!   "pieces": [
//!     {"from": 0, "to": "inf", "kind": "power", "coeffs": [1.0, 4.0]}
//!   ],
//!   "T0": "inf"
//! }
//! ```
//!
//! Kinds and their coefficient lists:
//!
//! * `constant`: `[c]`
//! * `linear`: `[intercept, slope]`
//! * `power`: `[coeff, exponent]` or `[coeff, exponent, offset]`
//! * `logpow`: `[coeff, power, base, log_exp]` with optional
//!   `[..., inner, offset]`
//! * `exp`: `[coeff, rate, exponent]` or `[..., offset]`
//! * `tabulated`: `[t0, v0, t1, v1, ...]` (extension kind)
//!
//! Optional top-level fields `end_value`, `origin_value` and
//! `infinity_value` set the point overrides. The loader always
//! validates tiling and the `[0, ∞]` range; monotonicity is validated
//! under [`MonotonePolicy::Require`] and merely recorded under
//! [`MonotonePolicy::Allow`].

use serde::Deserialize;
use serde_json::Value;

use super::{GrowthError, GrowthFunction, Piece, PieceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotonePolicy {
    /// Reject non-monotone functions (the default loader behavior).
    Require,
    /// Accept them; the sharpness dispatcher feeds on such inputs.
    Allow,
}

#[derive(Deserialize)]
struct SpecJson {
    label: String,
    pieces: Vec<PieceJson>,
    #[serde(rename = "T0")]
    t0: NumOrInf,
    #[serde(default)]
    end_value: Option<f64>,
    #[serde(default)]
    origin_value: Option<f64>,
    #[serde(default)]
    infinity_value: Option<NumOrInf>,
}

#[derive(Deserialize)]
struct PieceJson {
    from: f64,
    to: NumOrInf,
    kind: String,
    coeffs: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrInf {
    Num(f64),
    Word(String),
}

impl NumOrInf {
    fn value(&self, field: &str) -> Result<f64, GrowthError> {
        match self {
            NumOrInf::Num(x) => Ok(*x),
            NumOrInf::Word(w) if w == "inf" => Ok(f64::INFINITY),
            NumOrInf::Word(w) => Err(GrowthError::Spec(format!(
                "field {field}: expected a number or \"inf\", got \"{w}\""
            ))),
        }
    }
}

pub fn from_json_str(s: &str, policy: MonotonePolicy) -> Result<GrowthFunction, GrowthError> {
    let spec: SpecJson = serde_json::from_str(s)
        .map_err(|e| GrowthError::Spec(format!("JSON parse error: {e}")))?;
    build(spec, policy)
}

fn build(spec: SpecJson, policy: MonotonePolicy) -> Result<GrowthFunction, GrowthError> {
    let mut pieces = Vec::with_capacity(spec.pieces.len());
    for (i, pj) in spec.pieces.iter().enumerate() {
        let to = pj.to.value(&format!("pieces[{i}].to"))?;
        let kind = parse_kind(i, &pj.kind, &pj.coeffs)?;
        pieces.push(Piece::new(pj.from, to, kind));
    }
    let t0 = spec.t0.value("T0")?;
    let mut g = GrowthFunction::new(spec.label, pieces, t0)?;
    if let Some(v) = spec.origin_value {
        g = g.with_origin_value(v);
    }
    if let Some(v) = spec.end_value {
        g = g.with_end_value(v);
    }
    if let Some(v) = spec.infinity_value {
        g = g.with_infinity_value(v.value("infinity_value")?);
    }
    if policy == MonotonePolicy::Require && !g.is_nondecreasing() {
        return Err(GrowthError::Spec(
            "function is not nondecreasing (dense sampling found a decrease)".into(),
        ));
    }
    Ok(g)
}

fn parse_kind(i: usize, kind: &str, c: &[f64]) -> Result<PieceKind, GrowthError> {
    let want = |n: usize, or: usize| -> Result<(), GrowthError> {
        if c.len() == n || (or > 0 && c.len() == or) || (or == 0 && c.len() == n) {
            Ok(())
        } else {
            Err(GrowthError::Spec(format!(
                "pieces[{i}] kind {kind}: expected {n}{} coefficients, got {}",
                if or > 0 {
                    format!(" or {or}")
                } else {
                    String::new()
                },
                c.len()
            )))
        }
    };
    match kind {
        "constant" => {
            want(1, 0)?;
            Ok(PieceKind::Constant(c[0]))
        }
        "linear" => {
            want(2, 0)?;
            Ok(PieceKind::Linear {
                intercept: c[0],
                slope: c[1],
            })
        }
        "power" => {
            if c.len() != 2 && c.len() != 3 {
                return Err(GrowthError::Spec(format!(
                    "pieces[{i}] kind power: expected 2 or 3 coefficients, got {}",
                    c.len()
                )));
            }
            Ok(PieceKind::Power {
                coeff: c[0],
                exponent: c[1],
                offset: c.get(2).copied().unwrap_or(0.0),
            })
        }
        "logpow" => {
            if !(4..=6).contains(&c.len()) {
                return Err(GrowthError::Spec(format!(
                    "pieces[{i}] kind logpow: expected 4 to 6 coefficients, got {}",
                    c.len()
                )));
            }
            Ok(PieceKind::LogPower {
                coeff: c[0],
                power: c[1],
                base: c[2],
                log_exp: c[3],
                inner: c.get(4).copied().unwrap_or(1.0),
                offset: c.get(5).copied().unwrap_or(0.0),
            })
        }
        "exp" => {
            if c.len() != 3 && c.len() != 4 {
                return Err(GrowthError::Spec(format!(
                    "pieces[{i}] kind exp: expected 3 or 4 coefficients, got {}",
                    c.len()
                )));
            }
            Ok(PieceKind::ExpPower {
                coeff: c[0],
                rate: c[1],
                exponent: c[2],
                offset: c.get(3).copied().unwrap_or(0.0),
            })
        }
        "tabulated" => {
            if c.len() < 4 || c.len() % 2 != 0 {
                return Err(GrowthError::Spec(format!(
                    "pieces[{i}] kind tabulated: need an even number (≥ 4) of interleaved t/value coefficients"
                )));
            }
            let ts: Vec<f64> = c.iter().step_by(2).copied().collect();
            let values: Vec<f64> = c.iter().skip(1).step_by(2).copied().collect();
            Ok(PieceKind::Tabulated { ts, values })
        }
        other => Err(GrowthError::Spec(format!(
            "pieces[{i}]: unknown kind \"{other}\" (expected power, linear, constant, logpow, exp or tabulated)"
        ))),
    }
}

pub fn to_json_value(g: &GrowthFunction) -> Value {
    fn num_or_inf(x: f64) -> Value {
        if x.is_finite() {
            Value::from(x)
        } else {
            Value::from("inf")
        }
    }
    let pieces: Vec<Value> = g
        .pieces()
        .iter()
        .map(|p| {
            let (kind, coeffs): (&str, Vec<f64>) = match &p.kind {
                PieceKind::Constant(c) => ("constant", vec![*c]),
                PieceKind::Linear { intercept, slope } => ("linear", vec![*intercept, *slope]),
                PieceKind::Power {
                    coeff,
                    exponent,
                    offset,
                } => ("power", vec![*coeff, *exponent, *offset]),
                PieceKind::ShiftedPower {
                    coeff,
                    inner,
                    shift,
                    outer,
                    offset,
                } => ("shifted_power", vec![*coeff, *inner, *shift, *outer, *offset]),
                PieceKind::LogPower {
                    coeff,
                    power,
                    base,
                    log_exp,
                    inner,
                    offset,
                } => ("logpow", vec![*coeff, *power, *base, *log_exp, *inner, *offset]),
                PieceKind::ExpPower {
                    coeff,
                    rate,
                    exponent,
                    offset,
                } => ("exp", vec![*coeff, *rate, *exponent, *offset]),
                PieceKind::Tabulated { ts, values } => (
                    "tabulated",
                    ts.iter()
                        .zip(values)
                        .flat_map(|(t, v)| [*t, *v])
                        .collect(),
                ),
            };
            serde_json::json!({
                "from": p.lo,
                "to": num_or_inf(p.hi),
                "kind": kind,
                "coeffs": coeffs,
            })
        })
        .collect();
    serde_json::json!({
        "label": g.label(),
        "pieces": pieces,
        "T0": num_or_inf(g.domain_end()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_power_spec() {
        let g = from_json_str(
            r#"{"label":"t^4","pieces":[{"from":0,"to":"inf","kind":"power","coeffs":[1,4]}],"T0":"inf"}"#,
            MonotonePolicy::Require,
        )
        .unwrap();
        assert_eq!(g.evaluate(2.0), 16.0);
        assert_eq!(g.label(), "t^4");
    }

    #[test]
    fn tiling_violation_is_diagnosed() {
        let err = from_json_str(
            r#"{"label":"bad","pieces":[{"from":0,"to":1,"kind":"constant","coeffs":[0]},
                {"from":2,"to":"inf","kind":"linear","coeffs":[0,1]}],"T0":"inf"}"#,
            MonotonePolicy::Require,
        );
        assert!(matches!(err, Err(GrowthError::Spec(_))));
    }

    #[test]
    fn monotone_policy_is_enforced() {
        let decreasing = r#"{"label":"dec","pieces":[
            {"from":0,"to":1,"kind":"constant","coeffs":[5]},
            {"from":1,"to":2,"kind":"linear","coeffs":[10,-5]},
            {"from":2,"to":"inf","kind":"linear","coeffs":[-2,1]}],"T0":"inf"}"#;
        assert!(from_json_str(decreasing, MonotonePolicy::Require).is_err());
        let g = from_json_str(decreasing, MonotonePolicy::Allow).unwrap();
        assert!(!g.is_nondecreasing());
    }

    #[test]
    fn finite_domain_end_with_value() {
        let g = from_json_str(
            r#"{"label":"jump","pieces":[{"from":0,"to":"inf","kind":"linear","coeffs":[0,1]}],
               "T0":2.0,"end_value":10.0}"#,
            MonotonePolicy::Require,
        )
        .unwrap();
        assert_eq!(g.evaluate(1.9), 1.9);
        assert_eq!(g.evaluate(2.0), 10.0);
        assert_eq!(g.evaluate(2.1), f64::INFINITY);
    }
}
