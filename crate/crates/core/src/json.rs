//! Canonical JSON codec for distribution specs.
//!
//! The format is deliberately strict: exact key sets, unknown keys
//! rejected. Serde's internally-tagged enums cannot combine a tag with
//! `deny_unknown_fields`, so (de)serialization is written by hand on top
//! of `serde_json::Value`.

use serde_json::{json, Map, Value};

use crate::dist::DegreeDistribution;
use crate::error::{Error, Result};
use crate::mixing::MixingDistribution;
use crate::pmf::FinitePmf;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn expect_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| parse_err(format!("{what} must be a JSON object")))
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(parse_err(format!("unknown key {key:?} in {what} spec")));
        }
    }
    for key in allowed {
        if !obj.contains_key(*key) {
            return Err(parse_err(format!("{what} spec is missing key {key:?}")));
        }
    }
    Ok(())
}

fn get_f64(obj: &Map<String, Value>, key: &str, what: &str) -> Result<f64> {
    obj.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| parse_err(format!("{what} spec needs a number at {key:?}")))
}

fn get_u32(obj: &Map<String, Value>, key: &str, what: &str) -> Result<u32> {
    let v = obj
        .get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err(format!("{what} spec needs a nonnegative integer at {key:?}")))?;
    u32::try_from(v).map_err(|_| parse_err(format!("{what} spec value at {key:?} is too large")))
}

fn mixing_from_value(v: &Value) -> Result<MixingDistribution> {
    let obj = expect_object(v, "mixing")?;
    let tag = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err("mixing spec needs a string \"type\""))?;
    match tag {
        "dirac" => {
            check_keys(obj, &["type", "x"], "dirac")?;
            MixingDistribution::dirac(get_f64(obj, "x", "dirac")?)
        }
        "pareto" => {
            check_keys(obj, &["type", "alpha", "scale"], "pareto")?;
            MixingDistribution::pareto(
                get_f64(obj, "alpha", "pareto")?,
                get_f64(obj, "scale", "pareto")?,
            )
        }
        "lognormal" => {
            check_keys(obj, &["type", "location", "scale2"], "lognormal")?;
            MixingDistribution::lognormal(
                get_f64(obj, "location", "lognormal")?,
                get_f64(obj, "scale2", "lognormal")?,
            )
        }
        other => Err(parse_err(format!("unknown mixing type {other:?}"))),
    }
}

pub fn mixing_to_value(m: &MixingDistribution) -> Value {
    match *m {
        MixingDistribution::Dirac { x } => json!({"type": "dirac", "x": x}),
        MixingDistribution::Pareto { alpha, scale } => {
            json!({"type": "pareto", "alpha": alpha, "scale": scale})
        }
        MixingDistribution::Lognormal { location, scale2 } => {
            json!({"type": "lognormal", "location": location, "scale2": scale2})
        }
    }
}

pub fn from_value(v: &Value) -> Result<DegreeDistribution> {
    let obj = expect_object(v, "distribution")?;
    let tag = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err("distribution spec needs a string \"type\""))?;
    match tag {
        "finite" => {
            check_keys(obj, &["type", "pmf"], "finite")?;
            let pmf_obj = expect_object(
                obj.get("pmf").expect("checked present"),
                "finite pmf",
            )?;
            let mut pairs = Vec::with_capacity(pmf_obj.len());
            for (ks, mv) in pmf_obj {
                let k: u32 = ks
                    .parse()
                    .map_err(|_| parse_err(format!("pmf key {ks:?} is not a degree")))?;
                let m = mv
                    .as_f64()
                    .ok_or_else(|| parse_err(format!("pmf mass at {ks:?} must be a number")))?;
                pairs.push((k, m));
            }
            Ok(DegreeDistribution::Finite(FinitePmf::from_pairs(&pairs)?))
        }
        "poisson" => {
            check_keys(obj, &["type", "lambda"], "poisson")?;
            DegreeDistribution::poisson(get_f64(obj, "lambda", "poisson")?)
        }
        "binomial" => {
            check_keys(obj, &["type", "n", "p"], "binomial")?;
            DegreeDistribution::binomial(
                get_u32(obj, "n", "binomial")?,
                get_f64(obj, "p", "binomial")?,
            )
        }
        "mpoi" => {
            check_keys(obj, &["type", "mixing"], "mpoi")?;
            Ok(DegreeDistribution::MixedPoisson(mixing_from_value(
                obj.get("mixing").expect("checked present"),
            )?))
        }
        "thinned" => {
            check_keys(obj, &["type", "r", "base"], "thinned")?;
            let r = get_f64(obj, "r", "thinned")?;
            let base = from_value(obj.get("base").expect("checked present"))?;
            base.thinned(r)
        }
        other => Err(parse_err(format!("unknown distribution type {other:?}"))),
    }
}

pub fn to_value(d: &DegreeDistribution) -> Value {
    match d {
        DegreeDistribution::Finite(p) => {
            let mut pmf = Map::new();
            for (k, m) in p.support() {
                pmf.insert(k.to_string(), json!(m));
            }
            json!({"type": "finite", "pmf": Value::Object(pmf)})
        }
        DegreeDistribution::Poisson { lambda } => json!({"type": "poisson", "lambda": lambda}),
        DegreeDistribution::Binomial { n, p } => json!({"type": "binomial", "n": n, "p": p}),
        DegreeDistribution::MixedPoisson(m) => {
            json!({"type": "mpoi", "mixing": mixing_to_value(m)})
        }
        DegreeDistribution::Thinned { base, r } => {
            json!({"type": "thinned", "r": r, "base": to_value(base)})
        }
    }
}

pub fn from_str(s: &str) -> Result<DegreeDistribution> {
    let v: Value =
        serde_json::from_str(s).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    from_value(&v)
}

pub fn to_string(d: &DegreeDistribution) -> String {
    to_value(d).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_round_trip() {
        let d = from_str(r#"{"type":"finite","pmf":{"1":0.125,"2":0.75,"3":0.125}}"#).unwrap();
        assert!((d.mean() - 2.0).abs() < 1e-14);
        let back = from_str(&to_string(&d)).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn parametric_round_trips() {
        for s in [
            r#"{"type":"poisson","lambda":2.0}"#,
            r#"{"type":"binomial","n":10,"p":0.2}"#,
            r#"{"type":"mpoi","mixing":{"type":"pareto","alpha":2.5,"scale":1.2}}"#,
            r#"{"type":"mpoi","mixing":{"type":"lognormal","location":0.1,"scale2":0.5}}"#,
            r#"{"type":"mpoi","mixing":{"type":"dirac","x":3.0}}"#,
        ] {
            let d = from_str(s).unwrap();
            assert_eq!(from_str(&to_string(&d)).unwrap(), d);
        }
    }

    #[test]
    fn thinned_resolves_to_closed_form() {
        let d = from_str(r#"{"type":"thinned","r":0.5,"base":{"type":"poisson","lambda":2.0}}"#)
            .unwrap();
        assert_eq!(d, DegreeDistribution::poisson(1.0).unwrap());
        // lognormal mixing has no thinning closed form; stays wrapped
        let d = from_str(
            r#"{"type":"thinned","r":0.5,"base":{"type":"mpoi","mixing":{"type":"lognormal","location":0.1,"scale2":0.5}}}"#,
        )
        .unwrap();
        assert!(matches!(d, DegreeDistribution::Thinned { .. }));
        assert_eq!(from_str(&to_string(&d)).unwrap(), d);
    }

    #[test]
    fn unknown_keys_rejected() {
        for s in [
            r#"{"type":"poisson","lambda":2.0,"extra":1}"#,
            r#"{"type":"finite","pmf":{"1":1.0},"tail":0}"#,
            r#"{"type":"mpoi","mixing":{"type":"pareto","alpha":2.5,"scale":1.2,"mean":2}}"#,
            r#"{"type":"gaussian","mu":0}"#,
            r#"{"type":"poisson"}"#,
            r#"{"type":"binomial","n":-3,"p":0.2}"#,
            r#"{"type":"finite","pmf":{"x":1.0}}"#,
            r#"[1,2,3]"#,
            r#"{"type":"poisson","lambda":2.0"#,
        ] {
            let err = from_str(s).unwrap_err();
            assert!(err.is_parse(), "{s} gave non-parse error {err:?}");
        }
    }

    #[test]
    fn out_of_domain_values_count_as_invalid_input() {
        // well-formed JSON, out-of-domain numbers: still an invalid spec
        let err = from_str(r#"{"type":"finite","pmf":{"1":0.5,"2":0.6}}"#).unwrap_err();
        assert!(err.is_parse());
        let err = from_str(r#"{"type":"poisson","lambda":-1.0}"#).unwrap_err();
        assert!(err.is_parse());
    }
}
