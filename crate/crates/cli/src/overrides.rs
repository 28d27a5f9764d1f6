use serde_json::{Map, Value};

use locact::activity::WitnessSearchConfig;
use locact::complexity::EdgeTolerances;

/// Rewrites `--tol.name=value` and `--tol.name value` into `--tol name=value`
/// so that clap can collect them as one repeated option.
pub fn rewrite_args(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.strip_prefix("--tol.") {
            Some(rest) if rest.contains('=') => {
                out.push("--tol".into());
                out.push(rest.to_string());
            }
            Some(rest) => {
                out.push("--tol".into());
                let v = it.next().unwrap_or_default();
                out.push(format!("{rest}={v}"));
            }
            None => out.push(a),
        }
    }
    out
}

#[derive(Clone, Debug, Default)]
pub struct Tolerances {
    pub witness: WitnessSearchConfig,
    pub edge: EdgeTolerances,
}

fn as_map<T: serde::Serialize>(v: &T) -> Map<String, Value> {
    match serde_json::to_value(v).expect("config serializes") {
        Value::Object(m) => m,
        _ => unreachable!("config is a struct"),
    }
}

/// Every key accepted by `--tol.<name>`.
pub fn known_keys() -> Vec<String> {
    let t = Tolerances::default();
    let mut keys: Vec<String> = as_map(&t.witness).keys().filter(|k| *k != "seed").cloned().collect();
    keys.extend(as_map(&t.edge).keys().cloned());
    keys.sort();
    keys
}

fn parse_value(raw: &str) -> Value {
    match raw {
        "none" | "null" | "auto" => Value::Null,
        _ => serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string())),
    }
}

/// Applies `name=value` overrides on top of the defaults. Unknown names and
/// ill-typed values are errors.
pub fn apply(overrides: &[String], seed: u64) -> Result<Tolerances, String> {
    let defaults = Tolerances::default();
    let mut witness = as_map(&defaults.witness);
    let mut edge = as_map(&defaults.edge);
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| format!("tolerance override {item:?} is not of the form name=value"))?;
        let value = parse_value(raw.trim());
        if key != "seed" && witness.contains_key(key) {
            witness.insert(key.to_string(), value);
        } else if edge.contains_key(key) {
            edge.insert(key.to_string(), value);
        } else {
            return Err(format!("unknown tolerance {key:?}; known: {}", known_keys().join(", ")));
        }
    }
    witness.insert("seed".into(), Value::from(seed));
    let witness: WitnessSearchConfig =
        serde_json::from_value(Value::Object(witness)).map_err(|e| format!("invalid tolerance value: {e}"))?;
    let edge: EdgeTolerances =
        serde_json::from_value(Value::Object(edge)).map_err(|e| format!("invalid tolerance value: {e}"))?;
    witness.validate().map_err(|e| e.to_string())?;
    Ok(Tolerances { witness, edge })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rewrites_both_forms() {
        let args = ["locact", "analyze", "--tol.cert_tol=1e-6", "--tol.grid", "100"].map(String::from);
        assert_eq!(
            rewrite_args(args),
            vec!["locact", "analyze", "--tol", "cert_tol=1e-6", "--tol", "grid=100"]
        );
    }

    #[test]
    fn overrides_apply_and_reject() {
        let t = apply(&["cert_tol=1e-6".into(), "grid=128".into(), "t_max=50".into()], 7).unwrap();
        assert_eq!(t.witness.cert_tol, 1e-6);
        assert_eq!(t.witness.t_max, Some(50.0));
        assert_eq!(t.witness.seed, 7);
        assert_eq!(t.edge.grid, 128);
        assert!(apply(&["bogus=1".into()], 0).unwrap_err().contains("unknown tolerance"));
        assert!(apply(&["seed=3".into()], 0).is_err());
        assert!(apply(&["grid=abc".into()], 0).is_err());
        assert!(apply(&["cert_tol=-1".into()], 0).is_err());
    }
}
