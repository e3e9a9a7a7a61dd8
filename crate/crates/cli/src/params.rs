//! Typed scenario parameters: `--param k=v` overrides, an optional JSON
//! config, then defaults.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamKind {
    Float { min: f64, max: f64 },
    Int { min: i64, max: i64 },
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Float(f64),
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: ParamValue,
    pub help: &'static str,
}

impl ParamSpec {
    pub fn float(name: &'static str, default: f64, min: f64, max: f64, help: &'static str) -> Self {
        Self { name, kind: ParamKind::Float { min, max }, default: ParamValue::Float(default), help }
    }

    pub fn int(name: &'static str, default: i64, min: i64, max: i64, help: &'static str) -> Self {
        Self { name, kind: ParamKind::Int { min, max }, default: ParamValue::Int(default), help }
    }

    pub fn choice(name: &'static str, choices: &'static [&'static str], help: &'static str) -> Self {
        Self { name, kind: ParamKind::Choice(choices), default: ParamValue::Text(choices[0].to_string()), help }
    }

    pub fn type_name(&self) -> String {
        match self.kind {
            ParamKind::Float { min, max } => format!("float in [{min}, {max}]"),
            ParamKind::Int { min, max } => format!("integer in [{min}, {max}]"),
            ParamKind::Choice(c) => format!("one of {}", c.join("|")),
        }
    }

    fn parse(&self, raw: &str) -> Result<ParamValue, CliError> {
        let bad = |why: String| CliError::Usage(format!("parameter {}: {why}", self.name));
        match self.kind {
            ParamKind::Float { min, max } => {
                let v: f64 = raw.trim().parse().map_err(|_| bad(format!("'{raw}' is not a number")))?;
                if !(min..=max).contains(&v) {
                    return Err(bad(format!("{v} outside [{min}, {max}]")));
                }
                Ok(ParamValue::Float(v))
            }
            ParamKind::Int { min, max } => {
                let v: i64 = raw.trim().parse().map_err(|_| bad(format!("'{raw}' is not an integer")))?;
                if !(min..=max).contains(&v) {
                    return Err(bad(format!("{v} outside [{min}, {max}]")));
                }
                Ok(ParamValue::Int(v))
            }
            ParamKind::Choice(choices) => {
                if choices.contains(&raw) {
                    Ok(ParamValue::Text(raw.to_string()))
                } else {
                    Err(bad(format!("'{raw}' is not one of {}", choices.join("|"))))
                }
            }
        }
    }
}

/// Resolved parameters, in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params(Vec<(String, ParamValue)>);

impl Params {
    fn get(&self, name: &str) -> &ParamValue {
        &self.0.iter().find(|(k, _)| k == name).unwrap_or_else(|| panic!("undeclared parameter {name}")).1
    }

    pub fn float(&self, name: &str) -> f64 {
        match self.get(name) {
            ParamValue::Float(v) => *v,
            ParamValue::Int(v) => *v as f64,
            ParamValue::Text(_) => panic!("parameter {name} is not numeric"),
        }
    }

    pub fn int(&self, name: &str) -> i64 {
        match self.get(name) {
            ParamValue::Int(v) => *v,
            _ => panic!("parameter {name} is not an integer"),
        }
    }

    pub fn count(&self, name: &str) -> usize {
        self.int(name) as usize
    }

    pub fn text(&self, name: &str) -> &str {
        match self.get(name) {
            ParamValue::Text(v) => v,
            _ => panic!("parameter {name} is not a choice"),
        }
    }

    pub fn entries(&self) -> &[(String, ParamValue)] {
        &self.0
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.0 {
            m.insert(k.clone(), serde_json::to_value(v).expect("plain values serialize"));
        }
        Value::Object(m)
    }
}

/// Splits `k=v`.
pub fn parse_assignment(s: &str) -> Result<(String, String), CliError> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(CliError::Usage(format!("expected key=value, got '{s}'"))),
    }
}

fn json_to_raw(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(CliError::Usage(format!("config key {key}: expected a number or string"))),
    }
}

/// Flags beat the config file, which beats defaults. Unknown keys are
/// rejected from either source.
pub fn resolve(
    specs: &[ParamSpec],
    overrides: &[(String, String)],
    config: Option<&Map<String, Value>>,
) -> Result<Params, CliError> {
    let known = |k: &str| specs.iter().any(|s| s.name == k);
    if let Some(cfg) = config {
        if let Some(k) = cfg.keys().find(|k| !known(k)) {
            return Err(CliError::Usage(format!("unknown parameter '{k}' in config")));
        }
    }
    if let Some((k, _)) = overrides.iter().find(|(k, _)| !known(k)) {
        return Err(CliError::Usage(format!("unknown parameter '{k}'")));
    }
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let value = if let Some((_, raw)) = overrides.iter().rev().find(|(k, _)| k == spec.name) {
            spec.parse(raw)?
        } else if let Some(v) = config.and_then(|c| c.get(spec.name)) {
            spec.parse(&json_to_raw(spec.name, v)?)?
        } else {
            spec.default.clone()
        };
        out.push((spec.name.to_string(), value));
    }
    Ok(Params(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specs() -> Vec<ParamSpec> {
        vec![
            ParamSpec::float("overlap", 0.5, 0.0, 1.0, "state overlap"),
            ParamSpec::int("trials", 10, 1, 100, "samples"),
            ParamSpec::choice("start", &["excited", "plus"], "initial state"),
        ]
    }

    #[test]
    fn defaults_then_config_then_flags() {
        let p = resolve(&specs(), &[], None).unwrap();
        assert_eq!(p.float("overlap"), 0.5);
        assert_eq!(p.text("start"), "excited");
        let cfg: Map<String, Value> = serde_json::from_str(r#"{"overlap": 0.25, "trials": 7}"#).unwrap();
        let p = resolve(&specs(), &[("trials".into(), "9".into())], Some(&cfg)).unwrap();
        assert_eq!(p.float("overlap"), 0.25);
        assert_eq!(p.int("trials"), 9);
    }

    #[test]
    fn rejects_unknown_and_out_of_range() {
        assert!(resolve(&specs(), &[("nope".into(), "1".into())], None).is_err());
        assert!(resolve(&specs(), &[("overlap".into(), "1.5".into())], None).is_err());
        assert!(resolve(&specs(), &[("trials".into(), "2.5".into())], None).is_err());
        assert!(resolve(&specs(), &[("start".into(), "ground".into())], None).is_err());
        let cfg: Map<String, Value> = serde_json::from_str(r#"{"bogus": 1}"#).unwrap();
        assert!(resolve(&specs(), &[], Some(&cfg)).is_err());
    }

    #[test]
    fn assignment_parsing() {
        assert_eq!(parse_assignment("a=1").unwrap(), ("a".into(), "1".into()));
        assert!(parse_assignment("a").is_err());
        assert!(parse_assignment("=1").is_err());
    }
}
