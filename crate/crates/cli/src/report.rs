//! Scenario results and their JSON / CSV renderings.

use serde_json::{json, Map, Value};

use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// A number quoted by the source material.
    Reference,
    /// Follows from a closed form or an independent computation.
    Derived,
    /// Holds by construction.
    Trivial,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Reference => "reference",
            Provenance::Derived => "derived",
            Provenance::Trivial => "trivial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// |value − expected| ≤ tolerance
    Eq,
    /// value ≥ expected − tolerance
    Ge,
    /// value ≤ expected + tolerance
    Le,
}

impl Relation {
    fn tag(self) -> &'static str {
        match self {
            Relation::Eq => "eq",
            Relation::Ge => "ge",
            Relation::Le => "le",
        }
    }

    fn holds(self, value: f64, expected: f64, tol: f64) -> bool {
        match self {
            Relation::Eq => (value - expected).abs() <= tol,
            Relation::Ge => value >= expected - tol,
            Relation::Le => value <= expected + tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub value: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub provenance: Provenance,
    pub anchor: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: String,
    pub params: Params,
    pub seed: u64,
    pub values: Vec<(String, Option<f64>)>,
    pub expected: Vec<(String, Expected)>,
    pub curves: Vec<Curve>,
}

impl ScenarioResult {
    pub fn new(scenario: &str, params: Params, seed: u64) -> Self {
        Self { scenario: scenario.to_string(), params, seed, values: Vec::new(), expected: Vec::new(), curves: Vec::new() }
    }

    pub fn value(&mut self, name: &str, v: f64) -> &mut Self {
        self.value_opt(name, Some(v))
    }

    /// `None` (or a non-finite number) is rendered as null.
    pub fn value_opt(&mut self, name: &str, v: Option<f64>) -> &mut Self {
        self.values.push((name.to_string(), v.filter(|x| x.is_finite())));
        self
    }

    pub fn expect(&mut self, name: &str, value: f64, tolerance: f64, provenance: Provenance, anchor: &'static str) -> &mut Self {
        self.bound(name, Relation::Eq, value, tolerance, provenance, anchor)
    }

    pub fn bound(
        &mut self,
        name: &str,
        relation: Relation,
        value: f64,
        tolerance: f64,
        provenance: Provenance,
        anchor: &'static str,
    ) -> &mut Self {
        self.expected.push((name.to_string(), Expected { value, tolerance, relation, provenance, anchor }));
        self
    }

    pub fn curve(&mut self, name: &str, x_label: &'static str, y_label: &'static str, x: Vec<f64>, y: Vec<f64>) -> &mut Self {
        self.curves.push(Curve { name: name.to_string(), x_label, y_label, x, y });
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == name).and_then(|(_, v)| *v)
    }

    /// One line per violated expectation.
    pub fn failures(&self) -> Vec<String> {
        self.expected
            .iter()
            .filter_map(|(name, e)| match self.get(name) {
                Some(v) if e.relation.holds(v, e.value, e.tolerance) => None,
                Some(v) => Some(format!(
                    "{name} = {v} violates {} {} (tolerance {}; {})",
                    e.relation.tag(),
                    e.value,
                    e.tolerance,
                    e.anchor
                )),
                None => Some(format!("{name} has no value")),
            })
            .collect()
    }

    pub fn pass(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn to_json(&self, with_curves: bool) -> Value {
        let mut values = Map::new();
        for (k, v) in &self.values {
            values.insert(k.clone(), v.map_or(Value::Null, |x| json!(x)));
        }
        let mut expected = Map::new();
        for (k, e) in &self.expected {
            expected.insert(
                k.clone(),
                json!({
                    "value": e.value,
                    "tolerance": e.tolerance,
                    "relation": e.relation.tag(),
                    "provenance": e.provenance.tag(),
                    "anchor": e.anchor,
                }),
            );
        }
        let mut out = Map::new();
        out.insert("scenario".into(), json!(self.scenario));
        out.insert("params".into(), self.params.to_json());
        out.insert("seed".into(), json!(self.seed));
        out.insert("values".into(), Value::Object(values));
        out.insert("expected".into(), Value::Object(expected));
        out.insert("pass".into(), json!(self.pass()));
        if with_curves && !self.curves.is_empty() {
            let curves: Vec<Value> = self
                .curves
                .iter()
                .map(|c| json!({"name": c.name, "x_label": c.x_label, "y_label": c.y_label, "x": c.x, "y": c.y}))
                .collect();
            out.insert("curves".into(), Value::Array(curves));
        }
        Value::Object(out)
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json(true)).expect("finite values serialize");
        s.push('\n');
        s
    }

    /// The values table only: `name,value`, empty cell for undefined.
    pub fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "value"]).expect("in-memory write");
        for (k, v) in &self.values {
            w.write_record([k.clone(), v.map_or(String::new(), |x| x.to_string())]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::resolve;

    fn sample() -> ScenarioResult {
        let mut r = ScenarioResult::new("demo", resolve(&[], &[], None).unwrap(), 3);
        r.value("a", 0.5).value_opt("b", None).value("c", 0.99);
        r.expect("a", 0.5, 1e-12, Provenance::Derived, "half");
        r.bound("c", Relation::Ge, 0.995, 0.0, Provenance::Derived, "bound");
        r
    }

    #[test]
    fn failures_name_the_violation() {
        let r = sample();
        assert!(!r.pass());
        let f = r.failures();
        assert_eq!(f.len(), 1);
        assert!(f[0].starts_with("c = 0.99 violates ge 0.995"));
    }

    #[test]
    fn json_keeps_order_and_nulls() {
        let s = sample().render_json();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["values"]["b"], Value::Null);
        assert_eq!(v["expected"]["a"]["provenance"], "derived");
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["scenario", "params", "seed", "values", "expected", "pass"]);
    }

    #[test]
    fn csv_is_values_only() {
        assert_eq!(sample().render_csv(), "name,value\na,0.5\nb,\nc,0.99\n");
    }
}
