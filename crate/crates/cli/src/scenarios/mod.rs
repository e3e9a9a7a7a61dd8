mod bayes;
mod discrimination;
mod interferometry;
mod state;
mod weak;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::params::{resolve, ParamSpec, Params};
use crate::report::ScenarioResult;
use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_180_611;

pub type Rng = ChaCha8Rng;
type RunFn = fn(&Params, &mut Rng, &mut ScenarioResult) -> Result<(), CliError>;

pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    /// Short statements of the results the scenario reproduces.
    pub anchors: &'static [&'static str],
    pub params: fn() -> Vec<ParamSpec>,
    run: RunFn,
}

pub static SCENARIOS: &[Scenario] = &[
    bayes::COIN,
    bayes::DISEASE,
    state::DECAY,
    interferometry::DUALITY,
    interferometry::ERASER,
    discrimination::HELSTROM,
    discrimination::USD,
    discrimination::USD_MULTI,
    interferometry::IFM,
    interferometry::ZENO,
    interferometry::HARDY,
    weak::THREE_BOX,
    weak::WEAK_POINTER,
    state::NAIMARK,
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name)
}

pub fn run_scenario(
    name: &str,
    overrides: &[(String, String)],
    config: Option<&Map<String, Value>>,
    seed: u64,
) -> Result<ScenarioResult, CliError> {
    let scenario = find(name).ok_or_else(|| {
        let names: Vec<&str> = SCENARIOS.iter().map(|s| s.name).collect();
        CliError::Usage(format!("unknown scenario '{name}' (known: {})", names.join(", ")))
    })?;
    let params = resolve(&(scenario.params)(), overrides, config)?;
    let mut rng = Rng::seed_from_u64(seed);
    let mut result = ScenarioResult::new(name, params.clone(), seed);
    (scenario.run)(&params, &mut rng, &mut result)?;
    Ok(result)
}

pub fn list_json() -> Value {
    let list: Vec<Value> = SCENARIOS
        .iter()
        .map(|s| {
            let params: Vec<Value> = (s.params)()
                .iter()
                .map(|p| json!({"name": p.name, "type": p.type_name(), "default": p.default, "help": p.help}))
                .collect();
            json!({"name": s.name, "summary": s.summary, "anchors": s.anchors, "params": params})
        })
        .collect();
    Value::Array(list)
}

pub fn list_text() -> String {
    let mut out = String::new();
    for s in SCENARIOS {
        out.push_str(&format!("{:<13} {}\n", s.name, s.summary));
        for p in (s.params)() {
            let default = serde_json::to_string(&p.default).expect("plain value");
            out.push_str(&format!("    {}={} ({}) {}\n", p.name, default, p.type_name(), p.help));
        }
    }
    out
}

/// Every scenario at its defaults; one line each, plus failure details.
pub fn verify(seed: u64) -> (bool, String) {
    let mut ok = true;
    let mut out = String::new();
    for s in SCENARIOS {
        match run_scenario(s.name, &[], None, seed) {
            Ok(r) if r.pass() => out.push_str(&format!("PASS {}\n", s.name)),
            Ok(r) => {
                ok = false;
                out.push_str(&format!("FAIL {}\n", s.name));
                for f in r.failures() {
                    out.push_str(&format!("    {f}\n"));
                }
            }
            Err(e) => {
                ok = false;
                out.push_str(&format!("FAIL {}: {e}\n", s.name));
            }
        }
    }
    (ok, out)
}

/// Mean and binomial standard error of a hit count.
fn rate(hits: u64, trials: u64) -> (f64, f64) {
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}
