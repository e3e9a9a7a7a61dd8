use qmeas_core::bayes::{bayes_update, coin_estimators, grid_posterior, CoinData, DiscreteBelief, PriorKind};

use super::{Rng, Scenario};
use crate::params::{ParamSpec, Params};
use crate::report::{Provenance, ScenarioResult};
use crate::CliError;

pub const COIN: Scenario = Scenario {
    name: "coin",
    summary: "coin bias from H heads in N tosses: MLE, naive error bar, flat and Bures posterior means",
    anchors: &[
        "with no data the flat-prior posterior mean is 0.5",
        "0 heads in 10 tosses: MLE 0 with zero naive error bar, flat-prior mean 1/12",
        "Bures-prior mean (H+1/2)/(N+1)",
    ],
    params: coin_params,
    run: coin,
};

fn coin_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("heads", 0, 0, 1_000_000_000, "observed heads H"),
        ParamSpec::int("tosses", 0, 0, 1_000_000_000, "tosses N"),
        ParamSpec::int("grid", 10_001, 101, 1_000_000, "posterior grid points"),
    ]
}

fn coin(p: &Params, _rng: &mut Rng, out: &mut ScenarioResult) -> Result<(), CliError> {
    let (h, n) = (p.int("heads") as u64, p.int("tosses") as u64);
    if h > n {
        return Err(CliError::Usage(format!("heads {h} exceeds tosses {n}")));
    }
    let data = CoinData::new(h, n)?;
    let est = coin_estimators(data);
    let flat = grid_posterior(data, PriorKind::Flat, p.count("grid"))?;
    let bures = grid_posterior(data, PriorKind::Bures, p.count("grid"))?;
    out.value_opt("mle", est.mle)
        .value_opt("naive_stderr", est.naive_stderr)
        .value("mean_flat", est.mean_flat)
        .value("mean_flat_grid", flat.mean())
        .value("mean_bures", est.mean_bures)
        .value("mean_bures_grid", bures.mean())
        .value("map_flat", flat.argmax());

    let (hf, nf) = (h as f64, n as f64);
    let prov = if (h, n) == (0, 0) || (h, n) == (0, 10) { Provenance::Reference } else { Provenance::Derived };
    out.expect("mean_flat", (hf + 1.0) / (nf + 2.0), 1e-12, prov, "flat-prior posterior mean (H+1)/(N+2)");
    out.expect("mean_flat_grid", (hf + 1.0) / (nf + 2.0), 1e-6, Provenance::Derived, "grid integration reproduces the flat mean");
    out.expect("mean_bures_grid", (hf + 0.5) / (nf + 1.0), 2e-3, Provenance::Derived, "Bures-prior mean (H+1/2)/(N+1)");
    if n > 0 {
        out.expect("mle", hf / nf, 1e-15, Provenance::Trivial, "MLE is the observed frequency");
        let prov = if h == 0 { Provenance::Reference } else { Provenance::Derived };
        out.expect("naive_stderr", (hf / nf * (1.0 - hf / nf) / nf).sqrt(), 1e-15, prov, "sqrt(p(1-p)/N) collapses to 0 at p = 0");
    }
    out.curve("posterior_flat", "p", "density", flat.grid().to_vec(), flat.density().to_vec());
    out.curve("posterior_bures", "p", "density", bures.grid().to_vec(), bures.density().to_vec());
    Ok(())
}

pub const DISEASE: Scenario = Scenario {
    name: "disease",
    summary: "Bayes' rule for a rare disease and an accurate but imperfect test",
    anchors: &["a positive test still leaves the patient 99% likely to be healthy"],
    params: disease_params,
    run: disease,
};

fn disease_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("prevalence", 1e-6, 0.0, 1.0, "prior P(disease)"),
        ParamSpec::float("sensitivity", 0.99, 0.0, 1.0, "P(+ | disease)"),
        ParamSpec::float("false_positive", 1e-4, 0.0, 1.0, "P(+ | healthy)"),
    ]
}

fn disease(p: &Params, _rng: &mut Rng, out: &mut ScenarioResult) -> Result<(), CliError> {
    let (prev, sens, fp) = (p.float("prevalence"), p.float("sensitivity"), p.float("false_positive"));
    let prior = DiscreteBelief::from_pairs(&[("disease", prev), ("healthy", 1.0 - prev)])?;
    let post = bayes_update(&prior, &[sens, fp])?;
    let sick = post.get("disease").expect("label present");
    out.value("p_disease_given_positive", sick).value("p_healthy_given_positive", 1.0 - sick);
    let exact = sens * prev / (sens * prev + fp * (1.0 - prev));
    out.expect("p_disease_given_positive", exact, 1e-12, Provenance::Derived, "sens*prev / (sens*prev + fp*(1-prev))");
    if super::same(prev, 1e-6) && super::same(sens, 0.99) && super::same(fp, 1e-4) {
        out.expect("p_healthy_given_positive", 0.99, 1e-3, Provenance::Reference, "99% healthy after a positive test");
    }
    Ok(())
}
