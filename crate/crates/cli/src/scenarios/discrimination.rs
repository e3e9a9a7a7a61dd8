use qmeas_core::discrimination::{
    helstrom, helstrom_error_closed_form, numeric_usd, optimal_usd, optimal_usd_closed_form, pair_with_overlap,
    projective_usd, projective_usd_closed_form, simulate, symmetric_set,
};

use super::{rate, same, Rng, Scenario};
use crate::params::{ParamSpec, Params};
use crate::report::{Provenance, Relation, ScenarioResult};
use crate::CliError;

const S0: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub const HELSTROM: Scenario = Scenario {
    name: "helstrom",
    summary: "minimum-error discrimination of two equiprobable pure states",
    anchors: &[
        "0 vs 45 degree polarizations: error 0.146447 with the symmetric projective basis",
        "a click is 5.828 times likelier to be right than wrong",
    ],
    params: helstrom_params,
    run: run_helstrom,
};

fn helstrom_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("overlap", S0, 0.0, 1.0, "|<a|b>|"),
        ParamSpec::int("trials", 100_000, 1, 100_000_000, "Monte Carlo rounds"),
    ]
}

fn run_helstrom(p: &Params, rng: &mut Rng, out: &mut ScenarioResult) -> Result<(), CliError> {
    let s = p.float("overlap");
    let ens = pair_with_overlap(s)?;
    let r = helstrom(&ens)?;
    let trials = p.int("trials") as u64;
    let tally = simulate(&ens, &r, trials, rng)?;
    let (mc, sigma) = rate(tally.wrong, trials);
    out.value("p_error", r.p_error)
        .value("p_success", r.p_success)
        .value("p_inconclusive", r.p_inconclusive)
        .value_opt("likelihood_ratio", (r.p_error > 0.0).then(|| r.p_success / r.p_error))
        .value("mc_error_rate", mc)
        .value("mc_sigma", sigma)
        .value("mc_error_deviation", (mc - r.p_error).abs());
    let prov = if same(s, S0) { Provenance::Reference } else { Provenance::Derived };
    out.expect("p_error", helstrom_error_closed_form(s), 1e-9, prov, "(1 - sqrt(1 - s^2))/2");
    out.expect("p_inconclusive", 0.0, 1e-12, Provenance::Trivial, "minimum-error measurement never abstains");
    if same(s, S0) {
        out.expect("likelihood_ratio", 5.828427, 1e-6, Provenance::Reference, "right/wrong odds 5.828");
    }
    out.bound("mc_error_deviation", Relation::Le, 3.0 * sigma, 0.0, Provenance::Derived, "sampled error rate within 3 sigma");
    Ok(())
}

pub const USD: Scenario = Scenario {
    name: "usd",
    summary: "unambiguous discrimination of two pure states: projective, optimal POVM and numeric optimum",
    anchors: &[
        "projective USD succeeds 25% of the time at overlap 1/sqrt2",
        "the optimal POVM succeeds 1 - |<a|b>| = 29.3% of the time",
        "USD never names the wrong state",
    ],
    params: usd_params,
    run: run_usd,
};

fn usd_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("overlap", S0, 0.0, 0.999, "|<a|b>|"),
        ParamSpec::int("trials", 100_000, 1, 100_000_000, "Monte Carlo rounds with the optimal POVM"),
    ]
}

fn run_usd(p: &Params, rng: &mut Rng, out: &mut ScenarioResult) -> Result<(), CliError> {
    let s = p.float("overlap");
    let ens = pair_with_overlap(s)?;
    let proj = projective_usd(&ens)?;
    let opt = optimal_usd(&ens)?;
    let num = numeric_usd(&ens)?;
    let trials = p.int("trials") as u64;
    let tally = simulate(&ens, &opt, trials, rng)?;
    let (mc, sigma) = rate(tally.correct, trials);
    out.value("p_projective", proj.p_success)
        .value("p_optimal", opt.p_success)
        .value("p_numeric", num.p_success)
        .value("p_error_optimal", opt.p_error)
        .value_opt("numeric_duality_gap", num.certificate.as_ref().map(|c| c.duality_gap))
        .value("mc_success_rate", mc)
        .value("mc_success_deviation", (mc - opt.p_success).abs())
        .value("mc_errors", tally.wrong as f64)
        .value("mc_inconclusive", tally.inconclusive as f64);
    let prov = if same(s, S0) { Provenance::Reference } else { Provenance::Derived };
    out.expect("p_projective", projective_usd_closed_form(s), 1e-9, prov, "(1 - s^2)/2");
    out.expect("p_optimal", optimal_usd_closed_form(s), 1e-9, prov, "1 - s");
    out.expect("p_numeric", optimal_usd_closed_form(s), 1e-6, Provenance::Derived, "numeric optimum matches 1 - s");
    out.expect("p_error_optimal", 0.0, 1e-12, Provenance::Trivial, "no errors by construction");
    out.expect("mc_errors", 0.0, 0.0, Provenance::Reference, "USD never errs");
    out.bound("mc_success_deviation", Relation::Le, 3.0 * sigma, 0.0, Provenance::Derived, "sampled success within 3 sigma");
    Ok(())
}

pub const USD_MULTI: Scenario = Scenario {
    name: "usd-multi",
    summary: "numeric optimal USD for n symmetric states with equal pairwise overlap",
    anchors: &["three symmetric qutrit states can be identified unambiguously more than 1/3 of the time"],
    params: multi_params,
    run: run_multi,
};

fn multi_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("n", 3, 2, 8, "number of states (dimension n)"),
        ParamSpec::float("overlap", 0.5, 0.0, 0.99, "real pairwise overlap"),
        ParamSpec::float("pair_overlap", S0, 0.0, 0.999, "overlap for the two-state solver check"),
    ]
}

fn run_multi(p: &Params, _rng: &mut Rng, out: &mut ScenarioResult) -> Result<(), CliError> {
    let (n, s) = (p.count("n"), p.float("overlap"));
    let r = numeric_usd(&symmetric_set(n, s)?)?;
    let cert = r.certificate.clone();
    out.value("p_success", r.p_success)
        .value("p_error", r.p_error)
        .value("margin_over_chance", r.p_success - 1.0 / n as f64)
        .value_opt("duality_gap", cert.as_ref().map(|c| c.duality_gap))
        .value_opt("min_eig_inconclusive", cert.as_ref().map(|c| c.min_eig_inconclusive));
    // equal real overlaps: Gram eigenvalues 1 + (n-1)s and 1 - s
    out.expect("p_success", 1.0 - s, 1e-6, Provenance::Derived, "smallest Gram eigenvalue 1 - s");
    out.expect("p_error", 0.0, 1e-9, Provenance::Trivial, "unambiguous");
    if n == 3 && same(s, 0.5) {
        out.bound("margin_over_chance", Relation::Ge, 0.0, 0.0, Provenance::Reference, "beats 1/3 for the qutrit triple");
    }
    out.bound("min_eig_inconclusive", Relation::Ge, 0.0, 1e-9, Provenance::Trivial, "inconclusive element is PSD");

    let ps = p.float("pair_overlap");
    let pair = numeric_usd(&pair_with_overlap(ps)?)?;
    out.value("pair_numeric", pair.p_success).value_opt(
        "pair_duality_gap",
        pair.certificate.as_ref().map(|c| c.duality_gap),
    );
    out.expect("pair_numeric", optimal_usd_closed_form(ps), 1e-6, Provenance::Derived, "two-state closed form 1 - s");
    out.bound("pair_duality_gap", Relation::Le, 1e-6, 0.0, Provenance::Derived, "certified within 1e-6");
    Ok(())
}
