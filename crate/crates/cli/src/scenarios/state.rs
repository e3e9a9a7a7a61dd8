use qmeas_core::linalg::{cr, kron_vec, partial_trace, DimSpec, Matrix};
use qmeas_core::measurement::{naimark_dilation, random_povm, selective_update, trine_povm, PovmElement};
use qmeas_core::state::{
    decay_kraus, decay_trajectory, eta_per_step, fit_t1_t2, pure_to_density, random_density, DecayModel, PureState,
    EXCITED, GROUND,
};

use super::{Rng, Scenario};
use crate::params::{ParamSpec, Params};
use crate::report::{Provenance, ScenarioResult};
use crate::CliError;

pub const DECAY: Scenario = Scenario {
    name: "decay",
    summary: "two-level atom watched by a photon counter: no-click updates, T1/T2 trajectory fit, atom-field reduced state",
    anchors: &[
        "no click after one half-life from |+>: P = 3/4, state sqrt(2/3)|g> + sqrt(1/3)|e>",
        "coherence decays at half the population rate (T2 = 2 T1)",
        "reduced atom state of (|e0> + |g1>)/sqrt2 is maximally mixed",
    ],
    params: decay_params,
    run: decay,
};

fn decay_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("eta_step", 0.01, 1e-6, 0.5, "emission probability per step for the T1/T2 fit"),
        ParamSpec::int("steps", 500, 10, 1_000_000, "trajectory length"),
        ParamSpec::int("half_life_steps", 10, 1, 100_000, "no-click updates spanning one half-life"),
    ]
}

fn decay(p: &Params, _rng: &mut Rng, out: &mut ScenarioResult) -> Result<(), CliError> {
    // no click for one half-life, split into equal steps
    let k = p.count("half_life_steps");
    let kraus = decay_kraus(eta_per_step(k))?;
    let no_click = kraus.index_of("no_click").expect("decay model labels");
    let mut rho = pure_to_density(&PureState::plus())?;
    let mut p_none = 1.0;
    for _ in 0..k {
        let (next, prob) = selective_update(&rho, &kraus, no_click)?;
        rho = next;
        p_none *= prob;
    }
    let target = PureState::from_real(&[(2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()])?;
    let fidelity = rho.expectation(target.projector().matrix())?.re;
    out.value("p_no_click_half_life", p_none).value("fidelity_half_life", fidelity);
    out.expect("p_no_click_half_life", 0.75, 1e-12, Provenance::Reference, "no click within one half-life: 3/4");
    out.expect("fidelity_half_life", 1.0, 1e-10, Provenance::Reference, "conditional state sqrt(2/3)|g> + sqrt(1/3)|e>");

    // non-selective trajectory from |+⟩
    let eta = p.float("eta_step");
    let n = p.count("steps");
    let traj = decay_trajectory(&pure_to_density(&PureState::plus())?, &DecayModel::new(eta, n)?)?;
    let (k_pop, k_coh) = fit_t1_t2(&traj).ok_or_else(|| CliError::Usage("trajectory too short to fit".into()))?;
    let last = traj.last().expect("non-empty");
    out.value("k_population", k_pop)
        .value("k_coherence", k_coh)
        .value("t2_over_t1", k_pop / k_coh)
        .value("excited_population_end", last.entry(EXCITED, EXCITED).re)
        .value("coherence_end", last.entry(GROUND, EXCITED).norm());
    out.expect("t2_over_t1", 2.0, 0.02, Provenance::Reference, "T2 = 2 T1 for pure emission");
    out.expect("k_population", -(1.0 - eta).ln(), 1e-9, Provenance::Derived, "population (1-eta)^n");
    out.expect("excited_population_end", 0.5 * (1.0 - eta).powi(n as i32), 1e-12, Provenance::Derived, "rho_ee = (1-eta)^n / 2");
    out.expect("coherence_end", 0.5 * (1.0 - eta).powf(n as f64 / 2.0), 1e-12, Provenance::Derived, "|rho_ge| = (1-eta)^(n/2) / 2");
    let steps: Vec<f64> = (0..=n).map(|i| i as f64).collect();
    out.curve("excited_population", "step", "rho_ee", steps.clone(), traj.iter().map(|r| r.entry(EXCITED, EXCITED).re).collect());
    out.curve("coherence", "step", "|rho_ge|", steps, traj.iter().map(|r| r.entry(GROUND, EXCITED).norm()).collect());

    // atom ⊗ field: (|e,0⟩ + |g,1⟩)/√2
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi: Vec<_> = kron_vec(&[cr(0.0), cr(1.0)], &[cr(h), cr(0.0)])
        .iter()
        .zip(kron_vec(&[cr(1.0), cr(0.0)], &[cr(0.0), cr(h)]))
        .map(|(a, b)| a + b)
        .collect();
    let joint = Matrix::outer(&psi, &psi);
    let atom = partial_trace(&joint, &DimSpec::bipartite(2, 2)?, 0)?;
    let dev = atom.max_diff(&Matrix::diag_real(&[0.5, 0.5]));
    out.value("reduced_rho_gg", atom[(0, 0)].re)
        .value("reduced_rho_ee", atom[(1, 1)].re)
        .value("reduced_max_deviation", dev);
    out.expect("reduced_max_deviation", 0.0, 1e-12, Provenance::Reference, "reduced atom state diag(1/2, 1/2)");
    Ok(())
}

pub const NAIMARK: Scenario = Scenario {
    name: "naimark",
    summary: "Naimark dilation of a POVM reproduces Tr(E_i rho) as a projective ancilla measurement",
    anchors: &["any POVM is a projective measurement on a larger space"],
    params: naimark_params,
    run: naimark,
};

fn naimark_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::choice("povm", &["trine", "random"], "trine on a qubit, or a random POVM"),
        ParamSpec::int("dim", 3, 1, 8, "system dimension for povm=random"),
        ParamSpec::int("outcomes", 4, 1, 12, "number of outcomes for povm=random"),
        ParamSpec::int("states", 100, 1, 100_000, "random test states"),
    ]
}

fn naimark(p: &Params, rng: &mut Rng, out: &mut ScenarioResult) -> Result<(), CliError> {
    let povm: Vec<PovmElement> = match p.text("povm") {
        "trine" => trine_povm(),
        _ => random_povm(p.count("dim"), p.count("outcomes"), rng)?,
    };
    let dil = naimark_dilation(&povm)?;
    let d = dil.system_dim();
    let v = dil.isometry();
    let iso_dev = (&v.dagger() * v).max_diff(&Matrix::identity(d));
    let mut worst: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for _ in 0..p.count("states") {
        let rho = random_density(d, rng)?;
        let dilated = dil.probabilities(&rho)?;
        for (e, q) in povm.iter().zip(&dilated) {
            worst = worst.max((e.probability(&rho)? - q).abs());
        }
        worst_sum = worst_sum.max((dilated.iter().sum::<f64>() - 1.0).abs());
    }
    out.value("system_dim", d as f64)
        .value("ancilla_dim", dil.ancilla_dim() as f64)
        .value("isometry_deviation", iso_dev)
        .value("max_probability_diff", worst)
        .value("max_total_deviation", worst_sum);
    out.expect("max_probability_diff", 0.0, 1e-9, Provenance::Reference, "dilated projective statistics equal Tr(E_i rho)");
    out.expect("isometry_deviation", 0.0, 1e-9, Provenance::Trivial, "V^dagger V = I");
    out.expect("ancilla_dim", povm.len() as f64, 0.0, Provenance::Trivial, "one ancilla level per outcome");
    Ok(())
}
