//! Minimum-error and unambiguous discrimination of pure states.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{cr, eig_hermitian, inner, Matrix, C64, DEFAULT_TOL};
use crate::measurement::{inverse_cdf, validate_povm, PovmElement};
use crate::state::{clamp_probability, pure_to_density, PureState};

/// Gram matrices with min eigenvalue at or below this are treated as
/// linearly dependent.
pub const INDEPENDENCE_TOL: f64 = 1e-8;

/// Candidate states with prior probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEnsemble {
    states: Vec<PureState>,
    priors: Vec<f64>,
}

impl StateEnsemble {
    pub fn new(states: Vec<PureState>, priors: Vec<f64>) -> Result<Self> {
        if states.is_empty() || states.len() != priors.len() {
            return Err(Error::InvalidShape(format!("{} states with {} priors", states.len(), priors.len())));
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(Error::InvalidShape("ensemble states must share a dimension".into()));
        }
        let sum: f64 = priors.iter().sum();
        if priors.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::BadProbabilities { sum });
        }
        Ok(Self { states, priors })
    }

    pub fn equal(states: Vec<PureState>) -> Result<Self> {
        let n = states.len();
        Self::new(states, vec![1.0 / n as f64; n])
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// G_jk = ⟨a_j|a_k⟩
    pub fn gram(&self) -> Matrix {
        let n = self.len();
        Matrix::from_fn(n, n, |j, k| inner(self.states[j].amplitudes(), self.states[k].amplitudes()))
    }

    fn has_equal_priors(&self) -> bool {
        let p0 = self.priors[0];
        self.priors.iter().all(|p| (p - p0).abs() < 1e-12)
    }

    fn expect_two(&self) -> Result<(&PureState, &PureState)> {
        match self.states.as_slice() {
            [a, b] => Ok((a, b)),
            _ => Err(Error::WrongStateCount { expected: "2".into(), got: self.len() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Helstrom,
    ProjectiveUsd,
    OptimalUsd,
    NumericUsd,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Helstrom => "helstrom",
            Strategy::ProjectiveUsd => "projective_usd",
            Strategy::OptimalUsd => "optimal_usd",
            Strategy::NumericUsd => "numeric_usd",
        }
    }
}

/// Optimality evidence from the numeric USD solver.
#[derive(Debug, Clone, PartialEq)]
pub struct UsdCertificate {
    /// Dual objective minus primal success; an upper bound on suboptimality.
    pub duality_gap: f64,
    /// Smallest eigenvalue of the inconclusive element.
    pub min_eig_inconclusive: f64,
    pub iterations: usize,
    /// True when the symmetric equal-scale point was used directly.
    pub analytic: bool,
}

/// A measurement together with its figures of merit. Outcome `k` for
/// `k < ensemble.len()` announces state `k`; a trailing element, when
/// present, is the inconclusive answer.
#[derive(Debug, Clone)]
pub struct DiscriminationReport {
    pub strategy: Strategy,
    pub povm: Vec<PovmElement>,
    pub p_success: f64,
    pub p_error: f64,
    pub p_inconclusive: f64,
    /// Optimal per-state scale factors (numeric USD only).
    pub scales: Option<Vec<f64>>,
    pub certificate: Option<UsdCertificate>,
    pub note: Option<String>,
}

impl DiscriminationReport {
    fn from_povm(strategy: Strategy, ensemble: &StateEnsemble, povm: Vec<PovmElement>) -> Result<Self> {
        validate_povm(&povm)?;
        let n = ensemble.len();
        let mut p_success = 0.0;
        let mut p_error = 0.0;
        let mut p_inconclusive = 0.0;
        for (k, (state, &prior)) in ensemble.states.iter().zip(&ensemble.priors).enumerate() {
            let rho = pure_to_density(state)?;
            for (j, e) in povm.iter().enumerate() {
                let p = prior * e.probability(&rho)?;
                if j >= n {
                    p_inconclusive += p;
                } else if j == k {
                    p_success += p;
                } else {
                    p_error += p;
                }
            }
        }
        Ok(Self {
            strategy,
            povm,
            p_success,
            p_error,
            p_inconclusive,
            scales: None,
            certificate: None,
            note: None,
        })
    }

    pub fn outcome_labels(&self, n_states: usize) -> Vec<String> {
        (0..self.povm.len())
            .map(|j| if j < n_states { format!("state_{j}") } else { "inconclusive".to_string() })
            .collect()
    }
}

fn projector_matrix(v: &[C64]) -> Matrix {
    Matrix::outer(v, v)
}

/// Minimum-error measurement: project onto the positive part of
/// p₁ρ₁ − p₂ρ₂.
pub fn helstrom(ensemble: &StateEnsemble) -> Result<DiscriminationReport> {
    let (a, b) = ensemble.expect_two()?;
    let d = ensemble.dim();
    let gamma = projector_matrix(a.amplitudes())
        .scale_real(ensemble.priors[0])
        .try_sub(&projector_matrix(b.amplitudes()).scale_real(ensemble.priors[1]))?;
    let eig = eig_hermitian(&gamma, DEFAULT_TOL)?;
    let e_a = eig.map_spectrum(|x| if x > 1e-14 { 1.0 } else { 0.0 });
    let e_b = Matrix::identity(d).try_sub(&e_a)?;
    let povm = vec![PovmElement::new(e_a)?, PovmElement::new(e_b)?];
    let mut report = DiscriminationReport::from_povm(Strategy::Helstrom, ensemble, povm)?;
    report.p_inconclusive = 0.0;
    Ok(report)
}

/// ½(1 − √(1 − s²)) for equal priors and overlap modulus s.
pub fn helstrom_error_closed_form(s: f64) -> f64 {
    0.5 * (1.0 - (1.0 - s * s).max(0.0).sqrt())
}

/// Unit vector in span{a, b} orthogonal to `a`, or `None` when b ∥ a.
fn orthogonal_in_span(a: &[C64], b: &[C64]) -> Option<Vec<C64>> {
    let ov = inner(a, b);
    let v: Vec<C64> = b.iter().zip(a).map(|(bi, ai)| bi - ai * ov).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (n > 1e-12).then(|| v.into_iter().map(|z| z / n).collect())
}

/// Single projective test on the complement of the first state: a click
/// certifies the second state, everything else is inconclusive.
pub fn projective_usd(ensemble: &StateEnsemble) -> Result<DiscriminationReport> {
    let (a, b) = ensemble.expect_two()?;
    if !ensemble.has_equal_priors() {
        return Err(Error::UnequalPriors("projective USD"));
    }
    let d = ensemble.dim();
    let e_b = match orthogonal_in_span(a.amplitudes(), b.amplitudes()) {
        Some(v) => projector_matrix(&v),
        None => Matrix::zeros(d, d),
    };
    let e_dk = Matrix::identity(d).try_sub(&e_b)?;
    let povm = vec![PovmElement::new(Matrix::zeros(d, d))?, PovmElement::new(e_b)?, PovmElement::new(e_dk)?];
    let mut report = DiscriminationReport::from_povm(Strategy::ProjectiveUsd, ensemble, povm)?;
    report.note = Some(
        "targets the first state's complement; the mirror strategy projecting onto the second state's complement has equal success"
            .into(),
    );
    Ok(report)
}

/// ½(1 − s²)
pub fn projective_usd_closed_form(s: f64) -> f64 {
    0.5 * (1.0 - s * s)
}

/// Optimal two-state USD: E_A = κ|b̄⟩⟨b̄|, E_B = κ|ā⟩⟨ā| with
/// κ = 1/(1+|⟨a|b⟩|).
pub fn optimal_usd(ensemble: &StateEnsemble) -> Result<DiscriminationReport> {
    let (a, b) = ensemble.expect_two()?;
    if !ensemble.has_equal_priors() {
        return Err(Error::UnequalPriors("optimal USD"));
    }
    let s = a.overlap(b)?.norm();
    let min_eig = 1.0 - s;
    if min_eig <= INDEPENDENCE_TOL {
        return Err(Error::LinearlyDependent { min_eig });
    }
    let d = ensemble.dim();
    let a_bar = orthogonal_in_span(a.amplitudes(), b.amplitudes()).ok_or(Error::LinearlyDependent { min_eig })?;
    let b_bar = orthogonal_in_span(b.amplitudes(), a.amplitudes()).ok_or(Error::LinearlyDependent { min_eig })?;
    let kappa = 1.0 / (1.0 + s);
    let e_a = projector_matrix(&b_bar).scale_real(kappa);
    let e_b = projector_matrix(&a_bar).scale_real(kappa);
    let e_dk = Matrix::identity(d).try_sub(&e_a)?.try_sub(&e_b)?;
    let povm = vec![PovmElement::new(e_a)?, PovmElement::new(e_b)?, PovmElement::with_tol(e_dk, 1e-10)?];
    DiscriminationReport::from_povm(Strategy::OptimalUsd, ensemble, povm)
}

/// 1 − s
pub fn optimal_usd_closed_form(s: f64) -> f64 {
    1.0 - s
}

/// Dual (reciprocal) vectors ã_k with ⟨a_j|ã_k⟩ = δ_jk, plus the Gram
/// matrix's smallest eigenvalue.
pub fn reciprocal_vectors(ensemble: &StateEnsemble) -> Result<(Vec<Vec<C64>>, f64)> {
    let n = ensemble.len();
    let g = ensemble.gram();
    let eig = eig_hermitian(&g, DEFAULT_TOL)?;
    let min_eig = eig.values[0];
    if n > ensemble.dim() || min_eig <= INDEPENDENCE_TOL {
        return Err(Error::LinearlyDependent { min_eig });
    }
    let g_inv = eig.map_spectrum(|x| 1.0 / x);
    let d = ensemble.dim();
    let duals = (0..n)
        .map(|k| {
            (0..d)
                .map(|i| (0..n).map(|j| ensemble.states[j].amplitudes()[i] * g_inv[(j, k)]).sum())
                .collect()
        })
        .collect();
    Ok((duals, min_eig))
}

/// Is G_{j,k} = G_{j+1,k+1} (indices mod n)? Then the set is geometrically
/// uniform and equal scales are optimal under equal priors.
fn is_cyclically_symmetric(g: &Matrix) -> bool {
    let n = g.rows();
    (0..n).all(|j| (0..n).all(|k| (g[(j, k)] - g[((j + 1) % n, (k + 1) % n)]).norm() < 1e-12))
}

fn inconclusive_matrix(duals: &[Vec<C64>], scales: &[f64], d: usize) -> Matrix {
    let mut m = Matrix::identity(d);
    for (v, &w) in duals.iter().zip(scales) {
        m = &m - &projector_matrix(v).scale_real(w);
    }
    m
}

/// Hermitian positive-definite inverse via the eigensolver.
fn pd_inverse(m: &Matrix) -> Result<Matrix> {
    Ok(eig_hermitian(m, DEFAULT_TOL)?.map_spectrum(|x| 1.0 / x))
}

fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Maximizes Σ p_k w_k subject to I − Σ w_k|ã_k⟩⟨ã_k| ⪰ 0, w ≥ 0, with a
/// log-barrier Newton method. Returns (scales, iterations, duality gap).
fn usd_barrier(duals: &[Vec<C64>], priors: &[f64], d: usize) -> Result<(Vec<f64>, usize, f64)> {
    let n = duals.len();
    let norms: Vec<f64> = duals.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum()).collect();
    // strictly feasible start: each w_k well inside its single-coordinate bound
    let mut w: Vec<f64> = norms.iter().map(|nk| 0.5 / (n as f64 * nk)).collect();
    let mut mu = 0.1;
    let mut iterations = 0;
    let feasible = |w: &[f64]| -> bool {
        w.iter().all(|&x| x > 0.0)
            && eig_hermitian(&inconclusive_matrix(duals, w, d), 1e-6).is_ok_and(|e| e.values[0] > 0.0)
    };
    while mu > 1e-10 {
        for _ in 0..100 {
            iterations += 1;
            let b = inconclusive_matrix(duals, &w, d);
            let b_inv = pd_inverse(&b)?;
            let bv: Vec<Vec<C64>> = duals.iter().map(|v| b_inv.apply(v)).collect::<Result<_>>()?;
            let grad: Vec<f64> = (0..n)
                .map(|k| priors[k] - mu * inner(&duals[k], &bv[k]).re + mu / w[k])
                .collect();
            let hess: Vec<Vec<f64>> = (0..n)
                .map(|k| {
                    (0..n)
                        .map(|l| {
                            let cross = inner(&duals[k], &bv[l]).norm_sqr();
                            -mu * cross - if k == l { mu / (w[k] * w[k]) } else { 0.0 }
                        })
                        .collect()
                })
                .collect();
            // Newton step for a concave objective: Δ = −H⁻¹ g
            let step = solve_linear(hess, grad.iter().map(|g| -g).collect())
                .ok_or_else(|| Error::InvalidPovm("singular Newton system".into()))?;
            // Newton decrement of the self-concordant f/μ
            let lambda = (step.iter().zip(&grad).map(|(s, g)| s * g).sum::<f64>().abs() / mu).sqrt();
            if lambda < 1e-7 {
                break;
            }
            let mut t = if lambda > 0.25 { 1.0 / (1.0 + lambda) } else { 1.0 };
            let mut trial: Vec<f64> = w.iter().zip(&step).map(|(x, s)| x + t * s).collect();
            while !feasible(&trial) && t > 1e-12 {
                t *= 0.5;
                trial = w.iter().zip(&step).map(|(x, s)| x + t * s).collect();
            }
            if t <= 1e-12 {
                break;
            }
            w = trial;
        }
        mu *= 0.2;
    }
    // Dual certificate from the last centre: Z = μB⁻¹, rescaled until
    // ⟨ã_k|Z|ã_k⟩ ≥ p_k holds, bounds the optimum by Tr Z.
    let mu_last = mu / 0.2;
    let b = inconclusive_matrix(duals, &w, d);
    let z = pd_inverse(&b)?.scale_real(mu_last);
    let mut scale: f64 = 1.0;
    for (v, &p) in duals.iter().zip(priors) {
        let q = inner(v, &z.apply(v)?).re;
        scale = scale.max(p / q);
    }
    let dual_objective = scale * crate::linalg::trace(&z)?.re;
    let primal: f64 = w.iter().zip(priors).map(|(a, p)| a * p).sum();
    Ok((w, iterations, dual_objective - primal))
}

/// Largest feasible equal scale t: I − tΣ|ã_k⟩⟨ã_k| ⪰ 0.
fn equal_scale(duals: &[Vec<C64>], d: usize) -> Result<f64> {
    let mut frame = Matrix::zeros(d, d);
    for v in duals {
        frame = &frame + &projector_matrix(v);
    }
    let lmax = *eig_hermitian(&frame, DEFAULT_TOL)?.values.last().expect("non-empty");
    Ok(1.0 / lmax)
}

/// Optimal unambiguous discrimination of linearly independent pure states:
/// E_k = w_k|ã_k⟩⟨ã_k| on the reciprocal basis, scales chosen to maximize
/// the average success while keeping the inconclusive element PSD.
pub fn numeric_usd(ensemble: &StateEnsemble) -> Result<DiscriminationReport> {
    if !ensemble.has_equal_priors() {
        return Err(Error::UnequalPriors("numeric USD"));
    }
    let (duals, _) = reciprocal_vectors(ensemble)?;
    let d = ensemble.dim();
    let n = ensemble.len();
    let gram = ensemble.gram();

    let (mut scales, iterations, gap, analytic) = if is_cyclically_symmetric(&gram) {
        let t = equal_scale(&duals, d)?;
        (vec![t; n], 0, 0.0, true)
    } else {
        let (w, it, gap) = usd_barrier(&duals, ensemble.priors(), d)?;
        (w, it, gap, false)
    };
    // Pull back onto the feasible set if the last iterate crept past it.
    let mut e_dk = inconclusive_matrix(&duals, &scales, d);
    let mut min_eig = eig_hermitian(&e_dk, DEFAULT_TOL)?.values[0];
    if min_eig < 0.0 {
        let shrink = 1.0 / (1.0 - min_eig);
        scales.iter_mut().for_each(|w| *w *= shrink);
        e_dk = inconclusive_matrix(&duals, &scales, d);
        min_eig = eig_hermitian(&e_dk, DEFAULT_TOL)?.values[0];
    }

    let mut povm: Vec<PovmElement> = duals
        .iter()
        .zip(&scales)
        .map(|(v, &w)| PovmElement::new(projector_matrix(v).scale_real(w)))
        .collect::<Result<_>>()?;
    povm.push(PovmElement::with_tol(e_dk, 1e-10)?);
    let mut report = DiscriminationReport::from_povm(Strategy::NumericUsd, ensemble, povm)?;
    report.scales = Some(scales);
    report.certificate = Some(UsdCertificate { duality_gap: gap, min_eig_inconclusive: min_eig, iterations, analytic });
    Ok(report)
}

/// Counts of simulated discrimination rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiscriminationTally {
    pub correct: u64,
    pub wrong: u64,
    pub inconclusive: u64,
}

/// Draws a state from the priors and an outcome from the report's POVM,
/// `trials` times.
pub fn simulate<R: Rng + ?Sized>(
    ensemble: &StateEnsemble,
    report: &DiscriminationReport,
    trials: u64,
    rng: &mut R,
) -> Result<DiscriminationTally> {
    let n = ensemble.len();
    let table: Vec<Vec<f64>> = ensemble
        .states
        .iter()
        .map(|s| {
            let rho = pure_to_density(s)?;
            report.povm.iter().map(|e| clamp_probability(rho.expectation(e.matrix())?.re)).collect()
        })
        .collect::<Result<_>>()?;
    let mut tally = DiscriminationTally::default();
    for _ in 0..trials {
        let k = inverse_cdf(&ensemble.priors, rng.random::<f64>());
        let j = inverse_cdf(&table[k], rng.random::<f64>());
        if j >= n {
            tally.inconclusive += 1;
        } else if j == k {
            tally.correct += 1;
        } else {
            tally.wrong += 1;
        }
    }
    Ok(tally)
}

/// |0°⟩ and |θ⟩ as real polarization states.
pub fn polarization_pair(theta: f64) -> Result<StateEnsemble> {
    StateEnsemble::equal(vec![PureState::real_angle(0.0), PureState::real_angle(theta)])
}

/// Two real states with overlap `s` ∈ [0, 1].
pub fn pair_with_overlap(s: f64) -> Result<StateEnsemble> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("overlap {s} not in [0, 1]")));
    }
    polarization_pair(s.acos())
}

/// n real unit vectors in ℝⁿ with every pairwise overlap equal to `s`.
pub fn symmetric_set(n: usize, s: f64) -> Result<StateEnsemble> {
    // Gram = (1−s)I + sJ; its Cholesky factor gives explicit vectors.
    let gram = Matrix::from_fn(n, n, |j, k| cr(if j == k { 1.0 } else { s }));
    let eig = eig_hermitian(&gram, DEFAULT_TOL)?;
    if eig.values[0] <= INDEPENDENCE_TOL {
        return Err(Error::LinearlyDependent { min_eig: eig.values[0] });
    }
    let root = eig.map_spectrum(|x| x.sqrt());
    let states = (0..n)
        .map(|k| PureState::normalized(root.col(k)))
        .collect::<Result<Vec<_>>>()?;
    StateEnsemble::equal(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_psd;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    #[test]
    fn helstrom_zero_vs_45() {
        let r = helstrom(&polarization_pair(FRAC_PI_4).unwrap()).unwrap();
        assert!((r.p_error - helstrom_error_closed_form(FRAC_1_SQRT_2)).abs() < 1e-12);
        assert!((r.p_error - 0.146_446_609_4).abs() < 1e-9);
        assert_eq!(r.p_inconclusive, 0.0);
    }

    #[test]
    fn helstrom_basis_is_symmetric_about_the_pair() {
        // the detector announcing 45° projects onto +67.5°
        let r = helstrom(&polarization_pair(FRAC_PI_4).unwrap()).unwrap();
        let e45 = r.povm[1].matrix();
        let target = PureState::real_angle(67.5f64.to_radians()).projector();
        assert!(e45.approx_eq(target.matrix(), 1e-12));
        let p45 = pure_to_density(&PureState::real_angle(FRAC_PI_4)).unwrap();
        let p0 = pure_to_density(&PureState::real_angle(0.0)).unwrap();
        let ratio = r.povm[1].probability(&p45).unwrap() / r.povm[1].probability(&p0).unwrap();
        assert!((ratio - 5.828).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn helstrom_orthogonal_and_unequal_priors() {
        let r = helstrom(&polarization_pair(PI / 2.0).unwrap()).unwrap();
        assert!(r.p_error.abs() < 1e-15);
        let ens = StateEnsemble::new(
            vec![PureState::real_angle(0.0), PureState::real_angle(0.3)],
            vec![0.8, 0.2],
        )
        .unwrap();
        let r = helstrom(&ens).unwrap();
        // Helstrom bound: ½(1 − √(1 − 4p₁p₂|⟨a|b⟩|²))
        let s = 0.3f64.cos();
        let bound = 0.5 * (1.0 - (1.0 - 4.0 * 0.8 * 0.2 * s * s).sqrt());
        assert!((r.p_error - bound).abs() < 1e-12);
    }

    #[test]
    fn helstrom_rejects_wrong_count() {
        let ens = symmetric_set(3, 0.5).unwrap();
        assert!(matches!(helstrom(&ens), Err(Error::WrongStateCount { .. })));
    }

    #[test]
    fn projective_usd_examples() {
        let r = projective_usd(&polarization_pair(FRAC_PI_4).unwrap()).unwrap();
        assert!((r.p_success - 0.25).abs() < 1e-12);
        assert!(r.p_error.abs() < 1e-15);
        let r = projective_usd(&pair_with_overlap(0.0).unwrap()).unwrap();
        assert!((r.p_success - 0.5).abs() < 1e-12);
        let same = StateEnsemble::equal(vec![PureState::plus(), PureState::plus()]).unwrap();
        let r = projective_usd(&same).unwrap();
        assert!(r.p_success.abs() < 1e-15);
        assert!((r.p_inconclusive - 1.0).abs() < 1e-15);
    }

    #[test]
    fn optimal_usd_examples() {
        let r = optimal_usd(&polarization_pair(FRAC_PI_4).unwrap()).unwrap();
        assert!((r.p_success - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-12);
        assert!((r.p_inconclusive - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(r.p_error < 1e-15);
        assert!(is_psd(r.povm[2].matrix(), 1e-10));
        // unambiguity: E_A never fires on b, E_B never on a
        let ens = polarization_pair(FRAC_PI_4).unwrap();
        let [a, b] = [&ens.states()[0], &ens.states()[1]];
        let ra = pure_to_density(a).unwrap();
        let rb = pure_to_density(b).unwrap();
        assert!(r.povm[0].probability(&rb).unwrap() <= 1e-12);
        assert!(r.povm[1].probability(&ra).unwrap() <= 1e-12);
        let same = StateEnsemble::equal(vec![PureState::plus(), PureState::plus()]).unwrap();
        assert!(matches!(optimal_usd(&same), Err(Error::LinearlyDependent { .. })));
        let uneq = StateEnsemble::new(ens.states().to_vec(), vec![0.3, 0.7]).unwrap();
        assert!(matches!(optimal_usd(&uneq), Err(Error::UnequalPriors(_))));
    }

    #[test]
    fn optimal_dominates_projective() {
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            let p = projective_usd_closed_form(s);
            let o = optimal_usd_closed_form(s);
            if i < 10 {
                assert!(o > p);
            } else {
                assert_eq!(o, p);
            }
        }
        // helstrom success falls with overlap
        let succ: Vec<f64> = (0..=10).map(|i| 1.0 - helstrom_error_closed_form(i as f64 / 10.0)).collect();
        assert!(succ.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn numeric_orthonormal_basis() {
        let states = (0..3).map(|k| PureState::basis(3, k).unwrap()).collect();
        let r = numeric_usd(&StateEnsemble::equal(states).unwrap()).unwrap();
        assert!((r.p_success - 1.0).abs() < 1e-12);
        assert!(r.povm[3].matrix().max_abs() < 1e-12);
    }

    #[test]
    fn numeric_two_state_matches_closed_form() {
        for &theta in &[0.3, FRAC_PI_4, 1.0, 1.4] {
            let ens = polarization_pair(theta).unwrap();
            let r = numeric_usd(&ens).unwrap();
            assert!((r.p_success - optimal_usd_closed_form(theta.cos())).abs() < 1e-6);
        }
    }

    #[test]
    fn numeric_barrier_on_asymmetric_pair() {
        // complex phases break the cyclic-symmetry shortcut
        let a = PureState::normalized(vec![cr(1.0), cr(0.0), cr(0.0)]).unwrap();
        let b = PureState::normalized(vec![crate::linalg::c(0.4, 0.3), cr(0.6), cr(0.2)]).unwrap();
        let ens = StateEnsemble::equal(vec![a.clone(), b.clone()]).unwrap();
        let r = numeric_usd(&ens).unwrap();
        let cert = r.certificate.clone().unwrap();
        assert!(!cert.analytic);
        let s = a.overlap(&b).unwrap().norm();
        assert!((r.p_success - (1.0 - s)).abs() < 1e-6, "{} vs {}", r.p_success, 1.0 - s);
        assert!(cert.duality_gap >= -1e-12 && cert.duality_gap < 1e-6, "{cert:?}");
        assert!(r.p_error < 1e-9);
    }

    #[test]
    fn numeric_rejects_dependent_states() {
        let ens = StateEnsemble::equal(vec![
            PureState::real_angle(0.0),
            PureState::real_angle(0.5),
            PureState::real_angle(1.0),
        ])
        .unwrap();
        assert!(matches!(numeric_usd(&ens), Err(Error::LinearlyDependent { .. })));
    }

    #[test]
    fn symmetric_set_has_requested_overlaps() {
        let ens = symmetric_set(3, 0.5).unwrap();
        let g = ens.gram();
        for j in 0..3 {
            for k in 0..3 {
                let want = if j == k { 1.0 } else { 0.5 };
                assert!((g[(j, k)].re - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn usd_never_misidentifies_in_simulation() {
        let ens = polarization_pair(FRAC_PI_4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for report in [optimal_usd(&ens).unwrap(), projective_usd(&ens).unwrap()] {
            let t = simulate(&ens, &report, 20_000, &mut rng).unwrap();
            assert_eq!(t.wrong, 0);
            assert!(t.correct > 0);
        }
    }
}
