//! Kraus measurement models, POVMs and their Naimark dilation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, eig_hermitian, psd_sqrt, Matrix, DEFAULT_TOL};
use crate::state::{born_probability, clamp_probability, DensityMatrix, Projector, IMPOSSIBLE_PROB};

/// Ordered Kraus operators with unique outcome labels; Σ M_i†M_i = I.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    kraus: Vec<Matrix>,
    labels: Vec<String>,
}

impl MeasurementModel {
    pub fn new(kraus: Vec<Matrix>, labels: Vec<String>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidModel("no Kraus operators".into()))?;
        let d = first.rows();
        if kraus.iter().any(|m| m.shape() != (d, d)) {
            return Err(Error::InvalidModel("Kraus operators must share one square shape".into()));
        }
        if labels.len() != kraus.len() {
            return Err(Error::InvalidModel(format!(
                "{} labels for {} Kraus operators",
                labels.len(),
                kraus.len()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::InvalidModel("outcome labels must be unique".into()));
        }
        let deviation = completeness_deviation(kraus.iter().map(|m| &m.dagger() * m), d);
        if deviation > DEFAULT_TOL {
            return Err(Error::Incomplete { deviation });
        }
        Ok(Self { kraus, labels })
    }

    /// Labels outcomes "0", "1", ...
    pub fn unlabeled(kraus: Vec<Matrix>) -> Result<Self> {
        let labels = (0..kraus.len()).map(|i| i.to_string()).collect();
        Self::new(kraus, labels)
    }

    /// Projective measurement; projectors double as Kraus operators.
    pub fn projective(projectors: &[Projector]) -> Result<Self> {
        Self::unlabeled(projectors.iter().map(|p| p.matrix().clone()).collect())
    }

    /// The trivial one-outcome model {I}.
    pub fn identity(dim: usize) -> Self {
        Self { kraus: vec![Matrix::identity(dim)], labels: vec!["identity".into()] }
    }

    pub fn kraus(&self) -> &[Matrix] {
        &self.kraus
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].rows()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// U·M_i for every Kraus operator; the POVM is unchanged.
    pub fn left_twisted(&self, u: &Matrix) -> Result<Self> {
        let kraus = self.kraus.iter().map(|m| u.matmul(m)).collect::<Result<Vec<_>>>()?;
        Self::new(kraus, self.labels.clone())
    }
}

fn completeness_deviation(elements: impl Iterator<Item = Matrix>, d: usize) -> f64 {
    let mut sum = Matrix::zeros(d, d);
    for e in elements {
        sum = &sum + &e;
    }
    sum.max_diff(&Matrix::identity(d))
}

/// Hermitian PSD effect operator.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    matrix: Matrix,
}

impl PovmElement {
    pub fn new(matrix: Matrix) -> Result<Self> {
        Self::with_tol(matrix, DEFAULT_TOL)
    }

    pub fn with_tol(matrix: Matrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::InvalidPovm(format!("element not Hermitian (deviation {deviation:.3e})")));
        }
        let min = linalg::min_eigenvalue(&matrix, tol)?;
        if min < -tol {
            return Err(Error::InvalidPovm(format!("element not PSD (min eigenvalue {min:.3e})")));
        }
        Ok(Self { matrix: matrix.hermitian_part() })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Tr(Eρ), clamped.
    pub fn probability(&self, rho: &DensityMatrix) -> Result<f64> {
        clamp_probability(rho.expectation(&self.matrix)?.re)
    }
}

/// Checks a POVM for shared dimension and completeness.
pub fn validate_povm(povm: &[PovmElement]) -> Result<usize> {
    let first = povm.first().ok_or_else(|| Error::InvalidPovm("empty POVM".into()))?;
    let d = first.dim();
    if povm.iter().any(|e| e.dim() != d) {
        return Err(Error::InvalidPovm("elements have different dimensions".into()));
    }
    let deviation = completeness_deviation(povm.iter().map(|e| e.matrix.clone()), d);
    if deviation > DEFAULT_TOL {
        return Err(Error::InvalidPovm(format!(
            "elements do not sum to the identity (deviation {deviation:.3e})"
        )));
    }
    Ok(d)
}

/// E_i = M_i†M_i
pub fn povm_from_kraus(model: &MeasurementModel) -> Vec<PovmElement> {
    model
        .kraus
        .iter()
        .map(|m| PovmElement { matrix: (&m.dagger() * m).hermitian_part() })
        .collect()
}

/// P_i = Tr(E_i ρ)
pub fn outcome_probabilities(rho: &DensityMatrix, model: &MeasurementModel) -> Result<Vec<f64>> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: format!("state of dim {}", rho.dim()),
            right: format!("model of dim {}", model.dim()),
        });
    }
    povm_from_kraus(model).iter().map(|e| e.probability(rho)).collect()
}

/// ρ → M_i ρ M_i† / P_i
pub fn selective_update(
    rho: &DensityMatrix,
    model: &MeasurementModel,
    outcome: usize,
) -> Result<(DensityMatrix, f64)> {
    let m = model
        .kraus
        .get(outcome)
        .ok_or(Error::OutcomeIndex { index: outcome, count: model.len() })?;
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: format!("state of dim {}", rho.dim()),
            right: format!("model of dim {}", model.dim()),
        });
    }
    let unnormalized = &(m * rho.matrix()) * &m.dagger();
    let prob = clamp_probability(linalg::trace(&unnormalized)?.re)?;
    if prob <= IMPOSSIBLE_PROB {
        return Err(Error::ImpossibleOutcome { prob });
    }
    Ok((DensityMatrix::new(unnormalized.scale_real(1.0 / prob))?, prob))
}

/// Result of one sampled measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledOutcome {
    pub index: usize,
    pub label: String,
    pub state: DensityMatrix,
    pub probability: f64,
}

/// Draws an outcome by inverse-CDF over the ordered outcome list and returns
/// the conditional state.
pub fn sample_outcome<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    model: &MeasurementModel,
    rng: &mut R,
) -> Result<SampledOutcome> {
    let probs = outcome_probabilities(rho, model)?;
    let index = inverse_cdf(&probs, rng.random::<f64>());
    let (state, probability) = selective_update(rho, model, index)?;
    Ok(SampledOutcome { index, label: model.labels[index].clone(), state, probability })
}

/// First index whose cumulative probability exceeds `u`; rounding spill past
/// the total lands on the last outcome with nonzero weight.
pub fn inverse_cdf(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Isometry V: system → system⊗ancilla with blocks √E_i, plus the
/// ancilla-indexed projectors I⊗|i⟩⟨i|.
#[derive(Debug, Clone)]
pub struct NaimarkDilation {
    isometry: Matrix,
    system_dim: usize,
    ancilla_dim: usize,
    projectors: Vec<Projector>,
}

impl NaimarkDilation {
    pub fn isometry(&self) -> &Matrix {
        &self.isometry
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    /// V ρ V† on the extended space.
    pub fn dilate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let v = &self.isometry;
        let ext = &v.matmul(rho.matrix())? * &v.dagger();
        DensityMatrix::new(ext)
    }

    /// Projective statistics on the extended space.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        let ext = self.dilate(rho)?;
        self.projectors.iter().map(|p| born_probability(&ext, p)).collect()
    }
}

/// Realizes a POVM as a projective measurement of an ancilla after the
/// isometry V|ψ⟩ = Σ_i (√E_i|ψ⟩) ⊗ |i⟩.
pub fn naimark_dilation(povm: &[PovmElement]) -> Result<NaimarkDilation> {
    let d = validate_povm(povm)?;
    let k = povm.len();
    let roots = povm.iter().map(|e| psd_sqrt(&e.matrix, DEFAULT_TOL)).collect::<Result<Vec<_>>>()?;
    // row index (s, i) = s·k + i: system major, ancilla minor
    let isometry = Matrix::from_fn(d * k, d, |row, t| roots[row % k][(row / k, t)]);
    let vdv = &isometry.dagger() * &isometry;
    let deviation = vdv.max_diff(&Matrix::identity(d));
    if deviation > DEFAULT_TOL {
        return Err(Error::InvalidPovm(format!("dilation is not an isometry (deviation {deviation:.3e})")));
    }
    let projectors = (0..k)
        .map(|i| Ok(Projector::basis(k, i)?.embed(d, 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NaimarkDilation { isometry, system_dim: d, ancilla_dim: k, projectors })
}

/// Symmetric three-outcome qubit POVM, E_k = ⅔|φ_k⟩⟨φ_k| with real |φ_k⟩ at
/// 120° Bloch separation.
pub fn trine_povm() -> Vec<PovmElement> {
    (0..3)
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / 3.0;
            let v = [cr(theta.cos()), cr(theta.sin())];
            PovmElement::new(Matrix::outer(&v, &v).scale_real(2.0 / 3.0)).expect("rank-one PSD")
        })
        .collect()
}

/// E_k = S^{-1/2} A_k S^{-1/2} for random Gram-type A_k, S = Σ A_k.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Result<Vec<PovmElement>> {
    if dim == 0 || outcomes == 0 {
        return Err(Error::InvalidPovm(format!("{outcomes} outcomes on dimension {dim}")));
    }
    let raw: Vec<Matrix> = (0..outcomes)
        .map(|_| {
            let g = Matrix::from_fn(dim, dim, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            &g * &g.dagger()
        })
        .collect();
    let total = raw.iter().skip(1).fold(raw[0].clone(), |acc, m| &acc + m);
    let eig = eig_hermitian(&total, DEFAULT_TOL)?;
    if eig.values[0] <= 1e-9 {
        return Err(Error::InvalidPovm(format!("random POVM sum is singular (min eigenvalue {:.3e})", eig.values[0])));
    }
    let inv_root = eig.map_spectrum(|x| 1.0 / x.sqrt());
    raw.iter()
        .map(|a| PovmElement::new((&(&inv_root * a) * &inv_root).hermitian_part()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr};
    use crate::state::{decay_kraus, evolve_nonselective, mix, project_update, pure_to_density, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus() -> DensityMatrix {
        pure_to_density(&PureState::plus()).unwrap()
    }

    #[test]
    fn decay_povm() {
        let eta = 0.3;
        let povm = povm_from_kraus(&decay_kraus(eta).unwrap());
        assert!(povm[1].matrix().approx_eq(&Matrix::diag_real(&[0.0, eta]), 1e-15));
        assert!(povm[0].matrix().approx_eq(&Matrix::diag_real(&[1.0, 1.0 - eta]), 1e-15));
    }

    #[test]
    fn projective_povm_is_itself() {
        let ps = [Projector::basis(2, 0).unwrap(), Projector::basis(2, 1).unwrap()];
        let model = MeasurementModel::projective(&ps).unwrap();
        let povm = povm_from_kraus(&model);
        for (e, p) in povm.iter().zip(&ps) {
            assert!(e.matrix().approx_eq(p.matrix(), 0.0));
        }
    }

    #[test]
    fn unitary_twist_keeps_povm() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = Matrix::new(2, 2, vec![cr(h), c(0.0, h), c(0.0, h), cr(h)]).unwrap();
        let model = decay_kraus(0.4).unwrap();
        let twisted = model.left_twisted(&u).unwrap();
        for (a, b) in povm_from_kraus(&model).iter().zip(povm_from_kraus(&twisted).iter()) {
            assert!(a.matrix().approx_eq(b.matrix(), 1e-15));
        }
    }

    #[test]
    fn outcome_probability_examples() {
        let probs = outcome_probabilities(&plus(), &decay_kraus(0.5).unwrap()).unwrap();
        assert!((probs[0] - 0.75).abs() < 1e-15 && (probs[1] - 0.25).abs() < 1e-15);
        let ps: Vec<_> = (0..3).map(|k| Projector::basis(3, k).unwrap()).collect();
        let uni = outcome_probabilities(
            &DensityMatrix::maximally_mixed(3),
            &MeasurementModel::projective(&ps).unwrap(),
        )
        .unwrap();
        assert!(uni.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(outcome_probabilities(&plus(), &MeasurementModel::identity(2)).unwrap(), vec![1.0]);
        assert!(outcome_probabilities(&plus(), &MeasurementModel::identity(3)).is_err());
    }

    #[test]
    fn selective_update_examples() {
        let model = decay_kraus(0.5).unwrap();
        let click = model.index_of("click").unwrap();
        let (g, p) = selective_update(&plus(), &model, click).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
        assert!(g.matrix().approx_eq(&Matrix::diag_real(&[1.0, 0.0]), 1e-15));
        let (s, p0) = selective_update(&plus(), &model, model.index_of("no_click").unwrap()).unwrap();
        assert!((p0 - 0.75).abs() < 1e-15);
        assert!((s.entry(0, 0).re - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.entry(1, 1).re - 1.0 / 3.0).abs() < 1e-15);

        let ps = [Projector::basis(2, 0).unwrap(), Projector::basis(2, 1).unwrap()];
        let proj = MeasurementModel::projective(&ps).unwrap();
        let g0 = pure_to_density(&PureState::ground()).unwrap();
        let (same, one) = selective_update(&g0, &proj, 0).unwrap();
        assert_eq!(one, 1.0);
        assert_eq!(same, g0);
        assert!(matches!(selective_update(&g0, &proj, 1), Err(Error::ImpossibleOutcome { .. })));
        assert!(matches!(selective_update(&g0, &proj, 5), Err(Error::OutcomeIndex { .. })));

        // projective models agree with project_update
        let rho = pure_to_density(&PureState::normalized(vec![c(0.2, 0.5), cr(0.7)]).unwrap()).unwrap();
        let (a, pa) = selective_update(&rho, &proj, 1).unwrap();
        let (b, pb) = project_update(&rho, &ps[1]).unwrap();
        assert!((pa - pb).abs() < 1e-15);
        assert!(a.matrix().approx_eq(b.matrix(), 1e-15));
    }

    #[test]
    fn mixture_of_selective_updates_is_nonselective() {
        let rho = pure_to_density(&PureState::normalized(vec![c(0.6, -0.3), c(0.1, 0.7)]).unwrap()).unwrap();
        let model = decay_kraus(0.37).unwrap();
        let parts: Vec<(f64, DensityMatrix)> = (0..model.len())
            .map(|i| {
                let (s, p) = selective_update(&rho, &model, i).unwrap();
                (p, s)
            })
            .collect();
        let mixed = mix(&parts).unwrap();
        let direct = evolve_nonselective(&rho, &model).unwrap();
        assert!(mixed.matrix().approx_eq(direct.matrix(), 1e-10));
    }

    #[test]
    fn model_validation() {
        let bad = MeasurementModel::unlabeled(vec![Matrix::identity(2).scale_real(0.9)]);
        assert!(matches!(bad, Err(Error::Incomplete { .. })));
        let dup = MeasurementModel::new(
            vec![Matrix::diag_real(&[1.0, 0.0]), Matrix::diag_real(&[0.0, 1.0])],
            vec!["a".into(), "a".into()],
        );
        assert!(matches!(dup, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let model = decay_kraus(0.5).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200).map(|_| sample_outcome(&plus(), &model, &mut rng).unwrap().index).collect::<Vec<_>>()
        };
        assert_eq!(run(7), run(7));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let id = MeasurementModel::identity(2);
        for _ in 0..20 {
            assert_eq!(sample_outcome(&plus(), &id, &mut rng).unwrap().label, "identity");
        }
    }

    #[test]
    fn sampled_click_frequency_within_three_sigma() {
        let model = decay_kraus(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let rho = plus();
        let clicks = (0..n)
            .filter(|_| sample_outcome(&rho, &model, &mut rng).unwrap().label == "click")
            .count();
        let p = 0.25;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let freq = clicks as f64 / n as f64;
        assert!((freq - p).abs() <= 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn inverse_cdf_edges() {
        assert_eq!(inverse_cdf(&[0.5, 0.5], 0.0), 0);
        assert_eq!(inverse_cdf(&[0.5, 0.5], 0.5), 1);
        assert_eq!(inverse_cdf(&[0.3, 0.7, 0.0], 0.999_999_999_999_9999), 1);
    }

    #[test]
    fn projective_dilation_is_trivial() {
        let ps: Vec<_> = (0..2).map(|k| Projector::basis(2, k).unwrap()).collect();
        let povm = povm_from_kraus(&MeasurementModel::projective(&ps).unwrap());
        let dil = naimark_dilation(&povm).unwrap();
        assert_eq!(dil.ancilla_dim(), 2);
        let rho = pure_to_density(&PureState::normalized(vec![c(0.3, 0.1), cr(0.9)]).unwrap()).unwrap();
        let direct: Vec<f64> = povm.iter().map(|e| e.probability(&rho).unwrap()).collect();
        let dilated = dil.probabilities(&rho).unwrap();
        for (a, b) in direct.iter().zip(&dilated) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dilation_rejects_incomplete_povm() {
        let e = PovmElement::new(Matrix::diag_real(&[0.5, 0.5])).unwrap();
        assert!(matches!(naimark_dilation(&[e]), Err(Error::InvalidPovm(_))));
        assert!(PovmElement::new(Matrix::diag_real(&[1.5, -0.5])).is_err());
    }

    #[test]
    fn random_trine_dilation() {
        // three rank-1 elements (2/3)|φ_k⟩⟨φ_k| at 0°, 60°, 120°
        let povm: Vec<PovmElement> = (0..3)
            .map(|k| {
                let phi = PureState::real_angle(k as f64 * std::f64::consts::PI / 3.0);
                PovmElement::new(phi.projector().matrix().scale_real(2.0 / 3.0)).unwrap()
            })
            .collect();
        let dil = naimark_dilation(&povm).unwrap();
        let v = dil.isometry();
        assert!((&v.dagger() * v).approx_eq(&Matrix::identity(2), 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let psi = PureState::normalized(vec![
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            ])
            .unwrap();
            let rho = pure_to_density(&psi).unwrap();
            let dilated = dil.probabilities(&rho).unwrap();
            for (e, q) in povm.iter().zip(&dilated) {
                let direct = rho.expectation(e.matrix()).unwrap().re;
                assert!((direct - q).abs() < 1e-9);
            }
        }
    }
}
