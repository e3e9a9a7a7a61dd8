//! Pure and mixed states, projective updates, and the spontaneous-emission
//! decay channel.
//!
//! Basis ordering for the two-level atom is `(|g⟩, |e⟩)`; the field register
//! is `(|0γ⟩, |1γ⟩)`. Composite atom⊗field states put the atom first.

use crate::error::{Error, Result};
use crate::linalg::{
    self, cr, eig_hermitian, inner, norm_sqr, trace, Matrix, C64, DEFAULT_TOL,
};
use crate::measurement::MeasurementModel;
use rand::Rng;

/// Index of `|g⟩` in the atomic basis.
pub const GROUND: usize = 0;
/// Index of `|e⟩` in the atomic basis.
pub const EXCITED: usize = 1;

/// Rounding slack allowed below zero before a probability is an error.
pub const PROB_SLACK: f64 = 1e-10;
/// Outcomes at or below this probability are treated as impossible.
pub const IMPOSSIBLE_PROB: f64 = 1e-12;

/// Clamps rounding noise in [-1e-10, 0) to 0 and (1, 1+1e-10] to 1.
pub fn clamp_probability(p: f64) -> Result<f64> {
    if p < -PROB_SLACK || !p.is_finite() {
        return Err(Error::NegativeProbability(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Accepts amplitudes already normalized within 1e-10.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tol(amplitudes, 1e-10)
    }

    pub fn with_tol(amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidShape("empty state".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        let norm_sq = norm_sqr(&amplitudes);
        if (norm_sq - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sq: n * n });
        }
        Self::new(amplitudes.into_iter().map(|z| z / n).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| cr(x)).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::OutOfRange(format!("basis index {k} in dimension {dim}")));
        }
        let mut v = vec![cr(0.0); dim];
        v[k] = cr(1.0);
        Ok(Self { amplitudes: v })
    }

    pub fn ground() -> Self {
        Self { amplitudes: vec![cr(1.0), cr(0.0)] }
    }

    pub fn excited() -> Self {
        Self { amplitudes: vec![cr(0.0), cr(1.0)] }
    }

    /// (|g⟩ + |e⟩)/√2
    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { amplitudes: vec![cr(s), cr(s)] }
    }

    /// cos θ |0⟩ + sin θ |1⟩, e.g. a linear polarization at angle θ.
    pub fn real_angle(theta: f64) -> Self {
        Self { amplitudes: vec![cr(theta.cos()), cr(theta.sin())] }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// ⟨self|other⟩
    pub fn overlap(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: format!("state of dim {}", self.dim()),
                right: format!("state of dim {}", other.dim()),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// |⟨self|other⟩|², the phase-insensitive comparison.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState { amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes) }
    }

    pub fn projector(&self) -> Projector {
        Projector { matrix: Matrix::outer(&self.amplitudes, &self.amplitudes) }
    }
}

/// Trace-one, Hermitian, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Matrix,
}

impl DensityMatrix {
    pub fn new(matrix: Matrix) -> Result<Self> {
        Self::with_tol(matrix, DEFAULT_TOL)
    }

    pub fn with_tol(matrix: Matrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > tol {
            return Err(Error::InvalidDensity(format!("Hermiticity deviation {dev:.3e}")));
        }
        let tr = trace(&matrix)?;
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = eig_hermitian(&matrix, tol)?.values[0];
        if min < -tol {
            return Err(Error::InvalidDensity(format!("min eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix: matrix.hermitian_part() })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: Matrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    /// Tr(ρA)
    pub fn expectation(&self, a: &Matrix) -> Result<C64> {
        trace(&self.matrix.matmul(a)?)
    }

    /// Bloch vector (x, y, z) of a qubit with z = ρ_ee − ρ_gg, so the ground
    /// state sits at the south pole.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::InvalidShape(format!("Bloch vector needs dim 2, got {}", self.dim())));
        }
        let rho_ge = self.entry(GROUND, EXCITED);
        Ok([
            2.0 * rho_ge.re,
            -2.0 * rho_ge.im,
            self.entry(EXCITED, EXCITED).re - self.entry(GROUND, GROUND).re,
        ])
    }
}

/// Hermitian idempotent operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: Matrix,
}

impl Projector {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > DEFAULT_TOL {
            return Err(Error::NotHermitian { deviation: dev, tol: DEFAULT_TOL });
        }
        let idem = (&matrix * &matrix).max_diff(&matrix);
        if idem > DEFAULT_TOL {
            return Err(Error::NotProjector(idem));
        }
        Ok(Self { matrix })
    }

    /// Projector onto the span of orthonormal vectors.
    pub fn onto(vectors: &[PureState]) -> Result<Self> {
        let first = vectors.first().ok_or_else(|| Error::InvalidShape("no vectors".into()))?;
        let mut m = Matrix::zeros(first.dim(), first.dim());
        for v in vectors {
            m = m.try_add(&Matrix::outer(v.amplitudes(), v.amplitudes()))?;
        }
        Self::new(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: Matrix::identity(dim) }
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        Ok(PureState::basis(dim, k)?.projector())
    }

    /// I_left ⊗ P ⊗ I_right
    pub fn embed(&self, left: usize, right: usize) -> Projector {
        let m = linalg::kron(&linalg::kron(&Matrix::identity(left), &self.matrix), &Matrix::identity(right));
        Projector { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Per-step emission probability and number of discrete steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayModel {
    eta: f64,
    steps: usize,
}

impl DecayModel {
    pub fn new(eta: f64, steps: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::OutOfRange(format!("emission probability {eta} not in [0, 1]")));
        }
        if steps == 0 {
            return Err(Error::OutOfRange("decay model needs at least one step".into()));
        }
        Ok(Self { eta, steps })
    }

    /// `steps` steps spanning exactly one half-life.
    pub fn half_life(steps: usize) -> Result<Self> {
        Self::new(eta_per_step(steps), steps)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Emission probability per step such that `n` steps make one half-life.
pub fn eta_per_step(n: usize) -> f64 {
    1.0 - 2f64.powf(-1.0 / n as f64)
}

pub fn pure_to_density(psi: &PureState) -> Result<DensityMatrix> {
    let norm_sq = norm_sqr(psi.amplitudes());
    if (norm_sq - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(DensityMatrix { matrix: Matrix::outer(psi.amplitudes(), psi.amplitudes()) })
}

/// Σ P_m ρ_m
pub fn mix(components: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
    let first = components.first().ok_or_else(|| Error::InvalidShape("empty mixture".into()))?;
    let dim = first.1.dim();
    let sum: f64 = components.iter().map(|(p, _)| p).sum();
    if components.iter().any(|(p, _)| *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadProbabilities { sum });
    }
    let mut acc = Matrix::zeros(dim, dim);
    for (p, rho) in components {
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: format!("dim {dim}"),
                right: format!("dim {}", rho.dim()),
            });
        }
        acc = acc.try_add(&rho.matrix.scale_real(*p))?;
    }
    DensityMatrix::new(acc)
}

/// Tr(ρP), clamped to [0, 1].
pub fn born_probability(rho: &DensityMatrix, p: &Projector) -> Result<f64> {
    check_dims(rho.dim(), p.dim())?;
    clamp_probability(rho.expectation(p.matrix())?.re)
}

/// (PρP / Tr(Pρ), Tr(Pρ))
pub fn project_update(rho: &DensityMatrix, p: &Projector) -> Result<(DensityMatrix, f64)> {
    let prob = born_probability(rho, p)?;
    if prob <= IMPOSSIBLE_PROB {
        return Err(Error::ImpossibleOutcome { prob });
    }
    let m = &(p.matrix() * rho.matrix()) * p.matrix();
    Ok((DensityMatrix::new(m.scale_real(1.0 / prob))?, prob))
}

/// Tr ρ²
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Kraus pair for one step of spontaneous emission with probability `eta`:
/// outcome "no_click" M₀ = |g⟩⟨g| + √(1−η)|e⟩⟨e|, outcome "click"
/// M₁ = √η |g⟩⟨e|.
pub fn decay_kraus(eta: f64) -> Result<MeasurementModel> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange(format!("emission probability {eta} not in [0, 1]")));
    }
    let mut m0 = Matrix::zeros(2, 2);
    m0[(GROUND, GROUND)] = cr(1.0);
    m0[(EXCITED, EXCITED)] = cr((1.0 - eta).sqrt());
    let mut m1 = Matrix::zeros(2, 2);
    m1[(GROUND, EXCITED)] = cr(eta.sqrt());
    MeasurementModel::new(vec![m0, m1], vec!["no_click".into(), "click".into()])
}

/// ρ → Σ M_i ρ M_i†
pub fn evolve_nonselective(rho: &DensityMatrix, model: &MeasurementModel) -> Result<DensityMatrix> {
    check_dims(rho.dim(), model.dim())?;
    let mut acc = Matrix::zeros(rho.dim(), rho.dim());
    for m in model.kraus() {
        acc = acc.try_add(&(&(m * rho.matrix()) * &m.dagger()))?;
    }
    DensityMatrix::new(acc)
}

/// Repeated non-selective decay steps; returns `steps + 1` states starting
/// with `rho0`.
pub fn decay_trajectory(rho0: &DensityMatrix, model: &DecayModel) -> Result<Vec<DensityMatrix>> {
    let kraus = decay_kraus(model.eta)?;
    let mut out = Vec::with_capacity(model.steps + 1);
    out.push(rho0.clone());
    for _ in 0..model.steps {
        let next = evolve_nonselective(out.last().expect("non-empty"), &kraus)?;
        out.push(next);
    }
    Ok(out)
}

/// Least-squares slope of ln(y) against step index; returns the decay
/// constant per step (positive for decaying y). Points with y ≤ `floor` are
/// skipped.
pub fn fit_decay_constant(values: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, &y)| y > floor)
        .map(|(i, &y)| (i as f64, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

/// Population and coherence decay constants fitted from a qubit trajectory,
/// as (k_population, k_coherence).
pub fn fit_t1_t2(traj: &[DensityMatrix]) -> Option<(f64, f64)> {
    let pop: Vec<f64> = traj.iter().map(|r| r.entry(EXCITED, EXCITED).re).collect();
    let coh: Vec<f64> = traj.iter().map(|r| r.entry(GROUND, EXCITED).norm()).collect();
    Some((fit_decay_constant(&pop, 1e-300)?, fit_decay_constant(&coh, 1e-300)?))
}

/// Normalized state with independent uniform(−½, ½) real and imaginary parts.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    PureState::normalized((0..dim).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect())
}

/// G G† / Tr(G G†) for a random complex G; full rank almost surely.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    let g = Matrix::from_fn(dim, dim, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let m = &g * &g.dagger();
    let tr = trace(&m)?.re;
    DensityMatrix::new(m.scale_real(1.0 / tr))
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: format!("dim {a}"), right: format!("dim {b}") });
    }
    Ok(())
}
