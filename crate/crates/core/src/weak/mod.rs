//! Weak values with pre- and post-selection, ABL conditional probabilities,
//! the three-box games, Hardy's weak-value table and the von Neumann
//! pointer model. Units: ħ = 1.

mod pointer;

pub use pointer::{
    pointer_couple_exact, pointer_postselect, weak_limit_scan, CouplingSpec, GaussianPointer, JointState,
    PostselectedPointer, WeakLimitScan, DEFAULT_HALF_WIDTH_SIGMAS, DEFAULT_POINTS, MAX_LEAKAGE,
};

use crate::bayes::{bayes_update, DiscreteBelief};
use crate::error::{Error, Result};
use crate::interferometry::{hardy_evolution, Port};
use crate::linalg::{eig_hermitian, kron, kron_vec, sandwich, Matrix, C64, DEFAULT_TOL};
use crate::state::{project_update, pure_to_density, PureState, Projector, IMPOSSIBLE_PROB};

/// Below this |⟨f|i⟩| the weak value is reported as an error.
pub const ORTHOGONAL_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PrePostSelection {
    initial: PureState,
    final_state: PureState,
    overlap: C64,
}

impl PrePostSelection {
    pub fn new(initial: PureState, final_state: PureState) -> Result<Self> {
        let overlap = final_state.overlap(&initial)?;
        Ok(Self { initial, final_state, overlap })
    }

    pub fn initial(&self) -> &PureState {
        &self.initial
    }

    pub fn final_state(&self) -> &PureState {
        &self.final_state
    }

    /// ⟨f|i⟩
    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValue {
    pub value: C64,
    pub overlap: C64,
    pub postselection_prob: f64,
}

fn check_observable(a: &Matrix, dim: usize) -> Result<()> {
    if a.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch {
            left: format!("observable {}x{}", a.rows(), a.cols()),
            right: format!("states of dim {dim}"),
        });
    }
    if !a.is_hermitian(DEFAULT_TOL) {
        return Err(Error::NotHermitian { deviation: a.hermiticity_deviation(), tol: DEFAULT_TOL });
    }
    Ok(())
}

/// ⟨f|A|i⟩/⟨f|i⟩
pub fn weak_value(a: &Matrix, sel: &PrePostSelection) -> Result<WeakValue> {
    check_observable(a, sel.dim())?;
    let numerator = sandwich(sel.final_state.amplitudes(), a, sel.initial.amplitudes())?;
    let overlap = sel.overlap;
    if overlap.norm() <= ORTHOGONAL_THRESHOLD {
        return Err(Error::OrthogonalSelection { overlap: overlap.norm(), numerator: numerator.norm() });
    }
    Ok(WeakValue { value: numerator / overlap, overlap, postselection_prob: overlap.norm_sqr() })
}

fn basis_completeness(basis: &[PureState], dim: usize) -> Result<f64> {
    let mut sum = Matrix::zeros(dim, dim);
    for f in basis {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: format!("basis vector of dim {}", f.dim()),
                right: format!("state of dim {dim}"),
            });
        }
        sum = &sum + f.projector().matrix();
    }
    Ok(sum.max_diff(&Matrix::identity(dim)))
}

/// Σ_f |⟨f|i⟩|² Re a_w(f) over a complete orthonormal final basis, which
/// should give back ⟨i|A|i⟩.
pub fn weak_value_sum_rule(a: &Matrix, initial: &PureState, final_basis: &[PureState]) -> Result<f64> {
    check_observable(a, initial.dim())?;
    let dev = basis_completeness(final_basis, initial.dim())?;
    if dev > 1e-10 || final_basis.len() != initial.dim() {
        return Err(Error::IncompleteBasis(dev));
    }
    let mut total = 0.0;
    for f in final_basis {
        let sel = PrePostSelection::new(initial.clone(), f.clone())?;
        total += match weak_value(a, &sel) {
            Ok(w) => w.postselection_prob * w.value.re,
            // this term carries weight |⟨f|i⟩|² ≈ 0 either way
            Err(Error::OrthogonalSelection { .. }) => {
                (sel.overlap.conj() * sandwich(f.amplitudes(), a, initial.amplitudes())?).re
            }
            Err(e) => return Err(e),
        };
    }
    Ok(total)
}

fn check_projector_family(projectors: &[Projector], dim: usize) -> Result<()> {
    let mut sum = Matrix::zeros(dim, dim);
    for p in projectors {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch { left: format!("projector of dim {}", p.dim()), right: format!("states of dim {dim}") });
        }
        sum = &sum + p.matrix();
    }
    let dev = sum.max_diff(&Matrix::identity(dim));
    if dev > 1e-10 {
        return Err(Error::IncompleteBasis(dev));
    }
    Ok(())
}

/// Strong intermediate measurement conditioned on postselection: project
/// |i⟩ with each P_j, then weight each branch by its chance of passing ⟨f|.
pub fn abl_probability(sel: &PrePostSelection, projectors: &[Projector]) -> Result<Vec<f64>> {
    check_projector_family(projectors, sel.dim())?;
    let rho = pure_to_density(&sel.initial)?;
    let f = sel.final_state.amplitudes();
    let mut prior = Vec::with_capacity(projectors.len());
    let mut likelihood = Vec::with_capacity(projectors.len());
    for p in projectors {
        match project_update(&rho, p) {
            Ok((post, prob)) => {
                prior.push(prob);
                likelihood.push(sandwich(f, post.matrix(), f)?.re.max(0.0));
            }
            Err(Error::ImpossibleOutcome { .. }) => {
                prior.push(0.0);
                likelihood.push(0.0);
            }
            Err(e) => return Err(e),
        }
    }
    let total: f64 = prior.iter().sum();
    let prior = DiscreteBelief::new(
        (0..projectors.len()).map(|j| j.to_string()).collect(),
        prior.iter().map(|p| p / total).collect(),
    )?;
    match bayes_update(&prior, &likelihood) {
        Ok(post) => Ok(post.probs().to_vec()),
        Err(Error::Contradiction) => Err(Error::ZeroPostselection(0.0)),
        Err(e) => Err(e),
    }
}

/// |⟨f|P_j|i⟩|² / Σ_k |⟨f|P_k|i⟩|²
pub fn abl_closed_form(sel: &PrePostSelection, projectors: &[Projector]) -> Result<Vec<f64>> {
    let w = projectors
        .iter()
        .map(|p| Ok(sandwich(sel.final_state.amplitudes(), p.matrix(), sel.initial.amplitudes())?.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = w.iter().sum();
    if total <= IMPOSSIBLE_PROB {
        return Err(Error::ZeroPostselection(total));
    }
    Ok(w.iter().map(|x| x / total).collect())
}

/// Σ_j a_j ⟨P_f P_j⟩/⟨P_f⟩ with expectations in |i⟩.
pub fn bayes_weak_value(a: &Matrix, sel: &PrePostSelection) -> Result<C64> {
    check_observable(a, sel.dim())?;
    let i = sel.initial.amplitudes();
    let f = sel.final_state.amplitudes();
    let p_f = sel.overlap.norm_sqr();
    if p_f.sqrt() <= ORTHOGONAL_THRESHOLD {
        let numerator = sandwich(f, a, i)?.norm();
        return Err(Error::OrthogonalSelection { overlap: p_f.sqrt(), numerator });
    }
    let eig = eig_hermitian(a, 1e-12)?;
    let proj_f = Matrix::outer(f, f);
    let mut total = C64::new(0.0, 0.0);
    for (k, &a_k) in eig.values.iter().enumerate() {
        let v = eig.vector(k);
        let joint = sandwich(i, &(&proj_f * &Matrix::outer(&v, &v)), i)?;
        total += joint * a_k;
    }
    Ok(total / p_f)
}

pub const THREE_BOX_LABELS: [&str; 3] = ["A", "B", "C"];
pub const EXTENDED_THREE_BOX_LABELS: [&str; 3] = ["A'", "B", "C'"];

/// i = (|A⟩+|B⟩)/√2, f = (|B⟩+|C⟩)/√2
pub fn three_box() -> PrePostSelection {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    PrePostSelection::new(
        PureState::from_real(&[h, h, 0.0]).expect("normalized"),
        PureState::from_real(&[0.0, h, h]).expect("normalized"),
    )
    .expect("same dimension")
}

/// i = (|A′⟩+|B⟩+|C′⟩)/√3, f = (|A′⟩+|B⟩−|C′⟩)/√3
pub fn extended_three_box() -> PrePostSelection {
    let t = 1.0 / 3f64.sqrt();
    PrePostSelection::new(
        PureState::from_real(&[t, t, t]).expect("normalized"),
        PureState::from_real(&[t, t, -t]).expect("normalized"),
    )
    .expect("same dimension")
}

pub fn box_projectors() -> Vec<Projector> {
    (0..3).map(|k| Projector::basis(3, k).expect("k < 3")).collect()
}

/// Weak values of arm occupations for Hardy's state postselected on D₊∧D₋.
/// Indices: 0 = O, 1 = I; `joints[positron][electron]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyWeakTable {
    pub joints: [[f64; 2]; 2],
    pub positron: [f64; 2],
    pub electron: [f64; 2],
    /// Largest |Im| over all entries.
    pub max_imag: f64,
}

pub fn hardy_weak_table() -> Result<HardyWeakTable> {
    let state = hardy_evolution();
    let initial = PureState::normalized(state.amplitudes.to_vec())?;
    let final_state = PureState::new(kron_vec(&Port::D.vector(), &Port::D.vector()))?;
    let sel = PrePostSelection::new(initial, final_state)?;
    let arm = |k: usize| Projector::basis(2, k).map(|p| p.matrix().clone());
    let id = Matrix::identity(2);
    let mut max_imag: f64 = 0.0;
    let mut wv = |m: Matrix| -> Result<f64> {
        let w = weak_value(&m, &sel)?.value;
        max_imag = max_imag.max(w.im.abs());
        Ok(w.re)
    };
    let mut joints = [[0.0; 2]; 2];
    for (p, row) in joints.iter_mut().enumerate() {
        for (e, cell) in row.iter_mut().enumerate() {
            *cell = wv(kron(&arm(p)?, &arm(e)?))?;
        }
    }
    let positron = [wv(kron(&arm(0)?, &id))?, wv(kron(&arm(1)?, &id))?];
    let electron = [wv(kron(&id, &arm(0)?))?, wv(kron(&id, &arm(1)?))?];
    Ok(HardyWeakTable { joints, positron, electron, max_imag })
}
