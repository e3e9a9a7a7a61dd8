use crate::discrimination::{helstrom, StateEnsemble};
use crate::error::{Error, Result};
use crate::linalg::{c, cr, inner, kron_vec, C64};
use crate::state::PureState;

use super::{beamsplitter, visibility};

const MIN_PHASES: usize = 8;

/// Path amplitudes, which-path marker states and the phases to scan.
#[derive(Debug, Clone)]
pub struct TwoPathConfig {
    pub amp_a: C64,
    pub amp_b: C64,
    pub marker_a: PureState,
    pub marker_b: PureState,
    pub phases: Vec<f64>,
}

impl TwoPathConfig {
    pub fn new(amp_a: C64, amp_b: C64, marker_a: PureState, marker_b: PureState, phases: Vec<f64>) -> Result<Self> {
        let norm = amp_a.norm_sqr() + amp_b.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm_sq: norm });
        }
        if marker_a.dim() != marker_b.dim() {
            return Err(Error::DimensionMismatch {
                left: format!("marker of dim {}", marker_a.dim()),
                right: format!("marker of dim {}", marker_b.dim()),
            });
        }
        Ok(Self { amp_a, amp_b, marker_a, marker_b, phases })
    }

    /// Equal path amplitudes with real markers of overlap `s` ∈ [0, 1].
    pub fn balanced_with_overlap(s: f64, phases: Vec<f64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange(format!("marker overlap {s} not in [0, 1]")));
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(cr(h), cr(h), PureState::real_angle(0.0), PureState::real_angle(s.acos()), phases)
    }

    pub fn marker_overlap(&self) -> C64 {
        inner(self.marker_a.amplitudes(), self.marker_b.amplitudes())
    }
}

#[derive(Debug, Clone)]
pub struct FringeReport {
    pub phases: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub visibility: f64,
    pub distinguishability: f64,
}

/// Probability at the detector that projects the path onto (|a⟩+|b⟩)/√2,
/// after a phase e^{iφ} on path b, with the markers traced out:
/// ½[|ψ_a|² + |ψ_b|² + 2 Re(e^{iφ} ψ_a* ψ_b ⟨A|B⟩)].
pub fn fringe_pattern(config: &TwoPathConfig) -> Result<FringeReport> {
    if config.phases.len() < MIN_PHASES {
        return Err(Error::PhaseGridTooSmall(config.phases.len()));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let probabilities = config
        .phases
        .iter()
        .map(|&phi| {
            let b = config.amp_b * C64::from_polar(1.0, phi);
            // amplitude for detection with the marker left in basis state m
            let amp: Vec<C64> = config
                .marker_a
                .amplitudes()
                .iter()
                .zip(config.marker_b.amplitudes())
                .map(|(ma, mb)| (config.amp_a * ma + b * mb) * h)
                .collect();
            amp.iter().map(|z| z.norm_sqr()).sum::<f64>().clamp(0.0, 1.0)
        })
        .collect::<Vec<f64>>();
    Ok(FringeReport {
        visibility: visibility(&probabilities),
        distinguishability: distinguishability(config)?,
        phases: config.phases.clone(),
        probabilities,
    })
}

/// Best which-path bias from the markers: 2·P_helstrom − 1 with the path
/// weights as priors.
fn distinguishability(config: &TwoPathConfig) -> Result<f64> {
    let wa = config.amp_a.norm_sqr();
    let ensemble = StateEnsemble::new(vec![config.marker_a.clone(), config.marker_b.clone()], vec![wa, 1.0 - wa])?;
    let report = helstrom(&ensemble)?;
    Ok((report.p_success - report.p_error).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport {
    pub distinguishability: f64,
    pub visibility: f64,
    /// 1 − D² − V²
    pub slack: f64,
}

pub fn duality_report(config: &TwoPathConfig) -> Result<DualityReport> {
    let fringe = fringe_pattern(config)?;
    let d = fringe.distinguishability;
    let v = fringe.visibility;
    Ok(DualityReport { distinguishability: d, visibility: v, slack: 1.0 - d * d - v * v })
}

/// Quantum-eraser statistics for the source (|s₁⟩|i₁⟩ + e^{iφ}|s₂⟩|i₂⟩)/√2
/// with a balanced eraser splitter on the idler and the signal detected in
/// (|s₁⟩+|s₂⟩)/√2.
#[derive(Debug, Clone)]
pub struct EraserReport {
    pub phases: Vec<f64>,
    /// Signal pattern conditioned on an idler click at d₁.
    pub pattern_d1: Vec<f64>,
    pub pattern_d2: Vec<f64>,
    /// Joint probability signal-click ∧ d_k.
    pub joint_d1: Vec<f64>,
    pub joint_d2: Vec<f64>,
    pub p_select_d1: f64,
    pub p_select_d2: f64,
    /// Signal pattern with the idler ignored (joint_d1 + joint_d2).
    pub unconditioned: Vec<f64>,
    /// Signal pattern with the idler traced out and no eraser at all.
    pub unconditioned_no_eraser: Vec<f64>,
    pub visibility_d1: f64,
    pub visibility_d2: f64,
    /// δ in pattern ∝ 1 + cos(φ + δ).
    pub offset_d1: f64,
    pub offset_d2: f64,
    /// ⟨i₁|i₂⟩ after the eraser splitter; unitarity keeps it at 0.
    pub marker_overlap_after_splitter: C64,
}

/// Fringe phase δ for a pattern of the form a + b·cos(φ + δ).
fn fringe_offset(phases: &[f64], pattern: &[f64]) -> f64 {
    let s: C64 = phases.iter().zip(pattern).map(|(&phi, &p)| C64::from_polar(p, phi)).sum();
    -s.arg()
}

pub fn eraser_postselect(phases: &[f64]) -> Result<EraserReport> {
    if phases.len() < MIN_PHASES {
        return Err(Error::PhaseGridTooSmall(phases.len()));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bs = beamsplitter(h)?;
    // idler modes (i₁, i₂) → (d₁, d₂): columns of the splitter
    let i1 = bs.col(0);
    let i2 = bs.col(1);
    let marker_overlap_after_splitter = inner(&i1, &i2);
    let s1 = [cr(1.0), cr(0.0)];
    let s2 = [cr(0.0), cr(1.0)];
    let signal_detector = [cr(h), cr(h)];

    let mut out = EraserReport {
        phases: phases.to_vec(),
        pattern_d1: Vec::new(),
        pattern_d2: Vec::new(),
        joint_d1: Vec::new(),
        joint_d2: Vec::new(),
        p_select_d1: 0.0,
        p_select_d2: 0.0,
        unconditioned: Vec::new(),
        unconditioned_no_eraser: Vec::new(),
        visibility_d1: 0.0,
        visibility_d2: 0.0,
        offset_d1: 0.0,
        offset_d2: 0.0,
        marker_overlap_after_splitter,
    };
    let mut select = [0.0f64; 2];
    for &phi in phases {
        let ph = C64::from_polar(1.0, phi);
        // signal ⊗ idler, idler already in the (d₁, d₂) basis
        let psi: Vec<C64> = kron_vec(&s1, &i1)
            .iter()
            .zip(kron_vec(&s2, &i2))
            .map(|(a, b)| (a + b * ph) * h)
            .collect();
        let mut joint = [0.0f64; 2];
        let mut sel = [0.0f64; 2];
        for (k, (j, s)) in joint.iter_mut().zip(sel.iter_mut()).enumerate() {
            let d = if k == 0 { [cr(1.0), cr(0.0)] } else { [cr(0.0), cr(1.0)] };
            let sig: Vec<C64> = (0..2).map(|sidx| psi[sidx * 2] * d[0].conj() + psi[sidx * 2 + 1] * d[1].conj()).collect();
            *s = sig.iter().map(|z| z.norm_sqr()).sum();
            *j = inner(&signal_detector, &sig).norm_sqr();
        }
        out.joint_d1.push(joint[0]);
        out.joint_d2.push(joint[1]);
        out.pattern_d1.push(joint[0] / sel[0]);
        out.pattern_d2.push(joint[1] / sel[1]);
        out.unconditioned.push(joint[0] + joint[1]);
        select[0] += sel[0];
        select[1] += sel[1];

        // no eraser: trace the idler in its original basis
        let no_eraser: f64 = [(c(h, 0.0), C64::new(0.0, 0.0)), (C64::new(0.0, 0.0), ph * h)]
            .iter()
            .map(|&(a1, a2)| inner(&signal_detector, &[a1, a2]).norm_sqr())
            .sum();
        out.unconditioned_no_eraser.push(no_eraser);
    }
    let n = phases.len() as f64;
    out.p_select_d1 = select[0] / n;
    out.p_select_d2 = select[1] / n;
    out.visibility_d1 = visibility(&out.pattern_d1);
    out.visibility_d2 = visibility(&out.pattern_d2);
    out.offset_d1 = fringe_offset(phases, &out.pattern_d1);
    out.offset_d2 = fringe_offset(phases, &out.pattern_d2);
    Ok(out)
}
