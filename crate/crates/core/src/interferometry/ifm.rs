use rand::Rng;

use crate::bayes::{sequential_update, DiscreteBelief};
use crate::error::{Error, Result};
use crate::linalg::{cr, Matrix, C64};
use crate::measurement::inverse_cdf;

use super::beamsplitter;

pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000;

const DARK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bomb {
    Working,
    Defective,
}

impl Bomb {
    pub fn name(self) -> &'static str {
        match self {
            Bomb::Working => "working",
            Bomb::Defective => "defective",
        }
    }
}

/// Mach-Zehnder with the photon entering mode a and the bomb sitting in
/// arm b. Port a after the second splitter is D (dark for a balanced
/// interferometer with nothing in the arms), port b is C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachZehnder {
    pub bs1_transmission: f64,
    pub bs2_transmission: f64,
}

impl MachZehnder {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        beamsplitter(t1)?;
        beamsplitter(t2)?;
        Ok(Self { bs1_transmission: t1, bs2_transmission: t2 })
    }

    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { bs1_transmission: h, bs2_transmission: h }
    }
}

/// One photon through the interferometer: belief over {C, D, boom}.
pub fn ifm_single_pass(mz: &MachZehnder, bomb: Bomb) -> Result<DiscreteBelief> {
    let bs1 = beamsplitter(mz.bs1_transmission)?;
    let bs2 = beamsplitter(mz.bs2_transmission)?;
    let mut arms = bs1.apply(&[cr(1.0), cr(0.0)])?;
    let mut boom = 0.0;
    if bomb == Bomb::Working {
        boom = arms[1].norm_sqr();
        arms[1] = C64::new(0.0, 0.0);
    }
    let out = bs2.apply(&arms)?;
    let (d, c) = (out[0].norm_sqr(), out[1].norm_sqr());
    let total = c + d + boom;
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::BadProbabilities { sum: total });
    }
    DiscreteBelief::from_pairs(&[("C", c / total), ("D", d / total), ("boom", boom / total)])
}

/// P(D | D or boom) for a working bomb.
pub fn ifm_conclusive_fraction(mz: &MachZehnder) -> Result<f64> {
    let p = ifm_single_pass(mz, Bomb::Working)?;
    let (d, boom) = (p.probs()[1], p.probs()[2]);
    if d + boom <= 0.0 {
        return Err(Error::ImpossibleOutcome { prob: d + boom });
    }
    Ok(d / (d + boom))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfmOutcome {
    CertifiedWorking,
    Exploded,
    MaxIterations,
}

impl IfmOutcome {
    pub fn name(self) -> &'static str {
        match self {
            IfmOutcome::CertifiedWorking => "certified_working",
            IfmOutcome::Exploded => "exploded",
            IfmOutcome::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IfmRun {
    pub outcome: IfmOutcome,
    /// Photons sent, including the terminating one.
    pub photons: u64,
}

/// Sends photons until D or boom; C clicks repeat.
pub fn ifm_repeat_until_conclusive<R: Rng + ?Sized>(
    mz: &MachZehnder,
    bomb: Bomb,
    max_iterations: u64,
    rng: &mut R,
) -> Result<IfmRun> {
    let probs = ifm_single_pass(mz, bomb)?;
    let probs = probs.probs();
    for photons in 1..=max_iterations {
        match inverse_cdf(probs, rng.random::<f64>()) {
            0 => continue,
            1 => return Ok(IfmRun { outcome: IfmOutcome::CertifiedWorking, photons }),
            _ => return Ok(IfmRun { outcome: IfmOutcome::Exploded, photons }),
        }
    }
    Ok(IfmRun { outcome: IfmOutcome::MaxIterations, photons: max_iterations })
}

/// Belief over {working, defective} after `n` C clicks, starting from ½–½.
/// A surviving working bomb gives C with P(C)/(1 − P(boom)).
pub fn ifm_posterior_after_c_clicks(mz: &MachZehnder, n: usize) -> Result<DiscreteBelief> {
    let w = ifm_single_pass(mz, Bomb::Working)?;
    let d = ifm_single_pass(mz, Bomb::Defective)?;
    let survive = 1.0 - w.probs()[2];
    if survive <= 0.0 {
        return Err(Error::ImpossibleOutcome { prob: survive });
    }
    let like = vec![w.probs()[0] / survive, d.probs()[0]];
    let prior = DiscreteBelief::uniform(&["working", "defective"])?;
    sequential_update(&prior, &vec![like; n])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitterSearch {
    pub t1_sq: f64,
    pub t2_sq: f64,
    pub conclusive_fraction: f64,
    pub candidates: usize,
}

/// Grid search over (t₁², t₂²) = (j/(n+1), k/(n+1)), keeping only settings
/// where D stays dark for a defective bomb.
pub fn variable_splitter_search(n: usize) -> Result<SplitterSearch> {
    let mut best: Option<SplitterSearch> = None;
    let mut candidates = 0;
    let step = 1.0 / (n as f64 + 1.0);
    for j in 1..=n {
        for k in 1..=n {
            let (x, y) = (j as f64 * step, k as f64 * step);
            let mz = MachZehnder::new(x.sqrt(), y.sqrt())?;
            if ifm_single_pass(&mz, Bomb::Defective)?.probs()[1] > DARK_TOL {
                continue;
            }
            candidates += 1;
            let f = ifm_conclusive_fraction(&mz)?;
            if best.is_none_or(|b| f > b.conclusive_fraction) {
                best = Some(SplitterSearch { t1_sq: x, t2_sq: y, conclusive_fraction: f, candidates: 0 });
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::OutOfRange(format!("no dark-port setting on a {n}×{n} grid")))?;
    best.candidates = candidates;
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoReport {
    pub n_passes: usize,
    pub p_detect_working: f64,
    pub p_explode: f64,
    /// Defective bomb still found in the start polarization after n passes.
    pub p_detect_defective_error: f64,
}

/// cos^{2n}(π/2n)
pub fn zeno_closed_form(n: usize) -> f64 {
    let theta = std::f64::consts::PI / (2.0 * n as f64);
    theta.cos().powi(2 * n as i32)
}

/// Rotate the polarization (H, V) by π/2n per pass; a working bomb absorbs
/// the V component each pass.
pub fn zeno_ifm(n_passes: usize) -> Result<ZenoReport> {
    if n_passes == 0 {
        return Err(Error::OutOfRange("n_passes must be at least 1".into()));
    }
    let theta = std::f64::consts::PI / (2.0 * n_passes as f64);
    let (s, co) = theta.sin_cos();
    let rot = Matrix::from_real_rows(&[&[co, -s], &[s, co]])?;

    let mut working = vec![cr(1.0), cr(0.0)];
    let mut p_explode = 0.0;
    let mut defective = working.clone();
    for _ in 0..n_passes {
        working = rot.apply(&working)?;
        p_explode += working[1].norm_sqr();
        working[1] = C64::new(0.0, 0.0);
        defective = rot.apply(&defective)?;
    }
    let p_detect_working = working[0].norm_sqr();
    if (p_detect_working + p_explode - 1.0).abs() > 1e-10 {
        return Err(Error::BadProbabilities { sum: p_detect_working + p_explode });
    }
    Ok(ZenoReport {
        n_passes,
        p_detect_working,
        p_explode,
        p_detect_defective_error: defective[0].norm_sqr(),
    })
}
