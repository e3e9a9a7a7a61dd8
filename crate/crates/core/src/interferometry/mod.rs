//! Two-path interference with which-path markers, the quantum eraser,
//! interaction-free measurement and Hardy's double interferometer.
//!
//! Beamsplitter convention: symmetric, transmission amplitude `t` real and
//! reflection amplitude `i·r`, so a balanced splitter is
//! `[[1, i], [i, 1]]/√2` acting on mode amplitudes `(a, b)`.

mod fringe;
mod hardy;
mod ifm;

pub use fringe::{duality_report, eraser_postselect, fringe_pattern, DualityReport, EraserReport, FringeReport, TwoPathConfig};
pub use hardy::{hardy_detection_probabilities, hardy_evolution, HardyProbabilities, HardyState, Port, HARDY_BASIS};
pub use ifm::{
    ifm_conclusive_fraction, ifm_posterior_after_c_clicks, ifm_repeat_until_conclusive, ifm_single_pass,
    variable_splitter_search, zeno_closed_form, zeno_ifm, Bomb, IfmOutcome, IfmRun, MachZehnder, SplitterSearch,
    ZenoReport, DEFAULT_MAX_ITERATIONS,
};

use crate::error::{Error, Result};
use crate::linalg::{c, cr, Matrix};

/// Symmetric beamsplitter with real transmission amplitude `t`.
pub fn beamsplitter(t: f64) -> Result<Matrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(format!("transmission amplitude {t} not in [0, 1]")));
    }
    let r = (1.0 - t * t).max(0.0).sqrt();
    Matrix::new(2, 2, vec![cr(t), c(0.0, r), c(0.0, r), cr(t)])
}

/// Evenly spaced phases over [0, 2π).
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * std::f64::consts::PI * k as f64 / n as f64).collect()
}

/// (max − min)/(max + min); zero for an all-zero pattern.
pub fn visibility(pattern: &[f64]) -> f64 {
    let max = pattern.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = pattern.iter().cloned().fold(f64::INFINITY, f64::min);
    if max + min <= 0.0 {
        0.0
    } else {
        (max - min) / (max + min)
    }
}
