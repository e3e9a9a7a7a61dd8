use crate::error::Result;
use crate::linalg::{cr, inner, kron_vec, C64};
use crate::state::PureState;

/// Ordering of `HardyState::amplitudes`: positron index · 2 + electron index,
/// with O = 0 and I = 1.
pub const HARDY_BASIS: [&str; 4] = ["O+O-", "O+I-", "I+O-", "I+I-"];

#[derive(Debug, Clone, PartialEq)]
pub struct HardyState {
    pub amplitudes: [C64; 4],
    pub boom: C64,
}

impl HardyState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() + self.boom.norm_sqr()
    }

    pub fn amplitude(&self, label: &str) -> Option<C64> {
        HARDY_BASIS.iter().position(|b| *b == label).map(|i| self.amplitudes[i])
    }
}

/// Output ports: C = (O+I)/√2, D = (O−I)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    C,
    D,
}

impl Port {
    pub const ALL: [Port; 2] = [Port::C, Port::D];

    pub fn vector(self) -> [C64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Port::C => [cr(h), cr(h)],
            Port::D => [cr(h), cr(-h)],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Port::C => "C",
            Port::D => "D",
        }
    }
}

/// Both particles split evenly into O and I; the I₊I₋ component annihilates.
pub fn hardy_evolution() -> HardyState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let half = [cr(h), cr(h)];
    let psi = kron_vec(&half, &half);
    let mut amplitudes = [psi[0], psi[1], psi[2], psi[3]];
    let boom = amplitudes[3];
    amplitudes[3] = C64::new(0.0, 0.0);
    HardyState { amplitudes, boom }
}

#[derive(Debug, Clone)]
pub struct HardyProbabilities {
    /// joint[positron port][electron port], ports ordered (C, D)
    pub joint: [[f64; 2]; 2],
    pub boom: f64,
    pub p_d_plus: f64,
    pub p_d_minus: f64,
    /// Electron state in the (O, I) basis given D₊.
    pub electron_given_d_plus: PureState,
}

impl HardyProbabilities {
    pub fn joint(&self, positron: Port, electron: Port) -> f64 {
        self.joint[positron as usize][electron as usize]
    }

    pub fn total(&self) -> f64 {
        self.joint.iter().flatten().sum::<f64>() + self.boom
    }
}

fn positron_projection(state: &HardyState, port: Port) -> [C64; 2] {
    let v = port.vector();
    let a = &state.amplitudes;
    [v[0].conj() * a[0] + v[1].conj() * a[2], v[0].conj() * a[1] + v[1].conj() * a[3]]
}

pub fn hardy_detection_probabilities() -> Result<HardyProbabilities> {
    let state = hardy_evolution();
    let mut joint = [[0.0; 2]; 2];
    for p in Port::ALL {
        for e in Port::ALL {
            let amp = inner(&kron_vec(&p.vector(), &e.vector()), &state.amplitudes);
            joint[p as usize][e as usize] = amp.norm_sqr();
        }
    }
    let electron = positron_projection(&state, Port::D);
    Ok(HardyProbabilities {
        joint,
        boom: state.boom.norm_sqr(),
        p_d_plus: joint[1][0] + joint[1][1],
        p_d_minus: joint[0][1] + joint[1][1],
        electron_given_d_plus: PureState::normalized(electron.to_vec())?,
    })
}
