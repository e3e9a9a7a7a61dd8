use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, Matrix, C64};
use crate::state::PureState;

use super::{weak_value, PrePostSelection};

pub const DEFAULT_POINTS: usize = 2048;
pub const DEFAULT_HALF_WIDTH_SIGMAS: f64 = 12.0;
/// Largest norm a displaced packet may lose off the grid edges.
pub const MAX_LEAKAGE: f64 = 1e-6;

/// Integrated coupling G in U = exp(−i G A⊗P).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    pub g: f64,
}

impl CouplingSpec {
    pub fn new(g: f64) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::NonFinite("coupling strength"));
        }
        Ok(Self { g })
    }
}

/// Gaussian pointer ∝ exp(−x²/4σ²) sampled on x_j = x_min + jΔx,
/// Δx = (x_max − x_min)/n, periodic for the momentum transform.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPointer {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub sigma: f64,
    pub wavefunction: Vec<C64>,
}

impl GaussianPointer {
    pub fn new(sigma: f64, half_width: f64, n_points: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::OutOfRange(format!("pointer width {sigma} must be positive")));
        }
        if !(half_width > 0.0) || n_points < 16 {
            return Err(Error::OutOfRange(format!("grid ±{half_width} with {n_points} points")));
        }
        let mut p = Self { x_min: -half_width, x_max: half_width, n_points, sigma, wavefunction: Vec::new() };
        p.wavefunction = p.packet(0.0);
        let norm = p.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::GridTooSmall { leaked: 1.0 - norm });
        }
        Ok(p)
    }

    /// Default grid: 2048 points over ±(12σ + pad).
    pub fn with_padding(sigma: f64, pad: f64) -> Result<Self> {
        Self::new(sigma, DEFAULT_HALF_WIDTH_SIGMAS * sigma + pad.abs(), DEFAULT_POINTS)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_points).map(|j| self.x_min + j as f64 * dx).collect()
    }

    /// Σ|ψ|²Δx
    pub fn norm(&self) -> f64 {
        discrete_norm(&self.wavefunction, self.dx())
    }

    /// The continuum packet displaced by `shift`, sampled on this grid.
    pub fn packet(&self, shift: f64) -> Vec<C64> {
        let s2 = self.sigma * self.sigma;
        let amp = (2.0 * std::f64::consts::PI * s2).powf(-0.25);
        self.grid()
            .iter()
            .map(|&x| C64::new(amp * (-(x - shift).powi(2) / (4.0 * s2)).exp(), 0.0))
            .collect()
    }
}

fn discrete_norm(psi: &[C64], dx: f64) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx
}

fn mean_x(psi: &[C64], grid: &[f64]) -> f64 {
    let w: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    psi.iter().zip(grid).map(|(z, x)| z.norm_sqr() * x).sum::<f64>() / w
}

/// ⟨p⟩ from the discrete Fourier transform, momenta 2πm/(nΔx) with m
/// wrapped to [−n/2, n/2).
fn mean_p(psi: &[C64], dx: f64) -> f64 {
    let n = psi.len();
    let mut buf = psi.to_vec();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let dk = 2.0 * std::f64::consts::PI / (n as f64 * dx);
    let (mut num, mut den) = (0.0, 0.0);
    for (m, z) in buf.iter().enumerate() {
        let m = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
        num += m * dk * z.norm_sqr();
        den += z.norm_sqr();
    }
    num / den
}

/// System ⊗ pointer state; `components[s]` is the pointer wavefunction
/// attached to system basis state |s⟩.
#[derive(Debug, Clone)]
pub struct JointState {
    pub pointer: GaussianPointer,
    pub components: Vec<Vec<C64>>,
    pub coupling: CouplingSpec,
    /// Eigenvalues of the coupled observable, ascending.
    pub eigenvalues: Vec<f64>,
    /// Weight |⟨a_k|ψ⟩|² on each eigen-branch.
    pub branch_weights: Vec<f64>,
}

impl JointState {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| discrete_norm(c, self.pointer.dx())).sum()
    }

    /// Pointer mean with the system ignored.
    pub fn unconditioned_mean_x(&self) -> f64 {
        let grid = self.pointer.grid();
        let (mut num, mut den) = (0.0, 0.0);
        for c in &self.components {
            for (z, x) in c.iter().zip(&grid) {
                num += z.norm_sqr() * x;
                den += z.norm_sqr();
            }
        }
        num / den
    }
}

/// Σ_k c_k |a_k⟩ ⊗ ψ(x − G a_k), with each displaced packet evaluated
/// exactly on the grid.
pub fn pointer_couple_exact(
    pointer: &GaussianPointer,
    system: &PureState,
    a: &Matrix,
    coupling: CouplingSpec,
) -> Result<JointState> {
    let d = system.dim();
    if a.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            left: format!("observable {}x{}", a.rows(), a.cols()),
            right: format!("system of dim {d}"),
        });
    }
    let eig = eig_hermitian(a, 1e-12)?;
    let dx = pointer.dx();
    let mut components = vec![vec![C64::new(0.0, 0.0); pointer.n_points]; d];
    let mut branch_weights = Vec::with_capacity(d);
    for (k, &a_k) in eig.values.iter().enumerate() {
        let v = eig.vector(k);
        let c_k = crate::linalg::inner(&v, system.amplitudes());
        branch_weights.push(c_k.norm_sqr());
        let packet = pointer.packet(coupling.g * a_k);
        let leaked = 1.0 - discrete_norm(&packet, dx);
        if leaked.abs() > MAX_LEAKAGE {
            return Err(Error::GridTooSmall { leaked });
        }
        for (s, comp) in components.iter_mut().enumerate() {
            let w = c_k * v[s];
            if w.norm() == 0.0 {
                continue;
            }
            for (z, p) in comp.iter_mut().zip(&packet) {
                *z += w * p;
            }
        }
    }
    Ok(JointState {
        pointer: pointer.clone(),
        components,
        coupling,
        eigenvalues: eig.values,
        branch_weights,
    })
}

#[derive(Debug, Clone)]
pub struct PostselectedPointer {
    /// Normalized so that Σ|φ|²Δx = 1.
    pub wavefunction: Vec<C64>,
    pub mean_x: f64,
    pub mean_p: f64,
    pub p_select: f64,
}

/// Pointer left after the system passes ⟨f|.
pub fn pointer_postselect(joint: &JointState, f: &PureState) -> Result<PostselectedPointer> {
    if f.dim() != joint.components.len() {
        return Err(Error::DimensionMismatch {
            left: format!("postselection of dim {}", f.dim()),
            right: format!("system of dim {}", joint.components.len()),
        });
    }
    let n = joint.pointer.n_points;
    let dx = joint.pointer.dx();
    let mut phi = vec![C64::new(0.0, 0.0); n];
    for (fs, comp) in f.amplitudes().iter().zip(&joint.components) {
        let w = fs.conj();
        for (z, c) in phi.iter_mut().zip(comp) {
            *z += w * c;
        }
    }
    let p_select = discrete_norm(&phi, dx);
    if p_select <= 1e-14 {
        return Err(Error::ZeroPostselection(p_select));
    }
    let scale = 1.0 / p_select.sqrt();
    for z in phi.iter_mut() {
        *z *= scale;
    }
    Ok(PostselectedPointer {
        mean_x: mean_x(&phi, &joint.pointer.grid()),
        mean_p: mean_p(&phi, dx),
        wavefunction: phi,
        p_select,
    })
}

/// Postselected pointer shifts at G, G/2, G/4 against the weak value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakLimitScan {
    pub weak_value: C64,
    pub sigma: f64,
    pub g: [f64; 3],
    pub mean_x: [f64; 3],
    pub mean_p: [f64; 3],
    /// mean_x(G)/mean_x(G/2) and mean_x(G/2)/mean_x(G/4); 2 for a linear response.
    pub shift_ratio_x: [f64; 2],
    pub shift_ratio_p: [f64; 2],
    /// |mean_x/G − Re a_w| at successive halvings, divided pairwise.
    pub error_ratio_x: [f64; 2],
    /// Same for mean_p·2σ²/G − Im a_w.
    pub error_ratio_p: [f64; 2],
    /// mean_x/G − Re a_w and mean_p·2σ²/G − Im a_w at the smallest G.
    pub residual_x: f64,
    pub residual_p: f64,
}

pub fn weak_limit_scan(a: &Matrix, sel: &PrePostSelection, sigma: f64, g: f64) -> Result<WeakLimitScan> {
    let aw = weak_value(a, sel)?.value;
    let gs = [g, g / 2.0, g / 4.0];
    let spread = a.max_abs() * 2.0;
    let pointer = GaussianPointer::with_padding(sigma, g.abs() * spread)?;
    let mut mx = [0.0; 3];
    let mut mp = [0.0; 3];
    for (k, &gk) in gs.iter().enumerate() {
        let joint = pointer_couple_exact(&pointer, sel.initial(), a, CouplingSpec::new(gk)?)?;
        let post = pointer_postselect(&joint, sel.final_state())?;
        mx[k] = post.mean_x;
        mp[k] = post.mean_p;
    }
    let s2 = 2.0 * sigma * sigma;
    let ex: Vec<f64> = (0..3).map(|k| (mx[k] / gs[k] - aw.re).abs()).collect();
    let ep: Vec<f64> = (0..3).map(|k| (mp[k] * s2 / gs[k] - aw.im).abs()).collect();
    Ok(WeakLimitScan {
        weak_value: aw,
        sigma,
        g: gs,
        mean_x: mx,
        mean_p: mp,
        shift_ratio_x: [mx[0] / mx[1], mx[1] / mx[2]],
        shift_ratio_p: [mp[0] / mp[1], mp[1] / mp[2]],
        error_ratio_x: [ex[0] / ex[1], ex[1] / ex[2]],
        error_ratio_p: [ep[0] / ep[1], ep[1] / ep[2]],
        residual_x: mx[2] / gs[2] - aw.re,
        residual_p: mp[2] * s2 / gs[2] - aw.im,
    })
}
