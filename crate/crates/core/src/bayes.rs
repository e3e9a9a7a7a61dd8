//! Classical Bayesian updating: discrete hypotheses, gridded coin posteriors
//! and the usual point estimators.

use crate::error::{Error, Result};

/// Normalized distribution over labelled hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBelief {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl DiscreteBelief {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if labels.len() != probs.len() || labels.is_empty() {
            return Err(Error::InvalidShape(format!("{} labels for {} probabilities", labels.len(), probs.len())));
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::BadProbabilities { sum });
        }
        Ok(Self { labels, probs })
    }

    pub fn from_pairs(pairs: &[(&str, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|(l, _)| l.to_string()).collect(), pairs.iter().map(|p| p.1).collect())
    }

    pub fn uniform(labels: &[&str]) -> Result<Self> {
        let n = labels.len() as f64;
        Self::new(labels.iter().map(|s| s.to_string()).collect(), vec![1.0 / n; labels.len()])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.probs[i])
    }
}

fn check_likelihoods(prior: &DiscreteBelief, likelihoods: &[f64]) -> Result<()> {
    if likelihoods.len() != prior.len() {
        return Err(Error::InvalidShape(format!(
            "{} likelihoods for {} hypotheses",
            likelihoods.len(),
            prior.len()
        )));
    }
    if likelihoods.iter().any(|&l| l < 0.0 || !l.is_finite()) {
        return Err(Error::OutOfRange("likelihoods must be finite and non-negative".into()));
    }
    Ok(())
}

/// posterior_i ∝ prior_i · likelihood_i
pub fn bayes_update(prior: &DiscreteBelief, likelihoods: &[f64]) -> Result<DiscreteBelief> {
    check_likelihoods(prior, likelihoods)?;
    let joint: Vec<f64> = prior.probs.iter().zip(likelihoods).map(|(p, l)| p * l).collect();
    let total: f64 = joint.iter().sum();
    if total <= 0.0 {
        return Err(Error::Contradiction);
    }
    Ok(DiscreteBelief { labels: prior.labels.clone(), probs: joint.iter().map(|j| j / total).collect() })
}

/// Folds a sequence of observations into the prior. Accumulates in log space
/// so long runs of small likelihoods do not underflow.
pub fn sequential_update(prior: &DiscreteBelief, observations: &[Vec<f64>]) -> Result<DiscreteBelief> {
    let mut logp: Vec<f64> = prior.probs.iter().map(|p| p.ln()).collect();
    for obs in observations {
        check_likelihoods(prior, obs)?;
        for (lp, l) in logp.iter_mut().zip(obs) {
            *lp += l.ln();
        }
    }
    let max = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::Contradiction);
    }
    let weights: Vec<f64> = logp.iter().map(|lp| (lp - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(DiscreteBelief { labels: prior.labels.clone(), probs: weights.iter().map(|w| w / total).collect() })
}

/// H heads in N tosses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinData {
    heads: u64,
    tosses: u64,
}

impl CoinData {
    pub fn new(heads: u64, tosses: u64) -> Result<Self> {
        if heads > tosses {
            return Err(Error::InvalidCoinData { heads, tosses });
        }
        Ok(Self { heads, tosses })
    }

    pub fn heads(&self) -> u64 {
        self.heads
    }

    pub fn tosses(&self) -> u64 {
        self.tosses
    }

    pub fn tails(&self) -> u64 {
        self.tosses - self.heads
    }
}

/// ln L(p) = H ln p + T ln(1−p), with 0·ln 0 = 0.
pub fn binomial_log_likelihood(data: CoinData, p: f64) -> f64 {
    let term = |k: u64, x: f64| if k == 0 { 0.0 } else { k as f64 * x.ln() };
    term(data.heads, p) + term(data.tails(), 1.0 - p)
}

/// Unnormalized L(p) = p^H (1−p)^(N−H).
pub fn binomial_likelihood(data: CoinData) -> impl Fn(f64) -> f64 {
    move |p| binomial_log_likelihood(data, p).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    Flat,
    /// Jeffreys form ∝ 1/√(p(1−p)).
    Bures,
}

/// Quadrature attached to a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// Nodes include both endpoints.
    Trapezoid,
    /// Nodes are cell centres; endpoints excluded.
    Midpoint,
}

/// Posterior density for a coin's heads probability sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    grid: Vec<f64>,
    density: Vec<f64>,
    weights: Vec<f64>,
    quadrature: Quadrature,
}

impl GridPosterior {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn quadrature(&self) -> Quadrature {
        self.quadrature
    }

    /// ∫ f(p) P(p) dp under the grid's quadrature.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.grid.iter().zip(&self.density).zip(&self.weights).map(|((&p, &d), &w)| w * d * f(p)).sum()
    }

    pub fn total(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|p| p)
    }

    pub fn argmax(&self) -> f64 {
        let (i, _) = self
            .density
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
        self.grid[i]
    }
}

pub const MIN_GRID_SIZE: usize = 101;

/// Normalized posterior over p ∈ [0, 1]. Flat priors use an endpoint grid
/// with the trapezoid rule; the Bures prior uses a midpoint grid so the
/// integrable endpoint singularity is never evaluated.
pub fn grid_posterior(data: CoinData, prior: PriorKind, grid_size: usize) -> Result<GridPosterior> {
    if grid_size < MIN_GRID_SIZE {
        return Err(Error::OutOfRange(format!("grid size {grid_size} < {MIN_GRID_SIZE}")));
    }
    let n = grid_size;
    let (grid, weights, quadrature): (Vec<f64>, Vec<f64>, _) = match prior {
        PriorKind::Flat => {
            let h = 1.0 / (n - 1) as f64;
            let grid = (0..n).map(|i| i as f64 * h).collect();
            let weights = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect();
            (grid, weights, Quadrature::Trapezoid)
        }
        PriorKind::Bures => {
            let h = 1.0 / n as f64;
            ((0..n).map(|i| (i as f64 + 0.5) * h).collect(), vec![h; n], Quadrature::Midpoint)
        }
    };
    let log_prior = |p: f64| match prior {
        PriorKind::Flat => 0.0,
        PriorKind::Bures => -0.5 * (p * (1.0 - p)).ln(),
    };
    let logd: Vec<f64> = grid.iter().map(|&p| binomial_log_likelihood(data, p) + log_prior(p)).collect();
    let max = logd.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logd.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = raw.iter().zip(&weights).map(|(d, w)| d * w).sum();
    Ok(GridPosterior { grid, density: raw.iter().map(|d| d / z).collect(), weights, quadrature })
}

/// Point estimates for a coin. `None` marks quantities undefined at N = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinEstimates {
    pub mle: Option<f64>,
    /// Laplace's rule of succession, (H+1)/(N+2).
    pub mean_flat: f64,
    /// (H+½)/(N+1)
    pub mean_bures: f64,
    /// √(p̂(1−p̂)/N)
    pub naive_stderr: Option<f64>,
}

pub fn coin_estimators(data: CoinData) -> CoinEstimates {
    let h = data.heads as f64;
    let n = data.tosses as f64;
    let mle = (data.tosses > 0).then(|| h / n);
    CoinEstimates {
        mle,
        mean_flat: (h + 1.0) / (n + 2.0),
        mean_bures: (h + 0.5) / (n + 1.0),
        naive_stderr: mle.map(|p| (p * (1.0 - p) / n).sqrt()),
    }
}
