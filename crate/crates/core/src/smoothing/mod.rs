//! Smoothed potentials and their estimators.

mod ftrl;
mod gaussian;
mod infconv;
mod schedule;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use ftrl::{
    entropic_ftrl_hessian, entropic_ftrl_potential, quadratic_ftrl_hessian, quadratic_ftrl_potential,
    FtrlEvaluation,
};
pub use gaussian::{
    gaussian_smoothed_gradient, gaussian_smoothed_hessian, gaussian_smoothed_value, Covariance,
    GaussianPotential, GaussianSmoothingConfig, StepTerms, DEFAULT_SAMPLES,
};
pub use infconv::{infconv_bruteforce_value, InfConvRegularizer, InfConvValue};
pub use schedule::{next_eta, EtaSchedule, NormHistory};

use crate::error::{Error, Result};
use crate::potentials::{dot, DecisionSet};
use crate::stats::Moments;

/// Monte Carlo reporting envelope. Closed forms report `std_error = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples_used: usize,
}

impl PotentialEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, samples_used: 0 }
    }

    pub fn from_moments(m: &Moments) -> Self {
        Self { value: m.mean(), std_error: m.std_error(), samples_used: m.count() as usize }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientEstimate {
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub samples_used: usize,
}

impl GradientEstimate {
    pub fn exact(mean: Vec<f64>) -> Self {
        let n = mean.len();
        Self { mean, std_error: vec![0.0; n], samples_used: 0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HessianForm {
    /// Second-moment form over potential values.
    ValueForm,
    /// Cross-moment of maximizers and perturbations; lower variance.
    #[default]
    GradientForm,
}

/// Hessian estimate with the raw matrix and its symmetrization `(H + Hᵀ)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianEstimate {
    pub raw: DMatrix<f64>,
    pub raw_std_error: DMatrix<f64>,
    pub symmetrized: DMatrix<f64>,
    pub symmetrized_std_error: DMatrix<f64>,
    pub form: HessianForm,
    pub samples_used: usize,
}

impl HessianEstimate {
    pub fn exact(h: DMatrix<f64>) -> Self {
        let (r, c) = h.shape();
        let sym = (&h + h.transpose()) * 0.5;
        Self {
            raw: h,
            raw_std_error: DMatrix::zeros(r, c),
            symmetrized: sym,
            symmetrized_std_error: DMatrix::zeros(r, c),
            form: HessianForm::GradientForm,
            samples_used: 0,
        }
    }

    /// Largest eigenvalue of the symmetrized estimate and its eigenvector.
    pub fn max_eigen(&self) -> (f64, Vec<f64>) {
        let eig = self.symmetrized.clone().symmetric_eigen();
        let (idx, &val) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty matrix");
        (val, eig.eigenvectors.column(idx).iter().copied().collect())
    }

    /// Largest entrywise gap between the raw estimate and its transpose.
    pub fn asymmetry(&self) -> f64 {
        (&self.raw - self.raw.transpose()).amax()
    }
}

/// A potential the learner can play the gradient of.
#[derive(Clone, Debug)]
pub enum SmoothedPotential {
    /// Gaussian smoothing estimated over a fixed draw set.
    GaussianMc(GaussianPotential),
    /// `η log Σ exp(Θ/η)` over the simplex.
    EntropicFtrl { eta: f64 },
    /// Huber potential over the unit ball.
    QuadraticFtrl { eta: f64 },
    /// Unsmoothed support function (Follow the Leader).
    Baseline(DecisionSet),
}

impl SmoothedPotential {
    pub fn gaussian(set: &DecisionSet, cfg: &GaussianSmoothingConfig) -> Result<Self> {
        Ok(Self::GaussianMc(GaussianPotential::from_config(set, cfg)?))
    }

    /// Decision set whose support function this potential smooths, for `dim` coordinates.
    pub fn decision_set(&self, dim: usize) -> Result<DecisionSet> {
        match self {
            SmoothedPotential::GaussianMc(p) => Ok(p.set().clone()),
            SmoothedPotential::Baseline(set) => Ok(set.clone()),
            SmoothedPotential::EntropicFtrl { .. } => DecisionSet::simplex(dim),
            SmoothedPotential::QuadraticFtrl { .. } => DecisionSet::l2_ball(dim),
        }
    }

    /// Scale parameter; `None` for the unsmoothed baseline.
    pub fn eta(&self) -> Option<f64> {
        match self {
            SmoothedPotential::GaussianMc(p) => Some(p.eta()),
            SmoothedPotential::EntropicFtrl { eta } | SmoothedPotential::QuadraticFtrl { eta } => Some(*eta),
            SmoothedPotential::Baseline(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, SmoothedPotential::GaussianMc(_))
    }

    pub fn value(&self, theta: &[f64]) -> Result<PotentialEstimate> {
        match self {
            SmoothedPotential::GaussianMc(p) => p.value(theta),
            SmoothedPotential::EntropicFtrl { eta } => {
                Ok(PotentialEstimate::exact(entropic_ftrl_potential(theta, *eta)?.value))
            }
            SmoothedPotential::QuadraticFtrl { eta } => {
                Ok(PotentialEstimate::exact(quadratic_ftrl_potential(theta, *eta)?.value))
            }
            SmoothedPotential::Baseline(set) => Ok(PotentialEstimate::exact(set.baseline_value(theta)?)),
        }
    }

    pub fn gradient(&self, theta: &[f64]) -> Result<GradientEstimate> {
        match self {
            SmoothedPotential::GaussianMc(p) => p.gradient(theta),
            SmoothedPotential::EntropicFtrl { eta } => {
                Ok(GradientEstimate::exact(entropic_ftrl_potential(theta, *eta)?.gradient))
            }
            SmoothedPotential::QuadraticFtrl { eta } => {
                Ok(GradientEstimate::exact(quadratic_ftrl_potential(theta, *eta)?.gradient))
            }
            SmoothedPotential::Baseline(set) => {
                Ok(GradientEstimate::exact(crate::potentials::linear_oracle(set, theta)?.maximizer))
            }
        }
    }

    /// Hessian; exact for the FTRL potentials, estimated for Gaussian smoothing.
    pub fn hessian(&self, theta: &[f64], form: HessianForm) -> Result<HessianEstimate> {
        match self {
            SmoothedPotential::GaussianMc(p) => p.hessian(theta, form),
            SmoothedPotential::EntropicFtrl { eta } => Ok(HessianEstimate::exact(entropic_ftrl_hessian(theta, *eta)?)),
            SmoothedPotential::QuadraticFtrl { eta } => {
                Ok(HessianEstimate::exact(quadratic_ftrl_hessian(theta, *eta)?))
            }
            SmoothedPotential::Baseline(_) => {
                Err(Error::InvalidParameter("the baseline potential is not twice differentiable".into()))
            }
        }
    }

    /// `D(y, x) = f(y) − f(x) − ⟨∇f(x), y − x⟩`; common random numbers for the MC variant.
    pub fn bregman(&self, y: &[f64], x: &[f64]) -> Result<PotentialEstimate> {
        if y.len() != x.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        match self {
            SmoothedPotential::GaussianMc(p) => p.bregman(y, x),
            _ => {
                let fy = self.value(y)?.value;
                let fx = self.value(x)?.value;
                let g = self.gradient(x)?.mean;
                let step: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
                Ok(PotentialEstimate::exact(fy - fx - dot(&g, &step)))
            }
        }
    }
}
