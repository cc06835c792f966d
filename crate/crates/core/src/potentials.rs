//! Decision sets and the baseline potential `Φ(Θ) = max_{w∈X} ⟨w, Θ⟩`.
//!
//! Every built-in set has an exact linear maximization oracle, so the
//! baseline potential is the support function of the set evaluated in closed
//! form. Ties are broken toward the smallest index.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Norms used for Lipschitz constants, reward budgets and schedules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn of(&self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn dual(&self) -> Norm {
        match self {
            Norm::L1 => Norm::Linf,
            Norm::L2 => Norm::L2,
            Norm::Linf => Norm::L1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    /// Probability simplex in `dim` coordinates (the experts setting).
    Simplex { dim: usize },
    /// Unit Euclidean ball.
    L2Ball { dim: usize },
    /// The interval [0, 1].
    Interval01,
    /// Convex hull of a finite list of points.
    VertexSet { vertices: Vec<Vec<f64>> },
}

/// A bounded decision set `X` with a linear maximization oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetKind", into = "SetKind")]
pub struct DecisionSet {
    kind: SetKind,
}

impl TryFrom<SetKind> for DecisionSet {
    type Error = Error;

    fn try_from(kind: SetKind) -> Result<Self> {
        match &kind {
            SetKind::Simplex { dim } | SetKind::L2Ball { dim } if *dim == 0 => {
                return Err(Error::InvalidParameter("dimension must be at least 1".into()))
            }
            SetKind::VertexSet { vertices } => {
                let first = vertices
                    .first()
                    .ok_or_else(|| Error::InvalidParameter("vertex set is empty".into()))?;
                if first.is_empty() {
                    return Err(Error::InvalidParameter("dimension must be at least 1".into()));
                }
                for v in vertices {
                    if v.len() != first.len() {
                        return Err(Error::DimensionMismatch { expected: first.len(), got: v.len() });
                    }
                    ensure_finite(v, "vertex")?;
                }
            }
            _ => {}
        }
        Ok(Self { kind })
    }
}

impl From<DecisionSet> for SetKind {
    fn from(set: DecisionSet) -> Self {
        set.kind
    }
}

/// Exact maximizer of a linear functional over `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArgmaxResult {
    pub maximizer: Vec<f64>,
    pub value: f64,
    pub tie_broken: bool,
}

/// Borrowed view of an oracle maximizer; avoids allocating inside Monte Carlo loops.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Leader<'a> {
    /// Standard basis vector `e_i`.
    Basis(usize),
    /// `scale · v`.
    Scaled(f64, &'a [f64]),
    Zero,
}

impl Leader<'_> {
    #[inline]
    pub(crate) fn dot(&self, v: &[f64]) -> f64 {
        match *self {
            Leader::Basis(i) => v[i],
            Leader::Scaled(s, p) => s * dot(p, v),
            Leader::Zero => 0.0,
        }
    }

    #[inline]
    pub(crate) fn add_scaled_to(&self, weight: f64, acc: &mut [f64]) {
        match *self {
            Leader::Basis(i) => acc[i] += weight,
            Leader::Scaled(s, p) => {
                for (a, x) in acc.iter_mut().zip(p) {
                    *a += weight * s * x;
                }
            }
            Leader::Zero => {}
        }
    }

    #[inline]
    pub(crate) fn component(&self, i: usize) -> f64 {
        match *self {
            Leader::Basis(j) => {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            }
            Leader::Scaled(s, p) => s * p[i],
            Leader::Zero => 0.0,
        }
    }

    pub(crate) fn to_vec(self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        self.add_scaled_to(1.0, &mut out);
        out
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Index of the first maximal coordinate, and whether another coordinate ties it.
#[inline]
fn first_argmax(values: &[f64]) -> (usize, f64, bool) {
    let mut best = 0;
    let mut best_val = values[0];
    let mut tie = false;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best_val {
            best = i;
            best_val = v;
            tie = false;
        } else if v == best_val {
            tie = true;
        }
    }
    (best, best_val, tie)
}

impl DecisionSet {
    pub fn new(kind: SetKind) -> Result<Self> {
        Self::try_from(kind)
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        Self::new(SetKind::Simplex { dim })
    }

    pub fn l2_ball(dim: usize) -> Result<Self> {
        Self::new(SetKind::L2Ball { dim })
    }

    pub fn interval01() -> Self {
        Self { kind: SetKind::Interval01 }
    }

    pub fn vertex_set(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(SetKind::VertexSet { vertices })
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SetKind::Simplex { dim } | SetKind::L2Ball { dim } => *dim,
            SetKind::Interval01 => 1,
            SetKind::VertexSet { vertices } => vertices[0].len(),
        }
    }

    /// Norm bounding the reward vectors in the canonical game over this set:
    /// `L∞` against the simplex and the interval, `L2` otherwise.
    pub fn reward_norm(&self) -> Norm {
        match self.kind {
            SetKind::Simplex { .. } | SetKind::Interval01 => Norm::Linf,
            SetKind::L2Ball { .. } | SetKind::VertexSet { .. } => Norm::L2,
        }
    }

    pub fn check_input(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: theta.len() });
        }
        ensure_finite(theta, "reward vector")
    }

    /// Oracle maximizer without input validation.
    #[inline]
    pub(crate) fn leader<'a>(&'a self, theta: &'a [f64]) -> (Leader<'a>, f64, bool) {
        match &self.kind {
            SetKind::Simplex { .. } => {
                let (i, v, tie) = first_argmax(theta);
                (Leader::Basis(i), v, tie)
            }
            SetKind::L2Ball { .. } => {
                let norm = dot(theta, theta).sqrt();
                if norm == 0.0 {
                    (Leader::Zero, 0.0, true)
                } else {
                    (Leader::Scaled(1.0 / norm, theta), norm, false)
                }
            }
            SetKind::Interval01 => {
                let x = theta[0];
                if x > 0.0 {
                    (Leader::Basis(0), x, false)
                } else {
                    (Leader::Zero, 0.0, x == 0.0)
                }
            }
            SetKind::VertexSet { vertices } => {
                let mut best = 0;
                let mut best_val = dot(&vertices[0], theta);
                let mut tie = false;
                for (i, v) in vertices.iter().enumerate().skip(1) {
                    let val = dot(v, theta);
                    if val > best_val {
                        best = i;
                        best_val = val;
                        tie = false;
                    } else if val == best_val {
                        tie = true;
                    }
                }
                (Leader::Scaled(1.0, &vertices[best]), best_val, tie)
            }
        }
    }

    /// Baseline potential `Φ(Θ)` without input validation.
    #[inline]
    pub(crate) fn support(&self, theta: &[f64]) -> f64 {
        match &self.kind {
            SetKind::Simplex { .. } => theta.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            SetKind::L2Ball { .. } => dot(theta, theta).sqrt(),
            SetKind::Interval01 => theta[0].max(0.0),
            SetKind::VertexSet { vertices } => {
                vertices.iter().map(|v| dot(v, theta)).fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    /// Baseline potential with validation.
    pub fn baseline_value(&self, theta: &[f64]) -> Result<f64> {
        self.check_input(theta)?;
        Ok(self.support(theta))
    }

    /// Points used as candidate comparators by the greedy adversary.
    pub(crate) fn extreme_points(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let basis = |i: usize, s: f64| {
            let mut e = vec![0.0; n];
            e[i] = s;
            e
        };
        match &self.kind {
            SetKind::Simplex { .. } => (0..n).map(|i| basis(i, 1.0)).collect(),
            SetKind::L2Ball { .. } => {
                (0..n).flat_map(|i| [basis(i, 1.0), basis(i, -1.0)]).collect()
            }
            SetKind::Interval01 => vec![vec![0.0], vec![1.0]],
            SetKind::VertexSet { vertices } => vertices.clone(),
        }
    }

    /// Membership test within `tol`.
    pub fn contains(&self, w: &[f64], tol: f64) -> bool {
        if w.len() != self.dim() || w.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match &self.kind {
            SetKind::Simplex { .. } => {
                w.iter().all(|&x| x >= -tol) && (w.iter().sum::<f64>() - 1.0).abs() <= tol
            }
            SetKind::L2Ball { .. } => dot(w, w).sqrt() <= 1.0 + tol,
            SetKind::Interval01 => w[0] >= -tol && w[0] <= 1.0 + tol,
            SetKind::VertexSet { vertices } => convex_hull_residual(vertices, w) <= tol,
        }
    }

    /// `sup_{x∈X} ‖x‖` in the requested norm.
    pub fn lipschitz_constant(&self, norm: Norm) -> f64 {
        match &self.kind {
            SetKind::Simplex { .. } | SetKind::Interval01 => 1.0,
            SetKind::L2Ball { dim } => match norm {
                Norm::L2 | Norm::Linf => 1.0,
                Norm::L1 => (*dim as f64).sqrt(),
            },
            // A convex function on a polytope peaks at a vertex.
            SetKind::VertexSet { vertices } => {
                vertices.iter().map(|v| norm.of(v)).fold(0.0, f64::max)
            }
        }
    }
}

/// Exact linear maximization over `set`, with minimum-index tie-breaking.
pub fn linear_oracle(set: &DecisionSet, theta: &[f64]) -> Result<ArgmaxResult> {
    set.check_input(theta)?;
    let (leader, value, tie_broken) = set.leader(theta);
    Ok(ArgmaxResult { maximizer: leader.to_vec(set.dim()), value, tie_broken })
}

/// `sup_{x∈X} ‖x‖`.
pub fn lipschitz_constant(set: &DecisionSet, norm: Norm) -> f64 {
    set.lipschitz_constant(norm)
}

/// Distance from `w` to the convex hull of `vertices`, via Lawson–Hanson
/// non-negative least squares on `[V; 1ᵀ] λ = [w; 1]`.
fn convex_hull_residual(vertices: &[Vec<f64>], w: &[f64]) -> f64 {
    let n = w.len();
    let k = vertices.len();
    // Heavy weight on the affine row so that λ sums to one.
    let affine_weight = 1e3;
    let a = DMatrix::from_fn(n + 1, k, |r, c| if r < n { vertices[c][r] } else { affine_weight });
    let mut b = DVector::from_iterator(n + 1, w.iter().copied().chain(std::iter::once(0.0)));
    b[n] = affine_weight;
    let lambda = nnls(&a, &b);
    let residual = &a * &lambda - &b;
    let point_err: f64 = (0..n).map(|r| residual[r] * residual[r]).sum::<f64>().sqrt();
    point_err + (residual[n] / affine_weight).abs()
}

fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let k = a.ncols();
    let mut x = DVector::zeros(k);
    let mut passive = vec![false; k];
    let tol = 1e-13 * a.norm().max(1.0);
    for _ in 0..(3 * k + 10) {
        let grad = a.transpose() * (b - a * &x);
        let candidate = (0..k)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| grad[i].total_cmp(&grad[j]));
        match candidate {
            Some(j) if grad[j] > tol => passive[j] = true,
            _ => break,
        }
        loop {
            let idx: Vec<usize> = (0..k).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(&idx);
            let z_sub = match sub.clone().svd(true, true).solve(b, 1e-14) {
                Ok(z) => z,
                Err(_) => return x,
            };
            if z_sub.iter().all(|&z| z > 0.0) {
                for (pos, &j) in idx.iter().enumerate() {
                    x[j] = z_sub[pos];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (pos, &j) in idx.iter().enumerate() {
                if z_sub[pos] <= 0.0 {
                    let denom = x[j] - z_sub[pos];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (pos, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z_sub[pos] - x[j]);
                if x[j] <= tol {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}
