//! One-dimensional perturbation distributions.

use std::io::Read;
use std::path::Path;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rng::open01;

const QUANTILE_TOL: f64 = 1e-10;

/// Piecewise-linear CDF through strictly increasing `(x, F)` knots with
/// `F = 0` at the first knot and `F = 1` at the last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfTable {
    x: Vec<f64>,
    f: Vec<f64>,
}

impl CdfTable {
    pub fn new(x: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if x.len() != f.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: f.len() });
        }
        if x.len() < 2 {
            return Err(Error::InvalidParameter("a CDF table needs at least two rows".into()));
        }
        if x.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("CDF table"));
        }
        if let Some(i) = (1..x.len()).find(|&i| x[i] <= x[i - 1]) {
            return Err(Error::NonInvertible(format!("x is not strictly increasing at row {}", i + 1)));
        }
        if let Some(i) = (1..f.len()).find(|&i| f[i] <= f[i - 1]) {
            return Err(Error::NonInvertible(format!("F is not strictly increasing at row {}", i + 1)));
        }
        if f[0] != 0.0 || f[f.len() - 1] != 1.0 {
            return Err(Error::InvalidParameter("F must start at 0 and end at 1".into()));
        }
        Ok(Self { x, f })
    }

    /// Reads a two-column CSV with header `x,F`.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if header != ["x", "F"] {
            return Err(Error::InvalidParameter(format!("expected header `x,F`, found `{}`", header.join(","))));
        }
        let (mut x, mut f) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |j: usize| -> Result<f64> {
                rec.get(j)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("row {}: column {} is not a number", i + 2, j + 1)))
            };
            x.push(parse(0)?);
            f.push(parse(1)?);
        }
        Self::new(x, f)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    fn cdf(&self, v: f64) -> f64 {
        let n = self.x.len();
        if v <= self.x[0] {
            return 0.0;
        }
        if v >= self.x[n - 1] {
            return 1.0;
        }
        let i = self.x.partition_point(|&a| a <= v);
        let (x0, x1, f0, f1) = (self.x[i - 1], self.x[i], self.f[i - 1], self.f[i]);
        f0 + (f1 - f0) * (v - x0) / (x1 - x0)
    }
}

/// Continuous perturbation distribution `D` on the real line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    /// Uniform on [0, 1].
    Uniform,
    /// Standard logistic.
    Logistic,
    /// Standard normal.
    Gaussian,
    /// Standard Gumbel (maximum type).
    Gumbel,
    /// Standard Cauchy; has no mean.
    Cauchy,
    Table(CdfTable),
}

impl Perturbation {
    /// Built-in distribution by name.
    pub fn builtin(name: &str) -> Option<Self> {
        Some(match name {
            "uniform" => Perturbation::Uniform,
            "logistic" => Perturbation::Logistic,
            "gaussian" | "normal" => Perturbation::Gaussian,
            "gumbel" => Perturbation::Gumbel,
            "cauchy" => Perturbation::Cauchy,
            _ => return None,
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Perturbation::Uniform => x.clamp(0.0, 1.0),
            Perturbation::Logistic => 1.0 / (1.0 + (-x).exp()),
            Perturbation::Gaussian => Normal::standard().cdf(x),
            Perturbation::Gumbel => (-(-x).exp()).exp(),
            Perturbation::Cauchy => 0.5 + x.atan() / std::f64::consts::PI,
            Perturbation::Table(t) => t.cdf(x),
        }
    }

    /// Closed interval outside of which the CDF is flat at 0 or 1.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Perturbation::Uniform => (0.0, 1.0),
            Perturbation::Table(t) => (t.x[0], t.x[t.x.len() - 1]),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn mean_finite(&self) -> bool {
        !matches!(self, Perturbation::Cauchy)
    }

    /// `F⁻¹(p)` by bisection to an interval width of 1e-10.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("quantile level {p} outside (0, 1)")));
        }
        let (mut lo, mut hi) = self.support();
        if !lo.is_finite() {
            lo = -1.0;
            while self.cdf(lo) >= p {
                lo *= 2.0;
                if lo < -1e300 {
                    return Err(Error::NonInvertible("CDF does not reach its lower level".into()));
                }
            }
        }
        if !hi.is_finite() {
            hi = 1.0;
            while self.cdf(hi) < p {
                hi *= 2.0;
                if hi > 1e300 {
                    return Err(Error::NonInvertible("CDF does not reach its upper level".into()));
                }
            }
        }
        while hi - lo > QUANTILE_TOL * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Inverse-transform draw.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let u = open01(rng);
        match self {
            Perturbation::Gumbel => Ok(gumbel_from_uniform(u)),
            _ => self.quantile(u),
        }
    }
}

/// Standard Gumbel draw `−ln(−ln U)` for `U ∈ (0, 1)`.
#[inline]
pub fn gumbel_from_uniform(u: f64) -> f64 {
    -(-u.ln()).ln()
}
