//! Regularizers on [0, 1] and the two directions of the 1D correspondence.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::perturbation::Perturbation;
use crate::error::{Error, Result};

pub const MIN_RESOLUTION: usize = 100;
const CONVEXITY_TOL: f64 = 1e-9;

/// `R(w) − R(0)` tabulated at `w_k = k/K`, `k = 0..=K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularizer1D {
    resolution: usize,
    values: Vec<f64>,
}

impl Regularizer1D {
    /// Shifts `values` so that the first entry is 0.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_RESOLUTION + 1 {
            return Err(Error::InvalidParameter(format!(
                "a regularizer needs at least {} grid values, got {}",
                MIN_RESOLUTION + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("regularizer values"));
        }
        let r0 = values[0];
        Ok(Self { resolution: values.len() - 1, values: values.into_iter().map(|v| v - r0).collect() })
    }

    /// Tabulates `f` on the grid.
    pub fn from_fn(resolution: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=resolution).map(|k| f(k as f64 / resolution as f64)).collect())
    }

    /// Reads a `w,R` table on a uniform grid from 0 to 1.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if header != ["w", "R"] {
            return Err(Error::InvalidParameter(format!("expected header `w,R`, found `{}`", header.join(","))));
        }
        let mut w = Vec::new();
        let mut r = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |j: usize| -> Result<f64> {
                rec.get(j)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("row {}: column {} is not a number", i + 2, j + 1)))
            };
            w.push(parse(0)?);
            r.push(parse(1)?);
        }
        let k = w.len().saturating_sub(1);
        for (i, &wi) in w.iter().enumerate() {
            if k == 0 || (wi - i as f64 / k as f64).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("row {}: grid must be uniform on [0, 1]", i + 2)));
            }
        }
        Self::new(r)
    }

    pub fn write_table<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["w", "R"])?;
        for (k, v) in self.values.iter().enumerate() {
            w.write_record([self.grid(k).to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn grid(&self, k: usize) -> f64 {
        k as f64 / self.resolution as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation of the table at `w ∈ [0, 1]`.
    pub fn value_at(&self, w: f64) -> f64 {
        let k = self.resolution as f64;
        let pos = (w.clamp(0.0, 1.0) * k).min(k);
        let i = (pos.floor() as usize).min(self.resolution - 1);
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Smallest discrete second difference.
    pub fn min_second_difference(&self) -> f64 {
        self.values.windows(3).map(|v| v[2] - 2.0 * v[1] + v[0]).fold(f64::INFINITY, f64::min)
    }

    pub fn check_convex(&self) -> Result<()> {
        let m = self.min_second_difference();
        if m < -CONVEXITY_TOL {
            return Err(Error::NonConvex(format!("second difference {m:e} below zero")));
        }
        Ok(())
    }
}

/// `R(w) − R(0) = −∫₀^w F⁻¹(1 − z) dz` by the composite trapezoid rule.
///
/// Quantile levels are clamped to `[1/(10K), 1 − 1/(10K)]` so heavy tails
/// of `F⁻¹` at the endpoints stay finite.
pub fn ftpl_to_ftrl(pert: &Perturbation, resolution: usize) -> Result<Regularizer1D> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    if !pert.mean_finite() {
        return Err(Error::InfiniteMean(format!("{pert:?} has no finite mean")));
    }
    let k = resolution as f64;
    let eps = 1.0 / (10.0 * k);
    let integrand = (0..=resolution)
        .map(|i| pert.quantile((1.0 - i as f64 / k).clamp(eps, 1.0 - eps)))
        .collect::<Result<Vec<f64>>>()?;
    let mut values = Vec::with_capacity(resolution + 1);
    let mut acc = 0.0;
    values.push(0.0);
    for pair in integrand.windows(2) {
        acc -= 0.5 * (pair[0] + pair[1]) / k;
        values.push(acc);
    }
    Regularizer1D::new(values)
}

/// FTRL over [0, 1] with a tabulated regularizer, seen as FTPL.
#[derive(Clone, Debug)]
pub struct RecoveredPerturbation {
    reg: Regularizer1D,
    /// Cell slopes of `R`, located at the cell midpoints.
    slopes: Vec<f64>,
}

impl RecoveredPerturbation {
    /// `argmax_{w∈[0,1]} wΘ − R(w)`, i.e. `(R*)′(Θ)`, for the C¹ interpolant
    /// of `R` whose derivative joins the cell slopes linearly.
    pub fn conjugate_derivative(&self, theta: f64) -> f64 {
        let k = self.reg.resolution as f64;
        let s = &self.slopes;
        let mid = |i: usize| (i as f64 + 0.5) / k;
        let n = s.len();
        let w = if theta <= s[0] {
            mid(0) - (s[0] - theta) * (mid(1) - mid(0)) / (s[1] - s[0]).max(f64::MIN_POSITIVE)
        } else if theta >= s[n - 1] {
            mid(n - 1) + (theta - s[n - 1]) * (mid(n - 1) - mid(n - 2)) / (s[n - 1] - s[n - 2]).max(f64::MIN_POSITIVE)
        } else {
            let i = s.partition_point(|&x| x <= theta);
            let (a, b) = (s[i - 1], s[i]);
            if b > a {
                mid(i - 1) + (theta - a) / (b - a) / k
            } else {
                mid(i - 1)
            }
        };
        w.clamp(0.0, 1.0)
    }

    /// CDF of the perturbation that reproduces this FTRL learner:
    /// `P[u ≤ x] = 1 − (R*)′(−x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.conjugate_derivative(-x)
    }

    /// `R*(Θ) = max_{w∈[0,1]} wΘ − R(w)` over the grid.
    pub fn conjugate_value(&self, theta: f64) -> f64 {
        self.reg
            .values
            .iter()
            .enumerate()
            .map(|(k, r)| self.reg.grid(k) * theta - r)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn regularizer(&self) -> &Regularizer1D {
        &self.reg
    }
}

pub fn ftrl_to_ftpl(reg: &Regularizer1D) -> Result<RecoveredPerturbation> {
    reg.check_convex()?;
    let k = reg.resolution as f64;
    let slopes = reg.values.windows(2).map(|v| (v[1] - v[0]) * k).collect();
    Ok(RecoveredPerturbation { reg: reg.clone(), slopes })
}

/// `sup |F − F̂|` over `probes` evenly spaced points of `[lo, hi]`, where `F̂`
/// is recovered from the regularizer built from `F`.
pub fn roundtrip_error(pert: &Perturbation, resolution: usize, range: (f64, f64), probes: usize) -> Result<f64> {
    let (lo, hi) = range;
    if !(lo < hi) || probes < 2 {
        return Err(Error::InvalidParameter("probe range must be non-empty with at least two points".into()));
    }
    let recovered = ftrl_to_ftpl(&ftpl_to_ftrl(pert, resolution)?)?;
    Ok((0..probes)
        .map(|i| lo + (hi - lo) * i as f64 / (probes - 1) as f64)
        .map(|x| (pert.cdf(x) - recovered.cdf(x)).abs())
        .fold(0.0, f64::max))
}

/// Default probe window for a distribution: its support padded by a quarter
/// of its width, or `[−8, 8]` / `[−4, 4]` for the unbounded built-ins.
pub fn default_probe_range(pert: &Perturbation) -> (f64, f64) {
    match pert {
        Perturbation::Gaussian => (-4.0, 4.0),
        Perturbation::Uniform | Perturbation::Table(_) => {
            let (a, b) = pert.support();
            let pad = 0.25 * (b - a);
            (a - pad, b + pad)
        }
        _ => (-8.0, 8.0),
    }
}
