//! Decay exponents: power-law fits, weighted norms, the closed-form ALG and
//! ALH exponents, and large-`r` expansions of Gibbons–Hawking potentials.

use std::f64::consts::PI;
use std::io;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbons_hawking::{inverse_distance_shift, total_charge, MonopoleConfig, Point3};

/// Minimum number of samples in a [`DecaySamples`].
pub const MIN_SAMPLES: usize = 8;
/// Minimum ratio `r_max / r_min` in a [`DecaySamples`].
pub const MIN_SPAN: f64 = 100.0;

/// Magnitudes sampled at strictly increasing radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySamples {
    samples: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    r: f64,
    value: f64,
}

impl DecaySamples {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                needed: MIN_SAMPLES,
                got: samples.len(),
            });
        }
        for (i, &(r, v)) in samples.iter().enumerate() {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidInput(format!("radius {r} at row {i} is not positive")));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("value {v} at row {i} is not a magnitude")));
            }
            if i > 0 && r <= samples[i - 1].0 {
                return Err(Error::InvalidInput(format!("radii not strictly increasing at row {i}")));
            }
        }
        let span = samples[samples.len() - 1].0 / samples[0].0;
        if span < MIN_SPAN {
            return Err(Error::InvalidInput(format!(
                "radii span a factor {span:.3}, need at least {MIN_SPAN}"
            )));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Reads `r,value` rows with a header line.
    pub fn from_csv<R: io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<CsvRow>() {
            let row = rec.map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
            rows.push((row.r, row.value));
        }
        Self::new(rows)
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        write_pairs_csv(writer, &self.samples)
    }
}

/// Writes `(r, value)` pairs as CSV with an `r,value` header.
pub fn write_pairs_csv<W: io::Write>(writer: W, rows: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for &(r, value) in rows {
        w.serialize(CsvRow { r, value })
            .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}

/// Power-law fit `v ≈ C r^{−exponent}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub stderr: f64,
    /// Root-mean-square residual of the fit in `log v`.
    pub log_rms: f64,
    pub used: usize,
}

/// Least-squares slope of `log v` against `log r`, negated. Zero magnitudes
/// are dropped with a warning.
pub fn decay_fit(s: &DecaySamples) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = s
        .samples
        .iter()
        .filter(|&&(_, v)| v > 0.0)
        .map(|&(r, v)| (r.ln(), v.ln()))
        .collect();
    let dropped = s.samples.len() - pts.len();
    if dropped > 0 {
        log::warn!("decay_fit: dropped {dropped} zero samples");
    }
    let n = pts.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - ym - slope * (p.0 - xm)).powi(2))
        .sum();
    let stderr = if n > 2 {
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(DecayFit {
        exponent: -slope,
        stderr,
        log_rms: (ssr / nf).sqrt(),
        used: n,
    })
}

/// A quadrature node of a field magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedSample {
    pub r: f64,
    pub phi: f64,
    pub weight: f64,
}

/// `√(Σ |φ|² r^δ w)`.
pub fn weighted_l2_norm(samples: &[WeightedSample], delta: f64) -> f64 {
    samples
        .iter()
        .map(|s| s.phi * s.phi * s.r.powf(delta) * s.weight)
        .sum::<f64>()
        .sqrt()
}

/// `√(Σ |φ|² e^{δr} w)`.
pub fn exp_weighted_l2_norm(samples: &[WeightedSample], delta: f64) -> f64 {
    samples
        .iter()
        .map(|s| s.phi * s.phi * (delta * s.r).exp() * s.weight)
        .sum::<f64>()
        .sqrt()
}

/// Gauss–Legendre nodes for radial integrands on the annulus
/// `r₁ ≤ |x| ≤ r₂` in `R^dim × (fiber of length fiber_length)`. Weights
/// include the sphere area `|S^{dim−1}| r^{dim−1}`.
pub fn radial_annulus_quadrature(
    r1: f64,
    r2: f64,
    nodes: usize,
    dim: u32,
    fiber_length: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(0.0 < r1 && r1 < r2) {
        return Err(Error::InvalidInput(format!("annulus needs 0 < r1 < r2, got [{r1}, {r2}]")));
    }
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let rule = gauss_quad::GaussLegendre::new(nodes)
        .map_err(|e| Error::InvalidInput(format!("quadrature: {e}")))?;
    let area = sphere_area(dim);
    let half = 0.5 * (r2 - r1);
    let mid = 0.5 * (r2 + r1);
    Ok(rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(u, w)| {
            let r = mid + half * u;
            (r, w * half * area * r.powi(dim as i32 - 1) * fiber_length)
        })
        .collect())
}

/// Area of the unit sphere `S^{dim−1}`.
fn sphere_area(dim: u32) -> f64 {
    // |S^{n-1}| = 2π^{n/2}/Γ(n/2), by recursion |S^{n+1}| = 2π/n |S^{n-1}|
    let (mut area, mut n) = if dim % 2 == 0 { (2.0 * PI, 2) } else { (2.0, 1) };
    while n < dim {
        area *= 2.0 * PI / n as f64;
        n += 2;
    }
    area
}

/// `min_{n ∈ Z, n < 2β} (2β − n)/β` for `0 < β ≤ 1`, exactly.
pub fn alg_delta(beta: Rational64) -> Result<Rational64> {
    if !(beta > Rational64::from_integer(0) && beta <= Rational64::from_integer(1)) {
        return Err(Error::InvalidInput(format!("beta must lie in (0, 1], got {beta}")));
    }
    let two_beta = beta * 2;
    let top = two_beta.ceil().to_integer();
    (top - 3..top)
        .map(|n| (two_beta - n) / beta)
        .filter(|d| *d > Rational64::from_integer(0))
        .min()
        .ok_or_else(|| Error::InvalidInput("empty scan window".into()))
}

/// Parses `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A rank-3 lattice, generators as rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice3 {
    basis: Matrix3<f64>,
}

impl Lattice3 {
    pub fn new(rows: [[f64; 3]; 3]) -> Result<Self> {
        let basis = Matrix3::from_fn(|i, j| rows[i][j]);
        let scale = basis.abs().max();
        if !basis.iter().all(|x| x.is_finite()) || basis.determinant().abs() <= 1e-12 * scale.powi(3) {
            return Err(Error::InvalidInput("degenerate lattice basis".into()));
        }
        Ok(Self { basis })
    }

    pub fn basis(&self) -> &Matrix3<f64> {
        &self.basis
    }

    /// Rows generate `Λ* = {λ : λ·v ∈ Z for all v ∈ Λ}`.
    pub fn dual(&self) -> Lattice3 {
        let inv = self.basis.try_inverse().expect("nondegenerate by construction");
        Lattice3 {
            basis: inv.transpose(),
        }
    }

    /// Shortest nonzero vector, by enumerating every coefficient vector that
    /// could beat the shortest generator.
    pub fn shortest_vector(&self) -> Vector3<f64> {
        let b = &self.basis;
        let rows: Vec<Vector3<f64>> = (0..3).map(|i| b.row(i).transpose()).collect();
        let bound_len = rows.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        // v = cᵀB  ⇒  c_i = v·(B⁻¹ column i), so |c_i| ≤ |v|·|B⁻¹ column i|
        let inv = b.try_inverse().expect("nondegenerate by construction");
        let bounds: Vec<i64> = (0..3)
            .map(|i| (bound_len * inv.column(i).norm() + 1e-9).floor() as i64)
            .collect();
        let mut best = rows
            .iter()
            .copied()
            .min_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("three rows");
        for c0 in -bounds[0]..=bounds[0] {
            for c1 in -bounds[1]..=bounds[1] {
                for c2 in -bounds[2]..=bounds[2] {
                    if c0 == 0 && c1 == 0 && c2 == 0 {
                        continue;
                    }
                    let v = rows[0] * c0 as f64 + rows[1] * c1 as f64 + rows[2] * c2 as f64;
                    if v.norm() < best.norm() {
                        best = v;
                    }
                }
            }
        }
        best
    }
}

/// `2π min_{λ ∈ Λ*∖0} |λ|`.
pub fn alh_delta(lat: &Lattice3) -> f64 {
    2.0 * PI * lat.dual().shortest_vector().norm()
}

/// Sampling window for large-`r` expansions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpansionWindow {
    pub r_min: f64,
    pub r_max: f64,
    pub radii: usize,
    pub directions: usize,
    pub seed: u64,
    /// Degree of the polynomial in `r_min/r` fitted to `r(V − 1)`.
    pub fit_degree: usize,
}

impl Default for ExpansionWindow {
    fn default() -> Self {
        Self {
            r_min: 1e3,
            r_max: 1e6,
            radii: 64,
            directions: 16,
            seed: 0,
            fit_degree: 5,
        }
    }
}

impl ExpansionWindow {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.r_min && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::InvalidInput("window needs 0 < r_min < r_max".into()));
        }
        if self.radii < MIN_SAMPLES || self.directions == 0 {
            return Err(Error::InvalidInput(format!(
                "window needs at least {MIN_SAMPLES} radii and one direction"
            )));
        }
        if self.fit_degree + 1 >= self.radii {
            return Err(Error::InvalidInput("fit degree too high for the radii".into()));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        let n = self.radii;
        (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    /// Uniform random unit vectors from the window's seed.
    pub fn directions(&self) -> Vec<Point3> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.directions)
            .map(|_| {
                let z: f64 = rng.random_range(-1.0..1.0);
                let phi: f64 = rng.random_range(0.0..2.0 * PI);
                let s = (1.0 - z * z).sqrt();
                [s * phi.cos(), s * phi.sin(), z]
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub center: Point3,
    /// Fitted `c` in `V ≈ 1 + c/|x − center|`.
    pub lead_coeff: f64,
    pub remainder: DecayFit,
    /// `(r, mean |V − 1 − c/r|)` per radius.
    pub samples: Vec<(f64, f64)>,
}

/// Fits `V ≈ 1 + c/r` about `center` over the window, then the decay
/// exponent of `V − 1 − c/r`.
///
/// `r(V − 1)` is carried as `Σq + rΣ q(1/|y − c| − 1/|y|)` and only the
/// second, small part is fitted; adding the exact constant back is the same
/// least-squares estimate, without the cancellation of forming `V − 1` at
/// `r ~ 10⁶`.
pub fn expansion_check(cfg: &MonopoleConfig, center: Point3, window: &ExpansionWindow) -> Result<ExpansionResult> {
    window.validate()?;
    let radii = window.radii();
    let dirs = window.directions();
    let base = total_charge(cfg);
    let shifted: Vec<(Point3, f64)> = cfg
        .charges()
        .into_iter()
        .map(|(c, q)| ([c[0] - center[0], c[1] - center[1], c[2] - center[2]], q))
        .collect();
    // per radius, per direction: Σ q δ
    let shifts: Vec<Vec<f64>> = radii
        .iter()
        .map(|&r| {
            dirs.iter()
                .map(|u| {
                    let y = [r * u[0], r * u[1], r * u[2]];
                    shifted.iter().map(|(c, q)| q * inverse_distance_shift(&y, c)).sum()
                })
                .collect()
        })
        .collect();
    let nd = dirs.len() as f64;
    let mean_dev: Vec<f64> = radii
        .iter()
        .zip(&shifts)
        .map(|(&r, row)| r * row.iter().sum::<f64>() / nd)
        .collect();
    let deg = window.fit_degree;
    let design = DMatrix::from_fn(radii.len(), deg + 1, |i, p| (window.r_min / radii[i]).powi(p as i32));
    let rhs = DVector::from_vec(mean_dev);
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-300)
        .map_err(|e| Error::InvalidInput(format!("least squares: {e}")))?;
    let offset = coef[0];
    let samples: Vec<(f64, f64)> = radii
        .iter()
        .zip(&shifts)
        .map(|(&r, row)| (r, row.iter().map(|s| (s - offset / r).abs()).sum::<f64>() / nd))
        .collect();
    let remainder = decay_fit(&DecaySamples::new(samples.clone())?)?;
    Ok(ExpansionResult {
        center,
        lead_coeff: base + offset,
        remainder,
        samples,
    })
}
