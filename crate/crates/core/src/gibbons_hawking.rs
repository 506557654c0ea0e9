//! Gibbons–Hawking metrics `g = V dx² + V⁻¹η²` over R³ with harmonic
//! potentials built from point sources.
//!
//! Chart coordinates are `(x¹, x², x³, θ)`, `θ` the fiber coordinate with
//! period `8πm`. Each source `q/|x − c|` contributes a Dirac monopole
//! potential to `η`, written in closed form with its string running either
//! down (`South`, the default) or up (`North`) the x³ direction from `c`.
//! With these conventions `dη = ⋆dV` and the triple
//! `ω^i = dx^i∧η + V dx^j∧dx^k` is closed.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4};
use rayon::prelude::*;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{metric_from_triple, wedge_gram, Grid4, Metric4, TripleAtPoint, TwoForm, TRIPLES};

pub type Point3 = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `V = 1 + Σ 2m/|x − x_α|`.
    Ak,
    /// `V = 1 − 16m/|x| + Σ (4m/|x − x_α| + 4m/|x + x_α|)`, evaluated on the
    /// double cover.
    DkSymmetric,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawMonopoleConfig {
    family: Family,
    m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default)]
    centers: Vec<Point3>,
}

/// Sources of a Gibbons–Hawking potential. For `DkSymmetric` the stored
/// centers are one representative of each `±x_α` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMonopoleConfig", into = "RawMonopoleConfig")]
pub struct MonopoleConfig {
    family: Family,
    m: f64,
    centers: Vec<Point3>,
}

impl TryFrom<RawMonopoleConfig> for MonopoleConfig {
    type Error = Error;
    fn try_from(raw: RawMonopoleConfig) -> Result<Self> {
        let cfg = MonopoleConfig::new(raw.family, raw.m, raw.centers)?;
        if let Some(k) = raw.k {
            if k != cfg.k() {
                return Err(Error::InvalidInput(format!(
                    "k = {k} does not match the {} stored centers (expected k = {})",
                    cfg.centers.len(),
                    cfg.k()
                )));
            }
        }
        Ok(cfg)
    }
}

impl From<MonopoleConfig> for RawMonopoleConfig {
    fn from(c: MonopoleConfig) -> Self {
        let k = Some(c.k());
        RawMonopoleConfig {
            family: c.family,
            m: c.m,
            k,
            centers: c.centers,
        }
    }
}

/// Minimum separation between sources accepted by [`MonopoleConfig::new`].
pub const MIN_SEPARATION: f64 = 1e-9;

fn sub(a: &Point3, b: &Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: &Point3) -> f64 {
    dot(a, a).sqrt()
}

fn dot(a: &Point3, b: &Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl MonopoleConfig {
    pub fn new(family: Family, m: f64, centers: Vec<Point3>) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidInput(format!("mass must be positive, got {m}")));
        }
        if centers.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite center coordinate".into()));
        }
        for i in 0..centers.len() {
            if family == Family::DkSymmetric && norm(&centers[i]) < MIN_SEPARATION {
                return Err(Error::InvalidInput(format!(
                    "center {i} coincides with the origin"
                )));
            }
            for j in 0..i {
                if norm(&sub(&centers[i], &centers[j])) < MIN_SEPARATION {
                    return Err(Error::CoincidentCenters(j, i));
                }
                if family == Family::DkSymmetric {
                    let s = [
                        centers[i][0] + centers[j][0],
                        centers[i][1] + centers[j][1],
                        centers[i][2] + centers[j][2],
                    ];
                    if norm(&s) < MIN_SEPARATION {
                        return Err(Error::InvalidInput(format!(
                            "centers {j} and {i} are antipodal duplicates"
                        )));
                    }
                }
            }
        }
        Ok(Self { family, m, centers })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn centers(&self) -> &[Point3] {
        &self.centers
    }

    /// `A_k`: number of centers minus one (zero for the empty product);
    /// `D_k`: number of stored centers.
    pub fn k(&self) -> usize {
        match self.family {
            Family::Ak => self.centers.len().saturating_sub(1),
            Family::DkSymmetric => self.centers.len(),
        }
    }

    /// Point sources `(c, q)` with `V = 1 + Σ q/|x − c|`, on the double cover
    /// for `DkSymmetric`.
    pub fn charges(&self) -> Vec<(Point3, f64)> {
        self.charges_iter().collect()
    }

    fn charges_iter(&self) -> impl Iterator<Item = (Point3, f64)> + '_ {
        let m = self.m;
        let (origin, q) = match self.family {
            Family::Ak => (None, 2.0 * m),
            Family::DkSymmetric => (Some(([0.0; 3], -16.0 * m)), 4.0 * m),
        };
        let pairs = self.family == Family::DkSymmetric;
        origin.into_iter().chain(self.centers.iter().flat_map(move |c| {
            let mirror = pairs.then(|| ([-c[0], -c[1], -c[2]], q));
            std::iter::once((*c, q)).chain(mirror)
        }))
    }

    /// Period of the fiber coordinate.
    pub fn fiber_period(&self) -> f64 {
        8.0 * PI * self.m
    }
}

/// Random configuration with centers uniform in the ball of radius
/// `radius`, pairwise (and, for `DkSymmetric`, antipodally and from the
/// origin) separated by at least `min_gap`.
pub fn random_config<R: Rng>(
    rng: &mut R,
    family: Family,
    k: usize,
    m: f64,
    radius: f64,
    min_gap: f64,
) -> Result<MonopoleConfig> {
    let count = match family {
        Family::Ak => k + 1,
        Family::DkSymmetric => k,
    };
    let mut centers: Vec<Point3> = Vec::with_capacity(count);
    let mut attempts = 0;
    while centers.len() < count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::InvalidInput("could not place separated centers".into()));
        }
        let p: Point3 = std::array::from_fn(|_| rng.random_range(-radius..radius));
        if norm(&p) > radius {
            continue;
        }
        let far = |q: &Point3| norm(&sub(&p, q)) >= min_gap;
        let mirrored = |q: &Point3| norm(&[p[0] + q[0], p[1] + q[1], p[2] + q[2]]) >= min_gap;
        let ok = centers.iter().all(far)
            && (family == Family::Ak
                || (norm(&p) >= min_gap / 2.0 && centers.iter().all(mirrored)));
        if ok {
            centers.push(p);
        }
    }
    MonopoleConfig::new(family, m, centers)
}

/// Distance below which an evaluation point counts as sitting on a source.
pub const POLE_TOL: f64 = 1e-12;

fn inverse_distance(x: &Point3, c: &Point3) -> Result<f64> {
    let r = norm(&sub(x, c));
    if r < POLE_TOL {
        return Err(Error::PotentialPole { distance: r });
    }
    Ok(1.0 / r)
}

/// `V(x)`. For `DkSymmetric` each `±x_α` pair is summed first, which makes
/// `V(x) = V(−x)` hold exactly in floating point.
pub fn potential(cfg: &MonopoleConfig, x: &Point3) -> Result<f64> {
    let m = cfg.m;
    match cfg.family {
        Family::Ak => {
            let mut v = 1.0;
            for c in &cfg.centers {
                v += 2.0 * m * inverse_distance(x, c)?;
            }
            Ok(v)
        }
        Family::DkSymmetric => {
            let mut v = 1.0 - 16.0 * m * inverse_distance(x, &[0.0; 3])?;
            for c in &cfg.centers {
                let minus = [-c[0], -c[1], -c[2]];
                v += 4.0 * m * inverse_distance(x, c)? + 4.0 * m * inverse_distance(x, &minus)?;
            }
            Ok(v)
        }
    }
}

/// `∇V(x)`, analytically.
pub fn potential_gradient(cfg: &MonopoleConfig, x: &Point3) -> Result<Point3> {
    let mut g = [0.0; 3];
    for (c, q) in cfg.charges_iter() {
        let y = sub(x, &c);
        let r = norm(&y);
        if r < POLE_TOL {
            return Err(Error::PotentialPole { distance: r });
        }
        let s = -q / (r * r * r);
        for a in 0..3 {
            g[a] += s * y[a];
        }
    }
    Ok(g)
}

/// Direction of the Dirac string of a source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StringAxis {
    /// Toward `x³ → +∞`.
    North,
    /// Toward `x³ → −∞`.
    #[default]
    South,
}

/// An evaluation point of the Gibbons–Hawking chart.
#[derive(Clone, Debug, PartialEq)]
pub struct GHChart {
    pub x: Point3,
    pub theta: f64,
    /// String direction per source in [`MonopoleConfig::charges`] order;
    /// missing entries default to `South`.
    pub strings: Vec<StringAxis>,
}

impl GHChart {
    /// All strings pointing south.
    pub fn new(x: Point3, theta: f64) -> Self {
        Self {
            x,
            theta,
            strings: Vec::new(),
        }
    }

    /// Chooses, per source, the string pointing away from `x`.
    pub fn away_from_strings(cfg: &MonopoleConfig, x: Point3, theta: f64) -> Self {
        let strings = cfg
            .charges()
            .iter()
            .map(|(c, _)| {
                if x[2] < c[2] {
                    StringAxis::North
                } else {
                    StringAxis::South
                }
            })
            .collect();
        Self { x, theta, strings }
    }

    pub fn with_strings(mut self, strings: Vec<StringAxis>) -> Self {
        self.strings = strings;
        self
    }

    pub fn point4(&self) -> [f64; 4] {
        [self.x[0], self.x[1], self.x[2], self.theta]
    }
}

/// Relative distance to a string below which evaluation is refused.
pub const STRING_TOL: f64 = 1e-12;

/// Closed-form potential `A` with `curl A = ∇(q/|y|)`, where `y = x − c`.
pub fn dirac_potential(q: f64, y: &Point3, axis: StringAxis) -> Option<Point3> {
    let rho2 = y[0] * y[0] + y[1] * y[1];
    let r = norm(y);
    // r ± y³ without cancellation on the far side of the source
    let (r_plus, r_minus) = if y[2] >= 0.0 {
        (r + y[2], rho2 / (r + y[2]))
    } else {
        (rho2 / (r - y[2]), r - y[2])
    };
    let g = -q;
    let denom = match axis {
        StringAxis::South => r * r_plus,
        StringAxis::North => -r * r_minus,
    };
    if r == 0.0 || denom.abs() <= STRING_TOL * r * r {
        return None;
    }
    let s = g / denom;
    Some([-s * y[1], s * y[0], 0.0])
}

/// `η = dθ + Σ A_α` as coefficients on `(dx¹, dx², dx³, dθ)`.
pub fn connection_eta(cfg: &MonopoleConfig, chart: &GHChart) -> Result<[f64; 4]> {
    eta_at(cfg, &chart.x, &chart.strings)
}

fn eta_at(cfg: &MonopoleConfig, x: &Point3, strings: &[StringAxis]) -> Result<[f64; 4]> {
    let mut eta = [0.0, 0.0, 0.0, 1.0];
    for (i, (c, q)) in cfg.charges_iter().enumerate() {
        let y = sub(x, &c);
        let r = norm(&y);
        if r < POLE_TOL {
            return Err(Error::PotentialPole { distance: r });
        }
        let axis = strings.get(i).copied().unwrap_or_default();
        let a = dirac_potential(q, &y, axis).ok_or(Error::DiracString { center: i })?;
        for k in 0..3 {
            eta[k] += a[k];
        }
    }
    Ok(eta)
}

/// Closed-form metric `V dx² + V⁻¹η²` in chart coordinates.
pub fn gh_metric(v: f64, eta: &[f64; 4]) -> Metric4 {
    Matrix4::from_fn(|a, b| {
        let flat = if a == b && a < 3 { v } else { 0.0 };
        flat + eta[a] * eta[b] / v
    })
}

/// Kähler triple `ω^i = dx^i∧η + V dx^j∧dx^k` (cyclic) and the metric.
///
/// At `V = 1`, `η = dθ` the triple is `(ω³, −ω², ω¹)` of the flat triple on
/// R⁴ with `θ = x⁴`, which spans the same self-dual plane.
pub fn gh_triple(cfg: &MonopoleConfig, chart: &GHChart) -> Result<(TripleAtPoint<f64>, Metric4)> {
    let v = potential(cfg, &chart.x)?;
    let eta = connection_eta(cfg, chart)?;
    Ok((triple_from(v, &eta), gh_metric(v, &eta)))
}

/// The triple for given `V` and `η`.
pub fn triple_from(v: f64, eta: &[f64; 4]) -> TripleAtPoint<f64> {
    let form = |i: usize| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut w = TwoForm::zero();
        for (b, &e) in eta.iter().enumerate() {
            if b != i {
                w.set(i, b, w.get(i, b) + e);
            }
        }
        w.set(j, k, w.get(j, k) + v);
        w
    };
    TripleAtPoint::new(form(0), form(1), form(2))
}

/// Point-source model `V = 1 + charge/|x − center|` approximating a
/// configuration at infinity. For `DkSymmetric` the charge `8m(k − 2)` may
/// be zero or negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardModel {
    pub center: Point3,
    pub charge: f64,
}

impl StandardModel {
    pub fn potential(&self, x: &Point3) -> Result<f64> {
        let r = norm(&sub(x, &self.center));
        if r < POLE_TOL {
            return Err(Error::PotentialPole { distance: r });
        }
        Ok(1.0 + self.charge / r)
    }

    /// The model as a single-center `A_k` configuration, when its charge is
    /// positive.
    pub fn as_config(&self) -> Option<MonopoleConfig> {
        if self.charge > 0.0 {
            MonopoleConfig::new(Family::Ak, self.charge / 2.0, vec![self.center]).ok()
        } else {
            None
        }
    }
}

/// Total source strength `Σ q`.
pub fn total_charge(cfg: &MonopoleConfig) -> f64 {
    cfg.charges().iter().map(|(_, q)| q).sum()
}

/// The coalesced model: all sources merged at their charge-weighted centroid
/// (the origin for `DkSymmetric`, by symmetry).
pub fn standard_model(cfg: &MonopoleConfig) -> StandardModel {
    let charge = total_charge(cfg);
    let center = match cfg.family {
        Family::DkSymmetric => [0.0; 3],
        Family::Ak if cfg.centers.is_empty() => [0.0; 3],
        Family::Ak => {
            let n = cfg.centers.len() as f64;
            std::array::from_fn(|a| cfg.centers.iter().map(|c| c[a]).sum::<f64>() / n)
        }
    };
    StandardModel { center, charge }
}

/// The coalesced model placed at the origin regardless of the centroid.
pub fn origin_model(cfg: &MonopoleConfig) -> StandardModel {
    StandardModel {
        center: [0.0; 3],
        charge: total_charge(cfg),
    }
}

/// `1/|y − c| − 1/|y|` without cancellation for `|y| ≫ |c|`.
pub fn inverse_distance_shift(y: &Point3, c: &Point3) -> f64 {
    let r = norm(y);
    let rc = norm(&sub(y, c));
    (2.0 * dot(y, c) - dot(c, c)) / (r * rc * (r + rc))
}

/// `V(x) − V_model(x)` evaluated as a sum of small terms, accurate far from
/// the sources.
pub fn deviation_from_model(cfg: &MonopoleConfig, model: &StandardModel, x: &Point3) -> f64 {
    let y = sub(x, &model.center);
    let r = norm(&y);
    let mut s = (total_charge(cfg) - model.charge) / r;
    for (c, q) in cfg.charges() {
        s += q * inverse_distance_shift(&y, &sub(&c, &model.center));
    }
    s
}

/// Seven-point finite-difference Laplacian of `V`.
pub fn laplacian_fd(cfg: &MonopoleConfig, x: &Point3, h: f64) -> Result<f64> {
    let v0 = potential(cfg, x)?;
    let mut s = -6.0 * v0;
    for a in 0..3 {
        for sign in [-1.0, 1.0] {
            let mut p = *x;
            p[a] += sign * h;
            s += potential(cfg, &p)?;
        }
    }
    Ok(s / (h * h))
}

/// Central-difference curl of a vector field.
pub fn curl_fd<F>(f: &F, x: &Point3, h: f64) -> Result<Point3>
where
    F: Fn(&Point3) -> Result<Point3>,
{
    let mut jac = [[0.0; 3]; 3];
    for a in 0..3 {
        let mut fwd = *x;
        let mut bwd = *x;
        fwd[a] += h;
        bwd[a] -= h;
        let ff = f(&fwd)?;
        let fb = f(&bwd)?;
        for b in 0..3 {
            jac[a][b] = (ff[b] - fb[b]) / (2.0 * h);
        }
    }
    Ok([
        jac[1][2] - jac[2][1],
        jac[2][0] - jac[0][2],
        jac[0][1] - jac[1][0],
    ])
}

/// Spatial part of `η` in the chart that keeps every string away from `x`.
pub fn connection_away_from_strings(cfg: &MonopoleConfig, x: &Point3) -> Result<Point3> {
    let eta = connection_eta(cfg, &GHChart::away_from_strings(cfg, *x, 0.0))?;
    Ok([eta[0], eta[1], eta[2]])
}

/// Outward flux `∮ F·n dA` through a sphere, Gauss–Legendre in `cos ϑ`
/// (`n_polar` nodes) and the trapezoidal rule in the azimuth.
pub fn sphere_flux<F>(f: &F, center: &Point3, radius: f64, n_polar: usize, n_azimuth: usize) -> Result<f64>
where
    F: Fn(&Point3) -> Result<Point3>,
{
    let rule = gauss_quad::GaussLegendre::new(n_polar)
        .map_err(|e| Error::InvalidInput(format!("quadrature: {e}")))?;
    let mut total = 0.0;
    for &(u, w) in rule.as_node_weight_pairs() {
        let s = (1.0 - u * u).sqrt();
        let mut ring = 0.0;
        for j in 0..n_azimuth {
            let phi = 2.0 * PI * j as f64 / n_azimuth as f64;
            let n = [s * phi.cos(), s * phi.sin(), u];
            let p = [
                center[0] + radius * n[0],
                center[1] + radius * n[1],
                center[2] + radius * n[2],
            ];
            ring += dot(&f(&p)?, &n);
        }
        total += w * ring * 2.0 * PI / n_azimuth as f64;
    }
    Ok(total * radius * radius)
}

/// `∮ A·dl` around the circle of radius `radius` about the vertical line
/// through `axis`, at height `height`, counterclockwise seen from above.
pub fn loop_integral<F>(a: &F, axis: &Point3, height: f64, radius: f64, n: usize) -> Result<f64>
where
    F: Fn(&Point3) -> Result<Point3>,
{
    let mut total = 0.0;
    for j in 0..n {
        let phi = 2.0 * PI * j as f64 / n as f64;
        let p = [axis[0] + radius * phi.cos(), axis[1] + radius * phi.sin(), height];
        let t = [-radius * phi.sin(), radius * phi.cos(), 0.0];
        total += dot(&a(&p)?, &t);
    }
    Ok(total * 2.0 * PI / n as f64)
}

/// Pointwise residuals of the Gibbons–Hawking identities at one node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PointResiduals {
    /// `max(|Q − I|, |vol − V|/V)` from [`wedge_gram`].
    pub gram: f64,
    /// `|metric_from_triple − (V dx² + V⁻¹η²)| / |g|`, max-norm.
    pub metric: f64,
    /// `max |dω^i|` by central differences with steps `h` and `h/2`.
    pub closedness: [f64; 2],
    /// `max |curl A − ∇V|` with steps `h` and `h/2`.
    pub curl: [f64; 2],
}

impl PointResiduals {
    fn max(self, o: Self) -> Self {
        let m2 = |a: [f64; 2], b: [f64; 2]| [a[0].max(b[0]), a[1].max(b[1])];
        Self {
            gram: self.gram.max(o.gram),
            metric: self.metric.max(o.metric),
            closedness: m2(self.closedness, o.closedness),
            curl: m2(self.curl, o.curl),
        }
    }
}

/// Checks the triple, metric, closedness and `dη = ⋆dV` at `(x, θ)`.
/// Difference stencils keep the string choice of the center point; the
/// same stencil values of `(V, η)` feed both `dω` and `curl A`.
pub fn verify_point(cfg: &MonopoleConfig, x: Point3, theta: f64, h: f64) -> Result<PointResiduals> {
    let chart = GHChart::away_from_strings(cfg, x, theta);
    let v = potential(cfg, &x)?;
    let (t, g) = gh_triple(cfg, &chart)?;
    let (q, vol) = wedge_gram(&t);
    let gram = (q - Matrix3::identity()).amax().max((vol - v).abs() / v.abs());
    let metric = (metric_from_triple(&t)? - g).amax() / g.amax();
    // (V, η) do not read θ, which only enters through the chart point
    let eval = |p: [f64; 4]| -> Result<(f64, [f64; 4])> {
        let y = [p[0], p[1], p[2]];
        Ok((potential(cfg, &y)?, eta_at(cfg, &y, &chart.strings)?))
    };
    let grad = potential_gradient(cfg, &x)?;
    let mut closedness = [0.0; 2];
    let mut curl = [0.0; 2];
    for (slot, s) in [h, 0.5 * h].into_iter().enumerate() {
        let p0 = chart.point4();
        let mut dw: [[TwoForm<f64>; 3]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| TwoForm::zero()));
        // dA[a][b] = ∂_a η_b
        let mut da = [[0.0; 4]; 4];
        for axis in 0..4 {
            let (mut fwd, mut bwd) = (p0, p0);
            fwd[axis] += s;
            bwd[axis] -= s;
            let ((vf, ef), (vb, eb)) = (eval(fwd)?, eval(bwd)?);
            let (tf, tb) = (triple_from(vf, &ef), triple_from(vb, &eb));
            for i in 0..3 {
                dw[axis][i] = (tf.w[i].clone() - tb.w[i].clone()).scale(&(0.5 / s));
            }
            for b in 0..4 {
                da[axis][b] = (ef[b] - eb[b]) / (2.0 * s);
            }
        }
        for i in 0..3 {
            for &(a, b, c) in &TRIPLES {
                let r = dw[a][i].get(b, c) - dw[b][i].get(a, c) + dw[c][i].get(a, b);
                closedness[slot] = f64::max(closedness[slot], r.abs());
            }
        }
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let c = da[j][k] - da[k][j];
            curl[slot] = f64::max(curl[slot], (c - grad[i]).abs());
        }
    }
    Ok(PointResiduals {
        gram,
        metric,
        closedness,
        curl,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub nodes: usize,
    pub h: f64,
    pub max: PointResiduals,
    /// `max|r_h| / max|r_{h/2}|` for closedness and for the curl identity.
    pub closedness_ratio: f64,
    pub curl_ratio: f64,
}

/// Runs [`verify_point`] on every node of `grid` and keeps the maxima.
pub fn verify_sweep(cfg: &MonopoleConfig, grid: &Grid4, h: f64) -> Result<SweepReport> {
    let max = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.point(grid.multi_index(i));
            verify_point(cfg, [p[0], p[1], p[2]], p[3], h)
        })
        .try_reduce(PointResiduals::default, |a, b| Ok(a.max(b)))?;
    Ok(SweepReport {
        nodes: grid.len(),
        h,
        max,
        closedness_ratio: max.closedness[0] / max.closedness[1],
        curl_ratio: max.curl[0] / max.curl[1],
    })
}
