//! Root systems of the `A_k` and `D_k` ALF spaces, their period vectors,
//! the singularity criterion, and a numerical period integral over the
//! 2-cycle sitting above a segment between two monopole centers.
//!
//! Homology classes are modelled in the Euclidean lattice: the sphere
//! over the segment from center `α` to center `β` is `e_β − e_α`, and for
//! `D_k` the classes `S_{±β,±α}` are `±e_β ± e_α`. Intersection number
//! is minus the standard pairing.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbons_hawking::{gh_triple, Family, GHChart, MonopoleConfig};
use crate::twistor::{SpectralFamily, SpectralParam};

/// Integer vector in `Z^{k+1}` (`A_k`) or `Z^k` (`D_k`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootVec(pub Vec<i64>);

impl RootVec {
    /// `s_b e_b + s_a e_a` in dimension `n`, zero-based indices.
    pub fn pair(n: usize, b: usize, sb: i64, a: usize, sa: i64) -> Self {
        let mut v = vec![0; n];
        v[b] += sb;
        v[a] += sa;
        Self(v)
    }

    pub fn dot(&self, o: &Self) -> i64 {
        self.0.iter().zip(&o.0).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootSystem {
    pub roots: Vec<RootVec>,
    pub note: Option<String>,
}

/// All roots; ordered by the larger index first.
pub fn roots(family: SpectralFamily, k: usize) -> RootSystem {
    match family {
        SpectralFamily::Ak => {
            if k == 0 {
                return RootSystem {
                    roots: Vec::new(),
                    note: Some("A_0: a single center carries no compact 2-cycle".into()),
                };
            }
            let n = k + 1;
            let mut out = Vec::with_capacity(k * n);
            for b in 0..n {
                for a in 0..n {
                    if a != b {
                        out.push(RootVec::pair(n, b, 1, a, -1));
                    }
                }
            }
            RootSystem { roots: out, note: None }
        }
        SpectralFamily::Dk => {
            let note = match k {
                0 => Some("D_0: H_2 vanishes, no roots".into()),
                1 => Some(
                    "D_1: H_2 is generated by S_{+1,-1}, whose self-intersection number is 0; no roots"
                        .into(),
                ),
                _ => None,
            };
            let mut out = Vec::with_capacity(2 * k * k.saturating_sub(1));
            for b in 0..k {
                for a in 0..b {
                    for (sb, sa) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        out.push(RootVec::pair(k, b, sb, a, sa));
                    }
                }
            }
            RootSystem { roots: out, note }
        }
    }
}

/// Parameters `(a_α, b_α)` of a multi-Taub-NUT or its `D_k` quotient.
/// Degenerate values are legal inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TNParams {
    pub family: SpectralFamily,
    pub params: Vec<SpectralParam>,
}

impl TNParams {
    /// `k` such that the root lattice is `A_k` or `D_k`.
    pub fn k(&self) -> usize {
        match self.family {
            SpectralFamily::Ak => self.params.len().saturating_sub(1),
            SpectralFamily::Dk => self.params.len(),
        }
    }
}

/// `Σ r_α (b_α, Re a_α, Im a_α)`, the period of `ω` over the class `r`
/// with the overall constant set to 1.
pub fn periods(p: &TNParams, r: &RootVec) -> Result<[f64; 3]> {
    if r.0.len() != p.params.len() {
        return Err(Error::InvalidInput(format!(
            "root of length {} for {} parameters",
            r.0.len(),
            p.params.len()
        )));
    }
    let mut out = [0.0; 3];
    for (&c, q) in r.0.iter().zip(&p.params) {
        if c != 0 {
            let c = c as f64;
            out[0] += c * q.b;
            out[1] += c * q.a_re;
            out[2] += c * q.a_im;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityReport {
    pub singular: bool,
    /// Roots with vanishing period vector.
    pub roots: Vec<RootVec>,
    /// Their period vectors.
    pub periods: Vec<[f64; 3]>,
    /// Some `D_k` parameter `(a_α, b_α)` is zero. Reported, not classified.
    pub zero_parameter_present: bool,
    pub note: Option<String>,
}

/// A period vector counts as zero when every component has modulus at most
/// `tol`; `tol = 0` is the exact criterion.
pub fn is_singular_with_tol(p: &TNParams, tol: f64) -> SingularityReport {
    let sys = roots(p.family, p.k());
    let mut vanishing = Vec::new();
    let mut pers = Vec::new();
    for r in &sys.roots {
        let per = periods(p, r).expect("roots match parameter count");
        if per.iter().all(|x| x.abs() <= tol) {
            vanishing.push(r.clone());
            pers.push(per);
        }
    }
    let zero_parameter_present = p.family == SpectralFamily::Dk
        && p
            .params
            .iter()
            .any(|q| q.a_re.abs() <= tol && q.a_im.abs() <= tol && q.b.abs() <= tol);
    SingularityReport {
        singular: !vanishing.is_empty(),
        roots: vanishing,
        periods: pers,
        zero_parameter_present,
        note: sys.note,
    }
}

pub fn is_singular(p: &TNParams) -> SingularityReport {
    is_singular_with_tol(p, 0.0)
}

/// Simple roots `e_2 − e_1, …, e_{k+1} − e_k` for `A_k` and
/// `e_2 + e_1, e_2 − e_1, e_3 − e_2, …, e_k − e_{k−1}` for `D_k`.
pub fn simple_roots(family: SpectralFamily, k: usize) -> Result<Vec<RootVec>> {
    match family {
        SpectralFamily::Ak if k >= 1 => Ok((0..k).map(|i| RootVec::pair(k + 1, i + 1, 1, i, -1)).collect()),
        SpectralFamily::Dk if k >= 2 => {
            let mut out = vec![RootVec::pair(k, 1, 1, 0, 1), RootVec::pair(k, 1, 1, 0, -1)];
            out.extend((1..k - 1).map(|i| RootVec::pair(k, i + 1, 1, i, -1)));
            Ok(out)
        }
        _ => Err(Error::InvalidInput(format!("{family:?} with k = {k} has no simple roots"))),
    }
}

/// Gram matrix of the simple roots.
pub fn cartan_matrix(family: SpectralFamily, k: usize) -> Result<Vec<Vec<i64>>> {
    let s = simple_roots(family, k)?;
    Ok(s.iter().map(|a| s.iter().map(|b| a.dot(b)).collect()).collect())
}

/// The Cartan matrix read off the Dynkin diagram: a path for `A_k`; for
/// `D_k` a path on nodes `3, …, k` with nodes 1 and 2 both joined to 3.
pub fn textbook_cartan(family: SpectralFamily, k: usize) -> Result<Vec<Vec<i64>>> {
    let mut edges = Vec::new();
    match family {
        SpectralFamily::Ak if k >= 1 => edges.extend((1..k).map(|i| (i - 1, i))),
        SpectralFamily::Dk if k >= 2 => {
            if k >= 3 {
                edges.push((0, 2));
                edges.push((1, 2));
            }
            edges.extend((3..k).map(|i| (i - 1, i)));
        }
        _ => return Err(Error::InvalidInput(format!("{family:?} with k = {k} has no Dynkin diagram"))),
    }
    let mut m = vec![vec![0; k]; k];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in edges {
        m[a][b] = -1;
        m[b][a] = -1;
    }
    Ok(m)
}

/// Whether `b = P a Pᵀ` for some permutation matrix `P`.
pub fn equal_up_to_permutation(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    let n = a.len();
    if b.len() != n {
        return false;
    }
    let signature = |m: &[Vec<i64>], i: usize| {
        let mut row = m[i].clone();
        let d = row.remove(i);
        row.sort_unstable();
        (d, row)
    };
    let sa: Vec<_> = (0..n).map(|i| signature(a, i)).collect();
    let sb: Vec<_> = (0..n).map(|i| signature(b, i)).collect();
    fn extend(
        i: usize,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        a: &[Vec<i64>],
        b: &[Vec<i64>],
        sa: &[(i64, Vec<i64>)],
        sb: &[(i64, Vec<i64>)],
    ) -> bool {
        if i == a.len() {
            return true;
        }
        for j in 0..a.len() {
            if used[j] || sa[i] != sb[j] {
                continue;
            }
            if perm.iter().enumerate().any(|(p, &q)| a[i][p] != b[j][q] || a[p][i] != b[q][j]) {
                continue;
            }
            used[j] = true;
            perm.push(j);
            if extend(i + 1, perm, used, a, b, sa, sb) {
                return true;
            }
            perm.pop();
            used[j] = false;
        }
        false
    }
    extend(0, &mut Vec::new(), &mut vec![false; n], a, b, &sa, &sb)
}

/// Default number of Gauss nodes along the segment and of fiber samples.
pub const PERIOD_NODES: usize = 32;

/// `∫ ω² + iω³` over the circle bundle above the segment from center
/// `alpha` to center `beta`, oriented by the segment direction then the
/// fiber.
pub fn period_integral_numeric(cfg: &MonopoleConfig, alpha: usize, beta: usize, nodes: usize) -> Result<Complex64> {
    if cfg.family() != Family::Ak {
        return Err(Error::InvalidInput("period integral needs an Ak configuration".into()));
    }
    let centers = cfg.centers();
    if alpha >= centers.len() || beta >= centers.len() {
        return Err(Error::InvalidInput(format!(
            "center index out of range ({alpha}, {beta}) for {} centers",
            centers.len()
        )));
    }
    if alpha == beta || centers[alpha] == centers[beta] {
        return Err(Error::CoincidentCenters(alpha, beta));
    }
    let (xa, xb) = (centers[alpha], centers[beta]);
    let dx = [xb[0] - xa[0], xb[1] - xa[1], xb[2] - xa[2]];
    let period = cfg.fiber_period();
    let rule = gauss_quad::GaussLegendre::new(nodes.max(2))
        .map_err(|e| Error::InvalidInput(format!("quadrature: {e}")))?;
    let theta_step = period / nodes.max(1) as f64;
    let tangent = [dx[0], dx[1], dx[2], 0.0];
    let fiber = [0.0, 0.0, 0.0, 1.0];
    let terms: Vec<Result<Complex64>> = rule
        .as_node_weight_pairs()
        .par_iter()
        .map(|&(u, w)| {
            let s = 0.5 * (u + 1.0);
            let x = [xa[0] + s * dx[0], xa[1] + s * dx[1], xa[2] + s * dx[2]];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..nodes.max(1) {
                let chart = GHChart::away_from_strings(cfg, x, (j as f64 + 0.5) * theta_step);
                let (t, _) = gh_triple(cfg, &chart)?;
                let eval = |i: usize| {
                    let m = t.w[i].to_matrix();
                    (0..4).map(|a| (0..4).map(|b| tangent[a] * m[a][b] * fiber[b]).sum::<f64>()).sum::<f64>()
                };
                acc += Complex64::new(eval(1), eval(2));
            }
            Ok(acc * (0.5 * w * theta_step))
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for t in terms {
        total += t?;
    }
    Ok(total)
}

/// `−x³ + ix²`.
pub fn complex_coordinate(x: &[f64; 3]) -> Complex64 {
    Complex64::new(-x[2], x[1])
}

/// The constant `c` in `∫ = c·(z_β − z_α)`, measured on the pair
/// `(0,0,0) → (0,1,0)` with fiber scale `m`.
pub fn calibrate_period_constant(m: f64, nodes: usize) -> Result<Complex64> {
    let cfg = MonopoleConfig::new(Family::Ak, m, vec![[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])?;
    let integral = period_integral_numeric(&cfg, 0, 1, nodes)?;
    Ok(integral / (complex_coordinate(&[0.0, 1.0, 0.0]) - complex_coordinate(&[0.0, 0.0, 0.0])))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodCheck {
    pub integral: Complex64,
    pub predicted: Complex64,
    /// `|integral − predicted| / max(|predicted|, c)`.
    pub residual: f64,
}

/// Compares the integral with `c·(z_β − z_α)` for a calibrated `c`.
pub fn period_check(cfg: &MonopoleConfig, alpha: usize, beta: usize, c: Complex64, nodes: usize) -> Result<PeriodCheck> {
    let integral = period_integral_numeric(cfg, alpha, beta, nodes)?;
    let centers = cfg.centers();
    let predicted = c * (complex_coordinate(&centers[beta]) - complex_coordinate(&centers[alpha]));
    let scale = predicted.norm().max(c.norm());
    Ok(PeriodCheck {
        integral,
        predicted,
        residual: (integral - predicted).norm() / scale,
    })
}
