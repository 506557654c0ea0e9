//! Pointwise exterior algebra of 2-forms in four coordinates.
//!
//! A [`TwoForm`] stores its six independent coefficients in the fixed order
//! `(12, 13, 14, 23, 24, 34)`; antisymmetry is implicit. All wedge tables in
//! this crate are written against that order. 3-forms are stored as four
//! coefficients in the order `(123, 124, 134, 234)`.
//!
//! The module also contains the finite-difference exterior derivative on
//! axis-aligned 4D grids and the reconstruction of a metric from a definite
//! triple of 2-forms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Index pairs of the stored coefficients, zero-based.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index triples of 3-form coefficients, zero-based.
pub const TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

/// Ring operations needed by the form algebra. Implemented for `f64`,
/// complex numbers, exact rationals and the polynomial types in this crate.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Position of `(a, b)` with `a < b` in [`PAIRS`].
pub fn pair_index(a: usize, b: usize) -> usize {
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("pair_index expects 0 <= a < b < 4, got ({a}, {b})"),
    }
}

/// A 2-form at a point, or a 2-form with coefficients in a ring `T`.
#[derive(Clone, PartialEq, Debug)]
pub struct TwoForm<T> {
    pub c: [T; 6],
}

impl<T: Scalar> TwoForm<T> {
    pub fn new(c: [T; 6]) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self {
            c: std::array::from_fn(|_| T::zero()),
        }
    }

    /// `dx^a ∧ dx^b` for any distinct `a`, `b` (zero-based).
    pub fn basis(a: usize, b: usize) -> Self {
        let mut f = Self::zero();
        f.set(a, b, T::one());
        f
    }

    /// Coefficient of `dx^a ∧ dx^b` including the antisymmetric sign.
    pub fn get(&self, a: usize, b: usize) -> T {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.c[pair_index(a, b)].clone(),
            std::cmp::Ordering::Greater => -self.c[pair_index(b, a)].clone(),
            std::cmp::Ordering::Equal => T::zero(),
        }
    }

    /// Sets the coefficient of `dx^a ∧ dx^b`, respecting antisymmetry.
    pub fn set(&mut self, a: usize, b: usize, v: T) {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.c[pair_index(a, b)] = v,
            std::cmp::Ordering::Greater => self.c[pair_index(b, a)] = -v,
            std::cmp::Ordering::Equal => assert!(v == T::zero(), "diagonal entry of a 2-form"),
        }
    }

    /// Coefficient of `dx¹∧dx²∧dx³∧dx⁴` in `self ∧ other`.
    pub fn wedge(&self, other: &Self) -> T {
        let a = &self.c;
        let b = &other.c;
        a[0].clone() * b[5].clone() + a[5].clone() * b[0].clone()
            - a[1].clone() * b[4].clone()
            - a[4].clone() * b[1].clone()
            + a[2].clone() * b[3].clone()
            + a[3].clone() * b[2].clone()
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            c: std::array::from_fn(|i| self.c[i].clone() * s.clone()),
        }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> TwoForm<U> {
        TwoForm {
            c: std::array::from_fn(|i| f(&self.c[i])),
        }
    }

    /// Antisymmetric 4×4 matrix `W` with `w(X, Y) = Xᵀ W Y`.
    pub fn to_matrix(&self) -> [[T; 4]; 4] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.get(a, b)))
    }

    /// Reads the upper triangle of an antisymmetric matrix.
    pub fn from_matrix(m: &[[T; 4]; 4]) -> Self {
        Self {
            c: std::array::from_fn(|i| {
                let (a, b) = PAIRS[i];
                m[a][b].clone()
            }),
        }
    }
}

impl<T: Scalar> Add for TwoForm<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            c: std::array::from_fn(|i| self.c[i].clone() + rhs.c[i].clone()),
        }
    }
}

impl<T: Scalar> Sub for TwoForm<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            c: std::array::from_fn(|i| self.c[i].clone() - rhs.c[i].clone()),
        }
    }
}

impl<T: Scalar> Neg for TwoForm<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x.clone())
    }
}

impl TwoForm<f64> {
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn to_na(&self) -> Matrix4<f64> {
        let m = self.to_matrix();
        Matrix4::from_fn(|a, b| m[a][b])
    }

    pub fn from_na(m: &Matrix4<f64>) -> Self {
        Self {
            c: std::array::from_fn(|i| {
                let (a, b) = PAIRS[i];
                m[(a, b)]
            }),
        }
    }
}

/// Three 2-forms at a point.
#[derive(Clone, PartialEq, Debug)]
pub struct TripleAtPoint<T> {
    pub w: [TwoForm<T>; 3],
}

impl<T: Scalar> TripleAtPoint<T> {
    pub fn new(w1: TwoForm<T>, w2: TwoForm<T>, w3: TwoForm<T>) -> Self {
        Self { w: [w1, w2, w3] }
    }

    /// The flat hyperkähler triple on R⁴:
    /// `ω¹ = dx¹∧dx² + dx³∧dx⁴`, `ω² = dx¹∧dx³ + dx⁴∧dx²`,
    /// `ω³ = dx¹∧dx⁴ + dx²∧dx³`.
    pub fn flat() -> Self {
        let e = |a, b| TwoForm::<T>::basis(a, b);
        Self::new(
            e(0, 1) + e(2, 3),
            e(0, 2) + e(3, 1),
            e(0, 3) + e(1, 2),
        )
    }

    /// Raw wedge coefficients `M_ij = w_i ∧ w_j`.
    pub fn wedge_matrix(&self) -> [[T; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.w[i].wedge(&self.w[j])))
    }

    /// Linear recombination `w'_i = Σ_j r_ij w_j`.
    pub fn recombine(&self, r: &[[T; 3]; 3]) -> Self {
        Self {
            w: std::array::from_fn(|i| {
                (0..3).fold(TwoForm::zero(), |acc, j| acc + self.w[j].scale(&r[i][j]))
            }),
        }
    }
}

/// Symmetric 4×4 metric in chart coordinates.
pub type Metric4 = Matrix4<f64>;

/// Gram data of a triple: `w_i ∧ w_j = 2 Q_ij vol · dx¹∧dx²∧dx³∧dx⁴` with
/// `vol = (w1∧w1)/2`. When `vol` vanishes, `Q` holds the raw wedge
/// coefficients instead.
pub fn wedge_gram(t: &TripleAtPoint<f64>) -> (Matrix3<f64>, f64) {
    let m = t.wedge_matrix();
    let raw = Matrix3::from_fn(|i, j| m[i][j]);
    let vol = 0.5 * m[0][0];
    if vol == 0.0 {
        return (raw, 0.0);
    }
    (raw / (2.0 * vol), vol)
}

fn scale_of(t: &TripleAtPoint<f64>) -> f64 {
    t.w.iter().map(|w| w.max_abs()).fold(0.0, f64::max)
}

/// True when the triple spans a definite 3-plane: `vol ≠ 0` and `Q` positive
/// definite.
pub fn is_definite(t: &TripleAtPoint<f64>) -> bool {
    let s = scale_of(t);
    let (q, vol) = wedge_gram(t);
    vol.abs() > 1e-14 * s * s && q.cholesky().is_some()
}

/// Gram–Schmidt normalization of a definite triple: returns `w' = L w` with
/// `Q' = I` and the same `vol`.
pub fn normalize_triple(t: &TripleAtPoint<f64>) -> Result<TripleAtPoint<f64>> {
    if !is_definite(t) {
        return Err(Error::IndefiniteTriple("Gram matrix is not positive definite".into()));
    }
    let (q, _) = wedge_gram(t);
    let chol = q
        .cholesky()
        .ok_or_else(|| Error::IndefiniteTriple("Cholesky factorization failed".into()))?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::IndefiniteTriple("singular Cholesky factor".into()))?;
    let r: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| l_inv[(i, j)]));
    Ok(t.recombine(&r))
}

/// Tolerance on `|Q - I|` accepted by [`metric_from_triple`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Reconstructs the metric for which a normalized definite triple is an
/// orthonormal (in the `ω^i∧ω^j = 2δ_ij vol` sense) frame of self-dual forms.
///
/// Each `w_i` is read as a map `W_i` from vectors to covectors. With
/// `A = W₁⁻¹W₂` and `s² = -tr(A²)/4`, the endomorphism `K = -A/s` squares to
/// `-1`, and `g(X, Y) = w₃(K⁻¹X, Y)`, symmetrized. The overall sign is
/// chosen to make `g` positive definite.
pub fn metric_from_triple(t: &TripleAtPoint<f64>) -> Result<Metric4> {
    let scale = scale_of(t);
    let (q, vol) = wedge_gram(t);
    if vol.abs() <= 1e-14 * scale * scale {
        return Err(Error::IndefiniteTriple("vanishing volume form".into()));
    }
    if q.cholesky().is_none() {
        return Err(Error::IndefiniteTriple("Gram matrix is not positive definite".into()));
    }
    let deviation = (q - Matrix3::identity()).abs().max();
    if deviation > NORMALIZATION_TOL {
        return Err(Error::UnnormalizedTriple { deviation });
    }
    let w1 = t.w[0].to_na();
    let w2 = t.w[1].to_na();
    let w3 = t.w[2].to_na();
    let w1_inv = w1
        .try_inverse()
        .ok_or_else(|| Error::IndefiniteTriple("degenerate first form".into()))?;
    let a = w1_inv * w2;
    let s2 = -(a * a).trace() / 4.0;
    if s2 <= 0.0 {
        return Err(Error::IndefiniteTriple("A² is not negative".into()));
    }
    let k = -a / s2.sqrt();
    // K² = -1, so K⁻¹ = -K.
    let k_inv = -k;
    let g = k_inv.transpose() * w3;
    let g = 0.5 * (g + g.transpose());
    if g.cholesky().is_some() {
        Ok(g)
    } else if (-g).cholesky().is_some() {
        Ok(-g)
    } else {
        Err(Error::IndefiniteTriple("reconstructed metric is indefinite".into()))
    }
}

/// Levi-Civita symbol on four indices.
fn levi_civita(i: usize, j: usize, k: usize, l: usize) -> f64 {
    let p = [i, j, k, l];
    let mut sign = 1.0;
    for a in 0..4 {
        for b in a + 1..4 {
            if p[a] == p[b] {
                return 0.0;
            }
            if p[a] > p[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Hodge star of a 2-form with respect to `g`, chart orientation
/// `dx¹∧dx²∧dx³∧dx⁴`.
pub fn hodge_star(w: &TwoForm<f64>, g: &Metric4) -> Result<TwoForm<f64>> {
    if g.cholesky().is_none() {
        return Err(Error::SingularMetric);
    }
    let g_inv = g.try_inverse().ok_or(Error::SingularMetric)?;
    let sqrt_det = g.determinant().sqrt();
    let up = g_inv * w.to_na() * g_inv;
    let mut out = TwoForm::zero();
    for (idx, &(k, l)) in PAIRS.iter().enumerate() {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += up[(i, j)] * levi_civita(i, j, k, l);
            }
        }
        out.c[idx] = 0.5 * sqrt_det * s;
    }
    Ok(out)
}

/// Splits `w` into its self-dual and anti-self-dual parts with respect to `g`.
pub fn sd_project(w: &TwoForm<f64>, g: &Metric4) -> Result<(TwoForm<f64>, TwoForm<f64>)> {
    let star = hodge_star(w, g)?;
    let sd = (w.clone() + star.clone()).scale(&0.5);
    let asd = (w.clone() - star).scale(&0.5);
    Ok((sd, asd))
}

/// Axis-aligned 4D grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid4 {
    pub origin: [f64; 4],
    pub spacing: [f64; 4],
    pub extents: [usize; 4],
}

impl Grid4 {
    pub fn new(origin: [f64; 4], spacing: [f64; 4], extents: [usize; 4]) -> Result<Self> {
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidInput("grid spacing must be positive".into()));
        }
        Ok(Self {
            origin,
            spacing,
            extents,
        })
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat_index(&self, idx: [usize; 4]) -> usize {
        let n = self.extents;
        ((idx[0] * n[1] + idx[1]) * n[2] + idx[2]) * n[3] + idx[3]
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; 4] {
        let n = self.extents;
        let mut idx = [0; 4];
        for axis in (0..4).rev() {
            idx[axis] = flat % n[axis];
            flat /= n[axis];
        }
        idx
    }

    pub fn point(&self, idx: [usize; 4]) -> [f64; 4] {
        std::array::from_fn(|a| self.origin[a] + self.spacing[a] * idx[a] as f64)
    }

    /// Grid of the nodes with every index strictly inside.
    pub fn interior(&self) -> Grid4 {
        Grid4 {
            origin: std::array::from_fn(|a| self.origin[a] + self.spacing[a]),
            spacing: self.spacing,
            extents: std::array::from_fn(|a| self.extents[a].saturating_sub(2)),
        }
    }

    /// Same box, spacing halved.
    pub fn refined(&self) -> Grid4 {
        Grid4 {
            origin: self.origin,
            spacing: std::array::from_fn(|a| 0.5 * self.spacing[a]),
            extents: std::array::from_fn(|a| 2 * self.extents[a] - 1),
        }
    }
}

/// A 2-form sampled on every node of a grid.
#[derive(Clone, Debug)]
pub struct FormField {
    grid: Grid4,
    values: Vec<TwoForm<f64>>,
}

impl FormField {
    pub fn new(grid: Grid4, values: Vec<TwoForm<f64>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} nodes, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every node; evaluation runs in parallel, node order is
    /// preserved.
    pub fn sample<F>(grid: Grid4, f: F) -> Result<Self>
    where
        F: Fn([f64; 4]) -> Result<TwoForm<f64>> + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.point(grid.multi_index(i))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid4 {
        &self.grid
    }

    pub fn values(&self) -> &[TwoForm<f64>] {
        &self.values
    }

    pub fn at(&self, idx: [usize; 4]) -> &TwoForm<f64> {
        &self.values[self.grid.flat_index(idx)]
    }
}

/// A 3-form per node, coefficients ordered as [`TRIPLES`].
#[derive(Clone, Debug)]
pub struct ThreeFormField {
    pub grid: Grid4,
    pub values: Vec<[f64; 4]>,
}

impl ThreeFormField {
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Minimum number of nodes per axis accepted by [`exterior_derivative_fd`].
pub const MIN_NODES_PER_AXIS: usize = 4;

/// `dω` on interior nodes by second-order central differences,
/// `(dω)_{abc} = ∂_a ω_{bc} − ∂_b ω_{ac} + ∂_c ω_{ab}`. Boundary nodes are
/// dropped.
pub fn exterior_derivative_fd(f: &FormField) -> Result<ThreeFormField> {
    let grid = &f.grid;
    if let Some(axis) = (0..4).find(|&a| grid.extents[a] < MIN_NODES_PER_AXIS) {
        return Err(Error::InsufficientGrid(format!(
            "axis {} has {} nodes, need at least {}",
            axis, grid.extents[axis], MIN_NODES_PER_AXIS
        )));
    }
    let interior = grid.interior();
    let values = (0..interior.len())
        .into_par_iter()
        .map(|flat| {
            let inner = interior.multi_index(flat);
            let idx: [usize; 4] = std::array::from_fn(|a| inner[a] + 1);
            let partial = |axis: usize, a: usize, b: usize| -> f64 {
                let mut fwd = idx;
                let mut bwd = idx;
                fwd[axis] += 1;
                bwd[axis] -= 1;
                (f.at(fwd).get(a, b) - f.at(bwd).get(a, b)) / (2.0 * grid.spacing[axis])
            };
            std::array::from_fn(|t| {
                let (a, b, c) = TRIPLES[t];
                partial(a, b, c) - partial(b, a, c) + partial(c, a, b)
            })
        })
        .collect();
    Ok(ThreeFormField {
        grid: interior,
        values,
    })
}

/// Ratio `max|r_h| / max|r_{h/2}|` of two residual fields compared on the
/// nodes of the coarse field (which are also nodes of the fine field when the
/// fine grid is `coarse.refined()`).
pub fn refinement_ratio(coarse: &ThreeFormField, fine: &ThreeFormField) -> f64 {
    let mut max_c: f64 = 0.0;
    let mut max_f: f64 = 0.0;
    for flat in 0..coarse.grid.len() {
        let idx = coarse.grid.multi_index(flat);
        // coarse interior node i sits at fine interior index 2i + 1
        let fidx: [usize; 4] = std::array::from_fn(|a| 2 * idx[a] + 1);
        let c = coarse.values[flat];
        let fv = fine.values[fine.grid.flat_index(fidx)];
        max_c = c.iter().fold(max_c, |m, x| m.max(x.abs()));
        max_f = fv.iter().fold(max_f, |m, x| m.max(x.abs()));
    }
    max_c / max_f
}
