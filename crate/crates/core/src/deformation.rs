//! Infinitesimal deformations of a hyperkähler triple by vector fields.
//!
//! A deformation `θ = (θ¹, θ², θ³)` of a triple `ω` is sorted by the 3×3
//! matrix `S_ij = (θ^i∧ω^j)/(2 vol)`, which only sees the self-dual parts
//! of `θ`. The four-dimensional subspace spanned by
//!
//! ```text
//! e₁: θ = ( ω¹,  ω²,  ω³)      e₂: θ = (  0,  ω³, −ω²)
//! e₃: θ = (−ω³,   0,  ω¹)      e₄: θ = ( ω², −ω¹,   0)
//! ```
//!
//! is the span of the identity and the antisymmetric matrices; its
//! complement (traceless symmetric `S`) is five-dimensional.

use std::ops::Div;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{is_definite, normalize_triple, Grid4, Scalar, TripleAtPoint, TwoForm};
use crate::poly::{rat, Exponent, Poly4};

/// Coefficients on `e₁..e₄`.
#[derive(Clone, Debug, PartialEq)]
pub struct VCoeffs<T> {
    pub c: [T; 4],
}

impl<T: Scalar> VCoeffs<T> {
    pub fn new(c: [T; 4]) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self {
            c: std::array::from_fn(|_| T::zero()),
        }
    }

    /// Matrix `B` with `θ^i = Σ_j B_ij ω^j`.
    pub fn matrix(&self) -> [[T; 3]; 3] {
        let [c1, c2, c3, c4] = self.c.clone();
        [
            [c1.clone(), c4.clone(), -c3.clone()],
            [-c4, c1.clone(), c2.clone()],
            [c3, -c2, c1],
        ]
    }

    /// The triple `Σ c_a e_a` built from `base`.
    pub fn reconstitute(&self, base: &TripleAtPoint<T>) -> TripleAtPoint<T> {
        base.recombine(&self.matrix())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            c: std::array::from_fn(|i| self.c[i].clone() * s.clone()),
        }
    }
}

impl VCoeffs<Poly4> {
    pub fn laplacian(&self) -> Self {
        Self {
            c: std::array::from_fn(|i| self.c[i].laplacian()),
        }
    }
}

/// Result of projecting a deformation onto the span of `e₁..e₄`.
#[derive(Clone, Debug, PartialEq)]
pub struct VProjection<T> {
    pub coeffs: VCoeffs<T>,
    /// `θ − Σ c_a e_a`: anti-self-dual parts plus the self-dual remainder.
    pub residual: TripleAtPoint<T>,
    /// Traceless symmetric part of `S`, the self-dual component orthogonal
    /// to the span.
    pub complement: [[T; 3]; 3],
}

fn project_normalized<T>(t: &TripleAtPoint<T>, base: &TripleAtPoint<T>) -> VProjection<T>
where
    T: Scalar + Div<Output = T>,
{
    let two = T::one() + T::one();
    let three = two.clone() + T::one();
    // base is normalized, so w_i∧w_i = 2 vol for each i
    let two_vol = base.w[0].wedge(&base.w[0]);
    let s: [[T; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| t.w[i].wedge(&base.w[j]) / two_vol.clone())
    });
    let trace = s[0][0].clone() + s[1][1].clone() + s[2][2].clone();
    let c1 = trace.clone() / three;
    let c2 = (s[1][2].clone() - s[2][1].clone()) / two.clone();
    let c3 = (s[2][0].clone() - s[0][2].clone()) / two.clone();
    let c4 = (s[0][1].clone() - s[1][0].clone()) / two.clone();
    let coeffs = VCoeffs::new([c1.clone(), c2, c3, c4]);
    let v_part = coeffs.reconstitute(base);
    let residual = TripleAtPoint {
        w: std::array::from_fn(|i| t.w[i].clone() - v_part.w[i].clone()),
    };
    let complement = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let sym = (s[i][j].clone() + s[j][i].clone()) / two.clone();
            if i == j {
                sym - c1.clone()
            } else {
                sym
            }
        })
    });
    VProjection {
        coeffs,
        residual,
        complement,
    }
}

/// Projection of a numeric deformation onto the span of `e₁..e₄` built from
/// `base`. A general definite base is Gram–Schmidt normalized first.
pub fn v_project(t: &TripleAtPoint<f64>, base: &TripleAtPoint<f64>) -> Result<VProjection<f64>> {
    if !is_definite(base) {
        return Err(Error::DegenerateBase);
    }
    let base = normalize_triple(base).map_err(|_| Error::DegenerateBase)?;
    Ok(project_normalized(t, &base))
}

/// Exact projection. The base must satisfy `ω^i∧ω^j = 2δ_ij vol` with
/// `vol ≠ 0` exactly.
pub fn v_project_exact(
    t: &TripleAtPoint<BigRational>,
    base: &TripleAtPoint<BigRational>,
) -> Result<VProjection<BigRational>> {
    check_exact_base(base)?;
    Ok(project_normalized(t, base))
}

fn check_exact_base(base: &TripleAtPoint<BigRational>) -> Result<()> {
    let m = base.wedge_matrix();
    let normalized = (0..3).all(|i| {
        (0..3).all(|j| {
            if i == j {
                m[i][j] == m[0][0]
            } else {
                m[i][j].is_zero()
            }
        })
    });
    if m[0][0].is_zero() || !normalized {
        return Err(Error::DegenerateBase);
    }
    Ok(())
}

/// Projection of a triple with polynomial coefficients against a constant
/// base, monomial by monomial.
pub fn v_project_poly(
    t: &TripleAtPoint<Poly4>,
    base: &TripleAtPoint<BigRational>,
) -> Result<VProjection<Poly4>> {
    check_exact_base(base)?;
    let mut exps: Vec<Exponent> = t
        .w
        .iter()
        .flat_map(|w| w.c.iter())
        .flat_map(|p| p.terms().map(|(e, _)| *e))
        .collect();
    exps.sort_unstable();
    exps.dedup();
    let mut coeffs = VCoeffs::<Poly4>::zero();
    let mut residual = TripleAtPoint::new(TwoForm::zero(), TwoForm::zero(), TwoForm::zero());
    let mut complement: [[Poly4; 3]; 3] = Default::default();
    for e in exps {
        let slice = TripleAtPoint {
            w: std::array::from_fn(|i| t.w[i].map(|p| p.coeff(&e))),
        };
        let proj = project_normalized(&slice, base);
        let lift = |q: &BigRational| Poly4::monomial(e, q.clone());
        for a in 0..4 {
            coeffs.c[a] = coeffs.c[a].clone() + lift(&proj.coeffs.c[a]);
        }
        for i in 0..3 {
            residual.w[i] = residual.w[i].clone() + proj.residual.w[i].map(lift);
            for j in 0..3 {
                complement[i][j] = complement[i][j].clone() + lift(&proj.complement[i][j]);
            }
        }
    }
    Ok(VProjection {
        coeffs,
        residual,
        complement,
    })
}

/// Largest violation of the relations cutting out the span of `e₁..e₄`:
/// `ω^i∧θ^j + ω^j∧θ^i = 0` for `i ≠ j` and equal diagonal wedges.
pub fn v_membership_residual(theta: &TripleAtPoint<f64>, base: &TripleAtPoint<f64>) -> f64 {
    let p = |i: usize, j: usize| base.w[i].wedge(&theta.w[j]);
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in i + 1..3 {
            worst = worst.max((p(i, j) + p(j, i)).abs());
        }
    }
    worst = worst.max((p(0, 0) - p(1, 1)).abs());
    worst.max((p(1, 1) - p(2, 2)).abs())
}

/// `X = Σ f^a ∂/∂x^a` with polynomial components.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    pub f: [Poly4; 4],
}

impl PolyVectorField {
    pub fn new(f: [Poly4; 4]) -> Self {
        Self { f }
    }

    pub fn degree(&self) -> Option<u32> {
        self.f.iter().filter_map(|p| p.degree()).max()
    }

    /// `Σ x^a ∂/∂x^a`.
    pub fn euler() -> Self {
        Self::new(std::array::from_fn(Poly4::var))
    }

    pub fn random<R: Rng>(rng: &mut R, max_degree: u8, density: f64) -> Self {
        Self::new(std::array::from_fn(|_| Poly4::random(rng, max_degree, density)))
    }

    pub fn eval_f64(&self, x: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|a| self.f[a].eval_f64(x))
    }
}

/// `d(X⌟ω^i)` for a constant-coefficient base, exactly.
pub fn lie_deform_poly(
    x: &PolyVectorField,
    base: &TripleAtPoint<BigRational>,
) -> TripleAtPoint<Poly4> {
    TripleAtPoint {
        w: std::array::from_fn(|i| {
            // (X⌟ω)_b = Σ_a X^a ω_ab
            let alpha: [Poly4; 4] = std::array::from_fn(|b| {
                (0..4).fold(Poly4::zero(), |acc, a| {
                    acc + x.f[a].scale(&base.w[i].get(a, b))
                })
            });
            let mut out = TwoForm::zero();
            for a in 0..4 {
                for b in a + 1..4 {
                    out.set(a, b, alpha[b].partial(a) - alpha[a].partial(b));
                }
            }
            out
        }),
    }
}

/// `d(X⌟ω^i)` at `p` by central differences with step `h` per axis, for a
/// closed base triple given pointwise.
pub fn lie_deform_fd<X, B>(x: &X, base: &B, p: [f64; 4], h: [f64; 4]) -> Result<TripleAtPoint<f64>>
where
    X: Fn([f64; 4]) -> [f64; 4],
    B: Fn([f64; 4]) -> Result<TripleAtPoint<f64>>,
{
    let alpha = |q: [f64; 4]| -> Result<[[f64; 4]; 3]> {
        let t = base(q)?;
        let v = x(q);
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|b| (0..4).map(|a| v[a] * t.w[i].get(a, b)).sum())
        }))
    };
    // d_a α_b for every a, b, i
    let mut grad = [[[0.0; 4]; 4]; 3];
    for a in 0..4 {
        let mut fwd = p;
        let mut bwd = p;
        fwd[a] += h[a];
        bwd[a] -= h[a];
        let af = alpha(fwd)?;
        let ab = alpha(bwd)?;
        for i in 0..3 {
            for b in 0..4 {
                grad[i][a][b] = (af[i][b] - ab[i][b]) / (2.0 * h[a]);
            }
        }
    }
    Ok(TripleAtPoint {
        w: std::array::from_fn(|i| {
            let mut out = TwoForm::zero();
            for a in 0..4 {
                for b in a + 1..4 {
                    out.set(a, b, grad[i][a][b] - grad[i][b][a]);
                }
            }
            out
        }),
    })
}

/// [`lie_deform_fd`] on every interior node of `grid`, in node order.
pub fn lie_deform_grid<X, B>(x: &X, base: &B, grid: &Grid4) -> Result<Vec<TripleAtPoint<f64>>>
where
    X: Fn([f64; 4]) -> [f64; 4] + Sync,
    B: Fn([f64; 4]) -> Result<TripleAtPoint<f64>> + Sync,
{
    let interior = grid.interior();
    (0..interior.len())
        .into_par_iter()
        .map(|i| lie_deform_fd(x, base, interior.point(interior.multi_index(i)), grid.spacing))
        .collect()
}

/// `(a, b, sign)`: row `r` of the flat operator contains `sign·∂f^b/∂x^a`
/// for each listed entry (zero-based indices).
const D_ROWS: [[(usize, usize, i8); 4]; 4] = [
    [(0, 0, 1), (1, 1, 1), (2, 2, 1), (3, 3, 1)],
    [(1, 0, 1), (0, 1, -1), (3, 2, 1), (2, 3, -1)],
    [(2, 0, 1), (3, 1, -1), (0, 2, -1), (1, 3, 1)],
    [(3, 0, 1), (2, 1, 1), (1, 2, -1), (0, 3, -1)],
];

fn signed(p: Poly4, sign: i8) -> Poly4 {
    if sign > 0 {
        p
    } else {
        -p
    }
}

/// The flat first-order operator
///
/// ```text
/// D(Σ f^a ∂_a) = (∂₁f¹ + ∂₂f² + ∂₃f³ + ∂₄f⁴) e₁
///              + (∂₂f¹ − ∂₁f² + ∂₄f³ − ∂₃f⁴) e₂
///              + (∂₃f¹ − ∂₄f² − ∂₁f³ + ∂₂f⁴) e₃
///              + (∂₄f¹ + ∂₃f² − ∂₂f³ − ∂₁f⁴) e₄
/// ```
///
/// Its coefficients are twice those of `v_project(lie_deform(X, flat))`.
pub fn d_flat(x: &PolyVectorField) -> VCoeffs<Poly4> {
    VCoeffs::new(std::array::from_fn(|r| {
        D_ROWS[r].iter().fold(Poly4::zero(), |acc, &(a, b, s)| {
            acc + signed(x.f[b].partial(a), s)
        })
    }))
}

/// `D* = Σ_a M_aᵀ ∂_a` where `D = Σ_a M_a ∂_a`. This is minus the formal
/// L² adjoint, normalized so that `D D*` is the Laplacian `Σ ∂_a²`.
pub fn dstar_flat(c: &VCoeffs<Poly4>) -> PolyVectorField {
    let mut f: [Poly4; 4] = Default::default();
    for (r, row) in D_ROWS.iter().enumerate() {
        for &(a, b, s) in row {
            f[b] = f[b].clone() + signed(c.c[r].partial(a), s);
        }
    }
    PolyVectorField::new(f)
}

pub fn ddstar_flat(c: &VCoeffs<Poly4>) -> VCoeffs<Poly4> {
    d_flat(&dstar_flat(c))
}

/// `2·v_project(lie_deform(X, flat))`, the projection route to `D`.
pub fn d_via_projection(x: &PolyVectorField) -> Result<VCoeffs<Poly4>> {
    let flat = TripleAtPoint::<BigRational>::flat();
    let proj = v_project_poly(&lie_deform_poly(x, &flat), &flat)?;
    Ok(proj.coeffs.scale(&Poly4::constant(rat(2, 1))))
}
