//! Twistor-chart algebra for ALF spaces: spectral polynomials
//! `P_α(ζ) = a_α ζ² + 2b_α ζ − ā_α`, the `A_k` gluing and real structure,
//! reduction modulo `η² − wη − z`, the `D_k` quotient coordinates and
//! their quadric, binary dihedral invariants, and the `(P, Q)` transition
//! matrix between the charts at `ζ = 0` and `ζ = ∞`.
//!
//! The transition matrix uses the rescaled convention `e^{−2√z/ζ}`; the
//! unrescaled one is recovered by `z ↦ z/4`.

use std::ops::Div;

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Scalar, TripleAtPoint, TwoForm};

/// Complex scalars the identities are checked over.
pub trait TwistorScalar: Scalar + Div<Output = Self> {
    fn i() -> Self;
    fn modulus(&self) -> f64;
    /// Whether `self` counts as zero relative to `scale`.
    fn negligible(&self, scale: f64) -> bool;
}

impl TwistorScalar for Complex64 {
    fn i() -> Self {
        Complex64::i()
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= 1e-14 * scale
    }
}

impl TwistorScalar for Complex<BigRational> {
    fn i() -> Self {
        Complex::new(BigRational::zero(), num_traits::One::one())
    }
    fn modulus(&self) -> f64 {
        let n2 = &self.re * &self.re + &self.im * &self.im;
        n2.to_f64().unwrap_or(f64::NAN).sqrt()
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

/// Univariate polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly1<C> {
    c: Vec<C>,
}

impl<C: Scalar> Poly1<C> {
    pub fn new(mut c: Vec<C>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn constant(a: C) -> Self {
        Self::new(vec![a])
    }

    /// The variable itself.
    pub fn x() -> Self {
        Self::new(vec![C::zero(), C::one()])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn eval(&self, x: &C) -> C {
        self.c
            .iter()
            .rev()
            .fold(C::zero(), |acc, a| acc * x.clone() + a.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.c.get(i).cloned().unwrap_or_else(C::zero);
                    let b = o.c.get(i).cloned().unwrap_or_else(C::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-C::one()))
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::new(self.c.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// `(p(x) − p(0))/x`, exactly.
    pub fn drop_constant_and_shift(&self) -> Self {
        Self::new(self.c.iter().skip(1).cloned().collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralFamily {
    Ak,
    Dk,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParam {
    pub a_re: f64,
    pub a_im: f64,
    pub b: f64,
}

impl SpectralParam {
    pub fn a(&self) -> Complex64 {
        Complex64::new(self.a_re, self.a_im)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawSpectralData {
    family: SpectralFamily,
    k: usize,
    params: Vec<SpectralParam>,
}

/// Spectral parameters: `k + 1` of them for `A_k`, `k` for `D_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectralData", into = "RawSpectralData")]
pub struct SpectralData {
    family: SpectralFamily,
    k: usize,
    params: Vec<SpectralParam>,
}

impl TryFrom<RawSpectralData> for SpectralData {
    type Error = Error;
    fn try_from(r: RawSpectralData) -> Result<Self> {
        Self::new(r.family, r.k, r.params)
    }
}

impl From<SpectralData> for RawSpectralData {
    fn from(s: SpectralData) -> Self {
        RawSpectralData {
            family: s.family,
            k: s.k,
            params: s.params,
        }
    }
}

impl SpectralData {
    pub fn new(family: SpectralFamily, k: usize, params: Vec<SpectralParam>) -> Result<Self> {
        let expected = match family {
            SpectralFamily::Ak => k + 1,
            SpectralFamily::Dk => k,
        };
        if params.len() != expected {
            return Err(Error::InvalidInput(format!(
                "{family:?} with k = {k} needs {expected} parameters, got {}",
                params.len()
            )));
        }
        if params.iter().any(|p| !(p.a_re.is_finite() && p.a_im.is_finite() && p.b.is_finite())) {
            return Err(Error::InvalidInput("non-finite spectral parameter".into()));
        }
        Ok(Self { family, k, params })
    }

    pub fn family(&self) -> SpectralFamily {
        self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &[SpectralParam] {
        &self.params
    }

    /// Parameters of the same polynomials in the chart `ζ̃ = 1/ζ`, where
    /// `P_α(ζ) = ζ² P̃_α(ζ̃)`: `ã = −ā`, `b̃ = b`.
    pub fn at_infinity(&self) -> SpectralData {
        let params = self
            .params
            .iter()
            .map(|p| SpectralParam {
                a_re: -p.a_re,
                a_im: p.a_im,
                b: p.b,
            })
            .collect();
        SpectralData {
            family: self.family,
            k: self.k,
            params,
        }
    }
}

/// `a ζ² + 2b ζ − ā`.
pub fn p_alpha<T>(a: &Complex<T>, b: &T, zeta: &Complex<T>) -> Complex<T>
where
    T: Clone + Num + std::ops::Neg<Output = T>,
{
    let two_b = Complex::new(b.clone() + b.clone(), T::zero());
    a.clone() * zeta.clone() * zeta.clone() + two_b * zeta.clone() - a.conj()
}

/// `P_α(ζ)` for every parameter.
pub fn spectral_eval(sd: &SpectralData, zeta: Complex64) -> Vec<Complex64> {
    sd.params.iter().map(|p| p_alpha(&p.a(), &p.b, &zeta)).collect()
}

/// Expands `Π_α (η − P_α)` and reduces modulo `η² = wη + z`, returning
/// `(p, q)` with `Π(η − P_α) ≡ p(z) + η q(z)`.
pub fn mod_quadratic<C: Scalar>(roots: &[C], w: &Poly1<C>) -> (Poly1<C>, Poly1<C>) {
    let z = Poly1::<C>::x();
    let mut p = Poly1::constant(C::one());
    let mut q = Poly1::zero();
    for root in roots {
        // (p + ηq)(η − P) = −Pp + zq + η(p − Pq + wq)
        let np = p.scale(&-root.clone()).add(&z.mul(&q));
        let nq = p.add(&q.scale(&-root.clone())).add(&w.mul(&q));
        p = np;
        q = nq;
    }
    (p, q)
}

/// Quotient coordinates and the two sides of the quadric
/// `x² − zy² = (Π(z − P_α²) − Π(−P_α²))/(−z) + 2Π(−iP_α) y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiklrOutput<C> {
    pub x: C,
    pub y: C,
    pub xi0: C,
    pub xi1: C,
    pub lhs: C,
    pub rhs: C,
}

fn ipow<C: TwistorScalar>(base: &C, k: usize) -> C {
    (0..k).fold(C::one(), |acc, _| acc * base.clone())
}

/// Solves `ρ₀ξ₀ + z₀ρ₁ξ₁ = p(z₀)`, `ρ₁ξ₀ + ρ₀ξ₁ = q(z₀)` and forms
/// `x = i^k(ρ₁ξ₀ − ρ₀ξ₁)`, `y = i^k(−2ρ₁ξ₁ + r(z₀))` with
/// `p(z) = z r(z) + Π(−P_α)`; `k` is the number of roots.
pub fn chiklr_reduce_values<C: TwistorScalar>(
    p_vals: &[C],
    z0: &C,
    rho0: &C,
    rho1: &C,
) -> Result<ChiklrOutput<C>> {
    let scale_z = z0.modulus();
    if z0.negligible(1.0) || scale_z == 0.0 {
        return Err(Error::ZeroSpectralParameter);
    }
    let (p, q) = mod_quadratic(p_vals, &Poly1::zero());
    let r = p.drop_constant_and_shift();
    let pz = p.eval(z0);
    let qz = q.eval(z0);
    let rz = r.eval(z0);
    let det = rho0.clone() * rho0.clone() - z0.clone() * rho1.clone() * rho1.clone();
    let det_scale = rho0.modulus().powi(2) + scale_z * rho1.modulus().powi(2);
    if det.negligible(det_scale) {
        return Err(Error::DegenerateSystem { det: det.modulus() });
    }
    let xi0 = (pz.clone() * rho0.clone() - z0.clone() * rho1.clone() * qz.clone()) / det.clone();
    let xi1 = (rho0.clone() * qz - rho1.clone() * pz) / det;
    let ik = ipow(&C::i(), p_vals.len());
    let two = C::one() + C::one();
    let x = ik.clone() * (rho1.clone() * xi0.clone() - rho0.clone() * xi1.clone());
    let y = ik * (rz - two.clone() * rho1.clone() * xi1.clone());
    let lhs = x.clone() * x.clone() - z0.clone() * y.clone() * y.clone();
    let rhs = quadric_rhs(p_vals, z0, &y);
    Ok(ChiklrOutput {
        x,
        y,
        xi0,
        xi1,
        lhs,
        rhs,
    })
}

/// `(Π(z − P_α²) − Π(−P_α²))/(−z) + 2Π(−iP_α) y`.
pub fn quadric_rhs<C: TwistorScalar>(p_vals: &[C], z: &C, y: &C) -> C {
    let sq: Vec<C> = p_vals.iter().map(|p| p.clone() * p.clone()).collect();
    let full = sq.iter().fold(C::one(), |acc, s| acc * (z.clone() - s.clone()));
    let at0 = sq.iter().fold(C::one(), |acc, s| acc * -s.clone());
    let pi = p_vals.iter().fold(C::one(), |acc, p| acc * -(C::i() * p.clone()));
    let two = C::one() + C::one();
    (full - at0) / -z.clone() + two * pi * y.clone()
}

/// `Π(−iP_α)`.
pub fn pi_minus_i<C: TwistorScalar>(p_vals: &[C]) -> C {
    p_vals.iter().fold(C::one(), |acc, p| acc * -(C::i() * p.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiklrResult {
    pub x: Complex64,
    pub y: Complex64,
    /// `|lhs − rhs|` relative to the size of the terms.
    pub quadric_residual: f64,
}

/// Quotient coordinates at `(ζ, z₀, ρ₀, ρ₁)` with `P_α = P_α(ζ)`.
pub fn chiklr_reduce(
    sd: &SpectralData,
    zeta: Complex64,
    z0: Complex64,
    rho0: Complex64,
    rho1: Complex64,
) -> Result<ChiklrResult> {
    let p_vals = spectral_eval(sd, zeta);
    let out = chiklr_reduce_values(&p_vals, &z0, &rho0, &rho1)?;
    let scale = (out.x * out.x).norm() + (z0 * out.y * out.y).norm() + out.rhs.norm();
    Ok(ChiklrResult {
        x: out.x,
        y: out.y,
        quadric_residual: (out.lhs - out.rhs).norm() / scale.max(f64::MIN_POSITIVE),
    })
}

/// A point `(ζ, z, ρ, ξ)` of the `A_k` chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistorPointAk {
    pub zeta: Complex64,
    pub z: Complex64,
    pub rho: Complex64,
    pub xi: Complex64,
}

fn chart_product(sd: &SpectralData, zeta: Complex64, z: Complex64) -> Complex64 {
    spectral_eval(sd, zeta).iter().map(|p| z - p).product()
}

impl TwistorPointAk {
    /// The point over `(ζ, z)` with the given `ρ`, `ξ` solved from
    /// `ρξ = Π(z − P_α(ζ))`.
    pub fn on_variety(sd: &SpectralData, zeta: Complex64, z: Complex64, rho: Complex64) -> Self {
        let xi = chart_product(sd, zeta, z) / rho;
        Self { zeta, z, rho, xi }
    }

    /// `|ρξ − Π(z − P_α(ζ))|` relative to the larger side.
    pub fn variety_residual(&self, sd: &SpectralData) -> f64 {
        let rhs = chart_product(sd, self.zeta, self.z);
        let lhs = self.rho * self.xi;
        (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlueReport {
    pub glued: TwistorPointAk,
    pub residual_abs: f64,
    pub residual_rel: f64,
}

/// Maps a point to the chart at infinity,
/// `ζ̃ = 1/ζ`, `z̃ = z/ζ²`, `ρ̃ = e^{−z/ζ}ζ^{−k−1}ρ`, `ξ̃ = e^{z/ζ}ζ^{−k−1}ξ`,
/// and measures `|ρ̃ξ̃ − Π(z̃ − P̃_α(ζ̃))|`. The exponents of the product are
/// added before exponentiating.
pub fn glue_check_ak(sd: &SpectralData, pt: &TwistorPointAk) -> Result<GlueReport> {
    if pt.zeta == Complex64::zero() {
        return Err(Error::ZeroZeta);
    }
    let k = sd.k as i32;
    let zeta_t = pt.zeta.inv();
    let z_t = pt.z / (pt.zeta * pt.zeta);
    let e = pt.z / pt.zeta;
    let pw = pt.zeta.powi(-k - 1);
    let rho_t = (-e).exp() * pw * pt.rho;
    let xi_t = e.exp() * pw * pt.xi;
    let product = (-e + e).exp() * pw * pw * pt.rho * pt.xi;
    let rhs = chart_product(&sd.at_infinity(), zeta_t, z_t);
    let abs = (product - rhs).norm();
    Ok(GlueReport {
        glued: TwistorPointAk {
            zeta: zeta_t,
            z: z_t,
            rho: rho_t,
            xi: xi_t,
        },
        residual_abs: abs,
        residual_rel: abs / product.norm().max(rhs.norm()).max(f64::MIN_POSITIVE),
    })
}

/// `τ(ζ, z, ρ, ξ) = (−1/ζ̄, −z̄/ζ̄², e^{z̄/ζ̄}(1/ζ̄)^{k+1} ξ̄, e^{−z̄/ζ̄}(−1/ζ̄)^{k+1} ρ̄)`.
pub fn real_structure_ak(pt: &TwistorPointAk, k: usize) -> Result<TwistorPointAk> {
    if pt.zeta == Complex64::zero() {
        return Err(Error::ZeroZeta);
    }
    let zb = pt.zeta.conj();
    let e = pt.z.conj() / zb;
    let n = k as i32 + 1;
    Ok(TwistorPointAk {
        zeta: -zb.inv(),
        z: -pt.z.conj() / (zb * zb),
        rho: e.exp() * zb.inv().powi(n) * pt.xi.conj(),
        xi: (-e).exp() * (-zb.inv()).powi(n) * pt.rho.conj(),
    })
}

/// `cosh(√u)` and `sinh(√u)/√u`, both entire in `u`.
fn cosh_sinhc(u: Complex64) -> (Complex64, Complex64) {
    if u.norm() <= 1.0 {
        let mut c = Complex64::zero();
        let mut s = Complex64::zero();
        let mut term = Complex64::new(1.0, 0.0); // u^n/(2n)!
        for n in 0..30 {
            c += term;
            s += term / (2 * n + 1) as f64;
            term = term * u / ((2 * n + 1) * (2 * n + 2)) as f64;
        }
        (c, s)
    } else {
        let r = u.sqrt();
        (r.cosh(), r.sinh() / r)
    }
}

/// Entries of
/// `ζ^{−2k} [[cosh(2√z/ζ), −√z sinh(2√z/ζ)], [−ζ² sinh(2√z/ζ)/√z, ζ² cosh(2√z/ζ)]]`
/// written through entire functions of `z`, so no branch of `√z` is chosen.
pub fn transition_matrix(z: Complex64, zeta: Complex64, k: usize) -> Result<[[Complex64; 2]; 2]> {
    if zeta == Complex64::zero() {
        return Err(Error::ZeroZeta);
    }
    let (c, s) = cosh_sinhc(4.0 * z / (zeta * zeta));
    let f = zeta.powi(-2 * k as i32);
    // √z sinh(2√z/ζ) = (2z/ζ)·S,  sinh(2√z/ζ)/√z = (2/ζ)·S
    Ok([
        [f * c, -f * 2.0 * z / zeta * s],
        [-f * zeta * zeta * 2.0 / zeta * s, f * zeta * zeta * c],
    ])
}

/// `(P̃, Q̃)` from `(P, Q)`.
pub fn transition_pq(
    p: Complex64,
    q: Complex64,
    z: Complex64,
    zeta: Complex64,
    k: usize,
) -> Result<(Complex64, Complex64)> {
    let m = transition_matrix(z, zeta, k)?;
    Ok((m[0][0] * p + m[0][1] * q, m[1][0] * p + m[1][1] * q))
}

/// The same map evaluated literally with a chosen square root `s` of `z`.
pub fn transition_pq_with_root(
    p: Complex64,
    q: Complex64,
    s: Complex64,
    zeta: Complex64,
    k: usize,
) -> Result<(Complex64, Complex64)> {
    if zeta == Complex64::zero() {
        return Err(Error::ZeroZeta);
    }
    if s == Complex64::zero() {
        return transition_pq(p, q, Complex64::zero(), zeta, k);
    }
    let arg = 2.0 * s / zeta;
    let (ch, sh) = (arg.cosh(), arg.sinh());
    let f = zeta.powi(-2 * k as i32);
    let z2 = zeta * zeta;
    Ok((
        f * (ch * p - s * sh * q),
        f * (-z2 * sh / s * p + z2 * ch * q),
    ))
}

/// `det − ζ^{2−4k}` divided by `|m₀₀m₁₁| + |m₀₁m₁₀|`, the size of the
/// terms that cancel in the determinant.
pub fn transition_determinant_residual(z: Complex64, zeta: Complex64, k: usize) -> Result<f64> {
    let m = transition_matrix(z, zeta, k)?;
    let (d1, d2) = (m[0][0] * m[1][1], m[0][1] * m[1][0]);
    let expect = zeta.powi(2 - 4 * k as i32);
    Ok((d1 - d2 - expect).norm() / (d1.norm() + d2.norm()).max(f64::MIN_POSITIVE))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationReport {
    /// `|P² − zQ² − Π(z − P_α²)|`, relative.
    pub curve_residual: f64,
    /// `|P̃² − z̃Q̃² − ζ^{−4k}(P² − zQ²)|` with `z̃ = z/ζ⁴`, relative to the
    /// terms of `P̃² − z̃Q̃²`.
    pub scaling_residual: f64,
}

/// Builds `P = yz + Π(−iP_α)`, `Q = x` from the quotient coordinates and
/// checks the spectral-curve law before and after the transition.
pub fn spectral_conservation(
    sd: &SpectralData,
    zeta: Complex64,
    z0: Complex64,
    rho0: Complex64,
    rho1: Complex64,
) -> Result<ConservationReport> {
    let p_vals = spectral_eval(sd, zeta);
    let out = chiklr_reduce_values(&p_vals, &z0, &rho0, &rho1)?;
    let p = out.y * z0 + pi_minus_i(&p_vals);
    let q = out.x;
    let curve: Complex64 = p_vals.iter().map(|a| z0 - a * a).product();
    let lhs = p * p - z0 * q * q;
    let curve_residual =
        (lhs - curve).norm() / ((p * p).norm() + (z0 * q * q).norm()).max(f64::MIN_POSITIVE);
    let k = sd.k;
    let (pt, qt) = transition_pq(p, q, z0, zeta, k)?;
    let zt = z0 / zeta.powi(4);
    let after = pt * pt - zt * qt * qt;
    let expect = zeta.powi(-4 * k as i32) * lhs;
    let scaling_residual = (after - expect).norm()
        / ((pt * pt).norm() + (zt * qt * qt).norm()).max(f64::MIN_POSITIVE);
    Ok(ConservationReport {
        curve_residual,
        scaling_residual,
    })
}

/// Invariants of the binary dihedral action on `(u, v)`:
/// `x = uv(u^{2k−4} − v^{2k−4})/2`, `y = (u^{2k−4} + v^{2k−4})/2`,
/// `z = u²v²`, and `|x² − zy² + z^{k−1}|`.
pub fn dihedral_invariants(
    u: Complex64,
    v: Complex64,
    k: usize,
) -> Result<(Complex64, Complex64, Complex64, f64)> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("dihedral invariants need k ≥ 3, got {k}")));
    }
    let e = 2 * k as i32 - 4;
    let (ue, ve) = (u.powi(e), v.powi(e));
    let x = u * v * (ue - ve) / 2.0;
    let y = (ue + ve) / 2.0;
    let z = u * u * v * v;
    let res = (x * x - z * y * y + z.powi(k as i32 - 1)).norm();
    Ok((x, y, z, res))
}

/// Generators `σ(u, v) = (e^{iπ/(k−2)}u, e^{−iπ/(k−2)}v)` and
/// `τ(u, v) = (v, −u)` of the binary dihedral group.
pub fn dihedral_generators(k: usize) -> [Box<dyn Fn(Complex64, Complex64) -> (Complex64, Complex64)>; 2] {
    let w = Complex64::from_polar(1.0, std::f64::consts::PI / (k as f64 - 2.0));
    [
        Box::new(move |u, v| (w * u, v / w)),
        Box::new(|u, v| (v, -u)),
    ]
}

/// `ω(ζ) = (ω² + iω³) + 2ζω¹ − ζ²(ω² − iω³)`.
pub fn twistor_line_form(t: &TripleAtPoint<f64>, zeta: Complex64) -> TwoForm<Complex64> {
    let c = |w: &TwoForm<f64>| w.map(|&x| Complex64::new(x, 0.0));
    let (w1, w2, w3) = (c(&t.w[0]), c(&t.w[1]), c(&t.w[2]));
    let i = Complex64::i();
    let plus = w2.clone() + w3.scale(&i);
    let minus = w2 - w3.scale(&i);
    plus + w1.scale(&(2.0 * zeta)) - minus.scale(&(zeta * zeta))
}
