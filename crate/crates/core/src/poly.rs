//! Exact multivariate polynomials in `x¹..x⁴` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

/// Exponent vector of a monomial.
pub type Exponent = [u8; 4];

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly4 {
    terms: BTreeMap<Exponent, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Poly4 {
    pub fn constant(c: BigRational) -> Self {
        Self::monomial([0; 4], c)
    }

    pub fn monomial(e: Exponent, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// The coordinate function `x^{i+1}`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as u32).sum())
            .max()
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * s);
        }
        out
    }

    /// `∂/∂x^{i+1}`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = *e;
                e2[i] -= 1;
                out.add_term(e2, c * BigInt::from(e[i]));
            }
        }
        out
    }

    /// `Σ_a ∂²/∂(x^a)²`.
    pub fn laplacian(&self) -> Self {
        (0..4).fold(Self::zero(), |acc, i| acc + self.partial(i).partial(i))
    }

    pub fn eval(&self, x: &[BigRational; 4]) -> BigRational {
        let mut s = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &d) in e.iter().enumerate() {
                for _ in 0..d {
                    m *= &x[i];
                }
            }
            s += m;
        }
        s
    }

    pub fn eval_f64(&self, x: &[f64; 4]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let cf = c.to_f64().unwrap_or(f64::NAN);
                e.iter()
                    .enumerate()
                    .fold(cf, |m, (i, &d)| m * x[i].powi(d as i32))
            })
            .sum()
    }

    /// Random polynomial with every monomial of degree `≤ max_degree`
    /// present with probability `density` and coefficient `p/q`,
    /// `|p| ≤ 9`, `1 ≤ q ≤ 4`.
    pub fn random<R: Rng>(rng: &mut R, max_degree: u8, density: f64) -> Self {
        let mut out = Self::zero();
        for e in exponents_up_to(max_degree) {
            if rng.random::<f64>() < density {
                let num = rng.random_range(-9i64..=9);
                let den = rng.random_range(1i64..=4);
                out.add_term(e, rat(num, den));
            }
        }
        out
    }
}

/// All exponent vectors of total degree `≤ d`, in lexicographic order.
pub fn exponents_up_to(d: u8) -> Vec<Exponent> {
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            for c in 0..=d - a - b {
                for e in 0..=d - a - b - c {
                    out.push([a, b, c, e]);
                }
            }
        }
    }
    out
}

impl fmt::Debug for Poly4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &d) in e.iter().enumerate() {
                if d > 0 {
                    write!(f, "·x{}^{}", i + 1, d)?;
                }
            }
        }
        Ok(())
    }
}

impl Zero for Poly4 {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly4 {
    fn one() -> Self {
        Self::constant(BigRational::one())
    }
}

impl Add for Poly4 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for Poly4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Poly4 {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for Poly4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = std::array::from_fn(|i| e1[i] + e2[i]);
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}
