//! Coefficient rings.
//!
//! Every jet in the crate is generic over a [`Coeff`] ring. Plain rationals
//! give pointwise computations; [`crate::wpoly::WPoly`] itself is a ring, so
//! polynomials with polynomial coefficients carry a basepoint as a formal
//! parameter.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Lowest terms, positive denominator, denominator 1 omitted.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // very large operands: scale by bit length first
            let shift = x.numer().bits().max(x.denom().bits()) as i64 - 900;
            let (n, d) = if shift > 0 {
                (x.numer() >> shift as usize, x.denom() >> shift as usize)
            } else {
                (x.numer().clone(), x.denom().clone())
            };
            n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
        }
    }
}

pub fn q_pow(x: &Q, e: u32) -> Q {
    num_traits::pow(x.clone(), e as usize)
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

/// A commutative ring with unit, enough for jet arithmetic.
///
/// `Ctx` carries whatever is needed to build constants (for a polynomial ring:
/// its grading and truncation).
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Ctx: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn from_q(ctx: &Self::Ctx, c: &Q) -> Self;
    fn one(ctx: &Self::Ctx) -> Self {
        Self::from_q(ctx, &<Q as One>::one())
    }
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Q) -> Self;
    /// Multiplicative inverse when it exists in the ring.
    fn inv(&self) -> Option<Self>;
    /// Value at the origin of the parameter space.
    fn constant(&self) -> Q;
}

impl Coeff for Q {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: &()) -> Self {
        <Q as Zero>::zero()
    }
    fn from_q(_: &(), c: &Q) -> Self {
        c.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Q) -> Self {
        self * c
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn constant(&self) -> Q {
        self.clone()
    }
}

/// Shortest round-trip decimal for a float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
