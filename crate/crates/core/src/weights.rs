//! Weight sequences, multi-indices, dilations and the pseudo-norm.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{q_pow, q_to_f64, Coeff, Q};

pub type MultiIndex = Vec<u32>;

/// Normalized weights of a Carnot filtration: non-decreasing, starting at 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSequence {
    w: Vec<u32>,
}

impl WeightSequence {
    pub fn new(w: Vec<u32>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Weights("empty".into()));
        }
        if w[0] != 1 {
            return Err(Error::Weights(format!("w_1 = {} but must be 1", w[0])));
        }
        for k in 1..w.len() {
            if w[k] < w[k - 1] {
                return Err(Error::Weights(format!(
                    "not non-decreasing at position {}: {} < {}",
                    k + 1,
                    w[k],
                    w[k - 1]
                )));
            }
        }
        Ok(Self { w })
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    /// The step.
    pub fn r(&self) -> u32 {
        *self.w.last().unwrap()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.w
    }

    pub fn get(&self, i: usize) -> u32 {
        self.w[i]
    }

    pub fn grading(&self) -> Grading {
        Grading::new(self.w.clone())
    }
}

/// Weights attached to the variables of a polynomial ring. Joint spaces such
/// as (x, y) or (y, t) get their own gradings; a weight may be zero for an
/// auxiliary variable whose powers are bounded by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grading(Arc<[u32]>);

impl Grading {
    pub fn new(w: Vec<u32>) -> Self {
        Grading(w.into())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn w(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn weights(&self) -> &[u32] {
        &self.0
    }

    pub fn concat(&self, other: &Grading) -> Grading {
        let mut w = self.0.to_vec();
        w.extend_from_slice(&other.0);
        Grading::new(w)
    }

    pub fn degree(&self, a: &[u32]) -> u32 {
        a.iter().zip(self.0.iter()).map(|(e, w)| e * w).sum()
    }

    pub fn max_weight(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(1)
    }
}

pub fn weighted_degree(a: &[u32], w: &WeightSequence) -> Result<u32> {
    if a.len() != w.n() {
        return Err(Error::Shape(format!(
            "multi-index of length {} against {} weights",
            a.len(),
            w.n()
        )));
    }
    Ok(a.iter().zip(w.as_slice()).map(|(e, w)| e * w).sum())
}

/// `(t^{w_1} x_1, ..., t^{w_n} x_n)`.
pub fn dilate<C: Coeff>(t: &C, x: &[C], w: &[u32]) -> Vec<C> {
    x.iter()
        .zip(w)
        .map(|(xi, &wi)| {
            let mut p = xi.clone();
            for _ in 0..wi {
                p = p.mul(t);
            }
            p
        })
        .collect()
}

pub fn dilate_q(t: &Q, x: &[Q], w: &[u32]) -> Vec<Q> {
    x.iter().zip(w).map(|(xi, &wi)| xi * q_pow(t, wi)).collect()
}

/// Inverse dilation; `t` must be nonzero.
pub fn dilate_inv_q(t: &Q, x: &[Q], w: &[u32]) -> Vec<Q> {
    assert!(!Zero::is_zero(t), "inverse dilation by zero");
    dilate_q(&t.recip(), x, w)
}

/// `sum |x_i|^{1/w_i}`.
pub fn pseudo_norm(x: &[Q], w: &[u32]) -> f64 {
    let xf: Vec<f64> = x.iter().map(q_to_f64).collect();
    pseudo_norm_f64(&xf, w)
}

pub fn pseudo_norm_f64(x: &[f64], w: &[u32]) -> f64 {
    x.iter()
        .zip(w)
        .map(|(xi, &wi)| match wi {
            1 => xi.abs(),
            2 => xi.abs().sqrt(),
            3 => xi.abs().cbrt(),
            _ => xi.abs().powf(1.0 / wi as f64),
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn weight_validation() {
        assert!(WeightSequence::new(vec![1, 1, 2]).is_ok());
        assert!(WeightSequence::new(vec![2, 1]).is_err());
        assert!(WeightSequence::new(vec![0, 1]).is_err());
        assert!(WeightSequence::new(vec![]).is_err());
        assert_eq!(WeightSequence::new(vec![1, 1, 2, 3]).unwrap().r(), 3);
    }

    #[test]
    fn degrees() {
        let w = WeightSequence::new(vec![1, 1, 2]).unwrap();
        assert_eq!(weighted_degree(&[0, 0, 0], &w).unwrap(), 0);
        assert_eq!(weighted_degree(&[1, 1, 0], &w).unwrap(), 2);
        let e = WeightSequence::new(vec![1, 1, 2, 3]).unwrap();
        assert_eq!(weighted_degree(&[0, 0, 1, 1], &e).unwrap(), 5);
        assert!(weighted_degree(&[1, 1], &w).is_err());
    }

    #[test]
    fn dilation_examples() {
        let w = [1, 1, 2];
        let x = vec![q(1), q(1), q(1)];
        assert_eq!(dilate_q(&q(2), &x, &w), vec![q(2), q(2), q(4)]);
        assert_eq!(dilate_q(&q(1), &x, &w), x);
        assert_eq!(dilate_q(&q(0), &x, &w), vec![q(0), q(0), q(0)]);
    }

    #[test]
    fn norm_examples() {
        let w = [1, 1, 2];
        assert_eq!(pseudo_norm(&[q(0), q(0), q(0)], &w), 0.0);
        assert_eq!(pseudo_norm(&[q(0), q(0), q(4)], &w), 2.0);
        assert_eq!(pseudo_norm(&[q(3), q(0), q(0)], &w), 3.0);
    }
}
