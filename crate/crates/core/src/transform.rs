//! Projective automorphisms of the sphere: invertible matrices modulo
//! positive scalars.

use std::cmp::Ordering;

use crate::cone::Cone;
use crate::linalg::{identity, inverse, mat_mul, mat_vec, vec_mat, Matrix};
use crate::scalar::{canon_ray, lex_cmp, vec_eq, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("matrix is not square: {0} rows, a row of length {1}")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
}

/// Stored in normal form: for the exact backend integer entries with
/// content 1. Only positive rescaling is quotiented out, so `-I` is not
/// the identity (it is the antipodal map of the sphere).
#[derive(Debug, Clone)]
pub struct Transform<S: Scalar> {
    m: Matrix<S>,
    inv: Matrix<S>,
}

fn normal_form<S: Scalar>(m: &[Vec<S>]) -> Matrix<S> {
    let n = m.len();
    let flat: Vec<S> = m.iter().flatten().cloned().collect();
    let f = canon_ray(&flat);
    f.chunks(n).map(|c| c.to_vec()).collect()
}

impl<S: Scalar> Transform<S> {
    pub fn new(m: Matrix<S>) -> Result<Self, TransformError> {
        let n = m.len();
        if let Some(r) = m.iter().find(|r| r.len() != n) {
            return Err(TransformError::NotSquare(n, r.len()));
        }
        if n == 0 {
            return Err(TransformError::Singular);
        }
        let inv = inverse(&m).ok_or(TransformError::Singular)?;
        Ok(Transform { m: normal_form(&m), inv: normal_form(&inv) })
    }

    pub fn identity(n: usize) -> Self {
        Transform { m: identity(n), inv: identity(n) }
    }

    pub fn size(&self) -> usize {
        self.m.len()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.m
    }

    pub fn inverse(&self) -> Self {
        Transform { m: self.inv.clone(), inv: self.m.clone() }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Transform {
            m: normal_form(&mat_mul(&self.m, &other.m)),
            inv: normal_form(&mat_mul(&other.inv, &self.inv)),
        }
    }

    /// `x -> M x`, in ray normal form.
    pub fn apply(&self, x: &[S]) -> Vec<S> {
        canon_ray(&mat_vec(&self.m, x))
    }

    /// Pushforward of a covector: `u -> u M^{-1}`.
    pub fn apply_covector(&self, u: &[S]) -> Vec<S> {
        canon_ray(&vec_mat(u, &self.inv))
    }

    pub fn apply_cone(&self, c: &Cone<S>) -> Cone<S> {
        c.transform(&self.m, &self.inv)
    }

    pub fn is_identity(&self) -> bool {
        self.equals(&Transform::identity(self.size()))
    }

    pub fn equals(&self, o: &Self) -> bool {
        self.m.len() == o.m.len() && self.m.iter().zip(&o.m).all(|(a, b)| vec_eq(a, b))
    }

    /// Total order on normal forms, used to key developed cells.
    pub fn key_cmp(&self, o: &Self) -> Ordering {
        for (a, b) in self.m.iter().zip(&o.m) {
            match lex_cmp(a, b) {
                Ordering::Equal => {}
                c => return c,
            }
        }
        self.m.len().cmp(&o.m.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qvec};

    #[test]
    fn normal_form_is_up_to_positive_scale() {
        let a = Transform::new(vec![vec![q(1, 2), q(0, 1)], vec![q(0, 1), q(1, 2)]]).unwrap();
        assert!(a.is_identity());
        let neg = Transform::new(vec![qvec(&[-3, 0]), qvec(&[0, -3])]).unwrap();
        assert!(!neg.is_identity());
        assert!(neg.compose(&neg).is_identity());
        assert_eq!(
            Transform::new(vec![qvec(&[1, 2]), qvec(&[2, 4])]).unwrap_err(),
            TransformError::Singular
        );
    }

    #[test]
    fn rotation_has_order_four() {
        let r = Transform::new(vec![qvec(&[0, -1, 0]), qvec(&[1, 0, 0]), qvec(&[0, 0, 1])]).unwrap();
        let r2 = r.compose(&r);
        assert!(!r2.is_identity());
        assert!(r2.compose(&r2).is_identity());
        assert!(r.compose(&r.inverse()).is_identity());
        assert_eq!(r.apply(&qvec(&[1, 0, 1])), qvec(&[0, 1, 1]));
        // covectors transform so that pairings are preserved
        let u = qvec(&[1, 2, 3]);
        let x = qvec(&[4, 5, 6]);
        let lhs = crate::scalar::dot(&r.apply_covector(&u), &r.apply(&x));
        assert_eq!(lhs, crate::scalar::dot(&u, &x));
    }
}
