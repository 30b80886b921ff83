//! Dense linear algebra over a [`Scalar`], plus linear subspaces.

use crate::scalar::{canon_line, dot, is_zero_vec, Scalar};

pub type Matrix<S> = Vec<Vec<S>>;

/// Reduced row echelon form. Returns the nonzero rows and pivot columns.
pub fn rref<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> (Matrix<S>, Vec<usize>) {
    let mut m: Matrix<S> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        // largest pivot keeps the float backend honest; exact does not care
        let mut best = None;
        let mut best_size = 0.0;
        for (i, row) in m.iter().enumerate().skip(r) {
            if !row[c].is_zero() {
                let s = row[c].size();
                if best.is_none() || (!S::EXACT && s > best_size) {
                    best = Some(i);
                    best_size = s;
                    if S::EXACT {
                        break;
                    }
                }
            }
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = S::one().over(&m[r][c]);
        for x in m[r].iter_mut() {
            *x = x.times(&inv);
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    if !m[r][j].is_zero() {
                        let d = f.times(&m[r][j]);
                        m[i][j] = m[i][j].minus(&d);
                    }
                }
                m[i][c] = S::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    match rows.first() {
        None => 0,
        Some(r0) => rref(rows, r0.len()).1.len(),
    }
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Matrix<S> {
    let (m, pivots) = rref(rows, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![S::zero(); ncols];
        v[free] = S::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = m[i][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Solves `A x = b` for square invertible `A`.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = a.len();
    let aug: Matrix<S> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug, n + 1);
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(m.iter().map(|r| r[n].clone()).collect())
}

pub fn identity<S: Scalar>(n: usize) -> Matrix<S> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect()
}

pub fn transpose<S: Scalar>(a: &[Vec<S>]) -> Matrix<S> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_vec<S: Scalar>(a: &[Vec<S>], x: &[S]) -> Vec<S> {
    a.iter().map(|r| dot(r, x)).collect()
}

/// Row vector times matrix, `u A`.
pub fn vec_mat<S: Scalar>(u: &[S], a: &[Vec<S>]) -> Vec<S> {
    let n = a.first().map_or(0, |r| r.len());
    (0..n)
        .map(|j| {
            let mut s = S::zero();
            for (i, ui) in u.iter().enumerate() {
                if !ui.is_zero() {
                    s = s.plus(&ui.times(&a[i][j]));
                }
            }
            s
        })
        .collect()
}

pub fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Matrix<S> {
    a.iter().map(|r| vec_mat(r, b)).collect()
}

pub fn inverse<S: Scalar>(a: &[Vec<S>]) -> Option<Matrix<S>> {
    let n = a.len();
    let aug: Matrix<S> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    let (m, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(m.iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det<S: Scalar>(a: &[Vec<S>]) -> S {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = S::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return S::zero();
        };
        if p != c {
            m.swap(p, c);
            d = d.neg();
        }
        d = d.times(&m[c][c]);
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = m[i][c].over(&m[c][c]);
                for j in c..n {
                    let t = f.times(&m[c][j]);
                    m[i][j] = m[i][j].minus(&t);
                }
            }
        }
    }
    d
}

/// A linear subspace of `S^ambient`, stored by an echelon basis.
#[derive(Clone, Debug)]
pub struct Subspace<S: Scalar> {
    pub ambient: usize,
    pub basis: Matrix<S>,
}

impl<S: Scalar> Subspace<S> {
    pub fn span(ambient: usize, vectors: &[Vec<S>]) -> Self {
        let (m, _) = rref(vectors, ambient);
        let basis = m.iter().map(|r| canon_line(r)).collect();
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: identity(ambient) }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn orthogonal_complement(&self) -> Self {
        let ns = nullspace(&self.basis, self.ambient);
        Subspace::span(self.ambient, &ns)
    }

    pub fn contains(&self, x: &[S]) -> bool {
        if is_zero_vec(x) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(x.to_vec());
        rank(&rows) == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace<S>) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn equals(&self, other: &Subspace<S>) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other)
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, x: &[S]) -> Vec<S> {
        let k = self.dim();
        if k == 0 {
            return vec![S::zero(); self.ambient];
        }
        let gram: Matrix<S> = (0..k)
            .map(|i| (0..k).map(|j| dot(&self.basis[i], &self.basis[j])).collect())
            .collect();
        let rhs: Vec<S> = self.basis.iter().map(|b| dot(b, x)).collect();
        let c = solve(&gram, &rhs).expect("basis is independent");
        let mut out = vec![S::zero(); self.ambient];
        for (ci, b) in c.iter().zip(&self.basis) {
            for (o, bj) in out.iter_mut().zip(b) {
                *o = o.plus(&ci.times(bj));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qvec, Q};

    #[test]
    fn complement_of_axis() {
        let x = Subspace::span(3, &[qvec(&[1, 0, 0])]);
        let c = x.orthogonal_complement();
        assert!(c.equals(&Subspace::span(3, &[qvec(&[0, 1, 0]), qvec(&[0, 0, 1])])));
        assert_eq!(c.project(&qvec(&[1, 2, 3])), qvec(&[0, 2, 3]));
    }

    #[test]
    fn inverse_and_det() {
        let a: Matrix<Q> = vec![qvec(&[2, 1]), qvec(&[1, 1])];
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity::<Q>(2));
        assert_eq!(det(&a), Q::from_i64(1));
        assert!(inverse(&[qvec(&[1, 2]), qvec(&[2, 4])]).is_none());
    }

    #[test]
    fn nullspace_dimension() {
        let a = vec![qvec(&[1, 1, 0]), qvec(&[2, 2, 0])];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(mat_vec(&a, &v).iter().all(|x| x.is_zero()));
        }
    }
}
