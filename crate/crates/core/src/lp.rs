//! Linear feasibility by a phase-one simplex with Bland's rule.
//!
//! Only feasibility is ever needed here: every predicate in the crate
//! reduces to "does this system of linear inequalities have a solution".

use crate::scalar::{dot, Scalar};

/// Finds `x` with `ub.0 x <= ub.1` and `eq.0 x = eq.1`, `x` free.
pub fn feasible<S: Scalar>(
    n: usize,
    ub: &[(Vec<S>, S)],
    eq: &[(Vec<S>, S)],
) -> Option<Vec<S>> {
    let m = ub.len() + eq.len();
    if m == 0 {
        return Some(vec![S::zero(); n]);
    }
    let n_slack = ub.len();
    // column layout: x+ (n) | x- (n) | slack | artificial (m) | rhs
    let art0 = 2 * n + n_slack;
    let width = art0 + m + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<S>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let rows = ub
        .iter()
        .enumerate()
        .map(|(i, (a, b))| (a, b, Some(i)))
        .chain(eq.iter().map(|(a, b)| (a, b, None)));
    for (r, (a, b, slack)) in rows.enumerate() {
        debug_assert_eq!(a.len(), n);
        let mut row = vec![S::zero(); width];
        let flip = b.is_neg();
        for j in 0..n {
            let v = if flip { a[j].neg() } else { a[j].clone() };
            row[n + j] = v.neg();
            row[j] = v;
        }
        if let Some(s) = slack {
            row[2 * n + s] = if flip { S::one().neg() } else { S::one() };
        }
        row[rhs] = if flip { b.neg() } else { b.clone() };
        match slack {
            Some(s) if !flip => basis.push(2 * n + s),
            _ => {
                row[art0 + r] = S::one();
                basis.push(art0 + r);
            }
        }
        t.push(row);
    }

    loop {
        // reduced cost of column j is minus the sum over artificial rows
        let mut entering = None;
        for j in 0..art0 {
            if basis.contains(&j) {
                continue;
            }
            let mut z = S::zero();
            for (i, &bv) in basis.iter().enumerate() {
                if bv >= art0 && !t[i][j].is_zero() {
                    z = z.plus(&t[i][j]);
                }
            }
            if z.is_pos() {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else { break };
        let mut leave: Option<(usize, S)> = None;
        for i in 0..m {
            if t[i][j].is_pos() {
                let ratio = t[i][rhs].over(&t[i][j]);
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => match ratio.minus(lr).sign() {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => basis[i] < basis[*li],
                        _ => false,
                    },
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else {
            // unbounded descent direction cannot happen in phase one
            break;
        };
        pivot(&mut t, p, j);
        basis[p] = j;
    }

    let infeas = basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= art0)
        .fold(S::zero(), |acc, (i, _)| acc.plus(&t[i][rhs]));
    if !infeas.is_zero() {
        return None;
    }
    let mut y = vec![S::zero(); art0];
    for (i, &b) in basis.iter().enumerate() {
        if b < art0 {
            y[b] = t[i][rhs].clone();
        }
    }
    Some((0..n).map(|j| y[j].minus(&y[n + j])).collect())
}

fn pivot<S: Scalar>(t: &mut [Vec<S>], p: usize, j: usize) {
    let inv = S::one().over(&t[p][j]);
    for x in t[p].iter_mut() {
        if !x.is_zero() {
            *x = x.times(&inv);
        }
    }
    let prow = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == p || row[j].is_zero() {
            continue;
        }
        let f = row[j].clone();
        for (x, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *x = x.minus(&f.times(pv));
            }
        }
    }
}

/// Homogeneous system: some `x` with `a(x) < 0` for `lt`, `a(x) <= 0` for
/// `le` and `a(x) = 0` for `eq`. Strictness is normalized to `<= -1`.
pub fn homogeneous<S: Scalar>(
    n: usize,
    lt: &[Vec<S>],
    le: &[Vec<S>],
    eq: &[Vec<S>],
) -> Option<Vec<S>> {
    let minus_one = S::one().neg();
    let mut ub: Vec<(Vec<S>, S)> = lt.iter().map(|a| (a.clone(), minus_one.clone())).collect();
    ub.extend(le.iter().map(|a| (a.clone(), S::zero())));
    let eqs: Vec<(Vec<S>, S)> = eq.iter().map(|a| (a.clone(), S::zero())).collect();
    let x = feasible(n, &ub, &eqs)?;
    if S::EXACT {
        debug_assert!(lt.iter().all(|a| dot(a, &x).is_neg()));
    }
    Some(x)
}
