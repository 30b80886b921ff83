//! Scalars for the two backends.
//!
//! The exact backend is `Q` (arbitrary precision rationals). The float
//! backend wraps `f64` and decides signs against a per-thread tolerance,
//! set with [`with_eps`].

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub const DEFAULT_EPS: f64 = 1e-9;

thread_local! {
    static EPS: Cell<f64> = const { Cell::new(DEFAULT_EPS) };
}

/// Runs `f` with the float tolerance set to `eps` on this thread.
pub fn with_eps<R>(eps: f64, f: impl FnOnce() -> R) -> R {
    let old = EPS.with(|c| c.replace(eps));
    struct Restore(f64);
    impl Drop for Restore {
        fn drop(&mut self) {
            EPS.with(|c| c.set(self.0));
        }
    }
    let _guard = Restore(old);
    f()
}

pub fn eps() -> f64 {
    EPS.with(|c| c.get())
}

pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_q(q: &Q) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    /// Panics on division by an exact zero.
    fn over(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sign(&self) -> Ordering;
    fn to_f64(&self) -> f64;
    /// Magnitude used for pivot selection.
    fn size(&self) -> f64 {
        self.to_f64().abs()
    }
    /// Total order used for sorting; consistent with `sign` on differences
    /// for the exact backend.
    fn total_cmp(&self, o: &Self) -> Ordering;
    /// Rescales a nonzero vector by a positive factor into normal form.
    fn normalize_ray(v: &[Self]) -> Vec<Self>;
    /// Text form read back exactly by [`parse_rational`].
    fn to_text(&self) -> String;
    const EXACT: bool;

    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn is_pos(&self) -> bool {
        self.sign() == Ordering::Greater
    }
    fn is_neg(&self) -> bool {
        self.sign() == Ordering::Less
    }
}

impl Scalar for Q {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        assert!(!Zero::is_zero(o), "exact division by zero");
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sign(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn total_cmp(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
    fn to_text(&self) -> String {
        format_rational(self)
    }
    fn normalize_ray(v: &[Self]) -> Vec<Self> {
        let mut l = BigInt::one();
        for x in v {
            l = l.lcm(x.denom());
        }
        let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        if g.is_zero() {
            return v.to_vec();
        }
        ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
    }
}

/// A float with tolerance-aware sign.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Approx(pub f64);

impl Scalar for Approx {
    const EXACT: bool = false;
    fn zero() -> Self {
        Approx(0.0)
    }
    fn one() -> Self {
        Approx(1.0)
    }
    fn from_i64(v: i64) -> Self {
        Approx(v as f64)
    }
    fn from_q(q: &Q) -> Self {
        Approx(Scalar::to_f64(q))
    }
    fn plus(&self, o: &Self) -> Self {
        Approx(self.0 + o.0)
    }
    fn minus(&self, o: &Self) -> Self {
        Approx(self.0 - o.0)
    }
    fn times(&self, o: &Self) -> Self {
        Approx(self.0 * o.0)
    }
    fn over(&self, o: &Self) -> Self {
        Approx(self.0 / o.0)
    }
    fn neg(&self) -> Self {
        Approx(-self.0)
    }
    fn sign(&self) -> Ordering {
        let e = eps();
        if self.0 > e {
            Ordering::Greater
        } else if self.0 < -e {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn to_f64(&self) -> f64 {
        self.0
    }
    fn to_text(&self) -> String {
        // Display never uses exponents and round-trips
        format!("{}", self.0)
    }
    fn total_cmp(&self, o: &Self) -> Ordering {
        if (self.0 - o.0).abs() <= eps() {
            Ordering::Equal
        } else {
            self.0.total_cmp(&o.0)
        }
    }
    fn normalize_ray(v: &[Self]) -> Vec<Self> {
        let m = v.iter().fold(0.0f64, |m, x| m.max(x.0.abs()));
        if m == 0.0 {
            return v.to_vec();
        }
        v.iter().map(|x| Approx(x.0 / m)).collect()
    }
}

// ---- vector helpers -------------------------------------------------------

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut s = S::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s = s.plus(&x.times(y));
        }
    }
    s
}

pub fn is_zero_vec<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn scale<S: Scalar>(v: &[S], k: &S) -> Vec<S> {
    v.iter().map(|x| x.times(k)).collect()
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.plus(y)).collect()
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.minus(y)).collect()
}

pub fn neg_vec<S: Scalar>(a: &[S]) -> Vec<S> {
    a.iter().map(|x| x.neg()).collect()
}

/// Lexicographic order built on `total_cmp`.
pub fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

pub fn vec_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.minus(y).is_zero())
}

/// Positive rescaling to normal form. Sign is kept: `v` and `-v` are
/// different points of the sphere.
pub fn canon_ray<S: Scalar>(v: &[S]) -> Vec<S> {
    S::normalize_ray(v)
}

/// Normal form for a line direction: like `canon_ray` but with the first
/// nonzero entry made positive.
pub fn canon_line<S: Scalar>(v: &[S]) -> Vec<S> {
    let r = S::normalize_ray(v);
    match r.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_neg() => neg_vec(&r),
        _ => r,
    }
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_i64(x)).collect()
}

pub fn to_approx(v: &[Q]) -> Vec<Approx> {
    v.iter().map(Approx::from_q).collect()
}

// ---- text form -------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((i, f)) = t.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = i.starts_with('-');
        let ip: BigInt = if i.is_empty() || i == "-" || i == "+" {
            BigInt::zero()
        } else {
            i.parse().map_err(|_| err())?
        };
        let fp: BigInt = f.parse().map_err(|_| err())?;
        let den = num_traits::pow(BigInt::from(10), f.len());
        let mag = ip.abs() * &den + fp;
        let num = if neg { -mag } else { mag };
        return Ok(Q::new(num, den));
    }
    let n: BigInt = t.parse().map_err(|_| err())?;
    Ok(Q::from_integer(n))
}

pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), q(-4, 1));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("0.5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&q(6, -4)), "-3/2");
        assert_eq!(format_rational(&q(8, 4)), "2");
    }

    #[test]
    fn ray_normal_form_keeps_sign() {
        let v = vec![q(-1, 2), q(1, 3), q(0, 1)];
        assert_eq!(canon_ray(&v), qvec(&[-3, 2, 0]));
        assert_eq!(canon_line(&v), qvec(&[3, -2, 0]));
    }

    #[test]
    fn eps_is_scoped() {
        let x = Approx(1e-8);
        assert!(x.is_pos());
        with_eps(1e-6, || assert!(x.is_zero()));
        assert!(x.is_pos());
    }
}
