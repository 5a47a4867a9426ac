//! Complementary Bell numbers, negative-order polylogarithms and the
//! thresholds `r⁽ⁿ⁾`, `r₀(k)`, `r₁(m)`.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};

/// Largest index accepted by [`complementary_bell`].
pub const BELL_CAP: usize = 64;

/// Stirling numbers of the second kind `S(n, k)` for `0 ≤ k ≤ n ≤ max`.
pub fn stirling2_table(max: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); max + 1]; max + 1];
    s[0][0] = BigInt::one();
    for n in 1..=max {
        for k in 1..=n {
            s[n][k] = BigInt::from(k) * &s[n - 1][k] + &s[n - 1][k - 1];
        }
    }
    s
}

/// `B̃ₙ = Σ_k (−1)^k S(n, k)`.
pub fn complementary_bell(n: usize) -> Result<BigInt> {
    if n > BELL_CAP {
        return Err(Error::InvalidSize(format!("complementary Bell index {n} exceeds {BELL_CAP}")));
    }
    let s = stirling2_table(n);
    Ok((0..=n).map(|k| if k % 2 == 0 { s[n][k].clone() } else { -s[n][k].clone() }).sum())
}

/// Coefficients (constant first) of the Eulerian polynomial `A_m` with
/// `Li_{−m}(z) = z·A_m(z) / (1 − z)^{m+1}`.
pub fn eulerian(m: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for n in 2..=m {
        let mut next = vec![BigInt::zero(); n];
        for (k, slot) in next.iter_mut().enumerate() {
            let mut v = BigInt::zero();
            if k < row.len() {
                v += BigInt::from(k + 1) * &row[k];
            }
            if k >= 1 && k - 1 < row.len() {
                v += BigInt::from(n - k) * &row[k - 1];
            }
            *slot = v;
        }
        row = next;
    }
    row
}

fn eval_int_poly(c: &[BigInt], z: &Q) -> Q {
    c.iter().rev().fold(Q::zero(), |acc, a| acc * z + Q::from_integer(a.clone()))
}

/// `Li_{1−n}(z)` for integer `n ≥ 1`, exactly.
pub fn polylog_neg_order(n: usize, z: &Q) -> Result<Q> {
    if n == 0 {
        return Err(Error::InvalidSize("polylog order index must be at least 1".into()));
    }
    let one = Q::one();
    if *z == one {
        return Err(Error::Pole("Li_{1-n} has a pole at z = 1".into()));
    }
    let a = eval_int_poly(&eulerian(n - 1), z);
    Ok(z * a / Pow::pow(&one - z, n))
}

type Poly = Vec<Q>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn eval(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, a| acc * x + a)
}

fn derivative(p: &[Q]) -> Poly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * Q::from_integer(BigInt::from(i))).collect())
}

fn remainder(a: &[Q], b: &[Q]) -> Poly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap() / &b[db];
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &f * c;
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(Q::zero());
    }
    trim(r)
}

/// Sturm chain of a squarefree polynomial.
struct Sturm(Vec<Poly>);

impl Sturm {
    fn new(p: Poly) -> Self {
        let mut chain = vec![p.clone(), derivative(&p)];
        loop {
            let k = chain.len();
            if chain[k - 1].len() == 1 {
                break;
            }
            let r = remainder(&chain[k - 2], &chain[k - 1]);
            if r.len() == 1 && r[0].is_zero() {
                break;
            }
            chain.push(r.into_iter().map(|c| -c).collect());
        }
        Sturm(chain)
    }

    fn variations(&self, x: &Q) -> usize {
        let signs: Vec<bool> = self
            .0
            .iter()
            .map(|p| eval(p, x))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: &Q, b: &Q) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// Exact bracket `(lo, hi]` of width below `tol` around the largest
/// negative root of `A_{n−1}`; a point bracket when the root is rational and hit.
pub fn r_star_bracket(n: usize, tol: f64) -> Result<(Q, Q)> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("r_star needs n >= 3, got {n}")));
    }
    let p: Poly = eulerian(n - 1).into_iter().map(Q::from_integer).collect();
    let minus_one = -Q::one();
    let sturm = Sturm::new(p.clone());
    // Roots pair up as z ↔ 1/z, so the largest negative one is −1 or lies in (−1, 0).
    if sturm.count(&minus_one, &Q::zero()) == 0 {
        debug_assert!(eval(&p, &minus_one).is_zero());
        return Ok((minus_one.clone(), minus_one));
    }
    let mut lo = minus_one;
    let mut hi = Q::zero();
    let tol = Q::from_float(tol).unwrap();
    let two = Q::from_integer(BigInt::from(2));
    // Sturm-guided until the bracket isolates one root, then plain sign bisection.
    while sturm.count(&lo, &hi) > 1 {
        let mid = (&lo + &hi) / &two;
        if sturm.count(&mid, &Q::zero()) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sign_lo = eval(&p, &lo).is_positive();
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / &two;
        let v = eval(&p, &mid);
        if v.is_zero() {
            return Ok((mid.clone(), mid));
        }
        if v.is_positive() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Largest strictly negative root `r⁽ⁿ⁾` of `Li_{1−n}`, to within 1e−12.
pub fn r_star(n: usize) -> Result<f64> {
    let (lo, hi) = r_star_bracket(n, 1e-13)?;
    Ok(to_f64(&((lo + hi) / Q::from_integer(BigInt::from(2)))))
}

/// `r₁(m) = 1 / (1 − r⁽ᵐ⁾)`.
pub fn r1(m: usize) -> Result<f64> {
    Ok(1.0 / (1.0 - r_star(m)?))
}

/// `max_{2 ≤ j ≤ k, (−1)^j B̃_j > 0} x/(1+x)` with `x = ((−1)^j B̃_j)^{1/(j−1)}`,
/// or `None` when no `j` qualifies.
pub fn r0(k: usize) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for j in 2..=k {
        if let Some(t) = r_tilde(j)? {
            best = Some(best.map_or(t, |b| b.max(t)));
        }
    }
    Ok(best)
}

/// The root of `f_k` in `(0, 1)` when `(−1)^k B̃_k > 0`.
pub fn r_tilde(k: usize) -> Result<Option<f64>> {
    let b = complementary_bell(k)?;
    let c = if k.is_multiple_of(2) { b } else { -b };
    if !c.is_positive() || k < 2 {
        return Ok(None);
    }
    let x = c.to_f64().unwrap().powf(1.0 / (k as f64 - 1.0));
    Ok(Some(x / (1.0 + x)))
}

fn check_open_unit(r: &Q) -> Result<()> {
    if !r.is_positive() || *r >= Q::one() {
        return Err(Error::ParamOutOfRange(format!("r = {r} must lie in (0, 1)")));
    }
    Ok(())
}

/// `f_k(r) = (1−r) r^{k−1} − (−1)^k B̃_k (1−r)^k`.
pub fn f_k(k: usize, r: &Q) -> Result<Q> {
    check_open_unit(r)?;
    if k == 0 {
        return Err(Error::InvalidSize("f_k needs k >= 1".into()));
    }
    let b = Q::from_integer(complementary_bell(k)?);
    let c = if k.is_multiple_of(2) { b } else { -b };
    let s = Q::one() - r;
    Ok(&s * Pow::pow(r, k - 1) - c * Pow::pow(&s, k))
}

/// `f(j, r) = Li_{1−j}(−(1−r)/r) / (r^{j−1} (1−r))`.
pub fn f_poly(j: usize, r: &Q) -> Result<Q> {
    check_open_unit(r)?;
    let s = Q::one() - r;
    let z = -(&s / r);
    Ok(polylog_neg_order(j, &z)? / (Pow::pow(r, j - 1) * s))
}

/// Largest `r` in `(0, 1)` where `f(m, ·)` changes sign, located by scanning
/// down from 1 on a grid of step `1/steps` and bisecting exactly.
pub fn f_poly_last_sign_change(m: usize, steps: u32, tol: f64) -> Result<Option<f64>> {
    let step = Q::new(BigInt::one(), BigInt::from(steps));
    let sign = |r: &Q| f_poly(m, r).map(|v| v.signum());
    let mut hi = Q::one() - &step;
    let s_hi = sign(&hi)?;
    let mut lo = &hi - &step;
    while lo.is_positive() {
        let s_lo = sign(&lo)?;
        if s_lo.is_zero() {
            return Ok(Some(to_f64(&lo)));
        }
        if s_lo != s_hi {
            let tol = Q::from_float(tol).unwrap();
            let two = Q::from_integer(BigInt::from(2));
            while &hi - &lo > tol {
                let mid = (&lo + &hi) / &two;
                let s = sign(&mid)?;
                if s.is_zero() {
                    return Ok(Some(to_f64(&mid)));
                }
                if s == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(to_f64(&((lo + hi) / two))));
        }
        hi = lo.clone();
        lo = &lo - &step;
    }
    Ok(None)
}

/// One row of the threshold table.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdRow {
    pub n: usize,
    pub bell_c: BigInt,
    pub r_star: f64,
    pub r0: Option<f64>,
    pub r1: f64,
}

pub fn threshold_row(n: usize) -> Result<ThresholdRow> {
    let r_star = r_star(n)?;
    Ok(ThresholdRow {
        n,
        bell_c: complementary_bell(n)?,
        r_star,
        r0: r0(n)?,
        r1: 1.0 / (1.0 - r_star),
    })
}

pub fn threshold_table(ns: impl IntoIterator<Item = usize>) -> Result<Vec<ThresholdRow>> {
    ns.into_iter().map(threshold_row).collect()
}
