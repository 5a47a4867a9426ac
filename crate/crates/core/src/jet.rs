//! Truncated multivariate polynomials over the rationals.
//!
//! A jet in directions `ε_1..ε_q` keeps every monomial `ε^a` with
//! `a_i ≤ m_i`, i.e. it lives in `Q[ε] / (ε_1^{m_1+1}, …, ε_q^{m_q+1})`.
//! Partial derivatives are read off as `coefficient · ∏ a_i!`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chain::Scalar;
use crate::error::{Error, Result};
use crate::rational::Q;

/// Dense layout of the monomial box with a precomputed multiplication table.
#[derive(Debug)]
pub struct JetShape {
    degs: Vec<u32>,
    strides: Vec<usize>,
    size: usize,
    /// `(i, j, k)` with `mono(i) + mono(j) = mono(k)` inside the box.
    triples: Vec<(u32, u32, u32)>,
    total: u32,
}

impl JetShape {
    pub fn new(degs: Vec<u32>) -> Arc<Self> {
        let mut strides = Vec::with_capacity(degs.len());
        let mut size = 1usize;
        for &d in &degs {
            strides.push(size);
            size *= d as usize + 1;
        }
        let total = degs.iter().sum();
        let mut shape = JetShape { degs, strides, size, triples: Vec::new(), total };
        let monos: Vec<Vec<u32>> = (0..size).map(|i| shape.exponents(i)).collect();
        for i in 0..size {
            for j in 0..size {
                let fits = monos[i].iter().zip(&monos[j]).zip(&shape.degs).all(|((a, b), d)| a + b <= *d);
                if fits {
                    shape.triples.push((i as u32, j as u32, (i + j) as u32));
                }
            }
        }
        Arc::new(shape)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Sum of the per-direction degree caps; every constant-free jet is
    /// nilpotent of this order.
    pub fn total_degree(&self) -> u32 {
        self.total
    }

    pub fn exponents(&self, idx: usize) -> Vec<u32> {
        self.degs
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| ((idx / s) % (d as usize + 1)) as u32)
            .collect()
    }

    pub fn index(&self, exps: &[u32]) -> usize {
        exps.iter().zip(&self.strides).map(|(&e, &s)| e as usize * s).sum()
    }
}

/// A jet over `Q`.
#[derive(Clone, Debug)]
pub struct DualValue {
    shape: Arc<JetShape>,
    c: Vec<Q>,
}

impl PartialEq for DualValue {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl DualValue {
    pub fn constant(shape: &Arc<JetShape>, v: Q) -> Self {
        let mut c = vec![Q::zero(); shape.size];
        c[0] = v;
        DualValue { shape: shape.clone(), c }
    }

    /// `v + ε_dir`.
    pub fn variable(shape: &Arc<JetShape>, v: Q, dir: usize) -> Self {
        let mut out = Self::constant(shape, v);
        if shape.degs[dir] > 0 {
            out.c[shape.strides[dir]] = Q::one();
        }
        out
    }

    pub fn from_coefficients(shape: &Arc<JetShape>, c: Vec<Q>) -> Self {
        assert_eq!(c.len(), shape.size);
        DualValue { shape: shape.clone(), c }
    }

    pub fn shape(&self) -> &Arc<JetShape> {
        &self.shape
    }

    pub fn constant_term(&self) -> &Q {
        &self.c[0]
    }

    pub fn coefficient(&self, exps: &[u32]) -> &Q {
        &self.c[self.shape.index(exps)]
    }

    /// `∂^a f` at the base point: coefficient times `∏ a_i!`.
    pub fn derivative(&self, exps: &[u32]) -> Q {
        let fact: BigInt = exps.iter().flat_map(|&a| 1..=a).map(BigInt::from).product();
        self.coefficient(exps) * Q::from_integer(fact)
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect();
        DualValue { shape: self.shape.clone(), c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect();
        DualValue { shape: self.shape.clone(), c }
    }

    pub fn scale(&self, k: &Q) -> Self {
        DualValue { shape: self.shape.clone(), c: self.c.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![Q::zero(); self.shape.size];
        for &(i, j, k) in &self.shape.triples {
            let (a, b) = (&self.c[i as usize], &o.c[j as usize]);
            if !a.is_zero() && !b.is_zero() {
                c[k as usize] += a * b;
            }
        }
        DualValue { shape: self.shape.clone(), c }
    }

    /// `log(f / f(0))`, defined when the constant term is nonzero.
    pub fn log_ratio(&self) -> Result<Self> {
        let f0 = self.c[0].clone();
        if f0.is_zero() {
            return Err(Error::Pole("log of a jet with zero constant term".into()));
        }
        let mut u = self.scale(&(Q::one() / &f0));
        u.c[0] = Q::zero();
        let mut out = DualValue::constant(&self.shape, Q::zero());
        let mut power = u.clone();
        for k in 1..=self.shape.total.max(1) {
            let coef = Q::new(BigInt::from(if k % 2 == 1 { 1 } else { -1 }), BigInt::from(k));
            out = out.add(&power.scale(&coef));
            if k < self.shape.total {
                power = power.mul(&u);
                if power.c.iter().all(Zero::is_zero) {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Inverse, defined when the constant term is nonzero.
    pub fn recip(&self) -> Result<Self> {
        let f0 = self.c[0].clone();
        if f0.is_zero() {
            return Err(Error::Pole("inverse of a jet with zero constant term".into()));
        }
        let inv0 = Q::one() / &f0;
        let mut u = self.scale(&inv0);
        u.c[0] = Q::zero();
        // 1 / (1 + u) = Σ (−u)^k.
        let mut out = DualValue::constant(&self.shape, Q::one());
        let mut power = DualValue::constant(&self.shape, Q::one());
        for _ in 0..self.shape.total {
            power = power.mul(&u).scale(&-Q::one());
            out = out.add(&power);
        }
        Ok(out.scale(&inv0))
    }
}

impl Scalar for DualValue {
    fn zero_like(&self) -> Self {
        DualValue::constant(&self.shape, Q::zero())
    }
    fn one_like(&self) -> Self {
        DualValue::constant(&self.shape, Q::one())
    }
    fn add(&self, o: &Self) -> Self {
        DualValue::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        DualValue::mul(self, o)
    }
}
