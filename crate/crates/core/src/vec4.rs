//! Euclidean four-vectors.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Vec4([x0, x1, x2, x3])
    }

    /// Unit vector along axis `mu`.
    pub fn axis(mu: usize) -> Self {
        let mut v = [0.0; 4];
        v[mu] = 1.0;
        Vec4(v)
    }

    pub fn dot(&self, other: &Vec4) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn scale(&self, s: f64) -> Vec4 {
        Vec4(self.0.map(|x| x * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, rhs: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for Vec4 {
    fn add_assign(&mut self, rhs: Vec4) {
        for i in 0..4 {
            self.0[i] += rhs.0[i];
        }
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, rhs: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        Vec4(self.0.map(|x| -x))
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, s: f64) -> Vec4 {
        self.scale(s)
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::iter::Sum for Vec4 {
    fn sum<I: Iterator<Item = Vec4>>(iter: I) -> Vec4 {
        iter.fold(Vec4::ZERO, |acc, v| acc + v)
    }
}

/// The noncommutativity matrix `Θ = θ (J ⊕ J)` with `J = [[0, 1], [−1, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaMatrix {
    theta: f64,
}

impl ThetaMatrix {
    pub fn new(theta: f64) -> Self {
        ThetaMatrix { theta }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn apply(&self, p: &Vec4) -> Vec4 {
        let t = self.theta;
        Vec4([t * p[1], -t * p[0], t * p[3], -t * p[2]])
    }

    /// `q ∧ p = qᵀ Θ p`.
    pub fn wedge(&self, q: &Vec4, p: &Vec4) -> f64 {
        q.dot(&self.apply(p))
    }

    pub fn entry(&self, mu: usize, nu: usize) -> f64 {
        self.apply(&Vec4::axis(nu))[mu]
    }
}
