//! Pauli-basis algebra of 2x2 complex matrices.
//!
//! An element is stored as `s σ0 + v·σ` with complex coefficients, so products of
//! Hermitian inputs keep their imaginary cross terms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliCoeffs {
    pub s: C64,
    pub v: [C64; 3],
}

impl PauliCoeffs {
    pub const ZERO: PauliCoeffs = PauliCoeffs { s: ZERO, v: [ZERO; 3] };
    pub const IDENTITY: PauliCoeffs = PauliCoeffs { s: ONE, v: [ZERO; 3] };

    pub fn new(s: C64, v: [C64; 3]) -> Self {
        Self { s, v }
    }

    pub fn real(s: f64, v: [f64; 3]) -> Self {
        Self { s: C64::new(s, 0.0), v: [C64::new(v[0], 0.0), C64::new(v[1], 0.0), C64::new(v[2], 0.0)] }
    }

    pub fn scalar(s: C64) -> Self {
        Self { s, v: [ZERO; 3] }
    }

    pub fn vector(v: [C64; 3]) -> Self {
        Self { s: ZERO, v }
    }

    /// σ_k for k = 0..=3.
    pub fn sigma(k: usize) -> Self {
        let mut out = Self::ZERO;
        match k {
            0 => out.s = ONE,
            1..=3 => out.v[k - 1] = ONE,
            _ => panic!("Pauli index {k} out of range"),
        }
        out
    }

    pub fn component(&self, k: usize) -> C64 {
        if k == 0 {
            self.s
        } else {
            self.v[k - 1]
        }
    }

    pub fn component_mut(&mut self, k: usize) -> &mut C64 {
        if k == 0 {
            &mut self.s
        } else {
            &mut self.v[k - 1]
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { s: self.s * c, v: [self.v[0] * c, self.v[1] * c, self.v[2] * c] }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        Self { s: self.s * c, v: [self.v[0] * c, self.v[1] * c, self.v[2] * c] }
    }

    /// Largest modulus among the four coefficients.
    pub fn max_abs(&self) -> f64 {
        self.v.iter().fold(self.s.norm(), |m, c| m.max(c.norm()))
    }

    /// Largest imaginary part among the four coefficients.
    pub fn max_imag(&self) -> f64 {
        self.v.iter().fold(self.s.im.abs(), |m, c| m.max(c.im.abs()))
    }

    pub fn re(&self) -> [f64; 4] {
        [self.s.re, self.v[0].re, self.v[1].re, self.v[2].re]
    }

    pub fn to_matrix(&self) -> [[C64; 2]; 2] {
        let [a, b, c] = self.v;
        [[self.s + c, a - I * b], [a + I * b, self.s - c]]
    }

    pub fn from_matrix(m: &[[C64; 2]; 2]) -> Self {
        let s = (m[0][0] + m[1][1]) * 0.5;
        let c = (m[0][0] - m[1][1]) * 0.5;
        let a = (m[1][0] + m[0][1]) * 0.5;
        let b = (m[1][0] - m[0][1]) * (-0.5 * I);
        Self { s, v: [a, b, c] }
    }
}

pub fn dot3(a: &[C64; 3], b: &[C64; 3]) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &[C64; 3], b: &[C64; 3]) -> [C64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Product AB = (a0 b0 + a·b) σ0 + (a0 b + b0 a + i a×b)·σ.
pub fn pauli_mul(a: &PauliCoeffs, b: &PauliCoeffs) -> PauliCoeffs {
    let x = cross3(&a.v, &b.v);
    PauliCoeffs {
        s: a.s * b.s + dot3(&a.v, &b.v),
        v: [
            a.s * b.v[0] + b.s * a.v[0] + I * x[0],
            a.s * b.v[1] + b.s * a.v[1] + I * x[1],
            a.s * b.v[2] + b.s * a.v[2] + I * x[2],
        ],
    }
}

/// tr(AB) = 2(a0 b0 + a·b).
pub fn pauli_trace_inner(a: &PauliCoeffs, b: &PauliCoeffs) -> C64 {
    (a.s * b.s + dot3(&a.v, &b.v)) * 2.0
}

/// AB − BA.
pub fn pauli_commutator(a: &PauliCoeffs, b: &PauliCoeffs) -> PauliCoeffs {
    pauli_mul(a, b) - pauli_mul(b, a)
}

/// exp(β a·σ) = cosh(β|a|) σ0 + sinh(β|a|) (a/|a|)·σ.
pub fn exp_spin(beta: f64, avec: [f64; 3]) -> PauliCoeffs {
    let r = (avec[0] * avec[0] + avec[1] * avec[1] + avec[2] * avec[2]).sqrt();
    let br = beta * r;
    let ratio = if r < 1e-8 { (1.0 + br * br / 6.0) * beta } else { br.sinh() / r };
    PauliCoeffs::real(br.cosh(), [ratio * avec[0], ratio * avec[1], ratio * avec[2]])
}

impl Add for PauliCoeffs {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { s: self.s + o.s, v: [self.v[0] + o.v[0], self.v[1] + o.v[1], self.v[2] + o.v[2]] }
    }
}

impl Sub for PauliCoeffs {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { s: self.s - o.s, v: [self.v[0] - o.v[0], self.v[1] - o.v[1], self.v[2] - o.v[2]] }
    }
}

impl Neg for PauliCoeffs {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl AddAssign for PauliCoeffs {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for PauliCoeffs {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Mul for PauliCoeffs {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        pauli_mul(&self, &o)
    }
}

impl Mul<C64> for PauliCoeffs {
    type Output = Self;
    fn mul(self, c: C64) -> Self {
        self.scale(c)
    }
}

impl Mul<f64> for PauliCoeffs {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        self.scale_re(c)
    }
}
