//! Finite-dimensional quantum states over labelled bases, Born-rule
//! measurement, and single-qubit special unitaries.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplex::Dist;

pub type C64 = Complex64;
pub type Matrix4 = [[C64; 4]; 4];

pub const ALGEBRAIC_TOLERANCE: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A complex linear combination of basis labels, compared up to a global
/// nonzero scalar. Phases are kept as given.
#[derive(Debug, Clone, PartialEq)]
pub struct Superposition<X> {
    basis: Vec<X>,
    amplitudes: Vec<C64>,
}

impl<X> Superposition<X> {
    pub fn new(basis: Vec<X>, amplitudes: Vec<C64>) -> Result<Self> {
        if basis.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: amplitudes.len(),
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(C64::norm_sqr).sum();
        if norm_sqr == 0.0 || !norm_sqr.is_finite() {
            return Err(Error::DegenerateState);
        }
        Ok(Superposition { basis, amplitudes })
    }

    pub fn basis(&self) -> &[X] {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: C64) -> Result<Self>
    where
        X: Clone,
    {
        Superposition::new(
            self.basis.clone(),
            self.amplitudes.iter().map(|a| a * factor).collect(),
        )
    }

    /// Rescales to unit length. The phase is left untouched.
    pub fn normalize(&self) -> Self
    where
        X: Clone,
    {
        let n = self.norm();
        Superposition {
            basis: self.basis.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
        }
    }

    /// Equality of rays: `|<a|b>| = |a| |b|` within `tolerance` (relative).
    pub fn projectively_eq(&self, other: &Self, tolerance: f64) -> bool
    where
        X: PartialEq,
    {
        self.basis == other.basis
            && (self.inner(other).norm() / (self.norm() * other.norm()) - 1.0).abs() <= tolerance
    }

    /// Born rule: `P(x_k) = |a_k|^2 / sum_j |a_j|^2`.
    pub fn measure(&self) -> Dist<X, f64>
    where
        X: Clone + PartialEq,
    {
        let total: f64 = self.amplitudes.iter().map(C64::norm_sqr).sum();
        let weights = self.amplitudes.iter().map(|a| a.norm_sqr() / total).collect();
        Dist::new(self.basis.clone(), weights).expect("Born weights form a distribution")
    }
}

/// Joint state; amplitude of `(x, y)` is `a(x) b(y)`, basis row-major.
pub fn tensor<X: Clone, Y: Clone>(a: &Superposition<X>, b: &Superposition<Y>) -> Superposition<(X, Y)> {
    let mut basis = Vec::with_capacity(a.dim() * b.dim());
    let mut amplitudes = Vec::with_capacity(a.dim() * b.dim());
    for (x, ax) in a.basis.iter().zip(&a.amplitudes) {
        for (y, by) in b.basis.iter().zip(&b.amplitudes) {
            basis.push((x.clone(), y.clone()));
            amplitudes.push(ax * by);
        }
    }
    Superposition { basis, amplitudes }
}

/// A 2x2 unitary with unit-modulus determinant: a single-qubit operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: [[C64; 2]; 2],
}

impl Unitary2 {
    pub fn new(m: [[C64; 2]; 2]) -> Result<Self> {
        let u = Unitary2 { m };
        let residual = u.unitarity_residual();
        let det_error = (u.det().norm() - 1.0).abs();
        if residual > ALGEBRAIC_TOLERANCE || det_error > ALGEBRAIC_TOLERANCE {
            return Err(Error::NotUnitary {
                residual: residual.max(det_error),
            });
        }
        Ok(u)
    }

    pub const fn identity() -> Self {
        Unitary2 {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// `su2(pi, 0, 0)`: the classical bit flip, up to phase.
    pub fn flip() -> Self {
        su2_from_angles(PI, 0.0, 0.0)
    }

    pub fn entries(&self) -> &[[C64; 2]; 2] {
        &self.m
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.m[r][c]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Unitary2 {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    pub fn mul(&self, other: &Unitary2) -> Self {
        let (a, b) = (&self.m, &other.m);
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Unitary2 { m }
    }

    /// Multiplies by the global phase `e^{i phi}`; the result is in U(2).
    pub fn with_phase(&self, phi: f64) -> Self {
        let z = C64::from_polar(1.0, phi);
        Unitary2 {
            m: self.m.map(|row| row.map(|v| v * z)),
        }
    }

    /// Frobenius norm of `U^dagger U - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut sum = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c { ONE } else { ZERO };
                sum += (p.m[r][c] - target).norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `self (x) other` with basis index `2 x + y`.
    pub fn kron(&self, other: &Unitary2) -> Matrix4 {
        let mut out = [[ZERO; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[2 * i + j][2 * k + l] = self.m[i][k] * other.m[j][l];
                    }
                }
            }
        }
        out
    }
}

impl Serialize for Unitary2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use crate::report::round15;
        let rows: Vec<Vec<[f64; 2]>> = self
            .m
            .iter()
            .map(|row| row.iter().map(|z| [round15(z.re), round15(z.im)]).collect())
            .collect();
        rows.serialize(s)
    }
}

/// `[[e^{ia} cos(t/2), e^{ib} sin(t/2)], [-e^{-ib} sin(t/2), e^{-ia} cos(t/2)]]`.
pub fn su2_from_angles(theta: f64, alpha: f64, beta: f64) -> Unitary2 {
    let (s, c) = (theta / 2.0).sin_cos();
    Unitary2 {
        m: [
            [C64::from_polar(c, alpha), C64::from_polar(s, beta)],
            [-C64::from_polar(s, -beta), C64::from_polar(c, -alpha)],
        ],
    }
}

/// Haar-distributed element of SU(2), a pure function of `(seed, index)`.
///
/// Four standard normals drawn from ChaCha8 stream `index` under key `seed`
/// are normalized to a unit quaternion `(a, b, c, d)`, which is uniform on
/// the 3-sphere, and mapped to `[[a + bi, c + di], [-c + di, a - bi]]`.
pub fn haar_su2(seed: u64, index: u64) -> Unitary2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            let [a, b, c, d] = q.map(|x| x / norm);
            return Unitary2 {
                m: [[C64::new(a, b), C64::new(c, d)], [C64::new(-c, d), C64::new(a, -b)]],
            };
        }
    }
}

pub fn mat4_apply(m: &Matrix4, v: &[C64; 4]) -> [C64; 4] {
    std::array::from_fn(|r| m[r].iter().zip(v).map(|(a, b)| a * b).sum())
}

pub fn mat4_mul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    std::array::from_fn(|r| std::array::from_fn(|c| (0..4).map(|k| a[r][k] * b[k][c]).sum()))
}

pub fn mat4_adjoint(m: &Matrix4) -> Matrix4 {
    std::array::from_fn(|r| std::array::from_fn(|c| m[c][r].conj()))
}

/// Frobenius norm of `M^dagger M - I`.
pub fn mat4_unitarity_residual(m: &Matrix4) -> f64 {
    let p = mat4_mul(&mat4_adjoint(m), m);
    let mut sum = 0.0;
    for (r, row) in p.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let target = if r == c { ONE } else { ZERO };
            sum += (v - target).norm_sqr();
        }
    }
    sum.sqrt()
}

/// Applies `u (x) v` to a two-qubit state.
pub fn apply2<X: Clone>(u: &Unitary2, v: &Unitary2, s: &Superposition<X>) -> Result<Superposition<X>> {
    if s.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: s.dim(),
        });
    }
    let amps: [C64; 4] = std::array::from_fn(|k| s.amplitudes[k]);
    let out = mat4_apply(&u.kron(v), &amps);
    Ok(Superposition {
        basis: s.basis.clone(),
        amplitudes: out.to_vec(),
    })
}

/// Computational basis state `|xy>` with labels `(x, y)`.
pub fn basis_state(x: usize, y: usize) -> Superposition<(usize, usize)> {
    let basis = vec![(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut amplitudes = vec![ZERO; 4];
    amplitudes[2 * x + y] = ONE;
    Superposition { basis, amplitudes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn qubit(a: C64, b: C64) -> Superposition<usize> {
        Superposition::new(vec![0, 1], vec![a, b]).unwrap()
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert_eq!(
            Superposition::new(vec![0, 1], vec![ZERO, ZERO]),
            Err(Error::DegenerateState)
        );
        assert!(Superposition::new(vec![0, 1], vec![ONE]).is_err());
    }

    #[test]
    fn normalization() {
        let s = qubit(c(1.0, 0.0), c(1.0, 0.0)).normalize();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - c(h, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(h, 0.0)).norm() < 1e-15);

        let s = qubit(c(3.0, 0.0), c(0.0, 4.0));
        let n = s.normalize();
        assert!((n.amplitudes()[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((n.amplitudes()[1] - c(0.0, 0.8)).norm() < 1e-15);
        assert!(n.projectively_eq(&s, 1e-12));
        assert_eq!(n.normalize(), n);
    }

    #[test]
    fn born_rule() {
        let d = qubit(c(1.0, 0.0), c(1.0, 0.0)).measure();
        assert_eq!(d.weights(), &[0.5, 0.5]);
        let d = qubit(c(3.0, 0.0), c(0.0, 4.0)).measure();
        assert!((d.weights()[0] - 9.0 / 25.0).abs() < 1e-15);
        assert!((d.weights()[1] - 16.0 / 25.0).abs() < 1e-15);
        let scaled = qubit(c(3.0, 0.0), c(0.0, 4.0)).scaled(c(-2.0, 7.5)).unwrap();
        let e = scaled.measure();
        assert!((e.weights()[0] - d.weights()[0]).abs() < 1e-15);
    }

    #[test]
    fn tensor_products() {
        let zero = qubit(ONE, ZERO);
        let one = qubit(ZERO, ONE);
        let plus = qubit(ONE, ONE);
        assert_eq!(tensor(&zero, &zero).amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(tensor(&plus, &one).amplitudes(), &[ZERO, ONE, ZERO, ONE]);
        assert_eq!(tensor(&plus, &one).basis(), &[(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn su2_parametrization() {
        assert_eq!(su2_from_angles(0.0, 0.0, 0.0), Unitary2::identity());
        let f = Unitary2::flip();
        assert!(f.get(0, 0).norm() < 1e-15 && f.get(1, 1).norm() < 1e-15);
        assert!((f.get(0, 1) - ONE).norm() < 1e-15);
        assert!((f.get(1, 0) + ONE).norm() < 1e-15);
        for &(t, a, b) in &[(0.3, 1.1, -2.0), (2.9, 4.0, 0.5), (PI, PI, PI)] {
            let u = su2_from_angles(t, a, b);
            assert!(Unitary2::new(*u.entries()).is_ok());
            assert!((u.det() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        assert!(Unitary2::new([[ONE, ONE], [ZERO, ONE]]).is_err());
        assert!(Unitary2::new([[c(2.0, 0.0), ZERO], [ZERO, c(0.5, 0.0)]]).is_err());
        // A global phase keeps |det| = 1.
        assert!(Unitary2::new(*Unitary2::flip().with_phase(0.7).entries()).is_ok());
    }

    #[test]
    fn haar_is_deterministic_and_unitary() {
        assert_eq!(haar_su2(42, 7), haar_su2(42, 7));
        assert_ne!(haar_su2(42, 7), haar_su2(42, 8));
        assert_ne!(haar_su2(42, 7), haar_su2(43, 7));
        for i in 0..1000 {
            let u = haar_su2(1, i);
            assert!(u.unitarity_residual() < 1e-12);
            assert!((u.det() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn two_qubit_action() {
        let s = basis_state(0, 0);
        let id = Unitary2::identity();
        assert_eq!(apply2(&id, &id, &s).unwrap(), s);
        let flipped = apply2(&Unitary2::flip(), &id, &s).unwrap();
        assert!(flipped.projectively_eq(&basis_state(1, 0), 1e-12));
        let u = su2_from_angles(0.4, 1.0, 2.0);
        let v = su2_from_angles(2.1, -0.3, 0.9);
        let moved = apply2(&u, &v, &s).unwrap();
        assert!((moved.norm() - 1.0).abs() < 1e-12);
        let three = Superposition::new(vec![0, 1, 2], vec![ONE; 3]).unwrap();
        assert!(apply2(&u, &v, &three).is_err());
    }
}
