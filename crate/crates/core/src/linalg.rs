//! Fixed-size complex matrices for one- and two-qubit operators.
//!
//! Two-qubit matrices act on the ordered pair `(first, second)`; the row/column
//! index is `2 * bit(first) + bit(second)`, so `Mat4::kron(a, b)` puts `a` on
//! the first qubit.

use std::ops::Mul;

use crate::scalar::{c, c_re, cis, Real, C};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T>(pub [[C<T>; 2]; 2]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4<T>(pub [[C<T>; 4]; 4]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix<T: Real>(self) -> Mat2<T> {
        let (o, z) = (T::one(), T::zero());
        match self {
            Pauli::I => Mat2::identity(),
            Pauli::X => Mat2([[c_re(z), c_re(o)], [c_re(o), c_re(z)]]),
            Pauli::Y => Mat2([[c_re(z), c(z, -o)], [c(z, o), c_re(z)]]),
            Pauli::Z => Mat2([[c_re(o), c_re(z)], [c_re(z), c_re(-o)]]),
        }
    }
}

impl<T: Real> Mat2<T> {
    pub fn zeros() -> Self {
        Mat2([[C::new(T::zero(), T::zero()); 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        m.0[0][0] = c_re(T::one());
        m.0[1][1] = c_re(T::one());
        m
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x = *x * s);
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    /// `e^{i theta P}` for a Pauli `P`.
    pub fn exp_i_pauli(theta: T, p: Pauli) -> Self {
        let cos = c_re(theta.cos());
        let isin = c(T::zero(), theta.sin());
        let (id, pm) = (Self::identity(), p.matrix::<T>());
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = id.0[i][j] * cos + pm.0[i][j] * isin;
            }
        }
        m
    }

    /// Max-entry deviation of `M M^\dagger` from the identity.
    pub fn unitarity_deviation(&self) -> T {
        max_deviation_from_identity(&(*self * self.adjoint()).0)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        max_abs_diff(&self.0, &self.adjoint().0) <= tol
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        m
    }
}

impl<T: Real> Mat4<T> {
    pub fn zeros() -> Self {
        Mat4([[C::new(T::zero(), T::zero()); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        (0..4).for_each(|i| m.0[i][i] = c_re(T::one()));
        m
    }

    pub fn diagonal(d: [C<T>; 4]) -> Self {
        let mut m = Self::zeros();
        (0..4).for_each(|i| m.0[i][i] = d[i]);
        m
    }

    pub fn kron(a: &Mat2<T>, b: &Mat2<T>) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = a.0[i >> 1][j >> 1] * b.0[i & 1][j & 1];
            }
        }
        m
    }

    pub fn pauli_pair(p: Pauli, q: Pauli) -> Self {
        Self::kron(&p.matrix(), &q.matrix())
    }

    /// Controlled-NOT with the first qubit as control.
    pub fn cx() -> Self {
        let (o, z) = (c_re(T::one()), c_re(T::zero()));
        Mat4([[o, z, z, z], [z, o, z, z], [z, z, z, o], [z, z, o, z]])
    }

    pub fn swap() -> Self {
        let (o, z) = (c_re(T::one()), c_re(T::zero()));
        Mat4([[o, z, z, z], [z, z, o, z], [z, o, z, z], [z, z, z, o]])
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x = *x * s);
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = *self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = m.0[i][j] + other.0[i][j];
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    /// Same operator with the roles of the two qubits exchanged.
    pub fn swapped_qubits(&self) -> Self {
        let p = |i: usize| ((i & 1) << 1) | (i >> 1);
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[p(i)][p(j)] = self.0[i][j];
            }
        }
        m
    }

    pub fn is_diagonal(&self) -> bool {
        let zero = C::new(T::zero(), T::zero());
        (0..4).all(|i| (0..4).all(|j| i == j || self.0[i][j] == zero))
    }

    pub fn unitarity_deviation(&self) -> T {
        max_deviation_from_identity(&(*self * self.adjoint()).0)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        max_abs_diff(&self.0, &self.adjoint().0) <= tol
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl<T: Real> Mul for Mat4<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = C::new(T::zero(), T::zero());
                for k in 0..4 {
                    acc = acc + self.0[i][k] * rhs.0[k][j];
                }
                m.0[i][j] = acc;
            }
        }
        m
    }
}

/// A one- or two-qubit operator together with the chain indices it acts on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LocalOperator<T> {
    One { qubit: usize, matrix: Mat2<T> },
    Two { qubits: [usize; 2], matrix: Mat4<T> },
}

impl<T: Real> LocalOperator<T> {
    pub fn one(qubit: usize, matrix: Mat2<T>) -> Self {
        LocalOperator::One { qubit, matrix }
    }

    pub fn two(first: usize, second: usize, matrix: Mat4<T>) -> Self {
        LocalOperator::Two {
            qubits: [first, second],
            matrix,
        }
    }

    pub fn support(&self) -> Vec<usize> {
        match self {
            LocalOperator::One { qubit, .. } => vec![*qubit],
            LocalOperator::Two { qubits, .. } => qubits.to_vec(),
        }
    }

    pub fn adjoint(&self) -> Self {
        match *self {
            LocalOperator::One { qubit, matrix } => LocalOperator::One {
                qubit,
                matrix: matrix.adjoint(),
            },
            LocalOperator::Two { qubits, matrix } => LocalOperator::Two {
                qubits,
                matrix: matrix.adjoint(),
            },
        }
    }

    pub fn unitarity_deviation(&self) -> T {
        match self {
            LocalOperator::One { matrix, .. } => matrix.unitarity_deviation(),
            LocalOperator::Two { matrix, .. } => matrix.unitarity_deviation(),
        }
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        match self {
            LocalOperator::One { matrix, .. } => matrix.is_hermitian(tol),
            LocalOperator::Two { matrix, .. } => matrix.is_hermitian(tol),
        }
    }
}

/// Exact `exp(+i dt (c_xx XX + c_yy YY + c_zz ZZ))`.
///
/// `XX`, `YY` and `ZZ` commute and leave the spans of `{|00>, |11>}` and
/// `{|01>, |10>}` invariant. On the first block the generator is
/// `c_zz + (c_xx - c_yy) sigma_x`, on the second `-c_zz + (c_xx + c_yy) sigma_x`.
pub fn two_site_expm<T: Real>(c_xx: T, c_yy: T, c_zz: T, dt: T) -> Mat4<T> {
    let even_angle = dt * (c_xx - c_yy);
    let odd_angle = dt * (c_xx + c_yy);
    let even_phase = cis(dt * c_zz);
    let odd_phase = cis(-dt * c_zz);

    let (ce, se) = (c_re(even_angle.cos()), c(T::zero(), even_angle.sin()));
    let (co, so) = (c_re(odd_angle.cos()), c(T::zero(), odd_angle.sin()));

    let mut m = Mat4::zeros();
    m.0[0][0] = even_phase * ce;
    m.0[3][3] = even_phase * ce;
    m.0[0][3] = even_phase * se;
    m.0[3][0] = even_phase * se;
    m.0[1][1] = odd_phase * co;
    m.0[2][2] = odd_phase * co;
    m.0[1][2] = odd_phase * so;
    m.0[2][1] = odd_phase * so;
    m
}

fn max_deviation_from_identity<T: Real, const N: usize>(m: &[[C<T>; N]; N]) -> T {
    let mut worst = T::zero();
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((*x - c_re(target)).norm());
        }
    }
    worst
}

fn max_abs_diff<T: Real, const N: usize>(a: &[[C<T>; N]; N], b: &[[C<T>; N]; N]) -> T {
    let mut worst = T::zero();
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}
