//! Layered hardware-efficient ansatz: a U3 layer on every qubit, then
//! combined layers of CX + U3 on odd pairs `(2i, 2i+1)` and even pairs
//! `(2i+1, 2i+2)`.

use crate::error::{invalid, Error, Result};
use crate::linalg::{Mat2, Mat4};
use crate::scalar::{c_re, cis, Real, C};
use crate::statevector::{GateOp, StateVector};

/// `U3(theta, phi, lambda)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct U3Gate<T> {
    pub theta: T,
    pub phi: T,
    pub lambda: T,
}

impl<T: Real> U3Gate<T> {
    pub fn new(theta: T, phi: T, lambda: T) -> Self {
        U3Gate { theta, phi, lambda }
    }

    /// `[[cos(t/2), -e^{i l} sin(t/2)], [e^{i p} sin(t/2), e^{i(p+l)} cos(t/2)]]`.
    pub fn matrix(&self) -> Mat2<T> {
        let half = self.theta / T::lit(2.0);
        let (cs, sn) = (half.cos(), half.sin());
        Mat2([
            [c_re(cs), -cis(self.lambda) * sn],
            [cis(self.phi) * sn, cis(self.phi + self.lambda) * cs],
        ])
    }

    /// Partial derivatives of [`U3Gate::matrix`] with respect to `theta`, `phi`, `lambda`.
    pub fn derivatives(&self) -> [Mat2<T>; 3] {
        let half = self.theta / T::lit(2.0);
        let (cs, sn) = (half.cos(), half.sin());
        let h = T::lit(0.5);
        let zero = c_re(T::zero());
        let i = C::new(T::zero(), T::one());
        let (ep, el, epl) = (cis(self.phi), cis(self.lambda), cis(self.phi + self.lambda));
        [
            Mat2([[c_re(-sn * h), -el * (cs * h)], [ep * (cs * h), -epl * (sn * h)]]),
            Mat2([[zero, zero], [i * ep * sn, i * epl * cs]]),
            Mat2([[zero, -i * el * sn], [zero, i * epl * cs]]),
        ]
    }

    pub fn in_box(&self) -> bool {
        [self.theta, self.phi, self.lambda]
            .iter()
            .all(|&a| a >= T::zero() && a <= T::TAU())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnsatzOp {
    /// U3 number `gate`, reading parameters `3*gate .. 3*gate+3`.
    U3 {
        qubit: usize,
        gate: usize,
    },
    Cx {
        control: usize,
        target: usize,
    },
}

/// Layout of the ansatz; independent of the parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzCircuit<T> {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub ops: Vec<AnsatzOp>,
    /// `(theta, phi, lambda)` per U3 gate, flattened.
    pub parameters: Vec<T>,
}

pub fn odd_pairs(n_qubits: usize) -> Vec<(usize, usize)> {
    (0..n_qubits / 2).map(|i| (2 * i, 2 * i + 1)).collect()
}

pub fn even_pairs(n_qubits: usize) -> Vec<(usize, usize)> {
    (0..n_qubits.saturating_sub(1) / 2)
        .map(|i| (2 * i + 1, 2 * i + 2))
        .collect()
}

/// `3 * (n + n_layers * 2 * (#odd + #even))`.
pub fn parameter_count(n_qubits: usize, n_layers: usize) -> usize {
    3 * (n_qubits + n_layers * 2 * (odd_pairs(n_qubits).len() + even_pairs(n_qubits).len()))
}

pub fn build_ansatz<T: Real>(n_qubits: usize, n_layers: usize) -> Result<AnsatzCircuit<T>> {
    if n_qubits < 2 {
        return Err(invalid(
            "n_qubits",
            format!("ansatz needs at least 2 qubits, got {n_qubits}"),
        ));
    }
    let mut ops = Vec::new();
    let mut gate = 0usize;
    let mut u3 = |ops: &mut Vec<AnsatzOp>, qubit: usize| {
        ops.push(AnsatzOp::U3 { qubit, gate });
        gate += 1;
    };
    for q in 0..n_qubits {
        u3(&mut ops, q);
    }
    for _ in 0..n_layers {
        for pairs in [odd_pairs(n_qubits), even_pairs(n_qubits)] {
            for (a, b) in pairs {
                ops.push(AnsatzOp::Cx {
                    control: a,
                    target: b,
                });
                u3(&mut ops, a);
                u3(&mut ops, b);
            }
        }
    }
    let n_params = 3 * gate;
    debug_assert_eq!(n_params, parameter_count(n_qubits, n_layers));
    Ok(AnsatzCircuit {
        n_qubits,
        n_layers,
        ops,
        parameters: vec![T::zero(); n_params],
    })
}

impl<T: Real> AnsatzCircuit<T> {
    pub fn n_params(&self) -> usize {
        self.parameters.len()
    }

    pub fn n_u3(&self) -> usize {
        self.parameters.len() / 3
    }

    pub fn n_cx(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, AnsatzOp::Cx { .. }))
            .count()
    }

    fn check_params(&self, params: &[T]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                expected: self.n_params(),
                found: params.len(),
            });
        }
        Ok(())
    }

    /// Concrete gate list for `params`.
    pub fn gates(&self, params: &[T]) -> Result<Vec<GateOp<T>>> {
        self.check_params(params)?;
        Ok(self
            .ops
            .iter()
            .map(|op| match *op {
                AnsatzOp::U3 { qubit, gate } => {
                    let p = &params[3 * gate..3 * gate + 3];
                    GateOp::one(qubit, U3Gate::new(p[0], p[1], p[2]).matrix())
                }
                AnsatzOp::Cx { control, target } => GateOp::two(control, target, Mat4::cx()),
            })
            .collect())
    }

    /// `V(params) |state>` in place.
    pub fn apply(&self, params: &[T], state: &mut StateVector<T>) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: state.n_qubits(),
            });
        }
        for g in self.gates(params)? {
            state.apply_unchecked(&g);
        }
        Ok(())
    }

    /// `V(params) |up...up>`.
    pub fn prepare(&self, params: &[T]) -> Result<StateVector<T>> {
        let mut s = StateVector::all_up(self.n_qubits)?;
        self.apply(params, &mut s)?;
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    /// `1 - Re <V psi0 | target>`; zero only for an exact match including global phase.
    #[default]
    RealOverlap,
    /// `1 - |<V psi0 | target>|^2`; ignores global phase.
    Fidelity,
}

pub fn overlap_cost<T: Real>(overlap: C<T>, kind: CostKind) -> T {
    match kind {
        CostKind::RealOverlap => T::one() - overlap.re,
        CostKind::Fidelity => T::one() - overlap.norm_sqr(),
    }
}

pub fn cost<T: Real>(
    ansatz: &AnsatzCircuit<T>,
    params: &[T],
    target: &StateVector<T>,
    kind: CostKind,
) -> Result<T> {
    if target.n_qubits() != ansatz.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: ansatz.n_qubits,
            found: target.n_qubits(),
        });
    }
    let v = ansatz.prepare(params)?;
    Ok(overlap_cost(v.inner(target)?, kind))
}

/// `R_ab = sum over pairs of lam_a conj(phi_b)` on `qubit`, so that
/// `<D phi | lam> = sum_ab conj(D_ab) R_ab` for any one-qubit `D`.
fn pair_correlation<T: Real>(phi: &StateVector<T>, lam: &StateVector<T>, qubit: usize) -> [[C<T>; 2]; 2] {
    let bit = 1usize << qubit;
    let (p, l) = (phi.amplitudes(), lam.amplitudes());
    let zero = C::new(T::zero(), T::zero());
    let mut r = [[zero; 2]; 2];
    for i0 in (0..p.len()).filter(|i| i & bit == 0) {
        let i1 = i0 | bit;
        let (p0, p1) = (p[i0].conj(), p[i1].conj());
        r[0][0] = r[0][0] + l[i0] * p0;
        r[0][1] = r[0][1] + l[i0] * p1;
        r[1][0] = r[1][0] + l[i1] * p0;
        r[1][1] = r[1][1] + l[i1] * p1;
    }
    r
}

impl<T: Real> AnsatzCircuit<T> {
    /// Cost and its exact gradient by one forward and one reverse sweep.
    pub fn cost_and_gradient(
        &self,
        params: &[T],
        target: &StateVector<T>,
        kind: CostKind,
    ) -> Result<(T, Vec<T>)> {
        let gates = self.gates(params)?;
        let mut phi = self.prepare(params)?;
        let overlap = phi.inner(target)?;
        let mut lam = target.clone();
        let mut grad = vec![T::zero(); params.len()];
        for (op, g) in self.ops.iter().zip(&gates).rev() {
            let inv = g.adjoint();
            phi.apply_unchecked(&inv);
            if let AnsatzOp::U3 { qubit, gate } = *op {
                let p = &params[3 * gate..3 * gate + 3];
                let r = pair_correlation(&phi, &lam, qubit);
                for (slot, d) in grad[3 * gate..3 * gate + 3]
                    .iter_mut()
                    .zip(U3Gate::new(p[0], p[1], p[2]).derivatives())
                {
                    let mut dov = C::new(T::zero(), T::zero());
                    for a in 0..2 {
                        for b in 0..2 {
                            dov = dov + d.0[a][b].conj() * r[a][b];
                        }
                    }
                    *slot = match kind {
                        CostKind::RealOverlap => -dov.re,
                        CostKind::Fidelity => -T::lit(2.0) * (overlap.conj() * dov).re,
                    };
                }
            }
            lam.apply_unchecked(&inv);
        }
        Ok((overlap_cost(overlap, kind), grad))
    }
}
