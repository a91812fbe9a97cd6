//! Nearest-neighbour routing of next-nearest-neighbour two-qubit gates on a line.

use crate::error::{Error, Result};
use crate::linalg::{LocalOperator, Mat4};
use crate::scalar::Real;
use crate::statevector::GateOp;

pub fn is_nearest_neighbour<T>(gate: &GateOp<T>) -> bool {
    match gate {
        LocalOperator::One { .. } => true,
        LocalOperator::Two { qubits, .. } => qubits[0].abs_diff(qubits[1]) == 1,
    }
}

/// A gate on `(q, q+2)` (either orientation) becomes
/// `SWAP(q+1, q+2) . G(q, q+1) . SWAP(q+1, q+2)`; nearest-neighbour and
/// single-qubit gates are returned unchanged.
pub fn route_next_nearest<T: Real>(gate: &GateOp<T>, n_qubits: usize) -> Result<Vec<GateOp<T>>> {
    for q in gate.support() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
    }
    let LocalOperator::Two {
        qubits: [a, b],
        matrix,
    } = *gate
    else {
        return Ok(vec![*gate]);
    };
    match a.abs_diff(b) {
        0 => Err(Error::OverlappingSupport(vec![a, b])),
        1 => Ok(vec![*gate]),
        2 => {
            let lo = a.min(b);
            let (mid, hi) = (lo + 1, lo + 2);
            let relabel = |q: usize| if q == hi { mid } else { q };
            let swap = GateOp::two(mid, hi, Mat4::swap());
            Ok(vec![swap, GateOp::two(relabel(a), relabel(b), matrix), swap])
        }
        _ => Err(Error::UnroutedGate(a, b)),
    }
}

pub fn route_circuit<T: Real>(gates: &[GateOp<T>], n_qubits: usize) -> Result<Vec<GateOp<T>>> {
    let mut out = Vec::with_capacity(gates.len());
    for g in gates {
        out.extend(route_next_nearest(g, n_qubits)?);
    }
    Ok(out)
}
