//! Dense statevector over `2^N` basis states.
//!
//! Chain index `q` is bit `q` of the basis index; bit value 0 is spin up.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{LocalOperator, Mat2, Mat4};
use crate::model::SiteIndex;
use crate::scalar::{c_re, Real, C};

/// Largest register a [`StateVector`] may hold.
pub const MAX_QUBITS: usize = 24;

/// Registers at least this large use the rayon kernels.
const PARALLEL_MIN_QUBITS: usize = 14;

/// A gate is a unitary [`LocalOperator`].
pub type GateOp<T> = LocalOperator<T>;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<C<T>>,
    n_qubits: usize,
}

/// Raw pointer shared across rayon tasks that write provably disjoint indices.
#[derive(Clone, Copy)]
struct SharedMut<T>(*mut C<T>);
unsafe impl<T: Send> Send for SharedMut<T> {}
unsafe impl<T: Send> Sync for SharedMut<T> {}

impl<T> SharedMut<T> {
    #[inline(always)]
    fn ptr(self) -> *mut C<T> {
        self.0
    }
}

/// Inserts a zero bit at position `bit` of `k`.
#[inline(always)]
fn insert_zero(k: usize, bit: usize) -> usize {
    let low = k & ((1 << bit) - 1);
    ((k >> bit) << (bit + 1)) | low
}

impl<T: Real> StateVector<T> {
    pub fn all_up(n_qubits: usize) -> Result<Self> {
        Self::basis_state(n_qubits, 0)
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amps = vec![C::new(T::zero(), T::zero()); dim];
        amps[index] = c_re(T::one());
        Ok(StateVector { amps, n_qubits })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalization is applied.
    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                found: dim,
            });
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_size(n_qubits)?;
        Ok(StateVector { amps, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |s, x| s + x)
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > T::zero() {
            let inv = T::one() / n;
            self.amps.iter_mut().for_each(|a| *a = a.scale(inv));
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        self.check_same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(C::new(T::zero(), T::zero()), |s, (a, b)| s + a.conj() * *b))
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.check_same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .fold(T::zero(), |s, x| s + x)
            .sqrt())
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Validates the gate's support against this register.
    pub fn check_gate(&self, gate: &GateOp<T>) -> Result<()> {
        match gate {
            LocalOperator::One { qubit, .. } => self.check_qubit(*qubit),
            LocalOperator::Two { qubits, .. } => {
                self.check_qubit(qubits[0])?;
                self.check_qubit(qubits[1])?;
                if qubits[0] == qubits[1] {
                    return Err(Error::OverlappingSupport(qubits.to_vec()));
                }
                Ok(())
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &GateOp<T>) -> Result<()> {
        self.check_gate(gate)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    /// Applies a gate whose support was validated by [`Self::check_gate`].
    pub fn apply_unchecked(&mut self, gate: &GateOp<T>) {
        match gate {
            LocalOperator::One { qubit, matrix } => self.apply_one(*qubit, matrix),
            LocalOperator::Two { qubits, matrix } => self.apply_two(qubits[0], qubits[1], matrix),
        }
    }

    pub fn apply_gates(&mut self, gates: &[GateOp<T>]) -> Result<()> {
        gates.iter().try_for_each(|g| self.check_gate(g))?;
        gates.iter().for_each(|g| self.apply_unchecked(g));
        Ok(())
    }

    fn apply_one(&mut self, q: usize, m: &Mat2<T>) {
        let half = self.amps.len() / 2;
        let stride = 1usize << q;
        let ptr = SharedMut(self.amps.as_mut_ptr());
        let [[m00, m01], [m10, m11]] = m.0;
        let zero = C::new(T::zero(), T::zero());
        let diagonal = m01 == zero && m10 == zero;
        // Each k owns the index pair (i0, i0 | stride); pairs are disjoint.
        let kernel = move |k: usize| unsafe {
            let i0 = insert_zero(k, q);
            let i1 = i0 | stride;
            let p = ptr.ptr();
            if diagonal {
                *p.add(i0) = m00 * *p.add(i0);
                *p.add(i1) = m11 * *p.add(i1);
            } else {
                let (a0, a1) = (*p.add(i0), *p.add(i1));
                *p.add(i0) = m00 * a0 + m01 * a1;
                *p.add(i1) = m10 * a0 + m11 * a1;
            }
        };
        if self.n_qubits >= PARALLEL_MIN_QUBITS {
            (0..half).into_par_iter().for_each(kernel);
        } else {
            (0..half).for_each(kernel);
        }
    }

    fn apply_two(&mut self, q0: usize, q1: usize, m: &Mat4<T>) {
        let quarter = self.amps.len() / 4;
        let (lo, hi) = (q0.min(q1), q0.max(q1));
        let (b0, b1) = (1usize << q0, 1usize << q1);
        let ptr = SharedMut(self.amps.as_mut_ptr());
        let mm = m.0;
        let diagonal = m.is_diagonal();
        // Each k owns the four indices base | {0, b1, b0, b0|b1}; these sets are disjoint.
        let kernel = move |k: usize| unsafe {
            let base = insert_zero(insert_zero(k, lo), hi);
            let idx = [base, base | b1, base | b0, base | b0 | b1];
            let p = ptr.ptr();
            if diagonal {
                for r in 0..4 {
                    *p.add(idx[r]) = mm[r][r] * *p.add(idx[r]);
                }
            } else {
                let a = [*p.add(idx[0]), *p.add(idx[1]), *p.add(idx[2]), *p.add(idx[3])];
                for r in 0..4 {
                    *p.add(idx[r]) = mm[r][0] * a[0] + mm[r][1] * a[1] + mm[r][2] * a[2] + mm[r][3] * a[3];
                }
            }
        };
        if self.n_qubits >= PARALLEL_MIN_QUBITS {
            (0..quarter).into_par_iter().for_each(kernel);
        } else {
            (0..quarter).for_each(kernel);
        }
    }

    /// Multiplies amplitude `i` by `phases[i]`.
    pub fn apply_diagonal(&mut self, phases: &[C<T>]) -> Result<()> {
        if phases.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: phases.len(),
            });
        }
        if self.n_qubits >= PARALLEL_MIN_QUBITS {
            self.amps
                .par_iter_mut()
                .zip(phases)
                .for_each(|(a, p)| *a = *a * *p);
        } else {
            self.amps.iter_mut().zip(phases).for_each(|(a, p)| *a = *a * *p);
        }
        Ok(())
    }

    /// `<sigma^z_q>` for chain index `q`.
    pub fn expectation_z_chain(&self, q: usize) -> Result<T> {
        self.check_qubit(q)?;
        let mask = 1usize << q;
        Ok(self.signed_weight(|i| i & mask == 0))
    }

    pub fn expectation_z(&self, site: SiteIndex) -> Result<T> {
        self.expectation_z_chain(site.chain_index())
    }

    pub fn expectation_zz(&self, site1: SiteIndex, site2: SiteIndex) -> Result<T> {
        let (q1, q2) = (site1.chain_index(), site2.chain_index());
        if q1 == q2 {
            return Err(Error::OverlappingSupport(vec![q1, q2]));
        }
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        let mask = (1usize << q1) | (1usize << q2);
        Ok(self.signed_weight(|i| (i & mask).count_ones() % 2 == 0))
    }

    /// `<sigma^z_q>` for every chain index in one pass.
    pub fn z_profile(&self) -> Vec<T> {
        let n = self.n_qubits;
        let accumulate = |mut acc: Vec<T>, (i, a): (usize, &C<T>)| {
            let p = a.norm_sqr();
            for (q, slot) in acc.iter_mut().enumerate() {
                if i >> q & 1 == 0 {
                    *slot = *slot + p;
                } else {
                    *slot = *slot - p;
                }
            }
            acc
        };
        if n >= PARALLEL_MIN_QUBITS {
            self.amps
                .par_iter()
                .enumerate()
                .fold(|| vec![T::zero(); n], accumulate)
                .reduce(
                    || vec![T::zero(); n],
                    |a, b| a.iter().zip(&b).map(|(x, y)| *x + *y).collect(),
                )
        } else {
            self.amps.iter().enumerate().fold(vec![T::zero(); n], accumulate)
        }
    }

    fn signed_weight(&self, positive: impl Fn(usize) -> bool + Sync) -> T {
        let term = |(i, a): (usize, &C<T>)| if positive(i) { a.norm_sqr() } else { -a.norm_sqr() };
        if self.n_qubits >= PARALLEL_MIN_QUBITS {
            self.amps
                .par_iter()
                .enumerate()
                .map(term)
                .reduce(T::zero, |a, b| a + b)
        } else {
            self.amps
                .iter()
                .enumerate()
                .map(term)
                .fold(T::zero(), |a, b| a + b)
        }
    }

    /// Writes `u64` amplitude count followed by interleaved little-endian `f64` real/imag pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.amps.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.amps.len());
        for a in &self.amps {
            buf.extend_from_slice(&a.re.to_f64_lossy().to_le_bytes());
            buf.extend_from_slice(&a.im.to_f64_lossy().to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let len = u64::from_le_bytes(len) as usize;
        if len > 1usize << MAX_QUBITS {
            return Err(Error::ResourceCap {
                what: "binary statevector",
                requested: len.trailing_zeros() as usize,
                cap: MAX_QUBITS,
            });
        }
        let mut buf = vec![0u8; 16 * len];
        r.read_exact(&mut buf)?;
        let amps = buf
            .chunks_exact(16)
            .map(|ch| {
                let re = f64::from_le_bytes(ch[..8].try_into().expect("8-byte chunk"));
                let im = f64::from_le_bytes(ch[8..].try_into().expect("8-byte chunk"));
                C::new(T::lit(re), T::lit(im))
            })
            .collect();
        Self::from_amplitudes(amps)
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidParameter {
            name: "n_qubits",
            reason: "register needs at least one qubit".into(),
        });
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::ResourceCap {
            what: "statevector",
            requested: n_qubits,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Returns `gate` applied to a copy of `state`.
pub fn apply_gate<T: Real>(state: &StateVector<T>, gate: &GateOp<T>) -> Result<StateVector<T>> {
    let mut out = state.clone();
    out.apply_gate(gate)?;
    Ok(out)
}
