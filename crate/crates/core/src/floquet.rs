//! Exact diagonalization of the one-period unitary and the spectral
//! diagnostics built on it.
//!
//! Quasienergies are `epsilon = -arg(lambda) / T`, folded into `(-pi/T, pi/T]`.

use std::io::Write;

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::evolution::{CycleProgram, TrotterSchedule};
use crate::model::{DisorderedParams, ModelParams, SiteIndex};
use crate::observables::{power_spectrum, PowerSpectrum};
use crate::scalar::{c_re, Real, C};
use crate::statevector::StateVector;

/// Dense diagonalization is limited to `2^12` states.
pub const MAX_ED_QUBITS: usize = 12;

/// Matrix entries at or below this magnitude are treated as structural zeros
/// when splitting the unitary into invariant blocks.
pub const BLOCK_THRESHOLD: f64 = 1e-12;

/// Scalars usable for dense linear algebra.
pub trait EdReal: Real + RealField {}
impl<T: Real + RealField> EdReal for T {}

fn check_ed_size(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_ED_QUBITS {
        return Err(Error::ResourceCap {
            what: "dense Floquet unitary",
            requested: n_qubits,
            cap: MAX_ED_QUBITS,
        });
    }
    Ok(())
}

/// Column `b` is one period applied to basis state `b`.
pub fn build_floquet_unitary<T: EdReal>(
    dp: &DisorderedParams<T>,
    schedule: &TrotterSchedule<T>,
) -> Result<DMatrix<C<T>>> {
    check_ed_size(dp.n_sites())?;
    let program = CycleProgram::new(dp, schedule)?;
    unitary_from_program(&program)
}

/// Dense matrix of a precompiled period.
pub fn unitary_from_program<T: EdReal>(program: &CycleProgram<T>) -> Result<DMatrix<C<T>>> {
    let n = program.n_qubits();
    check_ed_size(n)?;
    let dim = 1usize << n;
    let columns = (0..dim)
        .into_par_iter()
        .map(|b| {
            let mut s = StateVector::basis_state(n, b)?;
            program.apply(&mut s);
            Ok(s.into_amplitudes())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(dim, dim, |i, j| columns[j][i]))
}

/// Folds `epsilon` into `(-pi/T, pi/T]`.
pub fn fold_quasienergy<T: Real>(epsilon: T, period: T) -> T {
    let width = T::TAU() / period;
    let half = T::PI() / period;
    let mut e = epsilon - width * ((epsilon + half) / width).floor();
    // Now e lies in [-pi/T, pi/T).
    if e <= -half {
        e = e + width;
    }
    e
}

#[derive(Clone, Debug)]
pub struct FloquetSpectrum<T: EdReal> {
    /// Ascending, in `(-pi/T, pi/T]`.
    pub quasienergies: Vec<T>,
    /// Column `n` is `|epsilon_n>`.
    pub eigenvectors: DMatrix<C<T>>,
    pub period: T,
}

impl<T: EdReal> FloquetSpectrum<T> {
    pub fn dim(&self) -> usize {
        self.quasienergies.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// `max_n ||U|n> - e^{-i eps_n T}|n>||`.
    pub fn eigen_residual(&self, u: &DMatrix<C<T>>) -> T {
        let lhs = u * &self.eigenvectors;
        (0..self.dim())
            .map(|n| {
                let phase = C::from_polar(T::one(), -self.quasienergies[n] * self.period);
                let r = lhs.column(n) - self.eigenvectors.column(n) * phase;
                r.norm()
            })
            .fold(T::zero(), Float::max)
    }

    /// Max-entry deviation of `Q^dagger Q` from the identity.
    pub fn eigenvector_unitarity_deviation(&self) -> T {
        max_identity_deviation(&(self.eigenvectors.adjoint() * &self.eigenvectors))
    }

    /// Columns `n, epsilon_T_over_pi`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,epsilon_T_over_pi")?;
        for (n, e) in self.quasienergies.iter().enumerate() {
            writeln!(w, "{n},{}", (*e * self.period / T::PI()))?;
        }
        Ok(())
    }
}

pub fn max_identity_deviation<T: EdReal>(m: &DMatrix<C<T>>) -> T {
    let mut worst = T::zero();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let target = if i == j { T::one() } else { T::zero() };
            worst = Float::max(worst, (m[(i, j)] - c_re(target)).norm());
        }
    }
    worst
}

/// Connected components of the graph with an edge wherever `|U_ij| > BLOCK_THRESHOLD`.
fn invariant_blocks<T: EdReal>(u: &DMatrix<C<T>>) -> Vec<Vec<usize>> {
    let dim = u.nrows();
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let thr = T::lit(BLOCK_THRESHOLD);
    for j in 0..dim {
        for i in 0..dim {
            if i != j && u[(i, j)].norm() > thr {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; dim];
    for i in 0..dim {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

/// Diagonalizes a unitary block by block with a complex Schur decomposition.
///
/// Splitting into invariant blocks first keeps exact symmetry sectors
/// separate, so eigenvectors inside degenerate multiplets stay sector-resolved.
pub fn diagonalize<T: EdReal>(u: &DMatrix<C<T>>, period: T) -> Result<FloquetSpectrum<T>> {
    let dim = u.nrows();
    if dim != u.ncols() || dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two().max(1),
            found: u.ncols(),
        });
    }
    check_ed_size(dim.trailing_zeros() as usize)?;
    if !(period > T::zero()) {
        return Err(invalid("T", "period must be positive"));
    }
    let blocks = invariant_blocks(u);
    let solved = blocks
        .par_iter()
        .map(|idx| schur_block(u, idx))
        .collect::<Result<Vec<_>>>()?;

    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(dim);
    let mut worst = 0.0f64;
    for (b, (lams, _, dev)) in solved.iter().enumerate() {
        worst = worst.max(*dev);
        for (k, lam) in lams.iter().enumerate() {
            pairs.push((fold_quasienergy(-lam.arg() / period, period), b, k));
        }
    }
    if worst > 1e-6 {
        return Err(Error::NotUnitary(worst));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite quasienergies"));
    let mut vecs = DMatrix::from_element(dim, dim, c_re(T::zero()));
    for (col, &(_, b, k)) in pairs.iter().enumerate() {
        let (_, q, _) = &solved[b];
        for (r, &row) in blocks[b].iter().enumerate() {
            vecs[(row, col)] = q[(r, k)];
        }
    }
    Ok(FloquetSpectrum {
        quasienergies: pairs.into_iter().map(|p| p.0).collect(),
        eigenvectors: vecs,
        period,
    })
}

type BlockSolution<T> = (Vec<C<T>>, DMatrix<C<T>>, f64);

/// Eigenvalues, Schur vectors and the unitarity defect of the triangular factor.
fn schur_block<T: EdReal>(u: &DMatrix<C<T>>, idx: &[usize]) -> Result<BlockSolution<T>> {
    let m = idx.len();
    let sub = DMatrix::from_fn(m, m, |i, j| u[(idx[i], idx[j])]);
    if m == 1 {
        let lam = sub[(0, 0)];
        let dev = Float::abs(lam.norm() - T::one()).to_f64_lossy();
        return Ok((vec![lam], DMatrix::from_element(1, 1, c_re(T::one())), dev));
    }
    let schur = nalgebra::linalg::Schur::try_new(sub, T::default_epsilon(), 0)
        .ok_or_else(|| invalid("U", "Schur iteration did not converge"))?;
    let (q, t) = schur.unpack();
    // A triangular factor of a unitary is diagonal with unit-modulus entries.
    let mut dev = T::zero();
    for j in 0..m {
        dev = Float::max(dev, Float::abs(t[(j, j)].norm() - T::one()));
        for i in 0..j {
            dev = Float::max(dev, t[(i, j)].norm());
        }
    }
    let lams = (0..m).map(|j| t[(j, j)]).collect();
    Ok((lams, q, dev.to_f64_lossy()))
}

/// For every `eps_j`, the nearest quasienergies to `eps_j +- pi/(2T)` on the circle of circumference `2 pi/T`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadrupletReport<T> {
    pub quasienergies: Vec<T>,
    pub plus_partner: Vec<usize>,
    pub plus_gap: Vec<T>,
    pub minus_partner: Vec<usize>,
    pub minus_gap: Vec<T>,
    pub tolerance: T,
    /// Share of `j` with both gaps below `tolerance`.
    pub fraction: f64,
}

impl<T: Real> QuadrupletReport<T> {
    /// `quasienergies` need not be sorted.
    pub fn from_quasienergies(quasienergies: &[T], period: T, tolerance: T) -> Result<Self> {
        if quasienergies.is_empty() {
            return Err(Error::Empty("quasienergy list"));
        }
        if !(tolerance > T::zero()) {
            return Err(invalid("tolerance", format!("must be positive, got {tolerance}")));
        }
        let width = T::TAU() / period;
        let shift = T::FRAC_PI_2() / period;
        let mut sorted: Vec<(T, usize)> = quasienergies
            .iter()
            .enumerate()
            .map(|(i, &e)| (fold_quasienergy(e, period), i))
            .collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite quasienergies"));
        let values: Vec<T> = sorted.iter().map(|p| p.0).collect();

        let nearest = |x: T| -> (usize, T) {
            let x = fold_quasienergy(x, period);
            let n = values.len();
            let pos = values.partition_point(|&v| v < x);
            let mut best = (0usize, T::infinity());
            for cand in [pos % n, (pos + n - 1) % n] {
                let d = (values[cand] - x).abs();
                let d = d.min(width - d);
                if d < best.1 {
                    best = (cand, d);
                }
            }
            (sorted[best.0].1, best.1)
        };

        let n = quasienergies.len();
        let (mut pp, mut pg, mut mp, mut mg) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        let mut hits = 0usize;
        for &e in quasienergies {
            let (ip, gp) = nearest(e + shift);
            let (im, gm) = nearest(e - shift);
            if gp < tolerance && gm < tolerance {
                hits += 1;
            }
            pp.push(ip);
            pg.push(gp);
            mp.push(im);
            mg.push(gm);
        }
        Ok(QuadrupletReport {
            quasienergies: quasienergies.to_vec(),
            plus_partner: pp,
            plus_gap: pg,
            minus_partner: mp,
            minus_gap: mg,
            tolerance,
            fraction: hits as f64 / n as f64,
        })
    }

    /// Columns `epsilon, plus_gap, minus_gap`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "epsilon,plus_gap,minus_gap")?;
        for j in 0..self.quasienergies.len() {
            writeln!(
                w,
                "{},{},{}",
                self.quasienergies[j], self.plus_gap[j], self.minus_gap[j]
            )?;
        }
        Ok(())
    }
}

/// `0.02 * pi / 2` in units of `1/T`.
pub fn default_quadruplet_tolerance<T: Real>(period: T) -> T {
    T::lit(0.02) * T::FRAC_PI_2() / period
}

pub fn quadruplet_analysis<T: EdReal>(
    spectrum: &FloquetSpectrum<T>,
    tolerance: T,
) -> Result<QuadrupletReport<T>> {
    QuadrupletReport::from_quasienergies(&spectrum.quasienergies, spectrum.period, tolerance)
}

/// `sigma^z` eigenvalue (+1 for bit 0) of chain index `q` in basis state `x`.
#[inline]
fn z_sign(x: usize, q: usize) -> i32 {
    1 - 2 * ((x >> q) & 1) as i32
}

/// Eigenstate-averaged squared `zz` correlator over all unordered pairs of distinct sites.
pub fn chi_zz<T: EdReal>(spectrum: &FloquetSpectrum<T>) -> T {
    let dim = spectrum.dim();
    let n = spectrum.n_qubits();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = (0..dim)
        .into_par_iter()
        .map(|col| {
            let v = spectrum.eigenvectors.column(col);
            let probs: Vec<T> = v.iter().map(|a| a.norm_sqr()).collect();
            pairs
                .iter()
                .map(|&(i, j)| {
                    let e = probs.iter().enumerate().fold(T::zero(), |s, (x, &p)| {
                        if z_sign(x, i) * z_sign(x, j) > 0 {
                            s + p
                        } else {
                            s - p
                        }
                    });
                    e * e
                })
                .fold(T::zero(), |a, b| a + b)
        })
        .reduce(T::zero, |a, b| a + b);
    total / (T::from_usize_lossy(pairs.len()) * T::from_usize_lossy(dim))
}

/// Diagonal of `sigma^z_{a,0} + i sigma^z_{b,0}`.
pub fn spin_probe_operator<T: Real>(n_qubits: usize) -> Vec<C<T>> {
    let (qa, qb) = (SiteIndex::a(0).chain_index(), SiteIndex::b(0).chain_index());
    (0..1usize << n_qubits)
        .map(|x| C::new(T::lit(z_sign(x, qa) as f64), T::lit(z_sign(x, qb) as f64)))
        .collect()
}

/// `12` eigenstates for `N = 4`, `32` otherwise (at most `dim`).
pub fn default_sample_size(n_qubits: usize) -> usize {
    let size = if n_qubits == 4 { 12 } else { 32 };
    size.min(1usize << n_qubits)
}

/// Seeded uniform sample of distinct eigenstate indices.
pub fn sample_eigenstates(dim: usize, size: usize, seed: u64) -> Result<Vec<usize>> {
    if size == 0 || size > dim {
        return Err(invalid("sample_size", format!("need 1..={dim}, got {size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = rand::seq::index::sample(&mut rng, dim, size).into_vec();
    v.sort_unstable();
    Ok(v)
}

/// `0.05 pi / T`.
pub fn default_delta<T: Real>(period: T) -> T {
    T::lit(0.05) * T::PI() / period
}

/// Share of the matrix-element weight `|<n|O|m>|^2` of the sampled `n` that
/// connects states with `eps_n - eps_m = pi/(2T)` (mod `2 pi/T`) within `delta`.
pub fn s_pi_half<T: EdReal>(
    spectrum: &FloquetSpectrum<T>,
    operator_diagonal: &[C<T>],
    delta: T,
    sample: &[usize],
) -> Result<T> {
    let dim = spectrum.dim();
    if operator_diagonal.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: operator_diagonal.len(),
        });
    }
    if sample.is_empty() {
        return Err(Error::Empty("eigenstate sample"));
    }
    if let Some(&bad) = sample.iter().find(|&&n| n >= dim) {
        return Err(invalid(
            "sample",
            format!("eigenstate index {bad} out of range {dim}"),
        ));
    }
    let period = spectrum.period;
    if !(delta > T::zero() && delta < T::FRAC_PI_4() / period) {
        return Err(invalid("delta", format!("must lie in (0, pi/4T), got {delta}")));
    }
    let q = &spectrum.eigenvectors;
    let eps = &spectrum.quasienergies;
    let shift = T::FRAC_PI_2() / period;
    let (num, den) = sample
        .par_iter()
        .map(|&n| {
            let w = DVector::from_fn(dim, |x, _| q[(x, n)].conj() * operator_diagonal[x]);
            // elements[m] = <n|O|m>
            let elements = q.tr_mul(&w);
            let mut num = T::zero();
            let mut den = T::zero();
            for m in 0..dim {
                let weight = elements[m].norm_sqr();
                den = den + weight;
                if Float::abs(fold_quasienergy(eps[n] - eps[m] - shift, period)) <= delta {
                    num = num + weight;
                }
            }
            (num, den)
        })
        .reduce(|| (T::zero(), T::zero()), |a, b| (a.0 + b.0, a.1 + b.1));
    if den == T::zero() {
        return Ok(T::zero());
    }
    Ok(num / den)
}

/// Mean `<sigma^z_{i,a}>` of `U^k |up...up>` for `k = 0 ..= n_periods`.
pub fn dense_stroboscopic_series<T: EdReal>(u: &DMatrix<C<T>>, n_periods: usize) -> Result<Vec<T>> {
    let dim = u.nrows();
    let n = dim.trailing_zeros() as usize;
    let mut psi = DVector::from_element(dim, c_re(T::zero()));
    psi[0] = c_re(T::one());
    let mut out = Vec::with_capacity(n_periods + 1);
    let sz = |psi: &DVector<C<T>>| -> Result<T> {
        let s = StateVector::from_amplitudes(psi.as_slice().to_vec())?;
        let prof = s.z_profile();
        let a: Vec<T> = prof.into_iter().step_by(2).collect();
        Ok(a.iter().fold(T::zero(), |s, &x| s + x) / T::from_usize_lossy(n / 2))
    };
    out.push(sz(&psi)?);
    for _ in 0..n_periods {
        psi = u * psi;
        out.push(sz(&psi)?);
    }
    Ok(out)
}

/// Spectrum of the `n_periods`-period dense-unitary dynamics for each ladder size.
pub fn eigen_power_spectrum_scaling<T: EdReal>(
    params: &ModelParams<T>,
    n_rungs_list: &[usize],
    n_periods: usize,
    schedule: &TrotterSchedule<T>,
) -> Result<Vec<(usize, PowerSpectrum<T>)>> {
    n_rungs_list
        .iter()
        .map(|&n0| {
            let p = ModelParams::new(params.h, params.j, params.m, params.period, n0)?;
            check_ed_size(p.n_sites())?;
            let u = build_floquet_unitary(&p.clean(), schedule)?;
            let series = dense_stroboscopic_series(&u, n_periods)?;
            Ok((p.n_sites(), power_spectrum(&series[1..])?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow<T> {
    pub n_sites: usize,
    pub chi_zz: T,
    pub s_pi_half: T,
}

/// `chi_zz` and `s_pi_half` (default sample size, seeded) per ladder size.
pub fn finite_size_scaling<T: EdReal>(
    params: &ModelParams<T>,
    n_rungs_list: &[usize],
    schedule: &TrotterSchedule<T>,
    delta: T,
    seed: u64,
) -> Result<Vec<ScalingRow<T>>> {
    n_rungs_list
        .iter()
        .map(|&n0| {
            let p = ModelParams::new(params.h, params.j, params.m, params.period, n0)?;
            check_ed_size(p.n_sites())?;
            let u = build_floquet_unitary(&p.clean(), schedule)?;
            let spec = diagonalize(&u, p.period)?;
            let n = p.n_sites();
            let sample = sample_eigenstates(spec.dim(), default_sample_size(n), seed)?;
            Ok(ScalingRow {
                n_sites: n,
                chi_zz: chi_zz(&spec),
                s_pi_half: s_pi_half(&spec, &spin_probe_operator(n), delta, &sample)?,
            })
        })
        .collect()
}

/// Columns `N, chi_zz, s_pi_half`.
pub fn write_scaling_csv<T: Real, W: Write>(rows: &[ScalingRow<T>], mut w: W) -> Result<()> {
    writeln!(w, "N,chi_zz,s_pi_half")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.n_sites, r.chi_zz, r.s_pi_half)?;
    }
    Ok(())
}
