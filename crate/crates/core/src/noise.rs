//! Gate-level noisy execution by stochastic Pauli trajectories, shot-based
//! magnetization estimates and tensored readout mitigation.
//!
//! Every trajectory yields one shot. After each gate a uniformly random
//! non-identity Pauli string is applied on the gate's support with the
//! gate's error probability; the final state is sampled in the z basis and
//! each bit is then flipped according to its qubit's confusion matrix.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::evolution::{cycle_gate_sequence, stroboscopic_states, TrotterSchedule};
use crate::linalg::{LocalOperator, Pauli};
use crate::model::DisorderedParams;
use crate::observables::{power_spectrum, subharmonic_peak};
use crate::recompile::routing::{is_nearest_neighbour, route_circuit};
use crate::recompile::table::ParameterTable;
use crate::recompile::AnsatzCircuit;
use crate::statevector::{GateOp, StateVector};

pub const DEFAULT_SHOTS: usize = 4000;
pub const DEFAULT_TWO_QUBIT_RATIO: f64 = 10.0;
/// Trotter step of the noisy circuits as a fraction of `T`.
pub const DEFAULT_NOISY_DT_FRACTION: f64 = 0.1;
pub const MAX_NOISY_QUBITS: usize = 16;

/// `[[p(0|0), p(0|1)], [p(1|0), p(1|1)]]`: row = recorded bit, column = true bit.
pub type Confusion = [[f64; 2]; 2];

pub const IDEAL_READOUT: Confusion = [[1.0, 0.0], [0.0, 1.0]];

/// Symmetric binary channel flipping either bit with probability `p`.
pub fn symmetric_confusion(p: f64) -> Confusion {
    [[1.0 - p, p], [p, 1.0 - p]]
}

const CALIBRATION_MAGIC: &str = "# dtc4 readout calibration v1";
const SINGULAR_DET: f64 = 1e-12;
const COLUMN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub r1: f64,
    pub r2: f64,
    /// Per-qubit confusion matrices; empty means perfect readout on every qubit.
    #[serde(default)]
    pub readout: Vec<Confusion>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::ideal()
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        NoiseModel {
            r1: 0.0,
            r2: 0.0,
            readout: Vec::new(),
        }
    }

    /// Gate noise only, with `r2 = 10 r1`.
    pub fn depolarizing(r1: f64) -> Self {
        NoiseModel {
            r1,
            r2: DEFAULT_TWO_QUBIT_RATIO * r1,
            readout: Vec::new(),
        }
    }

    pub fn with_readout(mut self, readout: Vec<Confusion>) -> Self {
        self.readout = readout;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("r1", self.r1), ("r2", self.r2)] {
            if !(0.0..1.0).contains(&r) {
                return Err(invalid(name, format!("{r} outside [0, 1)")));
            }
        }
        for (q, m) in self.readout.iter().enumerate() {
            check_confusion(q, m)?;
        }
        Ok(())
    }

    pub fn confusion(&self, qubit: usize) -> Confusion {
        self.readout.get(qubit).copied().unwrap_or(IDEAL_READOUT)
    }

    pub fn has_readout_error(&self) -> bool {
        self.readout.iter().any(|m| *m != IDEAL_READOUT)
    }

    fn rate<T>(&self, gate: &GateOp<T>) -> f64 {
        match gate {
            LocalOperator::One { .. } => self.r1,
            LocalOperator::Two { .. } => self.r2,
        }
    }
}

fn check_confusion(qubit: usize, m: &Confusion) -> Result<()> {
    let entries_ok = m
        .iter()
        .flatten()
        .all(|p| p.is_finite() && (0.0..=1.0).contains(p));
    let columns_ok = (0..2).all(|c| (m[0][c] + m[1][c] - 1.0).abs() <= COLUMN_TOL);
    if entries_ok && columns_ok {
        Ok(())
    } else {
        Err(invalid(
            "readout",
            format!("confusion matrix of qubit {qubit} is not column-stochastic: {m:?}"),
        ))
    }
}

/// Bitstring counts; bit `q` of a key is the recorded outcome of qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub n_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub n_shots: usize,
}

impl ShotRecord {
    pub fn from_outcomes(n_qubits: usize, outcomes: &[u64]) -> Self {
        let mut counts = BTreeMap::new();
        for &o in outcomes {
            *counts.entry(o).or_insert(0) += 1;
        }
        ShotRecord {
            n_qubits,
            counts,
            n_shots: outcomes.len(),
        }
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Shots recording `0` and `1` on `qubit`.
    pub fn marginal(&self, qubit: usize) -> Result<[u64; 2]> {
        self.check_qubit(qubit)?;
        let ones: u64 = self
            .counts
            .iter()
            .filter(|(b, _)| (*b >> qubit) & 1 == 1)
            .map(|(_, n)| n)
            .sum();
        Ok([self.n_shots as u64 - ones, ones])
    }
}

/// `(#0 - #1) / n_shots` on `qubit`.
pub fn magnetization_from_shots(record: &ShotRecord, qubit: usize) -> Result<f64> {
    if record.n_shots == 0 {
        return Err(Error::Empty("shot record"));
    }
    let [zeros, ones] = record.marginal(qubit)?;
    Ok((zeros as f64 - ones as f64) / record.n_shots as f64)
}

fn invert(qubit: usize, m: &Confusion) -> Result<Confusion> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < SINGULAR_DET || !det.is_finite() {
        return Err(Error::SingularCalibration(qubit));
    }
    Ok([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

/// Mitigated `<sigma^z>` of every qubit: the inverse confusion matrix is
/// applied to each single-qubit marginal and the result clipped to `[-1, 1]`.
/// Qubits beyond `confusion.len()` are treated as ideal.
pub fn mitigate_readout(record: &ShotRecord, confusion: &[Confusion]) -> Result<Vec<f64>> {
    if record.n_shots == 0 {
        return Err(Error::Empty("shot record"));
    }
    (0..record.n_qubits)
        .map(|q| {
            let inv = invert(q, confusion.get(q).unwrap_or(&IDEAL_READOUT))?;
            let [zeros, ones] = record.marginal(q)?;
            let n = record.n_shots as f64;
            let raw = [zeros as f64 / n, ones as f64 / n];
            let t0 = inv[0][0] * raw[0] + inv[0][1] * raw[1];
            let t1 = inv[1][0] * raw[0] + inv[1][1] * raw[1];
            Ok((t0 - t1).clamp(-1.0, 1.0))
        })
        .collect()
}

pub fn write_calibration<W: Write>(confusion: &[Confusion], mut w: W) -> Result<()> {
    writeln!(w, "{CALIBRATION_MAGIC}")?;
    writeln!(w, "# qubit p(0|0) p(0|1) p(1|0) p(1|1)")?;
    for (q, m) in confusion.iter().enumerate() {
        writeln!(w, "{q} {:?} {:?} {:?} {:?}", m[0][0], m[0][1], m[1][0], m[1][1])?;
    }
    Ok(())
}

/// Reads `qubit p(0|0) p(0|1) p(1|0) p(1|1)` lines; `#` starts a comment.
/// Qubits must appear exactly once each, as `0 .. n`.
pub fn read_calibration<R: BufRead>(r: R) -> Result<Vec<Confusion>> {
    let mut rows: BTreeMap<usize, Confusion> = BTreeMap::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let parse_err = |reason: String| Error::Parse { line: i + 1, reason };
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(parse_err(format!("expected 5 fields, found {}", fields.len())));
        }
        let q: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(format!("qubit index: {e}")))?;
        let mut p = [0.0; 4];
        for (slot, f) in p.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|e| parse_err(format!("probability `{f}`: {e}")))?;
        }
        let m = [[p[0], p[1]], [p[2], p[3]]];
        check_confusion(q, &m).map_err(|e| parse_err(e.to_string()))?;
        if rows.insert(q, m).is_some() {
            return Err(parse_err(format!("qubit {q} listed twice")));
        }
    }
    if rows.is_empty() {
        return Err(Error::Empty("calibration file"));
    }
    if rows.keys().enumerate().any(|(i, &q)| i != q) {
        return Err(invalid("calibration", "qubit indices must be contiguous from 0"));
    }
    Ok(rows.into_values().collect())
}

fn check_circuit(circuit: &[GateOp<f64>], n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(invalid("n_qubits", "need at least one qubit"));
    }
    if n_qubits > MAX_NOISY_QUBITS {
        return Err(Error::ResourceCap {
            what: "noisy execution",
            requested: n_qubits,
            cap: MAX_NOISY_QUBITS,
        });
    }
    for g in circuit {
        for q in g.support() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if let LocalOperator::Two { qubits: [a, b], .. } = *g {
            if a == b {
                return Err(Error::OverlappingSupport(vec![a, b]));
            }
            if !is_nearest_neighbour(g) {
                return Err(Error::UnroutedGate(a, b));
            }
        }
    }
    Ok(())
}

fn pauli_gate(qubit: usize, p: Pauli) -> GateOp<f64> {
    GateOp::one(qubit, p.matrix::<f64>())
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// Applies Pauli string `code` in `1 .. 4^len` on `support` (base-4 digits, first qubit lowest).
fn apply_pauli_error(state: &mut StateVector<f64>, support: &[usize], code: usize) {
    for (i, &q) in support.iter().enumerate() {
        let p = PAULIS[(code >> (2 * i)) & 3];
        if p != Pauli::I {
            state.apply_unchecked(&pauli_gate(q, p));
        }
    }
}

fn cumulative(state: &StateVector<f64>) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect()
}

fn sample_index(cdf: &[f64], u: f64) -> usize {
    let u = u * cdf.last().copied().unwrap_or(1.0);
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

fn apply_readout(bits: u64, noise: &NoiseModel, n_qubits: usize, rng: &mut ChaCha8Rng) -> u64 {
    if noise.readout.is_empty() {
        return bits;
    }
    let mut out = bits;
    for q in 0..n_qubits {
        let m = noise.confusion(q);
        let truth = ((bits >> q) & 1) as usize;
        let flip_p = m[1 - truth][truth];
        let u: f64 = rng.random();
        if u < flip_p {
            out ^= 1 << q;
        }
    }
    out
}

/// Noise-free reference states at every checkpoint.
struct Reference {
    states: Vec<StateVector<f64>>,
    cdfs: Vec<Vec<f64>>,
}

fn reference(circuit: &[GateOp<f64>], n_qubits: usize, checkpoints: &[usize]) -> Result<Reference> {
    let mut s = StateVector::all_up(n_qubits)?;
    let mut pos = 0;
    let mut states = Vec::with_capacity(checkpoints.len());
    for &c in checkpoints {
        circuit[pos..c].iter().for_each(|g| s.apply_unchecked(g));
        pos = c;
        states.push(s.clone());
    }
    let cdfs = states.iter().map(cumulative).collect();
    Ok(Reference { states, cdfs })
}

/// One trajectory, measured at every checkpoint.
fn trajectory(
    circuit: &[GateOp<f64>],
    n_qubits: usize,
    checkpoints: &[usize],
    reference: &Reference,
    noise: &NoiseModel,
    mut rng: ChaCha8Rng,
) -> Vec<u64> {
    let last = checkpoints.last().copied().unwrap_or(0);
    let mut errors: Vec<(usize, usize)> = Vec::new();
    for (i, g) in circuit[..last].iter().enumerate() {
        let r = noise.rate(g);
        if r > 0.0 && rng.random::<f64>() < r {
            let n_strings = 1usize << (2 * g.support().len());
            errors.push((i, rng.random_range(1..n_strings)));
        }
    }
    let first_error = errors.first().map_or(usize::MAX, |e| e.0);
    let mut noisy: Option<(StateVector<f64>, usize)> = None;
    let mut next_error = 0;
    let mut out = Vec::with_capacity(checkpoints.len());
    for (ci, &c) in checkpoints.iter().enumerate() {
        let bits = if first_error >= c {
            sample_index(&reference.cdfs[ci], rng.random()) as u64
        } else {
            let (state, pos) = noisy.get_or_insert_with(|| {
                // Resume from the last noise-free checkpoint before the first error.
                match checkpoints.iter().rposition(|&p| p <= first_error) {
                    Some(j) => (reference.states[j].clone(), checkpoints[j]),
                    None => (StateVector::all_up(n_qubits).expect("validated size"), 0),
                }
            });
            while next_error < errors.len() && errors[next_error].0 < *pos {
                next_error += 1;
            }
            for (i, g) in circuit.iter().enumerate().take(c).skip(*pos) {
                state.apply_unchecked(g);
                if next_error < errors.len() && errors[next_error].0 == i {
                    apply_pauli_error(state, &g.support(), errors[next_error].1);
                    next_error += 1;
                }
            }
            *pos = c;
            sample_index(&cumulative(state), rng.random()) as u64
        };
        out.push(apply_readout(bits, noise, n_qubits, &mut rng));
    }
    out
}

/// Runs `n_shots` trajectories of `circuit` from the all-up state and
/// records one shot per trajectory after each prefix `circuit[..c]`,
/// `c` in `checkpoints` (strictly increasing).
///
/// Each checkpoint's record has the exact statistics of executing that prefix
/// alone; records of different checkpoints share trajectories and are therefore
/// correlated. Trajectory `t` draws from ChaCha8 seeded with `seed`, stream `t`.
pub fn noisy_execute_checkpoints(
    circuit: &[GateOp<f64>],
    n_qubits: usize,
    checkpoints: &[usize],
    noise: &NoiseModel,
    n_shots: usize,
    seed: u64,
) -> Result<Vec<ShotRecord>> {
    noise.validate()?;
    check_circuit(circuit, n_qubits)?;
    if n_shots == 0 {
        return Err(invalid("n_shots", "need at least one shot"));
    }
    if checkpoints.is_empty() {
        return Err(Error::Empty("checkpoint list"));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) || checkpoints.last() > Some(&circuit.len()) {
        return Err(invalid(
            "checkpoints",
            "must be strictly increasing and within the circuit",
        ));
    }
    let reference = reference(circuit, n_qubits, checkpoints)?;
    let shots: Vec<Vec<u64>> = (0..n_shots)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            trajectory(circuit, n_qubits, checkpoints, &reference, noise, rng)
        })
        .collect();
    Ok((0..checkpoints.len())
        .map(|ci| {
            let column: Vec<u64> = shots.iter().map(|s| s[ci]).collect();
            ShotRecord::from_outcomes(n_qubits, &column)
        })
        .collect())
}

/// Shots of the full circuit; see [`noisy_execute_checkpoints`].
pub fn noisy_execute(
    circuit: &[GateOp<f64>],
    n_qubits: usize,
    noise: &NoiseModel,
    n_shots: usize,
    seed: u64,
) -> Result<ShotRecord> {
    let mut r = noisy_execute_checkpoints(circuit, n_qubits, &[circuit.len()], noise, n_shots, seed)?;
    Ok(r.pop().expect("one checkpoint"))
}

/// Estimates every qubit's confusion matrix from the `|0...0>` and
/// `|1...1>` preparation circuits run under `noise`.
pub fn calibrate_readout(
    noise: &NoiseModel,
    n_qubits: usize,
    n_shots: usize,
    seed: u64,
) -> Result<Vec<Confusion>> {
    let flip_all: Vec<GateOp<f64>> = (0..n_qubits).map(|q| pauli_gate(q, Pauli::X)).collect();
    let zeros = noisy_execute(&[], n_qubits, noise, n_shots, sub_seed(seed, 0))?;
    let ones = noisy_execute(&flip_all, n_qubits, noise, n_shots, sub_seed(seed, 1))?;
    let n = n_shots as f64;
    (0..n_qubits)
        .map(|q| {
            let [z0, z1] = zeros.marginal(q)?;
            let [o0, o1] = ones.marginal(q)?;
            Ok([[z0 as f64 / n, o0 as f64 / n], [z1 as f64 / n, o1 as f64 / n]])
        })
        .collect()
}

/// Independent seed for sub-experiment `index` of a run seeded with `seed`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX - index);
    rng.next_u64()
}

/// Shot estimate of `<S_z>` over the a-chain with its standard error.
///
/// Per-qubit readout mitigation uses `noise.readout`; the standard error is
/// that of the raw per-shot a-chain mean, scaled by the mean inverse
/// determinant of the a-chain confusion matrices.
pub fn sz_from_shots(record: &ShotRecord, noise: &NoiseModel) -> Result<(f64, f64)> {
    if record.n_shots == 0 {
        return Err(Error::Empty("shot record"));
    }
    let a_sites: Vec<usize> = (0..record.n_qubits).step_by(2).collect();
    let mitigated = mitigate_readout(record, &noise.readout)?;
    let mean = a_sites.iter().map(|&q| mitigated[q]).sum::<f64>() / a_sites.len() as f64;

    let n = record.n_shots as f64;
    let per_shot = |bits: u64| {
        a_sites
            .iter()
            .map(|&q| if (bits >> q) & 1 == 0 { 1.0 } else { -1.0 })
            .sum::<f64>()
            / a_sites.len() as f64
    };
    let raw_mean = record
        .counts
        .iter()
        .map(|(&b, &c)| per_shot(b) * c as f64)
        .sum::<f64>()
        / n;
    let var = record
        .counts
        .iter()
        .map(|(&b, &c)| (per_shot(b) - raw_mean).powi(2) * c as f64)
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    let gain = a_sites
        .iter()
        .map(|&q| {
            let m = noise.confusion(q);
            1.0 / (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs()
        })
        .sum::<f64>()
        / a_sites.len() as f64;
    Ok((mean, gain * (var / n).sqrt()))
}

/// Shot-estimated `<S_z>(kT)` for `k = 1 ..= n_periods` at one error rate.
#[derive(Clone, Debug, PartialEq)]
pub struct SzSeries {
    pub r: f64,
    pub k: Vec<usize>,
    pub sz_mean: Vec<f64>,
    pub sz_stderr: Vec<f64>,
}

impl SzSeries {
    /// Subharmonic peak of `sz_mean`.
    pub fn peak(&self) -> Result<f64> {
        subharmonic_peak(&power_spectrum(&self.sz_mean)?)
    }

    fn from_records(r: f64, records: &[ShotRecord], noise: &NoiseModel) -> Result<Self> {
        let mut s = SzSeries {
            r,
            k: (1..=records.len()).collect(),
            sz_mean: Vec::with_capacity(records.len()),
            sz_stderr: Vec::with_capacity(records.len()),
        };
        for rec in records {
            let (m, e) = sz_from_shots(rec, noise)?;
            s.sz_mean.push(m);
            s.sz_stderr.push(e);
        }
        Ok(s)
    }
}

/// Columns `k, r, Sz_mean, Sz_stderr`, one block per series.
pub fn write_series_csv<W: Write>(series: &[SzSeries], mut w: W) -> Result<()> {
    writeln!(w, "k,r,Sz_mean,Sz_stderr")?;
    for s in series {
        for ((k, m), e) in s.k.iter().zip(&s.sz_mean).zip(&s.sz_stderr) {
            writeln!(w, "{k},{:?},{m},{e}", s.r)?;
        }
    }
    Ok(())
}

/// Routed nearest-neighbour gate list of `n_periods` Trotterized periods and
/// the gate count at the end of each period.
pub fn trotter_circuit(
    dp: &DisorderedParams<f64>,
    schedule: &TrotterSchedule<f64>,
    n_periods: usize,
) -> Result<(Vec<GateOp<f64>>, Vec<usize>)> {
    if n_periods == 0 {
        return Err(invalid("n_periods", "need at least one period"));
    }
    let cycle = route_circuit(&cycle_gate_sequence(dp, schedule), dp.n_sites())?;
    let mut gates = Vec::with_capacity(cycle.len() * n_periods);
    let mut ends = Vec::with_capacity(n_periods);
    for _ in 0..n_periods {
        gates.extend_from_slice(&cycle);
        ends.push(gates.len());
    }
    Ok((gates, ends))
}

/// Noisy Trotterized `<S_z>(kT)`, `k = 1 ..= n_periods`.
pub fn trotter_noisy_series(
    dp: &DisorderedParams<f64>,
    schedule: &TrotterSchedule<f64>,
    noise: &NoiseModel,
    n_periods: usize,
    n_shots: usize,
    seed: u64,
) -> Result<SzSeries> {
    let (gates, ends) = trotter_circuit(dp, schedule, n_periods)?;
    let records = noisy_execute_checkpoints(&gates, dp.n_sites(), &ends, noise, n_shots, seed)?;
    SzSeries::from_records(noise.r1, &records, noise)
}

/// Trotterized series at each `r1` in `rates` (with `r2 = 10 r1`, perfect readout).
pub fn noise_threshold_study(
    dp: &DisorderedParams<f64>,
    schedule: &TrotterSchedule<f64>,
    rates: &[f64],
    n_periods: usize,
    n_shots: usize,
    seed: u64,
) -> Result<Vec<SzSeries>> {
    if rates.is_empty() {
        return Err(Error::Empty("error-rate list"));
    }
    rates
        .iter()
        .map(|&r| {
            trotter_noisy_series(
                dp,
                schedule,
                &NoiseModel::depolarizing(r),
                n_periods,
                n_shots,
                seed,
            )
        })
        .collect()
}

/// Noisy `<S_z>(kT)` from the fitted circuit of each `k = 1 ..= n_periods`.
pub fn recompiled_noisy_series(
    ansatz: &AnsatzCircuit<f64>,
    table: &ParameterTable,
    noise: &NoiseModel,
    n_periods: usize,
    n_shots: usize,
    seed: u64,
) -> Result<SzSeries> {
    if table.n_qubits != ansatz.n_qubits || table.n_layers != ansatz.n_layers {
        return Err(invalid(
            "parameter table",
            format!(
                "table is for {} qubits / {} layers, ansatz has {} / {}",
                table.n_qubits, table.n_layers, ansatz.n_qubits, ansatz.n_layers
            ),
        ));
    }
    let records = (1..=n_periods)
        .map(|k| {
            let params = table
                .parameters_for(k)
                .ok_or_else(|| invalid("parameter table", format!("no entry for k = {k}")))?;
            let gates = ansatz.gates(params)?;
            noisy_execute(&gates, ansatz.n_qubits, noise, n_shots, sub_seed(seed, k as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    SzSeries::from_records(noise.r1, &records, noise)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub recompiled: SzSeries,
    pub trotter: SzSeries,
}

/// Paired noisy series of the fixed-depth fitted circuits and the
/// linearly deepening Trotter circuits under the same noise model.
#[allow(clippy::too_many_arguments)]
pub fn compare_recompiled_vs_trotter(
    noise: &NoiseModel,
    ansatz: &AnsatzCircuit<f64>,
    table: &ParameterTable,
    dp: &DisorderedParams<f64>,
    schedule: &TrotterSchedule<f64>,
    n_periods: usize,
    n_shots: usize,
    seed: u64,
) -> Result<Comparison> {
    Ok(Comparison {
        recompiled: recompiled_noisy_series(ansatz, table, noise, n_periods, n_shots, seed)?,
        trotter: trotter_noisy_series(dp, schedule, noise, n_periods, n_shots, seed)?,
    })
}

/// Noise-free `<S_z>(kT)`, `k = 1 ..= n_periods`, for the schedule used by the noisy circuits.
pub fn exact_series(
    dp: &DisorderedParams<f64>,
    schedule: &TrotterSchedule<f64>,
    n_periods: usize,
) -> Result<Vec<f64>> {
    let states = stroboscopic_states(dp, schedule, n_periods)?;
    Ok(states[1..]
        .iter()
        .map(|s| {
            let prof = s.z_profile();
            let a: Vec<f64> = prof.into_iter().step_by(2).collect();
            a.iter().sum::<f64>() / a.len() as f64
        })
        .collect())
}

/// Default schedule of the noisy Trotter circuits.
pub fn noisy_schedule(period: f64) -> Result<TrotterSchedule<f64>> {
    TrotterSchedule::new(period, DEFAULT_NOISY_DT_FRACTION * period)
}
