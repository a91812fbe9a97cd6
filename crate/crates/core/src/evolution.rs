//! Stroboscopic time evolution of the driven ladder.
//!
//! One period is a first-order Trotterized first half (all `zz` bonds, then
//! all rungs, per step) followed by an exact `Rx` rotation on every b-site.
//! The time-dependent `yy` coefficient is sampled at each step's start.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{two_site_expm, Mat2, Pauli};
use crate::model::{yy_modulation, DisorderedParams, SiteIndex};
use crate::scalar::{cis, Real, C};
use crate::statevector::{GateOp, StateVector};

/// Where in each step the `cos(omega t)` coefficient is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSampling {
    #[default]
    StepStart,
    Midpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    /// `zz` then rung exponentials per step.
    #[default]
    FirstOrder,
    /// Symmetric `zz/2, rung, zz/2` per step.
    Strang,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrotterSchedule<T> {
    /// Effective step; `steps_per_half * dt == T/2`.
    pub dt: T,
    pub requested_dt: T,
    pub steps_per_half: usize,
    pub sampling: TimeSampling,
    pub splitting: Splitting,
}

impl<T: Real> TrotterSchedule<T> {
    /// The step is shrunk, if necessary, so that `T/2` holds an integer number of steps.
    pub fn new(period: T, requested_dt: T) -> Result<Self> {
        if !(requested_dt > T::zero()) || !requested_dt.is_finite() {
            return Err(invalid(
                "dt",
                format!("time step must be positive, got {requested_dt}"),
            ));
        }
        if !(period > T::zero()) {
            return Err(invalid("T", format!("period must be positive, got {period}")));
        }
        let half = period / T::lit(2.0);
        let ratio = (half / requested_dt).to_f64_lossy();
        let steps = (ratio - 1e-9).ceil().max(1.0) as usize;
        Ok(TrotterSchedule {
            dt: half / T::from_usize_lossy(steps),
            requested_dt,
            steps_per_half: steps,
            sampling: TimeSampling::StepStart,
            splitting: Splitting::FirstOrder,
        })
    }

    /// `dt = 0.01 T`.
    pub fn default_for(period: T) -> Self {
        Self::new(period, period * T::lit(0.01)).expect("positive period")
    }

    pub fn with_sampling(mut self, sampling: TimeSampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_splitting(mut self, splitting: Splitting) -> Self {
        self.splitting = splitting;
        self
    }

    /// True when `dt` differs from the requested step.
    pub fn was_adjusted(&self) -> bool {
        (self.dt - self.requested_dt).abs() > T::epsilon() * self.requested_dt * T::lit(8.0)
    }

    /// Time at which step `n` samples the `yy` modulation.
    pub fn sample_time(&self, n: usize) -> T {
        let start = T::from_usize_lossy(n) * self.dt;
        match self.sampling {
            TimeSampling::StepStart => start,
            TimeSampling::Midpoint => start + self.dt / T::lit(2.0),
        }
    }
}

fn check_sites<T: Real>(state: &StateVector<T>, dp: &DisorderedParams<T>) -> Result<()> {
    if state.n_qubits() != dp.n_sites() {
        return Err(crate::Error::DimensionMismatch {
            expected: dp.n_sites(),
            found: state.n_qubits(),
        });
    }
    Ok(())
}

/// `exp(+i dt J_i Z Z)` on every a-chain bond, even bonds before odd bonds.
pub fn bond_gates<T: Real>(dp: &DisorderedParams<T>, dt: T) -> Vec<GateOp<T>> {
    let bonds = dp.j.len();
    (0..bonds)
        .step_by(2)
        .chain((1..bonds).step_by(2))
        .map(|i| {
            GateOp::two(
                SiteIndex::a(i).chain_index(),
                SiteIndex::a(i + 1).chain_index(),
                two_site_expm(T::zero(), T::zero(), dp.j[i], dt),
            )
        })
        .collect()
}

/// `exp(+i dt (h_i/2)(XX - (1 + cos omega t) YY))` on every rung.
pub fn rung_gates<T: Real>(dp: &DisorderedParams<T>, t: T, dt: T) -> Vec<GateOp<T>> {
    let yy = yy_modulation(dp.omega, t);
    dp.h.iter()
        .enumerate()
        .map(|(i, &h)| {
            let half_h = h / T::lit(2.0);
            GateOp::two(
                SiteIndex::a(i).chain_index(),
                SiteIndex::b(i).chain_index(),
                two_site_expm(half_h, -half_h * yy, T::zero(), dt),
            )
        })
        .collect()
}

/// `exp(-i (M_i T/2) X)` on every b-site.
pub fn field_gates<T: Real>(dp: &DisorderedParams<T>) -> Vec<GateOp<T>> {
    let half = dp.period / T::lit(2.0);
    dp.m.iter()
        .enumerate()
        .map(|(i, &m)| {
            GateOp::one(
                SiteIndex::b(i).chain_index(),
                Mat2::exp_i_pauli(-m * half, Pauli::X),
            )
        })
        .collect()
}

pub fn first_half_step<T: Real>(
    state: &StateVector<T>,
    dp: &DisorderedParams<T>,
    t_within_period: T,
    dt: T,
) -> Result<StateVector<T>> {
    check_sites(state, dp)?;
    if t_within_period < T::zero() || t_within_period >= dp.period / T::lit(2.0) {
        return Err(invalid(
            "t",
            format!("{t_within_period} outside the first half period"),
        ));
    }
    let mut out = state.clone();
    out.apply_gates(&bond_gates(dp, dt))?;
    out.apply_gates(&rung_gates(dp, t_within_period, dt))?;
    Ok(out)
}

pub fn second_half<T: Real>(state: &StateVector<T>, dp: &DisorderedParams<T>) -> Result<StateVector<T>> {
    check_sites(state, dp)?;
    let mut out = state.clone();
    out.apply_gates(&field_gates(dp))?;
    Ok(out)
}

pub fn floquet_cycle<T: Real>(
    state: &StateVector<T>,
    dp: &DisorderedParams<T>,
    schedule: &TrotterSchedule<T>,
) -> Result<StateVector<T>> {
    check_sites(state, dp)?;
    let program = CycleProgram::new(dp, schedule)?;
    let mut out = state.clone();
    program.apply(&mut out);
    Ok(out)
}

/// The explicit gate list of one period: per step the bond gates then the
/// rung gates (bonds at half step on both sides for Strang splitting),
/// followed by the field rotations.
pub fn cycle_gate_sequence<T: Real>(
    dp: &DisorderedParams<T>,
    schedule: &TrotterSchedule<T>,
) -> Vec<GateOp<T>> {
    let mut gates = Vec::new();
    let half_dt = schedule.dt / T::lit(2.0);
    for n in 0..schedule.steps_per_half {
        let rungs = rung_gates(dp, schedule.sample_time(n), schedule.dt);
        match schedule.splitting {
            Splitting::FirstOrder => {
                gates.extend(bond_gates(dp, schedule.dt));
                gates.extend(rungs);
            }
            Splitting::Strang => {
                gates.extend(bond_gates(dp, half_dt));
                gates.extend(rungs);
                gates.extend(bond_gates(dp, half_dt));
            }
        }
    }
    gates.extend(field_gates(dp));
    gates
}

/// One period precompiled for repeated application.
///
/// All `zz` bonds are diagonal and mutually commuting, so each step's bond
/// layer is a single pass with a precomputed phase vector.
#[derive(Clone, Debug)]
pub struct CycleProgram<T> {
    n_qubits: usize,
    splitting: Splitting,
    /// `exp(i dt' sum_b J_b z z)` with `dt' = dt` (first order) or `dt/2` (Strang); `None` if every `J_b = 0`.
    bond_phases: Option<Vec<C<T>>>,
    rung_layers: Vec<Vec<GateOp<T>>>,
    fields: Vec<GateOp<T>>,
}

impl<T: Real> CycleProgram<T> {
    pub fn new(dp: &DisorderedParams<T>, schedule: &TrotterSchedule<T>) -> Result<Self> {
        let n = dp.n_sites();
        // Validates the register size.
        let probe = StateVector::<T>::all_up(n)?;
        drop(probe);
        let bond_dt = match schedule.splitting {
            Splitting::FirstOrder => schedule.dt,
            Splitting::Strang => schedule.dt / T::lit(2.0),
        };
        let bond_phases =
            dp.j.iter()
                .any(|&j| j != T::zero())
                .then(|| bond_phase_vector(dp, bond_dt));
        let rung_layers = (0..schedule.steps_per_half)
            .map(|k| rung_gates(dp, schedule.sample_time(k), schedule.dt))
            .collect();
        Ok(CycleProgram {
            n_qubits: n,
            splitting: schedule.splitting,
            bond_phases,
            rung_layers,
            fields: field_gates(dp),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Applies the first half period only.
    pub fn apply_first_half(&self, state: &mut StateVector<T>) {
        assert_eq!(state.n_qubits(), self.n_qubits, "register size mismatch");
        let bonds = |s: &mut StateVector<T>| {
            if let Some(p) = &self.bond_phases {
                s.apply_diagonal(p).expect("phase vector sized to register");
            }
        };
        for layer in &self.rung_layers {
            bonds(state);
            layer.iter().for_each(|g| state.apply_unchecked(g));
            if self.splitting == Splitting::Strang {
                bonds(state);
            }
        }
    }

    pub fn apply_second_half(&self, state: &mut StateVector<T>) {
        assert_eq!(state.n_qubits(), self.n_qubits, "register size mismatch");
        self.fields.iter().for_each(|g| state.apply_unchecked(g));
    }

    /// Applies one full period in place.
    pub fn apply(&self, state: &mut StateVector<T>) {
        self.apply_first_half(state);
        self.apply_second_half(state);
    }
}

fn bond_phase_vector<T: Real>(dp: &DisorderedParams<T>, dt: T) -> Vec<C<T>> {
    let n = dp.n_sites();
    let bonds: Vec<(usize, usize, T)> =
        dp.j.iter()
            .enumerate()
            .map(|(i, &j)| {
                (
                    SiteIndex::a(i).chain_index(),
                    SiteIndex::a(i + 1).chain_index(),
                    j,
                )
            })
            .collect();
    let phase = |idx: usize| {
        let e = bonds.iter().fold(T::zero(), |acc, &(p, q, j)| {
            if ((idx >> p) ^ (idx >> q)) & 1 == 0 {
                acc + j
            } else {
                acc - j
            }
        });
        cis(dt * e)
    };
    (0..1usize << n).into_par_iter().map(phase).collect()
}

/// Second-order reference propagator: Strang splitting with midpoint sampling.
pub fn reference_cycle<T: Real>(dp: &DisorderedParams<T>, fine_dt: T) -> Result<CycleProgram<T>> {
    let schedule = TrotterSchedule::new(dp.period, fine_dt)?
        .with_sampling(TimeSampling::Midpoint)
        .with_splitting(Splitting::Strang);
    CycleProgram::new(dp, &schedule)
}

/// Stroboscopic magnetization record for `k = 0 ..= n_periods`.
#[derive(Clone, Debug, PartialEq)]
pub struct StroboscopicRecord<T> {
    pub times: Vec<T>,
    /// `per_site_z[k][i] = <sigma^z_{i,a}>(kT)`.
    pub per_site_z: Vec<Vec<T>>,
    /// `<sigma^z_{i,b}>(kT)`.
    pub per_site_z_b: Vec<Vec<T>>,
    /// Mean over the a-chain of `per_site_z[k]`.
    pub global_sz: Vec<T>,
}

impl<T: Real> StroboscopicRecord<T> {
    fn with_capacity(n: usize) -> Self {
        StroboscopicRecord {
            times: Vec::with_capacity(n),
            per_site_z: Vec::with_capacity(n),
            per_site_z_b: Vec::with_capacity(n),
            global_sz: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: T, state: &StateVector<T>) {
        let profile = state.z_profile();
        let a: Vec<T> = profile.iter().step_by(2).copied().collect();
        let b: Vec<T> = profile.iter().skip(1).step_by(2).copied().collect();
        let mean = a.iter().fold(T::zero(), |s, &x| s + x) / T::from_usize_lossy(a.len());
        self.times.push(t);
        self.per_site_z.push(a);
        self.per_site_z_b.push(b);
        self.global_sz.push(mean);
    }

    pub fn n_periods(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    /// `<S_z>(kT)` for `k = 1 ..= n_periods`.
    pub fn spectrum_series(&self) -> &[T] {
        &self.global_sz[1..]
    }

    /// Columns `k, t, Sz, sz_site_0 .. sz_site_{N0-1}`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let n0 = self.per_site_z.first().map_or(0, Vec::len);
        let mut header = String::from("k,t,Sz");
        (0..n0).for_each(|i| header.push_str(&format!(",sz_site_{i}")));
        writeln!(w, "{header}")?;
        for (k, ((t, sz), row)) in self
            .times
            .iter()
            .zip(&self.global_sz)
            .zip(&self.per_site_z)
            .enumerate()
        {
            let mut line = format!("{k},{t},{sz}");
            row.iter().for_each(|x| line.push_str(&format!(",{x}")));
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Evolves the all-up state for `n_periods` periods, recording `k = 0 ..= n_periods`.
pub fn evolve_stroboscopic<T: Real>(
    dp: &DisorderedParams<T>,
    schedule: &TrotterSchedule<T>,
    n_periods: usize,
) -> Result<StroboscopicRecord<T>> {
    let program = CycleProgram::new(dp, schedule)?;
    evolve_with_program(StateVector::all_up(dp.n_sites())?, &program, dp.period, n_periods)
}

pub fn evolve_with_program<T: Real>(
    mut state: StateVector<T>,
    program: &CycleProgram<T>,
    period: T,
    n_periods: usize,
) -> Result<StroboscopicRecord<T>> {
    if n_periods == 0 {
        return Err(invalid("n_periods", "need at least one period"));
    }
    if state.n_qubits() != program.n_qubits() {
        return Err(crate::Error::DimensionMismatch {
            expected: program.n_qubits(),
            found: state.n_qubits(),
        });
    }
    let mut rec = StroboscopicRecord::with_capacity(n_periods + 1);
    rec.push(T::zero(), &state);
    for k in 1..=n_periods {
        program.apply(&mut state);
        rec.push(T::from_usize_lossy(k) * period, &state);
    }
    Ok(rec)
}

/// States `U^k |up...up>` for `k = 0 ..= n_periods`.
pub fn stroboscopic_states<T: Real>(
    dp: &DisorderedParams<T>,
    schedule: &TrotterSchedule<T>,
    n_periods: usize,
) -> Result<Vec<StateVector<T>>> {
    let program = CycleProgram::new(dp, schedule)?;
    let mut state = StateVector::all_up(dp.n_sites())?;
    let mut out = Vec::with_capacity(n_periods + 1);
    out.push(state.clone());
    for _ in 0..n_periods {
        program.apply(&mut state);
        out.push(state.clone());
    }
    Ok(out)
}
