//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed. Positional
//! arguments restrict the run to the listed criteria, e.g.
//! `cargo test --test acceptance -- 1 2`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dtc4::evolution::{
    cycle_gate_sequence, evolve_stroboscopic, reference_cycle, stroboscopic_states, CycleProgram,
    TimeSampling, TrotterSchedule,
};
use dtc4::floquet::{
    build_floquet_unitary, default_delta, default_quadruplet_tolerance, default_sample_size,
    dense_stroboscopic_series, diagonalize, eigen_power_spectrum_scaling, finite_size_scaling,
    max_identity_deviation, quadruplet_analysis, s_pi_half, sample_eigenstates, spin_probe_operator,
};
use dtc4::noise::{
    compare_recompiled_vs_trotter, exact_series, mitigate_readout, noise_threshold_study, noisy_execute,
    noisy_schedule, write_series_csv, Confusion, NoiseModel, DEFAULT_SHOTS,
};
use dtc4::observables::{disorder_averaged_spectrum, phase_diagram_sweep, power_spectrum, subharmonic_peak};
use dtc4::recompile::{
    build_ansatz, recompile_stroboscopic_sequence, recompiled_sz, route_circuit, table_from_steps,
    OptimizerConfig, ParameterTable, DEFAULT_LAYERS,
};
use dtc4::{sample_disorder, DisorderSpec, GateOp, Mat2, ModelParams, ModelParams64, Pauli, StateVector};

type Outcome = (bool, String);

fn angles(ht: f64, jt: f64, mt: f64, n0: usize) -> ModelParams64 {
    ModelParams::from_angles(ht, jt, mt, 1.0, n0).expect("valid parameters")
}

fn default_schedule() -> TrotterSchedule<f64> {
    TrotterSchedule::default_for(1.0)
}

fn within(elapsed: Duration, limit_s: u64) -> (bool, String) {
    let ok = elapsed.as_secs_f64() < limit_s as f64;
    (ok, format!("{:.1} s (limit {limit_s} s)", elapsed.as_secs_f64()))
}

/// `S_z` sign of the period-quadrupled pattern at stroboscopic step `k` (a-chain).
fn pattern_a(k: usize) -> f64 {
    if matches!(k % 4, 1 | 2) {
        -1.0
    } else {
        1.0
    }
}

fn pattern_b(k: usize) -> f64 {
    if matches!(k % 4, 2 | 3) {
        -1.0
    } else {
        1.0
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let sched = default_schedule();
    let mut worst: f64 = 0.0;
    let mut min_return: f64 = 1.0;
    for n0 in 2..=6 {
        let dp = ModelParams::solvable_limit(n0).unwrap().clean();
        let rec = evolve_stroboscopic(&dp, &sched, 8).unwrap();
        for k in 0..=8 {
            for &z in &rec.per_site_z[k] {
                worst = worst.max((z - pattern_a(k)).abs());
            }
            for &z in &rec.per_site_z_b[k] {
                worst = worst.max((z - pattern_b(k)).abs());
            }
        }
        let states = stroboscopic_states(&dp, &sched, 4).unwrap();
        min_return = min_return.min(states[0].inner(&states[4]).unwrap().norm());
    }
    let (fast, time) = within(start.elapsed(), 10);
    (
        worst <= 5e-3 && min_return > 0.995 && fast,
        format!("solvable limit N=4..12: max |<sz> - pattern| = {worst:.2e} (tol 5e-3), min |<psi0|psi(4T)>| = {min_return:.6} (> 0.995), {time}"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let dts = [0.02, 0.01, 0.005, 0.0025];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut slopes = Vec::new();
    for _ in 0..3 {
        let (ht, jt, mt) = (
            rng.random_range(0.85..0.95),
            rng.random_range(0.10..0.20),
            rng.random_range(0.95..1.0),
        );
        let dp = angles(ht, jt, mt, 4).clean();
        let mut reference = StateVector::all_up(8).unwrap();
        reference_cycle(&dp, 1e-4).unwrap().apply(&mut reference);
        let errors: Vec<f64> = dts
            .iter()
            .map(|&dt| {
                let mut s = StateVector::all_up(8).unwrap();
                CycleProgram::new(&dp, &TrotterSchedule::new(1.0, dt).unwrap())
                    .unwrap()
                    .apply(&mut s);
                s.distance(&reference).unwrap()
            })
            .collect();
        let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        slopes.push(num / den);
    }
    let (fast, time) = within(start.elapsed(), 60);
    let ok = slopes.iter().all(|s| (s - 1.0).abs() <= 0.2);
    let shown: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
    (
        ok && fast,
        format!(
            "Trotter log-log slopes (3 random DTC points, N=8) = [{}] (1.0 +- 0.2), {time}",
            shown.join(", ")
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let sched = default_schedule();
    let spectrum = |ht, jt, mt| {
        let rec = evolve_stroboscopic(&angles(ht, jt, mt, 8).clean(), &sched, 20).unwrap();
        power_spectrum(rec.spectrum_series()).unwrap()
    };
    let dtc = spectrum(0.9, 0.16, 0.98);
    let m = dtc.magnitudes();
    let (q, q3) = (m[dtc.quarter_bin()], m[dtc.three_quarter_bin()]);
    let bg = dtc.max_background();
    let dtc_ok = q > 5.0 * bg && q3 > 5.0 * bg;
    let thermal = spectrum(0.52, 0.1, 0.98);
    let thermal_max = thermal.magnitudes()[1..].iter().cloned().fold(0.0, f64::max);
    let free = spectrum(0.9, 0.0, 0.98);
    let free_peak = subharmonic_peak(&free).unwrap();
    let (fast, time) = within(start.elapsed(), 300);
    (
        dtc_ok && thermal_max <= 0.1 && free_peak < 0.1 && fast,
        format!(
            "N=16: DTC peaks pi/2 {q:.4}, 3pi/2 {q3:.4} vs 5 x background {:.4}; thermal max non-DC bin {thermal_max:.5} (<= 0.1); J=0 pi/2 bin {free_peak:.2e} (< 0.1); {time}",
            5.0 * bg
        ),
    )
}

fn phase_map_checks(n0: usize) -> (bool, String) {
    let jts: Vec<f64> = (0..16).map(|i| 0.02 * i as f64).collect();
    let hts: Vec<f64> = (0..21).map(|i| 0.5 + 0.05 * i as f64).collect();
    let d = phase_diagram_sweep(&jts, &hts, 0.98, n0, 20, &default_schedule()).unwrap();
    let (a0, b0) = (8, 8);
    debug_assert!((jts[a0] - 0.16).abs() < 1e-12 && (hts[b0] - 0.9).abs() < 1e-12);
    // 4-connected component of cells above 0.3 containing (0.16 pi, 0.9 pi).
    let mut seen = vec![vec![false; hts.len()]; jts.len()];
    let mut stack = vec![(a0, b0)];
    let mut region = 0;
    while let Some((a, b)) = stack.pop() {
        if seen[a][b] || d.peaks[a][b] <= 0.3 {
            continue;
        }
        seen[a][b] = true;
        region += 1;
        if a > 0 {
            stack.push((a - 1, b));
        }
        if a + 1 < jts.len() {
            stack.push((a + 1, b));
        }
        if b > 0 {
            stack.push((a, b - 1));
        }
        if b + 1 < hts.len() {
            stack.push((a, b + 1));
        }
    }
    let centre = d.peaks[a0][b0];
    let zero_j = d.peaks[0][b0];
    // Symmetry is judged on the lobe's reference cut JT = 0.16 pi; the exact
    // hT -> 2 pi - hT symmetry of J = 0 is broken at order J, so the
    // full-grid maximum is reported alongside.
    let mid = 10;
    let diff = |row: &Vec<f64>, x: usize| (row[mid + x] - row[mid - x]).abs();
    let asym = (1..=10).map(|x| diff(&d.peaks[a0], x)).fold(0.0, f64::max);
    let asym_grid = (1..=10)
        .flat_map(|x| d.peaks.iter().map(move |row| diff(row, x)))
        .fold(0.0, f64::max);
    (
        centre > 0.3 && region >= 4 && zero_j < 0.1 && asym <= 0.1,
        format!(
            "N={}: peak(0.16pi, 0.9pi) = {centre:.3} in a {region}-cell region above 0.3, peak(0, 0.9pi) = {zero_j:.2e} (< 0.1), max |peak(pi+x) - peak(pi-x)| at JT=0.16pi = {asym:.3} (<= 0.1; over all JT {asym_grid:.3})",
            2 * n0
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (ok8, line8) = phase_map_checks(4);
    let (ok12, line12) = phase_map_checks(6);
    let (fast, time) = within(start.elapsed(), 7200);
    (
        ok8 && ok12 && fast,
        format!("16x21 maps over JT in [0, 0.3pi], hT in [0.5pi, 1.5pi]: {line8}; {line12}; {time}"),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let sched = default_schedule();
    let clean_peak = |p: &ModelParams64| {
        let rec = evolve_stroboscopic(&p.clean(), &sched, 20).unwrap();
        subharmonic_peak(&power_spectrum(rec.spectrum_series()).unwrap()).unwrap()
    };
    let averaged = |p: &ModelParams64, spec: &DisorderSpec| {
        subharmonic_peak(&disorder_averaged_spectrum(p, spec, 20, &sched).unwrap()).unwrap()
    };
    let boundary = angles(0.8, 0.13, 0.98, 4);
    let dh = DisorderSpec {
        dh: 0.08,
        n_realizations: 50,
        seed: 5,
        ..DisorderSpec::none()
    };
    let (c_clean, c_dis) = (clean_peak(&boundary), averaged(&boundary, &dh));
    let deep = angles(0.9, 0.16, 0.98, 4);
    let dm = DisorderSpec {
        dm: 0.08,
        n_realizations: 50,
        seed: 5,
        ..DisorderSpec::none()
    };
    let (d_clean, d_dis) = (clean_peak(&deep), averaged(&deep, &dm));
    let rel = (d_dis - d_clean).abs() / d_clean;
    let (fast, time) = within(start.elapsed(), 1800);
    (
        c_dis >= c_clean && rel <= 0.2 && fast,
        format!(
            "N=8, 50 realizations: boundary dh=0.08h averaged {c_dis:.4} vs clean {c_clean:.4} (>=); deep dM=0.08M averaged {d_dis:.4} vs clean {d_clean:.4}, change {:.1}% (<= 20%); {time}",
            100.0 * rel
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let sched = default_schedule();
    let params = angles(0.8, 0.13, 0.98, 4);
    let tol = default_quadruplet_tolerance(1.0);
    let fraction = |dp| {
        let spec = diagonalize(&build_floquet_unitary(&dp, &sched).unwrap(), 1.0).unwrap();
        quadruplet_analysis(&spec, tol).unwrap().fraction
    };
    let clean = fraction(params.clean());
    let spec = DisorderSpec {
        dh: 0.08,
        dm: 0.08,
        n_realizations: 21,
        seed: 6,
        ..DisorderSpec::none()
    };
    let mut fr: Vec<f64> = (0..spec.n_realizations)
        .map(|k| fraction(sample_disorder(&params, &spec, k).unwrap()))
        .collect();
    fr.sort_by(f64::total_cmp);
    let median = fr[fr.len() / 2];
    let (fast, time) = within(start.elapsed(), 1200);
    (
        median > clean && fast,
        format!("N=8, 21 realizations dh=dM=0.08: median quadruplet fraction {median:.4} vs clean {clean:.4} (strictly greater); {time}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let sched = default_schedule();
    let params = angles(0.99, 0.16, 1.0, 2);
    let rows = finite_size_scaling(&params, &[2, 3, 4], &sched, default_delta(1.0), 7).unwrap();
    let chi: Vec<f64> = rows.iter().map(|r| r.chi_zz).collect();
    let s: Vec<f64> = rows.iter().map(|r| r.s_pi_half).collect();
    let peaks: Vec<f64> = eigen_power_spectrum_scaling(&params, &[2, 3, 4], 400, &sched)
        .unwrap()
        .iter()
        .map(|(_, sp)| subharmonic_peak(sp).unwrap())
        .collect();
    let ideal_sched = default_schedule().with_sampling(TimeSampling::Midpoint);
    let ideal = ModelParams::solvable_limit(2).unwrap().clean();
    let ideal_spec = diagonalize(&build_floquet_unitary(&ideal, &ideal_sched).unwrap(), 1.0).unwrap();
    let sample = sample_eigenstates(16, default_sample_size(4), 7).unwrap();
    let s_ideal = s_pi_half(&ideal_spec, &spin_probe_operator(4), default_delta(1.0), &sample).unwrap();
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    let ok = increasing(&chi)
        && increasing(&s)
        && peaks.windows(2).all(|w| w[1] >= w[0])
        && (s_ideal - 1.0).abs() <= 1e-6;
    let (fast, time) = within(start.elapsed(), 1800);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    (
        ok && fast,
        format!(
            "N=4,6,8: chi_zz [{}] (strictly increasing); s_pi/2 [{}] (strictly increasing); 400-period peak [{}] (non-decreasing); ideal s_pi/2 = {s_ideal:.9} (1 +- 1e-6); {time}",
            fmt(&chi),
            fmt(&s),
            fmt(&peaks)
        ),
    )
}

fn recompile_table() -> (ParameterTable, Outcome) {
    let start = Instant::now();
    let dp = angles(0.9, 0.16, 0.98, 4).clean();
    let sched = default_schedule();
    let cfg = OptimizerConfig {
        max_iterations: 3000,
        n_hops: 20,
        ..Default::default()
    };
    let steps = recompile_stroboscopic_sequence(&dp, &sched, 20, DEFAULT_LAYERS, &cfg).unwrap();
    let ansatz = build_ansatz::<f64>(8, DEFAULT_LAYERS).unwrap();
    let exact = exact_series(&dp, &sched, 20).unwrap();
    let mut worst_cost: f64 = 0.0;
    let mut worst_dz: f64 = 0.0;
    let mut over = Vec::new();
    let mut pattern_ok = true;
    for s in steps.iter().filter(|s| s.k >= 1) {
        let sz = recompiled_sz(&ansatz, &s.result.parameters).unwrap();
        let reference = exact[s.k - 1];
        worst_cost = worst_cost.max(s.result.cost);
        worst_dz = worst_dz.max((sz - reference).abs());
        if s.result.cost >= 1e-2 {
            over.push(s.k.to_string());
        }
        pattern_ok &= sz.signum() == pattern_a(s.k) && reference.signum() == pattern_a(s.k);
    }
    let table = table_from_steps(8, DEFAULT_LAYERS, &steps);
    let (fast, time) = within(start.elapsed(), 4 * 3600);
    let over = if over.is_empty() {
        "none".to_string()
    } else {
        over.join(",")
    };
    let outcome = (
        worst_cost < 1e-2 && worst_dz <= 0.05 && pattern_ok && fast,
        format!(
            "N=8, 3 layers, k=1..20: max cost {worst_cost:.3e} (< 1e-2; k over: {over}); max |Sz - Trotter| {worst_dz:.4} (<= 0.05); 4T sign pattern {}; {time}",
            if pattern_ok { "held" } else { "broken" }
        ),
    );
    (table, outcome)
}

fn criterion_9(table: &ParameterTable) -> Outcome {
    let start = Instant::now();
    let dp = angles(0.9, 0.16, 0.98, 4).clean();
    let sched = noisy_schedule(1.0).unwrap();
    let seed = 9;
    let study = noise_threshold_study(&dp, &sched, &[1e-4, 1e-2], 20, DEFAULT_SHOTS, seed).unwrap();
    let (low, high) = (study[0].peak().unwrap(), study[1].peak().unwrap());
    let ansatz = build_ansatz::<f64>(8, DEFAULT_LAYERS).unwrap();
    let noise = NoiseModel::depolarizing(1e-3);
    let cmp =
        compare_recompiled_vs_trotter(&noise, &ansatz, table, &dp, &sched, 20, DEFAULT_SHOTS, seed).unwrap();
    let (rec, trot) = (cmp.recompiled.peak().unwrap(), cmp.trotter.peak().unwrap());
    let (fast, time) = within(start.elapsed(), 3600);
    (
        low > 0.2 && high < 0.1 && rec > trot && rec >= 2.0 * trot && fast,
        format!(
            "N=8, 4000 shots: Trotter peak r1=1e-4 {low:.4} (> 0.2), r1=1e-2 {high:.4} (< 0.1); r1=1e-3 recompiled {rec:.4} vs Trotter {trot:.4} (ratio {:.2}, >= 2); {time}",
            rec / trot
        ),
    )
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let sched = default_schedule();
    let mut failures = Vec::new();
    let dp = angles(0.9, 0.16, 0.98, 4).clean();
    let dis = sample_disorder(
        &angles(0.9, 0.16, 0.98, 4),
        &DisorderSpec {
            dh: 0.08,
            dj: 0.08,
            dm: 0.08,
            n_realizations: 1,
            seed: 10,
        },
        0,
    )
    .unwrap();

    let mut norm_dev: f64 = 0.0;
    for p in [&dp, &dis] {
        let program = CycleProgram::new(p, &sched).unwrap();
        let mut s = StateVector::all_up(8).unwrap();
        (0..100).for_each(|_| program.apply(&mut s));
        norm_dev = norm_dev.max((s.norm_sqr() - 1.0).abs());
    }
    if norm_dev > 1e-9 {
        failures.push(format!("norm {norm_dev:.1e}"));
    }

    let ansatz = build_ansatz::<f64>(8, DEFAULT_LAYERS).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let theta: Vec<f64> = (0..ansatz.n_params())
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    let gates = cycle_gate_sequence(&dis, &sched);
    let routed = route_circuit(&gates, 8).unwrap();
    let mut unit_dev = gates
        .iter()
        .chain(&routed)
        .chain(&ansatz.gates(&theta).unwrap())
        .map(GateOp::unitarity_deviation)
        .fold(0.0, f64::max);
    let u = build_floquet_unitary(&dis, &sched).unwrap();
    unit_dev = unit_dev.max(max_identity_deviation(&(u.adjoint() * &u)));
    if unit_dev > 1e-10 {
        failures.push(format!("unitarity {unit_dev:.1e}"));
    }

    let series = evolve_stroboscopic(&dp, &sched, 20).unwrap();
    let x = series.spectrum_series();
    let sp = power_spectrum(x).unwrap();
    let lhs: f64 = sp.magnitudes().iter().map(|m| m * m).sum();
    let rhs: f64 = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    let parseval = (lhs - rhs).abs();
    if parseval > 1e-10 {
        failures.push(format!("Parseval {parseval:.1e}"));
    }

    let dense = dense_stroboscopic_series(&u, 20).unwrap();
    let direct = evolve_stroboscopic(&dis, &sched, 20).unwrap().global_sz;
    let dense_dev = dense
        .iter()
        .zip(&direct)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if dense_dev > 1e-8 {
        failures.push(format!("dense vs direct {dense_dev:.1e}"));
    }

    let confusion: Vec<Confusion> = (0..4)
        .map(|q| [[0.97 - 0.01 * q as f64, 0.05], [0.03 + 0.01 * q as f64, 0.95]])
        .collect();
    let circuit: Vec<GateOp<f64>> = (0..4)
        .map(|q| GateOp::one(q, Mat2::exp_i_pauli(0.3 + 0.4 * q as f64, Pauli::Y)))
        .collect();
    let mut exact = StateVector::all_up(4).unwrap();
    exact.apply_gates(&circuit).unwrap();
    let record = noisy_execute(
        &circuit,
        4,
        &NoiseModel::ideal().with_readout(confusion.clone()),
        4000,
        10,
    )
    .unwrap();
    let mitigated = mitigate_readout(&record, &confusion).unwrap();
    let mut worst_sigma: f64 = 0.0;
    for (q, m) in confusion.iter().enumerate() {
        let z = exact.expectation_z_chain(q).unwrap();
        let p_rec = m[0][0] * (1.0 + z) / 2.0 + m[0][1] * (1.0 - z) / 2.0;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let sigma = 2.0 * (p_rec * (1.0 - p_rec) / 4000.0).sqrt() / det;
        worst_sigma = worst_sigma.max((mitigated[q] - z).abs() / sigma);
    }
    if worst_sigma > 3.0 {
        failures.push(format!("mitigation {worst_sigma:.2} sigma"));
    }

    let small = angles(0.9, 0.16, 0.98, 2).clean();
    let csv = || {
        let s = noise_threshold_study(&small, &noisy_schedule(1.0).unwrap(), &[1e-3], 8, 500, 10).unwrap();
        let mut buf = Vec::new();
        write_series_csv(&s, &mut buf).unwrap();
        buf
    };
    let spec = DisorderSpec {
        dh: 0.08,
        n_realizations: 4,
        seed: 10,
        ..DisorderSpec::none()
    };
    let p4 = angles(0.8, 0.13, 0.98, 2);
    let avg = || disorder_averaged_spectrum(&p4, &spec, 20, &sched).unwrap();
    let deterministic = csv() == csv() && avg() == avg();
    if !deterministic {
        failures.push("seed determinism".to_string());
    }

    let status = if failures.is_empty() {
        "all hold".to_string()
    } else {
        failures.join("; ")
    };
    (
        failures.is_empty(),
        format!(
            "properties: norm dev {norm_dev:.1e} (1e-9), unitarity {unit_dev:.1e} (1e-10), Parseval {parseval:.1e} (1e-10), dense vs direct {dense_dev:.1e} (1e-8), mitigation {worst_sigma:.2} sigma (3), byte-identical reruns {deterministic}: {status}; {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: usize| selected.is_empty() || selected.contains(&n);
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut run = |n: usize, f: &dyn Fn() -> Outcome| {
        if wanted(n) {
            let outcome = f();
            println!(
                "{} criterion {n}: {}",
                if outcome.0 { "PASS" } else { "FAIL" },
                outcome.1
            );
            results.push((n, outcome));
        }
    };
    run(1, &criterion_1);
    run(2, &criterion_2);
    run(3, &criterion_3);
    run(4, &criterion_4);
    run(5, &criterion_5);
    run(6, &criterion_6);
    run(7, &criterion_7);
    if wanted(8) || wanted(9) {
        let (table, outcome8) = recompile_table();
        run(8, &|| outcome8.clone());
        run(9, &|| criterion_9(&table));
    }
    run(10, &criterion_10);
    let failed: Vec<String> = results
        .iter()
        .filter(|(_, o)| !o.0)
        .map(|(n, _)| n.to_string())
        .collect();
    println!(
        "acceptance: {} of {} criteria pass",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("failing criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
