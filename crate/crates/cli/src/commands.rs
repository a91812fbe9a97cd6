use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;

use dtc4::evolution::{evolve_stroboscopic, TrotterSchedule};
use dtc4::floquet::{
    build_floquet_unitary, chi_zz, default_sample_size, diagonalize, finite_size_scaling,
    quadruplet_analysis, s_pi_half, sample_eigenstates, spin_probe_operator, write_scaling_csv,
};
use dtc4::noise::{compare_recompiled_vs_trotter, exact_series, noise_threshold_study, write_series_csv};
use dtc4::observables::{
    ensemble_mean, phase_diagram_point, power_spectrum, subharmonic_peak, PhaseDiagram, PowerSpectrum,
};
use dtc4::recompile::{
    build_ansatz, recompile_stroboscopic_sequence, recompiled_sz, table_from_steps, ParameterTable,
};
use dtc4::sample_disorder;

use crate::config::{resolve, RunConfig};
use crate::output::RunDir;

fn summary(dir: &mut RunDir, rows: &[(&str, String)]) -> Result<()> {
    dir.write("summary.csv", |w| {
        writeln!(w, "quantity,value")?;
        for (k, v) in rows {
            writeln!(w, "{k},{v}")?;
        }
        Ok(())
    })
}

pub fn evolve(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    let params = cfg.params()?;
    let schedule = cfg.schedule()?;
    let n = cfg.evolve.n_periods;
    let (spectrum, peak_label) = match cfg.disorder()?.filter(|d| !d.is_clean()) {
        None => {
            let rec = evolve_stroboscopic(&params.clean(), &schedule, n)?;
            dir.write("stroboscopic.csv", |w| Ok(rec.write_csv(w)?))?;
            (power_spectrum(rec.spectrum_series())?, "clean")
        }
        Some(spec) => {
            let records = (0..spec.n_realizations)
                .into_par_iter()
                .map(|k| evolve_stroboscopic(&sample_disorder(&params, &spec, k)?, &schedule, n))
                .collect::<dtc4::Result<Vec<_>>>()?;
            let series: Vec<Vec<f64>> = records.iter().map(|r| r.global_sz.clone()).collect();
            let mean_sz = ensemble_mean(&series)?;
            let spectra = records
                .iter()
                .map(|r| Ok(power_spectrum(r.spectrum_series())?.magnitudes().to_vec()))
                .collect::<dtc4::Result<Vec<_>>>()?;
            let times = records[0].times.clone();
            dir.write("stroboscopic.csv", |w| {
                writeln!(w, "k,t,Sz_mean")?;
                for (k, (t, s)) in times.iter().zip(&mean_sz).enumerate() {
                    writeln!(w, "{k},{t},{s}")?;
                }
                Ok(())
            })?;
            (
                PowerSpectrum::from_magnitudes(ensemble_mean(&spectra)?)?,
                "disorder_averaged",
            )
        }
    };
    dir.write("spectrum.csv", |w| Ok(spectrum.write_csv(w)?))?;
    let peak = subharmonic_peak(&spectrum)?;
    summary(
        dir,
        &[
            ("seed", cfg.seed.to_string()),
            ("spectrum", peak_label.to_string()),
            ("subharmonic_peak", peak.to_string()),
            ("max_background", spectrum.max_background().to_string()),
            ("dt", schedule.dt.to_string()),
        ],
    )?;
    println!("subharmonic peak ({peak_label}): {peak}");
    Ok(())
}

const PARTIAL: &str = "phase_diagram.partial.csv";

fn read_partial(path: &Path) -> Result<BTreeMap<(u64, u64), f64>> {
    let mut done = BTreeMap::new();
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(done);
    };
    let mut lines: Vec<&str> = text.split('\n').skip(1).collect();
    // The final piece is empty after a clean write and torn after an interrupted one.
    lines.pop();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let parsed = (f.len() == 3)
            .then(|| {
                Some((
                    f[0].parse::<f64>().ok()?,
                    f[1].parse::<f64>().ok()?,
                    f[2].parse::<f64>().ok()?,
                ))
            })
            .flatten();
        if let Some((jt, ht, peak)) = parsed {
            done.insert((jt.to_bits(), ht.to_bits()), peak);
        }
    }
    Ok(done)
}

/// Grid points already present in `phase_diagram.partial.csv` are skipped;
/// new points are appended to it as they finish.
pub fn phase_diagram(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| anyhow!("config field `sweep`: missing"))?;
    let (jts, hts) = (sweep.jt_over_pi.values(), sweep.ht_over_pi.values());
    let schedule = cfg.schedule()?;
    let partial_path = dir.path(PARTIAL);
    let done = read_partial(&partial_path)?;
    let fresh = !partial_path.exists();
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&partial_path)
        .with_context(|| format!("opening {}", partial_path.display()))?;
    if fresh {
        writeln!(file, "JT_over_pi,hT_over_pi,peak")?;
    } else if !fs::read(&partial_path)?.ends_with(b"\n") {
        writeln!(file)?;
    }
    let file = Mutex::new(file);
    let todo: Vec<(f64, f64)> = jts
        .iter()
        .flat_map(|&jt| hts.iter().map(move |&ht| (jt, ht)))
        .filter(|(jt, ht)| !done.contains_key(&(jt.to_bits(), ht.to_bits())))
        .collect();
    println!(
        "phase diagram: {} of {} points to compute",
        todo.len(),
        jts.len() * hts.len()
    );
    let computed = todo
        .par_iter()
        .map(|&(jt, ht)| -> Result<((u64, u64), f64)> {
            let peak = phase_diagram_point(
                jt,
                ht,
                cfg.model.m_t_over_pi,
                cfg.model.n_rungs,
                sweep.n_periods,
                &schedule,
            )?;
            let mut f = file
                .lock()
                .map_err(|_| anyhow!("partial-results lock poisoned"))?;
            writeln!(f, "{jt:?},{ht:?},{peak:?}")?;
            f.flush()?;
            Ok(((jt.to_bits(), ht.to_bits()), peak))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all = done;
    all.extend(computed);
    let peaks = jts
        .iter()
        .map(|jt| hts.iter().map(|ht| all[&(jt.to_bits(), ht.to_bits())]).collect())
        .collect();
    let diagram = PhaseDiagram {
        jt_over_pi: jts,
        ht_over_pi: hts,
        mt_over_pi: cfg.model.m_t_over_pi,
        peaks,
    };
    dir.write("phase_diagram.csv", |w| Ok(diagram.write_csv(w)?))?;
    fs::remove_file(&partial_path).with_context(|| format!("removing {}", partial_path.display()))?;
    Ok(())
}

pub fn floquet(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    let params = cfg.params()?;
    let schedule = cfg.schedule()?;
    let period = params.period;
    let f = &cfg.floquet;
    let dp = match cfg.disorder()?.filter(|d| !d.is_clean()) {
        None => params.clean(),
        Some(spec) => sample_disorder(&params, &spec, 0)?,
    };
    let u = build_floquet_unitary(&dp, &schedule)?;
    let spectrum = diagonalize(&u, period)?;
    dir.write("quasienergies.csv", |w| Ok(spectrum.write_csv(w)?))?;
    let tol = f.quadruplet_tolerance * std::f64::consts::FRAC_PI_2 / period;
    let quads = quadruplet_analysis(&spectrum, tol)?;
    dir.write("quadruplets.csv", |w| Ok(quads.write_csv(w)?))?;
    let n = spectrum.n_qubits();
    let delta = f.delta_over_pi * std::f64::consts::PI / period;
    let sample = sample_eigenstates(spectrum.dim(), default_sample_size(n), cfg.seed)?;
    let chi = chi_zz(&spectrum);
    let s = s_pi_half(&spectrum, &spin_probe_operator(n), delta, &sample)?;
    if !f.n0_list.is_empty() {
        let rows = finite_size_scaling(&params, &f.n0_list, &schedule, delta, cfg.seed)?;
        dir.write("scaling.csv", |w| Ok(write_scaling_csv(&rows, w)?))?;
    }
    summary(
        dir,
        &[
            ("seed", cfg.seed.to_string()),
            ("N", n.to_string()),
            ("chi_zz", chi.to_string()),
            ("s_pi_half", s.to_string()),
            ("quadruplet_fraction", quads.fraction.to_string()),
            ("quadruplet_tolerance", tol.to_string()),
        ],
    )?;
    println!(
        "N={n}: chi_zz={chi} s_pi/2={s} quadruplet fraction={}",
        quads.fraction
    );
    Ok(())
}

pub const TABLE_FILE: &str = "parameters.table";

pub fn recompile(cfg: &RunConfig, dir: &mut RunDir) -> Result<()> {
    let dp = cfg.params()?.clean();
    let schedule = cfg.schedule()?;
    let opt = cfg.optimizer()?;
    let r = &cfg.recompile;
    let steps = recompile_stroboscopic_sequence(&dp, &schedule, r.k_max, r.n_layers, &opt)?;
    let table = table_from_steps(dp.n_sites(), r.n_layers, &steps);
    dir.write(TABLE_FILE, |w| Ok(table.write(w)?))?;
    let ansatz = build_ansatz::<f64>(dp.n_sites(), r.n_layers)?;
    let exact = exact_series(&dp, &schedule, r.k_max)?;
    let rows = steps
        .iter()
        .map(|s| Ok((s, recompiled_sz(&ansatz, &s.result.parameters)?)))
        .collect::<dtc4::Result<Vec<_>>>()?;
    dir.write("recompile.csv", |w| {
        writeln!(w, "k,cost,iterations,hops,Sz_recompiled,Sz_trotter")?;
        for (s, sz) in &rows {
            let reference = if s.k == 0 { 1.0 } else { exact[s.k - 1] };
            let res = &s.result;
            writeln!(
                w,
                "{},{:e},{},{},{sz},{reference}",
                s.k, res.cost, res.iterations, res.hops
            )?;
        }
        Ok(())
    })?;
    let worst = steps.iter().map(|s| s.result.cost).fold(0.0, f64::max);
    summary(
        dir,
        &[("seed", cfg.seed.to_string()), ("max_cost", worst.to_string())],
    )?;
    println!("recompiled k = 0..={}; worst cost {worst:e}", r.k_max);
    Ok(())
}

pub fn noisy(cfg: &RunConfig, dir: &mut RunDir, config_dir: &Path) -> Result<()> {
    let dp = cfg.params()?.clean();
    let n = &cfg.noise;
    let table_path = resolve(
        config_dir,
        n.table
            .as_deref()
            .ok_or_else(|| anyhow!("config field `noise.table`: missing"))?,
    );
    let file = fs::File::open(&table_path).with_context(|| {
        format!(
            "config field `noise.table`: cannot open recompile table {}; run `dtc4 recompile` first",
            table_path.display()
        )
    })?;
    let table = ParameterTable::read(BufReader::new(file))
        .with_context(|| format!("reading {}", table_path.display()))?;
    let ansatz = build_ansatz::<f64>(table.n_qubits, table.n_layers)?;
    let schedule = TrotterSchedule::new(dp.period, n.dt_over_t * dp.period)?;
    let noise = cfg.noise_model(config_dir)?;

    let threshold = noise_threshold_study(&dp, &schedule, &n.rates, n.n_periods, n.n_shots, cfg.seed)?;
    dir.write("threshold.csv", |w| Ok(write_series_csv(&threshold, w)?))?;
    let cmp = compare_recompiled_vs_trotter(
        &noise,
        &ansatz,
        &table,
        &dp,
        &schedule,
        n.n_periods,
        n.n_shots,
        cfg.seed,
    )?;
    dir.write("comparison_recompiled.csv", |w| {
        Ok(write_series_csv(std::slice::from_ref(&cmp.recompiled), w)?)
    })?;
    dir.write("comparison_trotter.csv", |w| {
        Ok(write_series_csv(std::slice::from_ref(&cmp.trotter), w)?)
    })?;
    let exact = exact_series(&dp, &schedule, n.n_periods)?;
    dir.write("exact.csv", |w| {
        writeln!(w, "k,Sz_exact")?;
        for (k, s) in exact.iter().enumerate() {
            writeln!(w, "{},{s}", k + 1)?;
        }
        Ok(())
    })?;
    let mut rows = vec![("seed", cfg.seed.to_string())];
    let labels: Vec<String> = threshold
        .iter()
        .map(|s| format!("trotter_peak_r{:e}", s.r))
        .collect();
    for (s, label) in threshold.iter().zip(&labels) {
        rows.push((label.as_str(), s.peak()?.to_string()));
    }
    rows.push(("recompiled_peak", cmp.recompiled.peak()?.to_string()));
    rows.push(("trotter_peak", cmp.trotter.peak()?.to_string()));
    summary(dir, &rows)?;
    println!(
        "r1={}: recompiled peak {} vs trotter peak {}",
        noise.r1,
        cmp.recompiled.peak()?,
        cmp.trotter.peak()?
    );
    Ok(())
}
