//! Power spectra of stroboscopic magnetization series, subharmonic peaks,
//! phase-diagram sweeps and disorder averages.

use std::io::Write;

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::evolution::{evolve_stroboscopic, TrotterSchedule};
use crate::model::{sample_disorder, DisorderSpec, ModelParams};
use crate::scalar::{Real, C};

/// `|S(Omega_m)| = |(1/N) sum_{k=1}^{N} S_z(kT) exp(-i 2 pi m k / N)|` for `m = 0 .. N-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSpectrum<T> {
    magnitudes: Vec<T>,
}

impl<T: Real> PowerSpectrum<T> {
    pub fn from_magnitudes(magnitudes: Vec<T>) -> Result<Self> {
        check_length(magnitudes.len())?;
        if magnitudes.iter().any(|m| !(*m >= T::zero())) {
            return Err(crate::error::invalid("magnitudes", "must be non-negative"));
        }
        Ok(PowerSpectrum { magnitudes })
    }

    pub fn n_tot(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn magnitudes(&self) -> &[T] {
        &self.magnitudes
    }

    /// `Omega_m T / pi = 2m / N`.
    pub fn omega_t_over_pi(&self, m: usize) -> f64 {
        2.0 * m as f64 / self.n_tot() as f64
    }

    pub fn frequencies(&self) -> Vec<T> {
        let n = T::from_usize_lossy(self.n_tot());
        (0..self.n_tot())
            .map(|m| T::TAU() * T::from_usize_lossy(m) / n)
            .collect()
    }

    /// Bin of `Omega T = pi/2`.
    pub fn quarter_bin(&self) -> usize {
        self.n_tot() / 4
    }

    /// Bin of `Omega T = 3 pi/2`.
    pub fn three_quarter_bin(&self) -> usize {
        3 * self.n_tot() / 4
    }

    /// Largest magnitude outside `excluded`.
    pub fn max_excluding(&self, excluded: &[usize]) -> T {
        self.magnitudes
            .iter()
            .enumerate()
            .filter(|(m, _)| !excluded.contains(m))
            .map(|(_, &x)| x)
            .fold(T::zero(), T::max)
    }

    /// Largest magnitude away from DC and the two subharmonic bins.
    pub fn max_background(&self) -> T {
        self.max_excluding(&[0, self.quarter_bin(), self.three_quarter_bin()])
    }

    /// Columns `omega_T_over_pi, magnitude`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "omega_T_over_pi,magnitude")?;
        for (m, x) in self.magnitudes.iter().enumerate() {
            writeln!(w, "{},{}", self.omega_t_over_pi(m), x)?;
        }
        Ok(())
    }
}

fn check_length(n: usize) -> Result<()> {
    if n < 8 || n % 4 != 0 {
        return Err(Error::SpectrumLength(n));
    }
    Ok(())
}

/// Spectrum of `series = (S_z(T), ..., S_z(N T))`.
pub fn power_spectrum<T: Real>(series: &[T]) -> Result<PowerSpectrum<T>> {
    let n = series.len();
    check_length(n)?;
    let fft = FftPlanner::<T>::new().plan_fft_forward(n);
    let mut buf: Vec<C<T>> = series.iter().map(|&x| C::new(x, T::zero())).collect();
    fft.process(&mut buf);
    // The sum starts at k = 1; shifting the index by one only multiplies each bin by a unit phase.
    let inv = T::one() / T::from_usize_lossy(n);
    Ok(PowerSpectrum {
        magnitudes: buf.iter().map(|z| z.norm() * inv).collect(),
    })
}

/// Magnitude at `Omega T = pi/2`.
pub fn subharmonic_peak<T: Real>(spectrum: &PowerSpectrum<T>) -> Result<T> {
    check_length(spectrum.n_tot())?;
    Ok(spectrum.magnitudes[spectrum.quarter_bin()])
}

/// Subharmonic peak for one `(JT, hT, MT)` point, angles in units of pi, `T = 1`.
pub fn phase_diagram_point<T: Real>(
    jt_over_pi: f64,
    ht_over_pi: f64,
    mt_over_pi: f64,
    n_rungs: usize,
    n_periods: usize,
    schedule: &TrotterSchedule<T>,
) -> Result<T> {
    let params = ModelParams::from_angles(
        T::lit(ht_over_pi),
        T::lit(jt_over_pi),
        T::lit(mt_over_pi),
        T::one(),
        n_rungs,
    )?;
    let rec = evolve_stroboscopic(&params.clean(), schedule, n_periods)?;
    subharmonic_peak(&power_spectrum(rec.spectrum_series())?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseDiagram<T> {
    pub jt_over_pi: Vec<f64>,
    pub ht_over_pi: Vec<f64>,
    pub mt_over_pi: f64,
    /// `peaks[a][b]` belongs to `(jt_over_pi[a], ht_over_pi[b])`.
    pub peaks: Vec<Vec<T>>,
}

impl<T: Real> PhaseDiagram<T> {
    pub fn peak_at(&self, jt_over_pi: f64, ht_over_pi: f64) -> Option<T> {
        let a = self
            .jt_over_pi
            .iter()
            .position(|&x| (x - jt_over_pi).abs() < 1e-12)?;
        let b = self
            .ht_over_pi
            .iter()
            .position(|&x| (x - ht_over_pi).abs() < 1e-12)?;
        Some(self.peaks[a][b])
    }

    /// Columns `JT_over_pi, hT_over_pi, peak`, `JT` major.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "JT_over_pi,hT_over_pi,peak")?;
        for (a, jt) in self.jt_over_pi.iter().enumerate() {
            for (b, ht) in self.ht_over_pi.iter().enumerate() {
                writeln!(w, "{jt},{ht},{}", self.peaks[a][b])?;
            }
        }
        Ok(())
    }
}

pub fn phase_diagram_sweep<T: Real>(
    jt_over_pi: &[f64],
    ht_over_pi: &[f64],
    mt_over_pi: f64,
    n_rungs: usize,
    n_periods: usize,
    schedule: &TrotterSchedule<T>,
) -> Result<PhaseDiagram<T>> {
    if jt_over_pi.is_empty() || ht_over_pi.is_empty() {
        return Err(Error::Empty("phase-diagram grid"));
    }
    if jt_over_pi
        .iter()
        .chain(ht_over_pi)
        .chain([&mt_over_pi])
        .any(|x| !x.is_finite())
    {
        return Err(crate::error::invalid("grid", "grid values must be finite"));
    }
    let points: Vec<(usize, usize)> = (0..jt_over_pi.len())
        .flat_map(|a| (0..ht_over_pi.len()).map(move |b| (a, b)))
        .collect();
    let values = points
        .par_iter()
        .map(|&(a, b)| {
            phase_diagram_point(
                jt_over_pi[a],
                ht_over_pi[b],
                mt_over_pi,
                n_rungs,
                n_periods,
                schedule,
            )
        })
        .collect::<Result<Vec<T>>>()?;
    let peaks = values.chunks(ht_over_pi.len()).map(<[T]>::to_vec).collect();
    Ok(PhaseDiagram {
        jt_over_pi: jt_over_pi.to_vec(),
        ht_over_pi: ht_over_pi.to_vec(),
        mt_over_pi,
        peaks,
    })
}

/// Element-wise mean; identical inputs give a bit-identical output.
pub fn ensemble_mean<T: Real>(rows: &[Vec<T>]) -> Result<Vec<T>> {
    let first = rows.first().ok_or(Error::Empty("ensemble"))?;
    let n = T::from_usize_lossy(rows.len());
    let mut mean = first.clone();
    for (j, m) in mean.iter_mut().enumerate() {
        let dev = rows.iter().fold(T::zero(), |s, r| s + (r[j] - first[j]));
        *m = *m + dev / n;
    }
    Ok(mean)
}

/// Mean of per-realization spectral magnitudes.
pub fn disorder_averaged_spectrum<T: Real>(
    params: &ModelParams<T>,
    spec: &DisorderSpec,
    n_periods: usize,
    schedule: &TrotterSchedule<T>,
) -> Result<PowerSpectrum<T>> {
    spec.validate()?;
    let spectra = (0..spec.n_realizations)
        .into_par_iter()
        .map(|k| {
            let dp = sample_disorder(params, spec, k)?;
            let rec = evolve_stroboscopic(&dp, schedule, n_periods)?;
            Ok(power_spectrum(rec.spectrum_series())?.magnitudes)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerSpectrum {
        magnitudes: ensemble_mean(&spectra)?,
    })
}
