//! Driven spin-1/2 ladder: couplings, disorder realizations and the
//! ladder-to-chain mapping.
//!
//! Site `(a, i)` sits at chain index `2i`, site `(b, i)` at `2i + 1`. Rungs
//! couple `2i` and `2i + 1`; the intra-ladder `zz` bonds couple `2i` and
//! `2i + 2` (next-nearest neighbours on the chain); the second-half field
//! acts on the odd (b) indices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{LocalOperator, Mat2, Mat4, Pauli};
use crate::scalar::{c_re, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ladder {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteIndex {
    pub ladder: Ladder,
    pub rung: usize,
}

impl SiteIndex {
    pub const fn a(rung: usize) -> Self {
        SiteIndex {
            ladder: Ladder::A,
            rung,
        }
    }

    pub const fn b(rung: usize) -> Self {
        SiteIndex {
            ladder: Ladder::B,
            rung,
        }
    }

    pub const fn chain_index(self) -> usize {
        match self.ladder {
            Ladder::A => 2 * self.rung,
            Ladder::B => 2 * self.rung + 1,
        }
    }

    pub const fn from_chain(q: usize) -> Self {
        SiteIndex {
            ladder: if q % 2 == 0 { Ladder::A } else { Ladder::B },
            rung: q / 2,
        }
    }
}

/// Clean couplings of the ladder. Energies are in units where `hbar = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub h: T,
    pub j: T,
    pub m: T,
    pub period: T,
    pub omega: T,
    pub n_rungs: usize,
}

impl<T: Real> ModelParams<T> {
    pub fn new(h: T, j: T, m: T, period: T, n_rungs: usize) -> Result<Self> {
        if !(period > T::zero()) || !period.is_finite() {
            return Err(invalid(
                "T",
                format!("period must be positive and finite, got {period}"),
            ));
        }
        if n_rungs < 2 {
            return Err(invalid(
                "N0",
                format!("ladder needs at least 2 rungs, got {n_rungs}"),
            ));
        }
        for (name, v) in [("h", h), ("J", j), ("M", m)] {
            if !v.is_finite() {
                return Err(invalid(name, format!("coupling must be finite, got {v}")));
            }
        }
        Ok(ModelParams {
            h,
            j,
            m,
            period,
            omega: T::TAU() / period,
            n_rungs,
        })
    }

    /// Builds parameters from the dimensionless angles `hT/pi`, `JT/pi`, `MT/pi`.
    pub fn from_angles(
        h_t_over_pi: T,
        j_t_over_pi: T,
        m_t_over_pi: T,
        period: T,
        n_rungs: usize,
    ) -> Result<Self> {
        if !(period > T::zero()) {
            return Err(invalid("T", format!("period must be positive, got {period}")));
        }
        let scale = T::PI() / period;
        Self::new(
            h_t_over_pi * scale,
            j_t_over_pi * scale,
            m_t_over_pi * scale,
            period,
            n_rungs,
        )
    }

    /// `hT = MT = pi`, `J = 0`.
    pub fn solvable_limit(n_rungs: usize) -> Result<Self> {
        Self::from_angles(T::one(), T::zero(), T::one(), T::one(), n_rungs)
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_rungs
    }

    pub fn with_couplings(&self, h: T, j: T, m: T) -> Result<Self> {
        Self::new(h, j, m, self.period, self.n_rungs)
    }

    pub fn clean(&self) -> DisorderedParams<T> {
        DisorderedParams {
            h: vec![self.h; self.n_rungs],
            j: vec![self.j; self.n_rungs - 1],
            m: vec![self.m; self.n_rungs],
            period: self.period,
            omega: self.omega,
        }
    }
}

/// Human-readable parameter set; angles are stored as multiples of pi.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(rename = "hT_over_pi")]
    pub h_t_over_pi: f64,
    #[serde(rename = "JT_over_pi")]
    pub j_t_over_pi: f64,
    #[serde(rename = "MT_over_pi")]
    pub m_t_over_pi: f64,
    #[serde(rename = "T", default = "one")]
    pub period: f64,
    #[serde(rename = "N0")]
    pub n_rungs: usize,
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn to_params<T: Real>(&self) -> Result<ModelParams<T>> {
        ModelParams::from_angles(
            T::lit(self.h_t_over_pi),
            T::lit(self.j_t_over_pi),
            T::lit(self.m_t_over_pi),
            T::lit(self.period),
            self.n_rungs,
        )
    }
}

/// Uniform disorder on `[P - dP*|P|, P + dP*|P|]` for each of `h`, `J`, `M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    #[serde(default)]
    pub dh: f64,
    #[serde(rename = "dJ", default)]
    pub dj: f64,
    #[serde(rename = "dM", default)]
    pub dm: f64,
    pub n_realizations: usize,
    #[serde(default)]
    pub seed: u64,
}

impl DisorderSpec {
    pub fn none() -> Self {
        DisorderSpec {
            dh: 0.0,
            dj: 0.0,
            dm: 0.0,
            n_realizations: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("dh", self.dh), ("dJ", self.dj), ("dM", self.dm)] {
            if !(0.0..1.0).contains(&w) {
                return Err(invalid(
                    name,
                    format!("half-width fraction must lie in [0, 1), got {w}"),
                ));
            }
        }
        if self.n_realizations == 0 {
            return Err(invalid("n_realizations", "need at least one realization"));
        }
        Ok(())
    }

    pub fn is_clean(&self) -> bool {
        self.dh == 0.0 && self.dj == 0.0 && self.dm == 0.0
    }
}

/// Per-site couplings of one disorder realization.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderedParams<T> {
    /// One value per rung.
    pub h: Vec<T>,
    /// One value per intra-ladder bond `(i, i+1)`.
    pub j: Vec<T>,
    /// One value per b-site.
    pub m: Vec<T>,
    pub period: T,
    pub omega: T,
}

impl<T: Real> DisorderedParams<T> {
    pub fn n_rungs(&self) -> usize {
        self.h.len()
    }

    pub fn n_sites(&self) -> usize {
        2 * self.h.len()
    }

    pub fn scaled(&self, factor_h: T, factor_j: T, factor_m: T) -> Self {
        DisorderedParams {
            h: self.h.iter().map(|&x| x * factor_h).collect(),
            j: self.j.iter().map(|&x| x * factor_j).collect(),
            m: self.m.iter().map(|&x| x * factor_m).collect(),
            ..self.clone()
        }
    }
}

/// Draws realization `index` of `spec`. Pure in `(spec.seed, index)`.
pub fn sample_disorder<T: Real>(
    params: &ModelParams<T>,
    spec: &DisorderSpec,
    index: usize,
) -> Result<DisorderedParams<T>> {
    spec.validate()?;
    if index >= spec.n_realizations {
        return Err(Error::RealizationOutOfRange {
            index,
            n: spec.n_realizations,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);

    let mut draw = |centre: T, frac: f64, count: usize| -> Vec<T> {
        (0..count)
            .map(|_| {
                let u: f64 = rng.random();
                if frac == 0.0 {
                    centre
                } else {
                    centre + centre.abs() * T::lit(frac * (2.0 * u - 1.0))
                }
            })
            .collect()
    };
    let n0 = params.n_rungs;
    let h = draw(params.h, spec.dh, n0);
    let j = draw(params.j, spec.dj, n0 - 1);
    let m = draw(params.m, spec.dm, n0);
    Ok(DisorderedParams {
        h,
        j,
        m,
        period: params.period,
        omega: params.omega,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfPeriod {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermFamily {
    /// `-(h_i/2)(XX - (1 + cos wt) YY)` on `(a_i, b_i)`.
    Rung,
    /// `-J_i Z Z` on `(a_i, a_{i+1})`.
    Bond,
    /// `M_i X` on `b_i`.
    Field,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianTerm<T> {
    pub family: TermFamily,
    /// Coupling-weighted Hermitian operator.
    pub op: LocalOperator<T>,
}

/// Coefficient `1 + cos(omega t)` of the rung `yy` coupling.
pub fn yy_modulation<T: Real>(omega: T, t: T) -> T {
    T::one() + (omega * t).cos()
}

pub fn hamiltonian_terms<T: Real>(
    dp: &DisorderedParams<T>,
    half: HalfPeriod,
    t: T,
) -> Vec<HamiltonianTerm<T>> {
    let n0 = dp.n_rungs();
    match half {
        HalfPeriod::First => {
            let yy = yy_modulation(dp.omega, t);
            let xx_m = Mat4::pauli_pair(Pauli::X, Pauli::X);
            let yy_m = Mat4::pauli_pair(Pauli::Y, Pauli::Y);
            let zz_m = Mat4::pauli_pair(Pauli::Z, Pauli::Z);
            let rungs = (0..n0).map(|i| {
                let half_h = dp.h[i] / T::lit(2.0);
                let m = xx_m.scale(c_re(-half_h)).add(&yy_m.scale(c_re(half_h * yy)));
                HamiltonianTerm {
                    family: TermFamily::Rung,
                    op: LocalOperator::two(SiteIndex::a(i).chain_index(), SiteIndex::b(i).chain_index(), m),
                }
            });
            let bonds = (0..n0 - 1).map(|i| HamiltonianTerm {
                family: TermFamily::Bond,
                op: LocalOperator::two(
                    SiteIndex::a(i).chain_index(),
                    SiteIndex::a(i + 1).chain_index(),
                    zz_m.scale(c_re(-dp.j[i])),
                ),
            });
            rungs.chain(bonds).collect()
        }
        HalfPeriod::Second => (0..n0)
            .map(|i| HamiltonianTerm {
                family: TermFamily::Field,
                op: LocalOperator::one(
                    SiteIndex::b(i).chain_index(),
                    Pauli::X.matrix::<T>().scale(c_re(dp.m[i])),
                ),
            })
            .collect(),
    }
}

/// Single-qubit part of a Hermitian term, used by tests and the field exponentials.
pub fn field_matrix<T: Real>(m: T) -> Mat2<T> {
    Pauli::X.matrix::<T>().scale(c_re(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn make_params_examples() {
        let dtc = ModelParams::<f64>::from_angles(0.9, 0.16, 0.98, 1.0, 4).unwrap();
        assert!((dtc.h - 0.9 * PI).abs() < 1e-15);
        assert_eq!(dtc.n_sites(), 8);
        let thermal = ModelParams::<f64>::from_angles(0.52, 0.1, 0.98, 1.0, 8).unwrap();
        assert_eq!(thermal.n_sites(), 16);
        let solv = ModelParams::<f64>::new(PI, 0.0, PI, 1.0, 2).unwrap();
        assert_eq!(solv.omega, 2.0 * PI);
        assert_eq!(solv.omega * solv.period, 2.0 * PI);
    }

    #[test]
    fn make_params_rejects_bad_input() {
        assert!(ModelParams::<f64>::new(1.0, 1.0, 1.0, 0.0, 4).is_err());
        assert!(ModelParams::<f64>::new(1.0, 1.0, 1.0, -1.0, 4).is_err());
        assert!(ModelParams::<f64>::new(1.0, 1.0, 1.0, 1.0, 1).is_err());
        assert!(ModelParams::<f64>::new(f64::NAN, 1.0, 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn chain_mapping_is_bijective() {
        for q in 0..20 {
            assert_eq!(SiteIndex::from_chain(q).chain_index(), q);
        }
        assert_eq!(SiteIndex::a(3).chain_index(), 6);
        assert_eq!(SiteIndex::b(3).chain_index(), 7);
    }

    #[test]
    fn zero_width_disorder_is_clean() {
        let p = ModelParams::<f64>::from_angles(0.9, 0.16, 0.98, 1.0, 5).unwrap();
        let spec = DisorderSpec {
            n_realizations: 3,
            seed: 7,
            ..DisorderSpec::none()
        };
        for k in 0..3 {
            assert_eq!(sample_disorder(&p, &spec, k).unwrap(), p.clean());
        }
    }

    #[test]
    fn disorder_is_deterministic_and_index_checked() {
        let p = ModelParams::<f64>::from_angles(0.9, 0.16, 0.98, 1.0, 4).unwrap();
        let spec = DisorderSpec {
            dh: 0.08,
            n_realizations: 2,
            seed: 1,
            ..DisorderSpec::none()
        };
        let a = sample_disorder(&p, &spec, 0).unwrap();
        let b = sample_disorder(&p, &spec, 0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_disorder(&p, &spec, 1).unwrap());
        assert!(matches!(
            sample_disorder(&p, &spec, 2),
            Err(Error::RealizationOutOfRange { .. })
        ));
    }

    #[test]
    fn disorder_covers_uniform_interval() {
        // Expected coverage of the min/max of n uniforms is 1 - 2/(n+1); with
        // 10^4 draws the probability of covering < 99% is ~ 1e-21.
        let p = ModelParams::<f64>::from_angles(0.9, 0.16, 0.98, 1.0, 4).unwrap();
        let spec = DisorderSpec {
            dh: 0.12,
            n_realizations: 2500,
            seed: 99,
            ..DisorderSpec::none()
        };
        let samples: Vec<f64> = (0..spec.n_realizations)
            .flat_map(|k| sample_disorder(&p, &spec, k).unwrap().h)
            .collect();
        assert_eq!(samples.len(), 10_000);
        let (lo, hi) = (0.88 * p.h, 1.12 * p.h);
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(min >= lo && max <= hi);
        assert!((max - min) / (hi - lo) >= 0.99);
    }

    #[test]
    fn disorder_spec_validation() {
        let mut s = DisorderSpec::none();
        s.dh = 1.0;
        assert!(s.validate().is_err());
        s.dh = 0.1;
        s.n_realizations = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn term_families_and_counts() {
        let p = ModelParams::<f64>::from_angles(0.9, 0.16, 0.98, 1.0, 4)
            .unwrap()
            .clean();
        let first = hamiltonian_terms(&p, HalfPeriod::First, 0.0);
        assert_eq!(first.iter().filter(|t| t.family == TermFamily::Rung).count(), 4);
        assert_eq!(first.iter().filter(|t| t.family == TermFamily::Bond).count(), 3);
        let second = hamiltonian_terms(&p, HalfPeriod::Second, 0.7);
        assert_eq!(second.len(), 4);
        for t in &second {
            match t.op {
                LocalOperator::One { qubit, matrix } => {
                    assert_eq!(qubit % 2, 1);
                    assert_eq!(matrix, field_matrix(p.m[0]));
                }
                _ => panic!("field terms are single-site"),
            }
        }
        for t in first.iter().chain(&second) {
            assert!(t.op.is_hermitian(1e-15));
        }
        for t in first.iter().filter(|t| t.family == TermFamily::Bond) {
            let s = t.op.support();
            assert_eq!(s[1] - s[0], 2);
            assert_eq!(s[0] % 2, 0);
        }
    }

    #[test]
    fn yy_coefficient_follows_cosine() {
        let p = ModelParams::<f64>::from_angles(0.9, 0.16, 0.98, 1.0, 2)
            .unwrap()
            .clean();
        let yy_coeff = |t: f64| {
            let term = hamiltonian_terms(&p, HalfPeriod::First, t)[0];
            match term.op {
                // <00|YY|11> = -1, so the (0,3) entry is -coefficient.
                LocalOperator::Two { matrix, .. } => {
                    let xx = -p.h[0] / 2.0;
                    -(matrix.0[0][3].re - xx)
                }
                _ => unreachable!(),
            }
        };
        assert!((yy_coeff(0.0) - 2.0 * (-p.h[0] / 2.0) * -1.0).abs() < 1e-12);
        assert!((yy_coeff(0.25) - (p.h[0] / 2.0)).abs() < 1e-12);
    }
}
