//! Variational recompilation of stroboscopic states into fixed-depth circuits.
//!
//! For each `k` the ansatz `V` is fitted so that `V |up...up>` matches
//! `U^k |up...up>`; the circuit depth does not grow with `k`.

pub mod ansatz;
pub mod optimizer;
pub mod routing;
pub mod table;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evolution::{stroboscopic_states, TrotterSchedule};
use crate::model::DisorderedParams;
use crate::statevector::StateVector;

pub use ansatz::{build_ansatz, cost, parameter_count, AnsatzCircuit, AnsatzOp, CostKind, U3Gate};
pub use optimizer::{
    basin_hopping, basin_hopping_objective, minimize_box, Bounds, FiniteDifference, GradientMethod,
    Objective, OptimizerConfig,
};
pub use routing::{is_nearest_neighbour, route_circuit, route_next_nearest};
pub use table::ParameterTable;

/// Combined odd+even layers used unless configured otherwise.
pub const DEFAULT_LAYERS: usize = 3;

/// Half-width of the random initial angles for the first nontrivial step.
const INITIAL_ANGLE_SCALE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct RecompileResult {
    pub parameters: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub hops: usize,
    pub evaluations: usize,
    /// Best cost after the initial minimization and after each hop; non-increasing.
    pub hop_trace: Vec<f64>,
}

fn angle_bounds(n: usize) -> Bounds {
    Bounds::uniform(n, 0.0, std::f64::consts::TAU)
}

/// Minimizes the cost from `ansatz.parameters`.
pub fn optimize(
    ansatz: &AnsatzCircuit<f64>,
    target: &StateVector<f64>,
    config: &OptimizerConfig,
) -> Result<RecompileResult> {
    optimize_from(ansatz, target, config, &ansatz.parameters, 0)
}

/// Minimizes the cost from `x0`; `stream` decorrelates the hop kicks of independent runs.
pub fn optimize_from(
    ansatz: &AnsatzCircuit<f64>,
    target: &StateVector<f64>,
    config: &OptimizerConfig,
    x0: &[f64],
    stream: u64,
) -> Result<RecompileResult> {
    if target.n_qubits() != ansatz.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: ansatz.n_qubits,
            found: target.n_qubits(),
        });
    }
    if x0.len() != ansatz.n_params() {
        return Err(Error::DimensionMismatch {
            expected: ansatz.n_params(),
            found: x0.len(),
        });
    }
    let obj = AnsatzObjective {
        ansatz,
        target,
        kind: config.cost_kind,
    };
    let bounds = angle_bounds(x0.len());
    let r = match config.gradient {
        GradientMethod::Adjoint => basin_hopping_objective(&obj, x0, &bounds, config, stream)?,
        GradientMethod::FiniteDifference => {
            let f = |x: &[f64]| obj.value(x);
            let fd = FiniteDifference {
                f: &f,
                step: config.fd_step,
            };
            basin_hopping_objective(&fd, x0, &bounds, config, stream)?
        }
    };
    Ok(RecompileResult {
        parameters: r.x,
        cost: r.f,
        iterations: r.iterations,
        hops: r.hops,
        evaluations: r.evaluations,
        hop_trace: r.trace,
    })
}

/// Ansatz cost against a fixed target, with the adjoint-mode gradient.
struct AnsatzObjective<'a> {
    ansatz: &'a AnsatzCircuit<f64>,
    target: &'a StateVector<f64>,
    kind: CostKind,
}

impl Objective for AnsatzObjective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        cost(self.ansatz, x, self.target, self.kind).unwrap_or(f64::NAN)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self.ansatz.cost_and_gradient(x, self.target, self.kind) {
            Ok((_, g)) => g,
            Err(_) => vec![f64::NAN; x.len()],
        }
    }

    fn gradient_evaluations(&self, _n: usize) -> usize {
        3
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecompiledStep {
    pub k: usize,
    pub result: RecompileResult,
}

/// Fits one circuit per `k = 0 ..= k_max` against `U^k |up...up>`.
///
/// `k = 0` starts from zero angles and `k = 1` from small seeded random
/// angles. Later steps warm-start from whichever of the `k-1` and `k-4`
/// solutions has the lower cost on the new target.
pub fn recompile_stroboscopic_sequence(
    dp: &DisorderedParams<f64>,
    schedule: &TrotterSchedule<f64>,
    k_max: usize,
    n_layers: usize,
    config: &OptimizerConfig,
) -> Result<Vec<RecompiledStep>> {
    if k_max == 0 {
        return Err(crate::error::invalid(
            "k_max",
            "need at least one stroboscopic step",
        ));
    }
    let targets = stroboscopic_states(dp, schedule, k_max)?;
    let ansatz = build_ansatz::<f64>(dp.n_sites(), n_layers)?;
    let n_params = ansatz.n_params();
    let mut steps: Vec<RecompiledStep> = Vec::with_capacity(k_max + 1);
    for (k, target) in targets.iter().enumerate() {
        let x0 = match k {
            0 => vec![0.0; n_params],
            1 => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(u64::MAX);
                (0..n_params)
                    .map(|_| INITIAL_ANGLE_SCALE * rng.random::<f64>())
                    .collect()
            }
            _ => {
                let mut candidates = vec![&steps[k - 1].result.parameters];
                if k >= 5 {
                    candidates.push(&steps[k - 4].result.parameters);
                }
                let scored = candidates.into_iter().map(|p| {
                    let c = cost(&ansatz, p, target, config.cost_kind).unwrap_or(f64::INFINITY);
                    (c, p)
                });
                scored
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(_, p)| p.clone())
                    .expect("at least one candidate")
            }
        };
        let result = optimize_from(&ansatz, target, config, &x0, k as u64)?;
        steps.push(RecompiledStep { k, result });
    }
    Ok(steps)
}

/// Mean a-chain `<sigma^z>` of `V(params) |up...up>`.
pub fn recompiled_sz(ansatz: &AnsatzCircuit<f64>, params: &[f64]) -> Result<f64> {
    let s = ansatz.prepare(params)?;
    let prof = s.z_profile();
    let a: Vec<f64> = prof.into_iter().step_by(2).collect();
    Ok(a.iter().sum::<f64>() / a.len() as f64)
}

pub fn table_from_steps(n_qubits: usize, n_layers: usize, steps: &[RecompiledStep]) -> ParameterTable {
    ParameterTable {
        n_qubits,
        n_layers,
        entries: steps.iter().map(|s| (s.k, s.result.parameters.clone())).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat4;
    use crate::model::ModelParams;
    use crate::scalar::C;

    #[test]
    fn identity_target_is_already_optimal() {
        let a = build_ansatz::<f64>(4, 3).unwrap();
        let target = StateVector::all_up(4).unwrap();
        let r = optimize(&a, &target, &OptimizerConfig::default()).unwrap();
        assert!(r.cost < 1e-8);
        assert_eq!(r.hops, 0);
    }

    #[test]
    fn gradient_methods_reach_the_same_fit() {
        let dp = ModelParams::<f64>::from_angles(0.9, 0.16, 0.98, 1.0, 2)
            .unwrap()
            .clean();
        let target = stroboscopic_states(&dp, &TrotterSchedule::default_for(1.0), 1)
            .unwrap()
            .pop()
            .unwrap();
        let a = build_ansatz::<f64>(4, 3).unwrap();
        let x0 = vec![0.1; a.n_params()];
        for gradient in [GradientMethod::Adjoint, GradientMethod::FiniteDifference] {
            let cfg = OptimizerConfig {
                gradient,
                ..Default::default()
            };
            let r = optimize_from(&a, &target, &cfg, &x0, 0).unwrap();
            assert!(r.cost < 1e-3, "{gradient:?}: {}", r.cost);
        }
    }

    #[test]
    fn cost_matches_dense_product_oracle() {
        use rand::{Rng, SeedableRng};
        let a = build_ansatz::<f64>(4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p: Vec<f64> = (0..a.n_params()).map(|_| rng.random::<f64>() * 6.28).collect();
        let target = {
            let mut s = StateVector::all_up(4).unwrap();
            s.apply_gate(&crate::GateOp::two(
                1,
                2,
                crate::two_site_expm(0.3, 0.1, 0.2, 1.0),
            ))
            .unwrap();
            s
        };
        // Explicit 16x16 matrices, multiplied in gate order.
        let dim = 16;
        let embed = |g: &crate::GateOp<f64>| -> Vec<Vec<C<f64>>> {
            let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
            for col in 0..dim {
                let mut s = StateVector::basis_state(4, col).unwrap();
                s.apply_gate(g).unwrap();
                for row in 0..dim {
                    m[row][col] = s.amplitudes()[row];
                }
            }
            m
        };
        let mut v: Vec<Vec<C<f64>>> = (0..dim)
            .map(|i| (0..dim).map(|j| C::new((i == j) as u8 as f64, 0.0)).collect())
            .collect();
        for g in a.gates(&p).unwrap() {
            let m = embed(&g);
            v = (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| (0..dim).map(|l| m[i][l] * v[l][j]).sum())
                        .collect()
                })
                .collect();
        }
        let overlap: C<f64> = (0..dim).map(|i| v[i][0].conj() * target.amplitudes()[i]).sum();
        let oracle = 1.0 - overlap.re;
        let c = cost(&a, &p, &target, CostKind::RealOverlap).unwrap();
        assert!((c - oracle).abs() < 1e-12);
        let _ = Mat4::<f64>::cx();
    }

    #[test]
    fn short_sequence_fits_and_is_deterministic() {
        let dp = ModelParams::<f64>::from_angles(0.9, 0.16, 0.98, 1.0, 2)
            .unwrap()
            .clean();
        let sched = TrotterSchedule::default_for(1.0);
        let cfg = OptimizerConfig::default();
        let steps = recompile_stroboscopic_sequence(&dp, &sched, 2, 3, &cfg).unwrap();
        assert_eq!(steps.len(), 3);
        assert!(steps[0].result.cost < 1e-8);
        for s in &steps {
            assert!(s.result.cost < 1e-3, "k={} cost={}", s.k, s.result.cost);
            assert!(s.result.hop_trace.windows(2).all(|w| w[1] <= w[0]));
            assert!(angle_bounds(s.result.parameters.len()).contains(&s.result.parameters));
        }
        assert_eq!(
            steps,
            recompile_stroboscopic_sequence(&dp, &sched, 2, 3, &cfg).unwrap()
        );
    }
}
