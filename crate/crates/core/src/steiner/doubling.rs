use serde::Serialize;

use super::contraction::ContractionState;
use super::engine::{OnlineSolution, SteinerEngine};
use super::graph::{DemandStream, WeightedGraph};
use crate::ompc::PotentialParams;
use crate::oracles::PathSelector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseEnd {
    /// Serving the next demand would have pushed a load above the threshold.
    Breach,
    /// No path fits the weight guess.
    Infeasible,
    /// The stream ended inside this phase.
    Completed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRecord {
    /// 1-based.
    pub phase: usize,
    pub guess: f64,
    /// Index of the first demand served in this phase.
    pub first_demand: usize,
    pub demands: usize,
    /// Largest scaled load reached inside the phase.
    pub max_load: f64,
    /// Weight bought inside the phase.
    pub weight: f64,
    /// Steps committed above the threshold because the guess could no
    /// longer grow usefully.
    pub forced: usize,
    pub end: PhaseEnd,
}

#[derive(Debug, Clone)]
pub struct DoublingOutcome {
    /// Union of all phases: nothing bought is ever dropped.
    pub solution: OnlineSolution,
    pub phases: Vec<PhaseRecord>,
    /// Per-phase load threshold `log_rho(gamma m / (gamma - 1))`.
    pub threshold: f64,
    /// Phase index (1-based) that served each demand.
    pub demand_phase: Vec<usize>,
}

impl DoublingOutcome {
    pub fn final_guess(&self) -> f64 {
        self.phases.last().map_or(0.0, |p| p.guess)
    }
}

/// Runs the online algorithm without knowing the optimal weight.
///
/// The first guess is the lightest edge weight. A phase ends as soon as the
/// next step would push some scaled load above the threshold, or no path
/// fits the guess; the step is not taken, the guess is multiplied by
/// `ratio`, loads restart from zero and the same demand is retried. Edges
/// bought in earlier phases stay bought and earlier demands stay contracted.
///
/// Once the guess reaches the total graph weight the weight row can no
/// longer be what blocks a step, so further breaches are committed anyway
/// and counted in [`PhaseRecord::forced`]; an infeasible step at that point
/// means the demand cannot be routed at all.
pub fn run_with_doubling<P: PathSelector + Clone>(
    graph: &WeightedGraph,
    stream: &DemandStream,
    ratio: f64,
    selector: P,
    params: PotentialParams,
) -> Result<DoublingOutcome> {
    if !(ratio.is_finite() && ratio >= 2.0) {
        return Err(Error::instance(format!("doubling ratio {ratio} must be at least 2")));
    }
    let threshold = params.load_cap(graph.n() + 1);
    let saturated = graph.total_weight();
    let mut guess = graph
        .min_weight()
        .ok_or_else(|| Error::instance("graph has no edges"))?;
    let mut contraction = ContractionState::new(graph.n());
    let mut solution = OnlineSolution::new(graph.n());
    let mut phases = Vec::new();
    let mut demand_phase = Vec::with_capacity(stream.len());

    loop {
        let phase = phases.len() + 1;
        let first = demand_phase.len();
        let mut engine = SteinerEngine::resume(graph, guess, selector.clone(), params, contraction, first)?;
        let mut forced = 0;
        let mut end = PhaseEnd::Completed;
        for d in stream.iter().skip(first) {
            match engine.plan(d)? {
                None if guess >= saturated => return Err(Error::Unservable { demand: engine.served() }),
                None => {
                    end = PhaseEnd::Infeasible;
                    break;
                }
                Some(plan) => {
                    if engine.state().max_load_with(&plan.delta) > threshold {
                        if guess < saturated {
                            end = PhaseEnd::Breach;
                            break;
                        }
                        forced += 1;
                    }
                    let aug = engine.commit(d, plan)?.clone();
                    demand_phase.push(phase);
                    solution.push(graph, aug);
                }
            }
        }
        let max_load = engine.state().max_load();
        let (c, phase_solution, _) = engine.into_parts();
        contraction = c;
        phases.push(PhaseRecord {
            phase,
            guess,
            first_demand: first,
            demands: phase_solution.augmentations().len(),
            max_load,
            weight: phase_solution.weight(),
            forced,
            end,
        });
        if end == PhaseEnd::Completed {
            break;
        }
        guess *= ratio;
    }
    Ok(DoublingOutcome {
        solution,
        phases,
        threshold,
        demand_phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{ExactPathOracle, PathOracleKind};
    use crate::steiner::fixtures::{sample_demands, sample_graph};

    #[test]
    fn sample_guesses_double_from_the_lightest_edge() {
        let g = sample_graph();
        let stream = sample_demands(&g);
        let out = run_with_doubling(&g, &stream, 2.0, ExactPathOracle::default(), PotentialParams::default()).unwrap();
        let guesses: Vec<f64> = out.phases.iter().map(|p| p.guess).collect();
        // w_opt = 5: the run stops by the time the guess passes it
        assert!(guesses.len() <= 4, "{guesses:?}");
        for (i, &w) in guesses.iter().enumerate() {
            assert_eq!(w, 2f64.powi(i as i32));
        }
        assert!(out.solution.connects(&g, stream.as_slice()));
        assert_eq!(out.demand_phase.len(), 2);
        for p in &out.phases {
            assert!(p.max_load <= out.threshold);
            assert_eq!(p.forced, 0);
        }
    }

    #[test]
    fn cumulative_weight_follows_the_geometric_sum() {
        let g = sample_graph();
        let stream = sample_demands(&g);
        let out = run_with_doubling(&g, &stream, 2.0, PathOracleKind::Surrogate, PotentialParams::default()).unwrap();
        let total: f64 = out.phases.iter().map(|p| p.weight).sum();
        assert_eq!(total, out.solution.weight());
        assert!(total < 2.0 * out.threshold * out.final_guess());
    }

    #[test]
    fn unroutable_demand_is_reported() {
        let g = WeightedGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)], vec![2, 1, 2]).unwrap();
        let stream = DemandStream::new(&g, &[(0, 2)]).unwrap();
        let err = run_with_doubling(&g, &stream, 2.0, PathOracleKind::Surrogate, PotentialParams::default()).unwrap_err();
        assert!(matches!(err, Error::Unservable { demand: 0 }));
    }

    #[test]
    fn ratio_below_two_is_rejected() {
        let g = sample_graph();
        let stream = sample_demands(&g);
        assert!(run_with_doubling(&g, &stream, 1.5, PathOracleKind::Surrogate, PotentialParams::default()).is_err());
    }
}
