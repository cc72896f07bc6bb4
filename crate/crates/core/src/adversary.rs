//! Randomized lower-bound instances.
//!
//! A complete binary tree with `m` leaves carries `d` variables on every
//! edge. Each leaf has a packing row summing the variables on its root
//! path. A random leaf is drawn; every inner node on its root path then
//! issues `log2 d` unit covering constraints over the variables of its two
//! child edges, halving both active sets at random after each one. Offline,
//! one surviving variable on the child edge off the path covers each node,
//! so violation 1 is achievable, while any online algorithm pays about
//! `(log2 m - 1) log2 d / 4` in expectation along the path.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ompc::{
    CoveringConstraint, CoveringSolver, OnlineSolver, PackingSystem, PlantedCertificate, PotentialParams,
    SparsePackingSystem, VarId, VariableSet,
};
use crate::oracles::ExactOracle;
use crate::{seed, Error, Result};

fn log2_exact(x: usize, what: &str) -> Result<u32> {
    if x < 2 || !x.is_power_of_two() {
        return Err(Error::instance(format!("{what} = {x} must be a power of two, at least 2")));
    }
    Ok(x.trailing_zeros())
}

/// The packing side: tree nodes are heap-numbered (root 1, children `2c`
/// and `2c + 1`, leaves `m..2m`), and the edge above node `c` owns
/// variables `(c - 2) d .. (c - 1) d`.
#[derive(Debug, Clone)]
pub struct AdversaryInstance {
    m: usize,
    d: usize,
    system: SparsePackingSystem,
}

impl AdversaryInstance {
    pub fn new(m: usize, d: usize) -> Result<Self> {
        log2_exact(m, "m")?;
        let k = log2_exact(d, "d")? as usize;
        let mut system = SparsePackingSystem::new(m, k)?;
        for c in 2..2 * m {
            let (lo, hi) = leaf_range(c, m);
            let column: Vec<(usize, f64)> = (lo..=hi).map(|leaf| (leaf - m, 1.0)).collect();
            for j in 0..d {
                system.add_variable(format!("e{c}_{j}"), &column)?;
            }
        }
        Ok(Self { m, d, system })
    }

    pub fn leaves(&self) -> usize {
        self.m
    }

    pub fn width(&self) -> usize {
        self.d
    }

    pub fn frequency(&self) -> usize {
        self.system.frequency()
    }

    pub fn system(&self) -> &SparsePackingSystem {
        &self.system
    }

    /// Variables on the edge above node `child`.
    pub fn edge_vars(&self, child: usize) -> Vec<VarId> {
        let base = (child - 2) * self.d;
        (base..base + self.d).map(|i| VarId(i as u32)).collect()
    }

    /// Lower bound on the expected violation of any online algorithm.
    pub fn lower_bound(&self) -> f64 {
        0.25 * ((self.m as f64).log2() - 1.0) * (self.d as f64).log2()
    }

    /// Guaranteed cap for the online solver: `k log_rho(gamma m / (gamma - 1))`.
    pub fn upper_bound(&self, params: &PotentialParams) -> f64 {
        self.frequency() as f64 * params.load_cap(self.m)
    }
}

fn leaf_range(c: usize, m: usize) -> (usize, usize) {
    let (mut lo, mut hi) = (c, c);
    while lo < m {
        lo *= 2;
        hi = 2 * hi + 1;
    }
    (lo, hi)
}

/// The random covering stream for one drawn leaf.
#[derive(Debug, Clone)]
pub struct AdversaryRun {
    leaf: usize,
    /// Inner nodes from the root down to the leaf's parent.
    path: Vec<usize>,
    rounds: usize,
    node: usize,
    round: usize,
    active: [Vec<VarId>; 2],
    /// Off-path survivor per finished node.
    survivors: Vec<VarId>,
    emitted: Vec<CoveringConstraint>,
    rng: ChaCha8Rng,
}

impl AdversaryRun {
    pub fn new(inst: &AdversaryInstance, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        let leaf = rng.gen_range(inst.m..2 * inst.m);
        let mut path = Vec::new();
        let mut v = leaf / 2;
        while v >= 1 {
            path.push(v);
            v /= 2;
        }
        path.reverse();
        let mut run = Self {
            leaf,
            path,
            rounds: inst.d.trailing_zeros() as usize,
            node: 0,
            round: 0,
            active: [Vec::new(), Vec::new()],
            survivors: Vec::new(),
            emitted: Vec::new(),
            rng,
        };
        run.load_node(inst);
        run
    }

    fn load_node(&mut self, inst: &AdversaryInstance) {
        if let Some(&v) = self.path.get(self.node) {
            self.active = [inst.edge_vars(2 * v), inst.edge_vars(2 * v + 1)];
        }
    }

    pub fn leaf(&self) -> usize {
        self.leaf
    }

    pub fn path(&self) -> &[usize] {
        &self.path
    }

    pub fn emitted(&self) -> &[CoveringConstraint] {
        &self.emitted
    }

    pub fn total_constraints(&self) -> usize {
        self.path.len() * self.rounds
    }

    pub fn is_exhausted(&self) -> bool {
        self.node == self.path.len()
    }

    /// Child of node `v` that lies on the drawn path.
    fn path_child(&self, v: usize) -> usize {
        let mut x = self.leaf;
        while x / 2 != v {
            x /= 2;
        }
        x
    }

    /// Emits the constraint over both active sets, then halves each set.
    pub fn next_constraint(&mut self, inst: &AdversaryInstance) -> Result<CoveringConstraint> {
        if self.is_exhausted() {
            return Err(Error::StreamEnd);
        }
        let c = CoveringConstraint::unit(self.active[0].iter().chain(&self.active[1]).copied())?;
        for side in &mut self.active {
            side.shuffle(&mut self.rng);
            side.truncate(side.len() / 2);
        }
        self.round += 1;
        if self.round == self.rounds {
            let v = self.path[self.node];
            let off = usize::from(self.path_child(v) == 2 * v);
            self.survivors.push(self.active[off][0]);
            self.round = 0;
            self.node += 1;
            self.load_node(inst);
        }
        self.emitted.push(c.clone());
        Ok(c)
    }

    /// One off-path survivor per inner node, checked against every emitted
    /// constraint and every packing row.
    pub fn offline_opt(&self, inst: &AdversaryInstance) -> Result<PlantedCertificate> {
        if !self.is_exhausted() {
            return Err(Error::Certificate("run is not finished".into()));
        }
        let cert = PlantedCertificate::new(VariableSet::new(self.survivors.clone()), inst.system())?;
        for c in &self.emitted {
            cert.check(c)?;
        }
        Ok(cert)
    }
}

/// `generate(m, d, seed)`: the instance and the run it drives.
pub fn generate(m: usize, d: usize, seed: u64) -> Result<(AdversaryInstance, AdversaryRun)> {
    let inst = AdversaryInstance::new(m, d)?;
    let run = AdversaryRun::new(&inst, seed);
    Ok((inst, run))
}

/// `P_i x` for every packing row.
pub fn packing_values<'a>(sys: &dyn PackingSystem, vars: impl IntoIterator<Item = &'a VarId>) -> Result<Vec<f64>> {
    let mut out = vec![0.0; sys.num_constraints()];
    for &v in vars {
        for &(r, p) in sys.column(v)? {
            out[r] += p;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub leaf: usize,
    pub max_violation: f64,
    pub certificate_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarySummary {
    pub m: usize,
    pub d: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub min: f64,
    pub p50: f64,
    pub p90: f64,
    pub max: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub certificate_failures: usize,
}

impl AdversarySummary {
    /// Mean inside `[lower_slack * lower_bound, upper_bound]`.
    pub fn within(&self, lower_slack: f64) -> bool {
        self.mean >= lower_slack * self.lower_bound && self.mean <= self.upper_bound
    }
}

/// Plays one stream against a solver and returns the record.
pub fn play<S: CoveringSolver + ?Sized>(
    inst: &AdversaryInstance,
    mut run: AdversaryRun,
    solver: &mut S,
    trial: usize,
    seed: u64,
) -> Result<TrialRecord> {
    while !run.is_exhausted() {
        let c = run.next_constraint(inst)?;
        solver.arrive(&c)?;
    }
    let values = packing_values(inst.system(), solver.committed())?;
    Ok(TrialRecord {
        trial,
        seed,
        leaf: run.leaf(),
        max_violation: values.into_iter().fold(0.0, f64::max),
        certificate_ok: run.offline_opt(inst).is_ok(),
    })
}

/// Runs `trials` independent streams against the online solver with the
/// exact oracle. Trial `i` uses seed [`seed::trial_seed`]`(seed, i)`.
pub fn evaluate(
    m: usize,
    d: usize,
    trials: usize,
    seed: u64,
    params: PotentialParams,
) -> Result<(Vec<TrialRecord>, AdversarySummary)> {
    evaluate_with(m, d, trials, seed, params, |inst, params| {
        Box::new(OnlineSolver::new(inst.system(), ExactOracle::with_cap(2 * inst.width()), params))
    })
}

/// Same as [`evaluate`] for any solver built by `factory`.
pub fn evaluate_with<F>(
    m: usize,
    d: usize,
    trials: usize,
    seed: u64,
    params: PotentialParams,
    factory: F,
) -> Result<(Vec<TrialRecord>, AdversarySummary)>
where
    F: for<'a> Fn(&'a AdversaryInstance, PotentialParams) -> Box<dyn CoveringSolver + 'a> + Sync,
{
    if trials == 0 {
        return Err(Error::instance("at least one trial is required"));
    }
    let inst = AdversaryInstance::new(m, d)?;
    let records = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = seed::trial_seed(seed, t as u64);
            let run = AdversaryRun::new(&inst, s);
            let mut solver = factory(&inst, params);
            play(&inst, run, solver.as_mut(), t, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sorted: Vec<f64> = records.iter().map(|r| r.max_violation).collect();
    sorted.sort_by(f64::total_cmp);
    let rank = |q: f64| sorted[((q * trials as f64).ceil() as usize).clamp(1, trials) - 1];
    let summary = AdversarySummary {
        m,
        d,
        k: inst.frequency(),
        trials,
        seed,
        mean: sorted.iter().sum::<f64>() / trials as f64,
        min: sorted[0],
        p50: rank(0.5),
        p90: rank(0.9),
        max: sorted[trials - 1],
        lower_bound: inst.lower_bound(),
        upper_bound: inst.upper_bound(&params),
        certificate_failures: records.iter().filter(|r| !r.certificate_ok).count(),
    };
    Ok((records, summary))
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial,seed,max_violation\n");
    for r in records {
        out.push_str(&format!("{},{},{}\n", r.trial, r.seed, r.max_violation));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::collections::HashMap;

    #[test]
    fn counts_for_small_instances() {
        let (inst, run) = generate(4, 2, 1).unwrap();
        assert_eq!(inst.system().num_variables(), 12);
        assert_eq!(inst.system().num_constraints(), 4);
        assert_eq!(run.path().len(), 2);
        assert_eq!(run.total_constraints(), 2);

        let (inst, run) = generate(2, 2, 1).unwrap();
        assert_eq!(inst.system().num_variables(), 4);
        assert_eq!(run.total_constraints(), 1);
        assert!(generate(6, 2, 1).is_err());
        assert!(generate(4, 3, 1).is_err());
        assert!(generate(1, 2, 1).is_err());
    }

    #[test]
    fn supports_halve_each_round() {
        let (inst, mut run) = generate(8, 4, 3).unwrap();
        let sizes: Vec<usize> = (0..run.total_constraints())
            .map(|_| run.next_constraint(&inst).unwrap().support_len())
            .collect();
        assert_eq!(sizes, vec![8, 4, 8, 4, 8, 4]);
        assert!(matches!(run.next_constraint(&inst), Err(Error::StreamEnd)));
    }

    #[test]
    fn final_round_support_for_width_sixteen() {
        let (inst, mut run) = generate(2, 16, 8).unwrap();
        let sizes: Vec<usize> = (0..4).map(|_| run.next_constraint(&inst).unwrap().support_len()).collect();
        assert_eq!(sizes, vec![32, 16, 8, 4]);
    }

    #[test]
    fn frequency_is_log_d() {
        let (inst, mut run) = generate(8, 8, 5).unwrap();
        let mut seen: HashMap<VarId, usize> = HashMap::new();
        while !run.is_exhausted() {
            for v in run.next_constraint(&inst).unwrap().support() {
                *seen.entry(v).or_default() += 1;
            }
        }
        assert!(seen.values().all(|&c| c <= 3));
        assert_eq!(inst.frequency(), 3);
    }

    #[test]
    fn certificate_uses_off_path_survivors() {
        for s in 0..20 {
            let (inst, mut run) = generate(2, 2, s).unwrap();
            let c = run.next_constraint(&inst).unwrap();
            let cert = run.offline_opt(&inst).unwrap();
            assert_eq!(cert.assignment().len(), 1);
            let x = cert.assignment().as_slice()[0];
            // off-path edge of the root is the sibling of the leaf
            let off = if run.leaf() == 2 { 3 } else { 2 };
            assert!(inst.edge_vars(off).contains(&x));
            assert!(c.coverage(cert.assignment()) >= 1.0);
        }
    }

    #[test]
    fn certificates_validate_on_larger_runs() {
        for s in 0..10 {
            let (inst, mut run) = generate(16, 16, s).unwrap();
            assert!(run.offline_opt(&inst).is_err());
            while !run.is_exhausted() {
                run.next_constraint(&inst).unwrap();
            }
            let cert = run.offline_opt(&inst).unwrap();
            let values = packing_values(inst.system(), cert.assignment().as_slice()).unwrap();
            assert_eq!(values.iter().copied().fold(0.0, f64::max), 1.0);
        }
    }

    #[test]
    fn bound_formulas() {
        let p = PotentialParams::default();
        assert_eq!(AdversaryInstance::new(4, 4).unwrap().lower_bound(), 0.5);
        let big = AdversaryInstance::new(16, 16).unwrap();
        assert_eq!(big.lower_bound(), 3.0);
        assert_relative_eq!(big.upper_bound(&p), 4.0 * 32f64.ln() / 1.5f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(big.upper_bound(&p), 34.19, epsilon = 0.005);
    }

    #[test]
    fn evaluation_is_ordered_and_reproducible() {
        let p = PotentialParams::default();
        let (a, sa) = evaluate(4, 4, 12, 7, p).unwrap();
        let (b, sb) = evaluate(4, 4, 12, 7, p).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        assert!(a.iter().enumerate().all(|(i, r)| r.trial == i));
        assert_eq!(sa.certificate_failures, 0);
        assert!(sa.max <= sa.upper_bound);
    }
}
