use super::{OfflineResult, Witness};
use crate::ompc::{CoveringConstraint, PackingSystem, SparsePackingSystem, VarId};
use crate::{Error, Result};

pub const OMPC_VARIABLE_CAP: usize = 22;

/// `max_i P_i x` for a 0/1 assignment.
pub fn ompc_violation(sys: &dyn PackingSystem, ones: &[VarId]) -> Result<f64> {
    let mut rows = vec![0.0; sys.num_constraints()];
    for &v in ones {
        for &(r, p) in sys.column(v)? {
            rows[r] += p;
        }
    }
    Ok(rows.into_iter().fold(0.0, f64::max))
}

struct Search<'a> {
    columns: Vec<&'a [(usize, f64)]>,
    /// Covering rows each variable appears in, with its coefficient.
    covers: Vec<Vec<(usize, f64)>>,
    /// Coverage still obtainable from variables `i..` per covering row.
    suffix: Vec<Vec<f64>>,
    packing: Vec<f64>,
    covering: Vec<f64>,
    chosen: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, i: usize, alpha: f64) {
        self.nodes += 1;
        if self.best.as_ref().is_some_and(|b| alpha >= b.0) {
            return;
        }
        let uncovered = self.covering.iter().any(|&c| c < 1.0 - 1e-12);
        if !uncovered {
            self.best = Some((alpha, self.chosen.clone()));
            return;
        }
        if i == self.columns.len() {
            return;
        }
        if self
            .covering
            .iter()
            .zip(&self.suffix[i])
            .any(|(&c, &s)| c + s < 1.0 - 1e-12)
        {
            return;
        }
        let mut next = alpha;
        for &(r, p) in self.columns[i] {
            self.packing[r] += p;
            next = next.max(self.packing[r]);
        }
        for &(r, c) in &self.covers[i] {
            self.covering[r] += c;
        }
        self.chosen.push(i);
        self.run(i + 1, next);
        self.chosen.pop();
        for &(r, c) in &self.covers[i] {
            self.covering[r] -= c;
        }
        for &(r, p) in self.columns[i] {
            self.packing[r] -= p;
        }
        self.run(i + 1, alpha);
    }
}

/// Minimum over 0/1 assignments of `max_i P_i x` subject to every covering
/// constraint reaching 1.
pub fn offline_ompc_opt(sys: &SparsePackingSystem, covering: &[CoveringConstraint]) -> Result<OfflineResult> {
    let n = sys.num_variables();
    if n > OMPC_VARIABLE_CAP {
        return Err(Error::Capacity {
            what: "variable set",
            size: n,
            cap: OMPC_VARIABLE_CAP,
        });
    }
    let vars: Vec<VarId> = sys.variables().collect();
    let mut covers = vec![Vec::new(); n];
    for (j, c) in covering.iter().enumerate() {
        for (v, coeff) in c.iter() {
            let idx = v.0 as usize;
            if idx >= n {
                return Err(Error::instance(format!("covering constraint {j} uses unknown {v}")));
            }
            covers[idx].push((j, coeff));
        }
    }
    let mut suffix = vec![vec![0.0; covering.len()]; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1].clone();
        for &(j, c) in &covers[i] {
            suffix[i][j] += c;
        }
    }
    let mut search = Search {
        columns: vars.iter().map(|&v| sys.column(v)).collect::<Result<_>>()?,
        covers,
        suffix,
        packing: vec![0.0; sys.num_constraints()],
        covering: vec![0.0; covering.len()],
        chosen: Vec::new(),
        best: None,
        nodes: 0,
    };
    search.run(0, 0.0);
    let (objective, chosen) = search.best.ok_or(Error::Infeasible)?;
    let ones: Vec<VarId> = chosen.into_iter().map(|i| vars[i]).collect();
    let check = ompc_violation(sys, &ones)?;
    if (check - objective).abs() > 1e-9 || covering.iter().any(|c| c.coverage(&ones.iter().copied().collect()) < 1.0 - 1e-12) {
        return Err(Error::Invariant("offline witness does not re-validate".into()));
    }
    Ok(OfflineResult {
        objective,
        witness: Witness::Variables(ones),
        nodes: search.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::generate;

    #[test]
    fn single_variable() {
        let mut sys = SparsePackingSystem::new(1, 1).unwrap();
        let a = sys.add_variable("a", &[(0, 0.7)]).unwrap();
        let c = CoveringConstraint::new([(a, 1.0)]).unwrap();
        let r = offline_ompc_opt(&sys, &[c]).unwrap();
        assert_eq!(r.objective, 0.7);
        assert_eq!(r.witness, Witness::Variables(vec![a]));
    }

    #[test]
    fn uncoverable_is_infeasible() {
        let mut sys = SparsePackingSystem::new(1, 1).unwrap();
        let a = sys.add_variable("a", &[(0, 0.7)]).unwrap();
        let b = sys.add_variable("b", &[(0, 0.7)]).unwrap();
        let c = CoveringConstraint::new([(a, 0.4), (b, 0.4)]).unwrap();
        assert!(matches!(offline_ompc_opt(&sys, &[c]), Err(Error::Infeasible)));
    }

    #[test]
    fn planted_adversary_has_unit_optimum() {
        for s in 0..5 {
            let (inst, mut run) = generate(2, 4, s).unwrap();
            let mut cs = Vec::new();
            while !run.is_exhausted() {
                cs.push(run.next_constraint(&inst).unwrap());
            }
            let r = offline_ompc_opt(inst.system(), &cs).unwrap();
            assert_eq!(r.objective, 1.0);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let mut sys = SparsePackingSystem::new(1, 1).unwrap();
        for i in 0..23 {
            sys.add_variable(format!("v{i}"), &[(0, 1.0)]).unwrap();
        }
        assert!(matches!(offline_ompc_opt(&sys, &[]), Err(Error::Capacity { .. })));
    }

    #[test]
    fn matches_full_enumeration() {
        use rand::Rng;
        let mut rng = crate::seed::rng(21);
        for _ in 0..40 {
            let rows = rng.gen_range(1..4);
            let n = rng.gen_range(1..9);
            let mut sys = SparsePackingSystem::new(rows, 3).unwrap();
            let vars: Vec<VarId> = (0..n)
                .map(|i| {
                    let col: Vec<(usize, f64)> = (0..rows).map(|r| (r, rng.gen_range(0.0..1.0))).collect();
                    sys.add_variable(format!("v{i}"), &col).unwrap()
                })
                .collect();
            let cs: Vec<CoveringConstraint> = (0..rng.gen_range(1..4))
                .map(|_| CoveringConstraint::new(vars.iter().map(|&v| (v, rng.gen_range(0.2..1.0)))).unwrap())
                .collect();
            let mut best = f64::INFINITY;
            for mask in 0u32..1 << n {
                let ones: Vec<VarId> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| vars[i]).collect();
                let set = ones.iter().copied().collect();
                if cs.iter().all(|c| c.coverage(&set) >= 1.0 - 1e-12) {
                    best = best.min(ompc_violation(&sys, &ones).unwrap());
                }
            }
            match offline_ompc_opt(&sys, &cs) {
                Ok(r) => assert!((r.objective - best).abs() < 1e-12),
                Err(Error::Infeasible) => assert!(best.is_infinite()),
                Err(e) => panic!("{e}"),
            }
        }
    }
}
