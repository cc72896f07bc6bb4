use std::cmp::Ordering;

use super::SetOracle;
use crate::ompc::{
    delta_vector, CoveringConstraint, PackingSystem, SolverState, VarId, VariableSet, FEASIBILITY_EPS,
};
use crate::{Error, Result};

/// Exact argmin of `tau` over satisfying subsets of the constraint support.
///
/// Ties are broken by smaller cardinality, then by the lexicographically
/// smallest sorted id list. Branch and bound relies on `tau` and every
/// scaled row load being monotone under set inclusion: a branch stops as
/// soon as its set covers the constraint, overloads a row, or costs more
/// than the incumbent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOracle {
    cap: usize,
}

impl Default for ExactOracle {
    fn default() -> Self {
        Self { cap: 20 }
    }
}

impl ExactOracle {
    pub fn with_cap(cap: usize) -> Self {
        Self { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }
}

struct Candidate {
    tau: f64,
    set: VariableSet,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        match self.tau.total_cmp(&other.tau) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => (self.set.len(), &self.set) < (other.set.len(), &other.set),
        }
    }
}

struct Search<'a> {
    state: &'a SolverState,
    sys: &'a dyn PackingSystem,
    vars: Vec<VarId>,
    cover: Vec<f64>,
    suffix_cover: Vec<f64>,
    scaled: Vec<Vec<(usize, f64)>>,
    acc: Vec<f64>,
    touched: Vec<usize>,
    chosen: Vec<VarId>,
    best: Option<Candidate>,
}

impl Search<'_> {
    fn partial_tau(&self) -> f64 {
        let p = self.state.params();
        self.touched
            .iter()
            .map(|&r| p.increment(self.state.load(r), self.acc[r]))
            .sum()
    }

    fn bound_exceeded(&self, tau: f64) -> bool {
        match &self.best {
            Some(b) => tau > b.tau + 1e-12 * (1.0 + b.tau.abs()),
            None => false,
        }
    }

    fn offer(&mut self) -> Result<()> {
        let set = VariableSet::new(self.chosen.clone());
        let tau = self.state.tau(&delta_vector(&set, self.sys)?);
        let cand = Candidate { tau, set };
        if self.best.as_ref().is_none_or(|b| cand.better_than(b)) {
            self.best = Some(cand);
        }
        Ok(())
    }

    fn run(&mut self, idx: usize, coverage: f64) -> Result<()> {
        if coverage >= 1.0 - FEASIBILITY_EPS {
            return self.offer();
        }
        if idx == self.vars.len() || coverage + self.suffix_cover[idx] < 1.0 - FEASIBILITY_EPS {
            return Ok(());
        }

        // include vars[idx]
        let col = std::mem::take(&mut self.scaled[idx]);
        let saved: Vec<f64> = col.iter().map(|&(r, _)| self.acc[r]).collect();
        let touched_before = self.touched.len();
        let mut overloaded = false;
        for &(r, d) in &col {
            if self.acc[r] == 0.0 {
                self.touched.push(r);
            }
            self.acc[r] += d;
            overloaded |= self.acc[r] > 1.0 + FEASIBILITY_EPS;
        }
        if !overloaded && !self.bound_exceeded(self.partial_tau()) {
            self.chosen.push(self.vars[idx]);
            self.run(idx + 1, coverage + self.cover[idx])?;
            self.chosen.pop();
        }
        for (&(r, _), &old) in col.iter().zip(&saved) {
            self.acc[r] = old;
        }
        self.touched.truncate(touched_before);
        self.scaled[idx] = col;

        // exclude vars[idx]
        self.run(idx + 1, coverage)
    }
}

impl SetOracle for ExactOracle {
    fn select(
        &self,
        c: &CoveringConstraint,
        state: &SolverState,
        sys: &dyn PackingSystem,
    ) -> Result<Option<VariableSet>> {
        let size = c.support_len();
        if size > self.cap {
            return Err(Error::OracleCapacity { size, cap: self.cap });
        }
        let k = sys.frequency() as f64;
        let vars: Vec<VarId> = c.support().collect();
        let cover: Vec<f64> = vars.iter().map(|&v| c.coeff(v)).collect();
        let mut suffix_cover = vec![0.0; size + 1];
        for i in (0..size).rev() {
            suffix_cover[i] = suffix_cover[i + 1] + cover[i];
        }
        let scaled = vars
            .iter()
            .map(|&v| Ok(sys.column(v)?.iter().map(|&(r, p)| (r, p / k)).collect()))
            .collect::<Result<Vec<Vec<_>>>>()?;
        let mut search = Search {
            state,
            sys,
            vars,
            cover,
            suffix_cover,
            scaled,
            acc: vec![0.0; sys.num_constraints()],
            touched: Vec::new(),
            chosen: Vec::new(),
            best: None,
        };
        search.run(0, 0.0)?;
        Ok(search.best.map(|b| b.set))
    }
}
