use std::collections::{BTreeMap, HashMap};

use crate::{Error, Result};

/// Slack used when comparing accumulated coverage against 1 and scaled
/// loads against the per-set cap of 1.
pub const FEASIBILITY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl std::fmt::Display for VarId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Column-oriented access to the packing matrix.
///
/// Implementations must be pure: looking up the same variable twice yields
/// the same column. Columns list `(row, coefficient)` with distinct rows and
/// nonnegative coefficients.
pub trait PackingSystem {
    fn num_constraints(&self) -> usize;

    /// Covering frequency bound `k`.
    fn frequency(&self) -> usize;

    fn column(&self, var: VarId) -> Result<&[(usize, f64)]>;
}

impl<T: PackingSystem + ?Sized> PackingSystem for &T {
    fn num_constraints(&self) -> usize {
        (**self).num_constraints()
    }

    fn frequency(&self) -> usize {
        (**self).frequency()
    }

    fn column(&self, var: VarId) -> Result<&[(usize, f64)]> {
        (**self).column(var)
    }
}

/// Packing matrix with explicitly stored columns.
#[derive(Debug, Clone, Default)]
pub struct SparsePackingSystem {
    rows: usize,
    k: usize,
    columns: Vec<Vec<(usize, f64)>>,
    names: Vec<String>,
    by_name: HashMap<String, VarId>,
}

impl SparsePackingSystem {
    pub fn new(rows: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::instance("covering frequency k must be at least 1"));
        }
        Ok(Self {
            rows,
            k,
            ..Self::default()
        })
    }

    /// Registers a variable. Entries for the same row are summed.
    pub fn add_variable(&mut self, name: impl Into<String>, column: &[(usize, f64)]) -> Result<VarId> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(Error::instance(format!("duplicate variable id {name:?}")));
        }
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for &(row, coeff) in column {
            if row >= self.rows {
                return Err(Error::instance(format!(
                    "variable {name:?}: row {row} out of range (m = {})",
                    self.rows
                )));
            }
            if !coeff.is_finite() || coeff < 0.0 {
                return Err(Error::instance(format!(
                    "variable {name:?}: coefficient {coeff} for row {row} must be finite and nonnegative"
                )));
            }
            *merged.entry(row).or_insert(0.0) += coeff;
        }
        let id = VarId(self.columns.len() as u32);
        self.columns
            .push(merged.into_iter().filter(|&(_, c)| c > 0.0).collect());
        self.by_name.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn num_variables(&self) -> usize {
        self.columns.len()
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, var: VarId) -> Option<&str> {
        self.names.get(var.0 as usize).map(String::as_str)
    }

    pub fn variables(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.columns.len() as u32).map(VarId)
    }
}

impl PackingSystem for SparsePackingSystem {
    fn num_constraints(&self) -> usize {
        self.rows
    }

    fn frequency(&self) -> usize {
        self.k
    }

    fn column(&self, var: VarId) -> Result<&[(usize, f64)]> {
        self.columns
            .get(var.0 as usize)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::instance(format!("unknown variable {var}")))
    }
}

/// Candidate set of variables, kept sorted and duplicate free so that the
/// derived ordering is the lexicographic order used for tie-breaking.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableSet(Vec<VarId>);

impl VariableSet {
    pub fn new(mut vars: Vec<VarId>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        Self(vars)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn singleton(var: VarId) -> Self {
        Self(vec![var])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.0.binary_search(&var).is_ok()
    }
}

impl FromIterator<VarId> for VariableSet {
    fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// `sum_r C_{j,r} x_r >= 1` over a sparse support.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringConstraint {
    coeffs: BTreeMap<VarId, f64>,
}

impl CoveringConstraint {
    pub fn new(coeffs: impl IntoIterator<Item = (VarId, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (var, c) in coeffs {
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::instance(format!(
                    "covering coefficient {c} for {var} must be finite and positive"
                )));
            }
            if map.insert(var, c).is_some() {
                return Err(Error::instance(format!("variable {var} repeated in covering constraint")));
            }
        }
        if map.is_empty() {
            return Err(Error::instance("covering constraint has empty support"));
        }
        Ok(Self { coeffs: map })
    }

    /// All coefficients equal to one.
    pub fn unit(vars: impl IntoIterator<Item = VarId>) -> Result<Self> {
        Self::new(vars.into_iter().map(|v| (v, 1.0)))
    }

    pub fn support(&self) -> impl Iterator<Item = VarId> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, var: VarId) -> f64 {
        self.coeffs.get(&var).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, f64)> + '_ {
        self.coeffs.iter().map(|(&v, &c)| (v, c))
    }

    pub fn coverage(&self, set: &VariableSet) -> f64 {
        set.iter().map(|v| self.coeff(v)).sum()
    }
}

/// Sparse per-row load `delta_i(S)`, sorted by row, zero rows omitted.
pub type SparseLoad = Vec<(usize, f64)>;

/// `delta_i(S) = sum_{r in S} P_{ir} / k`.
pub fn delta(set: &VariableSet, row: usize, sys: &dyn PackingSystem) -> Result<f64> {
    let k = sys.frequency() as f64;
    let mut total = 0.0;
    for var in set.iter() {
        for &(r, coeff) in sys.column(var)? {
            if r == row {
                total += coeff / k;
            }
        }
    }
    Ok(total)
}

/// All nonzero `delta_i(S)` at once. Variables are visited in id order so
/// the floating-point sums are reproducible.
pub fn delta_vector(set: &VariableSet, sys: &dyn PackingSystem) -> Result<SparseLoad> {
    let k = sys.frequency() as f64;
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for var in set.iter() {
        for &(row, coeff) in sys.column(var)? {
            *acc.entry(row).or_insert(0.0) += coeff / k;
        }
    }
    Ok(acc.into_iter().filter(|&(_, d)| d > 0.0).collect())
}

/// Covers `c` and keeps every scaled row load of the set itself at most 1.
pub fn satisfies(set: &VariableSet, c: &CoveringConstraint, sys: &dyn PackingSystem) -> Result<bool> {
    if c.coverage(set) < 1.0 - FEASIBILITY_EPS {
        return Ok(false);
    }
    Ok(delta_vector(set, sys)?
        .iter()
        .all(|&(_, d)| d <= 1.0 + FEASIBILITY_EPS))
}
