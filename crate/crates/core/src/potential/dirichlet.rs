use std::sync::Arc;

use crate::linalg::{SolveError, SpdSolver, SymmetricMatrix};
use crate::map::{PlanarMap, Truncation};

/// Weighted Laplacian restricted to the vertices that are not fixed.
pub(crate) struct Reduced {
    free: Vec<usize>,
    index: Vec<usize>,
    solver: Option<Arc<SpdSolver>>,
}

const FIXED: usize = usize::MAX;

fn free_index(n: usize, free: &[usize]) -> Vec<usize> {
    let mut index = vec![FIXED; n];
    for (i, &v) in free.iter().enumerate() {
        index[v] = i;
    }
    index
}

fn assemble(map: &PlanarMap, index: &[usize], size: usize) -> SymmetricMatrix {
    let mut triplets = Vec::new();
    for e in 0..map.dart_count() {
        let (u, w) = (map.origin(e), map.head(e));
        if u == w || index[u] == FIXED {
            continue;
        }
        let c = map.conductance(e);
        triplets.push((index[u], index[u], c));
        if index[w] != FIXED {
            triplets.push((index[u], index[w], -c));
        }
    }
    SymmetricMatrix::from_triplets(size, &triplets)
}

impl Reduced {
    /// System for the given free vertices of `map`.
    pub(crate) fn new(map: &PlanarMap, free: Vec<usize>) -> Result<Self, SolveError> {
        let index = free_index(map.vertex_count(), &free);
        let solver =
            if free.is_empty() { None } else { Some(Arc::new(SpdSolver::new(assemble(map, &index, free.len()))?)) };
        Ok(Self { free, index, solver })
    }

    /// System for the interior of a truncation, reusing the factorization
    /// cached on it.
    pub(crate) fn interior(trunc: &Truncation) -> Result<Self, SolveError> {
        let free = trunc.interior().to_vec();
        let index = free_index(trunc.vertex_count(), &free);
        if free.is_empty() {
            return Ok(Self { free, index, solver: None });
        }
        let cache = trunc.dirichlet_cache();
        let solver = match cache.get() {
            Some(s) => s.clone(),
            None => {
                let s = Arc::new(SpdSolver::new(assemble(trunc.map(), &index, free.len()))?);
                cache.get_or_init(|| s).clone()
            }
        };
        Ok(Self { free, index, solver: Some(solver) })
    }

    /// Harmonic extension of the fixed values in `values` to the free
    /// vertices; free entries of `values` are ignored.
    pub(crate) fn extend(&self, map: &PlanarMap, values: &[f64]) -> Result<Vec<f64>, SolveError> {
        let mut out = values.to_vec();
        let Some(solver) = &self.solver else {
            return Ok(out);
        };
        let mut rhs = vec![0.0; self.free.len()];
        for e in 0..map.dart_count() {
            let (u, w) = (map.origin(e), map.head(e));
            if self.index[u] != FIXED && self.index[w] == FIXED {
                rhs[self.index[u]] += map.conductance(e) * values[w];
            }
        }
        let x = solver.solve(&rhs)?;
        for (i, &v) in self.free.iter().enumerate() {
            out[v] = x[i];
        }
        Ok(out)
    }
}
