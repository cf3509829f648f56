use num_complex::Complex64;
use serde::Serialize;

use super::ContinuumError;
use crate::linalg::{SpdSolver, SymmetricMatrix};

/// Samples on the Cartesian grid `-1 + ih` covering `[-1, 1]²`. Nodes
/// outside the closed unit disc are absent.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    h: f64,
    side: usize,
    values: Vec<f64>,
    inside: Vec<bool>,
}

fn side_for(h: f64) -> Result<usize, ContinuumError> {
    if !(h > 0.0 && h <= 0.5) {
        return Err(ContinuumError::InvalidArgument(format!("grid spacing must lie in (0, 1/2], got {h}")));
    }
    Ok((2.0 / h - 1e-9).ceil() as usize + 1)
}

impl GridField {
    fn empty(h: f64) -> Result<Self, ContinuumError> {
        let side = side_for(h)?;
        let inside = (0..side * side)
            .map(|k| {
                let z = Complex64::new(-1.0 + (k % side) as f64 * h, -1.0 + (k / side) as f64 * h);
                z.norm_sqr() <= 1.0
            })
            .collect();
        Ok(Self { h, side, values: vec![0.0; side * side], inside })
    }

    /// Samples `f` at every grid node in the closed disc.
    pub fn sample(h: f64, f: impl Fn(Complex64) -> f64) -> Result<Self, ContinuumError> {
        let mut g = Self::empty(h)?;
        for k in 0..g.values.len() {
            if g.inside[k] {
                g.values[k] = f(g.node(k));
            }
        }
        Ok(g)
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn side(&self) -> usize {
        self.side
    }

    fn node(&self, k: usize) -> Complex64 {
        Complex64::new(-1.0 + (k % self.side) as f64 * self.h, -1.0 + (k / self.side) as f64 * self.h)
    }

    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        let k = j * self.side + i;
        (i < self.side && j < self.side && self.inside[k]).then(|| self.values[k])
    }

    /// Bilinear interpolation; `None` when a surrounding node is absent.
    pub fn eval(&self, z: Complex64) -> Option<f64> {
        let x = (z.re + 1.0) / self.h;
        let y = (z.im + 1.0) / self.h;
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let (i, j) = ((x.floor() as usize).min(self.side - 2), (y.floor() as usize).min(self.side - 2));
        let (s, t) = (x - i as f64, y - j as f64);
        let v00 = self.value(i, j)?;
        let v10 = self.value(i + 1, j)?;
        let v01 = self.value(i, j + 1)?;
        let v11 = self.value(i + 1, j + 1)?;
        Some((1.0 - s) * (1.0 - t) * v00 + s * (1.0 - t) * v10 + (1.0 - s) * t * v01 + s * t * v11)
    }

    /// Grid neighbor pairs with both nodes present and within `rho`.
    fn edges(&self, rho: f64) -> impl Iterator<Item = (usize, usize)> + '_ {
        let r2 = rho * rho * (1.0 + 1e-12);
        let ok = move |k: usize| self.inside[k] && self.node(k).norm_sqr() <= r2;
        (0..self.values.len()).flat_map(move |k| {
            let (i, j) = (k % self.side, k / self.side);
            let right = (i + 1 < self.side).then_some(k + 1);
            let up = (j + 1 < self.side).then_some(k + self.side);
            [right, up].into_iter().flatten().filter(move |&m| ok(k) && ok(m)).map(move |m| (k, m))
        })
    }

    /// Five-point-stencil energy over the disc of radius `rho`: each
    /// difference quotient squared times the cell area `h²`.
    pub fn energy(&self, rho: f64) -> f64 {
        self.energy_form(self, rho).expect("same grid")
    }

    pub fn energy_form(&self, other: &Self, rho: f64) -> Result<f64, ContinuumError> {
        if self.side != other.side || self.h != other.h {
            return Err(ContinuumError::GridMismatch);
        }
        Ok(self
            .edges(rho)
            .map(|(k, m)| (self.values[k] - self.values[m]) * (other.values[k] - other.values[m]))
            .sum())
    }
}

/// A closed disc target for [`grid_capacity`]; radius 0 is a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TargetDisc {
    pub center: [f64; 2],
    pub radius: f64,
}

impl TargetDisc {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center: [center.re, center.im], radius }
    }

    fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }
}

#[derive(Clone, Debug)]
pub struct GridCapacity {
    pub value: f64,
    pub target_nodes: usize,
    pub unknowns: usize,
    pub potential: GridField,
}

/// Capacity of a union of discs relative to the unit circle, from the
/// grid-harmonic potential equal to 1 on nodes within one grid cell of the
/// target and 0 outside the open disc.
pub fn grid_capacity(targets: &[TargetDisc], h: f64) -> Result<GridCapacity, ContinuumError> {
    let mut field = GridField::empty(h)?;
    for t in targets {
        if !(t.radius >= 0.0) || t.center().norm() + t.radius + h >= 1.0 {
            return Err(ContinuumError::TargetTouchesBoundary);
        }
    }
    let n = field.values.len();
    let side = field.side;
    let open: Vec<bool> = (0..n).map(|k| field.node(k).norm_sqr() < 1.0).collect();
    let on_target: Vec<bool> = (0..n)
        .map(|k| open[k] && targets.iter().any(|t| (field.node(k) - t.center()).norm() <= t.radius + h))
        .collect();
    let mut index = vec![usize::MAX; n];
    let mut free = Vec::new();
    for k in 0..n {
        if open[k] && !on_target[k] {
            index[k] = free.len();
            free.push(k);
        }
    }
    let neighbors = |k: usize| {
        let (i, j) = (k % side, k / side);
        [
            (i > 0).then(|| k - 1),
            (i + 1 < side).then(|| k + 1),
            (j > 0).then(|| k - side),
            (j + 1 < side).then(|| k + side),
        ]
    };
    let value_of = |k: usize| if on_target[k] { 1.0 } else { 0.0 };
    let mut triplets = Vec::with_capacity(5 * free.len());
    let mut rhs = vec![0.0; free.len()];
    for (row, &k) in free.iter().enumerate() {
        triplets.push((row, row, 4.0));
        for m in neighbors(k).into_iter().flatten() {
            if index[m] != usize::MAX {
                triplets.push((row, index[m], -1.0));
            } else {
                rhs[row] += value_of(m);
            }
        }
    }
    for k in 0..n {
        field.values[k] = value_of(k);
    }
    if !free.is_empty() && on_target.iter().any(|&t| t) {
        let solver = SpdSolver::new(SymmetricMatrix::from_triplets(free.len(), &triplets))?;
        let x = solver.solve(&rhs)?;
        for (row, &k) in free.iter().enumerate() {
            field.values[k] = x[row];
        }
    }
    // every edge touching the open disc, with absent nodes at 0
    let mut value = 0.0;
    for k in 0..n {
        let (i, j) = (k % side, k / side);
        for m in [(i + 1 < side).then(|| k + 1), (j + 1 < side).then(|| k + side)].into_iter().flatten() {
            if open[k] || open[m] {
                let a = if open[k] { field.values[k] } else { 0.0 };
                let b = if open[m] { field.values[m] } else { 0.0 };
                value += (a - b) * (a - b);
            }
        }
    }
    for k in 0..n {
        if !open[k] {
            field.values[k] = 0.0;
        }
    }
    let target_nodes = on_target.iter().filter(|&&t| t).count();
    Ok(GridCapacity { value, target_nodes, unknowns: free.len(), potential: field })
}
