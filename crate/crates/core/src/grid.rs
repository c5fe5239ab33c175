//! Discretised measures and functions sampled on them.
//!
//! A [`Grid`] is a quadrature rule for the continuous part of a measure plus
//! one node per mass point carrying the exact mass. A [`GridFunction`] pairs a
//! shared grid with sample values.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{BaseWeight, MassPoint, MeasureSpec};
use crate::opoly::{base_recurrence, BuildOptions};
use crate::quadrature::{composite_jacobi_rule, gauss_rule, Rule};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    /// Quadrature weight of the continuous part.
    continuous: Vec<f64>,
    /// Mass of the atom at the node, 0 if none.
    atoms: Vec<f64>,
    total: Vec<f64>,
}

impl Grid {
    /// Combines a rule for the continuous part with point masses. A mass
    /// whose location coincides with a rule node is stored on that node.
    pub fn from_rule(rule: Rule, masses: &[MassPoint]) -> Grid {
        let mut entries: Vec<(f64, f64, f64)> = rule
            .nodes
            .into_iter()
            .zip(rule.weights)
            .map(|(x, w)| (x, w, 0.0))
            .collect();
        for m in masses {
            // a rule node within rounding of the location carries the atom
            let near =
                |x: f64| (x - m.location).abs() <= 4.0 * f64::EPSILON * m.location.abs().max(1.0);
            match entries.iter_mut().find(|e| near(e.0)) {
                Some(e) => {
                    e.0 = m.location;
                    e.2 = m.mass;
                }
                None => entries.push((m.location, 0.0, m.mass)),
            }
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        let nodes = entries.iter().map(|e| e.0).collect();
        let continuous: Vec<f64> = entries.iter().map(|e| e.1).collect();
        let atoms: Vec<f64> = entries.iter().map(|e| e.2).collect();
        let total = continuous.iter().zip(&atoms).map(|(c, a)| c + a).collect();
        Grid {
            nodes,
            continuous,
            atoms,
            total,
        }
    }

    /// Gauss rule with about `m` nodes for the continuous part of `spec`
    /// (a composite Gauss-Jacobi rule when the weight has interior
    /// singularities) plus the atoms.
    pub fn for_measure(spec: &MeasureSpec, m: usize) -> Result<Arc<Grid>> {
        spec.check()?;
        let rule = match &spec.base {
            BaseWeight::Jacobi(j) if !j.is_classical() => {
                let cells = j.breakpoints().len() - 1;
                composite_jacobi_rule(j, m.div_ceil(cells))?
            }
            base => gauss_rule(&base_recurrence(base, m, BuildOptions::default())?, m)?,
        };
        Ok(Arc::new(Grid::from_rule(rule, &spec.masses)))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights of the full measure (continuous part plus atoms).
    pub fn weights(&self) -> &[f64] {
        &self.total
    }

    pub fn continuous_weights(&self) -> &[f64] {
        &self.continuous
    }

    pub fn atom_masses(&self) -> &[f64] {
        &self.atoms
    }

    /// Index of the node holding the atom at `location`.
    pub fn atom_index(&self, location: f64) -> Option<usize> {
        self.nodes
            .iter()
            .zip(&self.atoms)
            .position(|(&x, &a)| x == location && a > 0.0)
    }

    /// `(index, location, mass)` of every atom.
    pub fn atoms(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0.0)
            .map(|(i, &a)| (i, self.nodes[i], a))
    }

    pub fn total_mass(&self) -> f64 {
        self.total.iter().sum()
    }

    /// Checks that the atoms of the grid are exactly the masses of `spec`.
    pub fn check_matches(&self, spec: &MeasureSpec) -> Result<()> {
        let count = self.atoms().count();
        if count != spec.masses.len() {
            return Err(Error::GridMismatch(format!(
                "grid has {count} atoms, measure has {} masses",
                spec.masses.len()
            )));
        }
        for m in &spec.masses {
            match self.atom_index(m.location) {
                Some(i) if self.atoms[i] == m.mass => {}
                _ => {
                    return Err(Error::GridMismatch(format!(
                        "no atom of mass {} at {}",
                        m.mass, m.location
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Samples of a function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        GridFunction {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        Self::from_fn(grid, |_| c)
    }

    /// Indicator of a set of node indices.
    pub fn indicator(grid: &Arc<Grid>, indices: &[usize]) -> Self {
        let mut values = vec![0.0; grid.len()];
        for &i in indices {
            values[i] = 1.0;
        }
        GridFunction {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at_atom(&self, location: f64) -> Option<f64> {
        self.grid.atom_index(location).map(|i| self.values[i])
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .grid
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        GridFunction {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|_, v| c * v)
    }

    /// Pointwise product; both functions must live on the same grid.
    pub fn product(&self, other: &GridFunction) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid != other.grid {
            return Err(Error::GridMismatch(
                "product of functions on different grids".into(),
            ));
        }
        Ok(GridFunction {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// `\int f d nu` on the grid.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.grid.total)
            .map(|(v, w)| v * w)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn atoms_are_exact_and_unique() {
        let spec = MeasureSpec::legendre()
            .with_mass(1.0, 1.0)
            .with_mass(0.3, 0.5);
        let grid = Grid::for_measure(&spec, 20).unwrap();
        assert_eq!(grid.len(), 22);
        assert_eq!(grid.atoms().count(), 2);
        assert_eq!(grid.atom_masses()[grid.atom_index(1.0).unwrap()], 1.0);
        assert_relative_eq!(grid.total_mass(), 3.5, max_relative = 1e-14);
        grid.check_matches(&spec).unwrap();
        assert!(grid.check_matches(&MeasureSpec::legendre()).is_err());
    }

    #[test]
    fn mass_on_a_node_is_merged() {
        // odd Gauss-Legendre rules contain the node 0
        let spec = MeasureSpec::legendre().with_mass(0.0, 2.0);
        let grid = Grid::for_measure(&spec, 5).unwrap();
        assert_eq!(grid.len(), 5);
        let i = grid.atom_index(0.0).unwrap();
        assert!(grid.continuous_weights()[i] > 0.0);
        assert_eq!(grid.atom_masses()[i], 2.0);
        assert_relative_eq!(grid.total_mass(), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn singular_weight_grid() {
        let spec = MeasureSpec::jacobi(
            crate::measure::GenJacobiSpec::jacobi(-0.5, 0.5).with_singularity(0.0, 1.0),
        );
        let grid = Grid::for_measure(&spec, 40).unwrap();
        let f = GridFunction::constant(&grid, 1.0);
        let tanh = crate::quadrature::tanh_sinh_jacobi_rule(spec.base.as_jacobi().unwrap(), 8);
        assert_relative_eq!(f.integral(), tanh.total(), max_relative = 1e-13);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let grid = Grid::for_measure(&MeasureSpec::legendre(), 4).unwrap();
        assert!(matches!(
            GridFunction::new(grid, vec![1.0; 3]),
            Err(Error::GridMismatch(_))
        ));
    }
}
