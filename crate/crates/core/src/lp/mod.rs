//! Dense linear programming.
//!
//! [`solve`] runs a two-phase simplex on a condensed (dictionary) tableau
//! with Bland's rule. It is small and deterministic, which is all the
//! oracle LPs need.

mod simplex;

pub use simplex::{solve, solve_traced};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `opt objective . x` subject to the rows and `x >= lower_bounds`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<f64>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let lower_bounds = vec![0.0; objective.len()];
        Self { sense, objective, constraints: Vec::new(), lower_bounds }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.constrain(coeffs, Relation::Le, rhs)
    }

    pub fn add_ge(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.constrain(coeffs, Relation::Ge, rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.constrain(coeffs, Relation::Eq, rhs)
    }

    /// Sparse row helper: `terms` are `(variable, coefficient)` pairs,
    /// repeated variables accumulate.
    pub fn constrain_sparse(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) -> &mut Self {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(j, c) in terms {
            coeffs[j] += c;
        }
        self.constrain(coeffs, relation, rhs)
    }

    pub fn validate(&self) -> Result<()> {
        let nv = self.num_vars();
        if self.lower_bounds.len() != nv {
            return Err(Error::MalformedLp(format!("{} lower bounds for {nv} variables", self.lower_bounds.len())));
        }
        if self.objective.iter().chain(&self.lower_bounds).any(|c| !c.is_finite()) {
            return Err(Error::MalformedLp("non-finite objective or bound".into()));
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != nv {
                return Err(Error::MalformedLp(format!("row {r} has {} coefficients, expected {nv}", c.coeffs.len())));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::MalformedLp(format!("row {r} has a non-finite entry")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = x.iter().zip(&self.lower_bounds).map(|(v, lb)| (lb - v).max(0.0));
        let rows = self.constraints.iter().map(|c| {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            match c.relation {
                Relation::Le => (lhs - c.rhs).max(0.0),
                Relation::Ge => (c.rhs - lhs).max(0.0),
                Relation::Eq => (lhs - c.rhs).abs(),
            }
        });
        bounds.chain(rows).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal {
        value: f64,
        assignment: Vec<f64>,
    },
    /// `ray` is a feasible direction along which the objective improves.
    Unbounded {
        ray: Vec<f64>,
    },
    Infeasible,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn assignment(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { assignment, .. } => Some(assignment),
            _ => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, LpOutcome::Unbounded { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible)
    }
}
