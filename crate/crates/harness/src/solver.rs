//! HiGHS backend for full-size rate LPs.

use highs::{ColProblem, HighsModelStatus, Model, Sense};
use resourcetune::rates::{CoveringLp, CoveringSolver};
use resourcetune::{Error, Result};

/// Solves covering LPs with the HiGHS simplex, single-threaded so repeated
/// runs pick the same vertex.
#[derive(Debug, Clone, Copy, Default)]
pub struct HighsSolver;

impl CoveringSolver for HighsSolver {
    fn solve(&mut self, lp: &CoveringLp) -> Result<Vec<f64>> {
        if lp.rows() == 0 {
            return Ok(vec![0.0; lp.costs.len()]);
        }
        let mut problem = ColProblem::default();
        let rows: Vec<_> = lp.demands.iter().map(|&d| problem.add_row(d..)).collect();
        for (&cost, column) in lp.costs.iter().zip(&lp.columns) {
            problem.add_column(cost, 0.0.., column.iter().map(|&i| (rows[i as usize], 1.0)));
        }
        let mut model = Model::new(problem);
        model.make_quiet();
        model.set_sense(Sense::Minimise);
        model.set_option("solver", "simplex");
        model.set_option("threads", 1);
        model.set_option("primal_feasibility_tolerance", 1e-9);
        model.set_option("dual_feasibility_tolerance", 1e-9);
        let solved = model.try_solve().map_err(|_| Error::Solver("LP solve failed"))?;
        match solved.status() {
            HighsModelStatus::Optimal => Ok(solved.get_solution().columns().iter().map(|v| v.max(0.0)).collect()),
            HighsModelStatus::Infeasible => Err(Error::Solver("covering LP is infeasible")),
            _ => Err(Error::Solver("LP solve did not reach optimality")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_column_is_preferred() {
        let lp = CoveringLp {
            costs: vec![4.0; 4],
            columns: vec![vec![0, 1, 2], vec![0], vec![1], vec![2]],
            demands: vec![0.5, 0.3, 0.3],
        };
        let x = HighsSolver.solve(&lp).unwrap();
        assert!((lp.objective(&x) - 2.0).abs() < 1e-12);
        assert!(lp.max_violation(&x) <= 1e-9);
    }

    #[test]
    fn empty_lp_has_zero_rates() {
        let lp = CoveringLp {
            costs: vec![1.0, 4.0],
            columns: vec![vec![], vec![]],
            demands: vec![],
        };
        assert_eq!(HighsSolver.solve(&lp).unwrap(), [0.0, 0.0]);
    }
}
