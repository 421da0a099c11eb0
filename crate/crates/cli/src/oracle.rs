use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rx_core::op_solver::{brute_force_op, solve_op, OpInstance, Tour};
use rx_core::Error;

/// Exact optimum next to the heuristic tour. Infeasibility is a result here, not an error.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub optimum: Option<Tour>,
    pub heuristic: Option<Tour>,
}

impl OracleReport {
    /// Relative reward gap `(opt - heur) / opt`; zero when the optimum collects nothing.
    pub fn gap(&self) -> Option<f64> {
        let (o, h) = (self.optimum.as_ref()?, self.heuristic.as_ref()?);
        Some(if o.total_reward > 0.0 { (o.total_reward - h.total_reward) / o.total_reward } else { 0.0 })
    }

    pub fn render(&self) -> String {
        let line = |label: &str, t: &Option<Tour>| match t {
            Some(t) => format!("{label}: reward {} length {:.4} sequence {:?}\n", t.total_reward, t.total_length, t.nodes),
            None => format!("{label}: infeasible\n"),
        };
        let mut s = line("optimum", &self.optimum) + &line("heuristic", &self.heuristic);
        if let Some(g) = self.gap() {
            s += &format!("gap: {:.2}%\n", 100.0 * g);
        }
        s
    }
}

/// Solves `inst` exactly and heuristically. Instances above the enumeration limit fail with
/// `TooLarge`.
pub fn compare(inst: &OpInstance, seed: u64) -> Result<OracleReport, Error> {
    let feasible = |r: Result<Tour, Error>| match r {
        Ok(t) => Ok(Some(t)),
        Err(Error::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let optimum = feasible(brute_force_op(inst))?;
    let heuristic = feasible(solve_op(inst, &mut ChaCha8Rng::seed_from_u64(seed)))?;
    Ok(OracleReport { optimum, heuristic })
}
