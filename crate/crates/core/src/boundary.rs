use crate::bridge::GridPath;
use crate::error::{invalid, Error, Result};

/// Entrance and exit data for `k` curves on `[a, b]`, plus an optional floor
/// curve that the lowest curve must stay strictly above.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub a: f64,
    pub b: f64,
    /// Decreasing: `entrance[0] > entrance[1] > ...`.
    pub entrance: Vec<f64>,
    pub exit: Vec<f64>,
    /// `None` is a floor at minus infinity.
    pub floor: Option<GridPath>,
}

impl BoundaryData {
    pub fn new(a: f64, b: f64, entrance: Vec<f64>, exit: Vec<f64>, floor: Option<GridPath>) -> Result<Self> {
        let bd = Self {
            a,
            b,
            entrance,
            exit,
            floor,
        };
        bd.validate()?;
        Ok(bd)
    }

    pub fn k(&self) -> usize {
        self.entrance.len()
    }

    pub fn floor_at(&self, t: f64) -> f64 {
        self.floor.as_ref().map_or(f64::NEG_INFINITY, |f| f.eval(t))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return invalid(format!("boundary interval [{}, {}] is empty", self.a, self.b));
        }
        if self.entrance.is_empty() {
            return invalid("boundary data needs at least one curve");
        }
        if self.entrance.len() != self.exit.len() {
            return invalid("entrance and exit lists differ in length");
        }
        for (name, xs) in [("entrance", &self.entrance), ("exit", &self.exit)] {
            if xs.iter().any(|x| !x.is_finite()) {
                return invalid(format!("{name} data must be finite"));
            }
            if let Some(i) = xs.windows(2).position(|w| w[0] <= w[1]) {
                return invalid(format!(
                    "{name} data not strictly decreasing at curves {i} and {}",
                    i + 1
                ));
            }
        }
        if let Some(f) = &self.floor {
            if f.t_start() > self.a || f.t_end() < self.b {
                return invalid("floor curve does not cover the boundary interval");
            }
            let k = self.k() - 1;
            if self.entrance[k] <= f.eval(self.a) {
                return Err(Error::Infeasible(format!(
                    "lowest entrance {} not above floor {} at time {}",
                    self.entrance[k],
                    f.eval(self.a),
                    self.a
                )));
            }
            if self.exit[k] <= f.eval(self.b) {
                return Err(Error::Infeasible(format!(
                    "lowest exit {} not above floor {} at time {}",
                    self.exit[k],
                    f.eval(self.b),
                    self.b
                )));
            }
        }
        Ok(())
    }
}
