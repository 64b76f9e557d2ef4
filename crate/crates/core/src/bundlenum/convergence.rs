use serde::Serialize;

/// Residuals at or below this are indistinguishable from rounding error and
/// carry no convergence-order information.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub res: usize,
    pub h: f64,
    pub residual: f64,
    /// `log2(previous / current)`; absent on the first row or when either
    /// residual is at the rounding floor.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Smallest observed order, if any pair of levels was above the floor.
    pub min_order: Option<f64>,
    /// Every residual is at the rounding floor.
    pub exact: bool,
}

impl ConvergenceTable {
    pub fn new(levels: &[(usize, f64)]) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
        for (i, &(res, residual)) in levels.iter().enumerate() {
            let order = if i == 0 {
                None
            } else {
                let prev = levels[i - 1];
                let ratio = (res as f64 / prev.0 as f64).log2();
                (prev.1 > ROUNDOFF_FLOOR && residual > ROUNDOFF_FLOOR)
                    .then(|| (prev.1 / residual).log2() / ratio)
            };
            rows.push(ConvergenceRow { res, h: 1.0 / res as f64, residual, order });
        }
        let min_order = rows.iter().filter_map(|r| r.order).reduce(f64::min);
        let exact = rows.iter().all(|r| r.residual <= ROUNDOFF_FLOOR);
        ConvergenceTable { rows, min_order, exact }
    }

    /// Every measurable order is at least `order`, or the computation is
    /// exact to rounding at every level.
    pub fn converges_at(&self, order: f64) -> bool {
        if self.exact {
            return true;
        }
        let mut any = false;
        for pair in self.rows.windows(2) {
            match pair[1].order {
                Some(o) => {
                    any = true;
                    if o < order {
                        return false;
                    }
                }
                // A residual that drops to the floor has converged faster
                // than any power; one that rises off it has not.
                None => {
                    if pair[1].residual > ROUNDOFF_FLOOR {
                        return false;
                    }
                }
            }
        }
        any || self.rows.last().is_some_and(|r| r.residual <= ROUNDOFF_FLOOR)
    }

    pub fn finest(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.residual)
    }
}
