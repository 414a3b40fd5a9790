//! Direct per-cell evaluation of the local transition. Slow; used as the
//! oracle for the bit-parallel stepper.

use super::{check_rule, neighborhood_sum, Grid, GridError};
use crate::rule::RuleSpec;

pub fn step_reference(grid: &Grid, rule: &RuleSpec) -> Result<Grid, GridError> {
    check_rule(grid, rule)?;
    let src = grid.with_margin()?;
    let mut next = src.cleared();
    next.generation = src.generation + 1;
    let (ox, oy) = src.origin;
    for y in 0..src.height as i64 {
        for x in 0..src.width as i64 {
            let (wx, wy) = (x + ox, y + oy);
            let alive = src.get(wx, wy);
            if rule.next_state(alive, neighborhood_sum(&src, wx, wy)) {
                next.put_local(x, y, true);
            }
        }
    }
    next.fit_window()?;
    Ok(next)
}
