//! Splitting live cells into well-separated components.
//!
//! Two cell sets at Chebyshev distance 3 or more cannot influence each other
//! within one step under any radius-1 rule, so cells closer than that are
//! linked into one component.

use std::collections::HashMap;

use crate::lattice::Grid;

/// Minimum Chebyshev distance between independent components.
pub const SEPARATION_GAP: i64 = 3;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Groups cells so that cells at Chebyshev distance below `gap` share a
/// component. Each component is sorted row-major; components are ordered by
/// their first cell.
pub fn components(cells: &[(i64, i64)], gap: i64) -> Vec<Vec<(i64, i64)>> {
    let r = (gap - 1).max(0);
    let index: HashMap<(i64, i64), usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut uf = UnionFind((0..cells.len()).collect());
    for (i, &(x, y)) in cells.iter().enumerate() {
        for dy in -r..=r {
            for dx in -r..=r {
                if let Some(&j) = index.get(&(x + dx, y + dy)) {
                    if j > i {
                        uf.union(i, j);
                    }
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<(i64, i64)>> = HashMap::new();
    for (i, &c) in cells.iter().enumerate() {
        let root = uf.find(i);
        groups.entry(root).or_default().push(c);
    }
    let mut out: Vec<Vec<(i64, i64)>> = groups
        .into_values()
        .map(|mut g| {
            g.sort_unstable_by_key(|&(x, y)| (y, x));
            g.dedup();
            g
        })
        .collect();
    out.sort_unstable_by_key(|g| (g[0].1, g[0].0));
    out
}

/// A component of a toroidal grid, with coordinates unwrapped into the
/// plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusComponent {
    pub cells: Vec<(i64, i64)>,
    /// Set when the component reaches itself around the torus, so no
    /// consistent unwrapping exists.
    pub wraps: bool,
}

/// Components of a toroidal grid under the wrap-around metric.
pub fn torus_components(grid: &Grid, gap: i64) -> Vec<TorusComponent> {
    let (w, h) = (grid.width() as i64, grid.height() as i64);
    let r = (gap - 1).max(0);
    let live = grid.live_cells();
    let index: HashMap<(i64, i64), usize> = live.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut unwrapped: Vec<Option<(i64, i64)>> = vec![None; live.len()];
    let mut out = Vec::new();
    for start in 0..live.len() {
        if unwrapped[start].is_some() {
            continue;
        }
        unwrapped[start] = Some(live[start]);
        let mut stack = vec![start];
        let mut cells = Vec::new();
        let mut wraps = false;
        while let Some(i) = stack.pop() {
            let (ux, uy) = unwrapped[i].unwrap();
            cells.push((ux, uy));
            for dy in -r..=r {
                for dx in -r..=r {
                    if (dx, dy) == (0, 0) {
                        continue;
                    }
                    let key = ((ux + dx).rem_euclid(w), (uy + dy).rem_euclid(h));
                    if let Some(&j) = index.get(&key) {
                        let target = (ux + dx, uy + dy);
                        match unwrapped[j] {
                            None => {
                                unwrapped[j] = Some(target);
                                stack.push(j);
                            }
                            Some(seen) if seen != target => wraps = true,
                            Some(_) => {}
                        }
                    }
                }
            }
        }
        cells.sort_unstable_by_key(|&(x, y)| (y, x));
        out.push(TorusComponent { cells, wraps });
    }
    out
}
