//! Binary lattices and their evolution under interval rules.
//!
//! A [`Grid`] stores cells row-major, 64 cells per word. Two boundary modes
//! are supported: a torus of fixed size, and a quiescent unbounded plane whose
//! stored window grows and shrinks around the live cells.

mod bitstep;
pub mod reference;

use std::fmt;

use rand::RngCore;
use thiserror::Error;

use crate::rule::RuleSpec;
use crate::symmetry::Symmetry;

pub use reference::step_reference;

/// Default side cap for the stored window of an unbounded grid.
pub const DEFAULT_UNBOUNDED_CAP: usize = 4096;

/// Extra empty border kept around the live cells of an unbounded grid after
/// the window is rebuilt.
const SLACK: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid dimensions must be at least 1x1 (got {0}x{1})")]
    EmptyDimensions(usize, usize),
    #[error("stored region {width}x{height} exceeds the {cap}x{cap} cap")]
    CapExceeded { width: usize, height: usize, cap: usize },
    #[error("rule {0} gives birth on zero neighbors and cannot run on an unbounded plane")]
    NonQuiescent(RuleSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Toroidal,
    /// Quiescent infinite plane; the stored window may not exceed `cap` on
    /// either side.
    Unbounded { cap: usize },
}

/// Inclusive bounding box in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct BBox {
    pub min_x: i64,
    pub min_y: i64,
    pub max_x: i64,
    pub max_y: i64,
}

impl BBox {
    pub fn width(&self) -> i64 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> i64 {
        self.max_y - self.min_y + 1
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn semiperimeter(&self) -> i64 {
        self.width() + self.height()
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            min_x: self.min_x.min(other.min_x),
            min_y: self.min_y.min(other.min_y),
            max_x: self.max_x.max(other.max_x),
            max_y: self.max_y.max(other.max_y),
        }
    }

    /// Chebyshev distance between the boxes (0 when they overlap).
    pub fn gap(&self, other: &BBox) -> i64 {
        let dx = (other.min_x - self.max_x).max(self.min_x - other.max_x).max(0);
        let dy = (other.min_y - self.max_y).max(self.min_y - other.max_y).max(0);
        dx.max(dy)
    }

    pub fn of_points<I: IntoIterator<Item = (i64, i64)>>(points: I) -> Option<BBox> {
        points.into_iter().fold(None, |acc, (x, y)| {
            Some(match acc {
                None => BBox { min_x: x, min_y: y, max_x: x, max_y: y },
                Some(b) => BBox {
                    min_x: b.min_x.min(x),
                    min_y: b.min_y.min(y),
                    max_x: b.max_x.max(x),
                    max_y: b.max_y.max(y),
                },
            })
        })
    }
}

/// Population after each generation of a run, starting with the input.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct PopulationTrace {
    entries: Vec<(u64, u64)>,
}

impl PopulationTrace {
    pub fn push(&mut self, generation: u64, population: u64) {
        if let Some(&(last, _)) = self.entries.last() {
            assert_eq!(generation, last + 1, "generations must advance by one");
        }
        self.entries.push((generation, population));
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn populations(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(_, p)| p)
    }
}

/// A finite window onto a binary lattice.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    width: usize,
    height: usize,
    stride: usize,
    words: Vec<u64>,
    boundary: Boundary,
    /// World coordinates of stored cell (0, 0). Always (0, 0) on a torus.
    origin: (i64, i64),
    generation: u64,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Grid {}x{} {:?} origin={:?} gen={}",
            self.width, self.height, self.boundary, self.origin, self.generation
        )?;
        if self.width * self.height <= 64 * 64 {
            for y in 0..self.height {
                let row: String =
                    (0..self.width).map(|x| if self.local(x, y) { 'O' } else { '.' }).collect();
                writeln!(f, "{row}")?;
            }
        }
        Ok(())
    }
}

impl Grid {
    pub fn toroidal(width: usize, height: usize) -> Result<Grid, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::EmptyDimensions(width, height));
        }
        Ok(Grid::raw(width, height, Boundary::Toroidal, (0, 0)))
    }

    /// Torus filled with independent Bernoulli(`p`) cells: one `next_u64`
    /// per cell in row-major order, live iff the top 53 bits as a fraction
    /// of 2^53 are below `p`.
    pub fn bernoulli_torus<R: RngCore>(width: usize, height: usize, p: f64, rng: &mut R) -> Result<Grid, GridError> {
        let mut grid = Grid::toroidal(width, height)?;
        for y in 0..height as i64 {
            for x in 0..width as i64 {
                let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                if u < p {
                    grid.put_local(x, y, true);
                }
            }
        }
        Ok(grid)
    }

    pub fn unbounded() -> Grid {
        Grid::unbounded_with_cap(DEFAULT_UNBOUNDED_CAP)
    }

    pub fn unbounded_with_cap(cap: usize) -> Grid {
        Grid::raw(1, 1, Boundary::Unbounded { cap: cap.max(3) }, (0, 0))
    }

    /// Unbounded grid holding exactly the given live cells.
    pub fn from_cells<I: IntoIterator<Item = (i64, i64)>>(cells: I, cap: usize) -> Result<Grid, GridError> {
        let cells: Vec<(i64, i64)> = cells.into_iter().collect();
        let mut grid = Grid::unbounded_with_cap(cap);
        if let Some(bb) = BBox::of_points(cells.iter().copied()) {
            grid.rebuild_window(bb)?;
            for (x, y) in cells {
                grid.put_local(x - grid.origin.0, y - grid.origin.1, true);
            }
        }
        Ok(grid)
    }

    fn raw(width: usize, height: usize, boundary: Boundary, origin: (i64, i64)) -> Grid {
        let stride = width.div_ceil(64);
        Grid { width, height, stride, words: vec![0; stride * height], boundary, origin, generation: 0 }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_toroidal(&self) -> bool {
        self.boundary == Boundary::Toroidal
    }

    pub fn origin(&self) -> (i64, i64) {
        self.origin
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn set_generation(&mut self, generation: u64) {
        self.generation = generation;
    }

    /// An empty grid with the same boundary, window and generation.
    pub fn cleared(&self) -> Grid {
        let mut g = Grid::raw(self.width, self.height, self.boundary, self.origin);
        g.generation = self.generation;
        g
    }

    #[inline]
    fn local(&self, x: usize, y: usize) -> bool {
        (self.words[y * self.stride + x / 64] >> (x % 64)) & 1 == 1
    }

    #[inline]
    fn put_local(&mut self, x: i64, y: i64, alive: bool) {
        let (x, y) = (x as usize, y as usize);
        let w = &mut self.words[y * self.stride + x / 64];
        if alive {
            *w |= 1 << (x % 64);
        } else {
            *w &= !(1 << (x % 64));
        }
    }

    /// Maps world coordinates onto the stored window, if inside it.
    #[inline]
    fn to_local(&self, x: i64, y: i64) -> Option<(usize, usize)> {
        match self.boundary {
            Boundary::Toroidal => {
                Some((x.rem_euclid(self.width as i64) as usize, y.rem_euclid(self.height as i64) as usize))
            }
            Boundary::Unbounded { .. } => {
                let lx = x - self.origin.0;
                let ly = y - self.origin.1;
                (lx >= 0 && ly >= 0 && (lx as usize) < self.width && (ly as usize) < self.height)
                    .then_some((lx as usize, ly as usize))
            }
        }
    }

    pub fn get(&self, x: i64, y: i64) -> bool {
        self.to_local(x, y).is_some_and(|(lx, ly)| self.local(lx, ly))
    }

    /// Sets a cell. Unbounded grids grow their window as needed.
    pub fn set(&mut self, x: i64, y: i64, alive: bool) -> Result<(), GridError> {
        if let Boundary::Unbounded { .. } = self.boundary {
            if alive && !self.window_has_margin(x, y) {
                let bb = match self.bounding_box() {
                    Some(b) => b.union(&BBox { min_x: x, min_y: y, max_x: x, max_y: y }),
                    None => BBox { min_x: x, min_y: y, max_x: x, max_y: y },
                };
                self.rebuild_window(bb)?;
            }
        }
        if let Some((lx, ly)) = self.to_local(x, y) {
            self.put_local(lx as i64, ly as i64, alive);
        }
        Ok(())
    }

    fn window_has_margin(&self, x: i64, y: i64) -> bool {
        let lx = x - self.origin.0;
        let ly = y - self.origin.1;
        lx >= 1 && ly >= 1 && lx + 1 < self.width as i64 && ly + 1 < self.height as i64
    }

    pub fn population(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Live cells in world coordinates, row-major order.
    pub fn live_cells(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for i in 0..self.stride {
                let mut w = self.words[y * self.stride + i];
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    out.push(((i * 64 + b) as i64 + self.origin.0, y as i64 + self.origin.1));
                }
            }
        }
        out
    }

    fn local_bbox(&self) -> Option<(usize, usize, usize, usize)> {
        let mut min_x = usize::MAX;
        let mut max_x = 0;
        let mut min_y = usize::MAX;
        let mut max_y = 0;
        for y in 0..self.height {
            let row = &self.words[y * self.stride..(y + 1) * self.stride];
            let Some(first) = row.iter().position(|&w| w != 0) else { continue };
            let last = row.iter().rposition(|&w| w != 0).unwrap();
            min_y = min_y.min(y);
            max_y = y;
            min_x = min_x.min(first * 64 + row[first].trailing_zeros() as usize);
            max_x = max_x.max(last * 64 + 63 - row[last].leading_zeros() as usize);
        }
        (min_y != usize::MAX).then_some((min_x, min_y, max_x, max_y))
    }

    /// Bounding box of the live cells in world coordinates.
    pub fn bounding_box(&self) -> Option<BBox> {
        self.local_bbox().map(|(x0, y0, x1, y1)| BBox {
            min_x: x0 as i64 + self.origin.0,
            min_y: y0 as i64 + self.origin.1,
            max_x: x1 as i64 + self.origin.0,
            max_y: y1 as i64 + self.origin.1,
        })
    }

    /// Re-allocates an unbounded window around `bb` with slack on every side.
    fn rebuild_window(&mut self, bb: BBox) -> Result<(), GridError> {
        let Boundary::Unbounded { cap } = self.boundary else { return Ok(()) };
        let slack = SLACK.max(bb.width().max(bb.height()) as usize / 8) as i64;
        let width = (bb.width() + 2 * slack) as usize;
        let height = (bb.height() + 2 * slack) as usize;
        if width > cap || height > cap {
            return Err(GridError::CapExceeded { width, height, cap });
        }
        let origin = (bb.min_x - slack, bb.min_y - slack);
        let mut next = Grid::raw(width, height, self.boundary, origin);
        next.generation = self.generation;
        for (x, y) in self.live_cells() {
            next.put_local(x - origin.0, y - origin.1, true);
        }
        *self = next;
        Ok(())
    }

    /// Restores the unbounded-window invariant: every live cell has at least
    /// one empty cell between it and the window edge, and the window is not
    /// grossly larger than the live region.
    fn fit_window(&mut self) -> Result<(), GridError> {
        let Boundary::Unbounded { .. } = self.boundary else { return Ok(()) };
        let Some((x0, y0, x1, y1)) = self.local_bbox() else {
            if self.width > 1 || self.height > 1 {
                let mut g = Grid::raw(1, 1, self.boundary, self.origin);
                g.generation = self.generation;
                *self = g;
            }
            return Ok(());
        };
        let tight = x0 < 1 || y0 < 1 || x1 + 2 > self.width || y1 + 2 > self.height;
        let bw = x1 - x0 + 1;
        let bh = y1 - y0 + 1;
        let loose = self.width > 2 * bw + 8 * SLACK || self.height > 2 * bh + 8 * SLACK;
        if tight || loose {
            let bb = self.bounding_box().unwrap();
            self.rebuild_window(bb)?;
        }
        Ok(())
    }

    /// Image of the grid under a lattice symmetry. On a torus the image is a
    /// torus of the transformed dimensions; the map is taken modulo its size.
    pub fn transformed(&self, sym: Symmetry) -> Grid {
        match self.boundary {
            Boundary::Toroidal => {
                let (w, h) = match sym {
                    Symmetry::Rot90 | Symmetry::Rot270 | Symmetry::Transpose | Symmetry::AntiTranspose => {
                        (self.height, self.width)
                    }
                    _ => (self.width, self.height),
                };
                let mut g = Grid::raw(w, h, Boundary::Toroidal, (0, 0));
                g.generation = self.generation;
                for p in self.live_cells() {
                    let (x, y) = sym.apply(p);
                    g.put_local(x.rem_euclid(w as i64), y.rem_euclid(h as i64), true);
                }
                g
            }
            Boundary::Unbounded { cap } => {
                let mut g = Grid::from_cells(self.live_cells().into_iter().map(|p| sym.apply(p)), cap)
                    .expect("a transformed window has the same extent");
                g.generation = self.generation;
                g
            }
        }
    }

    /// Translates every live cell by (dx, dy), wrapping on a torus.
    pub fn shifted(&self, dx: i64, dy: i64) -> Grid {
        match self.boundary {
            Boundary::Toroidal => {
                let mut g = self.cleared();
                for (x, y) in self.live_cells() {
                    let (lx, ly) = self.to_local(x + dx, y + dy).unwrap();
                    g.put_local(lx as i64, ly as i64, true);
                }
                g
            }
            Boundary::Unbounded { .. } => {
                let mut g = self.clone();
                g.origin = (self.origin.0 + dx, self.origin.1 + dy);
                g
            }
        }
    }

    /// True when both grids hold the same live cells (window-independent).
    pub fn same_cells(&self, other: &Grid) -> bool {
        if self.boundary == other.boundary && self.width == other.width && self.origin == other.origin {
            return self.words == other.words;
        }
        self.live_cells() == other.live_cells()
    }

    /// Copy of this grid with the window extended so every live cell has a
    /// margin of at least one empty cell.
    pub(crate) fn with_margin(&self) -> Result<Grid, GridError> {
        let mut g = self.clone();
        g.fit_window()?;
        Ok(g)
    }

    fn with_words(&self, words: Vec<u64>) -> Grid {
        Grid { words, generation: self.generation + 1, ..self.clone_shape() }
    }

    fn clone_shape(&self) -> Grid {
        Grid {
            width: self.width,
            height: self.height,
            stride: self.stride,
            words: Vec::new(),
            boundary: self.boundary,
            origin: self.origin,
            generation: self.generation,
        }
    }
}

/// Number of live cells among the eight Moore neighbors of (x, y).
pub fn neighborhood_sum(grid: &Grid, x: i64, y: i64) -> u8 {
    let mut n = 0;
    for dy in -1..=1 {
        for dx in -1..=1 {
            if (dx, dy) != (0, 0) && grid.get(x + dx, y + dy) {
                n += 1;
            }
        }
    }
    n
}

fn check_rule(grid: &Grid, rule: &RuleSpec) -> Result<(), GridError> {
    if !grid.is_toroidal() && !rule.is_quiescent() {
        return Err(GridError::NonQuiescent(*rule));
    }
    Ok(())
}

/// One generation of the bit-parallel stepper. The input is left untouched.
pub fn step(grid: &Grid, rule: &RuleSpec) -> Result<Grid, GridError> {
    check_rule(grid, rule)?;
    let src = grid.with_margin()?;
    let mut words = vec![0u64; src.words.len()];
    bitstep::step_words(
        &src.words,
        &mut words,
        src.width,
        src.height,
        src.stride,
        src.is_toroidal(),
        rule.birth_mask(),
        rule.survive_mask(),
    );
    let mut next = src.with_words(words);
    next.fit_window()?;
    Ok(next)
}

/// Applies `step` repeatedly, recording the population after every step.
pub fn evolve(grid: &Grid, rule: &RuleSpec, steps: usize) -> Result<(Grid, PopulationTrace), GridError> {
    let mut trace = PopulationTrace::default();
    trace.push(grid.generation(), grid.population());
    let mut cur = grid.clone();
    for _ in 0..steps {
        cur = step(&cur, rule)?;
        trace.push(cur.generation(), cur.population());
    }
    Ok((cur, trace))
}

impl Grid {
    /// In-place form of [`step`].
    pub fn advance(&mut self, rule: &RuleSpec) -> Result<(), GridError> {
        *self = step(self, rule)?;
        Ok(())
    }
}
