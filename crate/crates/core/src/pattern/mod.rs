//! Translation-normalized patterns, their canonical forms, and placement onto
//! grids.

pub mod catalog;
mod plaintext;
mod rle;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{BBox, Boundary, Grid, GridError};
use crate::symmetry::Symmetry;

pub use plaintext::parse_cells;
pub use rle::{parse_rle, write_rle, RleError};

/// A finite set of live cells, normalized so the minimum x and minimum y are
/// both zero. Cells are kept sorted row-major (by y, then x).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pattern {
    cells: Vec<(i64, i64)>,
    width: i64,
    height: i64,
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({}x{}: ", self.width, self.height)?;
        for y in 0..self.height {
            if y > 0 {
                f.write_str("/")?;
            }
            for x in 0..self.width {
                f.write_str(if self.contains(x, y) { "O" } else { "." })?;
            }
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalMode {
    /// Translation only: the normalized pattern itself.
    Translation,
    /// Minimum over the four rotations; mirror images stay distinct.
    Rotation,
    /// Minimum over all eight square symmetries.
    FullSymmetry,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaceError {
    #[error("placement overlaps {0} live cell(s)")]
    Overlap(usize),
    #[error("pattern of {pw}x{ph} does not fit a {gw}x{gh} torus")]
    DoesNotFit { pw: i64, ph: i64, gw: usize, gh: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Serialized as an RLE document without a rule line.
impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&write_rle(self, None))
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rle(&text).map(|(p, _)| p).map_err(serde::de::Error::custom)
    }
}

impl Pattern {
    pub fn empty() -> Pattern {
        Pattern::default()
    }

    /// Builds a normalized pattern; duplicate cells are merged.
    pub fn from_cells<I: IntoIterator<Item = (i64, i64)>>(cells: I) -> Pattern {
        Pattern::normalized(cells).0
    }

    /// Normalizes the cells and also returns the offset that was removed,
    /// i.e. the world position of the pattern's (0, 0).
    pub fn normalized<I: IntoIterator<Item = (i64, i64)>>(cells: I) -> (Pattern, (i64, i64)) {
        let mut cells: Vec<(i64, i64)> = cells.into_iter().collect();
        let Some(bb) = BBox::of_points(cells.iter().copied()) else {
            return (Pattern::empty(), (0, 0));
        };
        for c in &mut cells {
            *c = (c.0 - bb.min_x, c.1 - bb.min_y);
        }
        cells.sort_unstable_by_key(|&(x, y)| (y, x));
        cells.dedup();
        (Pattern { cells, width: bb.width(), height: bb.height() }, (bb.min_x, bb.min_y))
    }

    /// Live cells of a grid as a pattern, plus its world offset.
    pub fn from_grid(grid: &Grid) -> (Pattern, (i64, i64)) {
        Pattern::normalized(grid.live_cells())
    }

    /// Parses rows of `.`/`O` separated by `/` or newlines (test helper
    /// notation; see [`parse_cells`] for the file format).
    pub fn from_rows(rows: &str) -> Pattern {
        let mut cells = Vec::new();
        for (y, row) in rows.split(['/', '\n']).enumerate() {
            for (x, ch) in row.trim().chars().enumerate() {
                if matches!(ch, 'O' | 'o' | '*' | '#') {
                    cells.push((x as i64, y as i64));
                }
            }
        }
        Pattern::from_cells(cells)
    }

    pub fn cells(&self) -> &[(i64, i64)] {
        &self.cells
    }

    pub fn width(&self) -> i64 {
        self.width
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn weight(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        self.cells.binary_search_by_key(&(y, x), |&(cx, cy)| (cy, cx)).is_ok()
    }

    pub fn transformed(&self, sym: Symmetry) -> Pattern {
        Pattern::from_cells(self.cells.iter().map(|&c| sym.apply(c)))
    }

    pub fn translated(&self, dx: i64, dy: i64) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.cells.iter().map(move |&(x, y)| (x + dx, y + dy))
    }

    /// Canonical representative and the symmetry that produces it.
    pub fn canonical_with(&self, mode: CanonicalMode) -> (Pattern, Symmetry) {
        let group: &[Symmetry] = match mode {
            CanonicalMode::Translation => return (self.clone(), Symmetry::Identity),
            CanonicalMode::Rotation => &Symmetry::ROTATIONS,
            CanonicalMode::FullSymmetry => &Symmetry::ALL,
        };
        group
            .iter()
            .map(|&s| (self.transformed(s), s))
            .min_by(|a, b| a.0.cells.cmp(&b.0.cells))
            .unwrap()
    }

    pub fn canonicalize(&self, mode: CanonicalMode) -> Pattern {
        self.canonical_with(mode).0
    }

    /// Unbounded grid holding the pattern at offset (x, y).
    pub fn to_grid(&self, x: i64, y: i64, cap: usize) -> Result<Grid, GridError> {
        Grid::from_cells(self.translated(x, y), cap)
    }

    pub fn bbox_at(&self, x: i64, y: i64) -> Option<BBox> {
        (!self.is_empty()).then(|| BBox { min_x: x, min_y: y, max_x: x + self.width - 1, max_y: y + self.height - 1 })
    }
}

/// ORs the transformed pattern onto a copy of `grid` with its (0, 0) at
/// (x, y). Overlap with existing live cells is an error unless
/// `allow_overlap` is set.
pub fn place(
    grid: &Grid,
    pattern: &Pattern,
    x: i64,
    y: i64,
    transform: Symmetry,
    allow_overlap: bool,
) -> Result<Grid, PlaceError> {
    let p = pattern.transformed(transform);
    if grid.boundary() == Boundary::Toroidal && (p.width > grid.width() as i64 || p.height > grid.height() as i64) {
        return Err(PlaceError::DoesNotFit { pw: p.width, ph: p.height, gw: grid.width(), gh: grid.height() });
    }
    let overlap = p.translated(x, y).filter(|&(cx, cy)| grid.get(cx, cy)).count();
    if overlap > 0 && !allow_overlap {
        return Err(PlaceError::Overlap(overlap));
    }
    let mut out = grid.clone();
    for (cx, cy) in p.translated(x, y) {
        out.set(cx, cy, true)?;
    }
    Ok(out)
}

/// Single-phase measurements: volume is the bounding-box area, weight the
/// live-cell count.
pub fn measure_static(pattern: &Pattern) -> (i64, usize) {
    (pattern.width * pattern.height, pattern.weight())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::step;
    use crate::rule::RuleSpec;

    #[test]
    fn normalization() {
        let p = Pattern::from_cells([(5, 7), (6, 9), (5, 7)]);
        assert_eq!(p.cells(), &[(0, 0), (1, 2)]);
        assert_eq!((p.width(), p.height()), (2, 3));
    }

    #[test]
    fn canonical_forms() {
        let p = Pattern::from_rows("OO./..O/.O.");
        let c = p.canonicalize(CanonicalMode::FullSymmetry);
        assert_eq!(c.canonicalize(CanonicalMode::FullSymmetry), c);
        assert_eq!(p.transformed(Symmetry::Rot90).canonicalize(CanonicalMode::FullSymmetry), c);
        let moved = Pattern::from_cells(p.translated(9, -4));
        assert_eq!(moved.canonicalize(CanonicalMode::Translation), p);
        // A chiral shape and its mirror differ under rotations only.
        let mirror = p.transformed(Symmetry::FlipX);
        assert_ne!(mirror.canonicalize(CanonicalMode::Rotation), p.canonicalize(CanonicalMode::Rotation));
        assert_eq!(mirror.canonicalize(CanonicalMode::FullSymmetry), c);
    }

    #[test]
    fn place_and_extract() {
        let g = Grid::unbounded();
        let p = Pattern::from_rows("O.O/.OO");
        let placed = place(&g, &p, 10, -3, Symmetry::Identity, false).unwrap();
        assert_eq!(Pattern::from_grid(&placed), (p.clone(), (10, -3)));
        let twice = place(&placed, &p.transformed(Symmetry::Rot180), 10, -3, Symmetry::Identity, false);
        assert!(matches!(twice, Err(PlaceError::Overlap(_))));
        assert!(place(&placed, &p, 10, -3, Symmetry::Identity, true).is_ok());
    }

    #[test]
    fn place_rot180_twice_overlaps() {
        let p = Pattern::from_rows("OO/O.");
        let g = place(&Grid::unbounded(), &p, 0, 0, Symmetry::Rot180, false).unwrap();
        assert!(matches!(place(&g, &p, 0, 0, Symmetry::Rot180, false), Err(PlaceError::Overlap(3))));
    }

    #[test]
    fn torus_fit_checked() {
        let g = Grid::toroidal(3, 3).unwrap();
        let p = Pattern::from_rows("OOOO");
        assert!(matches!(place(&g, &p, 0, 0, Symmetry::Identity, false), Err(PlaceError::DoesNotFit { .. })));
        let wrapped = place(&g, &Pattern::from_rows("OO"), 2, 2, Symmetry::Identity, false).unwrap();
        assert!(wrapped.get(0, 2) && wrapped.get(2, 2));
    }

    #[test]
    fn well_separated_placements_evolve_independently() {
        let rule = RuleSpec::diffusion();
        let a = Pattern::from_rows("O..O/.OO.").transformed(Symmetry::Transpose);
        let b = Pattern::from_rows("O.O/.O.");
        let alone_a = step(&a.to_grid(0, 0, 256).unwrap(), &rule).unwrap();
        let alone_b = step(&b.to_grid(0, 0, 256).unwrap(), &rule).unwrap();
        // Chebyshev gap of 3 between the two boxes.
        let both = place(&a.to_grid(0, 0, 256).unwrap(), &b, a.width() + 2, 0, Symmetry::Identity, false).unwrap();
        let stepped = step(&both, &rule).unwrap();
        let mut expect: Vec<_> = alone_a.live_cells();
        expect.extend(alone_b.live_cells().into_iter().map(|(x, y)| (x + a.width() + 2, y)));
        expect.sort_by_key(|&(x, y)| (y, x));
        assert_eq!(stepped.live_cells(), expect);
    }

    #[test]
    fn serde_as_rle() {
        let p = Pattern::from_rows("O./.O");
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"x = 2, y = 2\\no$bo!\"");
        assert_eq!(serde_json::from_str::<Pattern>(&json).unwrap(), p);
    }

    #[test]
    fn static_measurements() {
        assert_eq!(measure_static(&Pattern::from_rows("O./.O")), (4, 2));
        assert_eq!(measure_static(&Pattern::empty()), (0, 0));
        assert_eq!(measure_static(&Pattern::from_rows("OOO/OOO/OOO")), (9, 9));
    }

    #[test]
    fn placement_commutes() {
        let a = Pattern::from_rows("O./.O");
        let b = Pattern::from_rows("OO/O.");
        let g = Grid::unbounded();
        let ab = place(&place(&g, &a, 0, 0, Symmetry::Identity, false).unwrap(), &b, 5, 1, Symmetry::Rot90, false)
            .unwrap();
        let ba = place(&place(&g, &b, 5, 1, Symmetry::Rot90, false).unwrap(), &a, 0, 0, Symmetry::Identity, false)
            .unwrap();
        assert!(ab.same_cells(&ba));
    }
}
