//! The eight symmetries of the square lattice.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    Identity,
    Rot90,
    Rot180,
    Rot270,
    FlipX,
    FlipY,
    Transpose,
    AntiTranspose,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Identity,
        Symmetry::Rot90,
        Symmetry::Rot180,
        Symmetry::Rot270,
        Symmetry::FlipX,
        Symmetry::FlipY,
        Symmetry::Transpose,
        Symmetry::AntiTranspose,
    ];

    /// Orientation-preserving subgroup.
    pub const ROTATIONS: [Symmetry; 4] =
        [Symmetry::Identity, Symmetry::Rot90, Symmetry::Rot180, Symmetry::Rot270];

    /// Applies the linear map to a point or displacement vector.
    ///
    /// With y growing downwards, `Rot90` turns east into south.
    #[inline]
    pub fn apply(self, (x, y): (i64, i64)) -> (i64, i64) {
        match self {
            Symmetry::Identity => (x, y),
            Symmetry::Rot90 => (-y, x),
            Symmetry::Rot180 => (-x, -y),
            Symmetry::Rot270 => (y, -x),
            Symmetry::FlipX => (-x, y),
            Symmetry::FlipY => (x, -y),
            Symmetry::Transpose => (y, x),
            Symmetry::AntiTranspose => (-y, -x),
        }
    }

    pub fn inverse(self) -> Symmetry {
        match self {
            Symmetry::Rot90 => Symmetry::Rot270,
            Symmetry::Rot270 => Symmetry::Rot90,
            other => other,
        }
    }

    /// `self.then(other)` applies `self` first.
    pub fn then(self, other: Symmetry) -> Symmetry {
        let probe = other.apply(self.apply((1, 2)));
        Symmetry::ALL.into_iter().find(|s| s.apply((1, 2)) == probe).unwrap()
    }

    pub fn is_rotation(self) -> bool {
        Symmetry::ROTATIONS.contains(&self)
    }

    /// Rotation that maps unit vector `from` onto `to` (both axis-aligned or
    /// both diagonal, same length), if any.
    pub fn rotation_between(from: (i64, i64), to: (i64, i64)) -> Option<Symmetry> {
        Symmetry::ROTATIONS.into_iter().find(|s| s.apply(from) == to)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_closure_and_inverses() {
        for a in Symmetry::ALL {
            assert_eq!(a.then(a.inverse()), Symmetry::Identity);
            for b in Symmetry::ALL {
                let c = a.then(b);
                for p in [(1, 2), (-3, 5), (0, 7)] {
                    assert_eq!(c.apply(p), b.apply(a.apply(p)));
                }
            }
        }
    }

    #[test]
    fn rotation_between_axes() {
        assert_eq!(Symmetry::rotation_between((1, 0), (0, 1)), Some(Symmetry::Rot90));
        assert_eq!(Symmetry::rotation_between((1, 0), (-1, 0)), Some(Symmetry::Rot180));
        assert_eq!(Symmetry::rotation_between((1, 0), (1, 1)), None);
    }
}
