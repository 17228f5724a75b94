//! Fixed combinatorics of the unit cube and the symmetries of a square face.
//!
//! Numbering conventions, relied on everywhere downstream:
//!
//! * Corners are `0..8`; bit `a` of a corner is its coordinate along axis
//!   `a` (axis 0 = x, 1 = y, 2 = z).
//! * Faces are `0..6`; face `f` has axis `f % 3` and sits at coordinate
//!   `f / 3` on that axis, so `f` and `f + 3` are the parallel pair.
//! * Edges are `0..12`; edge `e` runs along axis `e / 4`, and `e % 4` packs
//!   its coordinates on the two remaining axes in increasing axis order,
//!   low bit first.
//!
//! Each face carries a cyclic order of its four corners in which consecutive
//! corners differ in exactly one coordinate. Position `i` on face `f` means
//! `face_corners(f)[i]`, and edge position `i` means the edge joining
//! positions `i` and `i + 1`. A face gluing is recorded as the [`Sym`]
//! sending positions of the first face to positions of the second.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The two axes other than `a`, in increasing order.
pub const fn free_axes(a: usize) -> (usize, usize) {
    match a {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Face index for the face with the given axis lying at `side` (0 or 1).
pub const fn face(axis: usize, side: usize) -> usize {
    axis + 3 * side
}

pub const fn face_axis(f: usize) -> usize {
    f % 3
}

pub const fn face_side(f: usize) -> usize {
    f / 3
}

pub const fn opposite_face(f: usize) -> usize {
    (f + 3) % 6
}

/// Coordinate of corner `c` along `axis`.
pub const fn corner_coord(c: usize, axis: usize) -> usize {
    (c >> axis) & 1
}

pub const fn edge_axis(e: usize) -> usize {
    e / 4
}

/// Edge index for the edge along `axis` whose coordinates on the two free
/// axes, in increasing axis order, are `t & 1` and `t >> 1`.
pub const fn edge(axis: usize, t: usize) -> usize {
    4 * axis + t
}

/// Coordinate of edge `e` along axis `b`, which must differ from the edge's
/// own axis.
pub fn edge_coord(e: usize, b: usize) -> usize {
    let a = edge_axis(e);
    let (b0, b1) = free_axes(a);
    debug_assert!(b == b0 || b == b1);
    let t = e % 4;
    if b == b0 {
        t & 1
    } else {
        t >> 1
    }
}

/// Endpoints of edge `e`, the corner at coordinate 0 along the edge axis
/// first.
pub fn edge_corners(e: usize) -> [usize; 2] {
    let a = edge_axis(e);
    let (b0, b1) = free_axes(a);
    let t = e % 4;
    let base = ((t & 1) << b0) | ((t >> 1) << b1);
    [base, base | (1 << a)]
}

/// The edge joining two corners, if they are adjacent.
pub fn edge_between(c0: usize, c1: usize) -> Option<usize> {
    let d = c0 ^ c1;
    if d.count_ones() != 1 {
        return None;
    }
    let a = d.trailing_zeros() as usize;
    let (b0, b1) = free_axes(a);
    Some(edge(a, corner_coord(c0, b0) | (corner_coord(c0, b1) << 1)))
}

/// Corners of face `f` in cyclic order. With `(b0, b1)` the free axes of the
/// face, positions 0..4 sit at `(b0, b1)` coordinates (0,0), (1,0), (1,1),
/// (0,1).
pub fn face_corners(f: usize) -> [usize; 4] {
    let a = face_axis(f);
    let s = face_side(f);
    let (b0, b1) = free_axes(a);
    let at = |x0: usize, x1: usize| (s << a) | (x0 << b0) | (x1 << b1);
    [at(0, 0), at(1, 0), at(1, 1), at(0, 1)]
}

/// Edges of face `f`; entry `i` joins corner positions `i` and `i + 1`.
pub fn face_edges(f: usize) -> [usize; 4] {
    let c = face_corners(f);
    let between = |i: usize, j: usize| edge_between(c[i], c[j]).expect("face corners adjacent");
    [between(0, 1), between(1, 2), between(2, 3), between(3, 0)]
}

/// The three faces containing corner `c`, indexed by axis.
pub fn corner_faces(c: usize) -> [usize; 3] {
    [
        face(0, corner_coord(c, 0)),
        face(1, corner_coord(c, 1)),
        face(2, corner_coord(c, 2)),
    ]
}

/// The three edges through corner `c`, indexed by the axis they run along.
pub fn corner_edges(c: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut a = 0;
    while a < 3 {
        let (b0, b1) = free_axes(a);
        out[a] = edge(a, corner_coord(c, b0) | (corner_coord(c, b1) << 1));
        a += 1;
    }
    out
}

/// The two faces containing edge `e`, in increasing axis order of the face.
pub fn edge_faces(e: usize) -> [usize; 2] {
    let a = edge_axis(e);
    let (b0, b1) = free_axes(a);
    [face(b0, edge_coord(e, b0)), face(b1, edge_coord(e, b1))]
}

/// Position of corner `c` on face `f`, if it lies on it.
pub fn face_corner_position(f: usize, c: usize) -> Option<usize> {
    face_corners(f).iter().position(|&x| x == c)
}

/// Position of edge `e` on face `f`, if it lies on it.
pub fn face_edge_position(f: usize, e: usize) -> Option<usize> {
    face_edges(f).iter().position(|&x| x == e)
}

/// A symmetry of the square acting on face positions 0..4.
///
/// Rotations send position `i` to `i + k`, reflections to `k - i`, both
/// mod 4. The eight elements are named `id`, `r90`, `r180`, `r270` and
/// `m0`..`m3`, where `m_k` is the reflection fixing the position pair
/// summing to `k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym {
    k: u8,
    refl: bool,
}

impl Sym {
    pub const ID: Sym = Sym { k: 0, refl: false };

    pub const ALL: [Sym; 8] = [
        Sym { k: 0, refl: false },
        Sym { k: 1, refl: false },
        Sym { k: 2, refl: false },
        Sym { k: 3, refl: false },
        Sym { k: 0, refl: true },
        Sym { k: 1, refl: true },
        Sym { k: 2, refl: true },
        Sym { k: 3, refl: true },
    ];

    pub const fn rotation(k: usize) -> Sym {
        Sym {
            k: (k % 4) as u8,
            refl: false,
        }
    }

    pub const fn reflection(k: usize) -> Sym {
        Sym {
            k: (k % 4) as u8,
            refl: true,
        }
    }

    pub const fn is_reflection(self) -> bool {
        self.refl
    }

    /// Image of corner position `i`.
    pub const fn apply(self, i: usize) -> usize {
        let i = i % 4;
        if self.refl {
            (self.k as usize + 4 - i) % 4
        } else {
            (i + self.k as usize) % 4
        }
    }

    /// Image of the edge joining positions `i` and `i + 1`.
    pub const fn apply_edge(self, i: usize) -> usize {
        let i = i % 4;
        if self.refl {
            (self.k as usize + 3 - i) % 4
        } else {
            (i + self.k as usize) % 4
        }
    }

    /// Composite applying `self` first, then `other`.
    pub const fn then(self, other: Sym) -> Sym {
        let k = if other.refl {
            (other.k + 4 - self.k) % 4
        } else {
            (other.k + self.k) % 4
        };
        Sym {
            k,
            refl: self.refl != other.refl,
        }
    }

    pub const fn inverse(self) -> Sym {
        if self.refl {
            self
        } else {
            Sym {
                k: (4 - self.k) % 4,
                refl: false,
            }
        }
    }

    pub const fn name(self) -> &'static str {
        match (self.refl, self.k) {
            (false, 0) => "id",
            (false, 1) => "r90",
            (false, 2) => "r180",
            (false, _) => "r270",
            (true, 0) => "m0",
            (true, 1) => "m1",
            (true, 2) => "m2",
            (true, _) => "m3",
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown square symmetry {0:?}, expected one of id, r90, r180, r270, m0, m1, m2, m3")]
pub struct SymParseError(pub String);

impl FromStr for Sym {
    type Err = SymParseError;

    fn from_str(s: &str) -> Result<Sym, SymParseError> {
        Sym::ALL
            .iter()
            .copied()
            .find(|sym| sym.name() == s)
            .ok_or_else(|| SymParseError(s.to_owned()))
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Sym {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Sym {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Sym, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}
