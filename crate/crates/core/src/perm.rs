//! Permutations of `{0,1,2,3}`.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A permutation stored as its image array: `p.0[i]` is the image of `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm4(pub [u8; 4]);

/// All 24 permutations in lexicographic order of their image arrays.
pub const S4: [Perm4; 24] = {
    let mut out = [Perm4([0, 1, 2, 3]); 24];
    let mut n = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                let d = 6 - a - b - c;
                if a != b && a != c && b != c && d >= 0 && d < 4 && d != a && d != b && d != c {
                    out[n] = Perm4([a as u8, b as u8, c as u8, d as u8]);
                    n += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    pub fn new(img: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &x in &img {
            if x > 3 || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm4(img))
    }

    #[inline]
    pub fn apply(self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `(self * other)(i) = self(other(i))`.
    #[inline]
    pub fn compose(self, other: Perm4) -> Perm4 {
        Perm4([
            self.0[other.0[0] as usize],
            self.0[other.0[1] as usize],
            self.0[other.0[2] as usize],
            self.0[other.0[3] as usize],
        ])
    }

    #[inline]
    pub fn inverse(self) -> Perm4 {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[self.0[i] as usize] = i as u8;
        }
        Perm4(out)
    }

    /// +1 for even, -1 for odd.
    pub fn sign(self) -> i32 {
        let mut inv = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Index in [`S4`].
    pub fn index(self) -> usize {
        S4.iter().position(|p| *p == self).expect("valid permutation")
    }

    pub fn from_index(i: usize) -> Option<Perm4> {
        S4.get(i).copied()
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Model edges of a tetrahedron, indexed 0..6.
pub const EDGE_VERTS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of the model edge joining vertices `a` and `b`.
#[inline]
pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("not an edge: {a}{b}"),
    }
}

/// The edge opposite edge `e`.
#[inline]
pub fn opposite_edge(e: usize) -> usize {
    5 - e
}

/// Vertices of face `f` (the face opposite vertex `f`), increasing.
#[inline]
pub fn face_verts(f: usize) -> [usize; 3] {
    match f {
        0 => [1, 2, 3],
        1 => [0, 2, 3],
        2 => [0, 1, 3],
        _ => [0, 1, 2],
    }
}

/// Vertices of face `f` listed anticlockwise as seen from outside a
/// positively oriented tetrahedron.
#[inline]
pub fn face_verts_outward(f: usize) -> [usize; 3] {
    match f {
        0 => [1, 2, 3],
        1 => [0, 3, 2],
        2 => [0, 1, 3],
        _ => [0, 2, 1],
    }
}
