//! Square-tiled surfaces: construction, vertex classes, strata.
//!
//! A square-tiled surface is `k` unit squares glued along edges by two
//! permutations: `h` sends each square to the one on its right, `v` to
//! the one above. Corners of squares fall into vertex classes; a class
//! of `4(d+1)` corners is a cone point of angle `2π(d+1)`. The stratum
//! signature lists the orders `d ≥ 1` and ties them to the genus via
//! `Σ dᵢ = 2g − 2`.

use crate::error::SurfaceError;
use crate::perm::{transitive, Perm};
use crate::rational::Rat;
use num::{One, Signed, Zero};

/// A point of the surface: a square index plus exact coordinates in the
/// half-open unit square. Left and bottom edges belong to the square.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SurfacePoint {
    pub square: usize,
    pub x: Rat,
    pub y: Rat,
}

impl SurfacePoint {
    pub fn new(square: usize, x: Rat, y: Rat) -> SurfacePoint {
        SurfacePoint { square, x, y }
    }
}

impl std::fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}; {}, {})",
            self.square,
            crate::rational::fmt_rat(&self.x),
            crate::rational::fmt_rat(&self.y)
        )
    }
}

/// Corner of a square, named by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    BottomLeft,
    BottomRight,
    TopRight,
    TopLeft,
}

impl Corner {
    pub const ALL: [Corner; 4] =
        [Corner::BottomLeft, Corner::BottomRight, Corner::TopRight, Corner::TopLeft];

    fn index(self) -> usize {
        match self {
            Corner::BottomLeft => 0,
            Corner::BottomRight => 1,
            Corner::TopRight => 2,
            Corner::TopLeft => 3,
        }
    }
}

/// One vertex of the surface: an orbit of corners under rotation about
/// the vertex. `order` is the `d` in cone angle `2π(d+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexClass {
    pub corners: Vec<(usize, Corner)>,
    pub order: usize,
}

impl VertexClass {
    /// Cone angle as a multiple of 2π.
    pub fn angle_turns(&self) -> usize {
        self.order + 1
    }

    pub fn is_singular(&self) -> bool {
        self.order >= 1
    }
}

/// Stratum signature `H(d₁,…,dₙ)` with the orders sorted decreasing.
/// The empty signature is the flat torus (genus 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumSignature {
    pub orders: Vec<usize>,
    pub genus: usize,
    pub n: usize,
}

impl std::fmt::Display for StratumSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.orders.is_empty() {
            write!(f, "H(0) [torus]")
        } else {
            let s: Vec<String> = self.orders.iter().map(|d| d.to_string()).collect();
            write!(f, "H({})", s.join(","))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SquareTiledSurface {
    k: usize,
    h: Perm,
    v: Perm,
    marked: SurfacePoint,
    // vertex class id per corner, corners listed per class
    class_of: Vec<usize>,
    classes: Vec<VertexClass>,
}

fn corner_id(square: usize, c: Corner) -> usize {
    4 * square + c.index()
}

impl SquareTiledSurface {
    /// Validate gluing data and construct the surface. The marked point
    /// may sit at a regular vertex image but not at a singular one.
    pub fn new(
        k: usize,
        h: Perm,
        v: Perm,
        marked: SurfacePoint,
    ) -> Result<SquareTiledSurface, SurfaceError> {
        if k == 0 || h.len() != k {
            return Err(SurfaceError::NotAPermutation { which: "h", k });
        }
        if v.len() != k {
            return Err(SurfaceError::NotAPermutation { which: "v", k });
        }
        if !transitive(&[&h, &v], k) {
            return Err(SurfaceError::Disconnected);
        }
        if marked.square >= k {
            return Err(SurfaceError::SquareOutOfRange { square: marked.square, k });
        }
        if marked.x.is_negative()
            || marked.y.is_negative()
            || marked.x >= Rat::one()
            || marked.y >= Rat::one()
        {
            return Err(SurfaceError::MarkedPointOutOfRange);
        }

        let (class_of, classes) = vertex_classes(k, &h, &v);
        let surf = SquareTiledSurface { k, h, v, marked, class_of, classes };

        if surf.marked.x.is_zero() && surf.marked.y.is_zero() {
            let cls = surf.class_of(surf.marked.square, Corner::BottomLeft);
            if surf.classes[cls].is_singular() {
                return Err(SurfaceError::MarkedPointOnSingularity);
            }
        }
        Ok(surf)
    }

    /// The standard one-square torus with the default generic marked
    /// point (0; 3/7, 3/11).
    pub fn torus() -> SquareTiledSurface {
        SquareTiledSurface::new(
            1,
            Perm::identity(1),
            Perm::identity(1),
            default_marked_point(),
        )
        .unwrap()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> &Perm {
        &self.h
    }

    pub fn v(&self) -> &Perm {
        &self.v
    }

    pub fn marked(&self) -> &SurfacePoint {
        &self.marked
    }

    /// Total area = number of squares.
    pub fn area(&self) -> usize {
        self.k
    }

    pub fn class_of(&self, square: usize, c: Corner) -> usize {
        self.class_of[corner_id(square, c)]
    }

    pub fn vertex_classes(&self) -> &[VertexClass] {
        &self.classes
    }

    /// Vertex classes with `d ≥ 1`, i.e. the actual cone points.
    pub fn singular_vertices(&self) -> Vec<&VertexClass> {
        self.classes.iter().filter(|c| c.is_singular()).collect()
    }

    /// Is the lattice point sitting at the bottom-left corner of
    /// `square` a cone point?
    pub fn lattice_is_singular(&self, square: usize) -> bool {
        self.classes[self.class_of(square, Corner::BottomLeft)].is_singular()
    }

    /// Stratum signature; orders `d = 0` are omitted per the usual
    /// convention, and the genus comes from the Euler characteristic.
    pub fn stratum(&self) -> StratumSignature {
        let vcount = self.classes.len();
        // V - E + F with E = 2k, F = k, so χ = V - k and 2g = 2 - χ.
        let chi = vcount as i64 - self.k as i64;
        let two_g = 2 - chi;
        debug_assert!(two_g >= 2 && two_g % 2 == 0);
        let genus = (two_g / 2) as usize;
        let mut orders: Vec<usize> =
            self.classes.iter().map(|c| c.order).filter(|&d| d >= 1).collect();
        orders.sort_unstable_by(|a, b| b.cmp(a));
        let n = orders.len();
        debug_assert_eq!(orders.iter().sum::<usize>() as i64, 2 * genus as i64 - 2);
        StratumSignature { orders, genus, n }
    }

    /// Minimal interval count for a first-return transversal under
    /// Convention 2: `N = Σ(dⱼ+1) + 1 = 2g + n − 1`.
    pub fn convention_interval_count(&self) -> usize {
        let s = self.stratum();
        2 * s.genus + s.n - 1
    }
}

/// Default marked point (0; 3/7, 3/11): denominators coprime to the
/// small cylinder denominators that show up in practice.
pub fn default_marked_point() -> SurfacePoint {
    SurfacePoint::new(0, crate::rational::rat(3, 7), crate::rational::rat(3, 11))
}

/// Group the 4k corners into vertex classes by the counterclockwise
/// rotation-by-quarter-turn map about each vertex:
///   (i,BL) → (h⁻¹i, BR) → (v⁻¹h⁻¹i, TR) → (hv⁻¹h⁻¹i, TL) → ([v,h]i, BL).
fn vertex_classes(k: usize, h: &Perm, v: &Perm) -> (Vec<usize>, Vec<VertexClass>) {
    let rotate = |sq: usize, c: Corner| -> (usize, Corner) {
        match c {
            Corner::BottomLeft => (h.apply_inv(sq), Corner::BottomRight),
            Corner::BottomRight => (v.apply_inv(sq), Corner::TopRight),
            Corner::TopRight => (h.apply(sq), Corner::TopLeft),
            Corner::TopLeft => (v.apply(sq), Corner::BottomLeft),
        }
    };
    let mut class_of = vec![usize::MAX; 4 * k];
    let mut classes = Vec::new();
    for sq in 0..k {
        for c in Corner::ALL {
            if class_of[corner_id(sq, c)] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut corners = Vec::new();
            let (mut cs, mut cc) = (sq, c);
            loop {
                class_of[corner_id(cs, cc)] = id;
                corners.push((cs, cc));
                let (ns, nc) = rotate(cs, cc);
                if (ns, nc) == (sq, c) {
                    break;
                }
                (cs, cc) = (ns, nc);
            }
            debug_assert_eq!(corners.len() % 4, 0);
            let order = corners.len() / 4 - 1;
            classes.push(VertexClass { corners, order });
        }
    }
    (class_of, classes)
}
