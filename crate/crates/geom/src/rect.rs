//! Rectilinear array universes: binary-search point location, O(1) surface
//! crossing, slab distances, and conversion to pseudo-array CSG universes.

use crate::bih::Aabb;
use crate::csg::{CellFill, CsgUniverse};
use crate::error::GeomError;
use crate::ids::{CellId, SurfaceId, UniverseId};
use crate::surface::{Sense, Surface};
use crate::vec3::{Axis, Direction, Position, Vec3};

/// Strictly increasing edge coordinates on each axis. Spacing may be
/// non-uniform, so point location is always a binary search.
#[derive(Debug, Clone)]
pub struct RectGrid {
    edges: [Vec<f64>; 3],
}

impl RectGrid {
    pub fn new(edges_x: Vec<f64>, edges_y: Vec<f64>, edges_z: Vec<f64>) -> Result<Self, GeomError> {
        let edges = [edges_x, edges_y, edges_z];
        for (axis, e) in edges.iter().enumerate() {
            if e.len() < 2 {
                return Err(GeomError::InvalidModel(format!(
                    "grid axis {axis} needs at least two edges"
                )));
            }
            if e.windows(2).any(|w| w[0] >= w[1]) || e.iter().any(|v| !v.is_finite()) {
                return Err(GeomError::InvalidModel(format!(
                    "grid axis {axis} edges must be finite and strictly increasing"
                )));
            }
        }
        Ok(RectGrid { edges })
    }

    pub fn edges(&self, axis: Axis) -> &[f64] {
        &self.edges[axis.index()]
    }

    pub fn shape(&self) -> [usize; 3] {
        [
            self.edges[0].len() - 1,
            self.edges[1].len() - 1,
            self.edges[2].len() - 1,
        ]
    }

    pub fn cell_count(&self) -> usize {
        let s = self.shape();
        s[0] * s[1] * s[2]
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::new(
            Position::new(self.edges[0][0], self.edges[1][0], self.edges[2][0]),
            Position::new(
                *self.edges[0].last().unwrap(),
                *self.edges[1].last().unwrap(),
                *self.edges[2].last().unwrap(),
            ),
        )
    }

    /// Interval index containing `x` on one axis. A point exactly on an
    /// interior edge belongs to the higher-index interval, consistent with
    /// the positive-at-zero sense tie-break.
    #[inline]
    pub fn find_interval(&self, axis: Axis, x: f64) -> Option<usize> {
        let e = &self.edges[axis.index()];
        if x < e[0] || x >= *e.last().unwrap() {
            return None;
        }
        Some(e.partition_point(|&v| v <= x) - 1)
    }

    /// Per-dimension binary search; `None` if outside the grid on any axis.
    pub fn find_cell(&self, pos: Position) -> Option<[usize; 3]> {
        Some([
            self.find_interval(Axis::X, pos.x)?,
            self.find_interval(Axis::Y, pos.y)?,
            self.find_interval(Axis::Z, pos.z)?,
        ])
    }

    /// Step the index across a cell face; `None` leaves the grid.
    pub fn cross_surface(&self, ijk: [usize; 3], axis: Axis, positive: bool) -> Option<[usize; 3]> {
        let mut out = ijk;
        let a = axis.index();
        if positive {
            if ijk[a] + 1 >= self.shape()[a] {
                return None;
            }
            out[a] += 1;
        } else {
            if ijk[a] == 0 {
                return None;
            }
            out[a] -= 1;
        }
        Some(out)
    }

    /// Minimum forward crossing over the six slab planes of cell `ijk`.
    /// Ties break x < y < z. A face listed in `skip_outer` suppresses the
    /// crossing only when it is the outermost grid face on that side.
    pub fn distance_to_surface(
        &self,
        ijk: [usize; 3],
        pos: Position,
        dir: Direction,
        min_dist: f64,
        skip_outer: &[(Axis, bool)],
    ) -> Option<(f64, Axis, bool)> {
        let mut best: Option<(f64, Axis, bool)> = None;
        for axis in Axis::ALL {
            let a = axis.index();
            let d = dir.component(axis);
            if d == 0.0 {
                continue;
            }
            let positive = d > 0.0;
            let edge_idx = if positive { ijk[a] + 1 } else { ijk[a] };
            let outermost = if positive {
                edge_idx == self.edges[a].len() - 1
            } else {
                edge_idx == 0
            };
            if outermost && skip_outer.contains(&(axis, positive)) {
                continue;
            }
            let t = (self.edges[a][edge_idx] - pos.component(axis)) / d;
            if t > min_dist && best.map_or(true, |(bt, _, _)| t < bt) {
                best = Some((t, axis, positive));
            }
        }
        best
    }

    #[inline]
    pub fn linear_index(&self, ijk: [usize; 3]) -> usize {
        let s = self.shape();
        ijk[0] + s[0] * (ijk[1] + s[1] * ijk[2])
    }

    #[inline]
    pub fn from_linear(&self, idx: usize) -> [usize; 3] {
        let s = self.shape();
        [idx % s[0], (idx / s[0]) % s[1], idx / (s[0] * s[1])]
    }

    pub fn cell_bounds(&self, ijk: [usize; 3]) -> Aabb {
        Aabb::new(
            Position::new(
                self.edges[0][ijk[0]],
                self.edges[1][ijk[1]],
                self.edges[2][ijk[2]],
            ),
            Position::new(
                self.edges[0][ijk[0] + 1],
                self.edges[1][ijk[1] + 1],
                self.edges[2][ijk[2] + 1],
            ),
        )
    }
}

/// A daughter universe placed in an array cell; `translation` is the
/// daughter's local origin in the array frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayFill {
    pub universe: UniverseId,
    pub translation: Vec3,
}

/// Rectilinear array universe: a grid whose cells are each filled with a
/// daughter universe.
#[derive(Debug, Clone)]
pub struct RectArrayUniverse {
    name: String,
    grid: RectGrid,
    fills: Vec<ArrayFill>,
}

impl RectArrayUniverse {
    pub fn new(
        name: impl Into<String>,
        grid: RectGrid,
        fills: Vec<ArrayFill>,
    ) -> Result<Self, GeomError> {
        let name = name.into();
        if fills.len() != grid.cell_count() {
            return Err(GeomError::InvalidModel(format!(
                "array '{name}': {} fills for {} cells",
                fills.len(),
                grid.cell_count()
            )));
        }
        Ok(RectArrayUniverse { name, grid, fills })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> &RectGrid {
        &self.grid
    }

    pub fn fill(&self, cell: CellId) -> ArrayFill {
        self.fills[cell.idx()]
    }

    pub fn fills(&self) -> &[ArrayFill] {
        &self.fills
    }

    pub fn cell_count(&self) -> usize {
        self.fills.len()
    }

    pub fn find_cell(&self, pos: Position) -> Option<CellId> {
        self.grid
            .find_cell(pos)
            .map(|ijk| CellId::from_idx(self.grid.linear_index(ijk)))
    }

    pub fn cross_surface(&self, cell: CellId, axis: Axis, positive: bool) -> Option<CellId> {
        let ijk = self.grid.from_linear(cell.idx());
        self.grid
            .cross_surface(ijk, axis, positive)
            .map(|n| CellId::from_idx(self.grid.linear_index(n)))
    }

    pub fn distance_to_surface(
        &self,
        cell: CellId,
        pos: Position,
        dir: Direction,
        min_dist: f64,
        skip_outer: &[(Axis, bool)],
    ) -> Option<(f64, Axis, bool)> {
        self.grid
            .distance_to_surface(self.grid.from_linear(cell.idx()), pos, dir, min_dist, skip_outer)
    }

    /// The six outer face planes, for coincident-surface preprocessing.
    pub fn outer_face_plane(&self, axis: Axis, positive: bool) -> Surface {
        let e = self.grid.edges(axis);
        let v = if positive { *e.last().unwrap() } else { e[0] };
        match axis {
            Axis::X => Surface::PlaneX(v),
            Axis::Y => Surface::PlaneY(v),
            Axis::Z => Surface::PlaneZ(v),
        }
    }
}

/// Convert a rectilinear array into a pseudo-array CSG universe: one
/// deduplicated plane per grid edge and one six-sided cell per array cell,
/// preserving daughters and translations. Cell ids keep the array's linear
/// indexing, so the returned mapping table is the identity by construction.
pub fn to_pseudo_array_rect(
    array: &RectArrayUniverse,
) -> Result<(CsgUniverse, Vec<CellId>), GeomError> {
    let grid = &array.grid;
    let mut b = CsgUniverse::builder(format!("{}@pseudo", array.name));
    let mut plane_ids: [Vec<SurfaceId>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for axis in Axis::ALL {
        for &e in grid.edges(axis) {
            let s = match axis {
                Axis::X => Surface::PlaneX(e),
                Axis::Y => Surface::PlaneY(e),
                Axis::Z => Surface::PlaneZ(e),
            };
            plane_ids[axis.index()].push(b.add_surface(s));
        }
    }
    let n = grid.cell_count();
    let mut map = Vec::with_capacity(n);
    for idx in 0..n {
        let ijk = grid.from_linear(idx);
        let senses: Vec<(SurfaceId, Sense)> = Axis::ALL
            .into_iter()
            .flat_map(|axis| {
                let a = axis.index();
                [
                    (plane_ids[a][ijk[a]], Sense::Positive),
                    (plane_ids[a][ijk[a] + 1], Sense::Negative),
                ]
            })
            .collect();
        let fill = array.fills[idx];
        let cell = b.add_cell(
            &senses,
            CellFill::Daughter {
                universe: fill.universe,
                translation: fill.translation,
            },
        );
        map.push(cell);
    }
    let universe = b.bbox(grid.bbox()).build()?;
    Ok((universe, map))
}
