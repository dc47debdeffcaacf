//! CSG universes: cells formed by intersecting surface half-spaces, with
//! per-surface neighbor lists and optional BIH acceleration.

use crate::bih::{clip_bbox, Aabb, BihParams, BihTree};
use crate::error::GeomError;
use crate::ids::{CellId, MaterialId, SurfaceId, UniverseId};
use crate::surface::{Sense, Surface};
use crate::vec3::{Direction, Position, Vec3};

/// Tolerance for merging surfaces that describe the same geometry, so shared
/// faces are represented once.
pub const SURFACE_MERGE_TOL: f64 = 1e-9;

/// What occupies a cell: a material, or an embedded daughter universe whose
/// local origin sits at `translation` in this universe's frame.
#[derive(Debug, Clone, PartialEq)]
pub enum CellFill {
    Material(MaterialId),
    Daughter {
        universe: UniverseId,
        translation: Vec3,
    },
}

/// One cell: the intersection of the listed surface senses.
#[derive(Debug, Clone)]
pub struct CellDef {
    /// Sorted by surface id; duplicates removed.
    pub senses: Vec<(SurfaceId, Sense)>,
    pub fill: CellFill,
    /// Exact extent supplied by a converter that knows the cell shape better
    /// than conservative clipping does (hex prisms).
    pub bbox_override: Option<Aabb>,
}

/// Outcome of a surface-crossing query within one universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossFind {
    /// The neighbor cell now containing the particle.
    Cell(CellId),
    /// The crossing left the universe through a boundary surface.
    Exited,
    /// No candidate contains the particle: geometry inconsistency.
    Lost,
}

#[derive(Debug, Clone)]
pub struct CsgUniverse {
    name: String,
    surfaces: Vec<Surface>,
    cells: Vec<CellDef>,
    /// Per surface, per sense (index by `Sense::index`): cells requiring that
    /// sense on that surface, ascending by cell id.
    neighbors: Vec<[Vec<CellId>; 2]>,
    /// Surfaces through which a crossing can leave the universe.
    boundary: Vec<bool>,
    bbox: Aabb,
    cell_boxes: Vec<Aabb>,
    bih: Option<BihTree>,
}

impl CsgUniverse {
    pub fn builder(name: impl Into<String>) -> CsgUniverseBuilder {
        CsgUniverseBuilder {
            name: name.into(),
            surfaces: Vec::new(),
            cells: Vec::new(),
            bbox: None,
            build_bih: true,
            bih_params: BihParams::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn surface_count(&self) -> usize {
        self.surfaces.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn surface(&self, id: SurfaceId) -> &Surface {
        &self.surfaces[id.idx()]
    }

    pub fn cell(&self, id: CellId) -> &CellDef {
        &self.cells[id.idx()]
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellId, &CellDef)> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| (CellId::from_idx(i), c))
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn cell_bbox(&self, id: CellId) -> Aabb {
        self.cell_boxes[id.idx()]
    }

    pub fn bih(&self) -> Option<&BihTree> {
        self.bih.as_ref()
    }

    pub fn is_boundary_surface(&self, id: SurfaceId) -> bool {
        self.boundary[id.idx()]
    }

    /// Surfaces flagged as universe boundary.
    pub fn boundary_surfaces(&self) -> impl Iterator<Item = SurfaceId> + '_ {
        self.boundary
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| SurfaceId::from_idx(i))
    }

    pub fn neighbor_list(&self, surface: SurfaceId, sense: Sense) -> &[CellId] {
        &self.neighbors[surface.idx()][sense.index()]
    }

    /// Test fixture hook: mutable neighbor list access breaks the build-time
    /// invariant on purpose (negative controls for the verification suites).
    #[doc(hidden)]
    pub fn neighbor_list_mut(&mut self, surface: SurfaceId, sense: Sense) -> &mut Vec<CellId> {
        &mut self.neighbors[surface.idx()][sense.index()]
    }

    /// True iff every surface sense of the cell matches at `pos`.
    #[inline]
    pub fn cell_contains(&self, cell: CellId, pos: Position) -> bool {
        self.cells[cell.idx()]
            .senses
            .iter()
            .all(|&(s, sense)| self.surfaces[s.idx()].sense_of(pos) == sense)
    }

    /// Cell containing `pos`, via BIH traversal when a tree is attached.
    pub fn find_cell(&self, pos: Position) -> Option<CellId> {
        match &self.bih {
            Some(tree) => tree.find(pos, |c| self.cell_contains(c, pos)),
            None => self.find_cell_linear(pos),
        }
    }

    /// Linear scan in ascending cell id order; the independent oracle for the
    /// BIH path.
    pub fn find_cell_linear(&self, pos: Position) -> Option<CellId> {
        (0..self.cells.len())
            .map(CellId::from_idx)
            .find(|&c| self.cell_contains(c, pos))
    }

    /// Minimum forward crossing over the cell's bounding surfaces, excluding
    /// crossings within `min_dist` and any surface listed in `skip`. Ties go
    /// to the lowest surface id. `None` means no forward crossing, which for
    /// a closed cell signals a construction failure.
    pub fn distance_to_surface(
        &self,
        cell: CellId,
        pos: Position,
        dir: Direction,
        min_dist: f64,
        skip: &[SurfaceId],
    ) -> Option<(f64, SurfaceId)> {
        let mut best: Option<(f64, SurfaceId)> = None;
        for &(s, _) in &self.cells[cell.idx()].senses {
            if skip.contains(&s) {
                continue;
            }
            if let Some(d) = self.surfaces[s.idx()].distance_to(pos, dir, min_dist) {
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, s));
                }
            }
        }
        best
    }

    /// Find the cell on the far side of `surface`. `pos` must already be
    /// nudged past the surface. Uses an exclusion-aware BIH query when a tree
    /// is attached, otherwise scans the post-crossing neighbor list.
    pub fn cross_surface(&self, from: CellId, surface: SurfaceId, pos: Position) -> CrossFind {
        let hit = match &self.bih {
            Some(tree) => tree.find(pos, |c| c != from && self.cell_contains(c, pos)),
            None => self.cross_surface_neighbors(from, surface, pos),
        };
        match hit {
            Some(c) => CrossFind::Cell(c),
            None => {
                let sense = self.surfaces[surface.idx()].sense_of(pos);
                if self.neighbors[surface.idx()][sense.index()].is_empty() {
                    CrossFind::Exited
                } else {
                    CrossFind::Lost
                }
            }
        }
    }

    /// Neighbor-list scan form of `cross_surface`; the oracle for the BIH
    /// exclusion query.
    pub fn cross_surface_neighbors(
        &self,
        from: CellId,
        surface: SurfaceId,
        pos: Position,
    ) -> Option<CellId> {
        let sense = self.surfaces[surface.idx()].sense_of(pos);
        self.neighbors[surface.idx()][sense.index()]
            .iter()
            .copied()
            .find(|&c| c != from && self.cell_contains(c, pos))
    }

    /// Conservative bounding box for one cell, starting from the universe box.
    pub fn compute_cell_bbox(&self, cell: CellId) -> Result<Aabb, GeomError> {
        compute_cell_bbox_from(&self.bbox, &self.surfaces, &self.cells[cell.idx()])
            .ok_or(GeomError::EmptyCellBox {
                universe: UniverseId(0),
                cell,
            })
    }
}

fn compute_cell_bbox_from(start: &Aabb, surfaces: &[Surface], cell: &CellDef) -> Option<Aabb> {
    if let Some(b) = cell.bbox_override {
        return Some(b);
    }
    let senses: Vec<(Sense, &Surface)> = cell
        .senses
        .iter()
        .map(|&(s, sense)| (sense, &surfaces[s.idx()]))
        .collect();
    clip_bbox(start, &senses)
}

pub struct CsgUniverseBuilder {
    name: String,
    surfaces: Vec<Surface>,
    cells: Vec<CellDef>,
    bbox: Option<Aabb>,
    build_bih: bool,
    bih_params: BihParams,
}

/// Extent used to derive a universe box when none is supplied; cells still
/// unbounded against this box make the build fail.
const DERIVE_EXTENT: f64 = 1e9;

impl CsgUniverseBuilder {
    /// Add a surface, merging with an existing one that matches within
    /// `SURFACE_MERGE_TOL`.
    pub fn add_surface(&mut self, surface: Surface) -> SurfaceId {
        for (i, existing) in self.surfaces.iter().enumerate() {
            if existing.approx_eq(&surface, SURFACE_MERGE_TOL) {
                return SurfaceId::from_idx(i);
            }
        }
        self.surfaces.push(surface);
        SurfaceId::from_idx(self.surfaces.len() - 1)
    }

    pub fn add_cell(&mut self, senses: &[(SurfaceId, Sense)], fill: CellFill) -> CellId {
        self.add_cell_with_bbox(senses, fill, None)
    }

    pub fn add_cell_with_bbox(
        &mut self,
        senses: &[(SurfaceId, Sense)],
        fill: CellFill,
        bbox_override: Option<Aabb>,
    ) -> CellId {
        assert!(!senses.is_empty(), "a cell needs at least one surface sense");
        let mut senses = senses.to_vec();
        senses.sort_by_key(|&(s, _)| s);
        senses.dedup();
        self.cells.push(CellDef {
            senses,
            fill,
            bbox_override,
        });
        CellId::from_idx(self.cells.len() - 1)
    }

    /// Explicit universe extent; otherwise derived from the cells.
    pub fn bbox(mut self, bbox: Aabb) -> Self {
        self.bbox = Some(bbox);
        self
    }

    pub fn with_bih(mut self, enabled: bool) -> Self {
        self.build_bih = enabled;
        self
    }

    pub fn bih_params(mut self, params: BihParams) -> Self {
        self.bih_params = params;
        self
    }

    pub fn build(self) -> Result<CsgUniverse, GeomError> {
        let CsgUniverseBuilder {
            name,
            surfaces,
            cells,
            bbox,
            build_bih,
            bih_params,
        } = self;
        if cells.is_empty() {
            return Err(GeomError::InvalidModel(format!(
                "universe '{name}' has no cells"
            )));
        }
        for (i, cell) in cells.iter().enumerate() {
            for &(s, _) in &cell.senses {
                if s.idx() >= surfaces.len() {
                    return Err(GeomError::InvalidModel(format!(
                        "universe '{name}' cell {i} references unknown surface {s}"
                    )));
                }
            }
        }

        // Universe box: explicit, or the union of cell boxes clipped against
        // a huge starting extent.
        let derive_box = Aabb::cube(DERIVE_EXTENT);
        let universe_bbox = match bbox {
            Some(b) => b,
            None => {
                let mut total: Option<Aabb> = None;
                for (i, cell) in cells.iter().enumerate() {
                    let b = compute_cell_bbox_from(&derive_box, &surfaces, cell).ok_or(
                        GeomError::EmptyCellBox {
                            universe: UniverseId(0),
                            cell: CellId::from_idx(i),
                        },
                    )?;
                    for axis in crate::vec3::Axis::ALL {
                        if b.lo.component(axis) <= -DERIVE_EXTENT / 2.0
                            || b.hi.component(axis) >= DERIVE_EXTENT / 2.0
                        {
                            return Err(GeomError::UnboundedUniverse {
                                universe: UniverseId(0),
                            });
                        }
                    }
                    total = Some(match total {
                        None => b,
                        Some(t) => t.union(&b),
                    });
                }
                total.unwrap()
            }
        };

        // Official cell boxes start from the universe box.
        let mut cell_boxes = Vec::with_capacity(cells.len());
        for (i, cell) in cells.iter().enumerate() {
            let b = compute_cell_bbox_from(&universe_bbox, &surfaces, cell).ok_or(
                GeomError::EmptyCellBox {
                    universe: UniverseId(0),
                    cell: CellId::from_idx(i),
                },
            )?;
            cell_boxes.push(b);
        }

        // Neighbor lists: for each (surface, sense), exactly the cells whose
        // definitions include that pair, in ascending cell id order.
        let mut neighbors: Vec<[Vec<CellId>; 2]> = vec![[Vec::new(), Vec::new()]; surfaces.len()];
        for (i, cell) in cells.iter().enumerate() {
            for &(s, sense) in &cell.senses {
                neighbors[s.idx()][sense.index()].push(CellId::from_idx(i));
            }
        }
        let boundary: Vec<bool> = neighbors
            .iter()
            .map(|lists| lists[0].is_empty() != lists[1].is_empty())
            .collect();

        let bih = if build_bih {
            let boxes: Vec<(CellId, Aabb)> = cell_boxes
                .iter()
                .enumerate()
                .map(|(i, b)| (CellId::from_idx(i), *b))
                .collect();
            Some(BihTree::build(&boxes, &bih_params))
        } else {
            None
        };

        Ok(CsgUniverse {
            name,
            surfaces,
            cells,
            neighbors,
            boundary,
            bbox: universe_bbox,
            cell_boxes,
            bih,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two-cell universe: a pin (inside cylinder) and moderator (outside
    /// cylinder) within a unit cube.
    fn pin_universe(with_bih: bool) -> CsgUniverse {
        let mut b = CsgUniverse::builder("pin");
        let x0 = b.add_surface(Surface::PlaneX(0.0));
        let x1 = b.add_surface(Surface::PlaneX(1.0));
        let y0 = b.add_surface(Surface::PlaneY(0.0));
        let y1 = b.add_surface(Surface::PlaneY(1.0));
        let z0 = b.add_surface(Surface::PlaneZ(0.0));
        let z1 = b.add_surface(Surface::PlaneZ(1.0));
        let cyl = b.add_surface(Surface::CylinderZ {
            x0: 0.5,
            y0: 0.5,
            r: 0.25,
        });
        let cube = [
            (x0, Sense::Positive),
            (x1, Sense::Negative),
            (y0, Sense::Positive),
            (y1, Sense::Negative),
            (z0, Sense::Positive),
            (z1, Sense::Negative),
        ];
        let mut inner = cube.to_vec();
        inner.push((cyl, Sense::Negative));
        b.add_cell(&inner, CellFill::Material(MaterialId(0)));
        let mut outer = cube.to_vec();
        outer.push((cyl, Sense::Positive));
        b.add_cell(&outer, CellFill::Material(MaterialId(1)));
        b.with_bih(with_bih).build().unwrap()
    }

    #[test]
    fn surface_dedup_merges_shared_faces() {
        let mut b = CsgUniverse::builder("two-box");
        let s0 = b.add_surface(Surface::PlaneX(0.0));
        let s1 = b.add_surface(Surface::PlaneX(1.0));
        let s1_again = b.add_surface(Surface::PlaneX(1.0 + 1e-12));
        assert_eq!(s1, s1_again);
        assert_ne!(s0, s1);
    }

    #[test]
    fn contains_and_find() {
        let u = pin_universe(true);
        let inside = Position::new(0.5, 0.5, 0.5);
        let moderator = Position::new(0.9, 0.9, 0.5);
        assert!(u.cell_contains(CellId(0), inside));
        assert!(!u.cell_contains(CellId(0), moderator));
        assert_eq!(u.find_cell(inside), Some(CellId(0)));
        assert_eq!(u.find_cell(moderator), Some(CellId(1)));
        assert_eq!(u.find_cell(Position::new(5.0, 0.5, 0.5)), None);
        assert_eq!(u.find_cell_linear(inside), Some(CellId(0)));
    }

    #[test]
    fn distance_examples() {
        let u = pin_universe(false);
        // From the center heading +x: cylinder at 0.25.
        let (d, s) = u
            .distance_to_surface(CellId(0), Position::new(0.5, 0.5, 0.5), Direction::PLUS_X, 0.0, &[])
            .unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        assert_eq!(u.surface(s), &Surface::CylinderZ { x0: 0.5, y0: 0.5, r: 0.25 });
        // Moderator cell heading +x: cube face at 0.1.
        let (d, _) = u
            .distance_to_surface(CellId(1), Position::new(0.9, 0.5, 0.5), Direction::PLUS_X, 0.0, &[])
            .unwrap();
        assert!((d - 0.1).abs() < 1e-12);
    }

    #[test]
    fn distance_brute_force_oracle() {
        let u = pin_universe(false);
        let mut state = 0xfeedu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let pos = Position::new(0.5 + 0.2 * (next() - 0.5), 0.5 + 0.2 * (next() - 0.5), next());
            let cell = match u.find_cell_linear(pos) {
                Some(c) => c,
                None => continue,
            };
            let dir = {
                let w = 2.0 * next() - 1.0;
                let phi = std::f64::consts::TAU * next();
                let s = (1.0 - w * w).sqrt();
                Direction::new(s * phi.cos(), s * phi.sin(), w)
            };
            let got = u.distance_to_surface(cell, pos, dir, 0.0, &[]);
            // Exhaustive per-surface minimum.
            let mut want: Option<(f64, SurfaceId)> = None;
            for &(s, _) in &u.cell(cell).senses {
                if let Some(d) = u.surface(s).distance_to(pos, dir, 0.0) {
                    if want.map_or(true, |(bd, _)| d < bd) {
                        want = Some((d, s));
                    }
                }
            }
            assert_eq!(got, want);
        }
    }

    #[test]
    fn neighbor_lists_and_boundary() {
        // Two boxes sharing PlaneX(1).
        let mut b = CsgUniverse::builder("two-box");
        let x0 = b.add_surface(Surface::PlaneX(0.0));
        let xm = b.add_surface(Surface::PlaneX(1.0));
        let x2 = b.add_surface(Surface::PlaneX(2.0));
        let y0 = b.add_surface(Surface::PlaneY(0.0));
        let y1 = b.add_surface(Surface::PlaneY(1.0));
        let z0 = b.add_surface(Surface::PlaneZ(0.0));
        let z1 = b.add_surface(Surface::PlaneZ(1.0));
        let sides = [
            (y0, Sense::Positive),
            (y1, Sense::Negative),
            (z0, Sense::Positive),
            (z1, Sense::Negative),
        ];
        let mut left = sides.to_vec();
        left.extend([(x0, Sense::Positive), (xm, Sense::Negative)]);
        let mut right = sides.to_vec();
        right.extend([(xm, Sense::Positive), (x2, Sense::Negative)]);
        b.add_cell(&left, CellFill::Material(MaterialId(0)));
        b.add_cell(&right, CellFill::Material(MaterialId(0)));
        let u = b.build().unwrap();

        assert_eq!(u.neighbor_list(xm, Sense::Negative), &[CellId(0)]);
        assert_eq!(u.neighbor_list(xm, Sense::Positive), &[CellId(1)]);
        assert!(!u.is_boundary_surface(xm));
        assert!(u.is_boundary_surface(x0));
        assert!(u.is_boundary_surface(x2));

        // Crossing from left through the shared plane lands in right.
        let pos = Position::new(1.0 + 1e-9, 0.5, 0.5);
        assert_eq!(u.cross_surface(CellId(0), xm, pos), CrossFind::Cell(CellId(1)));
        // Crossing out the far side exits.
        let out = Position::new(2.0 + 1e-9, 0.5, 0.5);
        assert_eq!(u.cross_surface(CellId(1), x2, out), CrossFind::Exited);
    }

    #[test]
    fn single_cell_universe_neighbor_lists() {
        let mut b = CsgUniverse::builder("cube");
        let x0 = b.add_surface(Surface::PlaneX(0.0));
        let x1 = b.add_surface(Surface::PlaneX(1.0));
        let y0 = b.add_surface(Surface::PlaneY(0.0));
        let y1 = b.add_surface(Surface::PlaneY(1.0));
        let z0 = b.add_surface(Surface::PlaneZ(0.0));
        let z1 = b.add_surface(Surface::PlaneZ(1.0));
        b.add_cell(
            &[
                (x0, Sense::Positive),
                (x1, Sense::Negative),
                (y0, Sense::Positive),
                (y1, Sense::Negative),
                (z0, Sense::Positive),
                (z1, Sense::Negative),
            ],
            CellFill::Material(MaterialId(0)),
        );
        let u = b.build().unwrap();
        assert_eq!(u.neighbor_list(x0, Sense::Positive), &[CellId(0)]);
        assert!(u.neighbor_list(x0, Sense::Negative).is_empty());
        assert!(u.is_boundary_surface(x0));
    }

    #[test]
    fn unbounded_universe_rejected() {
        let mut b = CsgUniverse::builder("half-space");
        let x0 = b.add_surface(Surface::PlaneX(0.0));
        b.add_cell(&[(x0, Sense::Positive)], CellFill::Material(MaterialId(0)));
        assert!(matches!(
            b.build(),
            Err(GeomError::UnboundedUniverse { .. })
        ));
    }

    #[test]
    fn contradictory_cell_rejected() {
        let mut b = CsgUniverse::builder("empty");
        let x0 = b.add_surface(Surface::PlaneX(0.0));
        let x1 = b.add_surface(Surface::PlaneX(1.0));
        b.add_cell(
            &[(x0, Sense::Negative), (x1, Sense::Positive)],
            CellFill::Material(MaterialId(0)),
        );
        assert!(matches!(b.build(), Err(GeomError::EmptyCellBox { .. })));
    }
}
