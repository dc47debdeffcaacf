//! Hexagonal array universes. There is no hexagonal tracker: hex geometry is
//! reachable only through conversion into pseudo-array CSG universes, where
//! each hex prism cell is the intersection of six general-plane half-spaces
//! (three deduplicated plane families) and two z planes.

use crate::bih::Aabb;
use crate::csg::{CellFill, CsgUniverse};
use crate::error::GeomError;
use crate::ids::{CellId, SurfaceId, UniverseId};
use crate::rect::ArrayFill;
use crate::surface::{Sense, Surface};
use crate::vec3::{Position, Vec3};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HexOrientation {
    /// A flat edge faces +y; vertices lie on the x axis.
    FlatTop,
    /// A flat edge faces +x; vertices lie on the y axis.
    PointyTop,
}

impl HexOrientation {
    /// The three face-plane families as unit normals. Together with their
    /// negations they give the six prism faces.
    pub fn family_normals(self) -> [Vec3; 3] {
        match self {
            HexOrientation::FlatTop => [
                Vec3::new(SQRT3 / 2.0, 0.5, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(-SQRT3 / 2.0, 0.5, 0.0),
            ],
            HexOrientation::PointyTop => [
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.5, SQRT3 / 2.0, 0.0),
                Vec3::new(-0.5, SQRT3 / 2.0, 0.0),
            ],
        }
    }

    /// Axial-coordinate steps to the neighbor across the face with outward
    /// normal `+family_normals()[f]`; negate for the opposite face.
    pub fn family_neighbor_steps(self) -> [(i32, i32); 3] {
        // Both orientations share the axial step pattern; the normals differ.
        [(1, 0), (0, 1), (-1, 1)]
    }
}

/// Axial hex distance between two (q, r) coordinates.
pub fn hex_distance(a: (i32, i32), b: (i32, i32)) -> i32 {
    let dq = a.0 - b.0;
    let dr = a.1 - b.1;
    (dq.abs() + dr.abs() + (dq + dr).abs()) / 2
}

/// Deterministic hexagonal layout: all cells within `rings - 1` of the
/// center, enumerated ring by ring. `rings = 1` is the single center cell,
/// 2 gives 7 cells, 3 gives 19.
pub fn ring_layout(rings: usize) -> Vec<(i32, i32)> {
    assert!(rings >= 1);
    let mut out = vec![(0, 0)];
    let dirs = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
    for k in 1..rings as i32 {
        let mut q = -k;
        let mut r = k;
        for d in dirs {
            for _ in 0..k {
                out.push((q, r));
                q += d.0;
                r += d.1;
            }
        }
    }
    out
}

/// Hexagonal array universe: a prism layout in axial coordinates with a
/// daughter universe per (hex, z-slab) cell. Cell index = hex index +
/// layout length * slab index.
#[derive(Debug, Clone)]
pub struct HexArrayUniverse {
    name: String,
    pitch: f64,
    orientation: HexOrientation,
    layout: Vec<(i32, i32)>,
    edges_z: Vec<f64>,
    fills: Vec<ArrayFill>,
}

impl HexArrayUniverse {
    pub fn new(
        name: impl Into<String>,
        pitch: f64,
        orientation: HexOrientation,
        layout: Vec<(i32, i32)>,
        edges_z: Vec<f64>,
        fills: Vec<ArrayFill>,
    ) -> Result<Self, GeomError> {
        let name = name.into();
        if pitch <= 0.0 || !pitch.is_finite() {
            return Err(GeomError::InvalidModel(format!(
                "hex array '{name}': pitch must be positive"
            )));
        }
        if layout.is_empty() {
            return Err(GeomError::InvalidModel(format!(
                "hex array '{name}': empty layout"
            )));
        }
        if edges_z.len() < 2 || edges_z.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GeomError::InvalidModel(format!(
                "hex array '{name}': z edges must be strictly increasing"
            )));
        }
        let n_cells = layout.len() * (edges_z.len() - 1);
        if fills.len() != n_cells {
            return Err(GeomError::InvalidModel(format!(
                "hex array '{name}': {} fills for {} cells",
                fills.len(),
                n_cells
            )));
        }
        let mut seen = layout.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != layout.len() {
            return Err(GeomError::InvalidModel(format!(
                "hex array '{name}': duplicate (q, r) coordinates"
            )));
        }
        Ok(HexArrayUniverse {
            name,
            pitch,
            orientation,
            layout,
            edges_z,
            fills,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn orientation(&self) -> HexOrientation {
        self.orientation
    }

    pub fn layout(&self) -> &[(i32, i32)] {
        &self.layout
    }

    pub fn edges_z(&self) -> &[f64] {
        &self.edges_z
    }

    pub fn fills(&self) -> &[ArrayFill] {
        &self.fills
    }

    pub fn cell_count(&self) -> usize {
        self.fills.len()
    }

    pub fn slab_count(&self) -> usize {
        self.edges_z.len() - 1
    }

    pub fn cell_index(&self, hex: usize, slab: usize) -> usize {
        hex + self.layout.len() * slab
    }

    /// Center of hex (q, r) in the array frame (z = 0 plane).
    pub fn center_of(&self, q: i32, r: i32) -> (f64, f64) {
        let p = self.pitch;
        match self.orientation {
            HexOrientation::FlatTop => ((SQRT3 / 2.0) * p * q as f64, p * (0.5 * q as f64 + r as f64)),
            HexOrientation::PointyTop => (p * (q as f64 + 0.5 * r as f64), (SQRT3 / 2.0) * p * r as f64),
        }
    }

    /// Circumradius (center to vertex) of one hex cell.
    pub fn circumradius(&self) -> f64 {
        self.pitch / SQRT3
    }

    /// Exact bounding box of the hex footprint centered at `(cx, cy)`.
    fn hex_bbox(&self, cx: f64, cy: f64, z_lo: f64, z_hi: f64) -> Aabb {
        let (hx, hy) = match self.orientation {
            HexOrientation::FlatTop => (self.circumradius(), 0.5 * self.pitch),
            HexOrientation::PointyTop => (0.5 * self.pitch, self.circumradius()),
        };
        Aabb::new(
            Position::new(cx - hx, cy - hy, z_lo),
            Position::new(cx + hx, cy + hy, z_hi),
        )
    }
}

/// Convert a hexagonal array into a pseudo-array CSG universe. Shared face
/// planes deduplicate across adjacent cells; cell ids keep the array's
/// (hex, slab) indexing so the mapping table is the identity by construction.
pub fn to_pseudo_array_hex(
    array: &HexArrayUniverse,
) -> Result<(CsgUniverse, Vec<CellId>), GeomError> {
    let mut b = CsgUniverse::builder(format!("{}@pseudo", array.name));
    let normals = array.orientation.family_normals();
    let half = 0.5 * array.pitch;

    let z_ids: Vec<SurfaceId> = array
        .edges_z
        .iter()
        .map(|&z| b.add_surface(Surface::PlaneZ(z)))
        .collect();

    // Face plane ids per hex, computed first so planes deduplicate in a
    // stable order (all faces of hex 0, then hex 1, ...).
    let mut face_ids: Vec<[(SurfaceId, SurfaceId); 3]> = Vec::with_capacity(array.layout.len());
    for &(q, r) in &array.layout {
        let (cx, cy) = array.center_of(q, r);
        let center = Vec3::new(cx, cy, 0.0);
        let mut families = [(SurfaceId(0), SurfaceId(0)); 3];
        for (f, n) in normals.iter().enumerate() {
            let c = n.dot(center);
            let hi = b.add_surface(Surface::GeneralPlane { normal: *n, d: c + half });
            let lo = b.add_surface(Surface::GeneralPlane { normal: *n, d: c - half });
            families[f] = (lo, hi);
        }
        face_ids.push(families);
    }

    let mut map = Vec::with_capacity(array.cell_count());
    let mut total_box: Option<Aabb> = None;
    for slab in 0..array.slab_count() {
        for (hex, &(q, r)) in array.layout.iter().enumerate() {
            let mut senses: Vec<(SurfaceId, Sense)> = Vec::with_capacity(8);
            for f in 0..3 {
                let (lo, hi) = face_ids[hex][f];
                senses.push((lo, Sense::Positive));
                senses.push((hi, Sense::Negative));
            }
            senses.push((z_ids[slab], Sense::Positive));
            senses.push((z_ids[slab + 1], Sense::Negative));

            let (cx, cy) = array.center_of(q, r);
            let bbox = array.hex_bbox(cx, cy, array.edges_z[slab], array.edges_z[slab + 1]);
            total_box = Some(match total_box {
                None => bbox,
                Some(t) => t.union(&bbox),
            });
            let fill = array.fills[array.cell_index(hex, slab)];
            let cell = b.add_cell_with_bbox(
                &senses,
                CellFill::Daughter {
                    universe: fill.universe,
                    translation: fill.translation,
                },
                Some(bbox),
            );
            map.push(cell);
        }
    }
    let universe = b.bbox(total_box.unwrap()).build()?;
    Ok((universe, map))
}
