//! Axis-aligned boxes and the bounding interval hierarchy that accelerates
//! CSG point location and surface-crossing queries.
//!
//! Each inner node stores two clip planes on one axis: the left child owns
//! `(-inf, left_max]`, the right child `[right_min, +inf)`, and the two
//! half-spaces may overlap. Every cell lands in exactly one leaf.

use crate::ids::CellId;
use crate::surface::{Sense, Surface};
use crate::vec3::{Axis, Position};
use std::fmt::Write as _;

/// Axis-aligned bounding box (cm). `lo <= hi` componentwise; zero thickness
/// along an axis is legal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub lo: Position,
    pub hi: Position,
}

impl Aabb {
    pub fn new(lo: Position, hi: Position) -> Self {
        debug_assert!(lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z);
        Aabb { lo, hi }
    }

    /// Box spanning `[-half, half]` on every axis.
    pub fn cube(half: f64) -> Self {
        Aabb {
            lo: Position::new(-half, -half, -half),
            hi: Position::new(half, half, half),
        }
    }

    #[inline]
    pub fn contains(&self, p: Position) -> bool {
        p.x >= self.lo.x
            && p.x <= self.hi.x
            && p.y >= self.lo.y
            && p.y <= self.hi.y
            && p.z >= self.lo.z
            && p.z <= self.hi.z
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            lo: Position::new(
                self.lo.x.min(other.lo.x),
                self.lo.y.min(other.lo.y),
                self.lo.z.min(other.lo.z),
            ),
            hi: Position::new(
                self.hi.x.max(other.hi.x),
                self.hi.y.max(other.hi.y),
                self.hi.z.max(other.hi.z),
            ),
        }
    }

    #[inline]
    pub fn center(&self, axis: Axis) -> f64 {
        0.5 * (self.lo.component(axis) + self.hi.component(axis))
    }

    #[inline]
    pub fn extent(&self, axis: Axis) -> f64 {
        self.hi.component(axis) - self.lo.component(axis)
    }

    pub fn surface_area(&self) -> f64 {
        let dx = self.extent(Axis::X);
        let dy = self.extent(Axis::Y);
        let dz = self.extent(Axis::Z);
        2.0 * (dx * dy + dy * dz + dz * dx)
    }

    pub fn is_valid(&self) -> bool {
        self.lo.is_finite()
            && self.hi.is_finite()
            && self.lo.x <= self.hi.x
            && self.lo.y <= self.hi.y
            && self.lo.z <= self.hi.z
    }
}

/// Derive a conservative bounding box for an intersection of surface senses,
/// starting from `start` and tightening one constraint at a time.
///
/// Axis planes clip the matching face, a cylinder interior clips x/y to the
/// circumscribing square, a sphere interior clips all axes. Constraints that
/// cannot tighten an axis-aligned box (positive-sense quadrics, oblique
/// planes) leave it unchanged. Returns `None` when the constraints
/// contradict each other and the box comes out empty.
pub fn clip_bbox(start: &Aabb, senses: &[(Sense, &Surface)]) -> Option<Aabb> {
    let mut lo = [start.lo.x, start.lo.y, start.lo.z];
    let mut hi = [start.hi.x, start.hi.y, start.hi.z];

    let mut clip_plane = |axis: usize, value: f64, keep_positive: bool| {
        if keep_positive {
            lo[axis] = lo[axis].max(value);
        } else {
            hi[axis] = hi[axis].min(value);
        }
    };

    for &(sense, surface) in senses {
        match *surface {
            Surface::PlaneX(a) => clip_plane(0, a, sense == Sense::Positive),
            Surface::PlaneY(a) => clip_plane(1, a, sense == Sense::Positive),
            Surface::PlaneZ(a) => clip_plane(2, a, sense == Sense::Positive),
            Surface::GeneralPlane { normal, d } => {
                // Only axis-aligned general planes tighten the box.
                const TOL: f64 = 1e-12;
                for axis in Axis::ALL {
                    let n = normal.component(axis);
                    if (n.abs() - 1.0).abs() <= TOL {
                        let value = d / n;
                        let keep_positive = (n > 0.0) == (sense == Sense::Positive);
                        clip_plane(axis.index(), value, keep_positive);
                    }
                }
            }
            Surface::CylinderZ { x0, y0, r } => {
                if sense == Sense::Negative {
                    clip_plane(0, x0 - r, true);
                    clip_plane(0, x0 + r, false);
                    clip_plane(1, y0 - r, true);
                    clip_plane(1, y0 + r, false);
                }
            }
            Surface::Sphere { center, r } => {
                if sense == Sense::Negative {
                    let c = [center.x, center.y, center.z];
                    for axis in 0..3 {
                        clip_plane(axis, c[axis] - r, true);
                        clip_plane(axis, c[axis] + r, false);
                    }
                }
            }
        }
    }

    if lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2] {
        return None;
    }
    Some(Aabb {
        lo: Position::new(lo[0], lo[1], lo[2]),
        hi: Position::new(hi[0], hi[1], hi[2]),
    })
}

/// Tuning knobs for BIH construction.
#[derive(Debug, Clone)]
pub struct BihParams {
    /// Cost of traversing an inner node in the SAH score.
    pub traversal_cost: f64,
    /// Per-cell intersection cost in the SAH score.
    pub intersect_cost: f64,
    /// Candidate partition positions as fractions of the node extent.
    pub candidate_fractions: Vec<f64>,
    /// Stop splitting once a node holds this many cells or fewer.
    pub max_leaf: usize,
}

impl Default for BihParams {
    fn default() -> Self {
        BihParams {
            traversal_cost: 1.0,
            intersect_cost: 1.0,
            candidate_fractions: vec![0.25, 0.5, 0.75],
            max_leaf: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub enum BihNode {
    Inner {
        axis: Axis,
        left_max: f64,
        right_min: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        cells: Vec<CellId>,
    },
}

/// Flat-array BIH. Node 0 is the root; children are stored after their
/// parent so the layout (and the debug dump) is deterministic.
#[derive(Debug, Clone)]
pub struct BihTree {
    nodes: Vec<BihNode>,
    n_cells: usize,
}

struct Item {
    cell: CellId,
    bbox: Aabb,
}

impl BihTree {
    /// Build from `(cell, bbox)` pairs with SAH-scored partitions.
    pub fn build(bboxes: &[(CellId, Aabb)], params: &BihParams) -> BihTree {
        assert!(!bboxes.is_empty(), "BIH build requires at least one box");
        let items: Vec<Item> = bboxes
            .iter()
            .map(|&(cell, bbox)| Item { cell, bbox })
            .collect();
        let mut tree = BihTree {
            nodes: Vec::new(),
            n_cells: items.len(),
        };
        tree.build_node(items, params);
        tree
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn cell_count(&self) -> usize {
        self.n_cells
    }

    fn build_node(&mut self, items: Vec<Item>, params: &BihParams) -> u32 {
        let index = self.nodes.len() as u32;
        if items.len() <= params.max_leaf {
            self.nodes.push(Self::leaf(items));
            return index;
        }

        match choose_partition(&items, params) {
            Partition::Leaf => {
                self.nodes.push(Self::leaf(items));
                index
            }
            Partition::Split { axis, left, right } => {
                let left_max = left
                    .iter()
                    .map(|it| it.bbox.hi.component(axis))
                    .fold(f64::NEG_INFINITY, f64::max);
                let right_min = right
                    .iter()
                    .map(|it| it.bbox.lo.component(axis))
                    .fold(f64::INFINITY, f64::min);
                self.nodes.push(BihNode::Inner {
                    axis,
                    left_max,
                    right_min,
                    left: 0,
                    right: 0,
                });
                let left_idx = self.build_node(left, params);
                let right_idx = self.build_node(right, params);
                match &mut self.nodes[index as usize] {
                    BihNode::Inner { left, right, .. } => {
                        *left = left_idx;
                        *right = right_idx;
                    }
                    BihNode::Leaf { .. } => unreachable!(),
                }
                index
            }
        }
    }

    fn leaf(mut items: Vec<Item>) -> BihNode {
        items.sort_by_key(|it| it.cell);
        BihNode::Leaf {
            cells: items.into_iter().map(|it| it.cell).collect(),
        }
    }

    /// Depth-first query: descend into every child whose clip interval admits
    /// `pos` (left before right), returning the first cell accepted by
    /// `accept`. Cells within a leaf are visited in ascending id order.
    pub fn find(&self, pos: Position, mut accept: impl FnMut(CellId) -> bool) -> Option<CellId> {
        let mut stack: Vec<u32> = vec![0];
        while let Some(idx) = stack.pop() {
            match &self.nodes[idx as usize] {
                BihNode::Leaf { cells } => {
                    for &c in cells {
                        if accept(c) {
                            return Some(c);
                        }
                    }
                }
                BihNode::Inner {
                    axis,
                    left_max,
                    right_min,
                    left,
                    right,
                } => {
                    let x = pos.component(*axis);
                    // Both edge conditions are tested because the
                    // half-spaces may overlap. Push right first so the left
                    // child is processed first.
                    if x >= *right_min {
                        stack.push(*right);
                    }
                    if x <= *left_max {
                        stack.push(*left);
                    }
                }
            }
        }
        None
    }

    /// All cells in leaf order (left-to-right). Each cell appears exactly once.
    pub fn leaf_cells(&self) -> Vec<CellId> {
        let mut out = Vec::with_capacity(self.n_cells);
        self.collect_cells(0, &mut out);
        out
    }

    fn collect_cells(&self, idx: u32, out: &mut Vec<CellId>) {
        match &self.nodes[idx as usize] {
            BihNode::Leaf { cells } => out.extend_from_slice(cells),
            BihNode::Inner { left, right, .. } => {
                self.collect_cells(*left, out);
                self.collect_cells(*right, out);
            }
        }
    }

    /// Walk all leaves with the per-axis clip intervals active on the path.
    /// `visit(cells, intervals)` gets `[(lo, hi); 3]` bounds per axis.
    pub fn walk_leaves(&self, mut visit: impl FnMut(&[CellId], &[(f64, f64); 3])) {
        let all = [(f64::NEG_INFINITY, f64::INFINITY); 3];
        self.walk_rec(0, all, &mut visit);
    }

    fn walk_rec(
        &self,
        idx: u32,
        intervals: [(f64, f64); 3],
        visit: &mut impl FnMut(&[CellId], &[(f64, f64); 3]),
    ) {
        match &self.nodes[idx as usize] {
            BihNode::Leaf { cells } => visit(cells, &intervals),
            BihNode::Inner {
                axis,
                left_max,
                right_min,
                left,
                right,
            } => {
                let a = axis.index();
                let mut li = intervals;
                li[a].1 = li[a].1.min(*left_max);
                self.walk_rec(*left, li, visit);
                let mut ri = intervals;
                ri[a].0 = ri[a].0.max(*right_min);
                self.walk_rec(*right, ri, visit);
            }
        }
    }

    /// Structured text dump for golden-file tests: one line per node with
    /// index, kind, axis, clip planes, and children or leaf cells.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                BihNode::Inner {
                    axis,
                    left_max,
                    right_min,
                    left,
                    right,
                } => {
                    let _ = writeln!(
                        out,
                        "{i} inner axis={axis} left_max={left_max:.17e} right_min={right_min:.17e} left={left} right={right}"
                    );
                }
                BihNode::Leaf { cells } => {
                    let ids: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
                    let _ = writeln!(out, "{i} leaf {}", ids.join(" "));
                }
            }
        }
        out
    }
}

enum Partition {
    Leaf,
    Split {
        axis: Axis,
        left: Vec<Item>,
        right: Vec<Item>,
    },
}

fn union_area(items: &[&Item]) -> f64 {
    let mut it = items.iter();
    let first = it.next().expect("non-empty side").bbox;
    let total = it.fold(first, |acc, i| acc.union(&i.bbox));
    total.surface_area().max(1e-30)
}

fn choose_partition(items: &[Item], params: &BihParams) -> Partition {
    let node_box = items
        .iter()
        .skip(1)
        .fold(items[0].bbox, |acc, it| acc.union(&it.bbox));
    let parent_area = node_box.surface_area().max(1e-30);
    let leaf_cost = items.len() as f64 * params.intersect_cost;

    let mut best: Option<(f64, Axis, f64)> = None;
    for axis in Axis::ALL {
        let lo = node_box.lo.component(axis);
        let extent = node_box.extent(axis);
        if extent <= 0.0 {
            continue;
        }
        for &frac in &params.candidate_fractions {
            let cut = lo + frac * extent;
            let mut n_left = 0usize;
            let mut n_right = 0usize;
            for it in items {
                if it.bbox.center(axis) < cut {
                    n_left += 1;
                } else {
                    n_right += 1;
                }
            }
            if n_left == 0 || n_right == 0 {
                continue;
            }
            let left_refs: Vec<&Item> = items
                .iter()
                .filter(|it| it.bbox.center(axis) < cut)
                .collect();
            let right_refs: Vec<&Item> = items
                .iter()
                .filter(|it| it.bbox.center(axis) >= cut)
                .collect();
            let cost = params.traversal_cost
                + (union_area(&left_refs) / parent_area) * n_left as f64 * params.intersect_cost
                + (union_area(&right_refs) / parent_area) * n_right as f64 * params.intersect_cost;
            let better = match best {
                None => true,
                Some((c, _, _)) => cost < c,
            };
            if better {
                best = Some((cost, axis, cut));
            }
        }
    }

    if let Some((cost, axis, cut)) = best {
        if cost < leaf_cost {
            let (left, right): (Vec<Item>, Vec<Item>) = partition_items(items, axis, cut);
            return Partition::Split { axis, left, right };
        }
        return Partition::Leaf;
    }

    // Every candidate left one side empty: fall back to a median split by
    // center along the longest axis, or an index split when centers coincide.
    let axis = Axis::ALL
        .into_iter()
        .max_by(|a, b| {
            node_box
                .extent(*a)
                .partial_cmp(&node_box.extent(*b))
                .unwrap()
        })
        .unwrap();
    let mut centers: Vec<f64> = items.iter().map(|it| it.bbox.center(axis)).collect();
    centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cut = centers[centers.len() / 2];
    let (left, right) = partition_items(items, axis, cut);
    if left.is_empty() || right.is_empty() {
        let mut items: Vec<Item> = items
            .iter()
            .map(|it| Item {
                cell: it.cell,
                bbox: it.bbox,
            })
            .collect();
        let right = items.split_off(items.len() / 2);
        return Partition::Split {
            axis,
            left: items,
            right,
        };
    }
    Partition::Split { axis, left, right }
}

fn partition_items(items: &[Item], axis: Axis, cut: f64) -> (Vec<Item>, Vec<Item>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for it in items {
        let copy = Item {
            cell: it.cell,
            bbox: it.bbox,
        };
        if it.bbox.center(axis) < cut {
            left.push(copy);
        } else {
            right.push(copy);
        }
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::Vec3;

    fn boxed(id: u32, lo: [f64; 3], hi: [f64; 3]) -> (CellId, Aabb) {
        (
            CellId(id),
            Aabb::new(
                Position::new(lo[0], lo[1], lo[2]),
                Position::new(hi[0], hi[1], hi[2]),
            ),
        )
    }

    #[test]
    fn single_box_is_leaf() {
        let tree = BihTree::build(&[boxed(0, [0.0; 3], [1.0; 3])], &BihParams::default());
        assert_eq!(tree.node_count(), 1);
        assert_eq!(tree.leaf_cells(), vec![CellId(0)]);
    }

    #[test]
    fn two_disjoint_boxes_split_on_x() {
        let tree = BihTree::build(
            &[
                boxed(0, [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]),
                boxed(1, [5.0, 0.0, 0.0], [6.0, 1.0, 1.0]),
            ],
            &BihParams::default(),
        );
        match &tree.nodes[0] {
            BihNode::Inner {
                axis,
                left_max,
                right_min,
                ..
            } => {
                assert_eq!(*axis, Axis::X);
                assert!(left_max < right_min, "disjoint boxes should not overlap");
                assert_eq!(*left_max, 1.0);
                assert_eq!(*right_min, 5.0);
            }
            BihNode::Leaf { .. } => panic!("expected split"),
        }
    }

    #[test]
    fn find_respects_exclusion() {
        let tree = BihTree::build(
            &[
                boxed(0, [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]),
                boxed(1, [5.0, 0.0, 0.0], [6.0, 1.0, 1.0]),
            ],
            &BihParams::default(),
        );
        let p = Position::new(0.5, 0.5, 0.5);
        assert_eq!(tree.find(p, |_| true), Some(CellId(0)));
        assert_eq!(tree.find(p, |c| c != CellId(0)), None);
        assert_eq!(tree.find(Position::new(3.0, 0.5, 0.5), |_| true), None);
    }

    #[test]
    fn overlap_band_visits_both_children() {
        // Boxes overlap on x in [4, 6]; a query there must reach both sides.
        let tree = BihTree::build(
            &[
                boxed(0, [0.0, 0.0, 0.0], [6.0, 1.0, 1.0]),
                boxed(1, [4.0, 0.0, 0.0], [10.0, 1.0, 1.0]),
            ],
            &BihParams::default(),
        );
        let p = Position::new(5.0, 0.5, 0.5);
        assert_eq!(tree.find(p, |c| c == CellId(1)), Some(CellId(1)));
        assert_eq!(tree.find(p, |c| c == CellId(0)), Some(CellId(0)));
    }

    #[test]
    fn identical_boxes_terminate() {
        let boxes: Vec<(CellId, Aabb)> = (0..8)
            .map(|i| boxed(i, [0.0; 3], [1.0; 3]))
            .collect();
        let tree = BihTree::build(&boxes, &BihParams::default());
        let mut cells = tree.leaf_cells();
        cells.sort();
        assert_eq!(cells, (0..8).map(CellId).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_dump() {
        let boxes: Vec<(CellId, Aabb)> = (0..16)
            .map(|i| {
                let x = (i % 4) as f64;
                let y = (i / 4) as f64;
                boxed(i, [x, y, 0.0], [x + 1.0, y + 1.0, 1.0])
            })
            .collect();
        let a = BihTree::build(&boxes, &BihParams::default());
        let b = BihTree::build(&boxes, &BihParams::default());
        assert_eq!(a.dump(), b.dump());
    }

    #[test]
    fn clip_bbox_examples() {
        let start = Aabb::cube(10.0);
        // Unit cube from six planes.
        let planes = [
            Surface::PlaneX(0.0),
            Surface::PlaneX(1.0),
            Surface::PlaneY(0.0),
            Surface::PlaneY(1.0),
            Surface::PlaneZ(0.0),
            Surface::PlaneZ(1.0),
        ];
        let senses = [
            (Sense::Positive, &planes[0]),
            (Sense::Negative, &planes[1]),
            (Sense::Positive, &planes[2]),
            (Sense::Negative, &planes[3]),
            (Sense::Positive, &planes[4]),
            (Sense::Negative, &planes[5]),
        ];
        let b = clip_bbox(&start, &senses).unwrap();
        assert_eq!(b.lo, Position::new(0.0, 0.0, 0.0));
        assert_eq!(b.hi, Position::new(1.0, 1.0, 1.0));

        // Pin: cylinder interior between z planes.
        let cyl = Surface::CylinderZ { x0: 0.0, y0: 0.0, r: 0.5 };
        let z0 = Surface::PlaneZ(0.0);
        let z1 = Surface::PlaneZ(1.0);
        let b = clip_bbox(
            &start,
            &[
                (Sense::Negative, &cyl),
                (Sense::Positive, &z0),
                (Sense::Negative, &z1),
            ],
        )
        .unwrap();
        assert_eq!(b.lo, Position::new(-0.5, -0.5, 0.0));
        assert_eq!(b.hi, Position::new(0.5, 0.5, 1.0));

        // Outside-cylinder sense gives no tightening.
        let senses_mod = [
            (Sense::Positive, &cyl),
            (Sense::Positive, &planes[0]),
            (Sense::Negative, &planes[1]),
            (Sense::Positive, &planes[2]),
            (Sense::Negative, &planes[3]),
            (Sense::Positive, &planes[4]),
            (Sense::Negative, &planes[5]),
        ];
        let b = clip_bbox(&start, &senses_mod).unwrap();
        assert_eq!(b.lo, Position::new(0.0, 0.0, 0.0));
        assert_eq!(b.hi, Position::new(1.0, 1.0, 1.0));

        // Contradictory senses produce an empty box.
        assert!(clip_bbox(
            &start,
            &[
                (Sense::Positive, &planes[1]),
                (Sense::Negative, &planes[0]),
            ],
        )
        .is_none());
    }

    #[test]
    fn clip_bbox_axis_aligned_general_plane() {
        let g = Surface::general_plane(Vec3::new(0.0, -1.0, 0.0), -2.0);
        // f = -y + 2; Negative sense means y > 2.
        let b = clip_bbox(&Aabb::cube(10.0), &[(Sense::Negative, &g)]).unwrap();
        assert_eq!(b.lo.y, 2.0);
        let b = clip_bbox(&Aabb::cube(10.0), &[(Sense::Positive, &g)]).unwrap();
        assert_eq!(b.hi.y, 2.0);
    }

    #[test]
    fn exactly_once_membership_random() {
        let mut state = 0x12345u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let boxes: Vec<(CellId, Aabb)> = (0..1000)
            .map(|i| {
                let cx = next() * 100.0;
                let cy = next() * 100.0;
                let cz = next() * 100.0;
                let hx = next() * 3.0;
                let hy = next() * 3.0;
                let hz = next() * 3.0;
                (
                    CellId(i),
                    Aabb::new(
                        Position::new(cx - hx, cy - hy, cz - hz),
                        Position::new(cx + hx, cy + hy, cz + hz),
                    ),
                )
            })
            .collect();
        let tree = BihTree::build(&boxes, &BihParams::default());
        let mut cells = tree.leaf_cells();
        assert_eq!(cells.len(), 1000, "each cell appears exactly once");
        cells.sort();
        cells.dedup();
        assert_eq!(cells.len(), 1000);

        // Enclosure: each cell box fits the clip intervals on its path.
        let by_id: Vec<Aabb> = boxes.iter().map(|(_, b)| *b).collect();
        tree.walk_leaves(|cells, intervals| {
            for c in cells {
                let b = by_id[c.idx()];
                for axis in Axis::ALL {
                    let (lo, hi) = intervals[axis.index()];
                    assert!(b.lo.component(axis) >= lo - 1e-12);
                    assert!(b.hi.component(axis) <= hi + 1e-12);
                }
            }
        });
    }
}
