//! Bounding volume hierarchy over occupied-cell AABBs: linear Morton-order
//! builder with median splits, sequential pruned traversal.

use super::primitives::{Aabb, Primitive};
use crate::error::{Error, Result};
use crate::indicator::GridIndicator;
use crate::query::Region;
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct Bvh<R: Real> {
    dim: u8,
    leaf_size: u32,
    nodes: Vec<Node<R>>,
    leaves: Vec<Aabb<R>>,
}

#[derive(Clone, Debug)]
struct Node<R: Real> {
    aabb: Aabb<R>,
    content: Content,
}

#[derive(Clone, Copy, Debug)]
enum Content {
    Internal { left: u32, right: u32 },
    Leaf { start: u32, end: u32 },
}

/// Builds the tree: leaves are occupied-cell AABBs sorted by the Morton code
/// of their cell indices; the sorted range is split at its median
/// recursively until ranges have at most `leaf_size` cells.
pub fn build_bvh<R: Real>(ind: &GridIndicator, leaf_size: usize) -> Result<Bvh<R>> {
    if ind.occupied_count() == 0 {
        return Err(Error::EmptyIndicator);
    }
    if leaf_size == 0 {
        return Err(Error::Invalid("leaf_size must be >= 1".into()));
    }
    let dim = ind.dim();
    let bits = ind
        .shape()
        .iter()
        .map(|&s| usize::BITS - (s - 1).leading_zeros().min(usize::BITS - 1))
        .max()
        .unwrap()
        .max(1);
    if bits as usize * dim > 63 {
        return Err(Error::Invalid("grid too fine for Morton codes".into()));
    }

    let mut order: Vec<(u64, Aabb<R>)> = ind
        .occupied_cells()
        .map(|cell| {
            let code = morton(&cell[..dim], bits);
            let (lo, hi) = ind.cell_bounds::<R>(&cell);
            (code, Aabb::new(&lo[..dim], &hi[..dim]).expect("cell bounds ordered"))
        })
        .collect();
    order.sort_by_key(|(code, _)| *code);
    let leaves: Vec<Aabb<R>> = order.into_iter().map(|(_, b)| b).collect();

    let mut nodes = Vec::with_capacity(2 * leaves.len());
    build_range(&leaves, 0, leaves.len(), leaf_size, &mut nodes);
    Ok(Bvh {
        dim: dim as u8,
        leaf_size: leaf_size as u32,
        nodes,
        leaves,
    })
}

/// Bit-interleaved Morton code, axis 0 in the lowest interleave slot.
fn morton(cell: &[usize], bits: u32) -> u64 {
    let mut code = 0u64;
    for b in 0..bits {
        for (a, &c) in cell.iter().enumerate() {
            let bit = (c as u64 >> b) & 1;
            code |= bit << (b as usize * cell.len() + a);
        }
    }
    code
}

/// Returns the node index of the subtree over `leaves[start..end]`.
fn build_range<R: Real>(
    leaves: &[Aabb<R>],
    start: usize,
    end: usize,
    leaf_size: usize,
    nodes: &mut Vec<Node<R>>,
) -> u32 {
    let aabb = leaves[start + 1..end]
        .iter()
        .fold(leaves[start], |acc, b| acc.union(b));
    let idx = nodes.len() as u32;
    if end - start <= leaf_size {
        nodes.push(Node {
            aabb,
            content: Content::Leaf {
                start: start as u32,
                end: end as u32,
            },
        });
        return idx;
    }
    nodes.push(Node {
        aabb,
        content: Content::Leaf { start: 0, end: 0 }, // patched below
    });
    let mid = start + (end - start) / 2;
    let left = build_range(leaves, start, mid, leaf_size, nodes);
    let right = build_range(leaves, mid, end, leaf_size, nodes);
    nodes[idx as usize].content = Content::Internal { left, right };
    idx
}

impl<R: Real> Bvh<R> {
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size as usize
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaves(&self) -> &[Aabb<R>] {
        &self.leaves
    }

    pub fn root_aabb(&self) -> &Aabb<R> {
        &self.nodes[0].aabb
    }

    /// Pruned traversal; equals the OR over all leaf tests.
    pub fn test(&self, region: &Region<R>) -> bool {
        self.test_counted(region).0
    }

    /// Traversal that also reports how many nodes were visited.
    pub fn test_counted(&self, region: &Region<R>) -> (bool, u64) {
        assert_eq!(region.dim(), self.dim(), "region dimension mismatch");
        let mut stack: Vec<u32> = vec![0];
        let mut visited = 0u64;
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx as usize];
            visited += 1;
            if !node.aabb.test(region) {
                continue;
            }
            match node.content {
                Content::Leaf { start, end } => {
                    for leaf in &self.leaves[start as usize..end as usize] {
                        if leaf.test(region) {
                            return (true, visited);
                        }
                    }
                }
                Content::Internal { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        (false, visited)
    }

    /// Unpruned reference: OR over every leaf AABB test.
    pub fn brute_force_test(&self, region: &Region<R>) -> bool {
        self.leaves.iter().any(|leaf| leaf.test(region))
    }

    /// Rebuilds a tree from leaf boxes stored in Morton order (for loading).
    pub(crate) fn from_sorted_leaves(dim: usize, leaves: Vec<Aabb<R>>, leaf_size: usize) -> Result<Self> {
        if leaves.is_empty() {
            return Err(Error::EmptyIndicator);
        }
        let mut nodes = Vec::with_capacity(2 * leaves.len());
        build_range(&leaves, 0, leaves.len(), leaf_size.max(1), &mut nodes);
        Ok(Self {
            dim: dim as u8,
            leaf_size: leaf_size.max(1) as u32,
            nodes,
            leaves,
        })
    }
}

impl<R: Real> Primitive<R> for Bvh<R> {
    fn dim(&self) -> usize {
        self.dim as usize
    }

    fn test_point(&self, p: &[R]) -> bool {
        self.test(&Region::point(p))
    }

    fn test_ray(&self, origin: &[R], dir: &[R]) -> bool {
        self.test(&Region::ray(origin, dir).expect("nonzero direction"))
    }

    fn test_plane(&self, p0: &[R], normal: &[R]) -> bool {
        self.test(&Region::plane(p0, normal).expect("nonzero normal"))
    }

    fn test_aabox(&self, lo: &[R], hi: &[R]) -> bool {
        self.test(&Region::aabox(lo, hi))
    }
}
