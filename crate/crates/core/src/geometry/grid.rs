//! Lattice scans of regions: membership bitmask plus connected components through
//! axis-adjacent in-region nodes.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::Region;
use crate::error::{Error, Result};
use crate::point::CPoint;

/// Default cap on the number of lattice nodes in one scan.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

struct DisjointSet {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (ka, kb) = (self.rank[ra as usize], self.rank[rb as usize]);
        if ka < kb {
            self.parent[ra as usize] = rb;
        } else if ka > kb {
            self.parent[rb as usize] = ra;
        } else {
            self.parent[rb as usize] = ra;
            self.rank[ra as usize] += 1;
        }
    }
}

/// Geometry of a centered lattice inside a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub step: f64,
    /// Coordinates of node 0.
    pub origin: Vec<f64>,
    /// Node count per real axis.
    pub shape: Vec<usize>,
}

impl Lattice {
    /// `floor(extent / step)` nodes per axis (at least one), centered in the box so a
    /// symmetric box with an even count never puts a node on the mid-plane.
    pub fn for_region(region: &Region, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Invalid(format!("lattice step must be positive, got {step}")));
        }
        let bbox = &region.bbox;
        let mut origin = Vec::with_capacity(bbox.real_dim());
        let mut shape = Vec::with_capacity(bbox.real_dim());
        for (lo, hi) in bbox.lo.iter().zip(&bbox.hi) {
            let count = (((hi - lo) / step) + 1e-9).floor().max(1.0) as usize;
            let mid = 0.5 * (lo + hi);
            origin.push(mid - 0.5 * (count as f64 - 1.0) * step);
            shape.push(count);
        }
        Ok(Lattice {
            step,
            origin,
            shape,
        })
    }

    /// Total node count, saturating on overflow.
    pub fn node_count(&self) -> usize {
        self.shape
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .unwrap_or(usize::MAX)
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.shape.len()];
        for d in (0..self.shape.len().saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * self.shape[d + 1];
        }
        strides
    }

    pub fn node_real(&self, mut index: usize) -> Vec<f64> {
        let mut xy = vec![0.0; self.shape.len()];
        for d in (0..self.shape.len()).rev() {
            let i = index % self.shape[d];
            index /= self.shape[d];
            xy[d] = self.origin[d] + i as f64 * self.step;
        }
        xy
    }

    pub fn node_point(&self, index: usize) -> CPoint {
        CPoint::from_real(&self.node_real(index)).expect("finite lattice node")
    }

    /// Index of the node nearest to `z`, if `z` lies within half a step of the lattice.
    pub fn nearest_node(&self, z: &CPoint) -> Option<usize> {
        let xy = z.to_real();
        if xy.len() != self.shape.len() {
            return None;
        }
        let mut index = 0;
        for d in 0..self.shape.len() {
            let f = ((xy[d] - self.origin[d]) / self.step).round();
            if f < 0.0 || f >= self.shape[d] as f64 {
                return None;
            }
            index = index * self.shape[d] + f as usize;
        }
        Some(index)
    }
}

/// Result of [`grid_components`].
#[derive(Clone, Debug)]
pub struct GridLabeling {
    pub lattice: Lattice,
    inside: Vec<bool>,
    /// Component id per node, `u32::MAX` outside the region.
    component: Vec<u32>,
    /// Smallest node index of each component; components are numbered in this order.
    rep_nodes: Vec<usize>,
    sizes: Vec<usize>,
}

/// Serializable digest of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub step: f64,
    pub shape: Vec<usize>,
    pub node_count: usize,
    pub in_region_count: usize,
    pub component_count: usize,
    pub component_sizes: Vec<usize>,
    pub representatives: Vec<CPoint>,
}

impl GridLabeling {
    pub fn component_count(&self) -> usize {
        self.rep_nodes.len()
    }

    pub fn node_count(&self) -> usize {
        self.inside.len()
    }

    pub fn in_region_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn is_inside(&self, node: usize) -> bool {
        self.inside[node]
    }

    pub fn component_of_node(&self, node: usize) -> Option<usize> {
        match self.component.get(node) {
            Some(&c) if c != u32::MAX => Some(c as usize),
            _ => None,
        }
    }

    /// Component of the lattice node nearest to `z`.
    pub fn component_of_point(&self, z: &CPoint) -> Option<usize> {
        self.lattice
            .nearest_node(z)
            .and_then(|n| self.component_of_node(n))
    }

    pub fn representative_node(&self, id: usize) -> usize {
        self.rep_nodes[id]
    }

    pub fn representative(&self, id: usize) -> CPoint {
        self.lattice.node_point(self.rep_nodes[id])
    }

    pub fn representatives(&self) -> Vec<CPoint> {
        (0..self.component_count()).map(|c| self.representative(c)).collect()
    }

    pub fn component_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            step: self.lattice.step,
            shape: self.lattice.shape.clone(),
            node_count: self.node_count(),
            in_region_count: self.in_region_count(),
            component_count: self.component_count(),
            component_sizes: self.sizes.clone(),
            representatives: self.representatives(),
        }
    }

    /// Calls `f(a, b)` for every axis-adjacent pair of in-region nodes with `a < b`.
    pub fn for_each_edge<F: FnMut(usize, usize)>(&self, mut f: F) {
        let strides = self.lattice.strides();
        let shape = &self.lattice.shape;
        for node in 0..self.inside.len() {
            if !self.inside[node] {
                continue;
            }
            for d in 0..shape.len() {
                let coord = (node / strides[d]) % shape[d];
                if coord + 1 < shape[d] {
                    let next = node + strides[d];
                    if self.inside[next] {
                        f(node, next);
                    }
                }
            }
        }
    }

    /// CSV of in-region nodes: real coordinates followed by the component id.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let d = self.lattice.shape.len();
        let header: Vec<String> = (0..d / 2)
            .flat_map(|j| [format!("x{}", j + 1), format!("y{}", j + 1)])
            .chain(std::iter::once("component".to_string()))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for node in 0..self.inside.len() {
            if let Some(c) = self.component_of_node(node) {
                let xy = self.lattice.node_real(node);
                let cols: Vec<String> = xy.iter().map(|v| format!("{v}")).collect();
                writeln!(out, "{},{}", cols.join(","), c)?;
            }
        }
        Ok(())
    }
}

/// Scans the region's box on a lattice with the given step and labels connected components
/// of the in-region nodes under axis adjacency.
///
/// Deterministic: components are numbered by their smallest node index and represented by
/// that node.
pub fn grid_components(region: &Region, step: f64, node_budget: usize) -> Result<GridLabeling> {
    let lattice = Lattice::for_region(region, step)?;
    let total = lattice.node_count();
    if total > node_budget {
        return Err(Error::Resource(format!(
            "lattice of shape {:?} has {} nodes, budget is {}",
            lattice.shape, total, node_budget
        )));
    }
    if total > u32::MAX as usize - 1 {
        return Err(Error::Resource("lattice too large for 32-bit node ids".into()));
    }

    let inside = lattice_membership(&lattice, region)?;
    Ok(label_components(lattice, inside))
}

/// Membership of every lattice node in a region, evaluated in parallel row by row.
pub fn lattice_membership(lattice: &Lattice, region: &Region) -> Result<Vec<bool>> {
    let total = lattice.node_count();
    let chunk = lattice.shape.last().copied().unwrap_or(1).max(1);
    let mut inside = vec![false; total];
    inside
        .par_chunks_mut(chunk)
        .enumerate()
        .try_for_each(|(row, slot)| -> Result<()> {
            let base = row * chunk;
            for (k, s) in slot.iter_mut().enumerate() {
                *s = region.contains(&lattice.node_point(base + k))?;
            }
            Ok(())
        })?;
    Ok(inside)
}

/// Connected components of the marked nodes under axis adjacency.
pub fn label_components(lattice: Lattice, inside: Vec<bool>) -> GridLabeling {
    let total = inside.len();
    let mut dsu = DisjointSet::new(total);
    let strides = lattice.strides();
    for node in 0..total {
        if !inside[node] {
            continue;
        }
        for d in 0..lattice.shape.len() {
            let coord = (node / strides[d]) % lattice.shape[d];
            if coord + 1 < lattice.shape[d] {
                let next = node + strides[d];
                if inside[next] {
                    dsu.union(node as u32, next as u32);
                }
            }
        }
    }

    let mut component = vec![u32::MAX; total];
    let mut root_to_id = std::collections::HashMap::new();
    let mut rep_nodes = Vec::new();
    let mut sizes = Vec::new();
    for node in 0..total {
        if !inside[node] {
            continue;
        }
        let root = dsu.find(node as u32);
        let id = *root_to_id.entry(root).or_insert_with(|| {
            rep_nodes.push(node);
            sizes.push(0);
            (rep_nodes.len() - 1) as u32
        });
        component[node] = id;
        sizes[id as usize] += 1;
    }

    GridLabeling {
        lattice,
        inside,
        component,
        rep_nodes,
        sizes,
    }
}
