//! Component-resolved nerves: every nonempty intersection of cover sets is split into its
//! connected components, each carrying a representative point.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cover::Cover;
use crate::error::{Error, Result};
use crate::geometry::grid::{label_components, lattice_membership, GridLabeling, Lattice};
use crate::point::CPoint;

/// A cell of the Čech complex: one connected component of one simplex's intersection.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub simplex: Vec<usize>,
    pub label: u32,
}

impl CellKey {
    pub fn new(simplex: Vec<usize>, label: u32) -> Self {
        CellKey { simplex, label }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NerveComponent {
    pub label: u32,
    pub representative: CPoint,
    /// `faces[m]` is the label of the component of the facet obtained by dropping the
    /// `m`-th vertex that contains this component.
    pub faces: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NerveSimplex {
    pub vertices: Vec<usize>,
    /// Sorted by label.
    pub components: Vec<NerveComponent>,
}

impl NerveSimplex {
    pub fn component(&self, label: u32) -> Option<&NerveComponent> {
        self.components
            .binary_search_by_key(&label, |c| c.label)
            .ok()
            .map(|i| &self.components[i])
    }

    pub fn labels(&self) -> Vec<u32> {
        self.components.iter().map(|c| c.label).collect()
    }
}

/// How intersections are split into components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Resolution {
    /// Labels from the cover's splits. Representatives come from set seeds, then from
    /// `search` rejection samples; `verify` further samples must not reveal a new label.
    Analytic { search: usize, verify: usize, seed: u64 },
    /// Lattice scan of the ambient box; split labels, where present, are cross-checked.
    Grid { step: f64, budget: usize },
}

impl Resolution {
    pub fn analytic(seed: u64) -> Self {
        Resolution::Analytic {
            search: 2000,
            verify: 0,
            seed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct NerveRepr {
    set_names: Vec<String>,
    k_max: usize,
    levels: Vec<Vec<NerveSimplex>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(from = "NerveRepr", into = "NerveRepr")]
pub struct ResolvedNerve {
    pub set_names: Vec<String>,
    pub k_max: usize,
    /// `levels[k]` holds the k-simplices in lexicographic order.
    pub levels: Vec<Vec<NerveSimplex>>,
    index: HashMap<Vec<usize>, (usize, usize)>,
}

impl PartialEq for ResolvedNerve {
    fn eq(&self, other: &Self) -> bool {
        self.set_names == other.set_names && self.k_max == other.k_max && self.levels == other.levels
    }
}

impl From<NerveRepr> for ResolvedNerve {
    fn from(r: NerveRepr) -> Self {
        ResolvedNerve::from_levels(r.set_names, r.k_max, r.levels)
    }
}

impl From<ResolvedNerve> for NerveRepr {
    fn from(n: ResolvedNerve) -> Self {
        NerveRepr {
            set_names: n.set_names,
            k_max: n.k_max,
            levels: n.levels,
        }
    }
}

/// Per-level simplex and component counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NerveSummary {
    pub set_names: Vec<String>,
    pub simplices_per_level: Vec<usize>,
    pub cells_per_level: Vec<usize>,
    /// Intersections with more than one component, as (set names, component count).
    pub split_overlaps: Vec<(Vec<String>, usize)>,
}

impl ResolvedNerve {
    pub fn from_levels(set_names: Vec<String>, k_max: usize, mut levels: Vec<Vec<NerveSimplex>>) -> Self {
        while levels.last().is_some_and(|l| l.is_empty()) {
            levels.pop();
        }
        let mut index = HashMap::new();
        for (k, level) in levels.iter().enumerate() {
            for (i, s) in level.iter().enumerate() {
                index.insert(s.vertices.clone(), (k, i));
            }
        }
        ResolvedNerve {
            set_names,
            k_max,
            levels,
            index,
        }
    }

    pub fn num_sets(&self) -> usize {
        self.set_names.len()
    }

    /// Highest degree with at least one simplex.
    pub fn dim(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn level(&self, k: usize) -> &[NerveSimplex] {
        self.levels.get(k).map(|l| l.as_slice()).unwrap_or(&[])
    }

    pub fn simplex(&self, vertices: &[usize]) -> Option<&NerveSimplex> {
        self.index.get(vertices).map(|&(k, i)| &self.levels[k][i])
    }

    pub fn contains(&self, vertices: &[usize]) -> bool {
        self.index.contains_key(vertices)
    }

    pub fn component(&self, vertices: &[usize], label: u32) -> Option<&NerveComponent> {
        self.simplex(vertices).and_then(|s| s.component(label))
    }

    /// The k-cells in canonical order (simplices lexicographic, then labels ascending).
    pub fn cells(&self, k: usize) -> Vec<CellKey> {
        self.level(k)
            .iter()
            .flat_map(|s| {
                s.components
                    .iter()
                    .map(move |c| CellKey::new(s.vertices.clone(), c.label))
            })
            .collect()
    }

    pub fn cell_count(&self, k: usize) -> usize {
        self.level(k).iter().map(|s| s.components.len()).sum()
    }

    pub fn cell_index(&self, k: usize) -> HashMap<CellKey, usize> {
        self.cells(k).into_iter().enumerate().map(|(i, c)| (c, i)).collect()
    }

    pub fn has_cell(&self, key: &CellKey) -> bool {
        self.component(&key.simplex, key.label).is_some()
    }

    /// Label of the face component reached by dropping vertex position `m`.
    pub fn face_label(&self, vertices: &[usize], label: u32, m: usize) -> Result<u32> {
        let c = self.component(vertices, label).ok_or_else(|| {
            Error::Resolution(format!("no component {label} on simplex {vertices:?}"))
        })?;
        c.faces.get(m).copied().ok_or_else(|| {
            Error::Resolution(format!("face {m} out of range for simplex {vertices:?}"))
        })
    }

    /// Checks that dropping two vertices in either order reaches the same component.
    pub fn check_faces_commute(&self) -> Result<()> {
        for level in self.levels.iter().skip(2) {
            for s in level {
                for c in &s.components {
                    for a in 0..s.vertices.len() {
                        for b in (a + 1)..s.vertices.len() {
                            // drop b then a, versus drop a then (b - 1)
                            let mut fb = s.vertices.clone();
                            fb.remove(b);
                            let mut fa = s.vertices.clone();
                            fa.remove(a);
                            let l1 = self.face_label(&fb, c.faces[b], a)?;
                            let l2 = self.face_label(&fa, c.faces[a], b - 1)?;
                            if l1 != l2 {
                                return Err(Error::Resolution(format!(
                                    "face maps do not commute on {:?} component {}",
                                    s.vertices, c.label
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks every representative lies in its intersection and carries its own label.
    pub fn check_representatives(&self, cover: &Cover) -> Result<()> {
        for level in &self.levels {
            for s in level {
                let region = cover.intersection(&s.vertices)?;
                for c in &s.components {
                    if !region.contains(&c.representative)? {
                        return Err(Error::Resolution(format!(
                            "representative of {:?} component {} lies outside the intersection",
                            s.vertices, c.label
                        )));
                    }
                    if cover.has_labeler(&s.vertices)
                        && cover.label(&s.vertices, &c.representative)? != c.label
                    {
                        return Err(Error::Resolution(format!(
                            "representative of {:?} component {} carries another label",
                            s.vertices, c.label
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The subnerve spanned by the listed sets, renumbered in the given order.
    /// `keep` must be strictly increasing so that simplices stay sorted.
    pub fn induced(&self, keep: &[usize]) -> Result<ResolvedNerve> {
        if keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("induced subnerve needs increasing set indices".into()));
        }
        let renumber: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let levels = self
            .levels
            .iter()
            .map(|level| {
                level
                    .iter()
                    .filter(|s| s.vertices.iter().all(|v| renumber.contains_key(v)))
                    .map(|s| NerveSimplex {
                        vertices: s.vertices.iter().map(|v| renumber[v]).collect(),
                        components: s.components.clone(),
                    })
                    .collect()
            })
            .collect();
        Ok(ResolvedNerve::from_levels(
            keep.iter().map(|&i| self.set_names[i].clone()).collect(),
            self.k_max,
            levels,
        ))
    }

    pub fn summary(&self) -> NerveSummary {
        let mut split_overlaps = Vec::new();
        for level in &self.levels {
            for s in level {
                if s.components.len() > 1 {
                    split_overlaps.push((
                        s.vertices.iter().map(|&v| self.set_names[v].clone()).collect(),
                        s.components.len(),
                    ));
                }
            }
        }
        NerveSummary {
            set_names: self.set_names.clone(),
            simplices_per_level: self.levels.iter().map(|l| l.len()).collect(),
            cells_per_level: (0..self.levels.len()).map(|k| self.cell_count(k)).collect(),
            split_overlaps,
        }
    }
}

fn simplex_stream(vertices: &[usize]) -> u64 {
    // FNV-1a over the vertex list: a fixed, platform-independent stream id.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &v in vertices {
        for b in (v as u64).to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Candidate k-simplices: extensions of (k-1)-simplices all of whose facets are present.
fn candidates(prev: &[Vec<usize>], n_sets: usize) -> Vec<Vec<usize>> {
    let present: HashSet<&Vec<usize>> = prev.iter().collect();
    let mut out = Vec::new();
    for s in prev {
        let last = *s.last().expect("nonempty simplex");
        for j in (last + 1)..n_sets {
            let mut cand = s.clone();
            cand.push(j);
            let all_faces = (0..cand.len() - 1).all(|m| {
                let mut f = cand.clone();
                f.remove(m);
                present.contains(&f)
            });
            if all_faces {
                out.push(cand);
            }
        }
    }
    out
}

fn discover_analytic(
    cover: &Cover,
    simplex: &[usize],
    search: usize,
    verify: usize,
    seed: u64,
) -> Result<Vec<(u32, CPoint)>> {
    let region = cover.intersection(simplex)?;
    let mut found: BTreeMap<u32, CPoint> = BTreeMap::new();
    for &i in simplex {
        for z in &cover.sets[i].tag.seeds {
            if z.dim() == region.complex_dim() && region.contains(z)? {
                found.entry(cover.label(simplex, z)?).or_insert_with(|| z.clone());
            }
        }
    }
    if region.bbox.is_empty() {
        return Ok(found.into_iter().collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(simplex_stream(simplex));
    for _ in 0..search {
        let z = region.bbox.sample(&mut rng);
        if region.contains(&z)? {
            found.entry(cover.label(simplex, &z)?).or_insert(z);
        }
    }
    for _ in 0..verify {
        let z = region.bbox.sample(&mut rng);
        if region.contains(&z)? {
            let l = cover.label(simplex, &z)?;
            if !found.contains_key(&l) {
                return Err(Error::Resolution(format!(
                    "verification sample revealed unseen component {l} on simplex {simplex:?}"
                )));
            }
        }
    }
    Ok(found.into_iter().collect())
}

struct GridContext {
    lattice: Lattice,
    masks: Vec<u64>,
}

impl GridContext {
    fn new(cover: &Cover, step: f64, budget: usize) -> Result<Self> {
        let lattice = Lattice::for_region(&cover.ambient, step)?;
        let total = lattice.node_count();
        if total > budget {
            return Err(Error::Resource(format!(
                "nerve lattice of shape {:?} has {} nodes, budget is {}",
                lattice.shape, total, budget
            )));
        }
        let ambient = lattice_membership(&lattice, &cover.ambient)?;
        let mut masks = vec![0u64; total];
        for (i, s) in cover.sets.iter().enumerate() {
            let inside = lattice_membership(&lattice, &s.region)?;
            for (node, (&a, &b)) in ambient.iter().zip(&inside).enumerate() {
                if a && b {
                    masks[node] |= 1 << i;
                }
            }
        }
        Ok(GridContext { lattice, masks })
    }

    fn labeling(&self, simplex: &[usize]) -> GridLabeling {
        let want: u64 = simplex.iter().map(|&i| 1u64 << i).sum();
        let inside = self.masks.iter().map(|&m| m & want == want).collect();
        label_components(self.lattice.clone(), inside)
    }
}

/// Grid components of one simplex, mapped to labels. Returns (label per grid component,
/// sorted (label, representative) list).
fn discover_grid(
    cover: &Cover,
    simplex: &[usize],
    g: &GridLabeling,
) -> Result<(Vec<u32>, Vec<(u32, CPoint)>)> {
    let count = g.component_count();
    if !cover.has_labeler(simplex) {
        let labels: Vec<u32> = (0..count as u32).collect();
        let reps = labels.iter().map(|&l| (l, g.representative(l as usize))).collect();
        return Ok((labels, reps));
    }
    let mut labels = vec![None; count];
    let mut err = None;
    for node in 0..g.node_count() {
        if let Some(c) = g.component_of_node(node) {
            let l = cover.label(simplex, &g.lattice.node_point(node))?;
            match labels[c] {
                None => labels[c] = Some(l),
                Some(prev) if prev != l => {
                    err = Some(format!(
                        "grid component {c} of {simplex:?} straddles labels {prev} and {l}"
                    ));
                    break;
                }
                _ => {}
            }
        }
    }
    if let Some(e) = err {
        return Err(Error::Resolution(e));
    }
    let labels: Vec<u32> = labels.into_iter().map(|l| l.expect("nonempty component")).collect();
    let mut reps = BTreeMap::new();
    for (c, &l) in labels.iter().enumerate() {
        if reps.insert(l, g.representative(c)).is_some() {
            return Err(Error::Resolution(format!(
                "label {l} of {simplex:?} splits into several grid components; refine the step"
            )));
        }
    }
    Ok((labels, reps.into_iter().collect()))
}

/// Builds the nerve up to degree `k_max`, resolving each intersection into components.
pub fn build_nerve(cover: &Cover, k_max: usize, resolution: &Resolution) -> Result<ResolvedNerve> {
    if k_max < 1 {
        return Err(Error::Invalid("k_max must be at least 1".into()));
    }
    let n_sets = cover.len();
    let grid = match resolution {
        Resolution::Grid { step, budget } => Some(GridContext::new(cover, *step, *budget)?),
        Resolution::Analytic { .. } => None,
    };

    let mut levels: Vec<Vec<NerveSimplex>> = Vec::new();
    // Grid label per node for the previous level, keyed by simplex.
    let mut prev_grid: HashMap<Vec<usize>, (GridLabeling, Vec<u32>)> = HashMap::new();

    for k in 0..=k_max {
        let cands: Vec<Vec<usize>> = if k == 0 {
            (0..n_sets).map(|i| vec![i]).collect()
        } else {
            let prev: Vec<Vec<usize>> = levels[k - 1].iter().map(|s| s.vertices.clone()).collect();
            candidates(&prev, n_sets)
        };
        if cands.is_empty() {
            break;
        }

        let mut level = Vec::new();
        let mut this_grid = HashMap::new();
        match (&grid, resolution) {
            (None, Resolution::Analytic { search, verify, seed }) => {
                let found: Vec<Vec<(u32, CPoint)>> = cands
                    .par_iter()
                    .map(|s| discover_analytic(cover, s, *search, *verify, *seed))
                    .collect::<Result<_>>()?;
                for (vertices, comps) in cands.into_iter().zip(found) {
                    if comps.is_empty() {
                        continue;
                    }
                    let mut components = Vec::with_capacity(comps.len());
                    for (label, rep) in comps {
                        let mut faces = Vec::new();
                        if k > 0 {
                            for m in 0..vertices.len() {
                                let mut f = vertices.clone();
                                f.remove(m);
                                let fl = cover.label(&f, &rep)?;
                                let facet = levels[k - 1]
                                    .binary_search_by(|s| s.vertices.cmp(&f))
                                    .map_err(|_| Error::Resolution(format!("missing facet {f:?}")))?;
                                if levels[k - 1][facet].component(fl).is_none() {
                                    return Err(Error::Resolution(format!(
                                        "facet {f:?} of {vertices:?} has no component {fl}"
                                    )));
                                }
                                faces.push(fl);
                            }
                        }
                        components.push(NerveComponent {
                            label,
                            representative: rep,
                            faces,
                        });
                    }
                    level.push(NerveSimplex { vertices, components });
                }
            }
            (Some(ctx), _) => {
                let scans: Vec<GridLabeling> = cands.par_iter().map(|s| ctx.labeling(s)).collect();
                for (vertices, g) in cands.into_iter().zip(scans) {
                    if g.component_count() == 0 {
                        continue;
                    }
                    let (comp_labels, reps) = discover_grid(cover, &vertices, &g)?;
                    let mut components = Vec::with_capacity(reps.len());
                    for (label, rep) in reps {
                        let node = ctx.lattice.nearest_node(&rep).expect("representative is a node");
                        let mut faces = Vec::new();
                        if k > 0 {
                            for m in 0..vertices.len() {
                                let mut f = vertices.clone();
                                f.remove(m);
                                let (fg, fl) = prev_grid.get(&f).ok_or_else(|| {
                                    Error::Resolution(format!("missing facet {f:?}"))
                                })?;
                                let c = fg.component_of_node(node).ok_or_else(|| {
                                    Error::Resolution(format!("representative escapes facet {f:?}"))
                                })?;
                                faces.push(fl[c]);
                            }
                        }
                        components.push(NerveComponent {
                            label,
                            representative: rep,
                            faces,
                        });
                    }
                    this_grid.insert(vertices.clone(), (g, comp_labels));
                    level.push(NerveSimplex { vertices, components });
                }
            }
            _ => unreachable!("grid context exists iff resolution is grid"),
        }
        prev_grid = this_grid;
        if level.is_empty() {
            break;
        }
        levels.push(level);
    }

    let nerve = ResolvedNerve::from_levels(cover.names(), k_max, levels);
    nerve.check_faces_commute()?;
    Ok(nerve)
}
