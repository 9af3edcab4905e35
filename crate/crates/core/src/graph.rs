//! Interaction graphs: Erdős–Rényi and bond-percolated lattice samplers,
//! component classification, and enumeration of the small bicyclic
//! patterns (figure eights, lattice dominoes) that drive frustration.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;

/// Default cap on the cycle length accepted by [`enumerate_figure_eights`].
pub const DEFAULT_MAX_FIGURE_EIGHT_LEN: usize = 4;

/// Square (d = 2) or cubic (d = 3) lattice geometry with side `side`.
/// Vertex ids are row-major: `id = ((x₀·L) + x₁)·L + x₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub dim: u8,
    pub side: u32,
}

impl Lattice {
    pub fn new(dim: u8, side: u32) -> Result<Self, GraphError> {
        if dim != 2 && dim != 3 {
            return Err(GraphError::UnsupportedDimension(dim));
        }
        if side < 2 {
            return Err(GraphError::LatticeTooSmall(side));
        }
        Ok(Self { dim, side })
    }

    pub fn vertex_count(&self) -> u32 {
        self.side.pow(self.dim as u32)
    }

    /// Id offset of a unit step along `axis`.
    pub fn stride(&self, axis: usize) -> u32 {
        self.side.pow(self.dim as u32 - 1 - axis as u32)
    }

    pub fn coords(&self, v: u32) -> Vec<u32> {
        (0..self.dim as usize)
            .map(|a| (v / self.stride(a)) % self.side)
            .collect()
    }

    pub fn id(&self, coords: &[u32]) -> u32 {
        coords.iter().fold(0, |acc, &c| acc * self.side + c)
    }

    /// The neighbour one step along `axis` in direction `dir` (±1), if inside.
    fn step(&self, v: u32, axis: usize, dir: i8) -> Option<u32> {
        let c = (v / self.stride(axis)) % self.side;
        match dir {
            1 if c + 1 < self.side => Some(v + self.stride(axis)),
            -1 if c > 0 => Some(v - self.stride(axis)),
            _ => None,
        }
    }

    /// Every nearest-neighbour pair `(v, v + stride)` in a fixed order.
    pub fn all_edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.dim as usize * self.vertex_count() as usize);
        for v in 0..self.vertex_count() {
            for axis in 0..self.dim as usize {
                if let Some(w) = self.step(v, axis, 1) {
                    out.push((v, w));
                }
            }
        }
        out
    }
}

/// A simple undirected graph. Edges are stored as `(u, v)` with `u < v`,
/// sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    edges: Vec<(u32, u32)>,
    lattice: Option<Lattice>,
}

impl Graph {
    /// Builds a simple graph; edge orientation is normalised and the list
    /// sorted. Loops, out-of-range endpoints and repeated pairs are errors.
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, GraphError> {
        let mut edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        for &(u, v) in &edges {
            if u == v || v >= n {
                return Err(GraphError::BadEdge(u, v));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::ParallelEdge(w[0].0, w[0].1));
        }
        Ok(Self {
            n,
            edges,
            lattice: None,
        })
    }

    /// Attaches lattice geometry; every edge must be a lattice edge.
    pub fn with_lattice(mut self, lattice: Lattice) -> Result<Self, GraphError> {
        if lattice.vertex_count() != self.n {
            return Err(GraphError::NotALattice);
        }
        for &(u, v) in &self.edges {
            let d = v - u;
            let ok = (0..lattice.dim as usize)
                .any(|a| lattice.stride(a) == d && lattice.step(u, a, 1) == Some(v));
            if !ok {
                return Err(GraphError::BadEdge(u, v));
            }
        }
        self.lattice = Some(lattice);
        Ok(self)
    }

    pub fn empty(n: u32) -> Self {
        Self {
            n,
            edges: Vec::new(),
            lattice: None,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn lattice(&self) -> Option<Lattice> {
        self.lattice
    }

    pub fn edge_index(&self, u: u32, v: u32) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok()
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }
}

/// Compressed adjacency lists: `(neighbour, edge index)` per vertex, sorted
/// by neighbour.
#[derive(Clone, Debug)]
pub struct Adjacency {
    offsets: Vec<usize>,
    entries: Vec<(u32, u32)>,
}

impl Adjacency {
    fn new(g: &Graph) -> Self {
        let n = g.n as usize;
        let mut deg = vec![0usize; n + 1];
        for &(u, v) in &g.edges {
            deg[u as usize + 1] += 1;
            deg[v as usize + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let offsets = deg;
        let mut fill = offsets.clone();
        let mut entries = vec![(0, 0); 2 * g.edges.len()];
        for (e, &(u, v)) in g.edges.iter().enumerate() {
            entries[fill[u as usize]] = (v, e as u32);
            fill[u as usize] += 1;
            entries[fill[v as usize]] = (u, e as u32);
            fill[v as usize] += 1;
        }
        for v in 0..n {
            entries[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Self { offsets, entries }
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[(u32, u32)] {
        &self.entries[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u)
            .binary_search_by_key(&v, |&(w, _)| w)
            .is_ok()
    }
}

/// Number of unordered vertex pairs on `n` vertices.
pub fn pair_count(n: u32) -> u64 {
    n as u64 * (n as u64).saturating_sub(1) / 2
}

/// Maps `k ∈ [0, n(n−1)/2)` to the pair `(j, i)`, `j < i`, with
/// `k = i(i−1)/2 + j`.
fn decode_pair(k: u64) -> (u32, u32) {
    let mut i = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0) as u64;
    while i * (i - 1) / 2 > k {
        i -= 1;
    }
    while (i + 1) * i / 2 <= k {
        i += 1;
    }
    let j = k - i * (i - 1) / 2;
    (j as u32, i as u32)
}

/// Uniform labelled simple graph with exactly `m` edges.
pub fn sample_er_graph(n: u32, m: u64, seed: u64) -> Result<Graph, GraphError> {
    let max = pair_count(n);
    if m > max {
        return Err(GraphError::TooManyEdges { n, m, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = index::sample(&mut rng, max as usize, m as usize);
    let mut edges: Vec<(u32, u32)> = picks.into_iter().map(|k| decode_pair(k as u64)).collect();
    edges.sort_unstable();
    Ok(Graph {
        n,
        edges,
        lattice: None,
    })
}

/// Bond percolation on the `dim`-dimensional lattice of side `side`: every
/// nearest-neighbour edge is kept independently with probability `p`.
pub fn sample_lattice(dim: u8, side: u32, p: f64, seed: u64) -> Result<Graph, GraphError> {
    let lattice = Lattice::new(dim, side)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = lattice
        .all_edges()
        .into_iter()
        .filter(|_| rng.random_bool(p))
        .collect();
    edges.sort_unstable();
    Ok(Graph {
        n: lattice.vertex_count(),
        edges,
        lattice: Some(lattice),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentClass {
    Tree,
    Unicyclic,
    Multicyclic,
}

impl ComponentClass {
    pub fn from_counts(vertices: usize, edges: usize) -> Self {
        match edges as i64 - vertices as i64 {
            i64::MIN..=-1 => ComponentClass::Tree,
            0 => ComponentClass::Unicyclic,
            _ => ComponentClass::Multicyclic,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ComponentClass::Tree => "tree",
            ComponentClass::Unicyclic => "unicyclic",
            ComponentClass::Multicyclic => "multicyclic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Sorted vertex ids.
    pub vertices: Vec<u32>,
    pub edge_count: usize,
    pub class: ComponentClass,
}

/// Connected components ordered by smallest vertex.
#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub components: Vec<Component>,
    pub component_of: Vec<u32>,
}

impl ComponentReport {
    pub fn max_size(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.vertices.len())
            .max()
            .unwrap_or(0)
    }

    pub fn count_class(&self, class: ComponentClass) -> usize {
        self.components.iter().filter(|c| c.class == class).count()
    }

    pub fn largest(&self) -> Option<&Component> {
        // ties go to the component with the smallest vertex
        self.components
            .iter()
            .rev()
            .max_by_key(|c| c.vertices.len())
    }
}

/// Components of the subgraph induced on vertices where `keep` is true.
pub fn components_where(g: &Graph, keep: impl Fn(u32) -> bool) -> ComponentReport {
    let adj = g.adjacency();
    let n = g.n as usize;
    const NONE: u32 = u32::MAX;
    let mut component_of = vec![NONE; n];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for s in 0..g.n {
        if component_of[s as usize] != NONE || !keep(s) {
            continue;
        }
        let id = components.len() as u32;
        let mut vertices = vec![s];
        let mut degree_sum = 0usize;
        component_of[s as usize] = id;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &(w, _) in adj.neighbors(v) {
                if !keep(w) {
                    continue;
                }
                degree_sum += 1;
                if component_of[w as usize] == NONE {
                    component_of[w as usize] = id;
                    vertices.push(w);
                    stack.push(w);
                }
            }
        }
        vertices.sort_unstable();
        let edge_count = degree_sum / 2;
        let class = ComponentClass::from_counts(vertices.len(), edge_count);
        components.push(Component {
            vertices,
            edge_count,
            class,
        });
    }
    ComponentReport {
        components,
        component_of,
    }
}

pub fn components(g: &Graph) -> ComponentReport {
    components_where(g, |_| true)
}

/// Two length-`ℓ` cycles meeting only at `crux`. Each cycle lists its
/// vertices starting at the crux (the closing edge back to the crux is
/// implied), oriented so the second vertex is smaller than the last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FigureEight {
    pub crux: u32,
    pub first: Vec<u32>,
    pub second: Vec<u32>,
}

/// All simple cycles of length `len` through `x`, one orientation each.
fn cycles_through(adj: &Adjacency, x: u32, len: usize) -> Vec<Vec<u32>> {
    fn extend(adj: &Adjacency, len: usize, path: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let last = *path.last().unwrap();
        if path.len() == len {
            if path[1] < path[len - 1] && adj.has_edge(last, path[0]) {
                out.push(path.clone());
            }
            return;
        }
        for &(w, _) in adj.neighbors(last) {
            if !path.contains(&w) {
                path.push(w);
                extend(adj, len, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut path = vec![x];
    extend(adj, len, &mut path, &mut out);
    out
}

/// Every figure eight made of two length-`len` cycles, each reported once.
/// `len` is limited to [`DEFAULT_MAX_FIGURE_EIGHT_LEN`]; see
/// [`enumerate_figure_eights_with_limit`] to raise it.
pub fn enumerate_figure_eights(g: &Graph, len: usize) -> Result<Vec<FigureEight>, GraphError> {
    enumerate_figure_eights_with_limit(g, len, DEFAULT_MAX_FIGURE_EIGHT_LEN)
}

pub fn enumerate_figure_eights_with_limit(
    g: &Graph,
    len: usize,
    max_len: usize,
) -> Result<Vec<FigureEight>, GraphError> {
    if len < 3 || len > max_len {
        return Err(GraphError::CycleLength { len, max: max_len });
    }
    let adj = g.adjacency();
    let mut out = Vec::new();
    for x in 0..g.n {
        if adj.degree(x) < 4 {
            continue;
        }
        let cycles = cycles_through(&adj, x, len);
        for (i, a) in cycles.iter().enumerate() {
            for b in &cycles[i + 1..] {
                if a[1..].iter().all(|v| !b[1..].contains(v)) {
                    out.push(FigureEight {
                        crux: x,
                        first: a.clone(),
                        second: b.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Two unit plaquettes sharing exactly one lattice edge (seven edges).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domino {
    pub shared: (u32, u32),
    /// Corner ids of each plaquette, in cyclic order starting at the shared
    /// edge.
    pub cells: [[u32; 4]; 2],
}

impl Domino {
    /// The seven edges as sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(7);
        for cell in &self.cells {
            for i in 0..4 {
                let (a, b) = (cell[i], cell[(i + 1) % 4]);
                out.push(if a < b { (a, b) } else { (b, a) });
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn vertices(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.cells.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// All dominoes whose seven edges are present. In 3D both coplanar and
/// right-angle plaquette pairs count.
pub fn enumerate_dominoes(g: &Graph) -> Result<Vec<Domino>, GraphError> {
    let lattice = g.lattice.ok_or(GraphError::NotALattice)?;
    let present: HashSet<(u32, u32)> = g.edges.iter().copied().collect();
    let has = |a: u32, b: u32| present.contains(&if a < b { (a, b) } else { (b, a) });
    let dim = lattice.dim as usize;
    let mut out = Vec::new();
    for &(u, v) in &g.edges {
        let axis = (0..dim)
            .find(|&a| lattice.stride(a) == v - u)
            .expect("lattice edge");
        let mut cells: Vec<[u32; 4]> = Vec::new();
        for other in (0..dim).filter(|&b| b != axis) {
            for dir in [1i8, -1] {
                let (Some(u2), Some(v2)) =
                    (lattice.step(u, other, dir), lattice.step(v, other, dir))
                else {
                    continue;
                };
                if has(u, u2) && has(u2, v2) && has(v2, v) {
                    cells.push([u, v, v2, u2]);
                }
            }
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                out.push(Domino {
                    shared: (u, v),
                    cells: [cells[i], cells[j]],
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn graph_validation() {
        assert_eq!(Graph::new(3, [(1, 1)]), Err(GraphError::BadEdge(1, 1)));
        assert_eq!(Graph::new(3, [(0, 3)]), Err(GraphError::BadEdge(0, 3)));
        assert_eq!(
            Graph::new(3, [(0, 1), (1, 0)]),
            Err(GraphError::ParallelEdge(0, 1))
        );
        let g = Graph::new(4, [(3, 1), (0, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (1, 3)]);
        assert_eq!(g.edge_index(3, 1), Some(1));
    }

    #[test]
    fn pair_decoding_is_a_bijection() {
        let n = 37u32;
        let mut seen = HashSet::new();
        for k in 0..pair_count(n) {
            let (j, i) = decode_pair(k);
            assert!(j < i && i < n);
            assert!(seen.insert((j, i)));
        }
        assert_eq!(decode_pair(4_999_950_000 - 1), (99_999 - 1, 99_999));
    }

    #[test]
    fn er_examples() {
        assert_eq!(sample_er_graph(5, 0, 9).unwrap().m(), 0);
        assert_eq!(sample_er_graph(3, 3, 1).unwrap(), triangle());
        assert_eq!(
            sample_er_graph(50, 200, 7).unwrap(),
            sample_er_graph(50, 200, 7).unwrap()
        );
        assert_ne!(
            sample_er_graph(50, 200, 7).unwrap(),
            sample_er_graph(50, 200, 8).unwrap()
        );
        assert!(matches!(
            sample_er_graph(4, 7, 0),
            Err(GraphError::TooManyEdges { max: 6, .. })
        ));
        // dense regime
        let g = sample_er_graph(30, 400, 3).unwrap();
        assert_eq!(g.m(), 400);
        assert!(Graph::new(30, g.edges().iter().copied()).is_ok());
    }

    #[test]
    fn lattice_examples() {
        assert_eq!(sample_lattice(2, 5, 0.0, 1).unwrap().m(), 0);
        for side in 2..7 {
            assert_eq!(
                sample_lattice(2, side, 1.0, 1).unwrap().m() as u32,
                2 * side * (side - 1)
            );
        }
        assert_eq!(sample_lattice(3, 2, 1.0, 1).unwrap().m(), 12);
        assert_eq!(
            sample_lattice(2, 1, 0.5, 1),
            Err(GraphError::LatticeTooSmall(1))
        );
        assert_eq!(
            sample_lattice(2, 4, 1.5, 1),
            Err(GraphError::InvalidProbability(1.5))
        );
        assert_eq!(
            sample_lattice(4, 4, 0.5, 1),
            Err(GraphError::UnsupportedDimension(4))
        );
        let lat = Lattice::new(3, 4).unwrap();
        assert_eq!(lat.coords(lat.id(&[1, 2, 3])), vec![1, 2, 3]);
    }

    #[test]
    fn component_examples() {
        let r = components(&Graph::empty(4));
        assert_eq!(r.components.len(), 4);
        assert!(r
            .components
            .iter()
            .all(|c| c.class == ComponentClass::Tree && c.vertices.len() == 1));

        let g = Graph::new(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = components(&g);
        assert_eq!(r.count_class(ComponentClass::Unicyclic), 1);
        assert_eq!(r.count_class(ComponentClass::Tree), 1);
        assert_eq!(r.max_size(), 3);

        let g = Graph::new(4, [(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)]).unwrap();
        let r = components(&g);
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.components[0].class, ComponentClass::Multicyclic);
    }

    #[test]
    fn figure_eight_examples() {
        let bowtie = Graph::new(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)]).unwrap();
        let f8 = enumerate_figure_eights(&bowtie, 3).unwrap();
        assert_eq!(f8.len(), 1);
        assert_eq!(f8[0].crux, 0);

        let path = Graph::new(6, (0..5).map(|i| (i, i + 1))).unwrap();
        assert!(enumerate_figure_eights(&path, 3).unwrap().is_empty());

        let k4 = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(enumerate_figure_eights(&k4, 3).unwrap().is_empty());

        assert!(enumerate_figure_eights(&k4, 2).is_err());
        assert!(enumerate_figure_eights(&k4, 5).is_err());
        assert!(enumerate_figure_eights_with_limit(&k4, 5, 6).is_ok());
    }

    /// Brute force: every pair of edge sets forming two length-ℓ cycles that
    /// share exactly one vertex, found by checking all ℓ-subsets of edges.
    fn brute_force_figure_eights(g: &Graph, len: usize) -> usize {
        let m = g.m();
        let mut cycles: Vec<(u64, Vec<u32>)> = Vec::new();
        for mask in 0u64..(1 << m) {
            if mask.count_ones() as usize != len {
                continue;
            }
            let es: Vec<(u32, u32)> = (0..m)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| g.edges()[i])
                .collect();
            let mut deg = std::collections::HashMap::new();
            for &(u, v) in &es {
                *deg.entry(u).or_insert(0) += 1;
                *deg.entry(v).or_insert(0) += 1;
            }
            if deg.len() != len || deg.values().any(|&d| d != 2) {
                continue;
            }
            let sub = Graph::new(g.n(), es.iter().copied()).unwrap();
            let verts: Vec<u32> = deg.keys().copied().collect();
            let r = components_where(&sub, |v| verts.contains(&v));
            if r.components.len() == 1 {
                cycles.push((mask, verts));
            }
        }
        let mut count = 0;
        for i in 0..cycles.len() {
            for j in i + 1..cycles.len() {
                let shared = cycles[i]
                    .1
                    .iter()
                    .filter(|v| cycles[j].1.contains(v))
                    .count();
                if shared == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn figure_eights_match_brute_force() {
        let k5 = Graph::new(5, (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v)))).unwrap();
        assert_eq!(enumerate_figure_eights(&k5, 3).unwrap().len(), 15);
        for seed in 0..20 {
            let g = sample_er_graph(8, 14, seed).unwrap();
            for len in [3, 4] {
                assert_eq!(
                    enumerate_figure_eights(&g, len).unwrap().len(),
                    brute_force_figure_eights(&g, len),
                    "seed {seed} len {len}"
                );
            }
        }
    }

    #[test]
    fn domino_examples() {
        // full 2x3 block of vertices holds exactly one domino
        let lat = Lattice::new(2, 3).unwrap();
        let (a, b, c) = (lat.id(&[0, 0]), lat.id(&[0, 1]), lat.id(&[0, 2]));
        let (d, e, f) = (lat.id(&[1, 0]), lat.id(&[1, 1]), lat.id(&[1, 2]));
        let g = Graph::new(9, [(a, b), (b, c), (d, e), (e, f), (a, d), (b, e), (c, f)])
            .unwrap()
            .with_lattice(lat)
            .unwrap();
        let ds = enumerate_dominoes(&g).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].edges().len(), 7);
        assert_eq!(ds[0].shared, (b, e));

        assert!(enumerate_dominoes(&sample_lattice(2, 6, 0.0, 0).unwrap())
            .unwrap()
            .is_empty());
        assert_eq!(
            enumerate_dominoes(&triangle()),
            Err(GraphError::NotALattice)
        );
    }

    /// Counts adjacent plaquette pairs in the full lattice by enumerating all
    /// plaquettes and testing pairs for a shared edge.
    fn brute_force_full_lattice_dominoes(dim: u8, side: u32) -> usize {
        let g = sample_lattice(dim, side, 1.0, 0).unwrap();
        let lat = g.lattice().unwrap();
        let mut plaquettes: Vec<Vec<(u32, u32)>> = Vec::new();
        for v in 0..lat.vertex_count() {
            for a in 0..dim as usize {
                for b in a + 1..dim as usize {
                    let (Some(x), Some(y)) = (lat.step(v, a, 1), lat.step(v, b, 1)) else {
                        continue;
                    };
                    let z = lat.step(x, b, 1).unwrap();
                    let mut es = vec![(v, x), (v, y), (x, z), (y, z)];
                    es.sort_unstable();
                    plaquettes.push(es);
                }
            }
        }
        let mut count = 0;
        for i in 0..plaquettes.len() {
            for j in i + 1..plaquettes.len() {
                if plaquettes[i]
                    .iter()
                    .filter(|e| plaquettes[j].contains(e))
                    .count()
                    == 1
                {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn full_lattice_domino_counts() {
        for side in [3u32, 4, 5] {
            let g = sample_lattice(2, side, 1.0, 0).unwrap();
            let expect = 2 * (side as usize - 1) * (side as usize - 2);
            assert_eq!(enumerate_dominoes(&g).unwrap().len(), expect);
        }
        assert_eq!(brute_force_full_lattice_dominoes(2, 4), 12);
        for side in [2u32, 3] {
            let g = sample_lattice(3, side, 1.0, 0).unwrap();
            assert_eq!(
                enumerate_dominoes(&g).unwrap().len(),
                brute_force_full_lattice_dominoes(3, side)
            );
        }
    }
}
