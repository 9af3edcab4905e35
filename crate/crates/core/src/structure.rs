//! Structural classification of instances: alternating loops, frustration
//! certificates, fixed (frozen) qubits, the frozen subgraph and the
//! decomposition into residual components.

use std::collections::VecDeque;

use crate::constraint::{chain_indices, FactorIdx};
use crate::error::{GraphError, StructureError};
use crate::graph::{
    components, components_where, enumerate_figure_eights, Adjacency, ComponentClass,
    ComponentReport, Domino, FigureEight,
};
use crate::instance::{satisfiable, IncrementalSat, Instance, Literal, Satisfiability};

/// Default multiplier `c` in the component-size cutoff `⌈c·log₂ n⌉`.
pub const DEFAULT_CUTOFF_FACTOR: f64 = 3.0;

/// A closed alternating walk at `vertex` restricts its state to
/// `|ᾱ_a⟩` or `|ᾱ_b⟩`. `a ≤ b`; `a == b` fixes the state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopOptionSet {
    pub vertex: u32,
    pub options: (FactorIdx, FactorIdx),
    /// One witnessing walk, `walk[0] == walk[last] == vertex`.
    pub walk: Vec<u32>,
}

impl LoopOptionSet {
    fn mask(&self) -> u64 {
        1 << self.options.0 | 1 << self.options.1
    }
}

/// Vertices whose component contains a cycle; only they have closed
/// non-backtracking walks.
pub fn cyclic_vertices(inst: &Instance) -> Vec<bool> {
    let report = components(inst.graph());
    let mut out = vec![false; inst.n() as usize];
    for c in report
        .components
        .iter()
        .filter(|c| c.class != ComponentClass::Tree)
    {
        for &v in &c.vertices {
            out[v as usize] = true;
        }
    }
    out
}

/// BFS over `(vertex, incoming factor)` states shared across start points.
struct LoopSearch<'a> {
    inst: &'a Instance,
    adj: &'a Adjacency,
    f: usize,
    stamp: Vec<u32>,
    epoch: u32,
    parent: Vec<u32>,
    queue: VecDeque<u32>,
}

impl<'a> LoopSearch<'a> {
    fn new(inst: &'a Instance, adj: &'a Adjacency) -> Self {
        let states = inst.n() as usize * inst.f();
        Self {
            inst,
            adj,
            f: inst.f(),
            stamp: vec![0; states],
            epoch: 0,
            parent: vec![u32::MAX; states],
            queue: VecDeque::new(),
        }
    }

    fn state(&self, v: u32, k: FactorIdx) -> u32 {
        v * self.f as u32 + k as u32
    }

    fn visit(&mut self, s: u32, from: u32) {
        if self.stamp[s as usize] != self.epoch {
            self.stamp[s as usize] = self.epoch;
            self.parent[s as usize] = from;
            self.queue.push_back(s);
        }
    }

    /// Walk from `x` (leaving with factor `h`) to state `s`, as vertices.
    fn walk_to(&self, x: u32, s: u32) -> Vec<u32> {
        let mut walk = vec![s / self.f as u32];
        let mut cur = s;
        while self.parent[cur as usize] != u32::MAX {
            cur = self.parent[cur as usize];
            walk.push(cur / self.f as u32);
        }
        walk.push(x);
        walk.reverse();
        walk
    }

    /// Option sets of every closed alternating walk at `x` that returns to
    /// `x` only at its end.
    fn loops_at(&mut self, x: u32, with_walks: bool) -> Vec<LoopOptionSet> {
        let mut out: Vec<LoopOptionSet> = Vec::new();
        let mut seen = vec![false; self.f * self.f];
        let start_factors: u64 = self
            .adj
            .neighbors(x)
            .iter()
            .fold(0, |m, &(_, e)| m | 1 << self.inst.factor_at(e as usize, x));
        for h in (0..self.f as FactorIdx).filter(|&h| start_factors >> h & 1 == 1) {
            self.epoch += 1;
            self.queue.clear();
            for &(y, e) in self.adj.neighbors(x) {
                if self.inst.factor_at(e as usize, x) == h {
                    let s = self.state(y, self.inst.factor_at(e as usize, y));
                    self.visit(s, u32::MAX);
                }
            }
            while let Some(s) = self.queue.pop_front() {
                let (w, k) = (s / self.f as u32, (s % self.f as u32) as FactorIdx);
                if w == x {
                    let opt = if h <= k { (h, k) } else { (k, h) };
                    let key = opt.0 as usize * self.f + opt.1 as usize;
                    if !seen[key] {
                        seen[key] = true;
                        let walk = if with_walks {
                            self.walk_to(x, s)
                        } else {
                            Vec::new()
                        };
                        out.push(LoopOptionSet {
                            vertex: x,
                            options: opt,
                            walk,
                        });
                    }
                    // walks continuing through x only add option sets
                    // implied by these first-return ones
                    continue;
                }
                for i in 0..self.adj.neighbors(w).len() {
                    let (z, e) = self.adj.neighbors(w)[i];
                    if self.inst.factor_at(e as usize, w) != k {
                        let t = self.state(z, self.inst.factor_at(e as usize, z));
                        self.visit(t, s);
                    }
                }
            }
        }
        out.sort_by_key(|l| l.options);
        out
    }
}

/// Every loop option set, grouped by vertex in ascending order.
pub fn loop_option_sets(inst: &Instance) -> Vec<LoopOptionSet> {
    let adj = inst.graph().adjacency();
    let core = cyclic_vertices(inst);
    let mut search = LoopSearch::new(inst, &adj);
    (0..inst.n())
        .filter(|&x| core[x as usize])
        .flat_map(|x| search.loops_at(x, true))
        .collect()
}

/// Why an instance has no satisfying state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Loops at `vertex` whose option sets have no common element.
    Loops {
        vertex: u32,
        sets: Vec<LoopOptionSet>,
    },
    /// The implication graph forces both `literal` and its negation.
    Implication(Literal),
}

/// `None` iff the instance is satisfiable. When it is not, prefers a loop
/// certificate (a disjoint pair of option sets if there is one).
pub fn frustration_certificate(inst: &Instance) -> Option<Certificate> {
    let literal = match satisfiable(inst) {
        Satisfiability::Satisfiable(_) => return None,
        Satisfiability::Unsatisfiable(l) => l,
    };
    let adj = inst.graph().adjacency();
    let core = cyclic_vertices(inst);
    let mut search = LoopSearch::new(inst, &adj);
    for x in (0..inst.n()).filter(|&x| core[x as usize]) {
        let sets = search.loops_at(x, true);
        if sets.is_empty() || sets.iter().fold(u64::MAX, |m, s| m & s.mask()) != 0 {
            continue;
        }
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i].mask() & sets[j].mask() == 0 {
                    let pair = vec![sets[i].clone(), sets[j].clone()];
                    return Some(Certificate::Loops {
                        vertex: x,
                        sets: pair,
                    });
                }
            }
        }
        return Some(Certificate::Loops { vertex: x, sets });
    }
    Some(Certificate::Implication(literal))
}

/// Frozen qubits: `state[v] = Some(h)` means qubit `v` is `|ᾱ_h⟩` in every
/// ground state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedStates {
    pub state: Vec<Option<FactorIdx>>,
}

impl FixedStates {
    pub fn count(&self) -> usize {
        self.state.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_frozen(&self, v: u32) -> bool {
        self.state[v as usize].is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, FactorIdx)> + '_ {
        self.state
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.map(|h| (v as u32, h)))
    }
}

/// Least fixpoint of two rules: a qubit whose loop option sets intersect in
/// a single factor is frozen there, and a frozen qubit `x` in `|ᾱ_h⟩`
/// freezes a neighbour `y` in `|ᾱ_j⟩` across any edge whose factors are
/// `(k, j)` with `k ≠ h`.
pub fn fixed_states(inst: &Instance) -> Result<FixedStates, StructureError> {
    if !satisfiable(inst).is_satisfiable() {
        return Err(StructureError::Unsatisfiable);
    }
    let adj = inst.graph().adjacency();
    let core = cyclic_vertices(inst);
    let mut search = LoopSearch::new(inst, &adj);
    let mut state: Vec<Option<FactorIdx>> = vec![None; inst.n() as usize];
    let mut queue: Vec<u32> = Vec::new();
    for x in 0..inst.n() {
        // the loop rule is evaluated only where propagation has not already
        // decided the qubit; both rules are sound, so the fixpoint agrees
        if !core[x as usize] || state[x as usize].is_some() {
            continue;
        }
        let sets = search.loops_at(x, false);
        if sets.is_empty() {
            continue;
        }
        let common = sets.iter().fold(u64::MAX, |m, s| m & s.mask());
        if common.count_ones() != 1 {
            continue;
        }
        state[x as usize] = Some(common.trailing_zeros() as FactorIdx);
        queue.push(x);
        while let Some(v) = queue.pop() {
            let h = state[v as usize].unwrap();
            for &(w, e) in adj.neighbors(v) {
                if inst.factor_at(e as usize, v) == h {
                    continue;
                }
                let j = inst.factor_at(e as usize, w);
                match state[w as usize] {
                    None => {
                        state[w as usize] = Some(j);
                        queue.push(w);
                    }
                    Some(k) => debug_assert_eq!(k, j, "conflicting fixed states"),
                }
            }
        }
    }
    Ok(FixedStates { state })
}

/// Arcs `x → y` between frozen qubits along constraints that the fixed state
/// of `x` does not annihilate, with the weak components of the digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrozenSubgraph {
    pub arcs: Vec<(u32, u32)>,
    /// Weak components over all frozen qubits, largest first (ties by
    /// smallest vertex).
    pub components: Vec<Vec<u32>>,
}

impl FrozenSubgraph {
    /// The frozen core: the largest weak component.
    pub fn core(&self) -> &[u32] {
        self.components.first().map(Vec::as_slice).unwrap_or(&[])
    }
}

pub fn frozen_subgraph(inst: &Instance, frozen: &FixedStates) -> FrozenSubgraph {
    let mut arcs = Vec::new();
    for (e, &(u, v)) in inst.graph().edges().iter().enumerate() {
        let (h, j) = inst.constraints()[e];
        if let (Some(fu), Some(_)) = (frozen.state[u as usize], frozen.state[v as usize]) {
            if h != fu {
                arcs.push((u, v));
            }
        }
        if let (Some(_), Some(fv)) = (frozen.state[u as usize], frozen.state[v as usize]) {
            if j != fv {
                arcs.push((v, u));
            }
        }
    }
    arcs.sort_unstable();

    let n = inst.n() as usize;
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    for &(x, y) in &arcs {
        let (a, b) = (find(&mut parent, x), find(&mut parent, y));
        if a != b {
            parent[a.max(b) as usize] = a.min(b);
        }
    }
    let mut groups: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
    for (v, _) in frozen.iter() {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut components: Vec<Vec<u32>> = groups.into_values().collect();
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    FrozenSubgraph { arcs, components }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Frustrated,
    HighlyDisconnected,
    HighlyDecoupled,
    Unclassified,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Frustrated => "frustrated",
            Label::HighlyDisconnected => "highly_disconnected",
            Label::HighlyDecoupled => "highly_decoupled",
            Label::Unclassified => "unclassified",
        }
    }
}

/// Frozen qubits of a satisfiable instance and what remains once they are
/// removed.
#[derive(Clone, Debug)]
pub struct FrozenStructure {
    pub fixed: FixedStates,
    pub subgraph: FrozenSubgraph,
    /// Components of the subgraph induced on unfrozen qubits.
    pub residual: ComponentReport,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub label: Label,
    pub cutoff: usize,
    pub components: ComponentReport,
    /// `None` for frustrated instances.
    pub frozen: Option<FrozenStructure>,
}

impl Decomposition {
    pub fn residual_max(&self) -> Option<usize> {
        self.frozen.as_ref().map(|s| s.residual.max_size())
    }

    pub fn frozen_core(&self) -> Option<usize> {
        self.frozen.as_ref().map(|s| s.subgraph.core().len())
    }
}

/// `max(⌈c·log₂ n⌉, 1)`.
pub fn size_cutoff(n: u32, c: f64) -> usize {
    if n < 2 {
        return 1;
    }
    ((c * (n as f64).log2()).ceil() as usize).max(1)
}

/// Removes the frozen qubits and labels the instance: frustrated, highly
/// disconnected (all original components within the cutoff), highly
/// decoupled (all residual components within it), or unclassified.
pub fn decouple(inst: &Instance, c: f64) -> Decomposition {
    let cutoff = size_cutoff(inst.n(), c);
    let comps = components(inst.graph());
    let Ok(fixed) = fixed_states(inst) else {
        return Decomposition {
            label: Label::Frustrated,
            cutoff,
            components: comps,
            frozen: None,
        };
    };
    let subgraph = frozen_subgraph(inst, &fixed);
    let residual = components_where(inst.graph(), |v| !fixed.is_frozen(v));
    let label = if comps.max_size() <= cutoff {
        Label::HighlyDisconnected
    } else if residual.max_size() <= cutoff {
        Label::HighlyDecoupled
    } else {
        Label::Unclassified
    };
    Decomposition {
        label,
        cutoff,
        components: comps,
        frozen: Some(FrozenStructure {
            fixed,
            subgraph,
            residual,
        }),
    }
}

/// Option set of the closed walk `cycle[0] → cycle[1] → … → cycle[0]`, or
/// `None` when some junction kills the chain.
pub fn cycle_options(inst: &Instance, cycle: &[u32]) -> Option<(FactorIdx, FactorIdx)> {
    let g = inst.graph();
    let pairs: Vec<(FactorIdx, FactorIdx)> = (0..cycle.len())
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            let e = g.edge_index(a, b).expect("cycle edge missing from graph");
            (inst.factor_at(e, a), inst.factor_at(e, b))
        })
        .collect();
    chain_indices(&pairs).map(|(a, b)| (a.min(b), a.max(b)))
}

/// Both loops survive and their option sets at the crux are disjoint.
pub fn figure_eight_is_frustrated(inst: &Instance, fe: &FigureEight) -> bool {
    match (
        cycle_options(inst, &fe.first),
        cycle_options(inst, &fe.second),
    ) {
        (Some((a, b)), Some((c, d))) => a != c && a != d && b != c && b != d,
        _ => false,
    }
}

pub fn count_frustrated_figure_eights(inst: &Instance, len: usize) -> Result<usize, GraphError> {
    let all = enumerate_figure_eights(inst.graph(), len)?;
    Ok(all
        .iter()
        .filter(|fe| figure_eight_is_frustrated(inst, fe))
        .count())
}

/// Whether the seven constraints of `d` alone have no product solution.
pub fn domino_is_frustrated(inst: &Instance, d: &Domino) -> bool {
    let g = inst.graph();
    let local = d.vertices();
    let id = |v: u32| local.binary_search(&v).unwrap() as u32;
    let mut sat = IncrementalSat::new(local.len() as u32, inst.f());
    !d.edges().into_iter().all(|(u, v)| {
        let e = g.edge_index(u, v).expect("domino edge missing from graph");
        sat.try_add(id(u), inst.factor_at(e, u), id(v), inst.factor_at(e, v))
    })
}
