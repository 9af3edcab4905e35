//! Factor distributions, random instance assembly and the product-state
//! satisfiability decision.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraint::{FactorIdx, ProductConstraint};
use crate::error::{InstanceError, ParseError};
use crate::exactq::{BraState, GaussianRational};
use crate::graph::{sample_er_graph, sample_lattice, Graph, Lattice};
use crate::seed::{stream, Stream};

/// Largest supported factor-table size (per-vertex state sets are bitmasks).
pub const MAX_FACTORS: usize = 64;

/// Default per-edge resampling budget for frustration-free generation.
pub const DEFAULT_RESAMPLE_BUDGET: u32 = 10_000;

/// The `k`-th entry of the built-in factor table: `(1,0)`, `(0,1)`, then
/// `(1,c)` for `c = 1, −1, i, −i, 2, −2, 3, −3, …`. Entries are pairwise
/// non-proportional.
pub fn default_factor(k: usize) -> BraState {
    let c = match k {
        0 => return BraState::from_ints(1, 0).unwrap(),
        1 => return BraState::from_ints(0, 1).unwrap(),
        2 => GaussianRational::from_ints(1, 0),
        3 => GaussianRational::from_ints(-1, 0),
        4 => GaussianRational::from_ints(0, 1),
        5 => GaussianRational::from_ints(0, -1),
        _ => {
            let r = (k - 6) / 2 + 2;
            let s = if (k - 6).is_multiple_of(2) { 1 } else { -1 };
            GaussianRational::from_ints(s * r as i64, 0)
        }
    };
    BraState::new(GaussianRational::one(), c).unwrap()
}

pub fn default_factors(f: usize) -> Vec<BraState> {
    (0..f).map(default_factor).collect()
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.25` exactly.
pub fn parse_probability(s: &str) -> Result<BigRational, InstanceError> {
    let bad = || InstanceError::Distribution(format!("cannot parse probability {s:?}"));
    let s = s.trim();
    if s.contains('/') {
        let q: BigRational = s.parse().map_err(|_| bad())?;
        return Ok(q);
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{}{}", if int.is_empty() { "0" } else { int }, frac);
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(num, den))
}

/// A finite factor table with exact probabilities `q₁ ≥ q₂ ≥ … ≥ q_f > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorDistribution {
    factors: Vec<BraState>,
    q: Vec<BigRational>,
    /// Common denominator and cumulative numerators, for exact sampling.
    denom: u64,
    cumulative: Vec<u64>,
}

impl FactorDistribution {
    pub fn new(factors: Vec<BraState>, q: Vec<BigRational>) -> Result<Self, InstanceError> {
        let err = |m: String| Err(InstanceError::Distribution(m));
        let f = q.len();
        if f == 0 || f > MAX_FACTORS {
            return err(format!("f must be in 1..={MAX_FACTORS}, got {f}"));
        }
        if factors.len() != f {
            return err(format!("{} factors for {} probabilities", factors.len(), f));
        }
        if q.iter().any(|x| !x.is_positive()) {
            return err("probabilities must be positive".into());
        }
        if q.windows(2).any(|w| w[0] < w[1]) {
            return err("probabilities must be non-increasing".into());
        }
        if q.iter().fold(BigRational::zero(), |a, b| a + b) != BigRational::one() {
            return err("probabilities must sum to exactly 1".into());
        }
        for i in 0..f {
            if factors[i + 1..].contains(&factors[i]) {
                return err(format!(
                    "factor {} is proportional to a later factor",
                    i + 1
                ));
            }
        }
        let lcm = q.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let denom = lcm.to_u64().ok_or_else(|| {
            InstanceError::Distribution("common denominator exceeds 64 bits".into())
        })?;
        let mut acc = 0u64;
        let cumulative = q
            .iter()
            .map(|x| {
                acc += (x.numer() * (&lcm / x.denom())).to_u64().unwrap();
                acc
            })
            .collect();
        Ok(Self {
            factors,
            q,
            denom,
            cumulative,
        })
    }

    /// `q` over the built-in factor table.
    pub fn with_default_factors(q: Vec<BigRational>) -> Result<Self, InstanceError> {
        Self::new(default_factors(q.len()), q)
    }

    pub fn uniform(f: usize) -> Result<Self, InstanceError> {
        if f == 0 {
            return Err(InstanceError::Distribution("f must be at least 1".into()));
        }
        Self::with_default_factors(vec![BigRational::new(1.into(), (f as i64).into()); f])
    }

    /// `uniform`, or a comma-separated probability list, over the default
    /// table. `f`, when given, must match the list length.
    pub fn from_spec(f: Option<usize>, spec: &str) -> Result<Self, InstanceError> {
        if spec.trim() == "uniform" {
            let f = f.ok_or_else(|| InstanceError::Distribution("uniform needs f".into()))?;
            return Self::uniform(f);
        }
        let q = spec
            .split(',')
            .map(parse_probability)
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(f) = f {
            if f != q.len() {
                return Err(InstanceError::Distribution(format!(
                    "f = {f} but {} probabilities given",
                    q.len()
                )));
            }
        }
        Self::with_default_factors(q)
    }

    pub fn f(&self) -> usize {
        self.q.len()
    }

    pub fn factors(&self) -> &[BraState] {
        &self.factors
    }

    pub fn q(&self) -> &[BigRational] {
        &self.q
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FactorIdx {
        let r = rng.random_range(0..self.denom);
        self.cumulative.partition_point(|&c| c <= r) as FactorIdx
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Er,
    Lattice { dim: u8, side: u32 },
}

impl Model {
    fn name(&self) -> &'static str {
        match self {
            Model::Er => "er",
            Model::Lattice { dim: 2, .. } => "lat2",
            Model::Lattice { .. } => "lat3",
        }
    }

    fn side(&self) -> u32 {
        match self {
            Model::Er => 0,
            Model::Lattice { side, .. } => *side,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conditioning {
    Any,
    FrustrationFree,
}

impl Conditioning {
    fn name(&self) -> &'static str {
        match self {
            Conditioning::Any => "any",
            Conditioning::FrustrationFree => "free",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub model: Model,
    pub seed: u64,
    pub conditioning: Conditioning,
    pub resamples: u64,
}

impl Provenance {
    /// Provenance for hand-assembled instances.
    pub fn manual() -> Self {
        Self {
            model: Model::Er,
            seed: 0,
            conditioning: Conditioning::Any,
            resamples: 0,
        }
    }
}

/// An interaction graph with one product constraint per edge. For the edge
/// `(u, v)`, `u < v`, the pair `(h, j)` means `⟨α_h|_u ⊗ ⟨α_j|_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    constraints: Vec<(FactorIdx, FactorIdx)>,
    dist: FactorDistribution,
    provenance: Provenance,
}

impl Instance {
    pub fn new(
        graph: Graph,
        constraints: Vec<(FactorIdx, FactorIdx)>,
        dist: FactorDistribution,
        provenance: Provenance,
    ) -> Result<Self, InstanceError> {
        if graph.m() != constraints.len() {
            return Err(InstanceError::ConstraintCount {
                edges: graph.m(),
                constraints: constraints.len(),
            });
        }
        let f = dist.f();
        if let Some(&(h, j)) = constraints
            .iter()
            .find(|&&(h, j)| h as usize >= f || j as usize >= f)
        {
            let index = h.max(j) as usize + 1;
            return Err(InstanceError::FactorOutOfRange { index, f });
        }
        Ok(Self {
            graph,
            constraints,
            dist,
            provenance,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn constraints(&self) -> &[(FactorIdx, FactorIdx)] {
        &self.constraints
    }

    pub fn dist(&self) -> &FactorDistribution {
        &self.dist
    }

    pub fn f(&self) -> usize {
        self.dist.f()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn n(&self) -> u32 {
        self.graph.n()
    }

    /// The constraint on edge `e` as a [`ProductConstraint`].
    pub fn product_constraint(&self, e: usize) -> ProductConstraint {
        let (u, v) = self.graph.edges()[e];
        let (left, right) = self.constraints[e];
        ProductConstraint { u, v, left, right }
    }

    /// Factor of edge `e` at its endpoint `x`.
    pub fn factor_at(&self, e: usize, x: u32) -> FactorIdx {
        let (u, _) = self.graph.edges()[e];
        let (h, j) = self.constraints[e];
        if x == u {
            h
        } else {
            j
        }
    }

    /// The sub-instance on the edges where `keep` holds (same vertex set).
    pub fn restrict_edges(&self, keep: impl Fn(usize) -> bool) -> Instance {
        let idx: Vec<usize> = (0..self.graph.m()).filter(|&e| keep(e)).collect();
        let graph = Graph::new(self.n(), idx.iter().map(|&e| self.graph.edges()[e]))
            .expect("subgraph of a simple graph");
        let graph = match self.graph.lattice() {
            Some(l) => graph.with_lattice(l).expect("lattice subgraph"),
            None => graph,
        };
        Instance {
            graph,
            constraints: idx.iter().map(|&e| self.constraints[e]).collect(),
            dist: self.dist.clone(),
            provenance: self.provenance,
        }
    }
}

/// Each edge independently gets `(h, j)` with probability `q_h·q_j`.
pub fn sample_instance(g: &Graph, dist: &FactorDistribution, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let constraints = (0..g.m())
        .map(|_| (dist.sample(&mut rng), dist.sample(&mut rng)))
        .collect();
    Instance {
        graph: g.clone(),
        constraints,
        dist: dist.clone(),
        provenance: Provenance {
            model: model_of(g),
            seed,
            conditioning: Conditioning::Any,
            resamples: 0,
        },
    }
}

fn model_of(g: &Graph) -> Model {
    match g.lattice() {
        Some(Lattice { dim, side }) => Model::Lattice { dim, side },
        None => Model::Er,
    }
}

/// Per-vertex state: the assignment a satisfying product state gives it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assignment {
    /// The qubit is in `|ᾱ_h⟩`, the kernel of factor `h`.
    Fixed(FactorIdx),
    /// Any state not orthogonal to any factor.
    Free,
}

/// The boolean `x_{v,h}` ("qubit v is in `|ᾱ_h⟩`") or its negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    pub vertex: u32,
    pub factor: FactorIdx,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Satisfiability {
    Satisfiable(Vec<Assignment>),
    /// `literal` and its negation lie in one strongly connected component of
    /// the implication graph.
    Unsatisfiable(Literal),
}

impl Satisfiability {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, Satisfiability::Satisfiable(_))
    }
}

/// Implication graph of the product-state 2-CNF in CSR form. Node `2·var`
/// is `x_var`, node `2·var + 1` its negation, with `var = v·f + h`.
struct ImplicationGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl ImplicationGraph {
    fn build(inst: &Instance) -> Self {
        let f = inst.f();
        let nodes = 2 * inst.n() as usize * f;
        let pos = |v: u32, h: FactorIdx| 2 * (v as usize * f + h as usize);
        let mut arcs: Vec<(u32, u32)> = Vec::new();
        for (e, &(u, v)) in inst.graph.edges().iter().enumerate() {
            let (h, j) = inst.constraints[e];
            let (a, b) = (pos(u, h), pos(v, j));
            arcs.push(((a + 1) as u32, b as u32));
            arcs.push(((b + 1) as u32, a as u32));
        }
        for v in 0..inst.n() {
            for h in 0..f as FactorIdx {
                for k in (0..f as FactorIdx).filter(|&k| k != h) {
                    arcs.push((pos(v, h) as u32, (pos(v, k) + 1) as u32));
                }
            }
        }
        let mut offsets = vec![0usize; nodes + 1];
        for &(s, _) in &arcs {
            offsets[s as usize + 1] += 1;
        }
        for i in 0..nodes {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; arcs.len()];
        for &(s, t) in &arcs {
            targets[fill[s as usize]] = t;
            fill[s as usize] += 1;
        }
        Self { offsets, targets }
    }

    fn successors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Iterative Tarjan; component ids come out in reverse topological order.
    fn scc(&self) -> Vec<u32> {
        let n = self.offsets.len() - 1;
        const UNSEEN: u32 = u32::MAX;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0u32; n];
        let mut comp = vec![UNSEEN; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut call: Vec<(u32, usize)> = Vec::new();
        let (mut next_index, mut next_comp) = (0u32, 0u32);
        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            call.push((root as u32, 0));
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root as u32);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let v = v as usize;
                let succ = self.successors(v);
                if *pos < succ.len() {
                    let w = succ[*pos] as usize;
                    *pos += 1;
                    if index[w] == UNSEEN {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w as u32);
                        on_stack[w] = true;
                        call.push((w as u32, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    let p = parent as usize;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap() as usize;
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
        comp
    }
}

/// Decides whether a product state annihilated by every constraint exists,
/// returning one when it does.
pub fn satisfiable(inst: &Instance) -> Satisfiability {
    let f = inst.f();
    let comp = ImplicationGraph::build(inst).scc();
    let mut witness = vec![Assignment::Free; inst.n() as usize];
    for v in 0..inst.n() {
        for h in 0..f {
            let var = v as usize * f + h;
            let (p, q) = (comp[2 * var], comp[2 * var + 1]);
            if p == q {
                return Satisfiability::Unsatisfiable(Literal {
                    vertex: v,
                    factor: h as FactorIdx,
                    positive: true,
                });
            }
            if p < q {
                witness[v as usize] = Assignment::Fixed(h as FactorIdx);
            }
        }
    }
    // release every qubit whose fixed state no constraint relies on
    let adj = inst.graph.adjacency();
    for v in 0..inst.n() {
        let Assignment::Fixed(h) = witness[v as usize] else {
            continue;
        };
        let needed = adj.neighbors(v).iter().any(|&(w, e)| {
            inst.factor_at(e as usize, v) == h
                && witness[w as usize] != Assignment::Fixed(inst.factor_at(e as usize, w))
        });
        if !needed {
            witness[v as usize] = Assignment::Free;
        }
    }
    Satisfiability::Satisfiable(witness)
}

pub fn is_satisfiable(inst: &Instance) -> bool {
    satisfiable(inst).is_satisfiable()
}

/// True iff the assignment annihilates every constraint.
pub fn check_assignment(inst: &Instance, a: &[Assignment]) -> bool {
    inst.graph
        .edges()
        .iter()
        .zip(&inst.constraints)
        .all(|(&(u, v), &(h, j))| {
            a[u as usize] == Assignment::Fixed(h) || a[v as usize] == Assignment::Fixed(j)
        })
}

/// Incremental satisfiability for a growing set of product constraints.
///
/// Keeps the literals entailed by the constraints added so far, closed under
/// unit propagation, with an undo journal for trial propagation. For a
/// satisfiable 2-CNF closed in this way, a literal is refuted exactly when
/// propagating it produces a conflict, so a clause `(a ∨ b)` keeps the
/// formula satisfiable iff at least one of `a`, `b` propagates cleanly.
pub struct IncrementalSat {
    f: usize,
    /// `(neighbour, own factor, neighbour factor)` per vertex.
    adj: Vec<Vec<(u32, FactorIdx, FactorIdx)>>,
    fixed: Vec<Option<FactorIdx>>,
    excluded: Vec<u64>,
    journal: Vec<(u32, Option<FactorIdx>, u64)>,
    queue: Vec<(u32, FactorIdx)>,
}

impl IncrementalSat {
    pub fn new(n: u32, f: usize) -> Self {
        Self {
            f,
            adj: vec![Vec::new(); n as usize],
            fixed: vec![None; n as usize],
            excluded: vec![0; n as usize],
            journal: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn add_clause(&mut self, u: u32, h: FactorIdx, v: u32, j: FactorIdx) {
        self.adj[u as usize].push((v, h, j));
        self.adj[v as usize].push((u, j, h));
    }

    fn save(&mut self, v: u32) {
        self.journal
            .push((v, self.fixed[v as usize], self.excluded[v as usize]));
    }

    fn undo_to(&mut self, mark: usize) {
        while self.journal.len() > mark {
            let (v, fx, ex) = self.journal.pop().unwrap();
            self.fixed[v as usize] = fx;
            self.excluded[v as usize] = ex;
        }
    }

    /// Makes `x_{v,h}` true and propagates. Returns false on conflict,
    /// leaving partial changes in the journal.
    fn propagate(&mut self, v: u32, h: FactorIdx) -> bool {
        self.queue.clear();
        self.queue.push((v, h));
        while let Some((v, h)) = self.queue.pop() {
            let vi = v as usize;
            match self.fixed[vi] {
                Some(k) if k == h => continue,
                Some(_) => return false,
                None => {}
            }
            if self.excluded[vi] >> h & 1 == 1 {
                return false;
            }
            self.save(v);
            self.fixed[vi] = Some(h);
            let all = if self.f == 64 {
                u64::MAX
            } else {
                (1u64 << self.f) - 1
            };
            let newly = all & !self.excluded[vi] & !(1u64 << h);
            self.excluded[vi] |= newly;
            for &(w, mine, theirs) in &self.adj[vi] {
                if newly >> mine & 1 == 1 {
                    self.queue.push((w, theirs));
                }
            }
        }
        true
    }

    fn refuted(&mut self, v: u32, h: FactorIdx) -> bool {
        let mark = self.journal.len();
        let ok = self.propagate(v, h);
        self.undo_to(mark);
        !ok
    }

    fn commit(&mut self, v: u32, h: FactorIdx) {
        let ok = self.propagate(v, h);
        debug_assert!(ok, "committed literal was refutable");
        self.journal.clear();
    }

    /// Adds the constraint `⟨α_h|_u ⊗ ⟨α_j|_v` if the system stays
    /// satisfiable; returns whether it was added.
    pub fn try_add(&mut self, u: u32, h: FactorIdx, v: u32, j: FactorIdx) -> bool {
        let a_refuted = self.refuted(u, h);
        let b_refuted = self.refuted(v, j);
        match (a_refuted, b_refuted) {
            (true, true) => return false,
            (true, false) => self.commit(v, j),
            (false, true) => self.commit(u, h),
            (false, false) => {}
        }
        self.add_clause(u, h, v, j);
        true
    }
}

/// Adds edges in a seed-determined random order, redrawing each edge's
/// constraint from `q ⊗ q` until the partial instance stays satisfiable.
/// `accept` decides satisfiability of the partial instance plus the
/// candidate `(edge, h, j)`, committing it on success.
fn sample_conditioned<A>(
    g: &Graph,
    dist: &FactorDistribution,
    seed: u64,
    budget: u32,
    mut accept: A,
) -> Result<Instance, InstanceError>
where
    A: FnMut(usize, FactorIdx, FactorIdx) -> bool,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.shuffle(&mut rng);
    let mut constraints = vec![(0, 0); g.m()];
    let mut resamples = 0u64;
    for &e in &order {
        let mut draws = 0u32;
        loop {
            if draws == budget {
                return Err(InstanceError::ResampleBudgetExhausted { edge: e, budget });
            }
            draws += 1;
            let (h, j) = (dist.sample(&mut rng), dist.sample(&mut rng));
            if accept(e, h, j) {
                constraints[e] = (h, j);
                break;
            }
            resamples += 1;
        }
    }
    Ok(Instance {
        graph: g.clone(),
        constraints,
        dist: dist.clone(),
        provenance: Provenance {
            model: model_of(g),
            seed,
            conditioning: Conditioning::FrustrationFree,
            resamples,
        },
    })
}

/// Random instance conditioned on being satisfiable, built edge by edge
/// with rejection of frustrating constraints.
pub fn sample_frustration_free_instance(
    g: &Graph,
    dist: &FactorDistribution,
    seed: u64,
) -> Result<Instance, InstanceError> {
    sample_frustration_free_instance_with_budget(g, dist, seed, DEFAULT_RESAMPLE_BUDGET)
}

pub fn sample_frustration_free_instance_with_budget(
    g: &Graph,
    dist: &FactorDistribution,
    seed: u64,
    budget: u32,
) -> Result<Instance, InstanceError> {
    let mut prop = IncrementalSat::new(g.n(), dist.f());
    let edges = g.edges();
    let inst = sample_conditioned(g, dist, seed, budget, |e, h, j| {
        let (u, v) = edges[e];
        prop.try_add(u, h, v, j)
    })?;
    debug_assert!(is_satisfiable(&inst));
    Ok(inst)
}

/// Graph family and size for [`generate_instance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphSpec {
    Er { n: u32, m: u64 },
    Lattice { dim: u8, side: u32, p: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub graph: GraphSpec,
    pub dist: FactorDistribution,
    pub conditioning: Conditioning,
    pub budget: u32,
}

/// Samples the graph and constraints from independent streams of `seed`;
/// the instance records `seed` so it can be regenerated.
pub fn generate_instance(spec: &GenSpec, seed: u64) -> Result<Instance, InstanceError> {
    let gseed = stream(seed, Stream::Graph);
    let g = match spec.graph {
        GraphSpec::Er { n, m } => sample_er_graph(n, m, gseed)?,
        GraphSpec::Lattice { dim, side, p } => sample_lattice(dim, side, p, gseed)?,
    };
    let cseed = stream(seed, Stream::Constraints);
    let mut inst = match spec.conditioning {
        Conditioning::Any => sample_instance(&g, &spec.dist, cseed),
        Conditioning::FrustrationFree => {
            sample_frustration_free_instance_with_budget(&g, &spec.dist, cseed, spec.budget)?
        }
    };
    inst.provenance.seed = seed;
    Ok(inst)
}

impl fmt::Display for Instance {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.provenance;
        writeln!(out, "QSAT2 v1")?;
        writeln!(
            out,
            "n={} m={} f={} model={} L={} seed={} cond={} resamples={}",
            self.n(),
            self.graph.m(),
            self.f(),
            p.model.name(),
            p.model.side(),
            p.seed,
            p.conditioning.name(),
            p.resamples
        )?;
        for (i, b) in self.dist.factors.iter().enumerate() {
            writeln!(out, "F {} {}", i + 1, b)?;
        }
        for (i, q) in self.dist.q.iter().enumerate() {
            writeln!(out, "Q {} {}/{}", i + 1, q.numer(), q.denom())?;
        }
        for (&(u, v), &(h, j)) in self.graph.edges().iter().zip(&self.constraints) {
            writeln!(out, "E {} {} {} {}", u, v, h + 1, j + 1)?;
        }
        Ok(())
    }
}

fn header_field<'a>(
    line: usize,
    tokens: &mut impl Iterator<Item = &'a str>,
    key: &str,
) -> Result<&'a str, ParseError> {
    let tok = tokens
        .next()
        .ok_or_else(|| ParseError::new(line, format!("missing {key}=")))?;
    tok.strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| ParseError::new(line, format!("expected {key}=, found {tok:?}")))
}

fn parse_num<T: FromStr>(line: usize, s: &str, what: &str) -> Result<T, ParseError> {
    s.parse()
        .map_err(|_| ParseError::new(line, format!("bad {what}: {s:?}")))
}

/// 1-based index `s` checked against `expected`.
fn expect_index(line: usize, s: Option<&str>, expected: usize) -> Result<(), ParseError> {
    let got: usize = parse_num(line, s.unwrap_or(""), "index")?;
    if got != expected {
        return Err(ParseError::new(
            line,
            format!("expected index {expected}, found {got}"),
        ));
    }
    Ok(())
}

impl FromStr for Instance {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| {
                ParseError::new(0, format!("unexpected end of file, expected {what}"))
            })
        };

        let (ln, magic) = next("header")?;
        if magic.trim_end() != "QSAT2 v1" {
            return Err(ParseError::new(ln, "expected `QSAT2 v1`"));
        }

        let (ln, header) = next("parameters")?;
        let mut t = header.split_whitespace();
        let n: u32 = parse_num(ln, header_field(ln, &mut t, "n")?, "n")?;
        let m: usize = parse_num(ln, header_field(ln, &mut t, "m")?, "m")?;
        let f: usize = parse_num(ln, header_field(ln, &mut t, "f")?, "f")?;
        let model = header_field(ln, &mut t, "model")?;
        let side: u32 = parse_num(ln, header_field(ln, &mut t, "L")?, "L")?;
        let seed: u64 = parse_num(ln, header_field(ln, &mut t, "seed")?, "seed")?;
        let cond = match header_field(ln, &mut t, "cond")? {
            "any" => Conditioning::Any,
            "free" => Conditioning::FrustrationFree,
            other => return Err(ParseError::new(ln, format!("unknown cond {other:?}"))),
        };
        let resamples: u64 = parse_num(ln, header_field(ln, &mut t, "resamples")?, "resamples")?;
        if let Some(extra) = t.next() {
            return Err(ParseError::new(ln, format!("unexpected field {extra:?}")));
        }
        let model = match (model, side) {
            ("er", 0) => Model::Er,
            ("lat2", s) if s > 0 => Model::Lattice { dim: 2, side: s },
            ("lat3", s) if s > 0 => Model::Lattice { dim: 3, side: s },
            _ => {
                return Err(ParseError::new(
                    ln,
                    format!("bad model/L: {model} L={side}"),
                ))
            }
        };
        if f == 0 || f > MAX_FACTORS {
            return Err(ParseError::new(
                ln,
                format!("f must be in 1..={MAX_FACTORS}"),
            ));
        }

        let mut factors = Vec::with_capacity(f);
        for i in 1..=f {
            let (ln, l) = next("factor line")?;
            let mut t = l.splitn(3, ' ');
            if t.next() != Some("F") {
                return Err(ParseError::new(ln, "expected F line"));
            }
            expect_index(ln, t.next(), i)?;
            let b: BraState = t
                .next()
                .unwrap_or("")
                .parse()
                .map_err(|e| ParseError::new(ln, format!("{e}")))?;
            factors.push(b);
        }
        let mut q = Vec::with_capacity(f);
        for i in 1..=f {
            let (ln, l) = next("probability line")?;
            let mut t = l.split(' ');
            if t.next() != Some("Q") {
                return Err(ParseError::new(ln, "expected Q line"));
            }
            expect_index(ln, t.next(), i)?;
            let s = t.next().unwrap_or("");
            if !s.contains('/') || t.next().is_some() {
                return Err(ParseError::new(
                    ln,
                    format!("expected <num>/<den>, found {s:?}"),
                ));
            }
            q.push(parse_num::<BigRational>(ln, s, "probability")?);
        }
        let dist =
            FactorDistribution::new(factors, q).map_err(|e| ParseError::new(ln, e.to_string()))?;

        let mut edges = Vec::with_capacity(m);
        let mut constraints = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, l) = next("edge line")?;
            let t: Vec<&str> = l.split(' ').collect();
            if t.len() != 5 || t[0] != "E" {
                return Err(ParseError::new(ln, "expected `E <u> <v> <h> <j>`"));
            }
            let u: u32 = parse_num(ln, t[1], "vertex")?;
            let v: u32 = parse_num(ln, t[2], "vertex")?;
            let h: usize = parse_num(ln, t[3], "factor index")?;
            let j: usize = parse_num(ln, t[4], "factor index")?;
            if u >= v || v >= n {
                return Err(ParseError::new(
                    ln,
                    format!("edge ({u}, {v}) needs u < v < n"),
                ));
            }
            if !(1..=f).contains(&h) || !(1..=f).contains(&j) {
                return Err(ParseError::new(ln, format!("factor index out of 1..={f}")));
            }
            if let Some(&last) = edges.last() {
                if (u, v) <= last {
                    return Err(ParseError::new(ln, "edges must be strictly increasing"));
                }
            }
            edges.push((u, v));
            constraints.push(((h - 1) as FactorIdx, (j - 1) as FactorIdx));
        }
        for (ln, l) in lines {
            if !l.trim().is_empty() {
                return Err(ParseError::new(ln, "trailing content"));
            }
        }
        let graph = Graph::new(n, edges).map_err(|e| ParseError::new(0, e.to_string()))?;
        let graph = match model {
            Model::Er => graph,
            Model::Lattice { dim, side } => {
                let lat = Lattice::new(dim, side).map_err(|e| ParseError::new(2, e.to_string()))?;
                graph
                    .with_lattice(lat)
                    .map_err(|e| ParseError::new(2, e.to_string()))?
            }
        };
        let provenance = Provenance {
            model,
            seed,
            conditioning: cond,
            resamples,
        };
        Instance::new(graph, constraints, dist, provenance)
            .map_err(|e| ParseError::new(0, e.to_string()))
    }
}
