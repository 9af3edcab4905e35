//! Exact ground-space dimensions (#2-QSAT values) by kernel rank, assembled
//! over components with a balanced product tree.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::constraint::FactorIdx;
use crate::error::CountError;
use crate::exactq::{BraState, GaussianRational};
use crate::graph::components;
use crate::instance::Instance;
use crate::structure::{decouple, Decomposition, DEFAULT_CUTOFF_FACTOR};

/// Arbitrary-precision natural number.
pub type BigNat = BigUint;

/// Default cap on qubits per component handed to the rank computation.
pub const DEFAULT_MAX_COMPONENT_QUBITS: usize = 16;

/// Primes `p ≡ 1 (mod 4)` below 2⁶² with a square root of −1 mod p.
const PRIMES: [(u64, u64); 4] = [
    (4_611_686_018_427_387_817, 4_490_822_397_581_186_023),
    (4_611_686_018_427_387_761, 3_481_184_452_870_754_207),
    (4_611_686_018_427_387_737, 4_166_598_643_325_741_967),
    (4_611_686_018_427_387_733, 678_134_394_580_861_710),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankMode {
    /// Elimination over ℚ[i].
    ExactRational,
    /// Elimination modulo several primes; disagreement falls back to exact.
    Modular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankBackendConfig {
    pub mode: RankMode,
    /// Number of primes that must agree in modular mode.
    pub verification_primes: usize,
    pub max_component_qubits: usize,
}

impl Default for RankBackendConfig {
    fn default() -> Self {
        Self {
            mode: RankMode::Modular,
            verification_primes: 2,
            max_component_qubits: DEFAULT_MAX_COMPONENT_QUBITS,
        }
    }
}

impl RankBackendConfig {
    pub fn exact() -> Self {
        Self {
            mode: RankMode::ExactRational,
            ..Self::default()
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.max_component_qubits = cap;
        self
    }

    fn validate(&self) -> Result<(), CountError> {
        if self.verification_primes == 0 || self.verification_primes > PRIMES.len() {
            return Err(CountError::Config(format!(
                "verification_primes must be in 1..={}",
                PRIMES.len()
            )));
        }
        if self.max_component_qubits > 30 {
            return Err(CountError::Config("max_component_qubits above 30".into()));
        }
        Ok(())
    }
}

/// Field operations needed by the elimination.
trait RankField: Clone {
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
}

impl RankField for GaussianRational {
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn inv(&self) -> Self {
        GaussianRational::inv(self).expect("pivot is nonzero")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ModP<const P: u64>(u64);

impl<const P: u64> ModP<P> {
    fn pow(self, mut e: u64) -> Self {
        let (mut b, mut r) = (self, ModP(1));
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    fn from_bigint(x: &BigInt) -> Self {
        let r = x.mod_floor(&BigInt::from(P));
        ModP(r.to_u64().unwrap())
    }

    /// Image of `z` under ℚ[i] → 𝔽_p with `i ↦ root`, if no denominator
    /// vanishes mod p.
    fn embed(z: &GaussianRational, root: u64) -> Option<Self> {
        let part = |q: &num_rational::BigRational| {
            let d = Self::from_bigint(q.denom());
            if d.0 == 0 {
                return None;
            }
            Some(Self::from_bigint(q.numer()).mul(&d.inv()))
        };
        let re = part(z.re())?;
        let im = part(z.im())?;
        Some(ModP(
            (re.0 as u128 + im.mul(&ModP(root)).0 as u128).rem_euclid(P as u128) as u64,
        ))
    }
}

impl<const P: u64> RankField for ModP<P> {
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn mul(&self, o: &Self) -> Self {
        ModP((self.0 as u128 * o.0 as u128 % P as u128) as u64)
    }
    fn sub(&self, o: &Self) -> Self {
        ModP(if self.0 >= o.0 {
            self.0 - o.0
        } else {
            self.0 + P - o.0
        })
    }
    fn inv(&self) -> Self {
        self.pow(P - 2)
    }
}

type SparseRow<F> = Vec<(u32, F)>;

/// `r − c·p` where `p` is sorted by column.
fn axpy<F: RankField>(r: &[(u32, F)], c: &F, p: &[(u32, F)]) -> SparseRow<F> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take_r = j == p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i == r.len() || (j < p.len() && p[j].0 < r[i].0);
        if take_r {
            out.push(r[i].clone());
            i += 1;
        } else if take_p {
            let v = c.mul(&p[j].1);
            out.push((p[j].0, zero_like(&v).sub(&v)));
            j += 1;
        } else {
            let v = r[i].1.sub(&c.mul(&p[j].1));
            if !v.is_zero() {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn zero_like<F: RankField>(x: &F) -> F {
    x.sub(x)
}

/// Rank by incremental row echelon elimination, sparsest rows first.
fn sparse_rank<F: RankField>(cols: usize, mut rows: Vec<SparseRow<F>>) -> usize {
    rows.sort_by_key(|r| r.len());
    const NONE: u32 = u32::MAX;
    let mut pivot_of = vec![NONE; cols];
    let mut pivots: Vec<SparseRow<F>> = Vec::new();
    for mut r in rows {
        while let Some((c, v)) = r.first().cloned() {
            let p = pivot_of[c as usize];
            if p == NONE {
                let inv = v.inv();
                for e in r.iter_mut() {
                    e.1 = e.1.mul(&inv);
                }
                pivot_of[c as usize] = pivots.len() as u32;
                pivots.push(r);
                break;
            }
            r = axpy(&r, &v, &pivots[p as usize]);
        }
    }
    pivots.len()
}

/// A single-qubit covector `(c0, c1)` acting on local qubit `qubit`.
#[derive(Clone, Debug)]
struct LocalBra {
    qubit: usize,
    c: [GaussianRational; 2],
}

/// The constraint system of one component in local coordinates: qubits are
/// numbered by position in the vertex list, and on each qubit the two most
/// frequent incident factors are mapped to the standard basis bras, which
/// keeps the expanded rows sparse without changing their span.
struct LocalSystem {
    k: usize,
    terms: Vec<[LocalBra; 2]>,
    /// Per-qubit change of coordinates `α ↦ α·B⁻¹`.
    basis_inv: Vec<[[GaussianRational; 2]; 2]>,
}

fn inverse_2x2(b: &[[GaussianRational; 2]; 2]) -> [[GaussianRational; 2]; 2] {
    let det = &(&b[0][0] * &b[1][1]) - &(&b[0][1] * &b[1][0]);
    let d = det.inv().expect("basis rows are independent");
    [
        [&b[1][1] * &d, -&(&b[0][1] * &d)],
        [-&(&b[1][0] * &d), &b[0][0] * &d],
    ]
}

impl LocalSystem {
    fn new(inst: &Instance, vertices: &[u32]) -> Self {
        let k = vertices.len();
        let local = |v: u32| vertices.binary_search(&v).ok();
        let f = inst.f();
        let factors = inst.dist().factors();
        let edges: Vec<usize> = inst
            .graph()
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| local(u).is_some() && local(v).is_some())
            .map(|(e, _)| e)
            .collect();

        let mut freq = vec![vec![0usize; f]; k];
        for &e in &edges {
            let (u, v) = inst.graph().edges()[e];
            let (h, j) = inst.constraints()[e];
            freq[local(u).unwrap()][h as usize] += 1;
            freq[local(v).unwrap()][j as usize] += 1;
        }
        let e0 = BraState::from_ints(1, 0).unwrap();
        let e1 = BraState::from_ints(0, 1).unwrap();
        let basis_inv = freq
            .iter()
            .map(|counts| {
                let mut order: Vec<usize> = (0..f).collect();
                order.sort_by_key(|&h| (Reverse(counts[h]), h));
                let first = factors[order[0]].clone();
                let second = match order.get(1) {
                    Some(&h) if counts[h] > 0 => factors[h].clone(),
                    _ if first != e1 => e1.clone(),
                    _ => e0.clone(),
                };
                let b = [
                    [first.c0().clone(), first.c1().clone()],
                    [second.c0().clone(), second.c1().clone()],
                ];
                inverse_2x2(&b)
            })
            .collect();
        let mut sys = Self {
            k,
            terms: Vec::with_capacity(edges.len()),
            basis_inv,
        };
        for &e in &edges {
            let (u, v) = inst.graph().edges()[e];
            let (h, j) = inst.constraints()[e];
            let a = sys.local_bra(local(u).unwrap(), &factors[h as usize]);
            let b = sys.local_bra(local(v).unwrap(), &factors[j as usize]);
            sys.terms.push([a, b]);
        }
        sys
    }

    fn local_bra(&self, qubit: usize, b: &BraState) -> LocalBra {
        let m = &self.basis_inv[qubit];
        let c = [
            &(b.c0() * &m[0][0]) + &(b.c1() * &m[1][0]),
            &(b.c0() * &m[0][1]) + &(b.c1() * &m[1][1]),
        ];
        LocalBra { qubit, c }
    }

    /// Expands `⟨a|⊗⟨b|` (and optional single-qubit rows) into sparse rows
    /// over the `2^k` computational basis.
    fn rows<F: RankField>(
        &self,
        unary: &[LocalBra],
        embed: &impl Fn(&GaussianRational) -> Option<F>,
    ) -> Option<Vec<SparseRow<F>>> {
        let mut rows = Vec::new();
        let factors: Vec<Vec<&LocalBra>> = self
            .terms
            .iter()
            .map(|t| t.iter().collect())
            .chain(unary.iter().map(|u| vec![u]))
            .collect();
        for bras in factors {
            let mut fixed: Vec<usize> = bras.iter().map(|b| b.qubit).collect();
            fixed.sort_unstable();
            let coeffs: Vec<[F; 2]> = bras
                .iter()
                .map(|b| Some([embed(&b.c[0])?, embed(&b.c[1])?]))
                .collect::<Option<_>>()?;
            let free = self.k - fixed.len();
            for s in 0..1u32 << free {
                let base = spread(s, &fixed);
                let mut row: SparseRow<F> = Vec::with_capacity(4);
                for pattern in 0..1u32 << bras.len() {
                    let mut col = base;
                    let mut val: Option<F> = None;
                    for (i, b) in bras.iter().enumerate() {
                        let bit = (pattern >> i & 1) as usize;
                        let x = &coeffs[i][bit];
                        val = Some(match val {
                            None => x.clone(),
                            Some(v) => v.mul(x),
                        });
                        col |= (bit as u32) << b.qubit;
                    }
                    let val = val.unwrap();
                    if !val.is_zero() {
                        row.push((col, val));
                    }
                }
                row.sort_by_key(|e| e.0);
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
        Some(rows)
    }

    fn rank_with(&self, unary: &[LocalBra], cfg: &RankBackendConfig) -> usize {
        let cols = 1usize << self.k;
        if cfg.mode == RankMode::Modular {
            let ranks: Vec<Option<usize>> = (0..cfg.verification_primes)
                .map(|i| match i {
                    0 => self.rank_mod::<{ PRIMES[0].0 }>(cols, unary, PRIMES[0].1),
                    1 => self.rank_mod::<{ PRIMES[1].0 }>(cols, unary, PRIMES[1].1),
                    2 => self.rank_mod::<{ PRIMES[2].0 }>(cols, unary, PRIMES[2].1),
                    _ => self.rank_mod::<{ PRIMES[3].0 }>(cols, unary, PRIMES[3].1),
                })
                .collect();
            if let Some(Some(r)) = ranks.first() {
                if ranks.iter().all(|x| *x == Some(*r)) {
                    return *r;
                }
            }
        }
        let rows = self
            .rows(unary, &|z: &GaussianRational| Some(z.clone()))
            .unwrap();
        sparse_rank(cols, rows)
    }

    fn rank_mod<const P: u64>(&self, cols: usize, unary: &[LocalBra], root: u64) -> Option<usize> {
        let rows = self.rows(unary, &|z: &GaussianRational| ModP::<P>::embed(z, root))?;
        Some(sparse_rank(cols, rows))
    }

    fn dimension(&self) -> BigNat {
        BigNat::one() << self.k
    }
}

/// Inserts zero bits at the (sorted) positions in `fixed`.
fn spread(mut s: u32, fixed: &[usize]) -> u32 {
    for &p in fixed {
        let low = s & ((1u32 << p) - 1);
        s = ((s >> p) << (p + 1)) | low;
    }
    s
}

fn check_cap(id: usize, size: usize, cfg: &RankBackendConfig) -> Result<(), CountError> {
    if size > cfg.max_component_qubits {
        return Err(CountError::ComponentTooLarge {
            component: id,
            size,
            cap: cfg.max_component_qubits,
        });
    }
    Ok(())
}

/// `2^k − rank M` for the constraints among `vertices` (sorted), i.e. the
/// ground-space dimension of the component.
pub fn component_value(
    inst: &Instance,
    vertices: &[u32],
    cfg: &RankBackendConfig,
) -> Result<BigNat, CountError> {
    cfg.validate()?;
    check_cap(0, vertices.len(), cfg)?;
    let sys = LocalSystem::new(inst, vertices);
    Ok(sys.dimension() - BigNat::from(sys.rank_with(&[], cfg)))
}

/// True iff every ground state of the component is `|ᾱ_h⟩` on `x`: adding
/// the rows `⟨α_h|_x ⊗ 1` leaves the rank unchanged.
pub fn marginal_is_fixed(
    inst: &Instance,
    vertices: &[u32],
    x: u32,
    h: FactorIdx,
    cfg: &RankBackendConfig,
) -> Result<bool, CountError> {
    cfg.validate()?;
    check_cap(0, vertices.len(), cfg)?;
    let sys = LocalSystem::new(inst, vertices);
    let q = vertices.binary_search(&x).expect("x lies in the component");
    let unary = sys.local_bra(q, &inst.dist().factors()[h as usize]);
    Ok(sys.rank_with(&[], cfg) == sys.rank_with(&[unary], cfg))
}

/// Product of naturals, always multiplying the two smallest remaining
/// values so operand sizes stay balanced.
pub fn product_tree(values: Vec<BigNat>) -> BigNat {
    let mut heap: BinaryHeap<Reverse<(u64, BigNat)>> =
        values.into_iter().map(|v| Reverse((v.bits(), v))).collect();
    while heap.len() > 1 {
        let Reverse((_, a)) = heap.pop().unwrap();
        let Reverse((_, b)) = heap.pop().unwrap();
        let p = a * b;
        heap.push(Reverse((p.bits(), p)));
    }
    heap.pop()
        .map(|Reverse((_, v))| v)
        .unwrap_or_else(BigNat::one)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentValue {
    pub id: usize,
    pub size: usize,
    pub value: BigNat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceValue {
    pub value: BigNat,
    pub frustrated: bool,
    pub frozen: usize,
    /// Values of the residual components after frozen qubits are removed.
    pub components: Vec<ComponentValue>,
}

fn values_of(
    inst: &Instance,
    comps: &[Vec<u32>],
    cfg: &RankBackendConfig,
) -> Result<Vec<ComponentValue>, CountError> {
    cfg.validate()?;
    for (id, c) in comps.iter().enumerate() {
        check_cap(id, c.len(), cfg)?;
    }
    comps
        .par_iter()
        .enumerate()
        .map(|(id, c)| {
            let sys = LocalSystem::new(inst, c);
            let value = sys.dimension() - BigNat::from(sys.rank_with(&[], cfg));
            Ok(ComponentValue {
                id,
                size: c.len(),
                value,
            })
        })
        .collect()
}

/// Value from an existing decomposition: zero when frustrated, otherwise
/// the product of residual component values (each frozen qubit
/// contributes a factor of one).
pub fn value_from_decomposition(
    inst: &Instance,
    d: &Decomposition,
    cfg: &RankBackendConfig,
) -> Result<InstanceValue, CountError> {
    let Some(s) = &d.frozen else {
        return Ok(InstanceValue {
            value: BigNat::zero(),
            frustrated: true,
            frozen: 0,
            components: Vec::new(),
        });
    };
    let comps: Vec<Vec<u32>> = s
        .residual
        .components
        .iter()
        .map(|c| c.vertices.clone())
        .collect();
    let components = values_of(inst, &comps, cfg)?;
    let value = product_tree(components.iter().map(|c| c.value.clone()).collect());
    Ok(InstanceValue {
        value,
        frustrated: false,
        frozen: s.fixed.count(),
        components,
    })
}

/// The #2-QSAT value of the whole instance.
pub fn instance_value(
    inst: &Instance,
    cfg: &RankBackendConfig,
) -> Result<InstanceValue, CountError> {
    let d = decouple(inst, DEFAULT_CUTOFF_FACTOR);
    value_from_decomposition(inst, &d, cfg)
}

/// Value computed on the original components by rank alone, without the
/// satisfiability decision or frozen-qubit removal.
pub fn raw_value(inst: &Instance, cfg: &RankBackendConfig) -> Result<BigNat, CountError> {
    let comps: Vec<Vec<u32>> = components(inst.graph())
        .components
        .into_iter()
        .map(|c| c.vertices)
        .collect();
    Ok(product_tree(
        values_of(inst, &comps, cfg)?
            .into_iter()
            .map(|c| c.value)
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_er_graph, Graph};
    use crate::instance::{sample_instance, FactorDistribution, Provenance};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn build(n: u32, edges: &[(u32, u32, u8, u8)], f: usize) -> Instance {
        let mut sorted = edges.to_vec();
        sorted.sort();
        let g = Graph::new(n, sorted.iter().map(|e| (e.0, e.1))).unwrap();
        let c = sorted.iter().map(|e| (e.2, e.3)).collect();
        Instance::new(
            g,
            c,
            FactorDistribution::uniform(f).unwrap(),
            Provenance::manual(),
        )
        .unwrap()
    }

    fn all(inst: &Instance) -> Vec<u32> {
        (0..inst.n()).collect()
    }

    fn value(inst: &Instance) -> u64 {
        component_value(inst, &all(inst), &RankBackendConfig::default())
            .unwrap()
            .to_u64()
            .unwrap()
    }

    #[test]
    fn component_examples() {
        assert_eq!(value(&build(1, &[], 2)), 2);
        assert_eq!(value(&build(2, &[(0, 1, 0, 1)], 2)), 3);
        assert_eq!(
            value(&build(3, &[(0, 1, 0, 0), (1, 2, 0, 0), (0, 2, 0, 0)], 1)),
            4
        );
        assert_eq!(value(&build(3, &[(0, 1, 0, 0), (1, 2, 1, 1)], 2)), 4);
        assert_eq!(
            value(&build(4, &[(0, 1, 0, 0), (0, 2, 0, 0), (0, 3, 0, 0)], 1)),
            9
        );
    }

    #[test]
    fn instance_examples() {
        let cfg = RankBackendConfig::default();
        let fe = build(
            5,
            &[
                (0, 1, 0, 0),
                (1, 2, 1, 0),
                (0, 2, 1, 1),
                (0, 3, 2, 0),
                (3, 4, 1, 0),
                (0, 4, 3, 1),
            ],
            4,
        );
        let v = instance_value(&fe, &cfg).unwrap();
        assert!(v.frustrated && v.value.is_zero());
        assert!(raw_value(&fe, &cfg).unwrap().is_zero());

        let two = build(4, &[(0, 1, 0, 1), (2, 3, 1, 1)], 2);
        assert_eq!(
            instance_value(&two, &cfg).unwrap().value,
            BigNat::from(9u32)
        );

        let lone = build(500, &[], 2);
        let v = instance_value(&lone, &cfg).unwrap();
        assert_eq!(v.value, BigNat::one() << 500);
        assert_eq!(v.value.to_string().len(), 151);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::new(5, (0..4).map(|i| (i, i + 1))).unwrap();
        let inst = sample_instance(&g, &FactorDistribution::uniform(2).unwrap(), 0);
        let cfg = RankBackendConfig::default().with_cap(4);
        assert_eq!(
            raw_value(&inst, &cfg),
            Err(CountError::ComponentTooLarge {
                component: 0,
                size: 5,
                cap: 4
            })
        );
    }

    #[test]
    fn spread_inserts_zero_bits() {
        assert_eq!(spread(0b11, &[1]), 0b101);
        assert_eq!(spread(0b111, &[0, 2]), 0b11010);
    }

    /// Classical #SAT count for diagonal constraints: factor ⟨0| forbids
    /// bit 0, factor ⟨1| forbids bit 1.
    fn classical_count(inst: &Instance) -> u64 {
        let n = inst.n();
        (0..1u64 << n)
            .filter(|&s| {
                inst.graph()
                    .edges()
                    .iter()
                    .zip(inst.constraints())
                    .all(|(&(u, v), &(h, j))| {
                        let bu = (s >> u & 1) as u8;
                        let bv = (s >> v & 1) as u8;
                        !(bu == h && bv == j)
                    })
            })
            .count() as u64
    }

    #[test]
    fn diagonal_constraints_reduce_to_classical_counting() {
        for seed in 0..200u64 {
            let n = 2 + (seed % 9) as u32;
            let m = (seed % 13).min(n as u64 * (n as u64 - 1) / 2);
            let g = sample_er_graph(n, m, seed).unwrap();
            let inst = sample_instance(&g, &FactorDistribution::uniform(2).unwrap(), seed);
            let cfg = RankBackendConfig::default();
            assert_eq!(
                raw_value(&inst, &cfg).unwrap().to_u64().unwrap(),
                classical_count(&inst)
            );
        }
    }

    #[test]
    fn modular_rank_matches_exact_rank() {
        for seed in 0..300u64 {
            let k = 2 + (seed % 7) as u32;
            let m = (seed % 11).min(k as u64 * (k as u64 - 1) / 2);
            let g = sample_er_graph(k, m, seed).unwrap();
            let f = 1 + (seed % 6) as usize;
            let inst = sample_instance(&g, &FactorDistribution::uniform(f).unwrap(), seed);
            let v = all(&inst);
            let modular = component_value(&inst, &v, &RankBackendConfig::default()).unwrap();
            let exact = component_value(&inst, &v, &RankBackendConfig::exact()).unwrap();
            assert_eq!(modular, exact, "seed {seed}");
        }
    }

    #[test]
    fn disjoint_unions_multiply() {
        let cfg = RankBackendConfig::default();
        for seed in 0..50u64 {
            let d = FactorDistribution::uniform(3).unwrap();
            let a = sample_instance(&sample_er_graph(4, 4, seed).unwrap(), &d, seed);
            let b = sample_instance(&sample_er_graph(3, 2, seed + 1).unwrap(), &d, seed + 1);
            let mut edges: Vec<(u32, u32, u8, u8)> = Vec::new();
            for (e, &(u, v)) in a.graph().edges().iter().enumerate() {
                edges.push((u, v, a.constraints()[e].0, a.constraints()[e].1));
            }
            for (e, &(u, v)) in b.graph().edges().iter().enumerate() {
                edges.push((u + 4, v + 4, b.constraints()[e].0, b.constraints()[e].1));
            }
            let joint = build(7, &edges, 3);
            let va = component_value(&a, &all(&a), &cfg).unwrap();
            let vb = component_value(&b, &all(&b), &cfg).unwrap();
            assert_eq!(
                component_value(&joint, &all(&joint), &cfg).unwrap(),
                va * vb
            );
        }
    }

    #[test]
    fn adding_a_constraint_never_increases_the_value() {
        let cfg = RankBackendConfig::default();
        for seed in 0..100u64 {
            let g = sample_er_graph(7, 10, seed).unwrap();
            let inst = sample_instance(&g, &FactorDistribution::uniform(3).unwrap(), seed);
            let full = raw_value(&inst, &cfg).unwrap();
            let fewer =
                raw_value(&inst.restrict_edges(|e| e != (seed as usize % 10)), &cfg).unwrap();
            assert!(full <= fewer);
        }
    }

    #[test]
    fn product_tree_examples() {
        assert_eq!(product_tree(vec![]), BigNat::one());
        let v: Vec<BigNat> = [2u32, 3, 5].iter().map(|&x| BigNat::from(x)).collect();
        assert_eq!(product_tree(v), BigNat::from(30u32));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vals: Vec<BigNat> = (0..10_000)
            .map(|_| BigNat::from(rng.random_range(2u64..=1 << 20)))
            .collect();
        let iterative = vals.iter().fold(BigNat::one(), |a, b| a * b);
        assert_eq!(product_tree(vals), iterative);
    }

    #[test]
    fn sixteen_qubit_component_is_tractable() {
        let g = sample_er_graph(16, 20, 3).unwrap();
        let inst = sample_instance(&g, &FactorDistribution::uniform(3).unwrap(), 3);
        let t = std::time::Instant::now();
        let v = component_value(&inst, &all(&inst), &RankBackendConfig::default()).unwrap();
        assert!(v <= BigNat::one() << 16);
        assert!(t.elapsed().as_secs() < 20);
    }

    proptest! {
        #[test]
        fn product_tree_is_order_independent(mut xs in proptest::collection::vec(1u64..1_000_000, 0..40)) {
            let a = product_tree(xs.iter().map(|&x| BigNat::from(x)).collect());
            xs.reverse();
            let b = product_tree(xs.iter().map(|&x| BigNat::from(x)).collect());
            let c = xs.iter().fold(BigNat::one(), |a, &x| a * x);
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a, c);
        }
    }
}
