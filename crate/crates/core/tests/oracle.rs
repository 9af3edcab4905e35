//! Cross-checks of satisfiability, frozen qubits and values against a dense
//! kernel computation on the full `2^n`-dimensional space.

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use qsat_core::counting::{instance_value, raw_value, RankBackendConfig};
use qsat_core::exactq::GaussianRational;
use qsat_core::graph::{pair_count, sample_er_graph, sample_lattice, Graph};
use qsat_core::instance::{
    generate_instance, is_satisfiable, sample_frustration_free_instance, sample_instance,
    Conditioning, FactorDistribution, GenSpec, GraphSpec, Instance,
};
use qsat_core::structure::fixed_states;

const P: u64 = 998_244_353;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

fn to_mod(z: &GaussianRational) -> u64 {
    let i = pow_mod(3, (P - 1) / 4);
    let part = |q: &num_rational::BigRational| {
        let reduce = |x: &num_bigint::BigInt| {
            let m = (x.abs() % P).to_u64().unwrap();
            if x.is_negative() {
                (P - m) % P
            } else {
                m
            }
        };
        reduce(q.numer()) * pow_mod(reduce(q.denom()), P - 2) % P
    };
    (part(z.re()) + i * part(z.im())) % P
}

/// Every row `⟨a|_u ⊗ ⟨b|_v ⊗ ⟨r|` of the constraint operator, mod `P`.
fn constraint_rows(inst: &Instance) -> Vec<Vec<u64>> {
    let dim = 1usize << inst.n();
    let factors: Vec<[u64; 2]> = inst
        .dist()
        .factors()
        .iter()
        .map(|b| [to_mod(b.c0()), to_mod(b.c1())])
        .collect();
    let mut rows = Vec::new();
    for (e, &(u, v)) in inst.graph().edges().iter().enumerate() {
        let (h, j) = inst.constraints()[e];
        let (a, b) = (factors[h as usize], factors[j as usize]);
        for rest in (0..dim).filter(|r| r >> u & 1 == 0 && r >> v & 1 == 0) {
            let mut row = vec![0u64; dim];
            for su in 0..2 {
                for sv in 0..2 {
                    row[rest | su << u | sv << v] = a[su] * b[sv] % P;
                }
            }
            rows.push(row);
        }
    }
    rows
}

fn rank(mut rows: Vec<Vec<u64>>) -> u64 {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let inv = pow_mod(rows[r][c], P - 2);
        let pivot: Vec<u64> = rows[r].iter().map(|x| x * inv % P).collect();
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[c];
            if f != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + P - f * y % P) % P;
                }
            }
        }
        r += 1;
    }
    r as u64
}

fn dense_kernel(inst: &Instance) -> u64 {
    (1u64 << inst.n()) - rank(constraint_rows(inst))
}

/// Kernel dimension after also imposing `⟨α_h|_v ⊗ 1`.
fn pinned_kernel(inst: &Instance, v: u32, h: u8) -> u64 {
    let dim = 1usize << inst.n();
    let a = inst.dist().factors()[h as usize].clone();
    let a = [to_mod(a.c0()), to_mod(a.c1())];
    let mut rows = constraint_rows(inst);
    for rest in (0..dim).filter(|r| r >> v & 1 == 0) {
        let mut row = vec![0u64; dim];
        row[rest] = a[0];
        row[rest | 1 << v] = a[1];
        rows.push(row);
    }
    dim as u64 - rank(rows)
}

fn samples() -> Vec<Instance> {
    let mut out = Vec::new();
    for seed in 0..240u64 {
        let f = 1 + (seed % 4) as usize;
        let dist = FactorDistribution::uniform(f).unwrap();
        let g = match seed % 3 {
            0 => {
                let n = 3 + (seed % 4) as u32;
                sample_er_graph(n, (2 + seed % 7).min(pair_count(n)), seed).unwrap()
            }
            1 => sample_lattice(2, 2, 0.9, seed).unwrap(),
            _ => sample_lattice(3, 2, 0.6, seed).unwrap(),
        };
        out.push(if seed % 5 == 0 {
            sample_frustration_free_instance(&g, &dist, seed).unwrap()
        } else {
            sample_instance(&g, &dist, seed)
        });
    }
    out
}

#[test]
fn values_match_dense_kernel() {
    let modular = RankBackendConfig::default();
    let exact = RankBackendConfig::exact();
    let mut frustrated = 0;
    for inst in samples() {
        let dense = BigUint::from(dense_kernel(&inst));
        assert_eq!(raw_value(&inst, &exact).unwrap(), dense, "{inst}");
        assert_eq!(raw_value(&inst, &modular).unwrap(), dense);
        assert_eq!(instance_value(&inst, &modular).unwrap().value, dense);
        assert_eq!(is_satisfiable(&inst), dense > BigUint::ZERO);
        frustrated += (dense == BigUint::ZERO) as usize;
    }
    assert!(frustrated > 0);
}

#[test]
fn frozen_qubits_are_annihilated_by_their_factor() {
    let mut checked = 0;
    for inst in samples().into_iter().filter(is_satisfiable) {
        let dense = dense_kernel(&inst);
        for (v, h) in fixed_states(&inst).unwrap().iter() {
            assert_eq!(
                pinned_kernel(&inst, v, h),
                dense,
                "qubit {v} frozen at {h}\n{inst}"
            );
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn fully_frozen_instances_have_value_one() {
    let dist = FactorDistribution::uniform(4).unwrap();
    let k4 = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    let mut found = 0;
    for seed in 0..3000u64 {
        let g = if seed % 2 == 0 {
            k4.clone()
        } else {
            sample_er_graph(5, 8, seed).unwrap()
        };
        let inst = sample_frustration_free_instance(&g, &dist, seed).unwrap();
        let fixed = fixed_states(&inst).unwrap();
        if fixed.count() == inst.n() as usize {
            found += 1;
            let v = instance_value(&inst, &RankBackendConfig::exact()).unwrap();
            assert_eq!(v.value, BigUint::from(1u8));
            assert!(v.components.is_empty());
            assert_eq!(dense_kernel(&inst), 1);
        }
    }
    assert!(found > 0, "no fully frozen instance among the samples");
}

#[test]
fn generation_is_reproducible_and_round_trips() {
    for (i, graph) in [
        GraphSpec::Er { n: 30, m: 45 },
        GraphSpec::Lattice {
            dim: 2,
            side: 6,
            p: 0.7,
        },
        GraphSpec::Lattice {
            dim: 3,
            side: 3,
            p: 0.5,
        },
    ]
    .into_iter()
    .enumerate()
    {
        for conditioning in [Conditioning::Any, Conditioning::FrustrationFree] {
            let spec = GenSpec {
                graph,
                dist: FactorDistribution::from_spec(None, "1/2,1/3,1/6").unwrap(),
                conditioning,
                budget: 10_000,
            };
            let a = generate_instance(&spec, 77 + i as u64).unwrap();
            let b = generate_instance(&spec, 77 + i as u64).unwrap();
            assert_eq!(a, b);
            let text = a.to_string();
            let back: Instance = text.parse().unwrap();
            assert_eq!(back, a);
            assert_eq!(back.to_string(), text);
        }
    }
}
