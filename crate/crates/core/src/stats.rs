//! Closed-form predictions for random instances with independent factor
//! distributions: junction and crux survival probabilities, the tree
//! fraction `ξ(ρ)`, the residual edge density, expected frustrated figure
//! eights and phase thresholds.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::StatsError;
use crate::instance::{FactorDistribution, IncrementalSat, Model};

/// Exact functionals of a probability vector `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionFunctionals {
    /// `1 − ∥q∥₂²`: probability that two independent factors differ.
    pub q2: BigRational,
    /// `1 − ∥q∥∞`.
    pub qinf: BigRational,
    /// Probability that the option sets of two loops at a crux are disjoint.
    pub qcrux: BigRational,
    /// `∥q∥₂² − ∥q∥₃³`.
    pub qjunct: BigRational,
    pub norm2: BigRational,
    pub norm3: BigRational,
    pub norm4: BigRational,
    pub norminf: BigRational,
}

pub fn functionals(dist: &FactorDistribution) -> DistributionFunctionals {
    functionals_of(dist.q()).expect("a valid distribution")
}

/// Functionals of an arbitrary probability vector (no factor table needed,
/// so `q` may be longer than the built-in table).
pub fn functionals_of(q: &[BigRational]) -> Result<DistributionFunctionals, StatsError> {
    if q.is_empty() || q.iter().any(|x| !x.is_positive()) {
        return Err(StatsError::Domain("probabilities must be positive".into()));
    }
    if q.iter().sum::<BigRational>() != BigRational::one() {
        return Err(StatsError::Domain("probabilities must sum to 1".into()));
    }
    let power_sum = |k: usize| {
        q.iter()
            .map(|x| num_traits::pow(x.clone(), k))
            .sum::<BigRational>()
    };
    let (norm2, norm3, norm4) = (power_sum(2), power_sum(3), power_sum(4));
    let norminf = q.iter().max().unwrap().clone();
    let one = BigRational::one();
    let int = |k: i64| BigRational::from_integer(BigInt::from(k));
    let qcrux =
        &one - int(4) * &norm2 + int(2) * &norm2 * &norm2 + int(4) * &norm3 - int(3) * &norm4;
    Ok(DistributionFunctionals {
        q2: &one - &norm2,
        qinf: &one - &norminf,
        qcrux,
        qjunct: &norm2 - &norm3,
        norm2,
        norm3,
        norm4,
        norminf,
    })
}

fn domain<T>(msg: String) -> Result<T, StatsError> {
    Err(StatsError::Domain(msg))
}

/// Fraction of vertices in tree components of a random graph with edge
/// density `ρ`: `2ρ` up to `ρ = ½`, then the root in `(0, 1)` of
/// `ξe^{−ξ} = 2ρe^{−2ρ}`.
pub fn xi(rho: f64) -> Result<f64, StatsError> {
    if !rho.is_finite() || rho < 0.0 {
        return domain(format!("xi needs a finite rho >= 0, got {rho}"));
    }
    if rho <= 0.5 {
        return Ok(2.0 * rho);
    }
    let c = 2.0 * rho * (-2.0 * rho).exp();
    let g = |x: f64| x * (-x).exp() - c;
    // g is increasing on [0, 1] with g(0) < 0 < g(1).
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x = c.min(0.5);
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            break;
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = (1.0 - x) * (-x).exp();
        let newton = x - gx / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x || (hi - lo).abs() < f64::EPSILON {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// `Σ_k k^{k−1}/k! · c^k` with `c = 2ρe^{−2ρ}`, truncated after `max_terms`
/// terms or once terms stop mattering. Converges for every `ρ ≥ 0`, slowly
/// near `ρ = ½`.
pub fn xi_series(rho: f64, max_terms: usize) -> f64 {
    let c = 2.0 * rho * (-2.0 * rho).exp();
    let mut term = c;
    let mut sum = 0.0;
    for k in 1..=max_terms {
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
        let k = k as f64;
        term *= c * (1.0 + 1.0 / k).powf(k - 1.0);
    }
    sum
}

/// Edge density of the graph left after removing the frozen core:
/// `½ξ(γQ∞) + (1−Q∞)/(4γQ∞²) · ξ(γQ∞)²`.
pub fn residual_density(gamma: f64, qinf: f64) -> Result<f64, StatsError> {
    if gamma.is_nan() || gamma <= 0.0 || qinf.is_nan() || qinf <= 0.0 || qinf > 1.0 {
        return domain(format!(
            "need gamma > 0 and 0 < qinf <= 1, got {gamma}, {qinf}"
        ));
    }
    let x = xi(gamma * qinf)?;
    Ok(0.5 * x + (1.0 - qinf) / (4.0 * gamma * qinf * qinf) * x * x)
}

fn falling(n: u64, k: u64) -> BigInt {
    (0..k).map(|i| BigInt::from(n - i)).product()
}

/// Expected number of frustrated figure eights made of two length-`len`
/// cycles in a uniform random graph with `n` vertices and `m` edges.
///
/// A figure eight has `2·len` edges, so its presence probability is
/// `Π_{i<2len} (m−i)/(N−i)` with `N = n(n−1)/2`.
pub fn expected_figure_eights(
    n: u64,
    m: u64,
    len: u64,
    dist: &FactorDistribution,
) -> Result<BigRational, StatsError> {
    if len < 3 {
        return domain(format!("cycle length must be at least 3, got {len}"));
    }
    let pairs = n * n.saturating_sub(1) / 2;
    if m > pairs {
        return domain(format!("{m} edges do not fit on {n} vertices"));
    }
    if n < 2 * len - 1 || m < 2 * len {
        return Ok(BigRational::zero());
    }
    let fs = functionals(dist);
    let frustrated = num_traits::pow(fs.q2, 2 * len as usize - 2) * fs.qcrux;
    let shapes = BigInt::from(n) * falling(n - 1, len - 1) * falling(n - len, len - 1);
    let present = BigRational::new(falling(m, 2 * len), falling(pairs, 2 * len));
    Ok(frustrated * BigRational::new(shapes, BigInt::from(8)) * present)
}

/// Probability that a domino's seven constraints have no product solution,
/// by enumerating every factor assignment. Feasible for `f ≤ 3`.
pub fn domino_frustration_probability(
    dist: &FactorDistribution,
) -> Result<BigRational, StatsError> {
    const EDGES: [(u32, u32); 7] = [(0, 1), (1, 2), (2, 3), (0, 3), (1, 4), (4, 5), (0, 5)];
    const SLOTS: usize = 14;
    let f = dist.f();
    if f > 3 {
        return domain(format!("exhaustive domino check supports f <= 3, got {f}"));
    }
    // Frustrated assignments tallied by how often each factor is used.
    let radix = SLOTS + 1;
    let mut tally = vec![0u64; radix.pow(f as u32)];
    let mut digits = [0u8; SLOTS];
    loop {
        let mut sat = IncrementalSat::new(6, f);
        let ok = EDGES
            .iter()
            .enumerate()
            .all(|(i, &(u, v))| sat.try_add(u, digits[2 * i], v, digits[2 * i + 1]));
        if !ok {
            let key = digits.iter().map(|&d| radix.pow(d as u32)).sum::<usize>();
            tally[key] += 1;
        }
        let Some(pos) = digits.iter().position(|&d| (d as usize) < f - 1) else {
            break;
        };
        digits[pos] += 1;
        digits[..pos].fill(0);
    }
    let mut total = BigRational::zero();
    for (key, &count) in tally.iter().enumerate().filter(|(_, &c)| c > 0) {
        let weight = (0..f).fold(BigRational::one(), |w, h| {
            let uses = key / radix.pow(h as u32) % radix;
            w * num_traits::pow(dist.q()[h].clone(), uses)
        });
        total += weight * BigRational::from_integer(count.into());
    }
    Ok(total)
}

/// Bond-percolation markers for `d`-dimensional lattices.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeThresholds {
    pub dim: u8,
    pub p_c: f64,
    /// Known only for `d = 2`, where it equals `p_c`.
    pub p_fin: Option<f64>,
    /// Edge-density scale `n^{−1/7}` of the domino transition.
    pub domino_scale: f64,
    /// Probability `p⁷` that a given domino position is fully present.
    pub domino_presence: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    pub model: Model,
    pub n: u64,
    pub functionals: DistributionFunctionals,
    pub gamma_disconnect: BigRational,
    /// `1/(2Q₂)`; `None` (unbounded) when `Q₂ = 0`.
    pub gamma_frustrate: Option<BigRational>,
    pub gamma: Option<f64>,
    /// `2γQ∞ − ln(2γ)`; decoupling is predicted when it exceeds 1.
    pub decouple_condition: Option<f64>,
    pub residual_density: Option<f64>,
    pub lattice: Option<LatticeThresholds>,
}

pub fn thresholds(
    dist: &FactorDistribution,
    model: Model,
    n: u64,
    gamma: Option<f64>,
    p: Option<f64>,
) -> Result<ThresholdReport, StatsError> {
    let fs = functionals(dist);
    let gamma_frustrate =
        (!fs.q2.is_zero()).then(|| (BigRational::from_integer(2.into()) * &fs.q2).recip());
    let qinf = fs.qinf.to_f64().unwrap();
    if let Some(g) = gamma {
        if g.is_nan() || g <= 0.0 {
            return domain(format!("gamma must be positive, got {g}"));
        }
    }
    let decouple_condition = gamma.map(|g| 2.0 * g * qinf - (2.0 * g).ln());
    let residual = match gamma {
        Some(g) if qinf > 0.0 => Some(residual_density(g, qinf)?),
        _ => None,
    };
    let lattice = match model {
        Model::Er => None,
        Model::Lattice { dim, .. } => {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return domain(format!("p must lie in [0, 1], got {p}"));
                }
            }
            Some(LatticeThresholds {
                dim,
                p_c: if dim == 2 { 0.5 } else { 0.24881 },
                p_fin: (dim == 2).then_some(0.5),
                domino_scale: (n as f64).powf(-1.0 / 7.0),
                domino_presence: p.map(|p| p.powi(7)),
            })
        }
    };
    Ok(ThresholdReport {
        model,
        n,
        functionals: fs,
        gamma_disconnect: BigRational::new(1.into(), 2.into()),
        gamma_frustrate,
        gamma,
        decouple_condition,
        residual_density: residual,
        lattice,
    })
}

fn exact_line(f: &mut fmt::Formatter<'_>, name: &str, x: &BigRational) -> fmt::Result {
    writeln!(f, "{name} {x} {}", x.to_f64().unwrap_or(f64::NAN))
}

impl fmt::Display for ThresholdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let model = match self.model {
            Model::Er => "er".to_string(),
            Model::Lattice { dim, side } => format!("lat{dim} L={side}"),
        };
        writeln!(f, "model {model}")?;
        writeln!(f, "n {}", self.n)?;
        let fs = &self.functionals;
        for (name, x) in [
            ("Q2", &fs.q2),
            ("Qinf", &fs.qinf),
            ("Qcrux", &fs.qcrux),
            ("Qjunct", &fs.qjunct),
            ("norm2^2", &fs.norm2),
            ("norm3^3", &fs.norm3),
            ("norm4^4", &fs.norm4),
            ("norminf", &fs.norminf),
            ("gamma_disconnect", &self.gamma_disconnect),
        ] {
            exact_line(f, name, x)?;
        }
        match &self.gamma_frustrate {
            Some(g) => exact_line(f, "gamma_frustrate", g)?,
            None => writeln!(f, "gamma_frustrate unbounded")?,
        }
        if let Some(g) = self.gamma {
            writeln!(f, "gamma {g}")?;
        }
        if let Some(c) = self.decouple_condition {
            writeln!(
                f,
                "decouple_condition {c} ({})",
                if c > 1.0 { "> 1" } else { "<= 1" }
            )?;
        }
        if let Some(r) = self.residual_density {
            writeln!(f, "residual_density {r}")?;
        }
        if let Some(l) = &self.lattice {
            writeln!(f, "p_c {}", l.p_c)?;
            match l.p_fin {
                Some(p) => writeln!(f, "p_fin {p}")?,
                None => writeln!(f, "p_fin unknown")?,
            }
            writeln!(f, "domino_scale {}", l.domino_scale)?;
            if let Some(p7) = l.domino_presence {
                writeln!(f, "domino_presence {p7}")?;
            }
        }
        Ok(())
    }
}
