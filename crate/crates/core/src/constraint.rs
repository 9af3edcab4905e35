//! Product two-qubit constraints and constraint induction through the
//! singlet.
//!
//! Contracting `⟨a|_u ⊗ ⟨b|_v` and `⟨g|_v ⊗ ⟨d|_w` against
//! `1_u ⊗ |Ψ⁻⟩_{vv'} ⊗ 1_w` with `|Ψ⁻⟩ ∝ |01⟩ − |10⟩` gives
//! `(b₀g₁ − b₁g₀) · ⟨a| ⊗ ⟨d|`, so the induced constraint is again a product
//! and vanishes exactly when the two middle covectors are proportional.

use crate::error::ConstraintError;
use crate::exactq::{BraState, GaussianRational};

/// Index of a factor covector in a distribution's factor table (0-based).
pub type FactorIdx = u8;

/// `⟨α_left|_u ⊗ ⟨α_right|_v` by factor index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProductConstraint {
    pub u: u32,
    pub v: u32,
    pub left: FactorIdx,
    pub right: FactorIdx,
}

impl ProductConstraint {
    pub fn realize(&self, factors: &[BraState]) -> BraConstraint {
        BraConstraint {
            u: self.u,
            v: self.v,
            left: factors[self.left as usize].clone(),
            right: factors[self.right as usize].clone(),
        }
    }

    /// The same operator read from the other end.
    pub fn reversed(&self) -> Self {
        Self {
            u: self.v,
            v: self.u,
            left: self.right,
            right: self.left,
        }
    }
}

/// A product constraint with explicit covectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraConstraint {
    pub u: u32,
    pub v: u32,
    pub left: BraState,
    pub right: BraState,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[allow(clippy::large_enum_variant)]
pub enum InducedConstraint {
    Zero,
    Product(BraConstraint),
}

impl InducedConstraint {
    pub fn is_zero(&self) -> bool {
        matches!(self, InducedConstraint::Zero)
    }

    /// `self ∗ next`; zero absorbs.
    pub fn star(&self, next: &InducedConstraint) -> Result<InducedConstraint, ConstraintError> {
        match (self, next) {
            (InducedConstraint::Product(a), InducedConstraint::Product(b)) => induce(a, b),
            _ => Ok(InducedConstraint::Zero),
        }
    }
}

/// The singlet contraction scalar `b₀g₁ − b₁g₀` of the two covectors meeting
/// at the shared qubit.
pub fn singlet_contraction(b: &BraState, g: &BraState) -> GaussianRational {
    &(b.c0() * g.c1()) - &(b.c1() * g.c0())
}

/// Induces the implied constraint on `(c1.u, c2.v)` from two constraints
/// sharing the qubit `c1.v == c2.u`.
pub fn induce(
    c1: &BraConstraint,
    c2: &BraConstraint,
) -> Result<InducedConstraint, ConstraintError> {
    if c1.v != c2.u {
        return Err(ConstraintError::MismatchedJunction {
            left_end: c1.v,
            right_start: c2.u,
        });
    }
    if singlet_contraction(&c1.right, &c2.left).is_zero() {
        return Ok(InducedConstraint::Zero);
    }
    Ok(InducedConstraint::Product(BraConstraint {
        u: c1.u,
        v: c2.v,
        left: c1.left.clone(),
        right: c2.right.clone(),
    }))
}

/// Folds `induce` along the path `path[0] … path[ℓ]`. Constraint `i` must
/// act on the edge `(path[i], path[i+1])`, oriented along the path.
pub fn chain_constraint(
    path: &[u32],
    constraints: &[BraConstraint],
) -> Result<InducedConstraint, ConstraintError> {
    let edges = path.len().saturating_sub(1);
    if edges == 0 || edges != constraints.len() {
        return Err(ConstraintError::LengthMismatch {
            edges,
            constraints: constraints.len(),
        });
    }
    for (i, c) in constraints.iter().enumerate() {
        if c.u != path[i] || c.v != path[i + 1] {
            return Err(ConstraintError::OffPath {
                index: i,
                u: path[i],
                v: path[i + 1],
            });
        }
    }
    let mut acc = InducedConstraint::Product(constraints[0].clone());
    for c in &constraints[1..] {
        acc = acc.star(&InducedConstraint::Product(c.clone()))?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// Index-level chain fold over oriented `(left, right)` factor pairs:
/// `Some((first left, last right))` iff every junction joins different
/// factors. Valid because the factor table is pairwise non-proportional.
pub fn chain_indices(pairs: &[(FactorIdx, FactorIdx)]) -> Option<(FactorIdx, FactorIdx)> {
    let first = pairs.first()?;
    if pairs.windows(2).any(|w| w[0].1 == w[1].0) {
        return None;
    }
    Some((first.0, pairs[pairs.len() - 1].1))
}
