//! Coverings of the line as branch-point/monodromy data: validation, genus,
//! Galois closure, quotient coverings, and Hurwitz class counting.
//!
//! Convention: the left-to-right product of the branch permutations in list
//! order (under p-then-q composition) must be the identity. A source using
//! the opposite order is accommodated by reversing its list.

use crate::permgroups::{coset_action, PermError, PermGroup, Permutation};
use num_bigint::{BigInt, BigUint};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoveringError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("branch point {label}: permutation degree {got}, expected {expected}")]
    DegreeMismatch { label: String, expected: usize, got: usize },
    #[error("branch point {label}: local monodromy must be non-trivial")]
    TrivialPermutation { label: String },
    #[error("branch product is not the identity; residual {residual}")]
    ProductNotIdentity { residual: String },
    #[error("monodromy is not transitive; orbits {orbits:?}")]
    NotTransitive { orbits: Vec<Vec<usize>> },
    #[error("subgroup is not contained in the monodromy group")]
    SubgroupNotContained,
    #[error("class representative {index} is not a group element")]
    RepresentativeNotInGroup { index: usize },
    #[error("search budget exceeded: required at least {required} partial products")]
    BudgetExceeded { required: u128 },
}

impl From<PermError> for CoveringError {
    fn from(e: PermError) -> Self {
        match e {
            PermError::NotSubgroup => CoveringError::SubgroupNotContained,
            other => CoveringError::InvalidParameter(other.to_string()),
        }
    }
}

/// A branch point of the base line: an opaque label and a non-trivial local
/// monodromy permutation of the fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPoint {
    pub label: String,
    pub perm: Permutation,
}

impl BranchPoint {
    pub fn new(label: impl Into<String>, perm: Permutation) -> Self {
        BranchPoint { label: label.into(), perm }
    }
}

/// A validated covering: branch order is significant, the ordered product of
/// local monodromies is the identity, and the monodromy group is transitive.
/// Only [`validate_covering`] constructs values, so both invariants always
/// hold on live data.
#[derive(Clone, Debug)]
pub struct CoveringData {
    degree: usize,
    branch: Vec<BranchPoint>,
}

impl CoveringData {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn branch_points(&self) -> &[BranchPoint] {
        &self.branch
    }

    /// The monodromy group, with generators aligned 1:1 with the branch list.
    pub fn monodromy_group(&self) -> PermGroup {
        PermGroup::new(self.degree, self.branch.iter().map(|b| b.perm.clone()).collect())
            .expect("validated branch permutations have the right degree")
    }
}

/// Regular-action data of one branch point inside the Galois closure: the
/// closure curve is never materialized, only the order and cycle count of
/// right multiplication on the group.
#[derive(Clone, Debug)]
pub struct RegularBranchData {
    pub label: String,
    pub order: u64,
    /// |G| / ord(σ): the number of cycles of the regular action.
    pub cycle_count: BigUint,
}

/// Galois closure of a covering: the monodromy group acting on itself, with
/// the original covering recovered as the coset action on a point stabilizer.
#[derive(Clone, Debug)]
pub struct GaloisModel {
    pub covering: CoveringData,
    /// G, with generators aligned with the covering's branch list.
    pub group: PermGroup,
    /// H: stabilizer of letter 0; [G : H] equals the covering degree.
    pub stabilizer: PermGroup,
    pub regular_branches: Vec<RegularBranchData>,
    pub closure_genus: BigInt,
}

/// Checks the product identity and transitivity; branch order is preserved.
pub fn validate_covering(
    degree: usize,
    branch: Vec<BranchPoint>,
) -> Result<CoveringData, CoveringError> {
    if degree == 0 {
        return Err(CoveringError::InvalidParameter("degree must be positive".into()));
    }
    for b in &branch {
        if b.perm.degree() != degree {
            return Err(CoveringError::DegreeMismatch {
                label: b.label.clone(),
                expected: degree,
                got: b.perm.degree(),
            });
        }
        if b.perm.is_identity() {
            return Err(CoveringError::TrivialPermutation { label: b.label.clone() });
        }
    }
    let mut product = Permutation::identity(degree);
    for b in &branch {
        product = product.compose(&b.perm);
    }
    if !product.is_identity() {
        return Err(CoveringError::ProductNotIdentity { residual: product.format_cycles() });
    }
    let group = PermGroup::new(degree, branch.iter().map(|b| b.perm.clone()).collect())?;
    if !group.is_transitive() {
        return Err(CoveringError::NotTransitive { orbits: group.orbits() });
    }
    Ok(CoveringData { degree, branch })
}

/// Genus of the covering curve: `g = 1 - N + ½ Σ_b (N - cycles(σ_b))`,
/// counting fixed points as cycles.
pub fn genus(covering: &CoveringData) -> i64 {
    let n = covering.degree as i64;
    let ramification: i64 = covering
        .branch
        .iter()
        .map(|b| n - b.perm.cycle_count() as i64)
        .sum();
    assert!(
        ramification % 2 == 0,
        "ramification sum must be even for a valid covering (product identity)"
    );
    let g = 1 - n + ramification / 2;
    assert!(g >= 0, "genus of a connected covering is non-negative");
    g
}

/// Galois closure data: the group, a point stabilizer, and the closure genus
/// computed from the regular action (each branch contributes
/// `|G| - |G|/ord(σ)` to the ramification sum).
pub fn galois_closure(covering: &CoveringData) -> GaloisModel {
    let group = covering.monodromy_group();
    let order = group.order();
    let stabilizer = group.stabilizer(0);
    // Transitivity gives [G : H] = N by orbit-stabilizer.
    assert_eq!(
        &stabilizer.order() * BigUint::from(covering.degree),
        order,
        "point stabilizer must have index N"
    );
    let mut ramification = BigUint::from(0u32);
    let mut regular_branches = Vec::with_capacity(covering.branch.len());
    for b in &covering.branch {
        let ord = b.perm.order();
        let cycle_count = &order / BigUint::from(ord);
        ramification += &order - &cycle_count;
        regular_branches.push(RegularBranchData { label: b.label.clone(), order: ord, cycle_count });
    }
    assert!(
        (&ramification % BigUint::from(2u32)).bits() == 0,
        "regular ramification sum must be even"
    );
    let closure_genus =
        BigInt::from(1) - BigInt::from(order) + BigInt::from(ramification / BigUint::from(2u32));
    assert!(closure_genus >= BigInt::from(0), "closure genus is non-negative");
    GaloisModel { covering: covering.clone(), group, stabilizer, regular_branches, closure_genus }
}

/// The covering induced on the right cosets of `subgroup`: each branch
/// permutation is pushed through the coset action and branch points acting
/// trivially downstairs are dropped. The result is re-validated.
pub fn quotient_covering(
    model: &GaloisModel,
    subgroup: &PermGroup,
) -> Result<CoveringData, CoveringError> {
    let action = coset_action(&model.group, subgroup)?;
    // Group generators are exactly the branch permutations, in order.
    debug_assert_eq!(model.group.generators().len(), model.covering.branch.len());
    let branch: Vec<BranchPoint> = model
        .covering
        .branch
        .iter()
        .zip(&action.gen_images)
        .filter(|(_, image)| !image.is_identity())
        .map(|(b, image)| BranchPoint::new(b.label.clone(), image.clone()))
        .collect();
    validate_covering(action.degree, branch)
}

/// Which tuples to keep when counting Hurwitz classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HurwitzFilter {
    /// Every tuple with identity product.
    None,
    /// Tuples whose entries generate a transitive subgroup.
    Transitive,
    /// Tuples whose entries generate the whole ambient group.
    Generating,
}

/// Result of a Hurwitz enumeration: raw tuple count and the number of orbits
/// under simultaneous conjugation, plus the exact number of partial products
/// the search generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HurwitzCount {
    pub tuples: u64,
    pub classes: u64,
    pub search_cost: u128,
}

fn conjugacy_class(group: &PermGroup, rep: &Permutation) -> Vec<Permutation> {
    let mut seen = HashSet::new();
    let mut queue = vec![rep.clone()];
    seen.insert(rep.clone());
    while let Some(x) = queue.pop() {
        for g in group.generators() {
            let y = x.conjugated_by(g);
            if seen.insert(y.clone()) {
                queue.push(y);
            }
        }
    }
    let mut out: Vec<Permutation> = seen.into_iter().collect();
    out.sort_by(|a, b| a.images().cmp(b.images()));
    out
}

/// Counts tuples `(τ_1, ..., τ_n)` with `τ_i` conjugate to the i-th
/// representative and identity product, up to simultaneous conjugation.
///
/// Enumeration is meet-in-the-middle on prefix products: the split point is
/// chosen to minimize the number of partial products (left tuples hashed by
/// product, right tuples probed against them), and that number is charged
/// against `budget` exactly.
pub fn count_hurwitz_classes(
    group: &PermGroup,
    class_representatives: &[Permutation],
    filter: HurwitzFilter,
    budget: u64,
) -> Result<HurwitzCount, CoveringError> {
    let degree = group.degree();
    for (index, rep) in class_representatives.iter().enumerate() {
        if rep.degree() != degree || !group.contains(rep) {
            return Err(CoveringError::RepresentativeNotInGroup { index });
        }
    }
    let n = class_representatives.len();
    if n == 0 {
        return Ok(HurwitzCount { tuples: 1, classes: 1, search_cost: 0 });
    }
    let classes: Vec<Vec<Permutation>> =
        class_representatives.iter().map(|r| conjugacy_class(group, r)).collect();
    let sizes: Vec<u128> = classes.iter().map(|c| c.len() as u128).collect();

    // Choose the split minimizing left-product count + right-product count.
    let mut best_split = 0usize;
    let mut best_cost = u128::MAX;
    for m in 0..n {
        let left: u128 = sizes[..m].iter().copied().fold(1u128, u128::saturating_mul);
        let right: u128 = sizes[m..].iter().copied().fold(1u128, u128::saturating_mul);
        let cost = left.saturating_add(right);
        if cost < best_cost {
            best_cost = cost;
            best_split = m;
        }
    }
    if best_cost > budget as u128 {
        return Err(CoveringError::BudgetExceeded { required: best_cost });
    }

    // Left half: all products of classes[..split], keyed by the product.
    let mut left_map: HashMap<Permutation, Vec<Vec<Permutation>>> = HashMap::new();
    let mut left_stack: Vec<(usize, Permutation, Vec<Permutation>)> =
        vec![(0, Permutation::identity(degree), Vec::new())];
    while let Some((i, product, tuple)) = left_stack.pop() {
        if i == best_split {
            left_map.entry(product).or_default().push(tuple);
            continue;
        }
        for t in &classes[i] {
            let mut next = tuple.clone();
            next.push(t.clone());
            left_stack.push((i + 1, product.compose(t), next));
        }
    }

    // Right half: all products of classes[split..]; a full tuple is valid
    // exactly when the left product is the inverse of the right product.
    let mut valid: Vec<Vec<Permutation>> = Vec::new();
    let mut right_stack: Vec<(usize, Permutation, Vec<Permutation>)> =
        vec![(best_split, Permutation::identity(degree), Vec::new())];
    while let Some((i, product, tuple)) = right_stack.pop() {
        if i == n {
            if let Some(lefts) = left_map.get(&product.inverse()) {
                for left in lefts {
                    let mut full = left.clone();
                    full.extend(tuple.iter().cloned());
                    valid.push(full);
                }
            }
            continue;
        }
        for t in &classes[i] {
            let mut next = tuple.clone();
            next.push(t.clone());
            right_stack.push((i + 1, product.compose(t), next));
        }
    }

    let keep = |tuple: &Vec<Permutation>| -> bool {
        match filter {
            HurwitzFilter::None => true,
            HurwitzFilter::Transitive => PermGroup::new(degree, tuple.clone())
                .expect("tuple entries have the group degree")
                .is_transitive(),
            HurwitzFilter::Generating => {
                PermGroup::new(degree, tuple.clone())
                    .expect("tuple entries have the group degree")
                    .order()
                    == group.order()
            }
        }
    };
    let kept: HashSet<Vec<Permutation>> = valid.into_iter().filter(keep).collect();

    // Orbits under simultaneous conjugation by the group generators. Every
    // conjugate of a kept tuple is kept (the filter and the constraints are
    // conjugation-invariant), so orbits close inside the set.
    let mut visited: HashSet<&Vec<Permutation>> = HashSet::new();
    let mut class_count = 0u64;
    for start in &kept {
        if visited.contains(start) {
            continue;
        }
        class_count += 1;
        let mut queue = vec![start.clone()];
        visited.insert(start);
        while let Some(tuple) = queue.pop() {
            for g in group.generators() {
                let image: Vec<Permutation> =
                    tuple.iter().map(|t| t.conjugated_by(g)).collect();
                let canonical = kept
                    .get(&image)
                    .expect("conjugates of valid tuples stay valid");
                if visited.insert(canonical) {
                    queue.push(canonical.clone());
                }
            }
        }
    }
    Ok(HurwitzCount { tuples: kept.len() as u64, classes: class_count, search_cost: best_cost })
}
