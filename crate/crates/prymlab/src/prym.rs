//! Triples of (repeated matrix, covering, labelling), the induced
//! correspondence on an unramified fiber, double-coset weights, fixed-point
//! sets, and the two-eigenvalue dimension bookkeeping.
//!
//! Naming: `s_diag` is the constant diagonal of the matrix part and `r_sum`
//! is `r_plus + r_minus`; the two are never both called "s".

use crate::coverings::{genus, CoveringData, CoveringError};
use crate::graphs::{certify_prym, GraphError, IntMatrix, PrymCertificate, PrymGraph};
use crate::permgroups::{coset_action, double_cosets, Permutation};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PrymError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("covering degree {got} does not match matrix degree m·d = {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("branch point {label} is not an automorphism of the matrix part: entry ({i}, {j})")]
    MonodromyNotAutomorphic { label: String, i: usize, j: usize },
    #[error("non-integer dimension: {0}")]
    NonIntegerDimension(String),
    #[error("negative dimension: {0}")]
    NegativeDimension(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
}

/// Which of the two certified eigenvalues a triple is tagged with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EigenvalueTag {
    Plus,
    Minus,
}

impl EigenvalueTag {
    pub fn flip(self) -> Self {
        match self {
            EigenvalueTag::Plus => EigenvalueTag::Minus,
            EigenvalueTag::Minus => EigenvalueTag::Plus,
        }
    }
}

/// A certified matrix part `A^{⊕m}` together with a covering of degree `m·d`
/// whose monodromy stabilizes it entrywise.
#[derive(Clone, Debug)]
pub struct PrymTriple {
    base: PrymGraph,
    certificate: PrymCertificate,
    m: usize,
    tag: EigenvalueTag,
    covering: CoveringData,
    repeated: IntMatrix,
    verified_branches: Vec<String>,
}

impl PrymTriple {
    pub fn base(&self) -> &PrymGraph {
        &self.base
    }

    pub fn certificate(&self) -> &PrymCertificate {
        &self.certificate
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn tag(&self) -> EigenvalueTag {
        self.tag
    }

    pub fn covering(&self) -> &CoveringData {
        &self.covering
    }

    /// The full matrix part `A^{⊕m}`.
    pub fn repeated_matrix(&self) -> &IntMatrix {
        &self.repeated
    }

    /// The eigenvalue selected by the tag.
    pub fn tagged_eigenvalue(&self) -> i64 {
        match self.tag {
            EigenvalueTag::Plus => self.certificate.r_plus,
            EigenvalueTag::Minus => self.certificate.r_minus,
        }
    }

    /// Constant diagonal of the matrix part.
    pub fn s_diag(&self) -> i64 {
        self.repeated.get(0, 0)
    }

    /// `A^{⊕m} - s_diag·I`: the diagonal-stripped correspondence used for
    /// intersection numbers.
    pub fn stripped_matrix(&self) -> IntMatrix {
        let mut out = self.repeated.clone();
        let s = self.s_diag();
        for i in 0..out.size() {
            out.set(i, i, out.get(i, i) - s);
        }
        out
    }

    /// Branch labels whose automorphism property has been verified.
    pub fn verified_branches(&self) -> &[String] {
        &self.verified_branches
    }
}

/// Verifies that every branch permutation preserves `A^{⊕m}` entrywise and
/// assembles the triple.
pub fn build_triple(
    base: PrymGraph,
    certificate: PrymCertificate,
    m: usize,
    tag: EigenvalueTag,
    covering: CoveringData,
) -> Result<PrymTriple, PrymError> {
    if m < 1 {
        return Err(PrymError::InvalidParameter("m >= 1 required".into()));
    }
    let d = base.matrix.size();
    if certificate.d != d {
        return Err(PrymError::InvalidParameter(format!(
            "certificate is for d = {}, matrix has d = {d}",
            certificate.d
        )));
    }
    if covering.degree() != m * d {
        return Err(PrymError::DegreeMismatch { expected: m * d, got: covering.degree() });
    }
    let repeated = base.matrix.block_repeat(m);
    let s_diag = repeated.get(0, 0);
    if (0..repeated.size()).any(|i| repeated.get(i, i) != s_diag) {
        return Err(PrymError::InvalidParameter("matrix diagonal must be constant".into()));
    }
    let mut verified_branches = Vec::with_capacity(covering.branch_points().len());
    for b in covering.branch_points() {
        if let Some((i, j)) = repeated.violating_entry(&b.perm) {
            return Err(PrymError::MonodromyNotAutomorphic { label: b.label.clone(), i, j });
        }
        verified_branches.push(b.label.clone());
    }
    Ok(PrymTriple { base, certificate, m, tag, covering, repeated, verified_branches })
}

/// The correspondence restricted to an unramified fiber: the point pair
/// `(x_i, x_j)` appears with multiplicity equal to the matrix entry.
#[derive(Clone, Debug)]
pub struct CorrespondenceMatrix {
    pub matrix: IntMatrix,
    /// (row sum, column sum); both equal k.
    pub bidegree: (i64, i64),
}

impl CorrespondenceMatrix {
    /// The weight variant `M - r·I` used at the Galois level.
    pub fn shifted(&self, r: i64) -> IntMatrix {
        let mut out = self.matrix.clone();
        for i in 0..out.size() {
            out.set(i, i, out.get(i, i) - r);
        }
        out
    }
}

/// Returns `A^{⊕m}` as the fiber multiplicity matrix with bidegree (k, k).
pub fn fiber_matrix(triple: &PrymTriple) -> CorrespondenceMatrix {
    let matrix = triple.repeated.clone();
    let k = triple.certificate.k;
    debug_assert!((0..matrix.size()).all(|i| matrix.row_sum(i) == k));
    CorrespondenceMatrix { matrix, bidegree: (k, k) }
}

/// Weight of one double coset of the point stabilizer in the monodromy group.
#[derive(Clone, Debug)]
pub struct DoubleCosetWeight {
    pub representative: Permutation,
    /// Number of right cosets the double coset contains.
    pub coset_count: usize,
    pub weight: i64,
}

/// For each double coset `HgH` of `H = Stab(letter 0)` in the monodromy
/// group, the weight `(M - rI)[g(0), 0]` with `r` the tagged eigenvalue.
/// Verifies the weight is constant across each double coset and that the
/// weights reproduce the shifted fiber matrix row by row through coset
/// transversals.
pub fn double_coset_weights(triple: &PrymTriple) -> Vec<DoubleCosetWeight> {
    let group = triple.covering.monodromy_group();
    let stab = group.stabilizer(0);
    let action = coset_action(&group, &stab).expect("point stabilizer is a subgroup");
    let cosets = double_cosets(&group, &stab).expect("point stabilizer is a subgroup");
    let shifted = fiber_matrix(triple).shifted(triple.tagged_eigenvalue());
    let n = shifted.size();

    // Coset labels form a bijection onto fiber points.
    let label: Vec<usize> = action.reps.iter().map(|rep| rep.apply(0)).collect();
    let mut out = Vec::with_capacity(cosets.len());
    for dc in &cosets {
        let weight = shifted.get(dc.rep.apply(0), 0);
        for &c in &dc.coset_indices {
            assert_eq!(
                shifted.get(label[c], 0),
                weight,
                "weight must be constant on a double coset"
            );
        }
        out.push(DoubleCosetWeight {
            representative: dc.rep.clone(),
            coset_count: dc.coset_indices.len(),
            weight,
        });
    }
    // Fiber identity: transporting column 0 by any transversal reproduces the
    // matching column of the shifted matrix.
    for rep in &action.reps {
        let j = rep.apply(0);
        for x in 0..n {
            assert_eq!(
                shifted.get(rep.apply(x), j),
                shifted.get(x, 0),
                "shifted fiber matrix must be reproduced by coset transversals"
            );
        }
    }
    out
}

/// Outcome of the entrywise quadratic identity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub holds: bool,
    /// First violating entry when the identity fails.
    pub violation: Option<(usize, usize)>,
}

/// Entrywise check of `(M - r+ I)(M - r- I) = c·J^{⊕m}` for an arbitrary
/// matrix against a certificate; exposed so corruption can be probed
/// directly.
pub fn verify_block_identity(
    matrix: &IntMatrix,
    certificate: &PrymCertificate,
    m: usize,
) -> IdentityCheck {
    let d = certificate.d;
    let n = matrix.size();
    if n != d * m {
        return IdentityCheck { holds: false, violation: Some((0, 0)) };
    }
    let mut shifted_plus = matrix.clone();
    let mut shifted_minus = matrix.clone();
    for i in 0..n {
        shifted_plus.set(i, i, shifted_plus.get(i, i) - certificate.r_plus);
        shifted_minus.set(i, i, shifted_minus.get(i, i) - certificate.r_minus);
    }
    let product = shifted_plus.multiply(&shifted_minus);
    for i in 0..n {
        for j in 0..n {
            let expect = if i / d == j / d { certificate.c } else { 0 };
            if product.get(i, j) != expect {
                return IdentityCheck { holds: false, violation: Some((i, j)) };
            }
        }
    }
    IdentityCheck { holds: true, violation: None }
}

/// Checks the quadratic identity on the triple's fiber matrix, and (for a
/// binary zero-diagonal matrix part with m = 1) the complement identity:
/// the r-shifted fiber matrix plus the (-r-1)-shifted complement fiber
/// matrix equals the all-ones matrix.
pub fn check_quadratic_identity(triple: &PrymTriple) -> IdentityCheck {
    let check = verify_block_identity(&triple.repeated, &triple.certificate, triple.m);
    if !check.holds {
        return check;
    }
    if triple.m == 1 && triple.repeated.is_binary_with_zero_diagonal() {
        let n = triple.repeated.size();
        let complement = triple.repeated.binary_complement();
        let r = triple.tagged_eigenvalue();
        let r_dual = -r - 1;
        for i in 0..n {
            for j in 0..n {
                let delta = i64::from(i == j);
                let lhs = triple.repeated.get(i, j) - r * delta + complement.get(i, j)
                    - r_dual * delta;
                if lhs != 1 {
                    return IdentityCheck { holds: false, violation: Some((i, j)) };
                }
            }
        }
    }
    check
}

/// Fixed-point data of one cycle factor of one branch permutation.
#[derive(Clone, Debug, Serialize)]
pub struct CycleFixedPoints {
    pub branch_label: String,
    /// Points of the cycle, in cycle order.
    pub cycle: Vec<usize>,
    /// Cycle length l; powers t range over 1..l-1.
    pub order: usize,
    /// For each nonzero entry value s with nonempty T_{τ,s}: the sorted set
    /// of powers t such that some point j of the cycle pairs with its image
    /// under τ^t with multiplicity s.
    pub sets: Vec<(i64, Vec<usize>)>,
}

/// Fixed points of the diagonal-stripped correspondence over all branch
/// cycles, and the aggregated local intersection number.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    pub per_cycle: Vec<CycleFixedPoints>,
    /// Σ over branch points, cycle factors, and values s of s·#T_{τ,s}.
    pub aggregate: i64,
    pub fixed_point_free: bool,
}

/// Computes every set `T_{τ,s}` of the diagonal-stripped correspondence:
/// for a cycle factor τ of length l and a power t in 1..l-1, t lies in
/// `T_{τ,s}` iff some point j of the cycle has stripped entry s at
/// (j, τ^t(j)). For a zero-diagonal matrix part this is the correspondence
/// itself.
pub fn fixed_point_analysis(triple: &PrymTriple) -> FixedPointReport {
    let stripped = triple.stripped_matrix();
    let n = stripped.size();
    let mut values: Vec<i64> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = stripped.get(i, j);
            if v != 0 && !values.contains(&v) {
                values.push(v);
            }
        }
    }
    values.sort_unstable();

    let mut per_cycle = Vec::new();
    let mut aggregate = 0i64;
    for b in triple.covering.branch_points() {
        for cycle in b.perm.cycles() {
            let l = cycle.len();
            let mut sets: Vec<(i64, Vec<usize>)> = Vec::new();
            for &s in &values {
                let ts: Vec<usize> = (1..l)
                    .filter(|&t| {
                        (0..l).any(|pos| stripped.get(cycle[pos], cycle[(pos + t) % l]) == s)
                    })
                    .collect();
                if !ts.is_empty() {
                    aggregate += s * ts.len() as i64;
                    sets.push((s, ts));
                }
            }
            per_cycle.push(CycleFixedPoints {
                branch_label: b.label.clone(),
                cycle,
                order: l,
                sets,
            });
        }
    }
    let fixed_point_free = per_cycle.iter().all(|c| c.sets.is_empty());
    FixedPointReport { per_cycle, aggregate, fixed_point_free }
}

/// Dimension bookkeeping of the two eigenvalue projections.
#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub genus: i64,
    /// 1 iff k differs from both eigenvalues, else 0.
    pub eta: i64,
    pub d0: i64,
    pub s_diag: i64,
    pub d_plus: i64,
    pub d_minus: i64,
    /// `1 - r_minus`, present whenever r_plus = 1 (the candidate exponent of
    /// the plus projection); the Prym-Tyurin flag narrows this further.
    pub exponent: Option<i64>,
    pub prym_tyurin: bool,
    /// Intersection number of the diagonal-stripped correspondence with the
    /// diagonal.
    pub intersection: i64,
    pub fixed_point_free: bool,
}

/// Computes `d±` from
/// `±(r± - r∓)·d± = (k - r±)·η·d0 + (r± - s_diag)·g - k + s_diag + ½·I`,
/// with `I` the stripped fixed-point aggregate. For m = 1 the input d0 must
/// be 0; for m ≥ 2 it is caller-supplied (see the splitting analysis).
pub fn dimensions(triple: &PrymTriple, d0: i64) -> Result<DimensionReport, PrymError> {
    if triple.m == 1 && d0 != 0 {
        return Err(PrymError::InvalidParameter(
            "d0 must be 0 for an unrepeated matrix part".into(),
        ));
    }
    if d0 < 0 {
        return Err(PrymError::InvalidParameter("d0 must be non-negative".into()));
    }
    let g = genus(&triple.covering);
    let k = triple.certificate.k;
    let r_plus = triple.certificate.r_plus;
    let r_minus = triple.certificate.r_minus;
    let s_diag = triple.s_diag();
    let eta = i64::from(k != r_plus && k != r_minus);
    let fixed = fixed_point_analysis(triple);
    let intersection = fixed.aggregate;

    let gap = r_plus - r_minus;
    // Both sides doubled to keep the ½·I term integral.
    let num_plus = 2 * ((k - r_plus) * eta * d0 + (r_plus - s_diag) * g - k + s_diag)
        + intersection;
    let num_minus = 2 * ((k - r_minus) * eta * d0 + (r_minus - s_diag) * g - k + s_diag)
        + intersection;
    if num_plus % (2 * gap) != 0 {
        return Err(PrymError::NonIntegerDimension(format!(
            "2(r+ - r-)·dPlus = {num_plus} is not divisible by {}",
            2 * gap
        )));
    }
    if num_minus % (2 * gap) != 0 {
        return Err(PrymError::NonIntegerDimension(format!(
            "2(r+ - r-)·dMinus = {} is not divisible by {}",
            -num_minus,
            2 * gap
        )));
    }
    let d_plus = num_plus / (2 * gap);
    let d_minus = -num_minus / (2 * gap);
    if d_plus < 0 {
        return Err(PrymError::NegativeDimension(format!("dPlus = {d_plus}")));
    }
    if d_minus < 0 {
        return Err(PrymError::NegativeDimension(format!("dMinus = {d_minus}")));
    }
    assert_eq!(d_plus + d_minus + eta * d0, g, "dimension sum identity must hold");

    // The flag follows the full criterion: unrepeated, zero diagonal,
    // fixed-point-free, r+ = 1; the exponent value is reported for any
    // r+ = 1 correspondence.
    let prym_tyurin =
        triple.m == 1 && r_plus == 1 && s_diag == 0 && fixed.fixed_point_free;
    let exponent = if r_plus == 1 { Some(1 - r_minus) } else { None };
    Ok(DimensionReport {
        genus: g,
        eta,
        d0,
        s_diag,
        d_plus,
        d_minus,
        exponent,
        prym_tyurin,
        intersection,
        fixed_point_free: fixed.fixed_point_free,
    })
}

/// The triple over the complement graph with the eigenvalue tag flipped
/// (the tagged value r maps to -r-1 on the complement side); the covering is
/// unchanged and the result is fully re-verified.
pub fn complement_dual(triple: &PrymTriple) -> Result<PrymTriple, PrymError> {
    if triple.m != 1 {
        return Err(PrymError::InvalidParameter(
            "complement dual requires an unrepeated matrix part".into(),
        ));
    }
    if !triple.repeated.is_binary_with_zero_diagonal() {
        return Err(PrymError::InvalidParameter(
            "complement dual requires a 0/1 matrix with zero diagonal".into(),
        ));
    }
    let complement = PrymGraph {
        label: format!("complement({})", triple.base.label),
        matrix: triple.base.matrix.binary_complement(),
        vertex_labels: triple.base.vertex_labels.clone(),
        generators: triple.base.generators.clone(),
    };
    let certificate = certify_prym(&complement.matrix, &complement.generators)?;
    assert_eq!(
        (certificate.r_plus, certificate.r_minus),
        (-triple.certificate.r_minus - 1, -triple.certificate.r_plus - 1),
        "complement eigenvalues must be the reflected pair"
    );
    build_triple(complement, certificate, 1, triple.tag.flip(), triple.covering.clone())
}
