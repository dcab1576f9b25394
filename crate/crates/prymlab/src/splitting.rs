//! Two-step decompositions of block coverings: canonical splitting into a
//! relative cover over a block quotient, tower composition and simplicity
//! detection, the nine-point lattice/complement conversion, fiber-product
//! analysis of product monodromy, and the pair-covering construction over a
//! two-block tower.

use num_bigint::BigUint;
use thiserror::Error;

use crate::coverings::{genus, validate_covering, BranchPoint, CoveringData, CoveringError};
use crate::graphs::{
    certify_prym, complete_graph_union, exact_sqrt, lattice_complement, lattice_graph,
    pair_permutation, GraphError, IntMatrix,
};
use crate::permgroups::{PermError, PermGroup, Permutation};
use crate::prym::{
    build_triple, dimensions, fixed_point_analysis, EigenvalueTag, PrymError, PrymTriple,
};

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("splitting requires a 0/1 base matrix with zero diagonal")]
    NotBinary,
    #[error("splitting requires a connected base graph")]
    BaseDisconnected,
    #[error("splitting requires at least two blocks, got m = {m}")]
    SingleBlock { m: usize },
    #[error("branch point {label} does not permute the blocks setwise")]
    BlockActionBroken { label: String },
    #[error("the blocks are not complete graphs, so the classical reduction does not apply")]
    NotCompleteBlocks,
    #[error("quotient genus {quotient} exceeds the total genus {total}")]
    GenusOrder { total: i64, quotient: i64 },
    #[error("tower requires block size >= 2 and block count >= 2, got size {d}, count {m}")]
    TowerTooSmall { d: usize, m: usize },
    #[error("tower branch point {label} has degree {got}, expected {expected}")]
    TowerDegree { label: String, expected: usize, got: usize },
    #[error("tower branch point {label} does not permute the blocks setwise")]
    TowerBlockBroken { label: String },
    #[error("tower branch point {label} is tagged '{tagged}' but its block action is {actual}")]
    TowerKindMismatch { label: String, tagged: &'static str, actual: &'static str },
    #[error("pair covering requires two blocks of size three, got size {d}, count {m}")]
    NotPairShape { d: usize, m: usize },
    #[error("branch point {label} ramifies the relative covering")]
    RelativeRamification { label: String },
    #[error("triple is not defined over {expected}")]
    WrongBase { expected: &'static str },
    #[error("the operation requires a single-copy triple (m = 1)")]
    RequiresSingleCopy,
    #[error("branch point {label} does not exchange the two coordinate roles")]
    NotCoordinateExchange { label: String },
    #[error("branch point {label} is not a one-sided transposition")]
    NotOneSidedTransposition { label: String },
    #[error(
        "branch points split into {first} first-side and {second} second-side transpositions, \
         which do not pair into levels"
    )]
    UnbalancedSides { first: usize, second: usize },
    #[error("monodromy group has order {got}, expected the full product order {expected}")]
    NotFullProduct { expected: BigUint, got: BigUint },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Prym(#[from] PrymError),
}

/// The canonical two-step decomposition of a repeated-block triple: the block
/// partition, the induced covering on blocks, and the bookkeeping that the
/// relative level needs.
#[derive(Clone, Debug)]
pub struct SplitResult {
    /// Connected components of the repeated matrix, each ascending and
    /// ordered by least member; block `b` is exactly `b*d..(b+1)*d`.
    pub blocks: Vec<Vec<usize>>,
    /// Size of every block; the degree of the relative covering.
    pub relative_degree: usize,
    /// The induced covering on blocks (branch points with trivial block
    /// action drop out).
    pub block_covering: CoveringData,
    /// Genus of the intermediate curve, from the block covering.
    pub genus_quotient: i64,
    /// True when every branch permutation is a simple branch of exactly one
    /// of the two levels.
    pub simple: bool,
    /// True when each block induces a complete graph, i.e. the repeated
    /// matrix is a disjoint union of complete blocks.
    pub complete_blocks: bool,
}

/// Connected components of the graph with an edge wherever the matrix entry
/// is non-zero, each sorted ascending and ordered by least member.
fn connected_components(matrix: &IntMatrix) -> Vec<Vec<usize>> {
    let n = matrix.size();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut queue = vec![start];
        let mut component = Vec::new();
        seen[start] = true;
        while let Some(v) = queue.pop() {
            component.push(v);
            for w in 0..n {
                if !seen[w] && v != w && matrix.get(v, w) != 0 {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    components
}

/// The permutation induced on consecutive blocks of size `d`, or None when
/// some block is not mapped onto a block.
fn block_action(perm: &Permutation, d: usize, m: usize) -> Option<Permutation> {
    let mut images = vec![0usize; m];
    for (b, image) in images.iter_mut().enumerate() {
        let target = perm.apply(b * d) / d;
        for x in b * d..(b + 1) * d {
            if perm.apply(x) / d != target {
                return None;
            }
        }
        *image = target;
    }
    Permutation::from_images(images).ok()
}

/// Walks one cycle of `perm` through `point` and returns its length.
fn cycle_length_through(perm: &Permutation, point: usize) -> usize {
    let mut len = 1;
    let mut x = perm.apply(point);
    while x != point {
        x = perm.apply(x);
        len += 1;
    }
    len
}

/// Total relative ramification of one branch permutation: each composite
/// cycle of length L over a block cycle of length L' contributes L/L' - 1.
fn relative_ramification(perm: &Permutation, block_perm: &Permutation, d: usize) -> i64 {
    let mut total = 0i64;
    for cycle in perm.cycles() {
        let len = cycle.len() as i64;
        let block_len = cycle_length_through(block_perm, cycle[0] / d) as i64;
        assert_eq!(len % block_len, 0, "composite cycles project onto block cycles");
        total += len / block_len - 1;
    }
    total
}

/// True when the branch permutation is a simple branch of exactly one level:
/// either a block transposition realized by disjoint 2-cycles pairing the two
/// blocks with everything else fixed, or a single 2-cycle inside one block.
fn simple_branch(perm: &Permutation, block_perm: &Permutation, blocks: &[Vec<usize>]) -> bool {
    let d = blocks[0].len();
    let moved_blocks = block_perm.moved_points();
    if moved_blocks.is_empty() {
        return perm.moved_points().len() == 2;
    }
    if moved_blocks.len() != 2 {
        return false;
    }
    let (b1, b2) = (moved_blocks[0], moved_blocks[1]);
    if perm.moved_points().len() != 2 * d {
        return false;
    }
    blocks[b1].iter().all(|&x| {
        let y = perm.apply(x);
        y / d == b2 && perm.apply(y) == x
    })
}

/// Decomposes a repeated-block triple into its block quotient covering and
/// relative level. The blocks are computed as connected components, every
/// branch permutation is checked to permute them, and the genus of the
/// composite is re-derived through the two-step bookkeeping as a self-check.
pub fn canonical_split(triple: &PrymTriple) -> Result<SplitResult, SplitError> {
    let base = &triple.base().matrix;
    if !base.is_binary_with_zero_diagonal() {
        return Err(SplitError::NotBinary);
    }
    if connected_components(base).len() != 1 {
        return Err(SplitError::BaseDisconnected);
    }
    let m = triple.m();
    if m < 2 {
        return Err(SplitError::SingleBlock { m });
    }
    let d = base.size();
    let blocks = connected_components(triple.repeated_matrix());
    assert_eq!(blocks.len(), m, "a connected base repeats into m components");
    for (b, block) in blocks.iter().enumerate() {
        assert!(
            block.iter().copied().eq(b * d..(b + 1) * d),
            "components of a repeated matrix are consecutive blocks"
        );
    }

    let branch = triple.covering().branch_points();
    let mut induced = Vec::with_capacity(branch.len());
    for bp in branch {
        let action = block_action(&bp.perm, d, m)
            .ok_or_else(|| SplitError::BlockActionBroken { label: bp.label.clone() })?;
        induced.push(action);
    }
    let kept: Vec<BranchPoint> = branch
        .iter()
        .zip(&induced)
        .filter(|(_, action)| !action.is_identity())
        .map(|(bp, action)| BranchPoint::new(bp.label.clone(), action.clone()))
        .collect();
    let block_covering = validate_covering(m, kept)?;
    let genus_quotient = genus(&block_covering);

    let total_genus = genus(triple.covering());
    let relative: i64 = branch
        .iter()
        .zip(&induced)
        .map(|(bp, action)| relative_ramification(&bp.perm, action, d))
        .sum();
    assert_eq!(
        2 * total_genus - 2,
        d as i64 * (2 * genus_quotient - 2) + relative,
        "direct genus matches the two-step bookkeeping"
    );

    let simple = branch
        .iter()
        .zip(&induced)
        .all(|(bp, action)| simple_branch(&bp.perm, action, &blocks));
    let complete_blocks =
        (0..d).all(|i| (0..d).all(|j| i == j || base.get(i, j) == 1));

    Ok(SplitResult {
        blocks,
        relative_degree: d,
        block_covering,
        genus_quotient,
        simple,
        complete_blocks,
    })
}

/// True when every branch permutation of the triple is a simple branch of
/// exactly one level of the split.
pub fn is_simple_split(split: &SplitResult, triple: &PrymTriple) -> bool {
    let d = split.relative_degree;
    let m = split.blocks.len();
    triple.covering().branch_points().iter().all(|bp| {
        block_action(&bp.perm, d, m)
            .map(|action| simple_branch(&bp.perm, &action, &split.blocks))
            .unwrap_or(false)
    })
}

/// Dimension pair of the two summands when the blocks are complete graphs:
/// the minus part is the pull-back of the quotient curve, so its dimension is
/// the quotient genus, and the plus part carries the rest.
pub fn classical_prym_dims(
    split: &SplitResult,
    genus_total: i64,
) -> Result<(i64, i64), SplitError> {
    if !split.complete_blocks {
        return Err(SplitError::NotCompleteBlocks);
    }
    let d_minus = split.genus_quotient;
    let d_plus = genus_total - d_minus;
    if d_plus < 0 {
        return Err(SplitError::GenusOrder { total: genus_total, quotient: d_minus });
    }
    Ok((d_plus, d_minus))
}

/// Whether a tower branch point moves blocks or acts inside them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerBranchKind {
    Block,
    Inner,
}

impl TowerBranchKind {
    pub fn name(self) -> &'static str {
        match self {
            TowerBranchKind::Block => "block",
            TowerBranchKind::Inner => "inner",
        }
    }
}

/// A branch point of a two-step tower: a composite permutation of degree
/// `m*d` tagged by whether it moves blocks.
#[derive(Clone, Debug)]
pub struct TowerBranchPoint {
    pub label: String,
    pub kind: TowerBranchKind,
    pub perm: Permutation,
}

impl TowerBranchPoint {
    pub fn new(label: impl Into<String>, kind: TowerBranchKind, perm: Permutation) -> Self {
        TowerBranchPoint { label: label.into(), kind, perm }
    }
}

/// Monodromy of a two-step tower over `m` consecutive blocks of size `d`.
/// Construction validates block sizes, that every permutation permutes the
/// blocks, that the kind tags match the computed block action, and that the
/// composite is a valid covering of degree `m*d`.
#[derive(Clone, Debug)]
pub struct TowerSpec {
    d: usize,
    m: usize,
    branch: Vec<TowerBranchPoint>,
}

impl TowerSpec {
    pub fn new(d: usize, m: usize, branch: Vec<TowerBranchPoint>) -> Result<Self, SplitError> {
        if d < 2 || m < 2 {
            return Err(SplitError::TowerTooSmall { d, m });
        }
        for bp in &branch {
            if bp.perm.degree() != m * d {
                return Err(SplitError::TowerDegree {
                    label: bp.label.clone(),
                    expected: m * d,
                    got: bp.perm.degree(),
                });
            }
            let action = block_action(&bp.perm, d, m)
                .ok_or_else(|| SplitError::TowerBlockBroken { label: bp.label.clone() })?;
            let actual =
                if action.is_identity() { TowerBranchKind::Inner } else { TowerBranchKind::Block };
            if actual != bp.kind {
                return Err(SplitError::TowerKindMismatch {
                    label: bp.label.clone(),
                    tagged: bp.kind.name(),
                    actual: actual.name(),
                });
            }
        }
        let spec = TowerSpec { d, m, branch };
        spec.composite_covering()?;
        Ok(spec)
    }

    pub fn block_size(&self) -> usize {
        self.d
    }

    pub fn block_count(&self) -> usize {
        self.m
    }

    pub fn branch_points(&self) -> &[TowerBranchPoint] {
        &self.branch
    }

    /// The composite covering of degree `m*d`.
    pub fn composite_covering(&self) -> Result<CoveringData, SplitError> {
        let branch = self
            .branch
            .iter()
            .map(|bp| BranchPoint::new(bp.label.clone(), bp.perm.clone()))
            .collect();
        Ok(validate_covering(self.m * self.d, branch)?)
    }
}

/// Rebuilds a tower from a composite covering by computing each branch
/// point's block action and tagging it accordingly.
pub fn tower_from_composite(
    d: usize,
    m: usize,
    covering: &CoveringData,
) -> Result<TowerSpec, SplitError> {
    let mut branch = Vec::new();
    for bp in covering.branch_points() {
        let action = block_action(&bp.perm, d, m)
            .ok_or_else(|| SplitError::TowerBlockBroken { label: bp.label.clone() })?;
        let kind =
            if action.is_identity() { TowerBranchKind::Inner } else { TowerBranchKind::Block };
        branch.push(TowerBranchPoint::new(bp.label.clone(), kind, bp.perm.clone()));
    }
    TowerSpec::new(d, m, branch)
}

/// Builds the complete-blocks triple whose covering is the tower composite.
/// The split of the result recovers the tower: blocks are the consecutive
/// components and the block covering is the tagged block action.
pub fn from_tower(tower: &TowerSpec) -> Result<PrymTriple, SplitError> {
    let base = complete_graph_union(1, tower.block_size() - 1)?;
    let certificate = certify_prym(&base.matrix, &base.generators)?;
    let covering = tower.composite_covering()?;
    Ok(build_triple(base, certificate, tower.block_count(), EigenvalueTag::Plus, covering)?)
}

/// The automorphism of the n-by-n lattice (and of its complement) that
/// exchanges the two coordinates after a paired relabelling:
/// `(i, j) -> (tau(j), tau_inv(i))`. The relabelling `tau` is selected by
/// `h`: 0 the identity, 1 swaps the first and last labels, 2 swaps the second
/// and last, 3 shifts cyclically.
pub fn lattice_reflection(n: usize, h: usize) -> Permutation {
    assert!(n >= 2 && h <= 3, "reflection wants n >= 2 and h in 0..=3");
    let tau: Vec<usize> = match h {
        0 => (0..n).collect(),
        1 => (0..n).map(|x| if x == 0 { n - 1 } else if x == n - 1 { 0 } else { x }).collect(),
        2 => (0..n).map(|x| if x == 1 { n - 1 } else if x == n - 1 { 1 } else { x }).collect(),
        _ => (0..n).map(|x| (x + 1) % n).collect(),
    };
    let mut tau_inv = vec![0usize; n];
    for (x, &img) in tau.iter().enumerate() {
        tau_inv[img] = x;
    }
    pair_permutation(n, |i, j| (tau[j], tau_inv[i]))
}

/// The automorphism acting on one coordinate of the n-by-n lattice by the
/// transposition of the first and the (h+1)-st label, identity on the other
/// coordinate. `side` 1 acts on the first coordinate, `side` 2 on the second.
pub fn side_transposition(n: usize, side: usize, h: usize) -> Permutation {
    assert!(n >= 2 && (side == 1 || side == 2) && h >= 1 && h < n, "side transposition range");
    let swap = move |x: usize| {
        if x == 0 {
            h
        } else if x == h {
            0
        } else {
            x
        }
    };
    if side == 1 {
        pair_permutation(n, |i, j| (swap(i), j))
    } else {
        pair_permutation(n, |i, j| (i, swap(j)))
    }
}

/// The nine-point permutation carrying 3x3-lattice adjacency to complement
/// adjacency: `(i, j) -> (i - j, i + j)` on 1-based residues modulo 3 with
/// residue 0 read as 3, in the row-major pair convention. The adjacency
/// transport is recomputed on every call, so the value is always a verified
/// isomorphism.
pub fn lattice_complement_isomorphism() -> Permutation {
    let lift = |r: i64| -> usize {
        if r == 0 {
            3
        } else {
            r as usize
        }
    };
    let xi = pair_permutation(3, |a, b| {
        let (i, j) = (a as i64 + 1, b as i64 + 1);
        (lift((i - j).rem_euclid(3)) - 1, lift((i + j).rem_euclid(3)) - 1)
    });
    let lattice = lattice_graph(3).expect("3 is a valid lattice size");
    let complement = lattice_complement(3).expect("3 is a valid lattice size");
    for u in 0..9 {
        for v in 0..9 {
            assert_eq!(
                lattice.matrix.get(u, v),
                complement.matrix.get(xi.apply(u), xi.apply(v)),
                "adjacency transport at ({u}, {v})"
            );
        }
    }
    xi
}

/// Splits a pair permutation into independent coordinate actions when it has
/// the product form `(i, j) -> (x(i), y(j))`.
fn product_action(perm: &Permutation, n: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let x: Vec<usize> = (0..n).map(|i| perm.apply(i * n) / n).collect();
    let y: Vec<usize> = (0..n).map(|j| perm.apply(j) % n).collect();
    for i in 0..n {
        for j in 0..n {
            if perm.apply(i * n + j) != x[i] * n + y[j] {
                return None;
            }
        }
    }
    Some((x, y))
}

/// Extracts the relabelling `a` when the permutation exchanges coordinate
/// roles as `(s, t) -> (a_inv(t), a(s))`.
fn exchange_action(perm: &Permutation, n: usize) -> Option<Vec<usize>> {
    let a: Vec<usize> = (0..n).map(|s| perm.apply(s * n) % n).collect();
    let a_inv: Vec<usize> = (0..n).map(|t| perm.apply(t) / n).collect();
    for s in 0..n {
        if a[s] >= n || a_inv[s] >= n || a_inv[a[s]] != s {
            return None;
        }
    }
    for s in 0..n {
        for t in 0..n {
            if perm.apply(s * n + t) != a_inv[t] * n + a[s] {
                return None;
            }
        }
    }
    Some(a)
}

fn is_transposition(images: &[usize]) -> bool {
    images.iter().enumerate().filter(|&(x, &img)| x != img).count() == 2
}

enum Side {
    First(Permutation),
    Second(Permutation),
}

/// Classifies a pair permutation as a transposition on exactly one
/// coordinate and returns that coordinate action.
fn one_sided_transposition(perm: &Permutation, n: usize) -> Option<Side> {
    let (x, y) = product_action(perm, n)?;
    let x_moves = is_transposition(&x);
    let y_moves = is_transposition(&y);
    let x_id = x.iter().enumerate().all(|(v, &img)| v == img);
    let y_id = y.iter().enumerate().all(|(v, &img)| v == img);
    if x_moves && y_id {
        return Some(Side::First(Permutation::from_images(x).expect("extracted action")));
    }
    if y_moves && x_id {
        return Some(Side::Second(Permutation::from_images(y).expect("extracted action")));
    }
    None
}

/// Rechecks the four generator identities behind the nine-point conversion:
/// conjugating the one-sided transpositions back through the isomorphism
/// lands on the coordinate-exchange generators and their conjugates.
fn verify_conversion_table() {
    let xi = lattice_complement_isomorphism();
    let phi: Vec<Permutation> = (0..4).map(|h| lattice_reflection(3, h)).collect();
    let pull = |s: Permutation| s.conjugated_by(&xi);
    assert_eq!(pull(side_transposition(3, 1, 1)), phi[0]);
    assert_eq!(pull(side_transposition(3, 1, 2)), phi[3].conjugated_by(&phi[0].inverse()));
    assert_eq!(pull(side_transposition(3, 2, 1)), phi[2].conjugated_by(&phi[1].inverse()));
    assert_eq!(pull(side_transposition(3, 2, 2)), phi[2]);
}

fn require_nine_point_base(triple: &PrymTriple, complement: bool) -> Result<(), SplitError> {
    if triple.m() != 1 {
        return Err(SplitError::RequiresSingleCopy);
    }
    let (expected, name) = if complement {
        (lattice_complement(3)?, "the complement of the 3x3 lattice")
    } else {
        (lattice_graph(3)?, "the 3x3 lattice")
    };
    if triple.base().matrix.rows() != expected.matrix.rows() {
        return Err(SplitError::WrongBase { expected: name });
    }
    Ok(())
}

/// Counts paired one-sided transpositions per coordinate and converts the
/// counts to levels: a side with `2(level + n - 1)` branch points carries
/// `level`.
fn level_split(branch: &[BranchPoint], n: usize) -> Result<(usize, usize), SplitError> {
    let mut first = 0usize;
    let mut second = 0usize;
    for bp in branch {
        match one_sided_transposition(&bp.perm, n) {
            Some(Side::First(_)) => first += 1,
            Some(Side::Second(_)) => second += 1,
            None => {
                return Err(SplitError::NotOneSidedTransposition { label: bp.label.clone() })
            }
        }
    }
    let base = n - 1;
    if first % 2 != 0 || second % 2 != 0 || first / 2 < base || second / 2 < base {
        return Err(SplitError::UnbalancedSides { first, second });
    }
    Ok((first / 2 - base, second / 2 - base))
}

/// A converted triple together with the level split read off from its
/// one-sided branch points.
#[derive(Clone, Debug)]
pub struct ConversionReport {
    pub triple: PrymTriple,
    /// Levels carried by first-coordinate transpositions.
    pub l1: usize,
    /// Levels carried by second-coordinate transpositions.
    pub l2: usize,
}

fn assert_conversion_invariants(from: &PrymTriple, to: &PrymTriple) -> Result<(), SplitError> {
    let before = dimensions(from, 0)?;
    let after = dimensions(to, 0)?;
    assert_eq!(before.genus, after.genus, "conversion preserves the genus");
    assert_eq!(before.d_plus, after.d_plus, "conversion preserves the plus dimension");
    assert_eq!(before.d_minus, after.d_minus, "conversion preserves the minus dimension");
    assert_eq!(
        fixed_point_analysis(from).fixed_point_free,
        fixed_point_analysis(to).fixed_point_free,
        "conversion preserves fixed-point freeness"
    );
    Ok(())
}

/// Converts a coordinate-exchange triple over the 3x3 lattice into a triple
/// over the complement by conjugating every branch permutation through the
/// nine-point isomorphism, and reads off the level split of the result.
pub fn convert_to_complement(triple: &PrymTriple) -> Result<ConversionReport, SplitError> {
    require_nine_point_base(triple, false)?;
    verify_conversion_table();
    let xi_inv = lattice_complement_isomorphism().inverse();
    let mut branch = Vec::new();
    for bp in triple.covering().branch_points() {
        if exchange_action(&bp.perm, 3).is_none() {
            return Err(SplitError::NotCoordinateExchange { label: bp.label.clone() });
        }
        branch.push(BranchPoint::new(bp.label.clone(), bp.perm.conjugated_by(&xi_inv)));
    }
    let (l1, l2) = level_split(&branch, 3)?;
    let base = lattice_complement(3)?;
    let certificate = certify_prym(&base.matrix, &base.generators)?;
    let covering = validate_covering(9, branch)?;
    let converted = build_triple(base, certificate, 1, triple.tag(), covering)?;
    assert_conversion_invariants(triple, &converted)?;
    Ok(ConversionReport { triple: converted, l1, l2 })
}

/// Converts a one-sided-transposition triple over the complement of the 3x3
/// lattice back into a coordinate-exchange triple over the lattice. Inverse
/// of [`convert_to_complement`].
pub fn convert_to_lattice(triple: &PrymTriple) -> Result<PrymTriple, SplitError> {
    require_nine_point_base(triple, true)?;
    verify_conversion_table();
    let xi = lattice_complement_isomorphism();
    let mut branch = Vec::new();
    for bp in triple.covering().branch_points() {
        if one_sided_transposition(&bp.perm, 3).is_none() {
            return Err(SplitError::NotOneSidedTransposition { label: bp.label.clone() });
        }
        let converted = bp.perm.conjugated_by(&xi);
        assert!(
            exchange_action(&converted, 3).is_some(),
            "one-sided transpositions convert to coordinate exchanges"
        );
        branch.push(BranchPoint::new(bp.label.clone(), converted));
    }
    let base = lattice_graph(3)?;
    let certificate = certify_prym(&base.matrix, &base.generators)?;
    let covering = validate_covering(9, branch)?;
    let converted = build_triple(base, certificate, 1, triple.tag(), covering)?;
    assert_conversion_invariants(triple, &converted)?;
    Ok(converted)
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k))
}

/// Generators of the subgroup whose chosen coordinate action fixes the first
/// label, computed from a transversal of the coordinate action.
fn coordinate_stabilizer(
    group: &PermGroup,
    n: usize,
    first_side: bool,
) -> Result<PermGroup, SplitError> {
    let side_image = |p: &Permutation, v: usize| {
        if first_side {
            p.apply(v * n) / n
        } else {
            p.apply(v) % n
        }
    };
    let mut reps: Vec<Option<Permutation>> = vec![None; n];
    reps[0] = Some(Permutation::identity(n * n));
    let mut queue = vec![0usize];
    while let Some(v) = queue.pop() {
        let t = reps[v].clone().expect("queued labels have representatives");
        for g in group.generators() {
            let w = side_image(g, v);
            if reps[w].is_none() {
                reps[w] = Some(t.compose(g));
                queue.push(w);
            }
        }
    }
    let reps: Vec<Permutation> = reps
        .into_iter()
        .map(|r| r.expect("the coordinate action is transitive"))
        .collect();
    let mut gens = Vec::new();
    for t in &reps {
        for g in group.generators() {
            let u = t.compose(g);
            let w = side_image(&u, 0);
            let s = u.compose(&reps[w].inverse());
            if !s.is_identity() {
                gens.push(s);
            }
        }
    }
    gens.sort();
    gens.dedup();
    Ok(PermGroup::new(n * n, gens)?)
}

/// Group-certified decomposition of a product-monodromy triple into its two
/// coordinate coverings.
#[derive(Clone, Debug)]
pub struct FiberProductReport {
    /// Covering induced on the first coordinate.
    pub first: CoveringData,
    /// Covering induced on the second coordinate.
    pub second: CoveringData,
    pub genus_first: i64,
    pub genus_second: i64,
    pub order_monodromy: BigUint,
    pub order_first: BigUint,
    pub order_second: BigUint,
    pub order_intersection: BigUint,
    /// Certificate: the two coordinate stabilizers intersect in exactly the
    /// stabilizer of the base point.
    pub intersection_is_point_stabilizer: bool,
    /// Certificate: the two coordinate stabilizers generate the monodromy.
    pub join_is_monodromy: bool,
    /// Plus dimension of the triple.
    pub d_plus: i64,
    /// The plus dimension equals the sum of the two coordinate genera.
    pub d_plus_matches: bool,
}

/// Splits a triple over the complement of a square lattice whose branch
/// permutations are one-sided transpositions into its two coordinate
/// coverings, with group-theoretic certificates for the decomposition.
pub fn analyze_fiber_product(triple: &PrymTriple) -> Result<FiberProductReport, SplitError> {
    if triple.m() != 1 {
        return Err(SplitError::RequiresSingleCopy);
    }
    let d = triple.base().matrix.size();
    let n = exact_sqrt(d as i64)
        .filter(|&n| n >= 3)
        .ok_or(SplitError::WrongBase { expected: "the complement of a square lattice" })?
        as usize;
    let expected = lattice_complement(n)?;
    if triple.base().matrix.rows() != expected.matrix.rows() {
        return Err(SplitError::WrongBase { expected: "the complement of a square lattice" });
    }

    let mut first_branch = Vec::new();
    let mut second_branch = Vec::new();
    for bp in triple.covering().branch_points() {
        match one_sided_transposition(&bp.perm, n) {
            Some(Side::First(p)) => first_branch.push(BranchPoint::new(bp.label.clone(), p)),
            Some(Side::Second(p)) => second_branch.push(BranchPoint::new(bp.label.clone(), p)),
            None => {
                return Err(SplitError::NotOneSidedTransposition { label: bp.label.clone() })
            }
        }
    }
    let first = validate_covering(n, first_branch)?;
    let second = validate_covering(n, second_branch)?;
    let genus_first = genus(&first);
    let genus_second = genus(&second);

    let group = triple.covering().monodromy_group();
    let order_monodromy = group.order();
    let full = factorial(n) * factorial(n);
    if order_monodromy != full {
        return Err(SplitError::NotFullProduct { expected: full, got: order_monodromy });
    }

    let sub_first = coordinate_stabilizer(&group, n, true)?;
    let sub_second = coordinate_stabilizer(&group, n, false)?;
    let order_first = sub_first.order();
    let order_second = sub_second.order();
    assert_eq!(&order_first * n as u64, order_monodromy, "first stabilizer has index n");
    assert_eq!(&order_second * n as u64, order_monodromy, "second stabilizer has index n");

    let stabilizer = group.stabilizer(0);
    let order_intersection = stabilizer.order();
    let intersection_is_point_stabilizer = sub_first.is_subgroup(&stabilizer)
        && sub_second.is_subgroup(&stabilizer)
        && &order_intersection * (n * n) as u64 == order_monodromy;
    assert!(intersection_is_point_stabilizer, "stabilizers intersect in the point stabilizer");

    let mut join_gens = sub_first.generators().to_vec();
    join_gens.extend_from_slice(sub_second.generators());
    let join = PermGroup::new(n * n, join_gens)?;
    let join_is_monodromy = join.order() == order_monodromy;
    assert!(join_is_monodromy, "coordinate stabilizers generate the monodromy");

    let dims = dimensions(triple, 0)?;
    let d_plus_matches = dims.d_plus == genus_first + genus_second;
    assert!(d_plus_matches, "plus dimension splits into the two coordinate genera");

    Ok(FiberProductReport {
        first,
        second,
        genus_first,
        genus_second,
        order_monodromy,
        order_first,
        order_second,
        order_intersection,
        intersection_is_point_stabilizer,
        join_is_monodromy,
        d_plus: dims.d_plus,
        d_plus_matches,
    })
}

/// Builds the nine-point pair covering of a two-block tower with blocks of
/// size three and no relative ramification: a loop pairing the two sides by
/// the relabelling `a` sends the pair `(s, t)` to `(a_inv(t), a(s))`.
pub fn pair_covering_from_tower(tower: &TowerSpec) -> Result<CoveringData, SplitError> {
    if tower.block_size() != 3 || tower.block_count() != 2 {
        return Err(SplitError::NotPairShape {
            d: tower.block_size(),
            m: tower.block_count(),
        });
    }
    let mut branch = Vec::new();
    for bp in tower.branch_points() {
        if bp.kind != TowerBranchKind::Block || !bp.perm.compose(&bp.perm).is_identity() {
            return Err(SplitError::RelativeRamification { label: bp.label.clone() });
        }
        let a: Vec<usize> = (0..3).map(|i| bp.perm.apply(i) - 3).collect();
        let mut a_inv = vec![0usize; 3];
        for (i, &img) in a.iter().enumerate() {
            a_inv[img] = i;
        }
        let images: Vec<usize> = (0..9).map(|p| a_inv[p % 3] * 3 + a[p / 3]).collect();
        branch.push(BranchPoint::new(bp.label.clone(), Permutation::from_images(images)?));
    }
    let covering = validate_covering(9, branch)?;
    let order: u64 = covering
        .monodromy_group()
        .order()
        .try_into()
        .expect("nine-point monodromy order fits in u64");
    assert_eq!(72 % order, 0, "pair monodromy embeds in the 72-element exchange closure");
    Ok(covering)
}

/// Recovers the two-block tower behind a coordinate-exchange triple over the
/// 3x3 lattice: each branch permutation `(s, t) -> (a_inv(t), a(s))` folds to
/// the six-point involution pairing the sides by `a`. Rebuilding the pair
/// covering from the result reproduces the input exactly, which is checked.
pub fn tower_from_pair_covering(triple: &PrymTriple) -> Result<TowerSpec, SplitError> {
    require_nine_point_base(triple, false)?;
    let mut branch = Vec::new();
    for bp in triple.covering().branch_points() {
        let a = exchange_action(&bp.perm, 3)
            .ok_or_else(|| SplitError::NotCoordinateExchange { label: bp.label.clone() })?;
        let mut images = vec![0usize; 6];
        for (i, &img) in a.iter().enumerate() {
            images[i] = 3 + img;
            images[3 + img] = i;
        }
        branch.push(TowerBranchPoint::new(
            bp.label.clone(),
            TowerBranchKind::Block,
            Permutation::from_images(images)?,
        ));
    }
    let tower = TowerSpec::new(3, 2, branch)?;
    let rebuilt = pair_covering_from_tower(&tower)?;
    for (orig, new) in triple.covering().branch_points().iter().zip(rebuilt.branch_points()) {
        assert_eq!(orig.label, new.label, "pair covering round-trip keeps labels");
        assert_eq!(orig.perm, new.perm, "pair covering round-trip keeps permutations");
    }
    Ok(tower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverings::genus;
    use crate::prym::fixed_point_analysis;

    fn transposition(degree: usize, a: usize, b: usize) -> Permutation {
        let mut images: Vec<usize> = (0..degree).collect();
        images.swap(a, b);
        Permutation::from_images(images).unwrap()
    }

    fn double_swap(degree: usize, pairs: &[(usize, usize)]) -> Permutation {
        let mut images: Vec<usize> = (0..degree).collect();
        for &(a, b) in pairs {
            images.swap(a, b);
        }
        Permutation::from_images(images).unwrap()
    }

    fn tower_points(
        kinds: &[(TowerBranchKind, Permutation)],
    ) -> Vec<TowerBranchPoint> {
        kinds
            .iter()
            .enumerate()
            .map(|(i, (kind, perm))| TowerBranchPoint::new(format!("b{}", i + 1), *kind, perm.clone()))
            .collect()
    }

    /// Tower with three complete pairs, ten block branch points, and four
    /// inner ones. Every closed-form value below is forced by the branch
    /// counts: ten block transpositions on three blocks give quotient genus
    /// 3, and the composite branch contributions give genus 7.
    fn mixed_tower() -> TowerSpec {
        let s12 = double_swap(6, &[(0, 2), (1, 3)]);
        let s13 = double_swap(6, &[(0, 4), (1, 5)]);
        let s23 = double_swap(6, &[(2, 4), (3, 5)]);
        let u1 = transposition(6, 0, 1);
        let u2 = transposition(6, 2, 3);
        let mut points = Vec::new();
        for p in [&s12, &s12, &s13, &s13, &s23, &s23, &s12, &s12, &s13, &s13] {
            points.push((TowerBranchKind::Block, (*p).clone()));
        }
        for p in [&u1, &u1, &u2, &u2] {
            points.push((TowerBranchKind::Inner, (*p).clone()));
        }
        TowerSpec::new(2, 3, tower_points(&points)).unwrap()
    }

    /// Tower with four complete pairs and eighteen block branch points, one
    /// of them twisted so the composite is connected; no inner points, so the
    /// relative double cover is unramified. Eighteen transpositions on four
    /// blocks force quotient genus 6 and composite genus 11.
    fn etale_tower() -> TowerSpec {
        let t12 = double_swap(8, &[(0, 3), (1, 2)]);
        let s12 = double_swap(8, &[(0, 2), (1, 3)]);
        let s13 = double_swap(8, &[(0, 4), (1, 5)]);
        let s14 = double_swap(8, &[(0, 6), (1, 7)]);
        let s23 = double_swap(8, &[(2, 4), (3, 5)]);
        let s24 = double_swap(8, &[(2, 6), (3, 7)]);
        let s34 = double_swap(8, &[(4, 6), (5, 7)]);
        let order = [
            &t12, &t12, &s12, &s12, &s13, &s13, &s13, &s13, &s14, &s14, &s23, &s23, &s24, &s24,
            &s34, &s34, &s34, &s34,
        ];
        let points: Vec<_> =
            order.iter().map(|p| (TowerBranchKind::Block, (**p).clone())).collect();
        TowerSpec::new(2, 4, tower_points(&points)).unwrap()
    }

    fn branch_pairs(perms: &[Permutation]) -> Vec<BranchPoint> {
        let mut branch = Vec::new();
        for (i, p) in perms.iter().enumerate() {
            branch.push(BranchPoint::new(format!("b{}", 2 * i + 1), p.clone()));
            branch.push(BranchPoint::new(format!("b{}", 2 * i + 2), p.clone()));
        }
        branch
    }

    /// Coordinate-exchange triple over the 3x3 lattice with the four
    /// exchange generators paired plus `extra` filler pairs of the plain
    /// exchange.
    fn exchange_triple(extra: usize) -> PrymTriple {
        let mut perms: Vec<Permutation> = (0..4).map(|h| lattice_reflection(3, h)).collect();
        for _ in 0..extra {
            perms.push(lattice_reflection(3, 0));
        }
        let base = lattice_graph(3).unwrap();
        let certificate = certify_prym(&base.matrix, &base.generators).unwrap();
        let covering = validate_covering(9, branch_pairs(&perms)).unwrap();
        build_triple(base, certificate, 1, EigenvalueTag::Plus, covering).unwrap()
    }

    /// One-sided-transposition triple over the complement of the n-by-n
    /// lattice: each side gets its n-1 generating transpositions paired, plus
    /// extra filler pairs of the first transposition per requested level.
    fn one_sided_triple(n: usize, l1: usize, l2: usize) -> PrymTriple {
        let mut perms = Vec::new();
        for h in 1..n {
            perms.push(side_transposition(n, 1, h));
        }
        for _ in 0..l1 {
            perms.push(side_transposition(n, 1, 1));
        }
        for h in 1..n {
            perms.push(side_transposition(n, 2, h));
        }
        for _ in 0..l2 {
            perms.push(side_transposition(n, 2, 1));
        }
        let base = lattice_complement(n).unwrap();
        let certificate = certify_prym(&base.matrix, &base.generators).unwrap();
        let covering = validate_covering(n * n, branch_pairs(&perms)).unwrap();
        build_triple(base, certificate, 1, EigenvalueTag::Plus, covering).unwrap()
    }

    #[test]
    fn mixed_tower_splits_into_expected_levels() {
        let tower = mixed_tower();
        let triple = from_tower(&tower).unwrap();
        let split = canonical_split(&triple).unwrap();
        assert_eq!(split.blocks.len(), 3);
        assert_eq!(split.relative_degree, 2);
        assert_eq!(split.blocks[1], vec![2, 3]);
        assert_eq!(split.block_covering.degree(), 3);
        assert_eq!(split.block_covering.branch_points().len(), 10);
        assert_eq!(split.genus_quotient, 3);
        assert!(split.simple);
        assert!(split.complete_blocks);
        assert_eq!(genus(triple.covering()), 7);
        assert_eq!(classical_prym_dims(&split, 7).unwrap(), (4, 3));
        assert!(is_simple_split(&split, &triple));
    }

    #[test]
    fn mixed_tower_dimension_formula_agrees_with_classical_values() {
        let tower = mixed_tower();
        let triple = from_tower(&tower).unwrap();
        let fixed = fixed_point_analysis(&triple);
        assert_eq!(fixed.aggregate, 4, "each inner 2-cycle meets one in-block edge");
        assert!(!fixed.fixed_point_free);
        let dims = dimensions(&triple, 3).unwrap();
        assert_eq!(dims.genus, 7);
        assert_eq!(dims.eta, 0, "the top row sum equals the plus eigenvalue");
        assert_eq!((dims.d_plus, dims.d_minus), (4, 3));
    }

    #[test]
    fn etale_tower_splits_into_expected_levels() {
        let tower = etale_tower();
        let triple = from_tower(&tower).unwrap();
        let split = canonical_split(&triple).unwrap();
        assert_eq!(split.blocks.len(), 4);
        assert_eq!(split.block_covering.branch_points().len(), 18);
        assert_eq!(split.genus_quotient, 6);
        assert!(split.simple);
        assert_eq!(genus(triple.covering()), 11);
        assert_eq!(classical_prym_dims(&split, 11).unwrap(), (5, 6));
        let fixed = fixed_point_analysis(&triple);
        assert!(fixed.fixed_point_free, "all branch 2-cycles pair distinct blocks");
        let dims = dimensions(&triple, 6).unwrap();
        assert_eq!((dims.d_plus, dims.d_minus), (5, 6));
    }

    #[test]
    fn split_recovers_tower_data() {
        for tower in [mixed_tower(), etale_tower()] {
            let triple = from_tower(&tower).unwrap();
            let split = canonical_split(&triple).unwrap();
            assert_eq!(split.relative_degree, tower.block_size());
            assert_eq!(split.blocks.len(), tower.block_count());
            let block_points: Vec<_> = tower
                .branch_points()
                .iter()
                .filter(|bp| bp.kind == TowerBranchKind::Block)
                .collect();
            assert_eq!(split.block_covering.branch_points().len(), block_points.len());
            for (got, want) in split.block_covering.branch_points().iter().zip(&block_points) {
                assert_eq!(got.label, want.label);
                let action =
                    block_action(&want.perm, tower.block_size(), tower.block_count()).unwrap();
                assert_eq!(got.perm, action);
            }
            let composite = tower.composite_covering().unwrap();
            for (got, want) in
                triple.covering().branch_points().iter().zip(composite.branch_points())
            {
                assert_eq!(got.label, want.label);
                assert_eq!(got.perm, want.perm);
            }
        }
    }

    #[test]
    fn lattice_block_triple_splits_but_is_not_classical() {
        let base = lattice_graph(3).unwrap();
        let certificate = certify_prym(&base.matrix, &base.generators).unwrap();
        let lift = |p: &Permutation| {
            let mut images: Vec<usize> = Vec::with_capacity(18);
            for b in 0..2 {
                for x in 0..9 {
                    images.push(b * 9 + p.apply(x));
                }
            }
            Permutation::from_images(images).unwrap()
        };
        let beta = Permutation::from_images((0..18).map(|x| (x + 9) % 18).collect()).unwrap();
        let mut perms: Vec<Permutation> =
            (0..4).map(|h| lift(&lattice_reflection(3, h))).collect();
        perms.push(beta);
        let covering = validate_covering(18, branch_pairs(&perms)).unwrap();
        let triple =
            build_triple(base, certificate, 2, EigenvalueTag::Plus, covering).unwrap();
        let split = canonical_split(&triple).unwrap();
        assert_eq!(split.blocks.len(), 2);
        assert_eq!(split.relative_degree, 9);
        assert_eq!(split.block_covering.branch_points().len(), 2);
        assert_eq!(split.genus_quotient, 0);
        assert!(!split.complete_blocks);
        assert!(!split.simple, "lifted exchanges move more than one pair");
        assert!(matches!(
            classical_prym_dims(&split, genus(triple.covering())),
            Err(SplitError::NotCompleteBlocks)
        ));
    }

    #[test]
    fn split_rejects_single_copy_and_bad_bases() {
        let triple = exchange_triple(0);
        assert!(matches!(canonical_split(&triple), Err(SplitError::SingleBlock { m: 1 })));

        let matrix = IntMatrix::from_rows(vec![vec![0, 2], vec![2, 0]]).unwrap();
        let gens = vec![transposition(2, 0, 1)];
        let certificate = certify_prym(&matrix, &gens).unwrap();
        let base = crate::graphs::PrymGraph {
            label: "weighted-edge".into(),
            matrix,
            vertex_labels: vec!["v0".into(), "v1".into()],
            generators: gens,
        };
        let straight = double_swap(4, &[(0, 2), (1, 3)]);
        let twisted = double_swap(4, &[(0, 3), (1, 2)]);
        let covering =
            validate_covering(4, branch_pairs(&[straight, twisted])).unwrap();
        let triple =
            build_triple(base, certificate, 2, EigenvalueTag::Plus, covering).unwrap();
        assert!(matches!(canonical_split(&triple), Err(SplitError::NotBinary)));

        let base = complete_graph_union(2, 1).unwrap();
        let certificate = certify_prym(&base.matrix, &base.generators).unwrap();
        let rot = Permutation::from_images(vec![2, 3, 4, 5, 6, 7, 0, 1]).unwrap();
        let twisted = double_swap(8, &[(0, 3), (1, 2)]);
        let branch = vec![
            BranchPoint::new("b1", rot.clone()),
            BranchPoint::new("b2", rot.inverse()),
            BranchPoint::new("b3", twisted.clone()),
            BranchPoint::new("b4", twisted),
        ];
        let covering = validate_covering(8, branch).unwrap();
        let triple =
            build_triple(base, certificate, 2, EigenvalueTag::Plus, covering).unwrap();
        assert!(matches!(canonical_split(&triple), Err(SplitError::BaseDisconnected)));
    }

    #[test]
    fn tower_validation_rejects_bad_specs() {
        let s12 = double_swap(6, &[(0, 2), (1, 3)]);
        let u1 = transposition(6, 0, 1);
        assert!(matches!(
            TowerSpec::new(1, 6, Vec::new()),
            Err(SplitError::TowerTooSmall { d: 1, m: 6 })
        ));
        let bad = TowerSpec::new(
            2,
            3,
            vec![TowerBranchPoint::new("b1", TowerBranchKind::Block, transposition(4, 0, 1))],
        );
        assert!(matches!(bad, Err(SplitError::TowerDegree { expected: 6, got: 4, .. })));
        let bad = TowerSpec::new(
            2,
            3,
            vec![TowerBranchPoint::new("b1", TowerBranchKind::Block, transposition(6, 0, 2))],
        );
        assert!(matches!(bad, Err(SplitError::TowerBlockBroken { .. })));
        let bad = TowerSpec::new(
            2,
            3,
            vec![TowerBranchPoint::new("b1", TowerBranchKind::Inner, s12.clone())],
        );
        assert!(
            matches!(bad, Err(SplitError::TowerKindMismatch { tagged: "inner", actual: "block", .. }))
        );
        let bad = TowerSpec::new(
            2,
            3,
            tower_points(&[
                (TowerBranchKind::Block, s12.clone()),
                (TowerBranchKind::Inner, u1.clone()),
            ]),
        );
        assert!(matches!(bad, Err(SplitError::Covering(_))), "product is not the identity");
    }

    #[test]
    fn simplicity_detector_rejects_each_violation() {
        let s12 = double_swap(6, &[(0, 2), (1, 3)]);
        let s13 = double_swap(6, &[(0, 4), (1, 5)]);
        let u1 = transposition(6, 0, 1);
        let double_inner = double_swap(6, &[(0, 1), (2, 3)]);
        let points = tower_points(&[
            (TowerBranchKind::Block, s12.clone()),
            (TowerBranchKind::Block, s12.clone()),
            (TowerBranchKind::Block, s13.clone()),
            (TowerBranchKind::Block, s13.clone()),
            (TowerBranchKind::Inner, u1.clone()),
            (TowerBranchKind::Inner, u1.clone()),
            (TowerBranchKind::Inner, double_inner.clone()),
            (TowerBranchKind::Inner, double_inner.clone()),
        ]);
        let tower = TowerSpec::new(2, 3, points).unwrap();
        let triple = from_tower(&tower).unwrap();
        let split = canonical_split(&triple).unwrap();
        assert!(!split.simple, "a double inner transposition is not a simple branch");

        let rot3 = Permutation::from_images(vec![2, 3, 4, 5, 0, 1]).unwrap();
        let points = tower_points(&[
            (TowerBranchKind::Block, rot3.clone()),
            (TowerBranchKind::Block, rot3.inverse()),
            (TowerBranchKind::Block, s12.clone()),
            (TowerBranchKind::Block, s12.clone()),
            (TowerBranchKind::Inner, u1.clone()),
            (TowerBranchKind::Inner, u1.clone()),
        ]);
        let tower = TowerSpec::new(2, 3, points).unwrap();
        let triple = from_tower(&tower).unwrap();
        let split = canonical_split(&triple).unwrap();
        assert!(!split.simple, "a block 3-cycle is not a simple branch");

        let twisted_double = double_swap(6, &[(0, 3), (1, 2)]);
        let points = tower_points(&[
            (TowerBranchKind::Block, twisted_double.clone()),
            (TowerBranchKind::Block, twisted_double.clone()),
            (TowerBranchKind::Block, s13.clone()),
            (TowerBranchKind::Block, s13.clone()),
            (TowerBranchKind::Inner, u1.clone()),
            (TowerBranchKind::Inner, u1.clone()),
        ]);
        let tower = TowerSpec::new(2, 3, points).unwrap();
        let triple = from_tower(&tower).unwrap();
        let split = canonical_split(&triple).unwrap();
        assert!(split.simple, "twisted pairings are still simple block branches");
    }

    #[test]
    fn isomorphism_transports_adjacency_exhaustively() {
        let xi = lattice_complement_isomorphism();
        let lattice = lattice_graph(3).unwrap();
        let complement = lattice_complement(3).unwrap();
        for u in 0..9 {
            for v in 0..9 {
                assert_eq!(
                    lattice.matrix.get(u, v),
                    complement.matrix.get(xi.apply(u), xi.apply(v))
                );
            }
        }
    }

    #[test]
    fn isomorphism_squares_to_the_doubled_map() {
        // Oracle: applying (i, j) -> (i - j, i + j) twice gives
        // (i, j) -> (-2j, 2i) = (j, 2i) on residues modulo 3.
        let xi = lattice_complement_isomorphism();
        let lift = |r: i64| if r == 0 { 3 } else { r as usize };
        let squared = pair_permutation(3, |a, b| {
            let (i, j) = (a as i64 + 1, b as i64 + 1);
            (lift((-2 * j).rem_euclid(3)) - 1, lift((2 * i).rem_euclid(3)) - 1)
        });
        assert_eq!(xi.compose(&xi), squared);
    }

    #[test]
    fn conversion_table_identities_hold() {
        let xi = lattice_complement_isomorphism();
        let phi: Vec<Permutation> = (0..4).map(|h| lattice_reflection(3, h)).collect();
        let pull = |s: Permutation| s.conjugated_by(&xi);
        assert_eq!(pull(side_transposition(3, 1, 1)), phi[0]);
        assert_eq!(
            pull(side_transposition(3, 1, 2)),
            phi[3].conjugated_by(&phi[0].inverse())
        );
        assert_eq!(
            pull(side_transposition(3, 2, 1)),
            phi[2].conjugated_by(&phi[1].inverse())
        );
        assert_eq!(pull(side_transposition(3, 2, 2)), phi[2]);
    }

    #[test]
    fn conversion_round_trips_and_preserves_dimensions() {
        for l in [1usize, 2] {
            let triple = exchange_triple(l);
            let before = dimensions(&triple, 0).unwrap();
            assert_eq!(before.genus, 4 + 3 * l as i64);
            assert_eq!(before.d_plus, l as i64);

            let report = convert_to_complement(&triple).unwrap();
            assert_eq!(report.l1 + report.l2, l);
            let after = dimensions(&report.triple, 0).unwrap();
            assert_eq!(before.genus, after.genus);
            assert_eq!(before.d_plus, after.d_plus);
            assert_eq!(before.d_minus, after.d_minus);

            let back = convert_to_lattice(&report.triple).unwrap();
            for (orig, got) in triple
                .covering()
                .branch_points()
                .iter()
                .zip(back.covering().branch_points())
            {
                assert_eq!(orig.label, got.label);
                assert_eq!(orig.perm, got.perm, "double conversion is the identity");
            }
        }
    }

    #[test]
    fn conversion_rejects_wrong_shapes() {
        let complement_triple = one_sided_triple(3, 1, 1);
        assert!(matches!(
            convert_to_complement(&complement_triple),
            Err(SplitError::WrongBase { .. })
        ));

        let base = lattice_graph(3).unwrap();
        let certificate = certify_prym(&base.matrix, &base.generators).unwrap();
        let perms: Vec<Permutation> =
            (1..3).flat_map(|h| [side_transposition(3, 1, h), side_transposition(3, 2, h)]).collect();
        let covering = validate_covering(9, branch_pairs(&perms)).unwrap();
        let triple = build_triple(base, certificate, 1, EigenvalueTag::Plus, covering).unwrap();
        assert!(matches!(
            convert_to_complement(&triple),
            Err(SplitError::NotCoordinateExchange { .. })
        ));
        assert!(matches!(
            tower_from_pair_covering(&triple),
            Err(SplitError::NotCoordinateExchange { .. })
        ));

        let exchange = exchange_triple(1);
        assert!(matches!(
            convert_to_lattice(&exchange),
            Err(SplitError::WrongBase { .. })
        ));
        assert!(matches!(
            analyze_fiber_product(&exchange),
            Err(SplitError::WrongBase { .. })
        ));
    }

    /// Oracle: exhaustive closure of the monodromy generators, filtered by
    /// the side-stabilizer condition, must coincide with the Schreier
    /// construction.
    #[test]
    fn coordinate_stabilizer_matches_exhaustive_enumeration() {
        let triple = one_sided_triple(3, 1, 1);
        let group = triple.covering().monodromy_group();
        let mut elements = vec![Permutation::identity(9)];
        let mut frontier = elements.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for e in &frontier {
                for g in group.generators() {
                    let product = e.compose(g);
                    if !elements.contains(&product) {
                        elements.push(product.clone());
                        next.push(product);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(elements.len(), 36);

        let first = coordinate_stabilizer(&group, 3, true).unwrap();
        let second = coordinate_stabilizer(&group, 3, false).unwrap();
        let in_first: Vec<_> =
            elements.iter().filter(|e| e.apply(0) / 3 == 0).cloned().collect();
        let in_second: Vec<_> =
            elements.iter().filter(|e| e.apply(0) % 3 == 0).cloned().collect();
        assert_eq!(BigUint::from(in_first.len()), first.order());
        assert_eq!(BigUint::from(in_second.len()), second.order());
        for e in &in_first {
            assert!(first.contains(e));
        }
        for e in &in_second {
            assert!(second.contains(e));
        }
    }

    #[test]
    fn fiber_product_splits_balanced_levels() {
        let triple = one_sided_triple(3, 1, 1);
        let report = analyze_fiber_product(&triple).unwrap();
        assert_eq!(report.first.degree(), 3);
        assert_eq!(report.second.degree(), 3);
        assert_eq!((report.genus_first, report.genus_second), (1, 1));
        assert_eq!(report.order_monodromy, BigUint::from(36u32));
        assert_eq!(report.order_first, BigUint::from(12u32));
        assert_eq!(report.order_second, BigUint::from(12u32));
        assert_eq!(report.order_intersection, BigUint::from(4u32));
        assert!(report.intersection_is_point_stabilizer);
        assert!(report.join_is_monodromy);
        assert_eq!(report.d_plus, 2);
        assert!(report.d_plus_matches);
    }

    #[test]
    fn fiber_product_splits_uneven_levels() {
        let triple = one_sided_triple(4, 2, 0);
        let report = analyze_fiber_product(&triple).unwrap();
        assert_eq!((report.genus_first, report.genus_second), (2, 0));
        assert_eq!(report.order_monodromy, BigUint::from(576u32));
        assert_eq!(report.order_intersection, BigUint::from(36u32));
        assert_eq!(report.d_plus, 2);
        let dims = dimensions(&triple, 0).unwrap();
        assert_eq!(dims.genus, 9 + 2 * 4);
        assert_eq!(dims.exponent, Some(4), "the plus eigenvalue is 1 for these bases");
    }

    #[test]
    fn fiber_product_rejects_exchange_branches() {
        let base = lattice_complement(3).unwrap();
        let certificate = certify_prym(&base.matrix, &base.generators).unwrap();
        let perms: Vec<Permutation> = (0..4).map(|h| lattice_reflection(3, h)).collect();
        let covering = validate_covering(9, branch_pairs(&perms)).unwrap();
        let triple = build_triple(base, certificate, 1, EigenvalueTag::Plus, covering).unwrap();
        assert!(matches!(
            analyze_fiber_product(&triple),
            Err(SplitError::NotOneSidedTransposition { .. })
        ));
    }

    #[test]
    fn pair_covering_round_trips_through_the_tower() {
        for l in [1usize, 2] {
            let triple = exchange_triple(l);
            let tower = tower_from_pair_covering(&triple).unwrap();
            assert_eq!(tower.block_size(), 3);
            assert_eq!(tower.block_count(), 2);
            assert_eq!(tower.branch_points().len(), 2 * l + 8);

            let folded = from_tower(&tower).unwrap();
            let split = canonical_split(&folded).unwrap();
            assert_eq!(split.genus_quotient, l as i64 + 3, "two-sheeted base genus");
            assert_eq!(genus(folded.covering()), 3 * l as i64 + 7);
            assert!(split.simple, "side pairings with no relative ramification are simple");
            assert_eq!(
                classical_prym_dims(&split, 3 * l as i64 + 7).unwrap(),
                (2 * l as i64 + 4, l as i64 + 3)
            );

            let rebuilt = pair_covering_from_tower(&tower).unwrap();
            assert_eq!(genus(&rebuilt), 3 * l as i64 + 4);
            let order: u64 = rebuilt.monodromy_group().order().try_into().unwrap();
            assert_eq!(72 % order, 0);
            for (orig, got) in
                triple.covering().branch_points().iter().zip(rebuilt.branch_points())
            {
                assert_eq!(orig.perm, got.perm);
            }
        }
    }

    #[test]
    fn pair_covering_rejects_relative_ramification() {
        let swap_sides = Permutation::from_images(vec![3, 4, 5, 0, 1, 2]).unwrap();
        let six_cycle = Permutation::from_images(vec![3, 4, 5, 1, 2, 0]).unwrap();
        let points = tower_points(&[
            (TowerBranchKind::Block, six_cycle.clone()),
            (TowerBranchKind::Block, six_cycle.inverse()),
            (TowerBranchKind::Block, swap_sides.clone()),
            (TowerBranchKind::Block, swap_sides.clone()),
        ]);
        let tower = TowerSpec::new(3, 2, points).unwrap();
        assert!(matches!(
            pair_covering_from_tower(&tower),
            Err(SplitError::RelativeRamification { .. })
        ));

        let tower = mixed_tower();
        assert!(matches!(
            pair_covering_from_tower(&tower),
            Err(SplitError::NotPairShape { d: 2, m: 3 })
        ));
    }
}
