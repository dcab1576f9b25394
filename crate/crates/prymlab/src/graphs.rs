//! Graph catalog, strong-regularity validation, and exact eigenvalue
//! certificates for symmetric integer matrices.
//!
//! Vertices are 0-based indices in code. Pair-indexed families (lattice,
//! latin square) place pair `(i, j)` at index `i*n + j` over 0-based
//! coordinates; printed labels are 1-based where the family is 1-based.
//! All identities are verified entrywise over the integers.

use crate::permgroups::{point_orbits, Permutation};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("rows {row_a} and {row_b} have different sums ({sum_a} vs {sum_b})")]
    NotRegular { row_a: usize, sum_a: i64, row_b: usize, sum_b: i64 },
    #[error("not strongly regular: vertices ({u}, {v}) {detail}")]
    NotStronglyRegular { u: usize, v: usize, detail: String },
    #[error("infeasible spectrum: {0}")]
    InfeasibleSpectrum(String),
    #[error("generator {generator} is not an automorphism: entry ({i}, {j}) not preserved")]
    GeneratorNotAutomorphism { generator: usize, i: usize, j: usize },
    #[error("generators are not vertex-transitive; orbit of vertex 0 is {orbit:?}")]
    NotTransitive { orbit: Vec<usize> },
    #[error("no integer eigenvalue pair r+ > r-: {0}")]
    NoIntegerSpectrum(String),
    #[error("complement parameters infeasible: {0}")]
    ComplementInfeasible(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
}

/// Dense symmetric integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{}:", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, entries: vec![0; n * n] }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, GraphError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::InvalidParameter(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
        }
        Ok(IntMatrix { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.entries[i * self.n + j] = value;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn check_symmetric(&self) -> Result<(), GraphError> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return Err(GraphError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn is_binary_with_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| {
            self.get(i, i) == 0
                && (0..self.n).all(|j| self.get(i, j) == 0 || self.get(i, j) == 1)
        })
    }

    pub fn row_sum(&self, i: usize) -> i64 {
        (0..self.n).map(|j| self.get(i, j)).sum()
    }

    pub fn multiply(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let mut out = IntMatrix::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..self.n {
                    out.set(i, j, out.get(i, j) + a * other.get(k, j));
                }
            }
        }
        out
    }

    /// Block-diagonal m-fold repetition of `self`.
    pub fn block_repeat(&self, m: usize) -> IntMatrix {
        let n = self.n * m;
        let mut out = IntMatrix::zeros(n);
        for b in 0..m {
            for i in 0..self.n {
                for j in 0..self.n {
                    out.set(b * self.n + i, b * self.n + j, self.get(i, j));
                }
            }
        }
        out
    }

    /// `J - I - A` on the same vertex set.
    pub fn binary_complement(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.set(i, j, 1 - self.get(i, j));
                }
            }
        }
        out
    }

    /// True when `perm` preserves every entry: `a[p(i), p(j)] = a[i, j]`.
    pub fn preserved_by(&self, perm: &Permutation) -> bool {
        self.violating_entry(perm).is_none()
    }

    /// First entry not preserved by `perm`, if any.
    pub fn violating_entry(&self, perm: &Permutation) -> Option<(usize, usize)> {
        if perm.degree() != self.n {
            return Some((0, 0));
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(perm.apply(i), perm.apply(j)) != self.get(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Strongly-regular parameter quadruple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub d: usize,
    pub k: i64,
    pub lambda: i64,
    pub mu: i64,
}

impl SrgParams {
    /// Counting identity `k(k - λ - 1) = (d - k - 1)μ`.
    pub fn feasibility_holds(&self) -> bool {
        self.k * (self.k - self.lambda - 1) == (self.d as i64 - self.k - 1) * self.mu
    }

    /// True iff `0 < μ < k < d - 1`: both the graph and its complement connected.
    pub fn is_non_trivial(&self) -> bool {
        0 < self.mu && self.mu < self.k && self.k < self.d as i64 - 1
    }
}

/// Exact value `(a + b√D) / 2`; canonicalized so a perfect-square `D` folds
/// into the rational part (`b = 0, D = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadSurd {
    pub a: i64,
    pub b: i64,
    pub d: i64,
}

impl QuadSurd {
    pub fn new(a: i64, b: i64, d: i64) -> Self {
        assert!(d >= 0, "radicand must be non-negative");
        if b == 0 || d == 0 {
            return QuadSurd { a, b: 0, d: 0 };
        }
        match exact_sqrt(d) {
            Some(s) => QuadSurd { a: a + b * s, b: 0, d: 0 },
            None => QuadSurd { a, b, d },
        }
    }

    pub fn integer(value: i64) -> Self {
        QuadSurd { a: 2 * value, b: 0, d: 0 }
    }

    pub fn as_integer(&self) -> Option<i64> {
        if self.b == 0 && self.a % 2 == 0 {
            Some(self.a / 2)
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }
}

impl std::fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(v) = self.as_integer() {
            return write!(f, "{v}");
        }
        if self.b == 0 {
            return write!(f, "{}/2", self.a);
        }
        let root = if self.b.abs() == 1 {
            format!("√{}", self.d)
        } else {
            format!("{}√{}", self.b.abs(), self.d)
        };
        let sign = if self.b > 0 { "+" } else { "-" };
        write!(f, "({} {} {})/2", self.a, sign, root)
    }
}

/// Integer square root when exact.
pub fn exact_sqrt(v: i64) -> Option<i64> {
    if v < 0 {
        return None;
    }
    let mut lo = 0i64;
    let mut hi = v.min(3_037_000_499) + 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if mid * mid < v {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if lo * lo == v {
        Some(lo)
    } else {
        None
    }
}

/// Eigenvalue data of a strongly regular graph, exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Spectrum {
    pub k: i64,
    /// Multiplicity of the eigenvalue `k`: the number of connected components.
    pub mult_k: usize,
    pub r_plus: QuadSurd,
    pub r_minus: QuadSurd,
    pub m_plus: usize,
    pub m_minus: usize,
}

impl Spectrum {
    pub fn is_integral(&self) -> bool {
        self.r_plus.is_rational() && self.r_minus.is_rational()
    }
}

/// A graph (or integer symmetric matrix) together with its named
/// automorphism generators and printable vertex labels.
#[derive(Clone, Debug)]
pub struct PrymGraph {
    pub label: String,
    pub matrix: IntMatrix,
    pub vertex_labels: Vec<String>,
    pub generators: Vec<Permutation>,
}

/// Certificate that a matrix satisfies the quadratic identity
/// `(A - r+ I)(A - r- I) = c J` with integer `r+ > r-`, constant row sum `k`,
/// and a vertex-transitive automorphism group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrymCertificate {
    pub d: usize,
    pub k: i64,
    pub r_plus: i64,
    pub r_minus: i64,
    /// The constant `c = (k - r+)(k - r-) / d`, always an integer.
    pub c: i64,
    /// Transitivity witness: the full orbit of vertex 0.
    pub orbit_of_vertex_0: Vec<usize>,
}

/// Builds the permutation of pair indices `(i, j) -> i*n + j` induced by a
/// coordinate map.
pub fn pair_permutation(n: usize, f: impl Fn(usize, usize) -> (usize, usize)) -> Permutation {
    let mut images = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = f(i, j);
            assert!(a < n && b < n, "pair map out of range");
            images[i * n + j] = a * n + b;
        }
    }
    Permutation::from_images(images).expect("pair map must be a bijection")
}

fn row_major_pair_labels(n: usize, one_based: bool) -> Vec<String> {
    let off = usize::from(one_based);
    let mut labels = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            labels.push(format!("({},{})", i + off, j + off));
        }
    }
    labels
}

fn symmetric_group_pair_generators(n: usize) -> Vec<Permutation> {
    let rot = |x: usize| (x + 1) % n;
    let swap01 = |x: usize| match x {
        0 => 1,
        1 => 0,
        other => other,
    };
    vec![
        pair_permutation(n, |i, j| (swap01(i), j)),
        pair_permutation(n, |i, j| (rot(i), j)),
        pair_permutation(n, |i, j| (i, swap01(j))),
        pair_permutation(n, |i, j| (i, rot(j))),
        pair_permutation(n, |i, j| (j, i)),
    ]
}

/// The `n² `-vertex graph of pairs adjacent when they share a coordinate.
pub fn lattice_graph(n: usize) -> Result<PrymGraph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParameter(format!("lattice requires n >= 3, got {n}")));
    }
    let mut matrix = IntMatrix::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for m in 0..n {
                    if (i, j) != (l, m) && (i == l || j == m) {
                        matrix.set(i * n + j, l * n + m, 1);
                    }
                }
            }
        }
    }
    Ok(PrymGraph {
        label: format!("lattice({n})"),
        matrix,
        vertex_labels: row_major_pair_labels(n, true),
        generators: symmetric_group_pair_generators(n),
    })
}

/// Complement of [`lattice_graph`] on the same vertex ordering.
pub fn lattice_complement(n: usize) -> Result<PrymGraph, GraphError> {
    let base = lattice_graph(n)?;
    Ok(PrymGraph {
        label: format!("lattice_complement({n})"),
        matrix: base.matrix.binary_complement(),
        vertex_labels: base.vertex_labels,
        generators: base.generators,
    })
}

/// Pairs over residues mod `n`, adjacent when they agree in a row, column,
/// or anti-diagonal (three parallel classes).
pub fn latin_square_graph(n: usize) -> Result<PrymGraph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParameter(format!(
            "latin square graph requires n >= 3, got {n}"
        )));
    }
    let mut matrix = IntMatrix::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for m in 0..n {
                    if (i, j) != (l, m) && (i == l || j == m || (i + j) % n == (l + m) % n) {
                        matrix.set(i * n + j, l * n + m, 1);
                    }
                }
            }
        }
    }
    let generators = vec![
        // Translations by (1,1) and (1,2).
        pair_permutation(n, |i, j| ((i + 1) % n, (j + 1) % n)),
        pair_permutation(n, |i, j| ((i + 1) % n, (j + 2) % n)),
        // Linear maps preserving the three parallel classes.
        pair_permutation(n, |i, j| ((2 * n - 1 - i - j) % n, j)),
        pair_permutation(n, |i, j| (j, i)),
    ];
    Ok(PrymGraph {
        label: format!("latin_square({n})"),
        matrix,
        vertex_labels: row_major_pair_labels(n, false),
        generators,
    })
}

/// Builds the 27-vertex line-incidence graph with labels
/// a1..a6, b1..b6, c12..c56 and six named involutions generating its
/// automorphism group.
pub fn schlaefli_graph() -> PrymGraph {
    // Index layout: a_i -> i-1, b_i -> 5 + i, c_{ij} (i<j, lex) -> 12...
    let pair_index = |i: usize, j: usize| -> usize {
        // 1-based i < j.
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let mut idx = 12;
        for p in 1..=6 {
            for q in p + 1..=6 {
                if (p, q) == (i, j) {
                    return idx;
                }
                idx += 1;
            }
        }
        unreachable!("pair out of range")
    };
    let mut labels = Vec::with_capacity(27);
    for i in 1..=6 {
        labels.push(format!("a{i}"));
    }
    for i in 1..=6 {
        labels.push(format!("b{i}"));
    }
    for i in 1..=6 {
        for j in i + 1..=6 {
            labels.push(format!("c{i}{j}"));
        }
    }

    let mut matrix = IntMatrix::zeros(27);
    let mut join = |u: usize, v: usize| {
        matrix.set(u, v, 1);
        matrix.set(v, u, 1);
    };
    for i in 1..=6 {
        for j in 1..=6 {
            if i != j {
                join(i - 1, 5 + j);
            }
        }
    }
    for i in 1..=6 {
        for p in 1..=6 {
            for q in p + 1..=6 {
                if i == p || i == q {
                    join(i - 1, pair_index(p, q));
                    join(5 + i, pair_index(p, q));
                }
            }
        }
    }
    for p in 1..=6 {
        for q in p + 1..=6 {
            for r in 1..=6 {
                for s in r + 1..=6 {
                    if (p, q) < (r, s) && p != r && p != s && q != r && q != s {
                        join(pair_index(p, q), pair_index(r, s));
                    }
                }
            }
        }
    }

    // Natural transpositions (i, i+1) on the index set act as the row swaps
    // of the five two-row systems pairing a_i with a_j.
    let mut generators = Vec::with_capacity(6);
    for t in 1..=5usize {
        let sigma = |x: usize| -> usize {
            if x == t {
                t + 1
            } else if x == t + 1 {
                t
            } else {
                x
            }
        };
        let mut images: Vec<usize> = (0..27).collect();
        for i in 1..=6 {
            images[i - 1] = sigma(i) - 1;
            images[5 + i] = 5 + sigma(i);
        }
        for p in 1..=6 {
            for q in p + 1..=6 {
                images[pair_index(p, q)] = pair_index(sigma(p), sigma(q));
            }
        }
        generators.push(Permutation::from_images(images).expect("row swap is a bijection"));
    }
    // Row swap of the two-row system on {1,2,3}:
    // a1<->c23, a2<->c13, a3<->c12, c56<->b4, c46<->b5, c45<->b6.
    let mut images: Vec<usize> = (0..27).collect();
    let mut swap = |u: usize, v: usize| {
        images[u] = v;
        images[v] = u;
    };
    swap(0, pair_index(2, 3));
    swap(1, pair_index(1, 3));
    swap(2, pair_index(1, 2));
    swap(pair_index(5, 6), 5 + 4);
    swap(pair_index(4, 6), 5 + 5);
    swap(pair_index(4, 5), 5 + 6);
    generators.push(Permutation::from_images(images).expect("row swap is a bijection"));

    let graph = PrymGraph { label: "schlaefli".to_string(), matrix, vertex_labels: labels, generators };
    let params = validate_srg(&graph.matrix).expect("line-incidence rules must be strongly regular");
    assert_eq!(
        params,
        SrgParams { d: 27, k: 10, lambda: 1, mu: 5 },
        "line-incidence construction out of spec"
    );
    for g in &graph.generators {
        assert!(graph.matrix.preserved_by(g), "named generator must preserve adjacency");
    }
    graph
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= q {
        if q % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// Quadratic-residue graph on residues mod a prime `q ≡ 1 (mod 4)`.
pub fn paley_graph(q: u64) -> Result<PrymGraph, GraphError> {
    if !is_prime(q) || q % 4 != 1 {
        return Err(GraphError::InvalidParameter(format!(
            "paley graph requires a prime q ≡ 1 mod 4, got {q}"
        )));
    }
    let n = q as usize;
    let mut is_square = vec![false; n];
    for x in 1..n {
        is_square[(x * x) % n] = true;
    }
    let mut matrix = IntMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && is_square[(i + n - j) % n] {
                matrix.set(i, j, 1);
            }
        }
    }
    let translation =
        Permutation::from_images((0..n).map(|x| (x + 1) % n).collect()).expect("bijection");
    Ok(PrymGraph {
        label: format!("paley({q})"),
        matrix,
        vertex_labels: (0..n).map(|x| x.to_string()).collect(),
        generators: vec![translation],
    })
}

/// Disjoint union of `m` complete graphs on `k + 1` vertices.
pub fn complete_graph_union(m: usize, k: usize) -> Result<PrymGraph, GraphError> {
    if m < 1 || k < 1 {
        return Err(GraphError::InvalidParameter(format!(
            "complete_graph_union requires m >= 1 and k >= 1, got m={m}, k={k}"
        )));
    }
    let block = k + 1;
    let d = m * block;
    let mut matrix = IntMatrix::zeros(d);
    for b in 0..m {
        for i in 0..block {
            for j in 0..block {
                if i != j {
                    matrix.set(b * block + i, b * block + j, 1);
                }
            }
        }
    }
    let mut generators = Vec::new();
    let embed = |f: &dyn Fn(usize) -> usize| -> Permutation {
        let mut images: Vec<usize> = (0..d).collect();
        for i in 0..block {
            images[i] = f(i);
        }
        Permutation::from_images(images).expect("bijection")
    };
    generators.push(embed(&|i| if i == 0 { 1 } else if i == 1 { 0 } else { i }));
    if block > 2 {
        generators.push(embed(&|i| (i + 1) % block));
    }
    if m > 1 {
        let cycle = Permutation::from_images(
            (0..d).map(|x| (x + block) % d).collect(),
        )
        .expect("bijection");
        generators.push(cycle);
    }
    let mut labels = Vec::with_capacity(d);
    for b in 0..m {
        for i in 0..block {
            labels.push(format!("({},{})", b + 1, i + 1));
        }
    }
    Ok(PrymGraph {
        label: format!("complete_union({m},{k})"),
        matrix,
        vertex_labels: labels,
        generators,
    })
}

/// Exhaustive strong-regularity check; returns the parameters.
pub fn validate_srg(matrix: &IntMatrix) -> Result<SrgParams, GraphError> {
    let d = matrix.size();
    if d == 0 {
        return Err(GraphError::InvalidParameter("empty matrix".into()));
    }
    matrix.check_symmetric()?;
    if !matrix.is_binary_with_zero_diagonal() {
        return Err(GraphError::InvalidParameter(
            "adjacency matrix must be 0/1 with zero diagonal".into(),
        ));
    }
    let k = matrix.row_sum(0);
    for i in 1..d {
        let s = matrix.row_sum(i);
        if s != k {
            return Err(GraphError::NotRegular { row_a: 0, sum_a: k, row_b: i, sum_b: s });
        }
    }
    if k == 0 {
        return Err(GraphError::InvalidParameter("k = 0 (empty graph)".into()));
    }
    let common = |u: usize, v: usize| -> i64 {
        (0..d).filter(|&w| matrix.get(u, w) == 1 && matrix.get(v, w) == 1).count() as i64
    };
    let mut lambda: Option<i64> = None;
    let mut mu: Option<i64> = None;
    for u in 0..d {
        for v in u + 1..d {
            let c = common(u, v);
            if matrix.get(u, v) == 1 {
                match lambda {
                    None => lambda = Some(c),
                    Some(l) if l != c => {
                        return Err(GraphError::NotStronglyRegular {
                            u,
                            v,
                            detail: format!("adjacent with {c} common neighbors, expected {l}"),
                        });
                    }
                    _ => {}
                }
            } else {
                match mu {
                    None => mu = Some(c),
                    Some(m) if m != c => {
                        return Err(GraphError::NotStronglyRegular {
                            u,
                            v,
                            detail: format!("non-adjacent with {c} common neighbors, expected {m}"),
                        });
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(SrgParams {
        d,
        k,
        lambda: lambda.unwrap_or(0),
        // A complete graph has no non-adjacent pairs; μ is vacuous and 0.
        mu: mu.unwrap_or(0),
    })
}

/// Exact eigenvalues `r± = ½[λ−μ ± √((λ−μ)² + 4(k−μ))]` with multiplicities
/// from the trace identities.
pub fn spectrum_of(params: &SrgParams) -> Result<Spectrum, GraphError> {
    let d = params.d as i64;
    let a = params.lambda - params.mu;
    let disc = a * a + 4 * (params.k - params.mu);
    if disc < 0 {
        return Err(GraphError::InfeasibleSpectrum(format!("negative discriminant {disc}")));
    }
    if disc == 0 {
        return Err(GraphError::InfeasibleSpectrum(
            "discriminant 0 would force r+ = r-".into(),
        ));
    }
    let components = if params.mu == 0 {
        if d % (params.k + 1) != 0 {
            return Err(GraphError::InfeasibleSpectrum(format!(
                "μ = 0 requires (k+1) | d, got d={d}, k={}",
                params.k
            )));
        }
        (d / (params.k + 1)) as usize
    } else {
        1
    };
    let c = components as i64;
    let (m_plus, m_minus) = match exact_sqrt(disc) {
        Some(s) => {
            // Integral case: r± = (a ± s)/2 (same parity is automatic).
            let r_minus = (a - s) / 2;
            let num = -c * params.k - (d - c) * r_minus;
            if num % s != 0 {
                return Err(GraphError::InfeasibleSpectrum(format!(
                    "multiplicities not integral (trace {num} not divisible by {s})"
                )));
            }
            let m_plus = num / s;
            let m_minus = d - c - m_plus;
            if m_plus < 0 || m_minus < 0 {
                return Err(GraphError::InfeasibleSpectrum(format!(
                    "negative multiplicity (m+ = {m_plus}, m- = {m_minus})"
                )));
            }
            (m_plus as usize, m_minus as usize)
        }
        None => {
            // Irrational eigenvalues force equal multiplicities.
            if 2 * c * params.k + (d - c) * a != 0 || (d - c) % 2 != 0 {
                return Err(GraphError::InfeasibleSpectrum(
                    "irrational eigenvalues with unequal multiplicities".into(),
                ));
            }
            (((d - c) / 2) as usize, ((d - c) / 2) as usize)
        }
    };
    Ok(Spectrum {
        k: params.k,
        mult_k: components,
        r_plus: QuadSurd::new(a, 1, disc),
        r_minus: QuadSurd::new(a, -1, disc),
        m_plus,
        m_minus,
    })
}

/// Certifies the quadratic identity `(A - r+ I)(A - r- I) = c J` for a
/// symmetric integer matrix with a supplied transitive automorphism set.
///
/// Solving strategy: with `B = A²`, the identity forces `B` to be constant on
/// each off-diagonal entry class of `A`; two distinct classes determine
/// `p = r+ + r-` and `c` linearly and the diagonal gives `q = r+ r-`. When
/// only one off-diagonal class exists, `A` acts as a scalar on the complement
/// of the all-ones vector and the eigenvalue pair is `{k, that scalar}`.
/// Every branch ends with a full entrywise verification.
pub fn certify_prym(
    matrix: &IntMatrix,
    generators: &[Permutation],
) -> Result<PrymCertificate, GraphError> {
    let d = matrix.size();
    if d < 2 {
        return Err(GraphError::InvalidParameter("certification requires d >= 2".into()));
    }
    matrix.check_symmetric()?;
    for (gi, g) in generators.iter().enumerate() {
        if g.degree() != d {
            return Err(GraphError::InvalidParameter(format!(
                "generator {gi} has degree {}, expected {d}",
                g.degree()
            )));
        }
        if let Some((i, j)) = matrix.violating_entry(g) {
            return Err(GraphError::GeneratorNotAutomorphism { generator: gi, i, j });
        }
    }
    let orbit = &point_orbits(generators, d)[0];
    if orbit.len() != d {
        return Err(GraphError::NotTransitive { orbit: orbit.clone() });
    }
    let k = matrix.row_sum(0);
    for i in 1..d {
        let s = matrix.row_sum(i);
        if s != k {
            return Err(GraphError::NotRegular { row_a: 0, sum_a: k, row_b: i, sum_b: s });
        }
    }
    let s_diag = matrix.get(0, 0);
    let b = matrix.multiply(matrix);

    // Off-diagonal entry classes of A, each mapped to its B value.
    let mut classes: Vec<(i64, i64)> = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let av = matrix.get(i, j);
            let bv = b.get(i, j);
            match classes.iter().find(|(a, _)| *a == av) {
                Some(&(_, expect)) if expect != bv => {
                    return Err(GraphError::NoIntegerSpectrum(format!(
                        "A² is not constant on the entry class A = {av} \
                         ({expect} vs {bv} at ({i}, {j}))"
                    )));
                }
                Some(_) => {}
                None => classes.push((av, bv)),
            }
        }
    }
    classes.sort_unstable();

    let (r_plus, r_minus) = if classes.len() >= 2 {
        let (a1, v1) = classes[0];
        let (a2, v2) = classes[1];
        if (v2 - v1) % (a2 - a1) != 0 {
            return Err(GraphError::NoIntegerSpectrum(format!(
                "r+ + r- = ({v2} - {v1})/({a2} - {a1}) is not an integer"
            )));
        }
        let p = (v2 - v1) / (a2 - a1);
        let c = v1 - p * a1;
        let q = p * s_diag + c - b.get(0, 0);
        let disc = p * p - 4 * q;
        if disc <= 0 {
            return Err(GraphError::NoIntegerSpectrum(format!(
                "discriminant {disc} admits no integers r+ > r-"
            )));
        }
        let s = exact_sqrt(disc).ok_or_else(|| {
            GraphError::NoIntegerSpectrum(format!(
                "irrational eigenvalues (r+ + r- = {p}, r+·r- = {q})"
            ))
        })?;
        if (p + s) % 2 != 0 {
            return Err(GraphError::NoIntegerSpectrum(format!(
                "eigenvalues ({p} ± {s})/2 are not integers"
            )));
        }
        ((p + s) / 2, (p - s) / 2)
    } else {
        // Single off-diagonal class: A = w(J - I) + s_diag I acts as the
        // scalar (s_diag - w) on the complement of the all-ones vector.
        let w = classes.first().map(|&(a, _)| a).unwrap_or(0);
        let scalar = s_diag - w;
        if k == scalar {
            return Err(GraphError::NoIntegerSpectrum(format!(
                "both eigenvalues equal {k}; r+ > r- required"
            )));
        }
        (k.max(scalar), k.min(scalar))
    };

    let product = (k - r_plus) * (k - r_minus);
    if product % d as i64 != 0 {
        return Err(GraphError::NoIntegerSpectrum(format!(
            "(k - r+)(k - r-) = {product} is not divisible by d = {d}"
        )));
    }
    let c = product / d as i64;

    // Global verification of (A - r+ I)(A - r- I) = c J, entrywise:
    // A² - (r+ + r-) A + r+ r- I = c J.
    for i in 0..d {
        for j in 0..d {
            let lhs = b.get(i, j) - (r_plus + r_minus) * matrix.get(i, j)
                + if i == j { r_plus * r_minus } else { 0 };
            if lhs != c {
                return Err(GraphError::NoIntegerSpectrum(format!(
                    "quadratic identity fails at ({i}, {j}): {lhs} != {c}"
                )));
            }
        }
    }
    Ok(PrymCertificate { d, k, r_plus, r_minus, c, orbit_of_vertex_0: orbit.clone() })
}

/// Block-diagonal m-fold repetition with the certificate carried over;
/// verifies the block form of the quadratic identity entrywise.
pub fn repeat_matrix(
    base: &PrymGraph,
    certificate: &PrymCertificate,
    m: usize,
) -> Result<(PrymGraph, PrymCertificate), GraphError> {
    if m < 1 {
        return Err(GraphError::InvalidParameter("m >= 1 required".into()));
    }
    let d = base.matrix.size();
    assert_eq!(certificate.d, d, "certificate does not match the matrix");
    let matrix = base.matrix.block_repeat(m);
    let n = d * m;

    // (M - r+ I)(M - r- I) must equal c on in-block entries, 0 across blocks.
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
                return Err(GraphError::Internal(format!(
                    "block quadratic identity fails at ({i}, {j})"
                )));
            }
        }
    }

    let mut generators: Vec<Permutation> = base
        .generators
        .iter()
        .map(|g| {
            let mut images: Vec<usize> = (0..n).collect();
            for p in 0..d {
                images[p] = g.apply(p);
            }
            Permutation::from_images(images).expect("bijection")
        })
        .collect();
    if m > 1 {
        generators.push(
            Permutation::from_images((0..n).map(|x| (x + d) % n).collect()).expect("bijection"),
        );
    }
    let mut vertex_labels = Vec::with_capacity(n);
    for block in 0..m {
        for v in 0..d {
            vertex_labels.push(format!("{}#{}", base.vertex_labels[v], block + 1));
        }
    }
    let graph = PrymGraph {
        label: if m == 1 { base.label.clone() } else { format!("{}^⊕{}", base.label, m) },
        matrix,
        vertex_labels,
        generators,
    };
    let cert = PrymCertificate {
        d: certificate.d,
        k: certificate.k,
        r_plus: certificate.r_plus,
        r_minus: certificate.r_minus,
        c: certificate.c,
        orbit_of_vertex_0: (0..n).collect(),
    };
    Ok((graph, cert))
}

/// Parameters of the complement graph.
pub fn complement_params(params: &SrgParams) -> Result<SrgParams, GraphError> {
    let d = params.d as i64;
    let out = SrgParams {
        d: params.d,
        k: d - params.k - 1,
        lambda: d - 2 * params.k + params.mu - 2,
        mu: d - 2 * params.k + params.lambda,
    };
    if out.k < 0 || out.lambda < 0 || out.mu < 0 {
        return Err(GraphError::ComplementInfeasible(format!(
            "complement of ({}, {}, {}, {}) has a negative entry",
            params.d, params.k, params.lambda, params.mu
        )));
    }
    Ok(out)
}

/// Reads (λ, μ) off a certified 0/1 matrix: λ = k + r+r- + r+ + r-,
/// μ = k + r+r-; cross-validated against the exhaustive count.
pub fn classify_binary_prym(
    certificate: &PrymCertificate,
    matrix: &IntMatrix,
) -> Result<SrgParams, GraphError> {
    if !matrix.is_binary_with_zero_diagonal() {
        return Err(GraphError::InvalidParameter(
            "classification requires a 0/1 matrix with zero diagonal".into(),
        ));
    }
    let params = SrgParams {
        d: matrix.size(),
        k: certificate.k,
        lambda: certificate.k
            + certificate.r_plus * certificate.r_minus
            + certificate.r_plus
            + certificate.r_minus,
        mu: certificate.k + certificate.r_plus * certificate.r_minus,
    };
    let counted = validate_srg(matrix)?;
    if counted != params {
        return Err(GraphError::Internal(format!(
            "certificate-derived parameters {params:?} disagree with the exhaustive count {counted:?}"
        )));
    }
    Ok(params)
}

/// True iff every vertex is non-adjacent to its image (fixed vertices allowed).
pub fn displacing_automorphism(graph: &PrymGraph, perm: &Permutation) -> Result<bool, GraphError> {
    if let Some((i, j)) = graph.matrix.violating_entry(perm) {
        return Err(GraphError::GeneratorNotAutomorphism { generator: 0, i, j });
    }
    Ok((0..graph.matrix.size()).all(|v| {
        let w = perm.apply(v);
        v == w || graph.matrix.get(v, w) == 0
    }))
}
