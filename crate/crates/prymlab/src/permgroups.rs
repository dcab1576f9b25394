//! Permutations and finite permutation groups.
//!
//! Points are 0-based `usize` everywhere in code; cycle notation in text is
//! 1-based. A composition `compose(p, q)` applies `p` first, then `q`.
//! Groups carry a lazily built stabilizer chain with the deterministic base
//! order 0, 1, 2, ... so that repeated runs produce identical data.

use num_bigint::BigUint;
use std::cell::OnceCell;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("cycle notation parse error: {0}")]
    Parse(String),
    #[error("point {point} out of range 1..={degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("point {point} appears twice; cycles must be disjoint")]
    RepeatedPoint { point: usize },
    #[error("permutation degree {got} does not match expected degree {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("the given generators do not all lie in the group")]
    NotSubgroup,
}

/// A permutation of `{0, .., degree-1}`, stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl std::fmt::Debug for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm[{}]({})", self.degree(), self.format_cycles())
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree).collect() }
    }

    /// Builds a permutation from an image table, validating bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &im in &images {
            if im >= n {
                return Err(PermError::PointOutOfRange { point: im + 1, degree: n });
            }
            if seen[im] {
                return Err(PermError::RepeatedPoint { point: im + 1 });
            }
            seen[im] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i == im)
    }

    /// `self` first, then `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "compose requires equal degrees");
        Permutation { images: self.images.iter().map(|&im| other.images[im]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &im) in self.images.iter().enumerate() {
            images[im] = i;
        }
        Permutation { images }
    }

    /// `x -> g_inv(self(g(x)))`: the image of `self` under conjugation by `g`.
    pub fn conjugated_by(&self, g: &Permutation) -> Permutation {
        g.compose(self).compose(&g.inverse())
    }

    pub fn pow(&self, exp: u64) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        let mut cur = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&cur);
            }
            cur = cur.compose(&cur);
            e >>= 1;
        }
        acc
    }

    /// Non-trivial cycles, each starting at its least point, ordered by least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of cycles including fixed points.
    pub fn cycle_count(&self) -> usize {
        let moved: usize = self.cycles().iter().map(|c| c.len()).sum();
        let nontrivial = self.cycles().len();
        self.degree() - moved + nontrivial
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }

    pub fn moved_points(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&p| self.images[p] != p).collect()
    }

    /// Parses 1-based disjoint cycle notation, e.g. `(1 2)(4 5 6)` or `()`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        let mut chars = text.chars().peekable();
        let mut saw_cycle = false;
        loop {
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            match chars.next() {
                None => break,
                Some('(') => {}
                Some(c) => {
                    return Err(PermError::Parse(format!("unexpected character '{c}'")));
                }
            }
            saw_cycle = true;
            let mut cycle: Vec<usize> = Vec::new();
            loop {
                while chars.peek().is_some_and(|c| c.is_whitespace()) {
                    chars.next();
                }
                match chars.peek() {
                    Some(')') => {
                        chars.next();
                        break;
                    }
                    Some(c) if c.is_ascii_digit() => {
                        let mut value = 0usize;
                        while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                            value = value * 10 + chars.next().unwrap() as usize - '0' as usize;
                        }
                        if value == 0 || value > degree {
                            return Err(PermError::PointOutOfRange { point: value, degree });
                        }
                        if used[value - 1] {
                            return Err(PermError::RepeatedPoint { point: value });
                        }
                        used[value - 1] = true;
                        cycle.push(value - 1);
                    }
                    Some(c) => {
                        return Err(PermError::Parse(format!("unexpected character '{c}' inside cycle")));
                    }
                    None => {
                        return Err(PermError::Parse("unclosed cycle".into()));
                    }
                }
            }
            for w in 0..cycle.len() {
                images[cycle[w]] = cycle[(w + 1) % cycle.len()];
            }
        }
        if !saw_cycle {
            return Err(PermError::Parse("expected at least one cycle, e.g. ()".into()));
        }
        Ok(Permutation { images })
    }

    /// Formats in canonical 1-based disjoint cycle notation; identity is `()`.
    pub fn format_cycles(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut out = String::new();
        for cycle in cycles {
            out.push('(');
            let body: Vec<String> = cycle.iter().map(|p| (p + 1).to_string()).collect();
            out.push_str(&body.join(" "));
            out.push(')');
        }
        out
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Orbits of the group generated by `gens` on `{0, .., degree-1}`,
/// each orbit sorted, orbits ordered by least element.
pub fn point_orbits(gens: &[Permutation], degree: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; degree];
    let mut orbits = Vec::new();
    for start in 0..degree {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for g in gens {
                let q = g.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    orbits
}

/// One level of a stabilizer chain: a base point, the generators first
/// installed at this level (each fixes all earlier base points), and the
/// orbit/transversal of the base point under this and all deeper levels'
/// generators.
#[derive(Clone, Debug)]
struct ChainLevel {
    base: usize,
    gens: Vec<Permutation>,
    orbit: Vec<usize>,
    transversal: Vec<Option<Permutation>>,
}

impl ChainLevel {
    fn new(base: usize, degree: usize) -> Self {
        let mut transversal = vec![None; degree];
        transversal[base] = Some(Permutation::identity(degree));
        ChainLevel { base, gens: Vec::new(), orbit: vec![base], transversal }
    }

    /// Recomputes the orbit of `base` under `gens` by BFS in generator order.
    /// Transversal elements satisfy `t(base) = point`.
    fn recompute_orbit(&mut self, gens: &[Permutation], degree: usize) {
        self.orbit = vec![self.base];
        self.transversal = vec![None; degree];
        self.transversal[self.base] = Some(Permutation::identity(degree));
        let mut head = 0;
        while head < self.orbit.len() {
            let p = self.orbit[head];
            head += 1;
            let tp = self.transversal[p].clone().unwrap();
            for g in gens {
                let q = g.apply(p);
                if self.transversal[q].is_none() {
                    self.transversal[q] = Some(tp.compose(g));
                    self.orbit.push(q);
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
struct StabChain {
    degree: usize,
    base_order: Vec<usize>,
    levels: Vec<ChainLevel>,
}

impl StabChain {
    fn build(degree: usize, gens: &[Permutation], priority: &[usize]) -> StabChain {
        let mut base_order: Vec<usize> = Vec::with_capacity(degree);
        for &p in priority.iter().chain((0..degree).collect::<Vec<_>>().iter()) {
            if !base_order.contains(&p) {
                base_order.push(p);
            }
        }
        let mut chain = StabChain { degree, base_order, levels: Vec::new() };
        // Pre-create the first level at the earliest base point moved by any
        // generator, so a priority point is honored even when the first
        // sifted generator happens to fix it.
        let first_base = chain
            .base_order
            .iter()
            .copied()
            .find(|&p| gens.iter().any(|g| g.apply(p) != p));
        if let Some(base) = first_base {
            chain.levels.push(ChainLevel::new(base, degree));
        }
        for g in gens {
            chain.sift_in(g.clone(), 0);
        }
        chain.close();
        chain
    }

    /// Generators of the group at `level`: everything installed at this level
    /// or deeper (all of which fix the earlier base points).
    fn level_gens(&self, level: usize) -> Vec<Permutation> {
        self.levels[level..].iter().flat_map(|l| l.gens.iter().cloned()).collect()
    }

    fn refresh_orbits_down_to(&mut self, level: usize) {
        for i in (0..=level).rev() {
            let gens = self.level_gens(i);
            let degree = self.degree;
            self.levels[i].recompute_orbit(&gens, degree);
        }
    }

    /// Sifts `g` from `level` downwards; a residue that cannot be expressed is
    /// installed as a new generator at the level where it gets stuck.
    /// Returns true when the chain changed.
    fn sift_in(&mut self, mut g: Permutation, mut level: usize) -> bool {
        loop {
            if g.is_identity() {
                return false;
            }
            if level == self.levels.len() {
                let base = *self
                    .base_order
                    .iter()
                    .find(|&&p| g.apply(p) != p)
                    .expect("non-identity permutation moves some point");
                self.levels.push(ChainLevel::new(base, self.degree));
            }
            let lvl = &self.levels[level];
            let p = g.apply(lvl.base);
            match &lvl.transversal[p] {
                Some(t) => {
                    g = g.compose(&t.inverse());
                    level += 1;
                }
                None => {
                    self.levels[level].gens.push(g);
                    self.refresh_orbits_down_to(level);
                    return true;
                }
            }
        }
    }

    /// Schreier closure: every Schreier generator of every level must sift to
    /// the identity through the levels below.
    fn close(&mut self) {
        'outer: loop {
            for i in 0..self.levels.len() {
                let orbit = self.levels[i].orbit.clone();
                let gens = self.level_gens(i);
                for &u in &orbit {
                    let tu = self.levels[i].transversal[u].clone().unwrap();
                    for s in &gens {
                        let v = s.apply(u);
                        let tv_inv = self.levels[i].transversal[v].clone().unwrap().inverse();
                        let schreier = tu.compose(s).compose(&tv_inv);
                        if self.sift_in(schreier, i + 1) {
                            continue 'outer;
                        }
                    }
                }
            }
            return;
        }
    }

    fn order(&self) -> BigUint {
        let mut order = BigUint::from(1u32);
        for lvl in &self.levels {
            order *= BigUint::from(lvl.orbit.len());
        }
        order
    }

    fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let mut g = g.clone();
        for lvl in &self.levels {
            if g.is_identity() {
                return true;
            }
            let p = g.apply(lvl.base);
            match &lvl.transversal[p] {
                Some(t) => g = g.compose(&t.inverse()),
                None => return false,
            }
        }
        g.is_identity()
    }

    /// Generators of the stabilizer of the first base point: the generators
    /// of all levels past the first.
    fn first_point_stabilizer_gens(&self) -> Vec<Permutation> {
        let mut out: Vec<Permutation> = Vec::new();
        for lvl in self.levels.iter().skip(1) {
            for g in &lvl.gens {
                if !g.is_identity() && !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }
}

/// A permutation group given by generators, with a lazily built,
/// deterministic stabilizer chain.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Permutation>,
    chain: OnceCell<StabChain>,
}

impl PermGroup {
    /// Builds a group from generators; identity generators are dropped.
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Result<Self, PermError> {
        for g in &gens {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch { expected: degree, got: g.degree() });
            }
        }
        let gens = gens.into_iter().filter(|g| !g.is_identity()).collect();
        Ok(PermGroup { degree, gens, chain: OnceCell::new() })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, gens: Vec::new(), chain: OnceCell::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| StabChain::build(self.degree, &self.gens, &[]))
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain().contains(g)
    }

    /// The sorted orbit of `point`.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        assert!(point < self.degree, "point out of range");
        let mut orbit = vec![point];
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for g in &self.gens {
                let q = g.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                }
            }
        }
        orbit.sort_unstable();
        orbit
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        point_orbits(&self.gens, self.degree)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// The stabilizer of `point` as a group in its own right, computed from a
    /// stabilizer chain whose base starts at `point`.
    pub fn stabilizer(&self, point: usize) -> PermGroup {
        assert!(point < self.degree, "point out of range");
        let chain = StabChain::build(self.degree, &self.gens, &[point]);
        let gens = if chain.levels.first().map(|l| l.base) == Some(point) {
            chain.first_point_stabilizer_gens()
        } else {
            // No generator moves `point`, so the whole group stabilizes it.
            self.gens.clone()
        };
        PermGroup { degree: self.degree, gens, chain: OnceCell::new() }
    }

    /// True when every generator of `other` sifts into this group.
    pub fn is_subgroup(&self, other: &PermGroup) -> bool {
        other.degree == self.degree && other.gens.iter().all(|g| self.contains(g))
    }
}

/// The action of a group on the right cosets of a subgroup by right
/// multiplication. Coset 0 is the trivial coset (representative identity).
#[derive(Clone, Debug)]
pub struct CosetAction {
    /// Number of cosets.
    pub degree: usize,
    /// `gen_images[i]` is the permutation of coset indices induced by the
    /// i-th group generator.
    pub gen_images: Vec<Permutation>,
    /// Coset representatives in discovery order; `reps[0]` is the identity.
    pub reps: Vec<Permutation>,
}

impl CosetAction {
    /// Index of the coset containing `g`, if enumerated.
    pub fn coset_of(&self, g: &Permutation, subgroup: &PermGroup) -> Option<usize> {
        (0..self.degree).find(|&j| subgroup.contains(&g.compose(&self.reps[j].inverse())))
    }
}

/// Enumerates the right cosets of `subgroup` in `group` and the action of the
/// group generators on them by right multiplication.
pub fn coset_action(group: &PermGroup, subgroup: &PermGroup) -> Result<CosetAction, PermError> {
    if !group.is_subgroup(subgroup) {
        return Err(PermError::NotSubgroup);
    }
    let mut reps: Vec<Permutation> = vec![Permutation::identity(group.degree())];
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < reps.len() {
        let rep = reps[head].clone();
        let mut row = Vec::with_capacity(group.generators().len());
        for g in group.generators() {
            let cand = rep.compose(g);
            let found = reps
                .iter()
                .position(|r| subgroup.contains(&cand.compose(&r.inverse())));
            match found {
                Some(j) => row.push(j),
                None => {
                    reps.push(cand);
                    row.push(reps.len() - 1);
                }
            }
        }
        edges.push(row);
        head += 1;
    }
    let degree = reps.len();
    let gen_images = (0..group.generators().len())
        .map(|gi| {
            Permutation::from_images((0..degree).map(|c| edges[c][gi]).collect())
                .expect("coset action images form a permutation")
        })
        .collect();
    Ok(CosetAction { degree, gen_images, reps })
}

/// One double coset `H g H`, described by a representative, its size, and the
/// indices of the right cosets `Hx` it contains (in the companion
/// [`CosetAction`] labelling).
#[derive(Clone, Debug)]
pub struct DoubleCoset {
    pub rep: Permutation,
    pub size: BigUint,
    pub coset_indices: Vec<usize>,
}

/// The complete list of `H`-`H` double cosets of `group`, computed as
/// `H`-orbits on the right cosets of `H`. Sizes sum to the group order.
pub fn double_cosets(group: &PermGroup, subgroup: &PermGroup) -> Result<Vec<DoubleCoset>, PermError> {
    let action = coset_action(group, subgroup)?;
    // Action of each subgroup generator on coset indices.
    let sub_images: Vec<Vec<usize>> = subgroup
        .generators()
        .iter()
        .map(|h| {
            (0..action.degree)
                .map(|c| {
                    let cand = action.reps[c].compose(h);
                    action
                        .coset_of(&cand, subgroup)
                        .expect("coset of an enumerated element exists")
                })
                .collect()
        })
        .collect();
    let h_order = subgroup.order();
    let mut seen = vec![false; action.degree];
    let mut out = Vec::new();
    for start in 0..action.degree {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < orbit.len() {
            let c = orbit[head];
            head += 1;
            for images in &sub_images {
                let d = images[c];
                if !seen[d] {
                    seen[d] = true;
                    orbit.push(d);
                }
            }
        }
        orbit.sort_unstable();
        out.push(DoubleCoset {
            rep: action.reps[start].clone(),
            size: h_order.clone() * BigUint::from(orbit.len()),
            coset_indices: orbit,
        });
    }
    let total: BigUint = out.iter().map(|dc| dc.size.clone()).sum();
    assert_eq!(total, group.order(), "double coset sizes must sum to the group order");
    Ok(out)
}

/// Membership test for a single permutation (degree must match).
pub fn is_subgroup_element(group: &PermGroup, perm: &Permutation) -> bool {
    group.contains(perm)
}
