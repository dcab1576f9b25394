//! Catalogued witness families: deterministic branch data for each example
//! pipeline, parameter validation, and claim lists comparing every computed
//! quantity against its closed form.

use serde::Serialize;
use thiserror::Error;

use crate::coverings::{validate_covering, BranchPoint, CoveringData, CoveringError};
use crate::graphs::{
    certify_prym, lattice_complement, lattice_graph, latin_square_graph, schlaefli_graph,
    GraphError, PrymGraph,
};
use crate::permgroups::{PermGroup, Permutation};
use crate::prym::{
    build_triple, dimensions, fixed_point_analysis, DimensionReport, EigenvalueTag,
    FixedPointReport, PrymError, PrymTriple,
};
use crate::splitting::{
    analyze_fiber_product, canonical_split, classical_prym_dims, from_tower,
    lattice_reflection, side_transposition, tower_from_composite, FiberProductReport,
    SplitError, SplitResult,
};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("unknown example id {0:?}")]
    UnknownId(String),
    #[error("example {id} does not take parameter {param}")]
    UnexpectedParam { id: &'static str, param: &'static str },
    #[error("example {id} requires parameter {param}")]
    MissingParam { id: &'static str, param: &'static str },
    #[error("parameter {param} = {value} is outside {low}..={high} for example {id}")]
    ParamRange { id: &'static str, param: &'static str, value: usize, low: usize, high: usize },
    #[error("parameter sum l1 + l2 = {sum} is outside {low}..={high} for example {id}")]
    SumRange { id: &'static str, sum: usize, low: usize, high: usize },
    #[error(transparent)]
    Perm(#[from] crate::permgroups::PermError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Prym(#[from] PrymError),
    #[error(transparent)]
    Split(#[from] SplitError),
}

/// The catalogued example pipelines, addressed by their fixed ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// Reflection pairs on the twenty-seven vertex graph.
    SchlaefliReflections,
    /// Coordinate-exchange pairs on the square lattice graph.
    LatticeExchanges,
    /// Full-exchange pairs plus one-sided transpositions over the lattice
    /// complement; the correspondence has fixed points by design.
    TwistedExchanges,
    /// Translation branch points on the Latin-square graph.
    LatinTranslations,
    /// Two-step tower with three complete pairs and inner branch points.
    MixedTower,
    /// Two-step tower with four complete pairs and no inner branch points.
    EtaleTower,
    /// One-sided transposition pairs over the lattice complement; the
    /// monodromy is a full product group.
    ProductTranspositions,
}

impl FamilyId {
    pub fn parse(text: &str) -> Result<FamilyId, FamilyError> {
        FamilyId::all()
            .iter()
            .copied()
            .find(|id| id.token() == text)
            .ok_or_else(|| FamilyError::UnknownId(text.to_string()))
    }

    /// The fixed command-line id of the example.
    pub fn token(self) -> &'static str {
        match self {
            FamilyId::SchlaefliReflections => "5.1",
            FamilyId::LatticeExchanges => "5.2",
            FamilyId::TwistedExchanges => "5.3",
            FamilyId::LatinTranslations => "5.4",
            FamilyId::MixedTower => "6.4a",
            FamilyId::EtaleTower => "6.4b",
            FamilyId::ProductTranspositions => "7.1",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            FamilyId::SchlaefliReflections => "reflection pairs on the 27-vertex graph",
            FamilyId::LatticeExchanges => "coordinate-exchange pairs on the square lattice",
            FamilyId::TwistedExchanges => "full exchanges with one-sided transpositions",
            FamilyId::LatinTranslations => "translations on the Latin-square graph",
            FamilyId::MixedTower => "two-step tower with inner branch points",
            FamilyId::EtaleTower => "two-step tower with unramified relative cover",
            FamilyId::ProductTranspositions => "one-sided transposition pairs, product monodromy",
        }
    }

    pub fn all() -> [FamilyId; 7] {
        [
            FamilyId::SchlaefliReflections,
            FamilyId::LatticeExchanges,
            FamilyId::TwistedExchanges,
            FamilyId::LatinTranslations,
            FamilyId::MixedTower,
            FamilyId::EtaleTower,
            FamilyId::ProductTranspositions,
        ]
    }
}

/// Optional parameters accepted by the example pipelines. Each family
/// validates exactly the parameters it uses and rejects the rest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FamilyParams {
    pub n: Option<usize>,
    pub l: Option<usize>,
    pub l1: Option<usize>,
    pub l2: Option<usize>,
    pub m: Option<usize>,
}

/// One computed quantity compared against its closed form.
#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub name: &'static str,
    pub expected: i64,
    pub actual: i64,
}

impl Claim {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

/// Full pipeline output for one example: the analyzed triple, its dimension
/// and fixed-point reports, optional split and fiber-product sections, and
/// the claim list.
#[derive(Debug)]
pub struct FamilyOutcome {
    pub id: FamilyId,
    pub params: FamilyParams,
    pub triple: PrymTriple,
    pub analysis: DimensionReport,
    pub fixed: FixedPointReport,
    pub split: Option<SplitResult>,
    pub fiber: Option<FiberProductReport>,
    pub claims: Vec<Claim>,
    pub warnings: Vec<String>,
}

impl FamilyOutcome {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(Claim::passed)
    }
}

fn require(
    id: FamilyId,
    value: Option<usize>,
    param: &'static str,
    low: usize,
    high: usize,
) -> Result<usize, FamilyError> {
    let value = value.ok_or(FamilyError::MissingParam { id: id.token(), param })?;
    if value < low || value > high {
        return Err(FamilyError::ParamRange { id: id.token(), param, value, low, high });
    }
    Ok(value)
}

fn optional(
    id: FamilyId,
    value: Option<usize>,
    param: &'static str,
    low: usize,
    high: usize,
) -> Result<usize, FamilyError> {
    match value {
        None => Ok(low),
        Some(_) => require(id, value, param, low, high),
    }
}

fn forbid(id: FamilyId, value: Option<usize>, param: &'static str) -> Result<(), FamilyError> {
    if value.is_some() {
        return Err(FamilyError::UnexpectedParam { id: id.token(), param });
    }
    Ok(())
}

/// Checked parameters of one family, with defaults applied.
#[derive(Clone, Copy, Debug)]
struct Checked {
    n: usize,
    l: usize,
    l1: usize,
    l2: usize,
}

/// Validates the parameters against the family's stated ranges and applies
/// defaults. Every family rejects parameters it does not use.
fn check_params(id: FamilyId, params: &FamilyParams) -> Result<Checked, FamilyError> {
    forbid(id, params.m, "m")?;
    let mut checked = Checked { n: 0, l: 0, l1: 0, l2: 0 };
    match id {
        FamilyId::SchlaefliReflections => {
            checked.n = require(id, params.n, "n", 7, 12)?;
            forbid(id, params.l, "l")?;
            forbid(id, params.l1, "l1")?;
            forbid(id, params.l2, "l2")?;
        }
        FamilyId::LatticeExchanges => {
            checked.n = require(id, params.n, "n", 3, 5)?;
            checked.l = optional(id, params.l, "l", 0, 3)?;
            forbid(id, params.l1, "l1")?;
            forbid(id, params.l2, "l2")?;
        }
        FamilyId::TwistedExchanges => {
            checked.n = require(id, params.n, "n", 3, 6)?;
            checked.l1 = optional(id, params.l1, "l1", 0, 6)?;
            checked.l2 = optional(id, params.l2, "l2", 0, 6)?;
            forbid(id, params.l, "l")?;
        }
        FamilyId::LatinTranslations => {
            checked.n = require(id, params.n, "n", 4, 5)?;
            checked.l = require(id, params.l, "l", 2, 3)?;
            forbid(id, params.l1, "l1")?;
            forbid(id, params.l2, "l2")?;
        }
        FamilyId::MixedTower | FamilyId::EtaleTower => {
            forbid(id, params.n, "n")?;
            forbid(id, params.l, "l")?;
            forbid(id, params.l1, "l1")?;
            forbid(id, params.l2, "l2")?;
        }
        FamilyId::ProductTranspositions => {
            checked.n = require(id, params.n, "n", 3, 4)?;
            checked.l1 = optional(id, params.l1, "l1", 0, 3)?;
            checked.l2 = optional(id, params.l2, "l2", 0, 3)?;
            forbid(id, params.l, "l")?;
            let sum = checked.l1 + checked.l2;
            if !(1..=3).contains(&sum) {
                return Err(FamilyError::SumRange { id: id.token(), sum, low: 1, high: 3 });
            }
        }
    }
    Ok(checked)
}

/// Validates parameters without building anything.
pub fn validate_params(id: FamilyId, params: &FamilyParams) -> Result<(), FamilyError> {
    check_params(id, params).map(|_| ())
}

fn paired(perms: &[Permutation]) -> Vec<BranchPoint> {
    let mut branch = Vec::with_capacity(2 * perms.len());
    for (i, p) in perms.iter().enumerate() {
        branch.push(BranchPoint::new(format!("b{}", 2 * i + 1), p.clone()));
        branch.push(BranchPoint::new(format!("b{}", 2 * i + 2), p.clone()));
    }
    branch
}

fn singles(perms: &[Permutation]) -> Vec<BranchPoint> {
    perms
        .iter()
        .enumerate()
        .map(|(i, p)| BranchPoint::new(format!("b{}", i + 1), p.clone()))
        .collect()
}

/// Translation of the n-by-n grid by `(a, b)` in the row-major layout.
fn grid_translation(n: usize, a: usize, b: usize) -> Permutation {
    let images = (0..n * n)
        .map(|p| ((p / n + a) % n) * n + (p % n + b) % n)
        .collect();
    Permutation::from_images(images).expect("translations are bijections")
}

fn double_swap(degree: usize, pairs: &[(usize, usize)]) -> Permutation {
    let mut images: Vec<usize> = (0..degree).collect();
    for &(a, b) in pairs {
        images.swap(a, b);
    }
    Permutation::from_images(images).expect("disjoint swaps are bijections")
}

fn transposition(degree: usize, a: usize, b: usize) -> Permutation {
    double_swap(degree, &[(a, b)])
}

/// Branch permutations of the tower with three complete pairs: ten block
/// transpositions and four inner simple branch points.
fn mixed_tower_perms() -> Vec<Permutation> {
    let s12 = double_swap(6, &[(0, 2), (1, 3)]);
    let s13 = double_swap(6, &[(0, 4), (1, 5)]);
    let s23 = double_swap(6, &[(2, 4), (3, 5)]);
    let u1 = transposition(6, 0, 1);
    let u2 = transposition(6, 2, 3);
    let mut perms = Vec::new();
    for p in [&s12, &s12, &s13, &s13, &s23, &s23, &s12, &s12, &s13, &s13] {
        perms.push((*p).clone());
    }
    for p in [&u1, &u1, &u2, &u2] {
        perms.push((*p).clone());
    }
    perms
}

/// Branch permutations of the tower with four complete pairs: eighteen block
/// transpositions, one pair twisted so the composite stays connected.
fn etale_tower_perms() -> Vec<Permutation> {
    let t12 = double_swap(8, &[(0, 3), (1, 2)]);
    let s12 = double_swap(8, &[(0, 2), (1, 3)]);
    let s13 = double_swap(8, &[(0, 4), (1, 5)]);
    let s14 = double_swap(8, &[(0, 6), (1, 7)]);
    let s23 = double_swap(8, &[(2, 4), (3, 5)]);
    let s24 = double_swap(8, &[(2, 6), (3, 7)]);
    let s34 = double_swap(8, &[(4, 6), (5, 7)]);
    [
        &t12, &t12, &s12, &s12, &s13, &s13, &s13, &s13, &s14, &s14, &s23, &s23, &s24, &s24, &s34,
        &s34, &s34, &s34,
    ]
    .iter()
    .map(|p| (**p).clone())
    .collect()
}

/// Builds the deterministic witness covering of a family. The same
/// parameters always produce byte-identical branch data.
pub fn witness_covering(id: FamilyId, params: &FamilyParams) -> Result<CoveringData, FamilyError> {
    let p = check_params(id, params)?;
    let covering = match id {
        FamilyId::SchlaefliReflections => {
            let taus = schlaefli_graph().generators;
            let perms: Vec<Permutation> = (0..p.n).map(|i| taus[i % 6].clone()).collect();
            validate_covering(27, paired(&perms))?
        }
        FamilyId::LatticeExchanges => {
            let mut perms: Vec<Permutation> =
                (0..4).map(|h| lattice_reflection(p.n, h)).collect();
            for _ in 0..p.l {
                perms.push(lattice_reflection(p.n, 0));
            }
            validate_covering(p.n * p.n, paired(&perms))?
        }
        FamilyId::TwistedExchanges => {
            let mut perms = Vec::new();
            for _ in 0..=p.l1 {
                perms.push(lattice_reflection(p.n, 0));
            }
            for h in 1..p.n {
                perms.push(side_transposition(p.n, 2, h));
            }
            for _ in 0..p.l2 {
                perms.push(side_transposition(p.n, 2, 1));
            }
            validate_covering(p.n * p.n, paired(&perms))?
        }
        FamilyId::LatinTranslations => {
            let t1 = grid_translation(p.n, 1, 1);
            let t2 = grid_translation(p.n, 1, 2);
            let mut perms = Vec::new();
            for _ in 0..(p.l - 1) * p.n {
                perms.push(t1.clone());
            }
            for _ in 0..p.n {
                perms.push(t2.clone());
            }
            validate_covering(p.n * p.n, singles(&perms))?
        }
        FamilyId::MixedTower => validate_covering(6, singles(&mixed_tower_perms()))?,
        FamilyId::EtaleTower => validate_covering(8, singles(&etale_tower_perms()))?,
        FamilyId::ProductTranspositions => {
            let mut perms = Vec::new();
            for h in 1..p.n {
                perms.push(side_transposition(p.n, 1, h));
            }
            for _ in 0..p.l1 {
                perms.push(side_transposition(p.n, 1, 1));
            }
            for h in 1..p.n {
                perms.push(side_transposition(p.n, 2, h));
            }
            for _ in 0..p.l2 {
                perms.push(side_transposition(p.n, 2, 1));
            }
            validate_covering(p.n * p.n, paired(&perms))?
        }
    };
    Ok(covering)
}

fn single_copy_triple(
    base: PrymGraph,
    covering: CoveringData,
) -> Result<PrymTriple, FamilyError> {
    let certificate = certify_prym(&base.matrix, &base.generators)?;
    Ok(build_triple(base, certificate, 1, EigenvalueTag::Plus, covering)?)
}

fn claim(name: &'static str, expected: i64, actual: i64) -> Claim {
    Claim { name, expected, actual }
}

fn bool_claim(name: &'static str, expected: bool, actual: bool) -> Claim {
    claim(name, expected as i64, actual as i64)
}

/// Runs the full pipeline of a family on the given covering and compares
/// every computed quantity with its closed form. The covering is usually the
/// deterministic witness, possibly round-tripped through a cache.
pub fn analyze_family(
    id: FamilyId,
    params: &FamilyParams,
    covering: CoveringData,
) -> Result<FamilyOutcome, FamilyError> {
    let p = check_params(id, params)?;
    let mut claims = Vec::new();
    let mut warnings = Vec::new();
    let mut split = None;
    let mut fiber = None;

    let triple = match id {
        FamilyId::SchlaefliReflections => {
            let base = schlaefli_graph();
            let aut_order: u64 = PermGroup::new(27, base.generators.clone())?
                .order()
                .try_into()
                .expect("automorphism order fits in u64");
            claims.push(claim("automorphism_order", 51840, aut_order as i64));
            single_copy_triple(base, covering)?
        }
        FamilyId::LatticeExchanges => single_copy_triple(lattice_graph(p.n)?, covering)?,
        FamilyId::TwistedExchanges => single_copy_triple(lattice_complement(p.n)?, covering)?,
        FamilyId::LatinTranslations => single_copy_triple(latin_square_graph(p.n)?, covering)?,
        FamilyId::MixedTower => from_tower(&tower_from_composite(2, 3, &covering)?)?,
        FamilyId::EtaleTower => from_tower(&tower_from_composite(2, 4, &covering)?)?,
        FamilyId::ProductTranspositions => {
            single_copy_triple(lattice_complement(p.n)?, covering)?
        }
    };

    let analysis = dimensions(&triple, 0)?;
    let fixed = fixed_point_analysis(&triple);
    let (n, l, l1, l2) = (p.n as i64, p.l as i64, p.l1 as i64, p.l2 as i64);

    match id {
        FamilyId::SchlaefliReflections => {
            claims.push(claim("genus", 6 * n - 26, analysis.genus));
            claims.push(claim("d_plus", n - 6, analysis.d_plus));
            claims.push(claim("d_minus", 5 * n - 20, analysis.d_minus));
            claims.push(claim("intersection", 0, analysis.intersection));
            claims.push(claim("exponent", 6, analysis.exponent.unwrap_or(-1)));
            claims.push(bool_claim("fixed_point_free", true, fixed.fixed_point_free));
            claims.push(bool_claim("prym_tyurin", true, analysis.prym_tyurin));
        }
        FamilyId::LatticeExchanges => {
            let genus = (n - 1) * (n - 1) + l * n * (n - 1) / 2;
            let d_plus = (n - 1) * (n - 3) + l * (n - 1) * (n - 2) / 2;
            claims.push(claim("genus", genus, analysis.genus));
            claims.push(claim("d_plus", d_plus, analysis.d_plus));
            claims.push(claim("intersection", 0, analysis.intersection));
            claims.push(bool_claim("fixed_point_free", true, fixed.fixed_point_free));
            if p.n == 3 {
                claims.push(claim("exponent", 3, analysis.exponent.unwrap_or(-1)));
                claims.push(bool_claim("prym_tyurin", true, analysis.prym_tyurin));
            }
        }
        FamilyId::TwistedExchanges => {
            let genus = (n - 1) * (n - 2) / 2 + l1 * n * (n - 1) / 2 + l2 * n;
            claims.push(claim("genus", genus, analysis.genus));
            claims.push(claim("d_plus", l1 * (n - 1) + l2, analysis.d_plus));
            claims.push(claim("intersection", (l1 + 1) * n * (n - 1), analysis.intersection));
            claims.push(claim("exponent", n, analysis.exponent.unwrap_or(-1)));
            claims.push(bool_claim("fixed_point_free", false, fixed.fixed_point_free));
            claims.push(bool_claim("prym_tyurin", false, analysis.prym_tyurin));
        }
        FamilyId::LatinTranslations => {
            let genus = 1 - n * n + l * n * n * (n - 1) / 2;
            claims.push(claim("genus", genus, analysis.genus));
            if p.n % 2 == 1 {
                let d_plus = -(n - 1) * (n - 2) + l * n * (n - 1) * (n - 3) / 2;
                claims.push(claim("d_plus", d_plus, analysis.d_plus));
                claims.push(claim("intersection", 0, analysis.intersection));
                claims.push(bool_claim("fixed_point_free", true, fixed.fixed_point_free));
            } else {
                claims.push(claim("intersection", l * n * n, analysis.intersection));
                claims.push(bool_claim("fixed_point_free", false, fixed.fixed_point_free));
                warnings.push(format!(
                    "displacement analysis found nonempty fixed-point sets (aggregate {}): \
                     the plus-dimension closed form assumes an odd grid size and is omitted",
                    fixed.aggregate
                ));
            }
        }
        FamilyId::MixedTower => {
            let result = canonical_split(&triple)?;
            let (cd_plus, cd_minus) = classical_prym_dims(&result, analysis.genus)?;
            let block_points = result.block_covering.branch_points().len() as i64;
            let total_points = triple.covering().branch_points().len() as i64;
            claims.push(claim("genus", 7, analysis.genus));
            claims.push(claim("quotient_genus", 3, result.genus_quotient));
            claims.push(claim("d_plus", 4, analysis.d_plus));
            claims.push(claim("d_minus", 3, analysis.d_minus));
            claims.push(claim("classical_d_plus", 4, cd_plus));
            claims.push(claim("classical_d_minus", 3, cd_minus));
            claims.push(claim("double_branch_points", 10, block_points));
            claims.push(claim("simple_branch_points", 4, total_points - block_points));
            claims.push(claim("intersection", 4, analysis.intersection));
            claims.push(bool_claim("simple", true, result.simple));
            split = Some(result);
        }
        FamilyId::EtaleTower => {
            let result = canonical_split(&triple)?;
            let (cd_plus, cd_minus) = classical_prym_dims(&result, analysis.genus)?;
            let block_points = result.block_covering.branch_points().len() as i64;
            let total_points = triple.covering().branch_points().len() as i64;
            let relative_ramification = (2 * analysis.genus - 2)
                - result.relative_degree as i64 * (2 * result.genus_quotient - 2);
            claims.push(claim("genus", 11, analysis.genus));
            claims.push(claim("quotient_genus", 6, result.genus_quotient));
            claims.push(claim("d_plus", 5, analysis.d_plus));
            claims.push(claim("d_minus", 6, analysis.d_minus));
            claims.push(claim("classical_d_plus", 5, cd_plus));
            claims.push(claim("classical_d_minus", 6, cd_minus));
            claims.push(claim("double_branch_points", 18, block_points));
            claims.push(claim("simple_branch_points", 0, total_points - block_points));
            claims.push(claim("relative_ramification", 0, relative_ramification));
            claims.push(claim("intersection", 0, analysis.intersection));
            claims.push(bool_claim("simple", true, result.simple));
            split = Some(result);
        }
        FamilyId::ProductTranspositions => {
            let report = analyze_fiber_product(&triple)?;
            claims.push(claim("genus", (n - 1) * (n - 1) + (l1 + l2) * n, analysis.genus));
            claims.push(claim("d_plus", l1 + l2, analysis.d_plus));
            claims.push(claim("exponent", n, analysis.exponent.unwrap_or(-1)));
            claims.push(claim("intersection", 0, analysis.intersection));
            claims.push(bool_claim("fixed_point_free", true, fixed.fixed_point_free));
            claims.push(bool_claim("prym_tyurin", true, analysis.prym_tyurin));
            claims.push(claim("first_quotient_genus", l1, report.genus_first));
            claims.push(claim("second_quotient_genus", l2, report.genus_second));
            claims.push(bool_claim(
                "intersection_is_point_stabilizer",
                true,
                report.intersection_is_point_stabilizer,
            ));
            claims.push(bool_claim("join_is_monodromy", true, report.join_is_monodromy));
            fiber = Some(report);
        }
    }

    Ok(FamilyOutcome {
        id,
        params: *params,
        triple,
        analysis,
        fixed,
        split,
        fiber,
        claims,
        warnings,
    })
}

/// Builds the witness and runs the full pipeline in one step.
pub fn run_family(id: FamilyId, params: &FamilyParams) -> Result<FamilyOutcome, FamilyError> {
    let covering = witness_covering(id, params)?;
    analyze_family(id, params, covering)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_n(n: usize) -> FamilyParams {
        FamilyParams { n: Some(n), ..FamilyParams::default() }
    }

    #[test]
    fn tokens_round_trip() {
        for id in FamilyId::all() {
            assert_eq!(FamilyId::parse(id.token()).unwrap(), id);
        }
        assert!(matches!(FamilyId::parse("9.9"), Err(FamilyError::UnknownId(_))));
    }

    #[test]
    fn parameter_validation_rejects_out_of_range_values() {
        let id = FamilyId::SchlaefliReflections;
        assert!(matches!(
            validate_params(id, &with_n(6)),
            Err(FamilyError::ParamRange { param: "n", value: 6, low: 7, high: 12, .. })
        ));
        assert!(matches!(
            validate_params(id, &FamilyParams::default()),
            Err(FamilyError::MissingParam { param: "n", .. })
        ));
        assert!(matches!(
            validate_params(id, &FamilyParams { n: Some(8), l: Some(1), ..Default::default() }),
            Err(FamilyError::UnexpectedParam { param: "l", .. })
        ));
        assert!(matches!(
            validate_params(FamilyId::MixedTower, &with_n(3)),
            Err(FamilyError::UnexpectedParam { param: "n", .. })
        ));
        assert!(matches!(
            validate_params(FamilyId::LatinTranslations, &with_n(5)),
            Err(FamilyError::MissingParam { param: "l", .. })
        ));
        assert!(matches!(
            validate_params(
                FamilyId::ProductTranspositions,
                &FamilyParams { n: Some(3), ..Default::default() }
            ),
            Err(FamilyError::SumRange { sum: 0, .. })
        ));
        assert!(matches!(
            validate_params(
                FamilyId::ProductTranspositions,
                &FamilyParams { n: Some(3), l1: Some(2), l2: Some(2), ..Default::default() }
            ),
            Err(FamilyError::SumRange { sum: 4, .. })
        ));
    }

    #[test]
    fn reflection_family_matches_closed_forms() {
        for n in 7..=12 {
            let outcome = run_family(FamilyId::SchlaefliReflections, &with_n(n)).unwrap();
            assert!(outcome.all_passed(), "claims failed for n = {n}: {:?}", outcome.claims);
            assert!(outcome.warnings.is_empty());
            assert_eq!(outcome.analysis.genus, 6 * n as i64 - 26);
            assert_eq!(outcome.analysis.d_plus, n as i64 - 6);
            assert_eq!(outcome.triple.covering().branch_points().len(), 2 * n);
        }
    }

    #[test]
    fn exchange_family_matches_closed_forms() {
        for n in 3..=5usize {
            for l in 0..=3usize {
                let params = FamilyParams { n: Some(n), l: Some(l), ..Default::default() };
                let outcome = run_family(FamilyId::LatticeExchanges, &params).unwrap();
                assert!(
                    outcome.all_passed(),
                    "claims failed for n = {n}, l = {l}: {:?}",
                    outcome.claims
                );
                let (n, l) = (n as i64, l as i64);
                assert_eq!(outcome.analysis.genus, (n - 1) * (n - 1) + l * n * (n - 1) / 2);
            }
        }
    }

    #[test]
    fn twisted_family_aggregates_the_intersection_number() {
        for n in 3..=6usize {
            for l1 in 0..=2usize {
                for l2 in 0..=2usize {
                    let params = FamilyParams {
                        n: Some(n),
                        l1: Some(l1),
                        l2: Some(l2),
                        ..Default::default()
                    };
                    let outcome = run_family(FamilyId::TwistedExchanges, &params).unwrap();
                    assert!(
                        outcome.all_passed(),
                        "claims failed for n = {n}, l1 = {l1}, l2 = {l2}: {:?}",
                        outcome.claims
                    );
                    assert_eq!(
                        outcome.analysis.intersection,
                        ((l1 + 1) * n * (n - 1)) as i64
                    );
                }
            }
        }
        let params =
            FamilyParams { n: Some(6), l1: Some(0), l2: Some(6), ..Default::default() };
        let outcome = run_family(FamilyId::TwistedExchanges, &params).unwrap();
        assert!(outcome.all_passed());
        assert_eq!(outcome.analysis.genus, 46);
        assert_eq!(outcome.analysis.d_plus, 6);
    }

    #[test]
    fn latin_family_splits_on_parity() {
        for l in 2..=3usize {
            let params = FamilyParams { n: Some(5), l: Some(l), ..Default::default() };
            let outcome = run_family(FamilyId::LatinTranslations, &params).unwrap();
            assert!(outcome.all_passed(), "claims failed for l = {l}: {:?}", outcome.claims);
            assert!(outcome.warnings.is_empty());
            assert!(outcome.fixed.fixed_point_free);
        }
        let params = FamilyParams { n: Some(5), l: Some(2), ..Default::default() };
        let outcome = run_family(FamilyId::LatinTranslations, &params).unwrap();
        assert_eq!(outcome.analysis.genus, 76);
        assert_eq!(outcome.analysis.d_plus, 28);

        let params = FamilyParams { n: Some(4), l: Some(2), ..Default::default() };
        let outcome = run_family(FamilyId::LatinTranslations, &params).unwrap();
        assert!(outcome.all_passed(), "even-size claims: {:?}", outcome.claims);
        assert!(!outcome.fixed.fixed_point_free);
        assert!(outcome.fixed.aggregate > 0, "fixed-point sets must be reported nonempty");
        assert_eq!(outcome.analysis.intersection, 32);
        assert_eq!(outcome.warnings.len(), 1);
        assert!(outcome.warnings[0].contains("nonempty fixed-point sets"));
    }

    #[test]
    fn tower_families_match_both_dimension_paths() {
        let mixed = run_family(FamilyId::MixedTower, &FamilyParams::default()).unwrap();
        assert!(mixed.all_passed(), "{:?}", mixed.claims);
        let result = mixed.split.as_ref().unwrap();
        assert_eq!(result.blocks.len(), 3);
        assert_eq!(result.relative_degree, 2);
        assert!(result.complete_blocks);

        let etale = run_family(FamilyId::EtaleTower, &FamilyParams::default()).unwrap();
        assert!(etale.all_passed(), "{:?}", etale.claims);
        let result = etale.split.as_ref().unwrap();
        assert_eq!(result.blocks.len(), 4);
        assert!(result.simple);
    }

    #[test]
    fn product_family_certifies_the_quotients() {
        for n in 3..=4usize {
            for l1 in 0..=3usize {
                for l2 in 0..=3usize {
                    if !(1..=3).contains(&(l1 + l2)) {
                        continue;
                    }
                    let params = FamilyParams {
                        n: Some(n),
                        l1: Some(l1),
                        l2: Some(l2),
                        ..Default::default()
                    };
                    let outcome = run_family(FamilyId::ProductTranspositions, &params).unwrap();
                    assert!(
                        outcome.all_passed(),
                        "claims failed for n = {n}, l1 = {l1}, l2 = {l2}: {:?}",
                        outcome.claims
                    );
                    let report = outcome.fiber.as_ref().unwrap();
                    assert_eq!(report.genus_first, l1 as i64);
                    assert_eq!(report.genus_second, l2 as i64);
                    assert_eq!(outcome.analysis.exponent, Some(n as i64));
                }
            }
        }
    }

    #[test]
    fn witnesses_are_deterministic() {
        let params = FamilyParams { n: Some(8), ..Default::default() };
        let a = witness_covering(FamilyId::SchlaefliReflections, &params).unwrap();
        let b = witness_covering(FamilyId::SchlaefliReflections, &params).unwrap();
        assert_eq!(a.degree(), b.degree());
        for (x, y) in a.branch_points().iter().zip(b.branch_points()) {
            assert_eq!(x.label, y.label);
            assert_eq!(x.perm, y.perm);
        }
    }
}
