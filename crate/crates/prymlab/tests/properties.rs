//! Cross-module invariant checks: exhaustive small-range identities plus
//! randomized properties with independent oracles computed in this file.

use proptest::prelude::*;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prymlab::coverings::{genus, validate_covering, BranchPoint, CoveringData};
use prymlab::families::{run_family, FamilyId, FamilyParams};
use prymlab::graphs::{
    certify_prym, classify_binary_prym, complement_params, complete_graph_union,
    lattice_complement, lattice_graph, latin_square_graph, paley_graph, schlaefli_graph,
    spectrum_of, validate_srg, PrymGraph, SrgParams,
};
use prymlab::permgroups::Permutation;
use prymlab::prym::{build_triple, dimensions, fixed_point_analysis, EigenvalueTag};
use prymlab::splitting::{canonical_split, convert_to_complement, convert_to_lattice};

fn catalog() -> Vec<PrymGraph> {
    let mut graphs = vec![
        latin_square_graph(4).unwrap(),
        latin_square_graph(5).unwrap(),
        schlaefli_graph(),
        paley_graph(13).unwrap(),
        complete_graph_union(2, 3).unwrap(),
        complete_graph_union(3, 2).unwrap(),
    ];
    for n in 3..=6 {
        graphs.push(lattice_graph(n).unwrap());
        graphs.push(lattice_complement(n).unwrap());
    }
    graphs
}

#[test]
fn lattice_family_parameters_match_closed_forms_up_to_eight() {
    for n in 3..=8usize {
        let ni = n as i64;
        let lattice = lattice_graph(n).unwrap();
        assert_eq!(
            validate_srg(&lattice.matrix).unwrap(),
            SrgParams { d: n * n, k: 2 * (ni - 1), lambda: ni - 2, mu: 2 }
        );
        let complement = lattice_complement(n).unwrap();
        assert_eq!(
            validate_srg(&complement.matrix).unwrap(),
            SrgParams {
                d: n * n,
                k: (ni - 1) * (ni - 1),
                lambda: (ni - 2) * (ni - 2),
                mu: (ni - 1) * (ni - 2),
            }
        );
    }
}

#[test]
fn complement_params_is_an_involution_and_matches_complement_matrices() {
    for graph in catalog() {
        let params = validate_srg(&graph.matrix).unwrap();
        if let Ok(dual) = complement_params(&params) {
            assert_eq!(complement_params(&dual).unwrap(), params, "{}", graph.label);
        }
    }
    // On connected members the complement parameters are realized by the
    // complement matrix itself.
    for n in 3..=6usize {
        let graph = lattice_graph(n).unwrap();
        let params = validate_srg(&graph.matrix).unwrap();
        let complement_matrix = graph.matrix.binary_complement();
        assert_eq!(
            validate_srg(&complement_matrix).unwrap(),
            complement_params(&params).unwrap()
        );
        assert_eq!(
            complement_params(&params).unwrap(),
            validate_srg(&lattice_complement(n).unwrap().matrix).unwrap()
        );
    }
}

#[test]
fn spectra_are_feasible_on_the_whole_catalog() {
    let mut graphs = catalog();
    graphs.push(paley_graph(5).unwrap());
    graphs.push(paley_graph(17).unwrap());
    for graph in graphs {
        let params = validate_srg(&graph.matrix).unwrap();
        let spectrum = spectrum_of(&params).unwrap();
        assert_eq!(
            spectrum.mult_k + spectrum.m_plus + spectrum.m_minus,
            params.d,
            "multiplicities must sum to the vertex count on {}",
            graph.label
        );
    }
}

#[test]
fn certificate_classification_agrees_with_exhaustive_counting() {
    for graph in catalog() {
        let Ok(certificate) = certify_prym(&graph.matrix, &graph.generators) else {
            continue;
        };
        let classified = classify_binary_prym(&certificate, &graph.matrix).unwrap();
        assert_eq!(classified, validate_srg(&graph.matrix).unwrap(), "{}", graph.label);
    }
}

fn family_grid() -> Vec<(FamilyId, FamilyParams)> {
    let fam = |n: Option<usize>, l: Option<usize>, l1: Option<usize>, l2: Option<usize>| {
        FamilyParams { n, l, l1, l2, m: None }
    };
    let mut grid = vec![
        (FamilyId::MixedTower, fam(None, None, None, None)),
        (FamilyId::EtaleTower, fam(None, None, None, None)),
    ];
    for n in 7..=12 {
        grid.push((FamilyId::SchlaefliReflections, fam(Some(n), None, None, None)));
    }
    for n in 3..=5 {
        for l in 0..=3 {
            grid.push((FamilyId::LatticeExchanges, fam(Some(n), Some(l), None, None)));
        }
    }
    for n in 3..=6 {
        grid.push((FamilyId::TwistedExchanges, fam(Some(n), None, Some(1), Some(2))));
    }
    for n in 4..=5 {
        for l in 2..=3 {
            grid.push((FamilyId::LatinTranslations, fam(Some(n), Some(l), None, None)));
        }
    }
    for (l1, l2) in [(1, 0), (0, 1), (1, 1), (2, 1)] {
        grid.push((FamilyId::ProductTranspositions, fam(Some(3), None, Some(l1), Some(l2))));
        grid.push((FamilyId::ProductTranspositions, fam(Some(4), None, Some(l1), Some(l2))));
    }
    grid
}

#[test]
fn projection_dimensions_sum_to_the_genus_on_every_family() {
    for (id, params) in family_grid() {
        let outcome = run_family(id, &params).unwrap();
        let analysis = &outcome.analysis;
        assert_eq!(
            analysis.d_plus + analysis.d_minus + analysis.eta * analysis.d0,
            analysis.genus,
            "{} with {:?}",
            id.token(),
            params
        );
        assert!(outcome.all_passed(), "{}", id.token());
    }
}

/// Conjugating every branch permutation by one automorphism of the matrix
/// part relabels the covering without changing any reported quantity.
fn relabelled(triple_graph: &PrymGraph, covering: &CoveringData, by: &Permutation) -> CoveringData {
    assert!(triple_graph.matrix.preserved_by(by));
    let branch = covering
        .branch_points()
        .iter()
        .map(|bp| BranchPoint::new(bp.label.clone(), bp.perm.conjugated_by(by)))
        .collect();
    validate_covering(covering.degree(), branch).unwrap()
}

#[test]
fn relabelling_preserves_dimension_reports_and_split_structure() {
    // Single-copy family: any base generator is a relabelling.
    let params = FamilyParams { n: Some(4), l: Some(2), ..Default::default() };
    let outcome = run_family(FamilyId::LatticeExchanges, &params).unwrap();
    let base = outcome.triple.base().clone();
    let before = &outcome.analysis;
    for generator in &base.generators {
        let moved = relabelled(&base, outcome.triple.covering(), generator);
        let certificate = certify_prym(&base.matrix, &base.generators).unwrap();
        let triple =
            build_triple(base.clone(), certificate, 1, EigenvalueTag::Plus, moved).unwrap();
        let after = dimensions(&triple, 0).unwrap();
        assert_eq!(before.genus, after.genus);
        assert_eq!(before.d_plus, after.d_plus);
        assert_eq!(before.d_minus, after.d_minus);
        assert_eq!(before.intersection, after.intersection);
        let fixed = fixed_point_analysis(&triple);
        assert_eq!(outcome.fixed.aggregate, fixed.aggregate);
    }

    // Tower: a block swap composed with in-block swaps is an automorphism of
    // the repeated matrix; the split data must not change.
    let outcome = run_family(FamilyId::MixedTower, &FamilyParams::default()).unwrap();
    let split = outcome.split.as_ref().unwrap();
    let base = outcome.triple.base().clone();
    let block_swap = Permutation::from_images(vec![2, 3, 0, 1, 4, 5]).unwrap();
    let inner_swap = Permutation::from_images(vec![1, 0, 2, 3, 5, 4]).unwrap();
    for by in [block_swap, inner_swap] {
        assert!(outcome.triple.repeated_matrix().preserved_by(&by));
        let branch = outcome
            .triple
            .covering()
            .branch_points()
            .iter()
            .map(|bp| BranchPoint::new(bp.label.clone(), bp.perm.conjugated_by(&by)))
            .collect();
        let moved = validate_covering(6, branch).unwrap();
        let certificate = certify_prym(&base.matrix, &base.generators).unwrap();
        let triple =
            build_triple(base.clone(), certificate, 3, EigenvalueTag::Plus, moved).unwrap();
        let again = canonical_split(&triple).unwrap();
        assert_eq!(again.blocks, split.blocks, "blocks are matrix components");
        assert_eq!(again.relative_degree, split.relative_degree);
        assert_eq!(again.genus_quotient, split.genus_quotient);
        assert_eq!(again.simple, split.simple);
        assert_eq!(again.complete_blocks, split.complete_blocks);
    }
}

#[test]
fn conversions_preserve_every_reported_quantity() {
    for l in 0..=3usize {
        let params = FamilyParams { n: Some(3), l: Some(l), ..Default::default() };
        let outcome = run_family(FamilyId::LatticeExchanges, &params).unwrap();
        let before = &outcome.analysis;
        let conversion = convert_to_complement(&outcome.triple).unwrap();
        let after = dimensions(&conversion.triple, 0).unwrap();
        assert_eq!(before.genus, after.genus);
        assert_eq!(before.d_plus, after.d_plus);
        assert_eq!(before.d_minus, after.d_minus);
        assert_eq!(before.fixed_point_free, after.fixed_point_free);
        let back = convert_to_lattice(&conversion.triple).unwrap();
        for (orig, got) in outcome
            .triple
            .covering()
            .branch_points()
            .iter()
            .zip(back.covering().branch_points())
        {
            assert_eq!(orig.perm, got.perm, "round trip is exact");
        }
    }
}

fn random_permutation(rng: &mut ChaCha8Rng, degree: usize) -> Permutation {
    let mut images: Vec<usize> = (0..degree).collect();
    for i in (1..degree).rev() {
        let j = (rng.next_u64() as usize) % (i + 1);
        images.swap(i, j);
    }
    Permutation::from_images(images).unwrap()
}

fn cycle_count(perm: &Permutation) -> usize {
    let degree = perm.degree();
    let mut seen = vec![false; degree];
    let mut cycles = 0;
    for start in 0..degree {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = perm.apply(v);
        }
    }
    cycles
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The total ramification of a valid covering is even, and the genus from
    /// the degree-and-cycles count is a non-negative integer.
    #[test]
    fn genus_parity_on_randomized_pair_coverings(seed in any::<u64>(), degree in 4usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perms: Vec<Permutation> = (0..3).map(|_| random_permutation(&mut rng, degree)).collect();
        let mut branch = Vec::new();
        for (i, p) in perms.iter().enumerate() {
            branch.push(BranchPoint::new(format!("b{}", 2 * i + 1), p.clone()));
            branch.push(BranchPoint::new(format!("b{}", 2 * i + 2), p.inverse()));
        }
        prop_assume!(branch.iter().all(|bp| !bp.perm.is_identity()));
        let Ok(covering) = validate_covering(degree, branch) else {
            // Disconnected draws are not coverings; nothing to check.
            return Ok(());
        };
        let ramification: usize = covering
            .branch_points()
            .iter()
            .map(|bp| degree - cycle_count(&bp.perm))
            .sum();
        prop_assert_eq!(ramification % 2, 0, "total ramification is even");
        let g = genus(&covering);
        prop_assert!(g >= 0);
        prop_assert_eq!(2 * g - 2, -2 * (degree as i64) + ramification as i64);
    }

    /// Branch order never affects the genus: any adjacent swap of two branch
    /// points (conjugating one to keep the product fixed) preserves it.
    #[test]
    fn genus_is_stable_under_braid_moves(position in 0usize..64) {
        let params = FamilyParams { n: Some(3), l: Some(2), ..Default::default() };
        let outcome = run_family(FamilyId::LatticeExchanges, &params).unwrap();
        let covering = outcome.triple.covering();
        let mut branch: Vec<BranchPoint> = covering.branch_points().to_vec();
        let i = position % (branch.len() - 1);
        // (a, b) -> (a b a^{-1}, a) keeps the ordered product fixed.
        let a = branch[i].perm.clone();
        let b = branch[i + 1].perm.clone();
        branch[i].perm = b.conjugated_by(&a.inverse());
        branch[i + 1].perm = a;
        let moved = validate_covering(covering.degree(), branch).unwrap();
        prop_assert_eq!(genus(&moved), genus(covering));
    }
}
