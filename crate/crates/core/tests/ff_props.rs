//! Statistical validation of the function-field sampler: end-to-end
//! uniformity of sampled norms and ideals against exhaustive enumeration,
//! and the observed trial count against the exact acceptance constant.

mod common;

use std::collections::HashMap;

use common::{chi_square_p, uniform_probs};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use idealgen::function_field::{
    ff_acceptance_probability, ff_candidate_probability, ff_derive_params, ff_enumerate_ideals,
    ff_sample_ideal_with_params, ff_sample_norm, make_function_field, FFFactoredPoly, FFMode,
    FunctionField,
};
use idealgen::rng::RandomSource;

fn field(label: &str, q: u64, poly: &[&[u64]]) -> FunctionField {
    make_function_field(
        Some(label),
        &BigUint::from(q),
        poly.iter()
            .map(|c| c.iter().map(|&v| BigUint::from(v)).collect())
            .collect(),
        vec![],
    )
    .unwrap()
}

/// 1/(candidate(1)·acceptance(1)·k): the exact mean trial count, since the
/// per-trial success probability is c·ΣD and D-weight 1 falls on each of
/// the k ideals.
fn exact_mean_trials(params: &idealgen::function_field::FFSamplerParams, k: usize) -> f64 {
    let one = FFFactoredPoly::one(params.field().base());
    let c = ff_candidate_probability(params, &one).unwrap()
        * ff_acceptance_probability(params, &one).unwrap();
    (c * num_rational::BigRational::from_integer(num_bigint::BigInt::from(k)))
        .recip()
        .to_f64()
        .unwrap()
}

#[test]
fn trivial_cover_norms_are_uniform() {
    // O = F_3[t]: D(g) = 1 for every monic g, so sampled norms must be
    // uniform over {g : r < 3^5}
    let field = field("F_3[t]", 3, &[&[0, 2], &[1]]);
    let params = ff_derive_params(&field, 4, FFMode::EncodingBounded).unwrap();
    let ideals = ff_enumerate_ideals(&field, 4, FFMode::EncodingBounded).unwrap();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, ideal) in ideals.iter().enumerate() {
        let key = ideal.norm.value().render("t", |c| c.to_string());
        assert!(index.insert(key, i).is_none(), "duplicate enumerated norm");
    }

    let mut rng = RandomSource::from_seed(0xff01);
    let mut counts = vec![0u64; ideals.len()];
    let mut trials_total = 0u64;
    let samples = 100_000u64;
    for _ in 0..samples {
        let (g, trials) = ff_sample_norm(&params, &mut rng).unwrap();
        trials_total += trials;
        let key = g.value().render("t", |c| c.to_string());
        counts[*index.get(&key).expect("sampled norm outside enumeration")] += 1;
    }

    let p = chi_square_p(&counts, &uniform_probs(ideals.len()));
    assert!(p > 1e-3, "norm uniformity rejected: p = {p}");

    let expected = exact_mean_trials(&params, ideals.len());
    let observed = trials_total as f64 / samples as f64;
    assert!(
        (observed - expected).abs() / expected < 0.05,
        "mean trials {observed} vs exact {expected}"
    );
}

#[test]
fn double_cover_ideals_are_uniform() {
    // y² = t over F_3: D varies (0, 1, 2, 3) across norms, so this also
    // exercises the D-weighted acceptance; each ideal must come out equally
    // often regardless of how many share its norm
    let field = field("y^2 - t over F_3", 3, &[&[0, 2], &[], &[1]]);
    let params = ff_derive_params(&field, 3, FFMode::EncodingBounded).unwrap();
    let ideals = ff_enumerate_ideals(&field, 3, FFMode::EncodingBounded).unwrap();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, ideal) in ideals.iter().enumerate() {
        let key = format!("{:?}|{:?}", ideal.entries, ideal.norm.value());
        assert!(index.insert(key, i).is_none(), "duplicate enumerated ideal");
    }

    let mut rng = RandomSource::from_seed(0xff02);
    let mut counts = vec![0u64; ideals.len()];
    let mut trials_total = 0u64;
    let samples = 30_000u64;
    for _ in 0..samples {
        let (ideal, trials) = ff_sample_ideal_with_params(&params, &mut rng).unwrap();
        trials_total += trials;
        let key = format!("{:?}|{:?}", ideal.entries, ideal.norm.value());
        counts[*index.get(&key).expect("sampled ideal outside enumeration")] += 1;
    }

    let p = chi_square_p(&counts, &uniform_probs(ideals.len()));
    assert!(p > 1e-3, "ideal uniformity rejected: p = {p}");

    let expected = exact_mean_trials(&params, ideals.len());
    let observed = trials_total as f64 / samples as f64;
    assert!(
        (observed - expected).abs() / expected < 0.05,
        "mean trials {observed} vs exact {expected}"
    );
}

#[test]
fn exact_degree_mode_matches_enumeration_at_desk_scale() {
    // the inflated-denominator mode at a size where its trial count is
    // still tame: y² − t, degree ≤ 2, support of 13 ideals
    let field = field("y^2 - t over F_3", 3, &[&[0, 2], &[], &[1]]);
    let params = ff_derive_params(&field, 2, FFMode::ExactDegree).unwrap();
    let ideals = ff_enumerate_ideals(&field, 2, FFMode::ExactDegree).unwrap();
    assert_eq!(ideals.len(), 13);
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, ideal) in ideals.iter().enumerate() {
        let key = format!("{:?}|{:?}", ideal.entries, ideal.norm.value());
        index.insert(key, i);
    }

    let mut rng = RandomSource::from_seed(0xff03);
    let mut counts = vec![0u64; ideals.len()];
    let samples = 10_000u64;
    for _ in 0..samples {
        let (ideal, _) = ff_sample_ideal_with_params(&params, &mut rng).unwrap();
        assert!(ideal.norm.degree() <= 2);
        let key = format!("{:?}|{:?}", ideal.entries, ideal.norm.value());
        counts[*index.get(&key).expect("sampled ideal outside enumeration")] += 1;
    }

    let p = chi_square_p(&counts, &uniform_probs(ideals.len()));
    assert!(p > 1e-3, "exact-degree uniformity rejected: p = {p}");
}
