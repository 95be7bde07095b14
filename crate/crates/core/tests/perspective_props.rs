mod common;

use common::{ghz_projection, tuples, TOL};
use proptest::prelude::*;
use relfacts::perspective::{
    builtin_contexts, deferred_context, exact_distribution, product_expectation, repeatability_check,
    repeatability_check_at, sample, Context, ContextError, PointerMeasurement,
};
use relfacts::scenario::{full_protocol, ghz_state, Encoding, SystemLabel};
use relfacts::statevec::Basis;
use relfacts::Sign;

const ENCODINGS: [Encoding; 2] = [Encoding::Literal, Encoding::Computational];

/// Pauli axes on S1, S2, S3 that each built-in context reduces to on the bare GHZ state.
fn axes(name: &str) -> [char; 3] {
    match name {
        "C1" => ['X', 'X', 'X'],
        "C2" => ['X', 'Y', 'Y'],
        "C3" => ['Y', 'X', 'Y'],
        "C4" => ['Y', 'Y', 'X'],
        other => panic!("no axes for {other}"),
    }
}

fn signs(t: &[i8]) -> Vec<Sign> {
    t.iter()
        .map(|&v| if v == 1 { Sign::Plus } else { Sign::Minus })
        .collect()
}

#[test]
fn builtin_labels() {
    let cs = builtin_contexts(Encoding::Literal);
    let names: Vec<_> = cs.iter().map(|c| c.name()).collect();
    assert_eq!(names, ["C1", "C2", "C3", "C4"]);
    assert_eq!(cs[0].labels(), ["B1^W", "B2^W", "B3^W"]);
    assert_eq!(cs[1].labels(), ["B1^W", "A2^W", "A3^W"]);
    assert_eq!(cs[2].labels(), ["A1^W", "B2^W", "A3^W"]);
    assert_eq!(cs[3].labels(), ["A1^W", "A2^W", "B3^W"]);
}

/// Each context's joint distribution equals the direct projection of GHZ onto
/// the matching product eigenbasis, labels ordered by qubit index 1..3.
#[test]
fn distributions_match_direct_projection() {
    for enc in ENCODINGS {
        for c in builtin_contexts(enc) {
            let d = exact_distribution(&c);
            let ax = axes(c.name());
            assert_eq!(d.entries.len(), 8);
            for t in tuples(3) {
                let mut by_qubit = [0i8; 3];
                for (slot, m) in c.measurements().iter().enumerate() {
                    by_qubit[m.target.index() as usize - 1] = t[slot];
                }
                let want = ghz_projection(ax, by_qubit);
                let got = d.probability_of(&signs(&t));
                assert!((got - want).abs() < TOL, "{enc} {} {t:?}: {got} vs {want}", c.name());
            }
        }
    }
}

#[test]
fn support_products_are_fixed() {
    for enc in ENCODINGS {
        for (c, want) in builtin_contexts(enc)
            .iter()
            .zip([Sign::Plus, Sign::Minus, Sign::Minus, Sign::Minus])
        {
            let d = exact_distribution(c);
            assert!((d.total_probability() - 1.0).abs() < TOL);
            assert_eq!(d.support().count(), 4);
            for e in d.support() {
                assert_eq!(e.product(), want, "{}", c.name());
                assert!((e.probability - 0.25).abs() < TOL);
            }
            assert_eq!(d.deterministic_product(), Some(want));
        }
    }
}

#[test]
fn expectations_match_bare_ghz() {
    let s = [SystemLabel::s(1), SystemLabel::s(2), SystemLabel::s(3)];
    let ghz = ghz_state(&s).unwrap();
    let basis = |a: char| if a == 'X' { Basis::X } else { Basis::Y };
    for enc in ENCODINGS {
        for c in builtin_contexts(enc) {
            let obs: Vec<_> = axes(c.name()).iter().enumerate().map(|(q, &a)| (q, basis(a))).collect();
            let bare = ghz.expectation_product(&obs).unwrap();
            assert!((product_expectation(&c) - bare).abs() < TOL, "{enc} {}", c.name());
        }
    }
}

#[test]
fn single_pointer_is_unbiased() {
    for enc in ENCODINGS {
        let c = Context::new(
            "B1",
            full_protocol(enc),
            vec![PointerMeasurement::wigner(SystemLabel::b(1), 9)],
        )
        .unwrap();
        let d = exact_distribution(&c);
        assert!((d.probability_of(&[Sign::Plus]) - 0.5).abs() < TOL);
        assert!((d.probability_of(&[Sign::Minus]) - 0.5).abs() < TOL);
    }
}

#[test]
fn deferred_reads_lose_the_correlation() {
    for enc in ENCODINGS {
        let c = deferred_context(enc);
        let d = exact_distribution(&c);
        assert!(product_expectation(&c).abs() < TOL, "{enc}");
        assert!(d.support().any(|e| e.product() == Sign::Plus));
        assert!(d.support().any(|e| e.product() == Sign::Minus));
        assert_eq!(d.deterministic_product(), None);
    }
}

#[test]
fn deferred_distribution_literal() {
    // A2, A3 memories are back in |R⟩ = |0⟩, read in Y: each outcome 1/2,
    // independent of the unbiased B1 reading.
    let d = exact_distribution(&deferred_context(Encoding::Literal));
    for e in &d.entries {
        assert!((e.probability - 0.125).abs() < TOL);
    }
}

#[test]
fn repeatability_everywhere() {
    for enc in ENCODINGS {
        for c in builtin_contexts(enc).iter().chain([&deferred_context(enc)]) {
            for m in c.measured_memories() {
                assert!(repeatability_check(c, m).unwrap(), "{enc} {} {m}", c.name());
                let range = c.legal_insertion_points(m).unwrap();
                let first = c.measurements().iter().find(|p| p.target == m).unwrap().insert_after;
                for later in first..=*range.end() {
                    assert!(repeatability_check_at(c, m, later).unwrap());
                }
            }
        }
    }
}

#[test]
fn repeat_across_inverse_is_rejected() {
    let c2 = &builtin_contexts(Encoding::Literal)[1];
    let e = repeatability_check_at(c2, SystemLabel::a(2), 6).unwrap_err();
    assert_eq!(
        e,
        ContextError::InterveningEvent {
            target: SystemLabel::a(2),
            event: 6
        }
    );
    assert!(matches!(
        repeatability_check_at(c2, SystemLabel::a(2), 2),
        Err(ContextError::RepeatBeforeOriginal(_))
    ));
    assert!(matches!(
        repeatability_check(c2, SystemLabel::b(2)),
        Err(ContextError::NotMeasured(_))
    ));
}

#[test]
fn invalid_contexts() {
    let s = full_protocol(Encoding::Literal);
    let w = PointerMeasurement::wigner;
    assert!(matches!(
        Context::new("x", s.clone(), vec![w(SystemLabel::s(1), 0)]),
        Err(ContextError::NotMemory(_))
    ));
    assert!(matches!(
        Context::new("x", s.clone(), vec![w(SystemLabel::b(1), 10)]),
        Err(ContextError::InsertionOutOfRange { .. })
    ));
    assert!(matches!(
        Context::new("x", s.clone(), vec![w(SystemLabel::b(1), 9), w(SystemLabel::b(1), 5)]),
        Err(ContextError::DuplicateLabel(_))
    ));
    let mut other = w(SystemLabel::b(1), 5);
    other.label = "other".into();
    assert!(matches!(
        Context::new("x", s.clone(), vec![w(SystemLabel::b(1), 9), other]),
        Err(ContextError::MeasuredTwice(_))
    ));
    assert!(matches!(
        sample(&builtin_contexts(Encoding::Literal)[0], 0, 1),
        Err(ContextError::ZeroShots)
    ));
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let c = &builtin_contexts(Encoding::Literal)[1];
    assert_eq!(sample(c, 500, 42).unwrap(), sample(c, 500, 42).unwrap());
    assert_ne!(sample(c, 500, 42).unwrap(), sample(c, 500, 43).unwrap());
}

/// Empirical frequencies over 10^5 shots at the CLI's default seed sit inside
/// 3σ binomial bounds and never show a forbidden tuple.
#[test]
fn sampling_matches_exact_distribution() {
    let shots = 100_000;
    for enc in ENCODINGS {
        for c in builtin_contexts(enc).iter().chain([&deferred_context(enc)]) {
            let d = exact_distribution(c);
            let draws = sample(c, shots, 0).unwrap();
            for e in &d.entries {
                let count = draws.iter().filter(|t| **t == e.outcomes).count() as f64;
                let p = e.probability;
                if p < TOL {
                    assert_eq!(count, 0.0, "{} {:?}", c.name(), e.outcomes);
                    continue;
                }
                let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
                let z = (count - shots as f64 * p).abs() / sigma;
                assert!(z <= 3.0, "{enc} {} {:?}: z = {z}", c.name(), e.outcomes);
            }
        }
    }
}

/// Across many seeds the standardized cell deviations have unit variance and
/// exceed 3σ about as rarely as a binomial would.
#[test]
fn sampler_is_calibrated() {
    let (shots, seeds) = (10_000usize, 200u64);
    let c = &builtin_contexts(Encoding::Literal)[2];
    let d = exact_distribution(c);
    let (mut cells, mut beyond, mut z2) = (0usize, 0usize, 0.0);
    for seed in 0..seeds {
        let draws = sample(c, shots, seed).unwrap();
        for e in d.support() {
            let count = draws.iter().filter(|t| **t == e.outcomes).count() as f64;
            let mean = shots as f64 * e.probability;
            let var = mean * (1.0 - e.probability);
            let z = (count - mean) / var.sqrt();
            cells += 1;
            z2 += z * z;
            beyond += usize::from(z.abs() > 3.0);
        }
    }
    let mean_z2 = z2 / cells as f64;
    assert!((0.85..1.15).contains(&mean_z2), "mean z^2 = {mean_z2}");
    assert!(beyond <= 8, "{beyond} of {cells} cells beyond 3σ");
}

fn encoding() -> impl Strategy<Value = Encoding> {
    prop_oneof![Just(Encoding::Literal), Just(Encoding::Computational)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Moving any reading within its legal range leaves the distribution unchanged.
    #[test]
    fn insertion_order_robustness(enc in encoding(), ci in 0usize..5, slot in 0usize..3, pick in any::<prop::sample::Index>()) {
        let contexts: Vec<Context> = builtin_contexts(enc).into_iter().chain([deferred_context(enc)]).collect();
        let c = &contexts[ci];
        let target = c.measurements()[slot].target;
        let range = c.legal_insertion_points(target).unwrap();
        let points: Vec<usize> = range.collect();
        let at = points[pick.index(points.len())];
        let moved = c.with_moved(target, at).unwrap();
        let diff = exact_distribution(c).max_abs_diff(&exact_distribution(&moved)).unwrap();
        prop_assert!(diff < TOL, "{} {} -> {}: {}", c.name(), target, at, diff);
    }

    #[test]
    fn samples_only_hit_support(enc in encoding(), ci in 0usize..4, seed in any::<u64>()) {
        let c = &builtin_contexts(enc)[ci];
        let d = exact_distribution(c);
        for t in sample(c, 200, seed).unwrap() {
            prop_assert!(d.probability_of(&t) > TOL);
        }
    }
}
