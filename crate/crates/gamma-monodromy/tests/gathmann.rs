use gamma_monodromy::cohomology::SpaceModel;
use gamma_monodromy::gathmann::{crosscheck_against_bls, must_vanish, scan_entries, weight, CorrelatorDescriptor};
use proptest::prelude::*;

fn desc(n: usize, wt_a: usize, k: usize, ls: &[usize], d: i64, beta: bool) -> CorrelatorDescriptor {
    CorrelatorDescriptor { n, wt_a, k, exceptional_powers: ls.to_vec(), d, beta_nonzero: beta }
}

/// The three conditions spelled out one at a time.
fn oracle(c: &CorrelatorDescriptor) -> bool {
    let w: i64 = c.wt_a as i64 + c.exceptional_powers.iter().map(|&l| l as i64 - 1).sum::<i64>();
    let first = c.beta_nonzero;
    let second = w > 0 || c.d > 0;
    let third = w + (c.k as i64) < (c.d + 1) * (c.n as i64 - 1);
    first && second && third
}

fn descriptor() -> impl Strategy<Value = CorrelatorDescriptor> {
    (3usize..=7).prop_flat_map(|n| {
        (
            Just(n),
            0..=n - 2,
            0usize..12,
            prop::collection::vec(2..=n - 1, 0..4),
            -3i64..=4,
            any::<bool>(),
        )
            .prop_map(|(n, wt_a, k, ls, d, b)| desc(n, wt_a, k, &ls, d, b))
    })
}

proptest! {
    #[test]
    fn predicate_matches_the_conditions(c in descriptor()) {
        prop_assert!(c.validate().is_ok());
        prop_assert_eq!(must_vanish(&c), oracle(&c));
    }

    #[test]
    fn raising_the_descendant_power_only_removes_vanishing(c in descriptor(), extra in 1usize..5) {
        let mut higher = c.clone();
        higher.k += extra;
        if must_vanish(&higher) {
            prop_assert!(must_vanish(&c));
        }
    }

    #[test]
    fn order_of_exceptional_insertions_is_irrelevant(c in descriptor(), seed in any::<u64>()) {
        let mut shuffled = c.clone();
        let len = shuffled.exceptional_powers.len();
        if len > 1 {
            shuffled.exceptional_powers.rotate_left((seed as usize) % len);
            shuffled.exceptional_powers.reverse();
        }
        prop_assert_eq!(must_vanish(&c), must_vanish(&shuffled));
        prop_assert_eq!(c.total_weight(), shuffled.total_weight());
    }

    #[test]
    fn descriptors_survive_json(c in descriptor()) {
        let text = serde_json::to_string(&c).unwrap();
        let back: CorrelatorDescriptor = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn descriptor_without_exceptional_field_parses() {
    let c: CorrelatorDescriptor =
        serde_json::from_str(r#"{"n": 4, "wt_a": 1, "k": 0, "d": 0, "beta_nonzero": true}"#).unwrap();
    assert!(c.exceptional_powers.is_empty());
    assert!(must_vanish(&c));
    assert!(serde_json::from_str::<CorrelatorDescriptor>(r#"{"n": 4}"#).is_err());
}

#[test]
fn exhaustive_small_grid_is_monotone_in_k() {
    for n in 3..=6usize {
        for wt_a in 0..=n - 2 {
            for d in -2i64..=4 {
                for beta in [false, true] {
                    let vanish: Vec<bool> = (0..=10).map(|k| must_vanish(&desc(n, wt_a, k, &[], d, beta))).collect();
                    // once false, false for every larger k
                    if let Some(first) = vanish.iter().position(|v| !v) {
                        assert!(vanish[first..].iter().all(|v| !v), "n={n} wt={wt_a} d={d}");
                    }
                }
            }
        }
    }
}

#[test]
fn validation_and_weights() {
    assert!(desc(5, 3, 0, &[2, 4], 1, true).validate().is_ok());
    assert!(desc(5, 4, 0, &[], 1, true).validate().is_err());
    assert!(desc(5, 0, 0, &[5], 1, true).validate().is_err());
    assert!(desc(1, 0, 0, &[], 1, true).validate().is_err());
    let s = SpaceModel::bl_proj(5).unwrap();
    let w: Vec<usize> = (0..s.rank()).map(|i| weight(&s, i).unwrap()).collect();
    assert_eq!(w, vec![0, 0, 0, 0, 0, 0, 0, 1, 2, 3]);
    assert!(weight(&s, 10).is_err());
    assert!(weight(&SpaceModel::twisted_e(4).unwrap(), 0).is_err());
}

#[test]
fn scanned_entries_satisfy_the_dimension_constraint() {
    let n = 4;
    let s = SpaceModel::bl_proj(n).unwrap();
    let (entries, _) = scan_entries(n, 6, 2).unwrap();
    assert!(!entries.is_empty());
    for e in &entries {
        let beta = e.d2 as i64;
        let d = e.d1 as i64 - e.d2 as i64;
        let c1 = (n as i64 + 1) * beta + (n as i64 - 1) * d;
        let lhs = (s.degrees[e.a] + s.degrees[e.col]) as i64 + e.j as i64 - 1;
        assert_eq!(lhs, n as i64 - 1 + c1);
        assert_eq!(e.descriptor.d, d);
        assert_eq!(e.descriptor.beta_nonzero, beta != 0);
        assert_eq!(e.predicted_zero, oracle(&e.descriptor));
    }
}

#[test]
fn crosscheck_has_no_violations() {
    let mut checked = 0;
    let mut nonzero = 0;
    for n in 3..=5usize {
        let r = crosscheck_against_bls(n, 8, 4).unwrap();
        assert!(r.passed(), "n={n}: {:?}", r.violations.first());
        assert!(r.max_predicted_zero <= 1e-12);
        checked += r.checked;
        nonzero += r.predicate_false_nonzero;
    }
    assert!(checked >= 20, "{checked}");
    assert!(nonzero >= 5, "{nonzero}");
}

#[test]
fn crosscheck_rejects_out_of_range_arguments() {
    assert!(crosscheck_against_bls(2, 4, 2).is_err());
    assert!(crosscheck_against_bls(6, 4, 2).is_err());
    assert!(crosscheck_against_bls(3, 9, 2).is_err());
    assert!(crosscheck_against_bls(3, 4, 5).is_err());
}
