use std::sync::Arc;

use proptest::prelude::*;
use spinclust::cayley::GroupKind;
use spinclust::scores::{total_mass, Locality, PatternTemplate, ScoreFunction, ScoreSpec};
use spinclust::spin::{SpinConfiguration, Window};
use spinclust::topology::build_complex;

const Z2: GroupKind = GroupKind::IntegerLattice(2);
const R: u32 = 7;

fn window() -> Arc<Window> {
    Window::for_kind(Z2, R).unwrap()
}

fn all_scores() -> Vec<(ScoreSpec, Arc<dyn ScoreFunction>)> {
    let pair = PatternTemplate::new(vec![vec![0, 0], vec![1, 0]]).unwrap();
    [
        ScoreSpec::Occupancy {},
        ScoreSpec::Subgraph { template: pair.clone() },
        ScoreSpec::Component { template: pair },
        ScoreSpec::IntrinsicVolume { j: 0 },
        ScoreSpec::IntrinsicVolume { j: 1 },
        ScoreSpec::IntrinsicVolume { j: 2 },
        ScoreSpec::NearestNeighbour {},
        ScoreSpec::Betti { k: 0 },
        ScoreSpec::Betti { k: 1 },
    ]
    .into_iter()
    .map(|s| {
        let built = s.build(Z2).unwrap();
        (s, built)
    })
    .collect()
}

fn bits(p: f64) -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(proptest::bool::weighted(p), window().len())
}

fn shifted(c: &SpinConfiguration, dx: i64, dy: i64) -> SpinConfiguration {
    let w = c.window();
    let pts: Vec<Vec<i64>> = c
        .support()
        .into_iter()
        .map(|i| {
            let x = w.site(i).coords();
            vec![x[0] + dx, x[1] + dy]
        })
        .collect();
    let refs: Vec<&[i64]> = pts.iter().map(|v| v.as_slice()).collect();
    SpinConfiguration::from_coords(w.clone(), &refs)
}

fn l1(a: &[i64], b: &[i64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x - y).unsigned_abs() as u32).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scores_vanish_off_support(b in bits(0.5)) {
        let c = SpinConfiguration::from_bits(window(), b);
        for (spec, s) in all_scores() {
            for (i, (v, _)) in s.evaluate_all(&c).into_iter().enumerate() {
                if !c.is_occupied(i) {
                    prop_assert_eq!(v, 0.0, "{} at site {}", spec, i);
                }
            }
        }
    }

    #[test]
    fn local_scores_ignore_far_sites(b in bits(0.5), flip in proptest::collection::vec(any::<bool>(), window().len())) {
        let w = window();
        let c = SpinConfiguration::from_bits(w.clone(), b.clone());
        let origin = w.lookup(&[0, 0]).unwrap();
        for (spec, s) in all_scores() {
            let Locality::Local(r) = s.locality() else { continue };
            if r >= R {
                continue;
            }
            let mut perturbed = b.clone();
            for i in 0..w.len() {
                if flip[i] && l1(w.site(i).coords(), &[0, 0]) > r {
                    perturbed[i] = !perturbed[i];
                }
            }
            let d = SpinConfiguration::from_bits(w.clone(), perturbed);
            prop_assert_eq!(s.evaluate(origin, &c), s.evaluate(origin, &d), "{}", spec);
        }
    }

    #[test]
    fn local_scores_are_translation_invariant(b in bits(0.5), dx in -1i64..=1, dy in -1i64..=1) {
        let w = window();
        let c = SpinConfiguration::from_bits(w.clone(), b);
        let t = shifted(&c, dx, dy);
        for (spec, s) in all_scores() {
            let Locality::Local(r) = s.locality() else { continue };
            for i in 0..w.len() {
                let x = w.site(i).coords().to_vec();
                let y = [x[0] + dx, x[1] + dy];
                if l1(&x, &[0, 0]) + r + 2 > R || !c.is_occupied(i) {
                    continue;
                }
                let j = w.lookup(&y).unwrap();
                let (a, b) = (s.evaluate(i, &c), s.evaluate(j, &t));
                prop_assert!((a - b).abs() < 1e-12, "{} at {:?}: {} vs {}", spec, x, a, b);
            }
        }
    }

    #[test]
    fn euler_score_totals_euler_characteristic(b in bits(0.55)) {
        let c = SpinConfiguration::from_bits(window(), b);
        let v0 = ScoreSpec::IntrinsicVolume { j: 0 }.build(Z2).unwrap();
        let betti = build_complex(&c).unwrap().betti_numbers();
        let h = total_mass(v0.as_ref(), &c).value;
        prop_assert!((h - (betti.get(0) as f64 - betti.get(1) as f64)).abs() < 1e-9);
    }

    #[test]
    fn domino_count_matches_adjacent_pairs(b in bits(0.5)) {
        let w = window();
        let c = SpinConfiguration::from_bits(w.clone(), b);
        let mut pairs = 0;
        for i in c.support() {
            let x = w.site(i).coords();
            for d in [[1, 0], [0, 1]] {
                if c.occupied_at(&[x[0] + d[0], x[1] + d[1]]) {
                    pairs += 1;
                }
            }
        }
        let s = ScoreSpec::Subgraph { template: PatternTemplate::new(vec![vec![0, 0], vec![1, 0]]).unwrap() }
            .build(Z2)
            .unwrap();
        prop_assert!((total_mass(s.as_ref(), &c).value - pairs as f64).abs() < 1e-9);
    }

    #[test]
    fn perimeter_and_area_scores(b in bits(0.5)) {
        let w = window();
        let c = SpinConfiguration::from_bits(w.clone(), b);
        let mut edges = 0i64;
        for i in c.support() {
            let x = w.site(i).coords();
            for d in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
                if !c.occupied_at(&[x[0] + d[0], x[1] + d[1]]) {
                    edges += 1;
                }
            }
        }
        let v1 = ScoreSpec::IntrinsicVolume { j: 1 }.build(Z2).unwrap();
        let v2 = ScoreSpec::IntrinsicVolume { j: 2 }.build(Z2).unwrap();
        prop_assert!((total_mass(v1.as_ref(), &c).value - edges as f64 / 2.0).abs() < 1e-9);
        prop_assert!((total_mass(v2.as_ref(), &c).value - c.count() as f64).abs() < 1e-9);
    }
}

#[test]
fn nearest_neighbour_golden() {
    let w = window();
    let c = SpinConfiguration::from_coords(w, &[&[0, 0], &[2, 0]]);
    let s = ScoreSpec::NearestNeighbour {}.build(Z2).unwrap();
    assert_eq!(total_mass(s.as_ref(), &c).value, 4.0);
}
