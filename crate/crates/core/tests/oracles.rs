//! Library output checked against brute-force references and invariants.

mod common;

use proptest::prelude::*;
use rand::Rng;

use tempofilt::classify::{smo_solve, stratified_split, svm_predict, svm_train};
use tempofilt::filtration::{avg_filtration, avg_filtration_multi, min_filtration, FilteredGraph};
use tempofilt::kernels::pss_kernel;
use tempofilt::nullmodels::{cm_rewire, ewlss_shuffle, re_shuffle, tp_perturb};
use tempofilt::persistence::{build_flag_filtration, compute_persistence, graph_persistence};
use tempofilt::rng::RngSeed;
use tempofilt::tgraph::TemporalGraph;

use common::*;

#[test]
fn minimum_matches_definition() {
    let mut r = rng(21);
    for _ in 0..100 {
        let n = r.gen_range(2..20);
        let m = r.gen_range(1..=n * (n - 1) / 2);
        let t = random_tgraph(&mut r, n, m, true, true);
        let fast = values(&min_filtration(&t).unwrap());
        for (k, v) in naive_minimum(&t) {
            assert_eq!(fast[&k], v, "edge {k:?}");
        }
    }
}

#[test]
fn multi_label_form_agrees_on_single_labeled_graphs() {
    let mut r = rng(22);
    for _ in 0..100 {
        let n = r.gen_range(2..25);
        let m = r.gen_range(1..=n * (n - 1) / 2);
        let t = random_tgraph(&mut r, n, m, true, false);
        let d = linf(&avg_filtration(&t).unwrap(), &avg_filtration_multi(&t));
        assert!(d <= 1e-9, "{d}");
    }
}

#[test]
fn euler_characteristic_matches_betti_numbers() {
    let mut r = rng(23);
    let mut checked = 0;
    while checked < 100 {
        let n = r.gen_range(1..=14);
        let p = r.gen_range(0.1..0.5);
        let g = random_filtered(&mut r, n, p, 5);
        let f = build_flag_filtration(&g, 3).unwrap();
        let mut counts = [0i64; 4];
        for s in &f {
            counts[s.dim() as usize] += 1;
        }
        if counts[3] > 0 {
            continue;
        }
        let d = compute_persistence(&f, true).unwrap();
        let betti = |k: usize| d.degree(k).iter().filter(|p| p.1.is_infinite()).count() as i64;
        assert_eq!(counts[0] - counts[1] + counts[2], betti(0) - betti(1) + betti(2));
        checked += 1;
    }
}

#[test]
fn diagrams_are_stable_under_value_perturbation() {
    let mut r = rng(24);
    for _ in 0..60 {
        let n = r.gen_range(3..=12);
        let g = random_filtered(&mut r, n, 0.5, 8);
        let delta = r.gen_range(0.01..1.0);
        let noisy: Vec<_> = g
            .edges()
            .iter()
            .map(|e| (e.u, e.v, (e.value + r.gen_range(-delta..delta)).max(0.0)))
            .collect();
        let h = FilteredGraph::new(n, noisy).unwrap();
        let (a, b) = (graph_persistence(&g, 0.0).unwrap(), graph_persistence(&h, 0.0).unwrap());
        for k in 0..3 {
            let split = |pts: Vec<(f64, f64)>| -> (Vec<(f64, f64)>, Vec<f64>) {
                let (fin, ess): (Vec<_>, Vec<_>) = pts.into_iter().partition(|p| p.1.is_finite());
                let mut births: Vec<f64> = ess.iter().map(|p| p.0).collect();
                births.sort_by(f64::total_cmp);
                (fin, births)
            };
            let (fa, ea) = split(a.degree(k));
            let (fb, eb) = split(b.degree(k));
            assert_eq!(ea.len(), eb.len());
            for (x, y) in ea.iter().zip(&eb) {
                assert!((x - y).abs() <= delta + 1e-12);
            }
            let bd = bottleneck(&fa, &fb);
            assert!(bd <= delta + 1e-12, "degree {k}: {bd} > {delta}");
        }
    }
}

#[test]
fn pss_vanishes_on_the_diagonal() {
    let k = pss_kernel(&[(2.0, 2.0)], &[(1.0, 3.0), (0.0, 5.0)], 0.5).unwrap();
    assert_eq!(k, 0.0);
}

#[test]
fn smo_reaches_the_brute_force_optimum() {
    let mut r = rng(25);
    for _ in 0..150 {
        let n = r.gen_range(2..=6);
        let dim = r.gen_range(1..4);
        let k = random_psd(&mut r, n, dim);
        let mut y: Vec<f64> = (0..n).map(|_| if r.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        y[0] = 1.0;
        y[1] = -1.0;
        let c = [0.1, 1.0, 10.0][r.gen_range(0..3)];
        let sol = smo_solve(&k, &y, c);
        let best = brute_force_dual(&k, &y, c);
        assert!(
            (sol.objective - best).abs() <= 1e-3 * best.abs().max(1.0),
            "{} vs {best}",
            sol.objective
        );
        assert!(sol.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(balance.abs() <= 1e-9);
    }
}

#[test]
fn svm_separates_well_separated_clusters() {
    let mut r = rng(26);
    let centres = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)];
    let mut x = Vec::new();
    let mut labels = Vec::new();
    for (c, &(cx, cy)) in centres.iter().enumerate() {
        for _ in 0..10 {
            x.push((cx + r.gen_range(-1.0..1.0), cy + r.gen_range(-1.0..1.0)));
            labels.push(c);
        }
    }
    let rbf = |a: &(f64, f64), b: &(f64, f64)| (-((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)) / 10.0).exp();
    let k: Vec<Vec<f64>> = x.iter().map(|a| x.iter().map(|b| rbf(a, b)).collect()).collect();
    let model = svm_train(&k, &labels, 10.0).unwrap();
    assert_eq!(svm_predict(&model, &k).unwrap(), labels);
}

#[test]
fn stratified_split_keeps_class_proportions() {
    let labels: Vec<usize> = (0..100)
        .map(|i| {
            if i < 60 {
                0
            } else if i < 90 {
                1
            } else {
                2
            }
        })
        .collect();
    for s in 0..20 {
        let (train, test) = stratified_split(&labels, 0.2, RngSeed::new(s));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        let per_class = |idx: &[usize], c: usize| idx.iter().filter(|&&i| labels[i] == c).count();
        assert_eq!(
            (per_class(&test, 0), per_class(&test, 1), per_class(&test, 2)),
            (12, 6, 2)
        );
        assert!(per_class(&train, 2) >= 1);
    }
}

fn arb_graph(single: bool) -> impl Strategy<Value = TemporalGraph> {
    (3usize..15, 1usize..60, any::<u64>(), any::<bool>()).prop_map(move |(n, m, seed, int)| {
        let m = if single { m.min(n * (n - 1) / 2) } else { m };
        random_tgraph(&mut rng(seed), n, m, single, int)
    })
}

fn sorted_times(t: &TemporalGraph) -> Vec<f64> {
    let mut ts = t.timestamps();
    ts.sort_by(f64::total_cmp);
    ts
}

fn label_sets(t: &TemporalGraph) -> Vec<Vec<u64>> {
    let agg = t.aggregate();
    let mut sets: Vec<Vec<u64>> = (0..agg.n_edges())
        .map(|i| {
            let mut l: Vec<u64> = agg.labels(i).iter().map(|x| x.to_bits()).collect();
            l.sort();
            l
        })
        .collect();
    sets.sort();
    sets
}

fn degrees(t: &TemporalGraph) -> Vec<usize> {
    let agg = t.aggregate();
    let mut d = vec![0; t.n_vertices()];
    for &(u, v) in agg.pairs() {
        d[u] += 1;
        d[v] += 1;
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn average_is_invariant_under_time_translation(t in arb_graph(false), shift in -1e3f64..1e3) {
        let moved = t.map_timestamps(|x| x + shift).unwrap();
        let d = linf(&avg_filtration_multi(&t), &avg_filtration_multi(&moved));
        prop_assert!(d <= 1e-9 * (1.0 + shift.abs()));
    }

    #[test]
    fn average_is_invariant_under_time_reversal(t in arb_graph(false)) {
        let reversed = t.map_timestamps(|x| -x).unwrap();
        prop_assert!(linf(&avg_filtration_multi(&t), &avg_filtration_multi(&reversed)) <= 1e-9);
    }

    #[test]
    fn minimum_never_exceeds_average(t in arb_graph(true)) {
        let (lo, hi) = (values(&min_filtration(&t).unwrap()), values(&avg_filtration(&t).unwrap()));
        for (k, v) in lo {
            prop_assert!(v <= hi[&k] + 1e-12 || (v.is_infinite() && hi[&k].is_infinite()));
        }
    }

    #[test]
    fn tp_moves_the_filtration_by_less_than_epsilon(
        t in arb_graph(true), fraction in 0.0f64..=1.0, eps in 0.01f64..20.0, seed in any::<u64>()
    ) {
        let p = tp_perturb(&t, fraction, eps, RngSeed::new(seed)).unwrap();
        prop_assert_eq!(p.aggregate().pairs().to_vec(), t.aggregate().pairs().to_vec());
        prop_assert!(linf(&avg_filtration(&t).unwrap(), &avg_filtration(&p).unwrap()) <= eps + 1e-9);
    }

    #[test]
    fn ewlss_keeps_the_aggregate_and_label_sets(t in arb_graph(false), steps in 0usize..20, seed in any::<u64>()) {
        let agg = t.aggregate();
        let mut counts: Vec<usize> = (0..agg.n_edges()).map(|i| agg.labels(i).len()).collect();
        counts.sort();
        let swappable = counts.windows(2).any(|w| w[0] == w[1]);
        let p = match ewlss_shuffle(&t, steps, RngSeed::new(seed)) {
            Ok(p) => p,
            Err(tempofilt::Error::Infeasible(_)) if !swappable => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert_eq!(p.aggregate().pairs().to_vec(), agg.pairs().to_vec());
        prop_assert_eq!(label_sets(&p), label_sets(&t));
    }

    #[test]
    fn re_keeps_degrees_and_label_sets(t in arb_graph(false), steps in 0usize..50, seed in any::<u64>()) {
        let p = re_shuffle(&t, steps, RngSeed::new(seed)).unwrap();
        prop_assert_eq!(degrees(&p), degrees(&t));
        prop_assert_eq!(label_sets(&p), label_sets(&t));
    }

    #[test]
    fn cm_keeps_degrees_and_timestamps(t in arb_graph(true), seed in any::<u64>()) {
        if let Ok(p) = cm_rewire(&t, RngSeed::new(seed)) {
            prop_assert_eq!(degrees(&p), degrees(&t));
            prop_assert_eq!(sorted_times(&p), sorted_times(&t));
        }
    }
}
