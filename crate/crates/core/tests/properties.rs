mod common;

use std::collections::BTreeMap;

use benchdyn::cluster::{assign_cluster, gold_trajectory, rank_by_gold_distance, train_som, euclidean, GoldFunction, SomConfig};
use benchdyn::ecosystem::{
    coverage_estimate, equal_share_fraction, split_equal_utilization, subsample_to_match, welch_t_test, Alternative,
    DatasetCount, PopularityRanking,
};
use benchdyn::ingest::{apply_polarity, parse_result_records, write_result_records, Polarity, PolarityTable, Provenance};
use benchdyn::lifecycle::{lifecycle_table, LifecycleOptions, LifecycleState};
use benchdyn::ingest::TaskHierarchy;
use benchdyn::preprocess::{normalize_trajectory, to_fixed_length, NormalizedTrajectory, TARGET_LEN};
use benchdyn::sota::{activity_counts, extract_sota_trajectory, relative_improvements};
use common::{brute_force_sota, day, record, series};
use proptest::prelude::*;

fn increasing(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<i64>)> {
    prop::collection::vec((0.001f64..10.0, 1i64..60), len).prop_map(|steps| {
        let mut v = -5.0;
        let mut d = 0;
        let mut values = Vec::new();
        let mut days = Vec::new();
        for (dv, dd) in steps {
            v += dv;
            d += dd;
            values.push(v);
            days.push(d);
        }
        (values, days)
    })
}

proptest! {
    #[test]
    fn improvements_telescope((values, days) in increasing(2..=50)) {
        let recs = series("b", &values, &days);
        let traj = extract_sota_trajectory(&recs).unwrap();
        prop_assert_eq!(traj.points.len(), values.len());
        let r: Vec<f64> = relative_improvements(&traj).iter().map(|i| i.r).collect();
        prop_assert_eq!(r.len(), values.len() - 1);
        prop_assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(r.iter().all(|x| *x > 0.0 && *x <= 1.0));
    }

    #[test]
    fn improvements_are_affine_invariant((values, days) in increasing(2..=30), a in 0.01f64..100.0, b in -1e3f64..1e3) {
        let before = relative_improvements(&extract_sota_trajectory(&series("b", &values, &days)).unwrap());
        let moved: Vec<f64> = values.iter().map(|v| a * v + b).collect();
        let after = relative_improvements(&extract_sota_trajectory(&series("b", &moved, &days)).unwrap());
        prop_assert_eq!(before.len(), after.len());
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x.r - y.r).abs() < 1e-9);
        }
    }

    #[test]
    fn sota_is_the_running_max_subsequence(values in prop::collection::vec(0u8..6, 1..=8)) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        let days: Vec<i64> = (0..values.len() as i64).collect();
        let traj = extract_sota_trajectory(&series("b", &values, &days)).unwrap();
        let expected: Vec<(chrono::NaiveDate, f64)> = brute_force_sota(&values).into_iter().map(|i| (day(i as i64), values[i])).collect();
        let got: Vec<(chrono::NaiveDate, f64)> = traj.points.iter().map(|p| (p.date, p.value)).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn sota_never_exceeds_active(pattern in prop::collection::vec((0usize..3, 0i64..2000, -10.0f64..10.0), 1..60)) {
        let recs: Vec<_> = pattern
            .iter()
            .enumerate()
            .map(|(i, (b, d, v))| record(&format!("b{b}"), "m", *v, day(*d), &format!("p{i}")))
            .collect();
        let h = TaskHierarchy::from_edges(Vec::<(String, String)>::new(), Default::default()).unwrap();
        for row in activity_counts(&recs, &h) {
            prop_assert!(row.sota_reporting <= row.active);
        }
    }

    #[test]
    fn polarity_reverses_order_and_is_idempotent(values in prop::collection::vec(-1e6f64..1e6, 2..20)) {
        let recs: Vec<_> = values.iter().enumerate().map(|(i, v)| record("b", "error", *v, day(i as i64), "p")).collect();
        let mut table = PolarityTable::default();
        table.insert("error", Polarity::Negative, Provenance::Curated).unwrap();
        let once = apply_polarity(&recs, &table).unwrap();
        let twice = apply_polarity(&once, &table).unwrap();
        prop_assert_eq!(&once, &twice);
        for a in &once {
            for b in &once {
                prop_assert_eq!(a.raw_value < b.raw_value, a.value > b.value);
            }
        }
    }

    #[test]
    fn records_round_trip(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..20)) {
        let recs: Vec<_> = values.iter().enumerate().map(|(i, v)| record("b", "m", *v, day(i as i64 * 17), &format!("p{i}"))).collect();
        let mut buf = Vec::new();
        write_result_records(&recs, &mut buf).unwrap();
        let parsed = parse_result_records(buf.as_slice()).unwrap();
        prop_assert!(parsed.errors.is_empty());
        prop_assert_eq!(&parsed.records, &recs);
        let mut again = Vec::new();
        write_result_records(&parsed.records, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn normalized_trajectories_stay_monotone((values, days) in increasing(2..=60), scale in 1i64..60) {
        let days: Vec<i64> = days.iter().map(|d| d * scale).collect();
        let traj = extract_sota_trajectory(&series("b", &values, &days)).unwrap();
        let v = normalize_trajectory(&traj).unwrap().vector;
        prop_assert_eq!(v.len(), TARGET_LEN);
        prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(v[0], 0.0);
        prop_assert_eq!(v[TARGET_LEN - 1], 1.0);
        prop_assert_eq!(to_fixed_length(&v, TARGET_LEN), v);
    }

    #[test]
    fn fixed_length_output_is_drawn_from_input(input in prop::collection::vec(-1e3f64..1e3, 1..3000)) {
        let out = to_fixed_length(&input, TARGET_LEN);
        prop_assert_eq!(out.len(), TARGET_LEN);
        prop_assert_eq!(out[0], input[0]);
        prop_assert!(out.iter().all(|x| input.contains(x)));
        if input.len() >= TARGET_LEN {
            prop_assert_eq!(out[TARGET_LEN - 1], input[input.len() - 1]);
        }
    }

    #[test]
    fn gold_ranking_is_a_sorted_prefix(
        noise in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 24), 1..40),
        k in 0usize..50,
    ) {
        let vectors: Vec<NormalizedTrajectory> = noise
            .iter()
            .enumerate()
            .map(|(i, n)| NormalizedTrajectory { source_id: format!("v{i:02}"), vector: to_fixed_length(n, TARGET_LEN) })
            .collect();
        let gold = gold_trajectory(GoldFunction::EarlySaturation);
        let ranked = rank_by_gold_distance(&vectors, GoldFunction::EarlySaturation, k).unwrap();
        let mut full: Vec<(f64, String)> = vectors.iter().map(|v| (euclidean(&v.vector, &gold.vector), v.source_id.clone())).collect();
        full.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        prop_assert_eq!(ranked.len(), k.min(vectors.len()));
        for (i, m) in ranked.iter().enumerate() {
            prop_assert_eq!(m.rank, i + 1);
            prop_assert_eq!(&m.source_id, &full[i].1);
            prop_assert_eq!(m.distance, full[i].0);
        }
    }

    #[test]
    fn split_has_no_better_alternative(counts in prop::collection::vec(1usize..10_000, 2..300)) {
        let entries = counts.iter().enumerate().map(|(i, c)| DatasetCount { dataset_name: format!("d{i:03}"), papers: *c }).collect();
        let ranking = PopularityRanking::from_counts(None, entries);
        let sorted = ranking.counts();
        let total: i64 = sorted.iter().map(|c| *c as i64).sum();
        let gap = |k: usize| (2 * sorted[..k].iter().map(|c| *c as i64).sum::<i64>() - total).abs();
        let split = split_equal_utilization(&ranking).unwrap();
        prop_assert_eq!(split.top.len() + split.bottom.len(), sorted.len());
        for k in 1..sorted.len() {
            prop_assert!(gap(k) >= gap(split.k));
            if gap(k) == gap(split.k) {
                prop_assert!(k >= split.k);
            }
        }
        let f = equal_share_fraction(&ranking).unwrap();
        prop_assert!(f > 0.0 && f <= 1.0);
    }

    #[test]
    fn subsample_is_a_seeded_subset(n in 0usize..200, frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let group: Vec<usize> = (0..n).collect();
        let target = (n as f64 * frac) as usize;
        let a = subsample_to_match(&group, target, seed).unwrap();
        prop_assert_eq!(a.len(), target);
        prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(a, subsample_to_match(&group, target, seed).unwrap());
        prop_assert!(subsample_to_match(&group, n + 1, seed).is_err());
    }

    #[test]
    fn welch_is_affine_invariant(
        a in prop::collection::vec(-100.0f64..100.0, 3..20),
        b in prop::collection::vec(-100.0f64..100.0, 3..20),
        scale in 0.1f64..10.0,
        shift in -50.0f64..50.0,
    ) {
        let base = welch_t_test(&a, &b, Alternative::Greater).unwrap();
        let f = |x: &Vec<f64>| x.iter().map(|v| scale * v + shift).collect::<Vec<_>>();
        let moved = welch_t_test(&f(&a), &f(&b), Alternative::Greater).unwrap();
        prop_assert!((base.p - moved.p).abs() < 1e-9);
        let less = welch_t_test(&a, &b, Alternative::Less).unwrap();
        prop_assert!((base.p + less.p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coverage_is_homogeneous(s in 1u64..100, extra in 0u64..500, factor in 1u64..20, t in 1u64..100_000, c in 0u64..10_000) {
        let n = s + extra;
        let a = coverage_estimate(s, n, t, c).unwrap();
        let b = coverage_estimate(s * factor, n * factor, t, c).unwrap();
        prop_assert!((a.sota_rate - b.sota_rate).abs() < 1e-15);
        prop_assert!((a.coverage - b.coverage).abs() <= 1e-12 * a.coverage.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn som_is_deterministic_and_self_consistent(seed in any::<u64>(), n in 3usize..12) {
        let vectors: Vec<NormalizedTrajectory> = (0..n)
            .map(|i| NormalizedTrajectory {
                source_id: format!("v{i}"),
                vector: (0..16).map(|j| ((i * 7 + j * 3) % 11) as f64 / 10.0).collect(),
            })
            .collect();
        let config = SomConfig { iterations: 300, seed, ..SomConfig::default() };
        let model = train_som(&vectors, &config).unwrap();
        prop_assert_eq!(&model, &train_som(&vectors, &config).unwrap());
        for c in 0..config.grid_cols {
            let w = NormalizedTrajectory { source_id: "w".into(), vector: model.unit(0, c).to_vec() };
            let (r, cc) = assign_cluster(&model, &w).unwrap();
            // Units with identical weights resolve to the lowest index.
            prop_assert_eq!(model.unit(r, cc), model.unit(0, c));
        }
    }

    #[test]
    fn lifecycle_is_a_partition(pattern in prop::collection::vec((0usize..6, 0usize..3, 2015i32..2021, 0.0f64..5.0), 1..80)) {
        let recs: Vec<_> = pattern
            .iter()
            .enumerate()
            .map(|(i, (b, task, y, v))| {
                let mut r = record(&format!("b{b}"), "m", *v, chrono::NaiveDate::from_ymd_opt(*y, 1 + (i % 12) as u32, 1).unwrap(), &format!("p{i}"));
                r.task_name = format!("t{task}");
                r
            })
            .collect();
        let h = TaskHierarchy::from_edges(Vec::<(String, String)>::new(), Default::default()).unwrap();
        let report = lifecycle_table(&recs, &h, LifecycleOptions::default()).unwrap();
        let mut seen: BTreeMap<(String, i32), LifecycleState> = BTreeMap::new();
        for e in &report.table.entries {
            prop_assert!(seen.insert((e.benchmark_id.clone(), e.year), e.state).is_none());
        }
        // Disbanded is absorbing.
        for ((b, y), s) in &seen {
            if *s == LifecycleState::Disbanded {
                if let Some(next) = seen.get(&(b.clone(), y + 1)) {
                    prop_assert_eq!(*next, LifecycleState::Disbanded);
                }
            }
        }
        // Per task-year counts sum to the benchmarks already started.
        let mut sums: BTreeMap<(String, i32), usize> = BTreeMap::new();
        for c in &report.counts {
            *sums.entry((c.task.clone(), c.year)).or_default() += c.count;
        }
        let task_of: BTreeMap<String, String> = benchdyn::sota::benchmark_tasks(&recs);
        for ((task, year), total) in sums {
            let started = seen
                .keys()
                .filter(|(b, y)| *y == year && task_of[b] == task)
                .count();
            prop_assert_eq!(total, started);
        }
    }
}
