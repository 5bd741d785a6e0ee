// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::path::Path;

use proptest::prelude::*;

use smtquery::extractors::{cactus_rows, percentage, Run, Runs};
use smtquery::qlang::match_labels;
use smtquery::store::IngestOptions;
use smtquery::testkit::{naive_eval, random_condition, rng, FIXTURES};
use smtquery::{parse_script, AstCache, Condition, DatasetAtom, Engine, SolverResult, Store};

fn engine<'a>(store: &'a Store, cache: Option<&'a AstCache>, out: &Path) -> Engine<'a> {
    Engine {
        store,
        cache,
        solvers: &[],
        jobs: 4,
        output_root: out.to_path_buf(),
        render: false,
        progress: false,
    }
}

fn fixture_store() -> Store {
    let store = Store::in_memory().unwrap();
    store
        .allocate_new(Path::new(FIXTURES), IngestOptions::default())
        .unwrap();
    store
}

fn labels(e: &Engine, dataset: &[DatasetAtom], c: &Condition) -> Vec<String> {
    let (r, warnings) = e.matches(dataset, c).unwrap();
    assert!(warnings.is_empty(), "{warnings:?}");
    match_labels(&r)
}

#[test]
fn cached_engine_agrees_with_naive_scan() {
    let dir = tempfile::tempdir().unwrap();
    let store = fixture_store();
    let cache = AstCache::new(dir.path().join("cache"));
    let e = engine(&store, Some(&cache), dir.path());
    let instances = store.all_instances().unwrap();
    let mut r = rng(11);
    for _ in 0..40 {
        let c = random_condition(&mut r, 3);
        let naive: Vec<String> = instances
            .iter()
            .filter(|i| {
                let s = parse_script(&std::fs::read_to_string(&i.path).unwrap()).unwrap();
                naive_eval(&c, &s)
            })
            .map(|i| i.label())
            .collect();
        assert_eq!(labels(&e, &[DatasetAtom::All], &c), naive, "{c}");
    }
}

#[test]
fn dataset_union_is_union_of_results() {
    let dir = tempfile::tempdir().unwrap();
    let store = fixture_store();
    let e = engine(&store, None, dir.path());
    let woorpje = DatasetAtom::Set("woorpje".into());
    let kaluza_re = DatasetAtom::SetTrack("kaluza".into(), "regex".into());
    let mut r = rng(5);
    for _ in 0..10 {
        let c = random_condition(&mut r, 2);
        let both: BTreeSet<String> = labels(&e, &[woorpje.clone(), kaluza_re.clone()], &c)
            .into_iter()
            .collect();
        let mut split: BTreeSet<String> = labels(&e, std::slice::from_ref(&woorpje), &c)
            .into_iter()
            .collect();
        split.extend(labels(&e, std::slice::from_ref(&kaluza_re), &c));
        assert_eq!(both, split);
    }
}

#[test]
fn count_totals_per_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let store = fixture_store();
    let e = engine(&store, None, dir.path());
    let q = smtquery::parse_query("Extract Count From * Where hasWEQ").unwrap();
    let ev = e.evaluate(&q).unwrap();
    assert_eq!(
        ev.stdout,
        "Total matching instances: 13 of 20 within the selected set (65.00%)\n\
         appendix: 1 of 1\nkaluza: 2 of 7\npisa: 2 of 2\nslog: 2 of 4\nwoorpje: 6 of 6\n"
    );
}

fn result_strategy() -> impl Strategy<Value = Option<Run>> {
    let result = prop::sample::select(SolverResult::ALL.to_vec());
    prop::option::of((result, 0.0f64..30.0).prop_map(|(result, time)| Run { result, time }))
}

proptest! {
    #[test]
    fn cactus_is_cumulative_over_decisive_runs(
        cells in prop::collection::vec(prop::collection::vec(result_strategy(), 3), 0..30)
    ) {
        let runs = Runs { solvers: vec!["a".into(), "b".into(), "c".into()], cells };
        let rows = cactus_rows(&runs);
        for (s, name) in runs.solvers.iter().enumerate() {
            let mine: Vec<&(String, usize, f64)> = rows.iter().filter(|r| &r.0 == name).collect();
            let solved: Vec<f64> = runs
                .cells
                .iter()
                .filter_map(|c| c[s])
                .filter(|r| matches!(r.result, SolverResult::Satisfied | SolverResult::Unsatisfied))
                .map(|r| r.time)
                .collect();
            prop_assert_eq!(mine.len(), solved.len());
            for (i, w) in mine.windows(2).enumerate() {
                prop_assert!(w[0].2 <= w[1].2);
                prop_assert_eq!(w[0].1, i + 1);
            }
            if let Some(last) = mine.last() {
                prop_assert!((last.2 - solved.iter().sum::<f64>()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn percentage_truncates_to_hundredths(m in 0usize..100_000, extra in 0usize..100_000) {
        let n = m + extra;
        let p: f64 = percentage(m, n).parse().unwrap();
        let exact = if n == 0 { 0.0 } else { 100.0 * m as f64 / n as f64 };
        prop_assert!(p <= exact + 1e-9 && exact - p < 0.01, "{m}/{n}: {p}");
    }
}
