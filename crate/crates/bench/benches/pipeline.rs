// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, Criterion};

use smtquery::intel::builtin_specs;
use smtquery::intel::compute_intel;
use smtquery::store::IngestOptions;
use smtquery::testkit::{fixture_files, random_condition, random_script, rng, FIXTURES};
use smtquery::transforms::{apply_transform, TRANSFORMS};
use smtquery::{parse_script, print_script, AstCache, DatasetAtom, Engine, Store};

fn corpus_texts() -> Vec<String> {
    let mut texts: Vec<String> = fixture_files()
        .iter()
        .map(|f| std::fs::read_to_string(f).unwrap())
        .collect();
    let mut r = rng(1);
    texts.extend((0..200).map(|_| print_script(&random_script(&mut r))));
    texts
}

fn parsing(c: &mut Criterion) {
    let texts = corpus_texts();
    c.bench_function("parse corpus", |b| {
        b.iter(|| {
            for t in &texts {
                black_box(parse_script(t).unwrap());
            }
        })
    });
    let scripts: Vec<_> = texts.iter().map(|t| parse_script(t).unwrap()).collect();
    c.bench_function("print corpus", |b| {
        b.iter(|| {
            for s in &scripts {
                black_box(print_script(s));
            }
        })
    });
}

fn intel(c: &mut Criterion) {
    let scripts: Vec<_> = corpus_texts()
        .iter()
        .map(|t| parse_script(t).unwrap())
        .collect();
    let specs = builtin_specs();
    c.bench_function("builtin intel", |b| {
        b.iter(|| {
            for s in &scripts {
                let mut s = s.clone();
                for a in &mut s.assertions {
                    for spec in &specs {
                        compute_intel(a, *spec).unwrap();
                    }
                }
                black_box(s);
            }
        })
    });
    c.bench_function("all transforms", |b| {
        b.iter(|| {
            for s in &scripts {
                for t in TRANSFORMS {
                    black_box(apply_transform(t.transform, s).unwrap());
                }
            }
        })
    });
}

fn queries(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::in_memory().unwrap();
    store
        .allocate_new(Path::new(FIXTURES), IngestOptions::default())
        .unwrap();
    let cache = AstCache::new(dir.path().join("cache"));
    let conditions: Vec<_> = {
        let mut r = rng(4);
        (0..20).map(|_| random_condition(&mut r, 3)).collect()
    };
    for (label, cache) in [("cached", Some(&cache)), ("uncached", None)] {
        let engine = Engine {
            store: &store,
            cache,
            solvers: &[],
            jobs: 4,
            output_root: dir.path().join("output"),
            render: false,
            progress: false,
        };
        c.bench_function(&format!("20 queries over fixtures, {label}"), |b| {
            b.iter(|| {
                for cond in &conditions {
                    black_box(engine.matches(&[DatasetAtom::All], cond).unwrap());
                }
            })
        });
    }
}

criterion_group!(benches, parsing, intel, queries);
criterion_main!(benches);
