//! End-to-end runs of the `tempofilt` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempofilt::classify::{dataset_gram, populate_classes, ArtifactCache, ExperimentSpec, Pipeline, RootSource};
use tempofilt::filtration::FilteredGraph;
use tempofilt::generate::ContactModelSpec;
use tempofilt::kernels::GramMatrix;
use tempofilt::rng::RngSeed;

const FIVE_CYCLE: &str = "1 A B\n3 B C\n6 C D\n8 D E\n10 E A\n5 B F\n9 F C\n";

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tempofilt"));
    for a in args {
        cmd.arg(a);
    }
    cmd.output().unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn filtrate_writes_one_value_per_static_edge() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "fig.tsv", FIVE_CYCLE);
    let out = dir.path().join("fig.filt");
    ok(&run(&[&"filtrate", &"--method", &"avg", &input, &"-o", &out]));
    let g = FilteredGraph::read_file(&out).unwrap();
    assert_eq!(g.edges().len(), 7);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("#! filtration avg"));
}

#[test]
fn missing_input_is_an_io_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.filt");
    let res = run(&[&"filtrate", &dir.path().join("nope.tsv"), &"-o", &out]);
    assert_eq!(res.status.code(), Some(66));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&res.stderr).contains("error[io]"));
}

#[test]
fn malformed_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.tsv", "1 A B\nfoo A\n");
    let res = run(&[&"filtrate", &input, &"-o", &dir.path().join("o")]);
    assert_eq!(res.status.code(), Some(65));
}

#[test]
fn bad_flags_are_usage_errors() {
    let res = run(&[&"persistence", &"x", &"-o", &"y", &"--max-dim", &"7"]);
    assert_eq!(res.status.code(), Some(64));
}

#[test]
fn null_models_are_deterministic_in_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("root.tsv");
    ok(&run(&[
        &"generate",
        &"contact",
        &"--vertices",
        &"30",
        &"--edges",
        &"60",
        &"--seed",
        &"4",
        &"-o",
        &root,
    ]));
    let mut outputs = Vec::new();
    for (name, seed) in [("a", "9"), ("b", "9"), ("c", "10")] {
        let out = dir.path().join(name);
        ok(&run(&[
            &"nullmodel",
            &"--model",
            &"re",
            &"--steps",
            &"50",
            &"--seed",
            &seed,
            &root,
            &"-o",
            &out,
        ]));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_ne!(outputs[0], outputs[2]);
}

#[test]
fn stats_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "fig.tsv", FIVE_CYCLE);
    let out = run(&[&"stats", &input]);
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains('6') && text.contains('7'), "{text}");
}

fn frozen_dataset(
    dir: &Path,
    pipeline: Pipeline,
) -> (ExperimentSpec, tempofilt::classify::LabeledDataset, Vec<PathBuf>) {
    let root = RootSource::Contact(ContactModelSpec {
        n_vertices: 25,
        n_temporal_edges: 50,
        seed: RngSeed::new(2),
        ..Default::default()
    });
    let mut spec = ExperimentSpec::two_class(root, "cm".parse().unwrap(), "re:10".parse().unwrap(), 4);
    spec.pipeline = pipeline;
    let ds = populate_classes(&spec).unwrap();
    let files = ds
        .ids
        .iter()
        .zip(&ds.graphs)
        .map(|(id, g)| {
            let p = dir.join(format!("{id}.tsv"));
            g.write_file(&p).unwrap();
            p
        })
        .collect();
    (spec, ds, files)
}

fn assert_same_gram(a: &GramMatrix, b: &GramMatrix) {
    assert_eq!(a.ids(), b.ids());
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
    }
}

#[test]
fn file_pipeline_matches_in_process_pss_gram() {
    let dir = tempfile::tempdir().unwrap();
    let (spec, ds, files) = frozen_dataset(dir.path(), Pipeline::Ph);
    let mut diagrams = Vec::new();
    for f in &files {
        let filt = f.with_extension("filt");
        let dgm = f.with_extension("dgm");
        ok(&run(&[&"filtrate", &"--method", &"avg", f, &"-o", &filt]));
        ok(&run(&[&"persistence", &filt, &"-o", &dgm]));
        diagrams.push(dgm);
    }
    let gram = dir.path().join("gram.csv");
    let mut args: Vec<&dyn AsRef<std::ffi::OsStr>> = vec![&"kernel", &"pss", &"-o", &gram];
    for d in &diagrams {
        args.push(d);
    }
    ok(&run(&args));
    let from_files = GramMatrix::read_file(&gram).unwrap();
    let direct = dataset_gram(&ds, &spec, None, &ArtifactCache::new()).unwrap();
    assert_same_gram(&from_files, &direct);
}

#[test]
fn file_pipeline_matches_in_process_fwl_gram() {
    let dir = tempfile::tempdir().unwrap();
    let (spec, ds, files) = frozen_dataset(dir.path(), Pipeline::Fwl);
    let filts: Vec<PathBuf> = files
        .iter()
        .map(|f| {
            let filt = f.with_extension("filt");
            ok(&run(&[&"filtrate", &"--method", &"avg", f, &"-o", &filt]));
            filt
        })
        .collect();
    let gram = dir.path().join("gram.csv");
    let mut args: Vec<&dyn AsRef<std::ffi::OsStr>> = vec![&"kernel", &"fwl", &"-o", &gram];
    for f in &filts {
        args.push(f);
    }
    ok(&run(&args));
    let from_files = GramMatrix::read_file(&gram).unwrap();
    let direct = dataset_gram(&ds, &spec, None, &ArtifactCache::new()).unwrap();
    assert_same_gram(&from_files, &direct);
}

#[test]
fn experiment_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "exp.spec",
        "[root]\nsource = contact\nvertices = 30\nedges = 60\n\n[class]\nrepresentative = cm\nmembers = re:10\ncount = 6\n\n[class]\nrepresentative = root\nmembers = re:10\ncount = 6\n\n[evaluation]\nruns = 3\nseed = 5\n",
    );
    let csv = dir.path().join("out.csv");
    let out = run(&[&"experiment", &"--spec", &spec, &"-o", &csv]);
    ok(&out);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 3 + 2, "{text}");
    assert!(lines[4].starts_with("mean,") && lines[5].starts_with("stdev,"));
    assert!(!String::from_utf8_lossy(&out.stdout).is_empty());
}
