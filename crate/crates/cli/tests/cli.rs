use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dtf_core::model_file::{load_model, save_model};
use dtf_core::{DtfModel, IndependentPermutation, Tsp};

fn dtf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtf"))
        .args(args)
        .env_remove("DTF_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn gen_copula(dir: &Path, tc: &str, seed: &str) -> (String, String) {
    let (tr, te) = (path(dir, "train.csv"), path(dir, "test.csv"));
    let o = dtf(&[
        "gen", "--dataset", "copula", "--tc", tc, "--seed", seed, "--out-train", &tr, "--out-test", &te,
    ]);
    assert!(o.status.success(), "{o:?}");
    (tr, te)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn missing_output_is_a_usage_error() {
    let o = dtf(&["gen", "--dataset", "copula", "--seed", "1", "--out-test", "x.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = dtf(&["gen", "--dataset", "8gauss", "--tc", "3", "--seed", "1", "--out-train", "a", "--out-test", "b"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn copula_gen_writes_binary_columns() {
    let dir = tempfile::tempdir().unwrap();
    let (tr, te) = gen_copula(dir.path(), "100", "7");
    let train = std::fs::read_to_string(&tr).unwrap();
    let test = std::fs::read_to_string(&te).unwrap();
    assert_eq!(train.lines().count(), 8001);
    assert_eq!(test.lines().count(), 2001);
    assert!(train.lines().skip(1).all(|l| l.split(',').all(|c| c == "0" || c == "1")));
    assert_eq!(train.lines().nth(1).unwrap().split(',').count(), 4);
}

#[test]
fn eight_gaussian_split_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let (tr, te) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    let o = dtf(&["gen", "--dataset", "8gauss", "--seed", "3", "--out-train", &tr, "--out-test", &te]);
    assert!(stdout(&o).contains("n_train=10240 n_test=2560 d=2 k=[91, 91]"), "{o:?}");
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (tr, te) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    let o = Command::new(env!("CARGO_BIN_EXE_dtf"))
        .args(["gen", "--dataset", "copula", "--n", "100", "--out-train", &tr, "--out-test", &te])
        .env("DTF_SEED", "5")
        .output()
        .unwrap();
    assert!(o.status.success(), "{o:?}");
}

#[test]
fn balanced_pairs_give_two_ln_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.csv", "a,b\n0,0\n0,1\n1,0\n1,1\n");
    let model = path(dir.path(), "m.json");
    let o = dtf(&["fit", "--train", &data, "--num-tsps", "0", "--pseudocount", "0", "--seed", "0", "--model", &model]);
    assert!(o.status.success(), "{o:?}");
    let o = dtf(&["eval", "--model", &model, "--data", &data]);
    assert!(stdout(&o).contains("mean NLL: 1.3863 nats"), "{}", stdout(&o));
    let o = dtf(&["eval", "--model", &model, "--data", &data, "--bits"]);
    assert!(stdout(&o).contains("mean NLL: 2.0000 bits"));
}

#[test]
fn base_only_model_equals_marginals() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.csv", "0,0\n0,1\n0,1\n1,1\n");
    let model = path(dir.path(), "m.json");
    dtf(&["fit", "--train", &data, "--num-tsps", "0", "--pseudocount", "0", "--seed", "0", "--model", &model]);
    let (m, _) = load_model(Path::new(&model)).unwrap();
    assert!(m.tsps().is_empty());
    assert_eq!(m.base().probs(), vec![vec![0.75, 0.25], vec![0.25, 0.75]]);
}

#[test]
fn unseen_combinations_are_counted_apart() {
    let dir = tempfile::tempdir().unwrap();
    let train = write(dir.path(), "tr.csv", "0,0\n0,0\n1,0\n1,0\n");
    let test = write(dir.path(), "te.csv", "0,0\n1,1\n");
    let model = path(dir.path(), "m.json");
    // the second column never takes value 1 in train, and k = 1 there, so
    // pin the cardinalities through a sidecar
    std::fs::write(format!("{train}.schema.json"), r#"{"cardinalities":[2,2],"has_header":false}"#).unwrap();
    dtf(&["fit", "--train", &train, "--num-tsps", "0", "--pseudocount", "0", "--seed", "0", "--model", &model]);
    let o = dtf(&["eval", "--model", &model, "--data", &test]);
    let out = stdout(&o);
    assert!(out.contains("mean NLL: inf nats"), "{out}");
    assert!(out.contains("zero-likelihood rows: 1 (mean over the other 1: 0.6931 nats)"), "{out}");
    let o = dtf(&["eval", "--model", &model, "--data", &test, "--per-row"]);
    assert_eq!(stdout(&o), "row,nll\n0,0.6931\n1,inf\n");
}

#[test]
fn fit_prints_trace_and_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let (tr, _) = gen_copula(dir.path(), "100", "2");
    let model = path(dir.path(), "m.json");
    let o = dtf(&["fit", "--train", &tr, "--criterion", "glp", "--num-tsps", "2", "--max-depth", "2", "--min-split", "2", "--pseudocount", "1", "--seed", "0", "--model", &model]);
    let out = stdout(&o);
    for needle in ["stage 0:", "stage 1:", "stage 2:", "parameters:"] {
        assert!(out.contains(needle), "{out}");
    }
    let (m, _) = load_model(Path::new(&model)).unwrap();
    assert!(out.contains(&format!("parameters: {}", m.parameter_count())));
}

#[test]
fn check_passes_on_fresh_models_and_runs_exhaustively_on_large_grids() {
    let dir = tempfile::tempdir().unwrap();
    let (tr, te) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    dtf(&["gen", "--dataset", "8gauss", "--seed", "3", "--out-train", &tr, "--out-test", &te]);
    let model = path(dir.path(), "m.json");
    let o = dtf(&["fit", "--train", &tr, "--num-tsps", "2", "--max-depth", "4", "--seed", "1", "--model", &model]);
    assert!(o.status.success(), "{o:?}");
    let o = dtf(&["check", "--model", &model, "--data", &tr, "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all checks passed"));
}

fn fitted_model(dir: &Path) -> (String, String) {
    let (tr, _) = gen_copula(dir, "10", "4");
    let model = path(dir, "m.json");
    dtf(&["fit", "--train", &tr, "--num-tsps", "1", "--max-depth", "2", "--seed", "0", "--model", &model]);
    (tr, model)
}

#[test]
fn edited_permutation_entry_fails_the_audit() {
    let dir = tempfile::tempdir().unwrap();
    let (_, model) = fitted_model(dir.path());
    let text = std::fs::read_to_string(&model).unwrap();
    let at = text.find("\"perm\":[[").unwrap() + "\"perm\":[[".len();
    let mut bytes = text.into_bytes();
    // make the first row `[v, v]`: no longer a permutation
    bytes[at + 2] = bytes[at];
    std::fs::write(&model, bytes).unwrap();
    let o = dtf(&["check", "--model", &model]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn domain_breaking_permutation_fails_the_audit() {
    let dir = tempfile::tempdir().unwrap();
    let (_, model) = fitted_model(dir.path());
    let (m, enc) = load_model(Path::new(&model)).unwrap();
    let tree = &m.tsps()[0];
    let cards = tree.cardinalities().to_vec();
    let root_feature = tree.root().split.as_ref().expect("root splits").feature();
    let mut nodes = tree.clone().into_nodes();
    // a child only ever sees one value of the root's split feature; swapping
    // that feature's values moves points out of its domain
    let mut maps: Vec<Vec<usize>> = cards.iter().map(|&k| (0..k).collect()).collect();
    maps[root_feature] = vec![1, 0];
    nodes[1].perm = IndependentPermutation::from_maps(maps).unwrap();
    let broken = Tsp::from_nodes(nodes, cards, tree.max_depth()).unwrap();
    let m = DtfModel::new(vec![broken], m.base().clone(), None).unwrap();
    let bad = PathBuf::from(path(dir.path(), "bad.json"));
    save_model(&bad, &m, enc.as_ref()).unwrap();
    let bad = bad.to_string_lossy().into_owned();
    let o = dtf(&["check", "--model", &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL"));
    assert!(stdout(&o).contains("node 1"));
    // the model is also refused for evaluation and sampling
    let data = write(dir.path(), "x.csv", "0,0,0,0\n");
    assert_eq!(dtf(&["eval", "--model", &bad, "--data", &data]).status.code(), Some(3));
}

#[test]
fn sampling_is_deterministic_and_decodes_labels() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(
        dir.path(),
        "s.csv",
        "cap,odor\nred,foul\nred,foul\nblue,none\nblue,none\ngreen,none\nred,foul\n",
    );
    let model = path(dir.path(), "m.json");
    let o = dtf(&["fit", "--train", &data, "--max-depth", "2", "--pseudocount", "0", "--seed", "0", "--model", &model]);
    assert!(o.status.success(), "{o:?}");
    let (a, b) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    dtf(&["sample", "--model", &model, "--n", "50", "--seed", "9", "--out", &a]);
    dtf(&["sample", "--model", &model, "--n", "50", "--seed", "9", "--out", &b]);
    let sa = std::fs::read_to_string(&a).unwrap();
    assert_eq!(sa, std::fs::read_to_string(&b).unwrap());
    assert!(sa.starts_with("cap,odor\n"));
    for line in sa.lines().skip(1) {
        assert!(["red,foul", "blue,none", "green,none"].contains(&line), "{line}");
    }
    // labelled data round-trips through eval with the stored encoding
    let o = dtf(&["eval", "--model", &model, "--data", &a]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("zero-likelihood"));
}

#[test]
fn mismatched_data_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let (_, model) = fitted_model(dir.path());
    let data = write(dir.path(), "x.csv", "0,0,0\n");
    assert_eq!(dtf(&["eval", "--model", &model, "--data", &data]).status.code(), Some(1));
}
