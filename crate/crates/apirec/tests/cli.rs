//! End-to-end tests of the `apirec` binary: exit codes, output schemas, and
//! the gen -> build -> query round trip.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_apirec"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

struct Workdir {
    dir: PathBuf,
}

impl Workdir {
    fn new(tag: &str) -> Workdir {
        let dir = std::env::temp_dir().join(format!("apirec-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Workdir { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.join(name).display().to_string()
    }
}

impl Drop for Workdir {
    fn drop(&mut self) {
        fs::remove_dir_all(&self.dir).ok();
    }
}

fn write_minimal_corpus(w: &Workdir) -> (String, String) {
    let apis = w.path("apis.jsonl");
    let apps = w.path("apps.jsonl");
    fs::write(
        &apis,
        concat!(
            "{\"api\":\"maps\",\"tags\":[\"geo\"]}\n",
            "{\"api\":\"pay\",\"tags\":[\"money\"]}\n",
            "{\"api\":\"sms\",\"tags\":[\"msg\"]}\n",
        ),
    )
    .unwrap();
    fs::write(
        &apps,
        concat!(
            "{\"app\":\"m1\",\"apis\":[\"maps\",\"pay\"]}\n",
            "{\"app\":\"m2\",\"apis\":[\"maps\",\"pay\"]}\n",
            "{\"app\":\"m3\",\"apis\":[\"maps\",\"sms\"]}\n",
        ),
    )
    .unwrap();
    (apis, apps)
}

#[test]
fn build_reports_stats_and_writes_graph() {
    let w = Workdir::new("build");
    let (apis, apps) = write_minimal_corpus(&w);
    let graph = w.path("graph.json");
    let out = run(&["build", "--apis", &apis, "--apps", &apps, "--out", &graph]);
    assert!(out.status.success());
    let stats = stdout_json(&out);
    assert_eq!(stats["vertices"], 3);
    assert_eq!(stats["edges"], 2);
    // maps-pay has co-usage 2.
    let body = fs::read_to_string(&graph).unwrap();
    assert!(body.contains("\"version\":1"));
}

#[test]
fn build_with_no_co_usage_exits_2() {
    let w = Workdir::new("noedges");
    let apis = w.path("apis.jsonl");
    let apps = w.path("apps.jsonl");
    fs::write(&apis, "{\"api\":\"solo\",\"tags\":[\"x\"]}\n").unwrap();
    fs::write(&apps, "{\"app\":\"m1\",\"apis\":[\"solo\"]}\n").unwrap();
    let out = run(&[
        "build",
        "--apis",
        &apis,
        "--apps",
        &apps,
        "--out",
        &w.path("g.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_corpus_exits_2() {
    let w = Workdir::new("badcorpus");
    let apis = w.path("apis.jsonl");
    let apps = w.path("apps.jsonl");
    fs::write(&apis, "not json at all\n").unwrap();
    fs::write(&apps, "{\"app\":\"m1\",\"apis\":[\"a\"]}\n").unwrap();
    let out = run(&[
        "build",
        "--apis",
        &apis,
        "--apps",
        &apps,
        "--out",
        &w.path("g.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

fn built_graph(w: &Workdir) -> String {
    let (apis, apps) = write_minimal_corpus(w);
    let graph = w.path("graph.json");
    let out = run(&["build", "--apis", &apis, "--apps", &apps, "--out", &graph]);
    assert!(out.status.success());
    graph
}

#[test]
fn query_returns_schema_compliant_json() {
    let w = Workdir::new("query");
    let graph = built_graph(&w);
    let out = run(&[
        "query",
        "--graph",
        &graph,
        "--keywords",
        "geo,money",
        "--z",
        "5",
        "--p",
        "3",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["query"], serde_json::json!(["geo", "money"]));
    assert_eq!(v["k"], 10);
    assert_eq!(v["theta"], 0.5);
    let lists = v["lists"].as_array().unwrap();
    assert!(!lists.is_empty());
    for (i, l) in lists.iter().enumerate() {
        assert!(l["apis"].as_array().is_some());
        assert!(l["compatibility"].is_number() || l["compatibility"] == "max");
        assert_eq!(l["diversity_to_prev"].as_array().unwrap().len(), i);
    }
}

#[test]
fn unknown_keyword_exits_3() {
    let w = Workdir::new("unknown");
    let graph = built_graph(&w);
    let out = run(&["query", "--graph", &graph, "--keywords", "geo,qXYZ"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("qXYZ"));
}

#[test]
fn out_of_range_knobs_exit_2() {
    let w = Workdir::new("knobs");
    let graph = built_graph(&w);
    let out = run(&[
        "query",
        "--graph",
        &graph,
        "--keywords",
        "geo",
        "--theta",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["query", "--graph", &graph, "--keywords", "geo", "--k", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["query", "--graph", &graph, "--keywords", "geo", "--z", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oversized_query_exits_4() {
    let w = Workdir::new("wide");
    let graph = built_graph(&w);
    let many = (0..33)
        .map(|i| format!("k{i}"))
        .collect::<Vec<_>>()
        .join(",");
    let out = run(&["query", "--graph", &graph, "--keywords", &many]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn single_all_covering_api_reports_max() {
    let w = Workdir::new("max");
    let apis = w.path("apis.jsonl");
    let apps = w.path("apps.jsonl");
    fs::write(
        &apis,
        concat!(
            "{\"api\":\"all\",\"tags\":[\"geo\",\"money\"]}\n",
            "{\"api\":\"other\",\"tags\":[\"msg\"]}\n",
        ),
    )
    .unwrap();
    fs::write(&apps, "{\"app\":\"m1\",\"apis\":[\"all\",\"other\"]}\n").unwrap();
    let graph = w.path("graph.json");
    assert!(
        run(&["build", "--apis", &apis, "--apps", &apps, "--out", &graph])
            .status
            .success()
    );
    let out = run(&[
        "query",
        "--graph",
        &graph,
        "--keywords",
        "geo,money",
        "--z",
        "3",
        "--p",
        "2",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["lists"][0]["compatibility"], "max");
    assert_eq!(v["lists"][0]["apis"], serde_json::json!(["all"]));
}

#[test]
fn repeated_query_invocations_are_byte_identical() {
    let w = Workdir::new("det");
    let graph = built_graph(&w);
    let args = [
        "query",
        "--graph",
        &graph,
        "--keywords",
        "geo,msg",
        "--z",
        "8",
        "--p",
        "3",
        "--seed",
        "42",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn query_dumps_subgraphs_when_asked() {
    let w = Workdir::new("dump");
    let graph = built_graph(&w);
    let dump = w.path("subgraphs.json");
    let out = run(&[
        "query",
        "--graph",
        &graph,
        "--keywords",
        "geo",
        "--z",
        "4",
        "--p",
        "2",
        "--dump-subgraphs",
        &dump,
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn corrupt_graph_file_exits_2() {
    let w = Workdir::new("corrupt");
    let graph = w.path("graph.json");
    fs::write(&graph, "{\"version\":1,\"vertices\":[").unwrap();
    let out = run(&["query", "--graph", &graph, "--keywords", "geo"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_build_query_round_trip() {
    let w = Workdir::new("roundtrip");
    let out_dir = w.path("corpus");
    let out = run(&[
        "gen",
        "--out-dir",
        &out_dir,
        "--n-apis",
        "80",
        "--n-apps",
        "200",
        "--n-keywords",
        "24",
        "--communities",
        "4",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["apis"], 80);
    assert_eq!(v["apps"], 200);

    let graph = w.path("graph.json");
    let apis = format!("{out_dir}/apis.jsonl");
    let apps = format!("{out_dir}/apps.jsonl");
    assert!(
        run(&["build", "--apis", &apis, "--apps", &apps, "--out", &graph])
            .status
            .success()
    );

    // Query three keywords that exist by construction.
    let out = run(&[
        "query",
        "--graph",
        &graph,
        "--keywords",
        "kw000,kw006,kw012",
        "--z",
        "10",
        "--p",
        "20",
        "--seed",
        "3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn gen_is_deterministic_on_disk() {
    let w = Workdir::new("gendet");
    let d1 = w.path("c1");
    let d2 = w.path("c2");
    for d in [&d1, &d2] {
        assert!(run(&[
            "gen",
            "--out-dir",
            d,
            "--n-apis",
            "50",
            "--n-apps",
            "120",
            "--n-keywords",
            "20",
            "--communities",
            "4",
            "--seed",
            "9",
        ])
        .status
        .success());
    }
    assert_eq!(
        fs::read(format!("{d1}/apis.jsonl")).unwrap(),
        fs::read(format!("{d2}/apis.jsonl")).unwrap()
    );
    assert_eq!(
        fs::read(format!("{d1}/apps.jsonl")).unwrap(),
        fs::read(format!("{d2}/apps.jsonl")).unwrap()
    );
}

#[test]
fn infeasible_gen_spec_exits_2() {
    let w = Workdir::new("genbad");
    let out = run(&[
        "gen",
        "--out-dir",
        &w.path("c"),
        "--n-apis",
        "4",
        "--n-apps",
        "10",
        "--max-apis-per-app",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_clean_run() {
    let out = run(&["verify", "--instances", "50", "--seed", "1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["instances"], 50);
    assert_eq!(v["mismatches"], 0);
}

#[test]
fn eval_single_app_and_sampled_modes() {
    let w = Workdir::new("eval");
    let out_dir = w.path("corpus");
    assert!(run(&[
        "gen",
        "--out-dir",
        &out_dir,
        "--n-apis",
        "60",
        "--n-apps",
        "150",
        "--n-keywords",
        "24",
        "--communities",
        "4",
        "--seed",
        "5",
    ])
    .status
    .success());
    let apis = format!("{out_dir}/apis.jsonl");
    let apps = format!("{out_dir}/apps.jsonl");

    let out = run(&[
        "eval",
        "--apis",
        &apis,
        "--apps",
        &apps,
        "--sample",
        "3",
        "--z",
        "10",
        "--p",
        "20",
        "--no-timing",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    let entries = v["apps"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    let first_ok = entries.iter().find(|e| e["status"] == "ok").unwrap();
    let app_id = first_ok["app"].as_str().unwrap().to_owned();
    assert!(first_ok["report"]["mp"].is_number());
    assert_eq!(first_ok["report"]["wall_time_seconds"], 0.0);

    let out = run(&[
        "eval",
        "--apis",
        &apis,
        "--apps",
        &apps,
        "--app",
        &app_id,
        "--z",
        "10",
        "--p",
        "20",
        "--no-timing",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["app"], app_id.as_str());
    assert!(v["report"]["k_effective"].as_u64().unwrap() >= 1);
}

#[test]
fn eval_unknown_app_exits_2() {
    let w = Workdir::new("evalbad");
    let (apis, apps) = write_minimal_corpus(&w);
    let out = run(&["eval", "--apis", &apis, "--apps", &apps, "--app", "ghost"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_excluded_app_exits_4() {
    let w = Workdir::new("evalexcl");
    let (apis, apps) = write_minimal_corpus(&w);
    // m1 = {maps, pay} derives only {geo, money}: r = 2 < 3.
    let out = run(&["eval", "--apis", &apis, "--apps", &apps, "--app", "m1"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sweep_emits_csv_with_expected_header() {
    let w = Workdir::new("sweep");
    let out_dir = w.path("corpus");
    assert!(run(&[
        "gen",
        "--out-dir",
        &out_dir,
        "--n-apis",
        "60",
        "--n-apps",
        "150",
        "--n-keywords",
        "24",
        "--communities",
        "4",
        "--seed",
        "5",
    ])
    .status
    .success());
    let apis = format!("{out_dir}/apis.jsonl");
    let apps = format!("{out_dir}/apps.jsonl");
    let csv_path = w.path("sweep.csv");
    let args = [
        "sweep",
        "--apis",
        &apis,
        "--apps",
        &apps,
        "--z",
        "4,8",
        "--p",
        "15",
        "--r",
        "4",
        "--apps-per-cell",
        "5",
        "--seed",
        "5",
        "--no-timing",
        "--out",
        &csv_path,
    ];
    let out = run(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let body = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "z,p,r,K,theta,seed,mp,mr,mild,milc,harmonic,mean_wall_s,n_instances,n_skipped"
    );
    assert_eq!(lines.count(), 2);
    assert_eq!(fs::read_to_string(&csv_path).unwrap(), body);

    // Byte-identical on repeat, including at a different parallelism.
    let again = run(&args);
    assert_eq!(out.stdout, again.stdout);
    let jobs1 = bin().args(["--jobs", "1"]).args(args).output().unwrap();
    assert_eq!(out.stdout, jobs1.stdout);
}
