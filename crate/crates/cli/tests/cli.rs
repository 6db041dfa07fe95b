use std::path::Path;
use std::process::{Command, Output};

fn qdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiv"))
        .args(args)
        .output()
        .expect("run qdiv")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_prints_both_counts() {
    let o = qdiv(&["count", "--cells", "8", "--dots", "32"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "unordered=2629575\nordered=919\n");
}

#[test]
fn compare_prints_requested_measures() {
    let o = qdiv(&["compare", "--p", "3,2,1", "--q", "2,2,2", "--measure", "kl"]);
    assert!(o.status.success());
    // (1/2)log2(3/2) + (1/6)log2(1/2) = 0.1258145836939113
    assert_eq!(stdout(&o), "kl=0.125815\n");

    let o = qdiv(&["compare", "--p", "3,2,1", "--q", "2,2,2"]);
    let text = stdout(&o);
    for key in ["kl=", "kn=", "jsd=", "hellinger=", "jaccard="] {
        assert!(
            text.lines().any(|l| l.starts_with(key)),
            "{key} missing in {text}"
        );
    }
    assert!(text.contains("jaccard=0.285714"));
}

#[test]
fn compare_needs_rescale_for_different_quanta() {
    let o = qdiv(&["compare", "--p", "2,1", "--q", "1,1", "--measure", "kl"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qdiv(&[
        "compare",
        "--p",
        "2,1",
        "--q",
        "1,1",
        "--measure",
        "kl",
        "--rescale",
    ]);
    assert!(o.status.success());
    // (2/3)log2(4/3) + (1/3)log2(2/3) = 0.08170416594551044
    assert_eq!(stdout(&o), "kl=0.081704\n");
}

#[test]
fn maximize_places_the_block_on_the_smallest_cell() {
    let o = qdiv(&["maximize", "--p", "3,1,2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("maximizer=1,4,1\n"));
    assert!(text.contains("kl_max=0.792481\n"));
}

#[test]
fn verify_reports_no_violations() {
    let o = qdiv(&["verify", "--cells", "5", "--dots", "11"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("checked=210\nviolations=0\nmax_gap="));
}

#[test]
fn exit_codes() {
    assert_eq!(
        qdiv(&["count", "--cells", "5", "--dots", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        qdiv(&["compare", "--p", "2,0", "--q", "1,1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        qdiv(&[
            "uniform-study",
            "--cells",
            "3",
            "--dots",
            "10",
            "--out",
            "/dev/null"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        qdiv(&["verify", "--cells", "8", "--dots", "32"])
            .status
            .code(),
        Some(2)
    );
    let o = qdiv(&[
        "pairwise",
        "--cells",
        "5",
        "--dots",
        "15",
        "--budget",
        "1000",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(qdiv(&["no-such-command"]).status.code(), Some(1));
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

fn run_all(dir: &Path, threads: &str) {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let cases: Vec<Vec<String>> = vec![
        vec![
            "pairwise".into(),
            "--cells".into(),
            "4".into(),
            "--dots".into(),
            "10".into(),
            "--out".into(),
            p("pairs.csv"),
        ],
        vec![
            "uniform-study".into(),
            "--cells".into(),
            "8".into(),
            "--dots".into(),
            "32".into(),
            "--out".into(),
            p("uniform.csv"),
        ],
        vec![
            "tables".into(),
            "--cells".into(),
            "6..7".into(),
            "--multipliers".into(),
            "2,3".into(),
            "--out-dir".into(),
            p("tables"),
        ],
        vec![
            "rank".into(),
            "--cells".into(),
            "6".into(),
            "--dots".into(),
            "24".into(),
            "--out".into(),
            p("ranks.csv"),
        ],
    ];
    for mut args in cases {
        args.extend(["--threads".to_string(), threads.to_string()]);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = qdiv(&args);
        assert!(
            o.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn experiment_files_do_not_depend_on_thread_count() {
    let one = tempfile::tempdir().unwrap();
    let many = tempfile::tempdir().unwrap();
    run_all(one.path(), "1");
    run_all(many.path(), "4");
    for name in [
        "pairs.csv",
        "pairs.index.csv",
        "pairs.summary.csv",
        "uniform.csv",
        "tables/table_max.csv",
        "tables/table_mean_over_max.csv",
        "tables/records.csv",
        "ranks.csv",
        "ranks.spearman.csv",
    ] {
        assert_eq!(
            read(one.path(), name),
            read(many.path(), name),
            "{name} differs"
        );
    }

    let pairs = String::from_utf8(read(one.path(), "pairs.csv")).unwrap();
    let mut lines = pairs.lines();
    assert_eq!(
        lines.next(),
        Some("index_p,index_q,kl,kn,jsd,hellinger,jaccard")
    );
    // C(9, 3) = 84 distributions, 84^2 pairs
    assert_eq!(lines.count(), 84 * 84);

    let uniform = String::from_utf8(read(one.path(), "uniform.csv")).unwrap();
    assert_eq!(uniform.lines().count(), 920);

    let ratios = String::from_utf8(read(one.path(), "tables/table_mean_over_max.csv")).unwrap();
    assert_eq!(ratios.lines().count(), 1 + 4 + 1);
    assert!(ratios.lines().last().unwrap().starts_with("avg,,"));
}
