use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mtd-bench"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn mtd-bench")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn default_verify_passes() {
    let o = run(&["verify", "--depth", "2..4", "--seeds", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.starts_with("instances=9 "));
    assert!(out.contains("\ntwo_pass,9,9,0\n"), "{out}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["verify", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--guess", "sometimes"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--tt-log2-slots", "40"]).status.code(), Some(2));

    let bad = scratch("bad.cfg");
    std::fs::write(&bad, "depth=3\nthis line is wrong\n").unwrap();
    let o = run(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn trace_from_the_right_guess_is_two_passes() {
    let o = run(&["trace", "--branching", "3", "--depth", "5", "--first-guess", "oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let passes: Vec<&str> = out.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).collect();
    assert_eq!(passes.len(), 2, "{out}");
    assert!(out.lines().last().unwrap().starts_with("converged value="));
}

fn columns(out: &str, col: usize) -> Vec<String> {
    out.lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
        .map(|l| l.split(',').nth(col).unwrap().to_string())
        .collect()
}

#[test]
fn plus_inf_trace_walks_the_upper_bound_down() {
    for seed in 0..5 {
        let o = run(&["trace", "--depth", "6", "--policy", "plus_inf", "--seed-base", &seed.to_string()]);
        let uppers: Vec<i64> = columns(&stdout(&o), 4).iter().map(|s| s.parse().unwrap()).collect();
        let lowers = columns(&stdout(&o), 3);
        // every pass but the last fails low
        assert!(uppers.windows(2).all(|w| w[1] < w[0] || w[1] == *uppers.last().unwrap()));
        assert!(lowers[..lowers.len() - 1].iter().all(|l| l == "-inf"));
    }
}

#[test]
fn bisect_halves_a_finite_interval() {
    // a large bonus on even passes overshoots, so the odd passes bisect a finite interval
    let mut checked = 0;
    for seed in 0..6 {
        let out = stdout(&run(&[
            "trace", "--depth", "6", "--policy", "bisect", "--value-span", "1000", "--first-guess=-500",
            "--step-bonus", "700", "--bonus-period", "2", "--seed-base", &seed.to_string(),
        ]));
        let col = |c| -> Vec<Option<i64>> { columns(&out, c).iter().map(|x| x.parse().ok()).collect() };
        let (betas, lowers, uppers) = (col(1), col(3), col(4));
        for i in (2..betas.len()).step_by(2) {
            let (Some(l), Some(u)) = (lowers[i - 1], uppers[i - 1]) else { continue };
            let width = u - l;
            assert_eq!(betas[i], Some(l + (width / 2).max(1)), "{out}");
            let after = uppers[i].unwrap() - lowers[i].unwrap();
            assert!(after <= (width + 1) / 2, "{out}");
            checked += 1;
        }
    }
    assert!(checked >= 3);
}

#[test]
fn bench_csv_layout() {
    let o = run(&["bench", "--depth", "4", "--seeds", "5", "--algorithms", "alphabeta_plain,negascout,mtd_f"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let (rows, summary) = out.split_once("\n\n").unwrap();
    let rows: Vec<&str> = rows.lines().collect();
    assert!(rows[0].starts_with("instance,depth,algorithm,value,"));
    assert_eq!(rows.len(), 1 + 5 * 3);
    for group in rows[1..].chunks(3) {
        let values: Vec<&str> = group.iter().map(|r| r.split(',').nth(3).unwrap()).collect();
        assert!(values.iter().all(|v| *v == values[0]), "{group:?}");
    }
    let summary: Vec<&str> = summary.lines().collect();
    assert_eq!(summary[0], "algorithm,instances,geomean_leaves,geomean_nodes,leaves_vs_baseline");
    assert!(summary[1].starts_with("alphabeta_plain,5,"));
    assert!(summary[2].starts_with("negascout,5,") && summary[2].ends_with(",1.0000"));
    assert!(summary[3].starts_with("mtd_f,5,"));
    assert!(out.contains("\nalgorithm,passes_min,passes_median,passes_max,histogram\nmtd_f,"));
}

#[test]
fn bench_output_is_repeatable_and_text_form_aligns() {
    let args = ["bench", "--game", "connect4", "--depth", "5", "--seeds", "6", "--algorithms", "all", "--verbose-trace"];
    let a = stdout(&run(&args));
    assert_eq!(a, stdout(&run(&args)));
    assert!(a.contains("# trace c4-"));

    let text = stdout(&run(&["bench", "--depth", "3", "--seeds", "2", "--format", "text"]));
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("instance ") && !header.contains(','));
}

#[test]
fn verified_bench_checks_the_oracle() {
    let o = run(&["bench", "--depth", "5", "--seeds", "4", "--algorithms", "all", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty());
}

#[test]
fn oversized_verified_bench_is_skipped_with_a_warning() {
    // 6^9 leaves exceed the oracle's guard
    let o = run(&[
        "bench", "--branching", "6", "--depth", "9", "--seeds", "1", "--ordering-quality", "1", "--algorithms", "mtd_f",
        "--verify",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: skipped syn-b6-d9"));
    let out = stdout(&o);
    assert_eq!(out.split("\n\n").next().unwrap().lines().count(), 1, "only the header: {out}");
}

#[test]
fn node_budget_stops_deepening() {
    let out = stdout(&run(&["bench", "--depth", "8", "--seeds", "3", "--node-budget", "500", "--algorithms", "mtd_f"]));
    let completed: Vec<u32> = out
        .lines()
        .skip(1)
        .take(3)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert!(completed.iter().all(|&d| d < 8), "{completed:?}");
}

#[test]
fn bigger_tables_never_cost_nodes() {
    let nodes = |slots: &str| -> f64 {
        let out = stdout(&run(&[
            "bench", "--game", "connect4", "--depth", "8", "--plies", "4", "--seeds", "30", "--algorithms", "mtd_f",
            "--tt-log2-slots", slots,
        ]));
        let line = out.lines().find(|l| l.starts_with("mtd_f,30,")).unwrap();
        line.split(',').nth(3).unwrap().parse().unwrap()
    };
    let (a, b, c) = (nodes("12"), nodes("16"), nodes("20"));
    assert!(a >= b && b >= c, "{a} {b} {c}");
    assert!((b - c) / c < 0.01, "flat past 2^16: {b} vs {c}");
}

#[test]
fn config_files_resolve_through_the_suite_dir() {
    let dir = scratch("suites");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("tiny.cfg"), "# a small suite\ngame=connect4\ndepth=3\nseeds=4\n").unwrap();
    let o = bin()
        .args(["verify", "--config", "tiny.cfg", "--seeds", "2"])
        .env("MTD_SUITE_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // the flag overrides the file
    assert!(stdout(&o).starts_with("instances=2 synthetic=0 connect4=2 "));
}
