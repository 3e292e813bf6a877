use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use satotate::census::{read_census_csv, read_scatter_csv};
use satotate_cli::selfcheck::{self, SelfCheckOptions};

fn satotate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satotate"))
        .args(args)
        .env_remove("SATOTATE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// Parses a two-or-more-column numeric CSV with a header line.
fn numeric_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn assert_single_root_svg(path: &Path) {
    let s = fs::read_to_string(path).unwrap();
    assert!(s.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert_eq!(s.matches("<svg").count(), 1);
    assert_eq!(s.matches("</svg>").count(), 1);
    assert!(s.trim_end().ends_with("</svg>"));
    // every element is closed: self-closing or paired
    let opens = s.matches("<g ").count() + s.matches("<text").count();
    let closes = s.matches("</g>").count() + s.matches("</text>").count();
    assert_eq!(opens, closes);
}

#[test]
fn diagonal_closed_form_on_three_points() {
    let o = satotate(&[
        "density", "--group", "Delta", "--route", "closed", "--grid", "3", "--from", "-4", "--to",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("s1,f,est_error\n"));
    let rows = numeric_rows(&text);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][1], 0.0);
    assert!((rows[1][1] - 1.0 / (2.0 * PI)).abs() < 1e-15);
    assert_eq!(rows[2][1], 0.0);
}

#[test]
fn generic_center_value() {
    let o = satotate(&[
        "density", "--group", "G", "--grid", "3", "--from", "-1", "--to", "1",
    ]);
    assert_eq!(code(&o), 0);
    let f0 = numeric_rows(&stdout(&o))[1][1];
    assert!((f0 - 0.4323037).abs() < 1e-6, "{f0}");
}

#[test]
fn routes_agree_in_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for route in ["series", "quadrature", "closed"] {
        let p = dir.path().join(format!("{route}.csv"));
        let o = satotate(&[
            "density",
            "--group",
            "G",
            "--route",
            route,
            "--grid",
            "41",
            "--csv",
            path_str(&p),
        ]);
        assert_eq!(code(&o), 0, "{route}");
        tables.push(numeric_rows(&fs::read_to_string(&p).unwrap()));
    }
    for t in &tables[1..] {
        for (a, b) in tables[0].iter().zip(t) {
            assert_eq!(a[0], b[0]);
            assert!((a[1] - b[1]).abs() < 1e-8, "{a:?} {b:?}");
        }
    }
}

#[test]
fn cdf_examples() {
    let o = satotate(&["cdf", "--group", "Delta", "--grid", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("s1,F\n"));
    let rows = numeric_rows(&text);
    assert!((rows[1][1] - 0.5).abs() < 1e-12);
    assert!((rows[2][1] - 1.0).abs() < 1e-8);

    let o = satotate(&["cdf", "--group", "G", "--grid", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(numeric_rows(&stdout(&o))[0][1], 0.0);

    let o = satotate(&[
        "cdf", "--group", "H", "--grid", "2", "--from", "-4", "--to", "-3.9",
    ]);
    assert_eq!(code(&o), 0);
    let f = numeric_rows(&stdout(&o))[1][1];
    let lead = 0.1f64.powi(3) / (24.0 * PI);
    assert!(((f - lead) / f).abs() < 0.02, "{f} vs {lead}");
}

#[test]
fn table_prints_ratios_and_dominance() {
    let o = satotate(&["table", "--q", "100", "--d", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("F_H/F_G")).unwrap();
    let ratio: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((ratio - 4000.0 / 3.0).abs() < 1e-9);

    let d = (40.0f64 / 3.0).sqrt().to_string();
    let o = satotate(&["table", "--q", "10000", "--d", &d]);
    let text = stdout(&o);
    let entry = |key: &str| -> f64 {
        let line = text
            .lines()
            .find(|l| l.trim_start().starts_with(key))
            .unwrap();
        line.rsplit(' ').next().unwrap().parse().unwrap()
    };
    assert!((entry("generic") / entry("humbert") - 1.0).abs() < 1e-12);
    assert!(text.contains("shimura"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["density", "--group", "X"][..],
        &["density", "--group", "G", "--grid", "1"],
        &["density", "--group", "G", "--from", "1", "--to", "0"],
        &["cdf", "--group", "G", "--to", "4.5"],
        &["census", "--q", "9", "--out", "/dev/null"],
        &["strata", "--q", "47", "--D", "5"],
        &["frobnicate"],
        &[],
    ] {
        assert_eq!(code(&satotate(args)), 2, "{args:?}");
    }
}

#[test]
fn io_errors_exit_4() {
    let o = satotate(&[
        "density",
        "--group",
        "G",
        "--grid",
        "2",
        "--csv",
        "/nonexistent/dir/f.csv",
    ]);
    assert_eq!(code(&o), 4);
    let o = satotate(&[
        "--config",
        "/nonexistent/cfg",
        "table",
        "--q",
        "5",
        "--d",
        "1",
    ]);
    assert_eq!(code(&o), 4);
}

#[test]
fn tolerance_failures_exit_3() {
    let lines = selfcheck::run(&SelfCheckOptions {
        g_series_scale: 1.0 + 1e-6,
        threads: 1,
    });
    let route = lines.iter().find(|l| l.name == "route agreement").unwrap();
    assert!(!route.passed, "{route:?}");
    assert!(lines
        .iter()
        .filter(|l| l.name != "route agreement")
        .all(|l| l.passed));
    let err = satotate_cli::error::CliError::Tolerance(String::new());
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn selfcheck_passes() {
    let o = satotate(&["selfcheck"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("7/7 checks passed"));
    let cal = text.lines().find(|l| l.contains("calibration")).unwrap();
    assert!(cal.contains("pi * c = 1.00000000"), "{cal}");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(
        &cfg,
        "# defaults\ngroup = Delta\nroute = closed\ngrid = 3\n",
    )
    .unwrap();
    let o = satotate(&["--config", path_str(&cfg), "density"]);
    assert_eq!(code(&o), 0);
    assert_eq!(numeric_rows(&stdout(&o)).len(), 3);
    let o = satotate(&["--config", path_str(&cfg), "density", "--grid", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(numeric_rows(&stdout(&o)).len(), 5);

    fs::write(&cfg, "group = G\nsmoothing = 2\n").unwrap();
    let o = satotate(&["--config", path_str(&cfg), "density"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("smoothing"));

    fs::write(&cfg, "[density]\ngroup = G\n").unwrap();
    assert_eq!(code(&satotate(&["--config", path_str(&cfg), "density"])), 2);
}

#[test]
fn thread_count_from_environment_or_flag() {
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_satotate"));
        c.args(args).env_remove("SATOTATE_THREADS");
        if let Some(v) = env {
            c.env("SATOTATE_THREADS", v);
        }
        c.output().unwrap()
    };
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = run(Some("3"), &["census", "--q", "7", "--out", path_str(&a)]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("on 3 threads"));
    let o = run(
        Some("3"),
        &[
            "--threads",
            "2",
            "census",
            "--q",
            "7",
            "--out",
            path_str(&b),
        ],
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("on 2 threads"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(
        code(&run(
            Some("0"),
            &["census", "--q", "7", "--out", path_str(&a)]
        )),
        2
    );
}

#[test]
fn sample_is_deterministic_and_ks_gated() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (p, threads) in [(&a, "1"), (&b, "4")] {
        let o = satotate(&[
            "--threads",
            threads,
            "sample",
            "--group",
            "H",
            "--n",
            "5000",
            "--seed",
            "11",
            "--csv",
            path_str(p),
        ]);
        assert_eq!(code(&o), 0);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("index,s1\n"));
    assert_eq!(text.lines().count(), 5001);

    let o = satotate(&["sample", "--group", "G", "--n", "1000", "--ks"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped"));
    assert!(!stdout(&o).contains("KS distance"));
}

#[test]
fn sample_ks_passes_for_matching_group() {
    let o = satotate(&[
        "sample", "--group", "Delta", "--n", "1000000", "--seed", "3", "--ks",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn census_cache_round_trips_and_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("c13.csv");
    let b = dir.path().join("c13b.csv");
    let o = satotate(&["census", "--q", "13", "--out", path_str(&a)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 failing"));
    let rows = read_census_csv(fs::File::open(&a).unwrap()).unwrap();
    assert_eq!(rows.iter().map(|r| r.count).sum::<u64>(), 342732);
    let mut pairs: Vec<(i64, i64)> = rows.iter().map(|r| (r.a1, r.a2)).collect();
    pairs.dedup();
    assert_eq!(pairs.len(), rows.len());
    assert_eq!(
        code(&satotate(&[
            "--threads",
            "3",
            "census",
            "--q",
            "13",
            "--out",
            path_str(&b)
        ])),
        0
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn strata_weil_mode_at_47() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("strata.csv");
    let svg = dir.path().join("strata.svg");
    let o = satotate(&[
        "strata",
        "--q",
        "47",
        "--D",
        "5,12,37,97",
        "--mode",
        "weil",
        "--csv",
        path_str(&csv),
        "--svg",
        path_str(&svg),
    ]);
    assert_eq!(code(&o), 0);
    let rows = read_scatter_csv(fs::File::open(&csv).unwrap()).unwrap();
    for d in [5, 12, 37, 97] {
        assert!(rows.iter().any(|r| r.disc == d), "no points for D = {d}");
    }
    let low = rows
        .iter()
        .filter(|r| r.disc == 5)
        .map(|r| r.delta0)
        .fold(f64::INFINITY, f64::min);
    assert!((low - (5.0f64 / 47.0).sqrt()).abs() < 1e-12);
    assert!((low - 0.32617).abs() < 1e-5);
    assert_single_root_svg(&svg);
}

#[test]
fn strata_census_mode_to_stdout() {
    let o = satotate(&["strata", "--q", "11", "--D", "5,8"]);
    assert_eq!(code(&o), 0);
    let rows = read_scatter_csv(o.stdout.as_slice()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.disc == 5 || r.disc == 8));
}

#[test]
fn plots_are_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.svg");
    let c = dir.path().join("c.svg");
    assert_eq!(
        code(&satotate(&[
            "density",
            "--group",
            "H",
            "--grid",
            "21",
            "--svg",
            path_str(&d)
        ])),
        0
    );
    assert_eq!(
        code(&satotate(&[
            "cdf",
            "--group",
            "G",
            "--grid",
            "21",
            "--svg",
            path_str(&c)
        ])),
        0
    );
    assert_single_root_svg(&d);
    assert_single_root_svg(&c);
    assert!(fs::read_to_string(&d).unwrap().contains("<polyline"));
}

#[test]
fn help_lists_every_flag() {
    let o = satotate(&["--help"]);
    assert_eq!(code(&o), 0);
    let top = stdout(&o);
    for sub in [
        "density",
        "cdf",
        "table",
        "sample",
        "census",
        "strata",
        "selfcheck",
    ] {
        assert!(top.contains(sub), "{sub}");
    }
    assert!(
        top.contains("--threads") && top.contains("--config") && top.contains("SATOTATE_THREADS")
    );
    let cases: [(&str, &[&str]); 6] = [
        (
            "density",
            &[
                "--group", "--route", "--grid", "--from", "--to", "--csv", "--svg",
            ],
        ),
        (
            "cdf",
            &[
                "--group", "--route", "--grid", "--from", "--to", "--csv", "--svg",
            ],
        ),
        ("table", &["--q", "--d"]),
        ("sample", &["--group", "--n", "--seed", "--ks", "--csv"]),
        ("census", &["--q", "--degree6", "--out"]),
        ("strata", &["--q", "--D", "--svg", "--csv", "--mode"]),
    ];
    for (sub, flags) in cases {
        let text = stdout(&satotate(&[sub, "--help"]));
        for f in flags {
            assert!(
                text.contains(&format!("{f} ")) || text.contains(&format!("{f}\n")),
                "{sub} {f}"
            );
        }
    }
}
