use std::fs;
use std::path::Path;
use std::process::Command;

use spinwig_cli::config::{parse_config, parse_str, resolved_config, Overrides};
use spinwig_cli::{execute, exit_code, RunOptions, EXIT_CONFIG, EXIT_NUMERICAL, OBSERVABLES_FILE};
use spinwig_core::output::{read_snapshot_file, OBSERVABLE_COLUMNS};
use spinwig_core::{Error, QBoundary, Scenario, SelfEnergyClosure, TermGroup};

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn parse(text: &str) -> spinwig_core::Result<spinwig_cli::CliConfig> {
    parse_str(text, Path::new("."), &Overrides::default())
}

#[test]
fn minimal_preset_file_fills_defaults() {
    let cfg = parse("[run]\nscenario = larmor\n").unwrap();
    assert_eq!(cfg.run, Scenario::Larmor.preset());
    assert!(cfg.run.dt <= cfg.run.cfl_limit().unwrap());
}

#[test]
fn negative_time_step_names_the_key() {
    let err = parse("[run]\nscenario = larmor\ndt = -1\n").unwrap_err();
    match &err {
        Error::InvalidParameter { name, .. } => assert_eq!(name, "run.dt"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("run.dt"));
    assert_eq!(exit_code(&err), EXIT_CONFIG);
}

#[test]
fn unknown_key_reports_its_line() {
    let err = parse("[run]\nscenario = larmor\n\ngird.n_q = 8\n").unwrap_err();
    match &err {
        Error::Parse { line, message } => {
            assert_eq!(*line, 4);
            assert!(message.contains("gird.n_q"));
        }
        other => panic!("unexpected {other:?}"),
    }
    let err = parse("[grid]\nn_qq = 8\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }));
    let err = parse("[gird]\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 1, .. }));
}

#[test]
fn malformed_values_are_parse_errors() {
    for (text, line) in [
        ("[grid]\nn_q = eight\n", 2),
        ("[fields]\n\nb_ext = 1, 2\n", 3),
        ("[toggles]\ndrift = maybe\n", 2),
        ("n_q = 3\n", 1),
        ("[run]\nscenario = nowhere\n", 2),
        ("[closure]\nkind = exotic\n", 2),
    ] {
        match parse(text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn missing_file_is_a_config_error() {
    let err = parse_config(Path::new("/nonexistent/run.cfg"), &Overrides::default()).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
    assert_eq!(exit_code(&err), EXIT_CONFIG);
}

#[test]
fn keys_override_the_preset_in_any_order() {
    let cfg = parse(
        "[grid]\nq_boundary = dirichlet_inflow\n[toggles]\nlorentz = on\n\
         [run]\nn_steps = 7\nscenario = t2_decay\n",
    )
    .unwrap();
    assert_eq!(cfg.run.scenario, Scenario::T2Decay);
    assert_eq!(cfg.run.n_steps, 7);
    assert_eq!(cfg.run.grid.q_boundary, QBoundary::DirichletInflow);
    assert!(cfg.run.toggles.enabled(TermGroup::Lorentz));
    assert!(cfg.run.closure.relaxation().is_some());
}

#[test]
fn relaxation_axis_follows_the_field() {
    let cfg = parse("[fields]\nb_ext = 3, 0, 4\n[closure]\nkind = relaxation_time\n").unwrap();
    let r = cfg.run.closure.relaxation().unwrap();
    let want = [0.6, 0.0, 0.8];
    for (a, b) in r.relax_axis.iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn resolved_echo_round_trips_every_preset() {
    for sc in Scenario::ALL {
        let cfg = parse(&format!("[run]\nscenario = {sc}\n")).unwrap();
        let echo = resolved_config(&cfg);
        let again = parse(&echo).unwrap();
        assert_eq!(again, cfg, "{sc}");
        assert_eq!(resolved_config(&again), echo);
    }
}

#[test]
fn resolved_echo_round_trips_a_table_closure() {
    let dir = tempfile::tempdir().unwrap();
    let tables = dir.path().join("tables");
    fs::create_dir(&tables).unwrap();
    let cfg_text = "[grid]\nn_q = 4\nn_p = 4\nq_max = 4\n\
                    [closure]\nkind = table\nc_a = 0.5\ntable_dir = tables\n";
    fs::write(tables.join("gamma_bar.csv"), "p_index,q_index,value\n1,2,0.25\n").unwrap();
    let path = write(dir.path(), "t.cfg", cfg_text);
    let cfg = parse_config(&path, &Overrides::default()).unwrap();
    let set = cfg.run.closure.table().unwrap();
    let g = spinwig_core::make_grid(&cfg.run.grid).unwrap();
    assert_eq!(set.gamma_bar.values[g.index(2, 1)], 0.25);
    let again = parse(&resolved_config(&cfg)).unwrap();
    assert_eq!(again.run, cfg.run);
    assert!(matches!(again.run.closure, SelfEnergyClosure::Table(_)));
}

#[test]
fn command_line_overrides_win() {
    let o = Overrides {
        scenario: Some(Scenario::T1Recovery),
        n_steps: Some(3),
        dt: Some(0.125),
        seed: Some(9),
    };
    let cfg = parse_str("[run]\nscenario = larmor\nn_steps = 50\n", Path::new("."), &o).unwrap();
    assert_eq!(cfg.run.scenario, Scenario::T1Recovery);
    assert_eq!((cfg.run.n_steps, cfg.run.dt, cfg.run.seed), (3, 0.125, 9));
}

fn small_run(dir: &Path, out: &str) -> RunOptions {
    let path = write(
        dir,
        "run.cfg",
        "[run]\nscenario = ballistic_drift\nn_steps = 40\noutput_every = 10\nsnapshot_every = 20\n\
         [fields]\nb_ext = 0.3, 0, 0.2\n",
    );
    RunOptions::new(path, dir.join(out))
}

#[test]
fn run_writes_observables_snapshots_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let opts = small_run(dir.path(), "a");
    let series = execute(&opts).unwrap();
    let obs = fs::read_to_string(opts.out.join(OBSERVABLES_FILE)).unwrap();
    let mut lines = obs.lines();
    assert_eq!(lines.next().unwrap(), OBSERVABLE_COLUMNS.join(","));
    assert_eq!(lines.count(), series.observables.len());
    assert_eq!(series.observables.len(), 5);
    assert_eq!(series.snapshots.len(), 3);
    let fin = read_snapshot_file(&opts.out.join("final.csv"), &series.grid).unwrap();
    assert_eq!(fin.s0, series.final_state.s0);
    assert_eq!(fin.spin, series.final_state.spin);
    let echoed = parse_config(&opts.out.join("resolved.cfg"), &Overrides::default()).unwrap();
    assert_eq!(echoed.run, parse_config(&opts.config, &Overrides::default()).unwrap().run);
}

#[test]
fn identical_configs_give_identical_observables() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_run(dir.path(), "a");
    let mut b = a.clone();
    b.out = dir.path().join("b");
    execute(&a).unwrap();
    execute(&b).unwrap();
    let fa = fs::read(a.out.join(OBSERVABLES_FILE)).unwrap();
    let fb = fs::read(b.out.join(OBSERVABLES_FILE)).unwrap();
    assert!(!fa.is_empty());
    assert_eq!(fa, fb);
}

#[test]
fn binary_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let mut opts = small_run(dir.path(), "bin");
    opts.binary = true;
    let series = execute(&opts).unwrap();
    let file = fs::File::open(opts.out.join("final.bin")).unwrap();
    let back = spinwig_core::output::read_snapshot_binary(file, &series.grid).unwrap();
    assert_eq!(back, series.final_state);
}

#[test]
fn numerical_failure_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.cfg",
        "[run]\nscenario = larmor\nn_steps = 5\n[fields]\nb_ext = 0, 0, 1e308\n",
    );
    let opts = RunOptions::new(path, dir.path().join("out"));
    let err = execute(&opts).unwrap_err();
    assert_eq!(exit_code(&err), EXIT_NUMERICAL);
    let obs = fs::read_to_string(opts.out.join(OBSERVABLES_FILE)).unwrap();
    assert_eq!(obs.lines().count(), 2);
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinwig"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.cfg", "[run]\nscenario = t1_recovery\nn_steps = 5\n");
    let status = binary()
        .args(["run", good.to_str().unwrap(), "--out"])
        .arg(dir.path().join("o1"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let status = binary()
        .args(["run", good.to_str().unwrap(), "--dt=-1", "--out"])
        .arg(dir.path().join("o2"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stderr).contains("run.dt"));

    let bad = write(
        dir.path(),
        "bad.cfg",
        "[run]\nscenario = larmor\nn_steps = 5\n[fields]\nb_ext = 0, 0, 1e308\n",
    );
    let status = binary()
        .args(["run", bad.to_str().unwrap(), "--out"])
        .arg(dir.path().join("o3"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let status = binary().args(["run"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            parse_config(&path, &Overrides::default()).unwrap();
            n += 1;
        }
    }
    assert!(n >= 2);
}
