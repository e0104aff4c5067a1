use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rubiksmagic")).args(args).output().expect("binary runs")
}

fn stdout_lines(o: &Output) -> Vec<String> {
    String::from_utf8(o.stdout.clone()).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn default_listing() {
    let o = run(&[]);
    assert!(o.status.success());
    let lines = stdout_lines(&o);
    assert_eq!(
        &lines[..3],
        [
            "EEEEWWWW f=2 area=5 Dc=0 symcount=8 assemblages=1 deltaiszero=1",
            "EEENWWWS f=0 area=8 Dc=0 symcount=4 assemblages=1 deltaiszero=1",
            "EEENWWSW f=1 area=7 Dc=-2 symcount=1 assemblages=2 deltaiszero=1",
        ]
    );
    assert_eq!(
        &lines[lines.len() - 3..],
        [
            "ENSWENSW f=4 area=3 Dc=0 symcount=8 assemblages=0 deltaiszero=0",
            "EWEWEWEW f=8 area=2 Dc=0 symcount=32 assemblages=0 deltaiszero=0",
            "Found 71 sequences",
        ]
    );
    assert_eq!(lines.len(), 72);
}

#[test]
fn twelve_tiles() {
    let o = run(&["-n", "12"]);
    assert!(o.status.success());
    let lines = stdout_lines(&o);
    assert_eq!(
        &lines[..3],
        [
            "EEEEEEWWWWWW f=2 area=7 Dc=0 symcount=8 assemblages=1 deltaiszero=1",
            "EEEEENWWWWWS f=0 area=12 Dc=0 symcount=4 assemblages=1 deltaiszero=1",
            "EEEEENWWWWSW f=1 area=11 Dc=-2 symcount=1 assemblages=2 deltaiszero=1",
        ]
    );
    assert_eq!(
        &lines[lines.len() - 5..],
        [
            "ENSNSWENSNSW f=8 area=3 Dc=0 symcount=4 assemblages=0 deltaiszero=0",
            "ENSNSWENSWEW f=8 area=3 Dc=0 symcount=2 assemblages=0 deltaiszero=0",
            "ENSWENSWENSW f=6 area=3 Dc=0 symcount=12 assemblages=0 deltaiszero=0",
            "EWEWEWEWEWEW f=12 area=2 Dc=0 symcount=48 assemblages=0 deltaiszero=0",
            "Found 4855 sequences",
        ]
    );
}

#[test]
fn check_sequence() {
    let o = run(&["-c", "EEWENWSW"]);
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "EEWENWSW f=3 area=5 Dc=-2 symcount=1 assemblages=6 deltaiszero=2\n \
         Assemblage with delta = 0: sla E3 E2 W2 E1 N1 W1 S1 W1\n \
         Assemblage with delta = 0: sla E3 E2 W1 E1 N1 W1 S2 W1\n"
    );
}

#[test]
fn bare_sequence_also_prints_canonical() {
    let o = run(&["NEEESWWW"]);
    assert!(o.status.success());
    assert_eq!(
        stdout_lines(&o),
        [
            "NEEESWWW f=0 area=8 Dc=0 symcount=4 assemblages=1 deltaiszero=1",
            "EEENWWWS f=0 area=8 Dc=0 symcount=4 assemblages=1 deltaiszero=1",
            " Assemblage with delta = 0: sla E1 E1 E1 N1 W1 W1 W1 S1",
        ]
    );
}

#[test]
fn linking_columns() {
    let o = run(&["-c", "EENWSSWN", "--lk"]);
    assert!(o.status.success());
    let lines = stdout_lines(&o);
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with(" Assemblage with delta = 0: sla E2 E1 N1 W1 S1 S1 W1 N1 | L="));
    assert!(lines[1].ends_with("linking-nonzero"));
}

#[test]
fn table_and_export() {
    let path = std::env::temp_dir().join(format!("rubiksmagic-export-{}.jsonl", std::process::id()));
    let o = run(&["--table", "--export", path.to_str().unwrap()]);
    assert!(o.status.success());
    let lines = stdout_lines(&o);
    assert!(lines[0].starts_with("flaps sequences assemblages delta0"));
    let total: Vec<&str> = lines.last().unwrap().split_whitespace().collect();
    assert_eq!(&total[..4], ["total", "71", "168", "59"]);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text.lines().count(), 71);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["sequence"], "EEEEWWWW");
    assert_eq!(first["assemblages"][0]["verdict"], "LinkingNonzero");
}

#[test]
fn bad_arguments_exit_2() {
    for args in [&["-c", "EEXW"][..], &["-n", "7"], &["-n", "22"], &["--param", "nope=1"], &["EEN"], &["--bogus"]] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains("error"), "{args:?}: {err}");
        assert!(err.contains("Usage"), "{args:?}: {err}");
    }
}

#[test]
fn sequence_errors_are_reported() {
    let o = run(&["-c", "EENW"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("sequence does not close"));
}
