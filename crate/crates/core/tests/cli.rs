use std::process::{Command, Output};

fn hopfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopfo"))
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
        .args(args)
        .output()
        .expect("run hopfo")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn contractible_polynomial_algebra() {
    let o = hopfo(&["contractible", "poly_pdg_3.alg"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-x^2"), "{}", stdout(&o));
    let o = hopfo(&["contractible", "alg:dg_square_zero"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn integral_and_grothendieck_ring() {
    assert_eq!(stdout(&hopfo(&["integral", "p_dg_3.hopf"])).trim(), "∂^2");
    assert_eq!(stdout(&hopfo(&["k0-ring", "hopf:taft:3"])).trim(), "Z[q]/(1+q+q^2)");
    assert_eq!(stdout(&hopfo(&["k0-class", "shift_trivial_p_dg_3.hmod"])).trim(), "-1");
}

#[test]
fn broken_antipode_is_reported() {
    let o = hopfo(&["verify-hopf", "bad_antipode.hopf"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("antipode"));
}

#[test]
fn path_algebra_pairing_and_replacement() {
    let o = hopfo(&["k0-pairing", "alg:path_a2@p_dg:3", "--idempotents", "0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = hopfo(&["replace", "bmod:simple0@path_a2@p_dg:3", "path_a2.res"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn json_errors_and_exit_codes() {
    let o = hopfo(&["--json", "integral", "no_such_file.hopf"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).or_else(|_| serde_json::from_slice(&o.stderr)).unwrap();
    assert!(v.get("error").is_some());
    let o = hopfo(&["--json", "acyclic", "hmod:regular@p_dg:3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn bar_stage_runs() {
    let o = hopfo(&["bar-stage", "alg:poly_pdg:2", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("true").count(), 4);
}
