use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_singforms"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn schema_check(kind: &str, text: &str) {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(repo().join(format!("schemas/{}.schema.json", kind))).unwrap()).unwrap();
    let doc: serde_json::Value = serde_json::from_str(text).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let errors: Vec<String> = match compiled.validate(&doc) {
        Ok(()) => vec![],
        Err(e) => e.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(errors.is_empty(), "{}: {:?}", kind, errors);
}

#[test]
fn classify_reports_ladder() {
    let o = run(&["classify", "--variety", "S(4)", "--form", "dx^dy/z^3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("alpha        no"), "{}", s);
    assert!(s.contains("L            yes"), "{}", s);
}

#[test]
fn classify_json_matches_schema_and_is_deterministic() {
    let a = run(&["classify", "--variety", "curve35", "--form", "y^2*dy/x", "--json"]);
    let b = run(&["classify", "--variety", "curve35", "--form", "y^2*dy/x", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    schema_check("classify", &stdout(&a));
}

#[test]
fn beta_and_verify_json_match_schema() {
    let o = run(&["beta", "--variety", "S(5)", "--degree", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["p_star"], 1);
    schema_check("beta", &stdout(&o));
    let o = run(&["verify", "curve35", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    schema_check("verify", &stdout(&o));
}

#[test]
fn integral_json_matches_schema() {
    let o = run(&["integrate", "--case", "smooth-disc", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    schema_check("integral", &stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let re = v["report"]["limit"]["re"].as_f64().unwrap();
    // ∫_{|s|<1} (1 - |s|^2)^2 dA = π/3
    assert!((re - std::f64::consts::PI / 3.0).abs() < 1e-9);
}

#[test]
fn verify_scopes() {
    let o = run(&["verify", "curve35"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("0 failed"));
    let o = run(&["verify", "Sk"]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    let row = s.lines().find(|l| l.starts_with("Sk/alpha2[k=5]")).expect("k = 5 row");
    assert!(row.contains("dx^dy/z^1") && row.contains("pass"), "{}", row);
    let o = run(&["verify", "Mk"]);
    let s = stdout(&o);
    let row = s.lines().find(|l| l.starts_with("Mk/d-omega-refuted[k=2]")).expect("k = 2 row");
    assert!(row.contains("pass"), "{}", row);
}

#[test]
fn verify_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("verify")).unwrap();
    std::fs::write(
        dir.path().join("verify/bad.toml"),
        "scope = \"bad\"\n\n[[case]]\nid = \"bad/alpha1\"\nkind = \"module\"\nvariety = \"S(4)\"\ndegree = 1\nset = \"alpha\"\nexpected = [\"x*dy/z^3\"]\n",
    )
    .unwrap();
    let o = bin().args(["verify", "bad"]).env("SINGFORMS_FIXTURES", dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn input_errors_exit_two() {
    let o = run(&["classify", "--variety", "S(4)", "--form", "x*dq"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains('^'));
    assert_eq!(run(&["classify", "--variety", "nope", "--form", "dx"]).status.code(), Some(2));
    assert_eq!(run(&["pullback-check", "--map", "f(5)"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "no-such-scope"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--variety", "/nonexistent/x.variety", "--form", "dx"]).status.code(), Some(2));
}

#[test]
fn export_variety_reloads_equal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s4.variety");
    let o = run(&["export", "variety", "--variety", "S(4)", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let loaded = singforms::variety::load_variety(&path).unwrap();
    assert_eq!(loaded, singforms::variety::builtin("S(4)").unwrap());
    // and the shipped copy is byte-identical
    assert_eq!(std::fs::read_to_string(&path).unwrap(), std::fs::read_to_string(repo().join("fixtures/s4.variety")).unwrap());
}

#[test]
fn shipped_fermat5_loads_and_classifies() {
    let p = repo().join("fixtures/fermat5.variety");
    let o = run(&["classify", "--variety", p.to_str().unwrap(), "--form", "a^2*b^2*da^db/z^4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("alpha        yes"));
}

#[test]
fn pullback_check_passes() {
    let o = run(&["pullback-check", "--map", "compose(slice(4),q(4))"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["pullback-check", "--map", "slice(4)", "--inner", "q(4)", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["functoriality"]["ok"], true);
}

#[test]
fn stokes_case_and_job_file() {
    let o = run(&["stokes", "--case", "curve35"]);
    assert_eq!(o.status.code(), Some(0));
    let job = repo().join("fixtures/numeric/curve35-stokes.toml");
    let o = run(&["stokes", "--cycle", job.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["report"]["residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn levels_table() {
    let o = run(&["levels", "--variety", "S(6)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("p* by degree: [Some(0), Some(0), Some(1)]"));
}

#[test]
fn schema_rejects_malformed_report() {
    let o = run(&["classify", "--variety", "S(2)", "--form", "dx", "--json"]);
    let mut v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    v["schema_version"] = serde_json::json!(2);
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(repo().join("schemas/classify.schema.json")).unwrap()).unwrap();
    assert!(!jsonschema::JSONSchema::compile(&schema).unwrap().is_valid(&v));
}

#[test]
fn family_csv_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = run(&["export", "family", "--case", "S4-family", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let got = std::fs::read_to_string(&path).unwrap();
    let want = std::fs::read_to_string(repo().join("fixtures/golden/s4-family.csv")).unwrap();
    let (g, w): (Vec<&str>, Vec<&str>) = (got.lines().collect(), want.lines().collect());
    assert_eq!(g[0], "t,re,im,mass,converged");
    assert_eq!(g.len(), w.len());
    for (a, b) in g.iter().zip(&w).skip(1) {
        let a: Vec<&str> = a.split(',').collect();
        let b: Vec<&str> = b.split(',').collect();
        assert_eq!(a[0], b[0]);
        assert_eq!(a[4], b[4]);
        for i in [1, 3] {
            let (x, y): (f64, f64) = (a[i].parse().unwrap(), b[i].parse().unwrap());
            assert!((x - y).abs() <= 1e-9 * y.abs().max(1e-12), "column {}: {} vs {}", i, x, y);
        }
        // u ∧ ū integrates to a real number
        assert!(a[2].parse::<f64>().unwrap().abs() < 1e-12);
    }
}
