//! Variety files, built-ins and numeric job files.

use singforms::numeric::cases::{find, stokes_cases, NumericJob};
use singforms::parse::print_poly;
use singforms::variety::{builtin, load_variety, load_variety_str, product, save_variety};
use singforms::Error;
use std::path::PathBuf;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn builtins_round_trip_through_files() {
    for id in ["S(4)", "curve35", "M(3)", "Fermat(5)", "affine(s)", "product(S(2),w)"] {
        let spec = builtin(id).unwrap();
        let text = save_variety(&spec);
        assert_eq!(load_variety_str(&text, id).unwrap(), spec, "{}", id);
    }
    let s4 = load_variety(&fixture("s4.variety")).unwrap();
    assert_eq!(s4, builtin("S(4)").unwrap());
}

#[test]
fn inconsistent_parametrization_names_the_equation() {
    let text = r#"
name = "bad"
variables = ["x", "y", "z"]
equations = ["x*y - z^3"]
dimension = 2
normal = true
poles = ["z"]
singular = ["x", "y", "z"]

[parametrization]
parameters = ["a", "b"]
components = ["a^3", "b^3", "a*b^2"]
"#;
    let names: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
    let eq = print_poly(&singforms::parse::parse_poly("x*y - z^3", &names).unwrap(), &names);
    match load_variety_str(text, "bad.variety") {
        Err(Error::Schema { line, field, msg, .. }) => {
            assert_eq!((line, field.as_str()), (10, "parametrization"));
            assert!(msg.contains("x*y - z^3") && msg.contains("a^3*b^6"), "{}", msg);
        }
        other => panic!("expected a schema error, got {:?}", other),
    }
    // same spec built in code reports the bare error
    let mut spec = builtin("S(3)").unwrap();
    spec.parametrization.as_mut().unwrap().components[2] = singforms::parse::parse_poly("a*b^2", &spec.parametrization.as_ref().unwrap().params).unwrap();
    assert!(matches!(spec.validate(), Err(Error::InconsistentParametrization(m)) if m.starts_with(&eq)));
}

#[test]
fn fermat5_fixture_loads() {
    let spec = load_variety(&fixture("fermat5.variety")).unwrap();
    assert_eq!(spec.id, "Fermat(5)");
    assert_eq!(spec.template_vars().get("n"), Some(&5));
    assert_eq!(spec.template_vars().get("p"), Some(&2));
    assert_eq!(print_poly(&spec.equations[0], &spec.vars), "a^5 - b^5 - z^5");
    assert_eq!(spec.alpha_seeds.unwrap().forms[&2], vec!["a^2*b^2*da^db/z^4".to_string()]);
}

#[test]
fn product_adds_a_smooth_coordinate() {
    let p = product(&builtin("S(2)").unwrap(), "w").unwrap();
    assert_eq!(p.vars, ["x", "y", "z", "w"]);
    assert_eq!(p.dim, 3);
    assert_eq!(print_poly(&p.equations[0], &p.vars), "x*y - z^2");
    assert!(p.validate().is_ok());
    assert!(product(&builtin("S(2)").unwrap(), "x").is_err());
}

#[test]
fn numeric_job_files_parse() {
    let text = std::fs::read_to_string(fixture("numeric/curve35-stokes.toml")).unwrap();
    let job = NumericJob::from_toml(&text, "curve35-stokes.toml").unwrap();
    assert_eq!(job, NumericJob::from_case(&find(&stokes_cases(), "curve35").unwrap()));
    let fam = std::fs::read_to_string(fixture("numeric/s4-family.toml")).unwrap();
    assert!(NumericJob::from_toml(&fam, "s4-family.toml").unwrap().cycle.family.is_some());
    match NumericJob::from_toml("u = \"ds\"\n", "broken.toml") {
        Err(Error::Schema { file, .. }) => assert_eq!(file, "broken.toml"),
        other => panic!("{:?}", other),
    }
}
