//! `.variety` files (TOML).
//!
//! ```toml
//! name = "Fermat(5)"
//! variables = ["a", "b", "z"]
//! equations = ["a^5 - b^5 - z^5"]
//! dimension = 2
//! normal = true
//! poles = ["z"]
//! singular = ["a", "b", "z"]
//!
//! [parametrization]          # optional
//! parameters = ["t"]
//! components = ["t^5", "t^3"]
//!
//! [deck]                     # optional, diagonal action by k-th roots of unity
//! order = 4
//! weights = [1, 3]
//!
//! [alpha_seeds]              # optional, also [l_presentation]
//! source = "declared"
//! 2 = ["a^2*b^2*da^db/z^4"]
//!
//! [golden]                   # optional comparison data
//! alpha2 = ["a^2*b^2*da^db/z^4"]
//! ```

use super::{DeckGroup, FormTable, Parametrization, ProductInfo, VarietySpec};
use crate::error::{Error, Result};
use crate::parse::{parse_poly, print_poly};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VarietyFile {
    name: String,
    variables: Vec<String>,
    #[serde(default)]
    equations: Vec<String>,
    dimension: usize,
    #[serde(default)]
    normal: bool,
    #[serde(default)]
    poles: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    singular: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parametrization: Option<ParamFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deck: Option<DeckFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<ProductFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l_presentation: Option<TableFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_seeds: Option<TableFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    golden: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamFile {
    parameters: Vec<String>,
    components: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeckFile {
    order: u32,
    weights: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductFile {
    factor: String,
    disc: String,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    source: String,
    #[serde(flatten)]
    forms: BTreeMap<String, Vec<String>>,
}

/// Line (1-based) of the first occurrence of `key = ` or `[key]`.
fn line_of(text: &str, key: &str) -> usize {
    for (i, l) in text.lines().enumerate() {
        let t = l.trim_start();
        if t.starts_with(&format!("[{}]", key)) {
            return i + 1;
        }
        if let Some(rest) = t.strip_prefix(key) {
            if rest.trim_start().starts_with('=') {
                return i + 1;
            }
        }
    }
    0
}

fn schema(file: &str, text: &str, field: &str, msg: impl Into<String>) -> Error {
    let key = field.rsplit('.').next().unwrap_or(field);
    Error::Schema { file: file.into(), line: line_of(text, key), field: field.into(), msg: msg.into() }
}

fn table_in(t: Option<TableFile>, file: &str, text: &str, field: &str) -> Result<Option<FormTable>> {
    let Some(t) = t else { return Ok(None) };
    let mut forms = BTreeMap::new();
    for (k, v) in t.forms {
        let q: usize = k.parse().map_err(|_| schema(file, text, field, format!("degree key '{}' is not an integer", k)))?;
        forms.insert(q, v);
    }
    Ok(Some(FormTable { source: t.source, forms }))
}

fn table_out(t: &Option<FormTable>) -> Option<TableFile> {
    t.as_ref().map(|t| TableFile {
        source: t.source.clone(),
        forms: t.forms.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
    })
}

pub fn load_variety_str(text: &str, file: &str) -> Result<VarietySpec> {
    let raw: VarietyFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1).unwrap_or(0);
        let msg = e.message().to_string();
        let field = msg.split('`').nth(1).unwrap_or("").to_string();
        Error::Schema { file: file.into(), line, field, msg }
    })?;
    let vars = raw.variables.clone();
    let mut equations = Vec::new();
    for s in &raw.equations {
        equations.push(parse_poly(s, &vars).map_err(|e| schema(file, text, "equations", e.to_string()))?);
    }
    let mut poles = vec![false; vars.len()];
    for p in &raw.poles {
        match vars.iter().position(|v| v == p) {
            Some(i) => poles[i] = true,
            None => return Err(schema(file, text, "poles", format!("unknown variable '{}'", p))),
        }
    }
    let mut singular = Vec::new();
    for s in &raw.singular {
        singular.push(parse_poly(s, &vars).map_err(|e| schema(file, text, "singular", e.to_string()))?);
    }
    let parametrization = match raw.parametrization {
        Some(p) => {
            let mut components = Vec::new();
            for s in &p.components {
                components.push(
                    parse_poly(s, &p.parameters).map_err(|e| schema(file, text, "parametrization.components", e.to_string()))?,
                );
            }
            Some(Parametrization { params: p.parameters, components })
        }
        None => None,
    };
    let mut spec = VarietySpec {
        id: raw.name,
        vars,
        equations,
        dim: raw.dimension,
        singular,
        parametrization,
        deck: raw.deck.map(|d| DeckGroup { order: d.order, weights: d.weights }),
        normal: raw.normal,
        poles,
        l_presentation: table_in(raw.l_presentation, file, text, "l_presentation")?,
        alpha_seeds: table_in(raw.alpha_seeds, file, text, "alpha_seeds")?,
        golden: raw.golden,
        product: raw.product.map(|p| ProductInfo { factor: p.factor, disc: p.disc }),
        notes: raw.notes,
    };
    if spec.singular.is_empty() {
        spec.singular = spec.jacobian_ideal();
    }
    // report the equation as written, with its residue in the parameters
    if let Some(p) = spec.parametrization.as_ref().filter(|p| p.components.len() == spec.nvars()) {
        for (written, f) in raw.equations.iter().zip(&spec.equations) {
            let r = f.compose(&p.components);
            if !r.is_zero() {
                let msg = format!("parametrization does not satisfy the equation {} (residue {})", written, print_poly(&r, &p.params));
                return Err(schema(file, text, "parametrization", msg));
            }
        }
    }
    spec.validate().map_err(|e| match e {
        Error::InconsistentParametrization(p) => schema(
            file,
            text,
            "parametrization",
            format!("parametrization does not satisfy the equation {}", p),
        ),
        other => schema(file, text, "name", other.to_string()),
    })?;
    // forms in the tables must parse
    for (field, t) in [("l_presentation", &spec.l_presentation), ("alpha_seeds", &spec.alpha_seeds)] {
        if let Some(t) = t {
            for forms in t.forms.values() {
                for f in forms {
                    spec.parse(f).map_err(|e| schema(file, text, field, e.to_string()))?;
                }
            }
        }
    }
    Ok(spec)
}

pub fn load_variety(path: &Path) -> Result<VarietySpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    load_variety_str(&text, &path.display().to_string())
}

pub fn save_variety(spec: &VarietySpec) -> String {
    let vars = &spec.vars;
    let raw = VarietyFile {
        name: spec.id.clone(),
        variables: vars.clone(),
        equations: spec.equations.iter().map(|f| print_poly(f, vars)).collect(),
        dimension: spec.dim,
        normal: spec.normal,
        poles: vars.iter().zip(&spec.poles).filter(|(_, &p)| p).map(|(v, _)| v.clone()).collect(),
        singular: spec.singular.iter().map(|f| print_poly(f, vars)).collect(),
        notes: spec.notes.clone(),
        parametrization: spec.parametrization.as_ref().map(|p| ParamFile {
            parameters: p.params.clone(),
            components: p.components.iter().map(|c| print_poly(c, &p.params)).collect(),
        }),
        deck: spec.deck.as_ref().map(|d| DeckFile { order: d.order, weights: d.weights.clone() }),
        product: spec.product.as_ref().map(|p| ProductFile { factor: p.factor.clone(), disc: p.disc.clone() }),
        l_presentation: table_out(&spec.l_presentation),
        alpha_seeds: table_out(&spec.alpha_seeds),
        golden: spec.golden.clone(),
    };
    toml::to_string(&raw).expect("variety serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::builtin;

    #[test]
    fn roundtrip_builtins() {
        for id in ["curve35", "S(4)", "M(3)", "Fermat(5)", "Fermat(6)", "product(S(2),w)"] {
            let s = builtin(id).unwrap();
            let text = save_variety(&s);
            let back = load_variety_str(&text, "mem").unwrap();
            assert_eq!(back, s, "{}", text);
        }
    }

    #[test]
    fn bad_parametrization_names_the_equation() {
        let text = "name = \"bad\"\nvariables = [\"x\", \"y\"]\nequations = [\"x^3 - y^5\"]\ndimension = 1\n\n[parametrization]\nparameters = [\"t\"]\ncomponents = [\"t^5\", \"t^2\"]\n";
        let e = load_variety_str(text, "bad.variety").unwrap_err();
        let s = e.to_string();
        assert!(s.contains("x^3 - y^5"), "{}", s);
        assert!(s.contains("line 6"), "{}", s);
    }

    #[test]
    fn unknown_field_reports_line() {
        let text = "name = \"x\"\nvariables = [\"x\"]\ndimension = 1\ncolour = 3\n";
        let e = load_variety_str(text, "f.variety").unwrap_err();
        match e {
            Error::Schema { line, .. } => assert_eq!(line, 4),
            other => panic!("{:?}", other),
        }
    }
}
