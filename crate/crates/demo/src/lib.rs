//! Browser demo: classification ladder, beta modules and pullbacks along built-in maps.
//! Each entry point returns a JSON string; errors come back as `{"error": ...}`.

use serde_json::{json, Value};
use singforms::beta::{classify as run_classify, Engine};
use singforms::variety::Registry;
use wasm_bindgen::prelude::*;

fn respond(r: singforms::Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({"error": e.to_string()}).to_string(),
    }
}

fn engine() -> Engine {
    Engine::new(Registry::new())
}

/// Place `form` on the ladder Ω ⊂ α ⊂ α[p] ⊂ β ⊂ L of a built-in variety.
#[wasm_bindgen]
pub fn classify(variety: &str, form: &str) -> String {
    respond((|| {
        let e = engine();
        let u = e.reg.variety(variety)?.parse(form)?;
        let r = run_classify(&e, variety, &u, None, None)?;
        Ok(json!({"table": r.table(), "report": r.to_json()}))
    })())
}

/// Generators and stabilization level of β^q.
#[wasm_bindgen]
pub fn beta(variety: &str, degree: usize) -> String {
    respond((|| {
        let e = engine();
        let b = e.beta(variety, degree, None)?;
        let m = e.model(variety)?;
        let gens: Vec<String> = b.beta.gens.iter().map(|g| m.print(g)).collect();
        Ok(json!({"variety": b.variety, "degree": degree, "p_star": b.p_star, "generators": gens}))
    })())
}

/// Pull a form back along a built-in map such as `q(4)` or `slice(3)`.
#[wasm_bindgen]
pub fn pullback(map: &str, form: &str) -> String {
    respond((|| {
        let reg = Registry::new();
        let m = reg.map(map)?;
        let tgt = reg.variety(&m.target)?;
        let src = reg.variety(&m.source)?;
        let u = tgt.parse(form)?;
        let pb = reg.pullback(&m, &u)?;
        Ok(json!({"source": src.id, "target": tgt.id, "form": tgt.print(&u), "pullback": src.print(&pb)}))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_points_return_json() {
        let v: Value = serde_json::from_str(&classify("S(4)", "x*dy/z^2")).unwrap();
        assert_eq!(v["report"]["level"], 0);
        let v: Value = serde_json::from_str(&beta("S(4)", 2)).unwrap();
        assert_eq!(v["p_star"], 1);
        let v: Value = serde_json::from_str(&pullback("q(4)", "x*dy/z^2")).unwrap();
        assert_eq!(v["pullback"], "4*a^2*b*db");
        let v: Value = serde_json::from_str(&classify("S(4)", "dq")).unwrap();
        assert!(v["error"].as_str().unwrap().contains("dq"));
    }
}
