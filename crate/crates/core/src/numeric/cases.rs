//! Registered numeric cases used by the CLI and the acceptance checks.

use super::{CutoffSpec, CycleSpec, FamilySpec, PatchSpec, Smoothness};

#[derive(Clone, Debug)]
pub struct NumericCase {
    pub name: &'static str,
    pub cycle: CycleSpec,
    pub rho: CutoffSpec,
    /// Forms in ambient coordinates of the cycle's variety.
    pub u: String,
    pub v: String,
}

fn patch(components: &[&str], radius: f64) -> PatchSpec {
    PatchSpec { components: components.iter().map(|s| s.to_string()).collect(), center: vec![], radius, multiplicity: 1 }
}

fn cycle(variety: &str, var: &str, p: PatchSpec) -> CycleSpec {
    CycleSpec { variety: variety.into(), dim: 1, vars: vec![var.into()], family: None, patches: vec![p] }
}

/// Integrals of ρ·u∧ū.
pub fn integrate_cases() -> Vec<NumericCase> {
    vec![
        NumericCase {
            name: "smooth-disc",
            cycle: cycle("affine(s)", "s", patch(&["s"], 1.5)),
            rho: CutoffSpec::bump(1.0, Smoothness::C1),
            u: "ds".into(),
            v: "ds".into(),
        },
        // 5dt on the normalization: x dx / y^3 = 5 dt
        NumericCase {
            name: "curve35",
            cycle: cycle("curve35", "t", patch(&["t^5", "t^3"], 1.5)),
            rho: CutoffSpec::bump(1.0, Smoothness::C0),
            u: "x*dx/y^3".into(),
            v: "x*dx/y^3".into(),
        },
        NumericCase {
            name: "S2-diagonal",
            cycle: cycle("S(2)", "a", patch(&["a^2", "a^2", "a^2"], 1.5)),
            rho: CutoffSpec::bump(1.0, Smoothness::C0),
            u: "x*dy/z".into(),
            v: "x*dy/z".into(),
        },
    ]
}

/// Stokes cases: u of degree p − 1, v of degree p, C1 bump.
pub fn stokes_cases() -> Vec<NumericCase> {
    vec![
        NumericCase {
            name: "smooth-disc",
            cycle: cycle("affine(s)", "s", patch(&["s"], 1.5)),
            rho: CutoffSpec::bump(1.0, Smoothness::C1),
            u: "s^2 + 1".into(),
            v: "(s + 2)*ds".into(),
        },
        NumericCase {
            name: "curve35",
            cycle: cycle("curve35", "t", patch(&["t^5", "t^3"], 1.5)),
            rho: CutoffSpec::bump(1.0, Smoothness::C1),
            u: "y^2/x".into(),
            v: "x*dx/y^3".into(),
        },
        NumericCase {
            name: "S2-diagonal",
            cycle: cycle("S(2)", "a", patch(&["a^2", "a^2", "a^2"], 1.5)),
            rho: CutoffSpec::bump(1.0, Smoothness::C1),
            u: "1 + x".into(),
            v: "x*dy/z".into(),
        },
    ]
}

/// Y_t = image of a ↦ q_4(a, t·a), u = v = x·dy/z².
pub fn s4_family() -> NumericCase {
    NumericCase {
        name: "S4-family",
        cycle: CycleSpec {
            variety: "S(4)".into(),
            dim: 1,
            vars: vec!["a".into()],
            family: Some(FamilySpec { name: "t".into(), from: 0.01, to: 1.0, points: 12 }),
            patches: vec![patch(&["a^4", "t^4*a^4", "t*a^2"], 1.2)],
        },
        rho: CutoffSpec::bump(1.0, Smoothness::C0),
        u: "x*dy/z^2".into(),
        v: "x*dy/z^2".into(),
    }
}

pub fn find(list: &[NumericCase], name: &str) -> Option<NumericCase> {
    list.iter().find(|c| c.name == name).cloned()
}

/// A numeric job read from a TOML file: the cycle fields at top level plus
/// `u`, `v` and a `[cutoff]` table.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NumericJob {
    pub u: String,
    pub v: String,
    pub cutoff: CutoffSpec,
    #[serde(flatten)]
    pub cycle: CycleSpec,
}

impl NumericJob {
    pub fn from_toml(text: &str, file: &str) -> crate::Result<NumericJob> {
        toml::from_str(text).map_err(|e| crate::Error::Schema {
            file: file.into(),
            line: e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1).unwrap_or(0),
            field: String::new(),
            msg: e.message().to_string(),
        })
    }

    pub fn from_case(c: &NumericCase) -> NumericJob {
        NumericJob { u: c.u.clone(), v: c.v.clone(), cutoff: c.rho.clone(), cycle: c.cycle.clone() }
    }
}
