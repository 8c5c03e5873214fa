//! Integral dependence on Sym(Ω^q/torsion): certificates, the monomial decision,
//! arc refutation and the graded seed sweep that produces α generators.

mod arc;
mod certificate;
mod monomial;
mod search;
mod sweep;
pub mod sym;
pub mod template;

pub use arc::{module_on_arc, refute_by_arc, stock_arcs, ArcSpec, ArcRefutation};
pub use certificate::{load_certificate_str, load_certificate_template, save_certificate, verify_certificate, CertCheck, CertTerm, DependenceCertificate};
pub use monomial::{decide_monomial, lattice_oracle, MonomialDecision};
pub use search::search_certificate;
pub use sweep::{seed_sweep, SeedKind, SeedOrigin, SeedSet};

use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictTag {
    InOmegaTorsionFree,
    InAlphaCertified,
    InAlphaDecidedMonomial,
    NotInAlphaRefuted,
    Unknown,
}

impl VerdictTag {
    pub fn name(&self) -> &'static str {
        match self {
            VerdictTag::InOmegaTorsionFree => "in-omega-torsion-free",
            VerdictTag::InAlphaCertified => "in-alpha-certified",
            VerdictTag::InAlphaDecidedMonomial => "in-alpha-decided-monomial",
            VerdictTag::NotInAlphaRefuted => "not-in-alpha-refuted",
            VerdictTag::Unknown => "unknown",
        }
    }

    /// Some(true) for the in-α tags, Some(false) for refutation.
    pub fn in_alpha(&self) -> Option<bool> {
        match self {
            VerdictTag::Unknown => None,
            VerdictTag::NotInAlphaRefuted => Some(false),
            _ => Some(true),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Evidence {
    /// Coefficients against the named module's generators.
    Witness { module: String, coeffs: Vec<String> },
    Certificate(DependenceCertificate),
    Arc(ArcSpec),
    /// Newton polyhedron decision (convex weights of the generators).
    Polyhedron { lambda: Vec<String> },
    /// A verdict obtained on the source of a map and transported back.
    Pullback { map: String, form: String, inner: Box<MembershipVerdict> },
    /// Reduction to the factor of a product.
    ProductRule { parts: Vec<(String, MembershipVerdict)> },
    None,
}

#[derive(Clone, Debug)]
pub struct MembershipVerdict {
    pub tag: VerdictTag,
    pub evidence: Evidence,
    pub notes: Vec<String>,
}

impl MembershipVerdict {
    pub fn new(tag: VerdictTag, evidence: Evidence) -> Self {
        MembershipVerdict { tag, evidence, notes: Vec::new() }
    }

    pub fn unknown(reason: impl Into<String>) -> Self {
        MembershipVerdict { tag: VerdictTag::Unknown, evidence: Evidence::None, notes: vec![reason.into()] }
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    /// The arc behind a refutation, looking through pullbacks and product reductions.
    pub fn refuting_arc(&self) -> Option<&ArcSpec> {
        match &self.evidence {
            Evidence::Arc(a) => Some(a),
            Evidence::Pullback { inner, .. } => inner.refuting_arc(),
            Evidence::ProductRule { parts } => parts.iter().find_map(|(_, v)| v.refuting_arc()),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let evidence = match &self.evidence {
            Evidence::Witness { module, coeffs } => json!({"kind": "witness", "module": module, "coefficients": coeffs}),
            Evidence::Certificate(c) => json!({"kind": "certificate", "certificate": c.to_json()}),
            Evidence::Arc(a) => json!({"kind": "arc", "arc": a.to_json()}),
            Evidence::Polyhedron { lambda } => json!({"kind": "polyhedron", "lambda": lambda}),
            Evidence::Pullback { map, form, inner } => {
                json!({"kind": "pullback", "map": map, "form": form, "inner": inner.to_json()})
            }
            Evidence::ProductRule { parts } => json!({
                "kind": "product-rule",
                "parts": parts.iter().map(|(f, v)| json!({"form": f, "verdict": v.to_json()})).collect::<Vec<_>>()
            }),
            Evidence::None => json!({"kind": "none"}),
        };
        json!({"tag": self.tag.name(), "evidence": evidence, "notes": self.notes})
    }
}
