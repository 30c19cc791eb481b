//! The `.afd` structure-description format: a strict line-based text format
//! for monoids, bases, operation tables, designated elements, Floer data,
//! and gluing tensors, with a canonical serializer and a JSON interchange
//! rendering.
//!
//! The grammar is documented in `docs/format.md` at the repository root.
//! Parsing is total and every rejection carries a position and one of the
//! documented diagnostic codes.

pub mod ast;
mod build;
mod canon;
mod json;
mod parse;

use std::fmt;

pub use ast::StructureDocument;
pub use build::{build, BuildError, Registry};
pub use canon::{serialize, DocumentBuilder};
pub use json::to_json;
pub use parse::parse;

/// The format version this build reads and writes.
pub const FORMAT_VERSION: u32 = 1;

/// Stable machine-readable rejection codes. Every code can be triggered by
/// a malformed document and is covered by a rejection fixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticCode {
    UnsupportedVersion,
    Syntax,
    BadRational,
    UnknownSection,
    UnknownDirective,
    DuplicateName,
    UnresolvedName,
    BasisMismatch,
    LevelNotInMonoid,
    LevelAboveCutoff,
    NonPositiveGenerator,
    NonPositiveEnergy,
    DuplicateEntry,
    ArityMismatch,
    MissingField,
    GradingMismatch,
}

impl DiagnosticCode {
    pub const ALL: [DiagnosticCode; 16] = [
        DiagnosticCode::UnsupportedVersion,
        DiagnosticCode::Syntax,
        DiagnosticCode::BadRational,
        DiagnosticCode::UnknownSection,
        DiagnosticCode::UnknownDirective,
        DiagnosticCode::DuplicateName,
        DiagnosticCode::UnresolvedName,
        DiagnosticCode::BasisMismatch,
        DiagnosticCode::LevelNotInMonoid,
        DiagnosticCode::LevelAboveCutoff,
        DiagnosticCode::NonPositiveGenerator,
        DiagnosticCode::NonPositiveEnergy,
        DiagnosticCode::DuplicateEntry,
        DiagnosticCode::ArityMismatch,
        DiagnosticCode::MissingField,
        DiagnosticCode::GradingMismatch,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DiagnosticCode::UnsupportedVersion => "UNSUPPORTED_VERSION",
            DiagnosticCode::Syntax => "SYNTAX",
            DiagnosticCode::BadRational => "BAD_RATIONAL",
            DiagnosticCode::UnknownSection => "UNKNOWN_SECTION",
            DiagnosticCode::UnknownDirective => "UNKNOWN_DIRECTIVE",
            DiagnosticCode::DuplicateName => "DUPLICATE_NAME",
            DiagnosticCode::UnresolvedName => "UNRESOLVED_NAME",
            DiagnosticCode::BasisMismatch => "BASIS_MISMATCH",
            DiagnosticCode::LevelNotInMonoid => "LEVEL_NOT_IN_MONOID",
            DiagnosticCode::LevelAboveCutoff => "LEVEL_ABOVE_CUTOFF",
            DiagnosticCode::NonPositiveGenerator => "NONPOSITIVE_GENERATOR",
            DiagnosticCode::NonPositiveEnergy => "NONPOSITIVE_ENERGY",
            DiagnosticCode::DuplicateEntry => "DUPLICATE_ENTRY",
            DiagnosticCode::ArityMismatch => "ARITY_MISMATCH",
            DiagnosticCode::MissingField => "MISSING_FIELD",
            DiagnosticCode::GradingMismatch => "GRADING_MISMATCH",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// A parse rejection: 1-based position, stable code, human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub code: DiagnosticCode,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, col {}: {}: {}",
            self.line, self.col, self.code, self.message
        )
    }
}

impl std::error::Error for Diagnostic {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    const F1: &str = "\
afd 1
monoid 1
cutoff 4

begin basis C
  gen p
  gen q
end

begin basis D
  gen w
  gen v
end

begin algebra A
  basis C
  op 2 @ 0 : p q -> p
  op 2 @ 0 : q p -> p
  op 2 @ 0 : q q -> q
end

begin element one
  basis D
  term 0 w
end

begin module M
  algebra A
  basis D
  cyclic one
  op 0 @ 1 : w -> v
  op 1 @ 0 : w p -> v
  op 1 @ 0 : w q -> w
  op 1 @ 0 : v q -> v
end
";

    #[test]
    fn parses_the_worked_fixture() {
        let doc = parse(F1).unwrap();
        assert_eq!(doc.version, 1);
        assert_eq!(doc.monoid, vec![rat_int(1)]);
        assert_eq!(doc.cutoff, rat_int(4));
        assert_eq!(doc.bases.len(), 2);
        assert_eq!(doc.bases[0].gens.len() + doc.bases[1].gens.len(), 4);
        assert_eq!(doc.algebras[0].ops.len() + doc.modules[0].ops.len(), 7);
        assert_eq!(doc.modules[0].cyclic.as_deref(), Some("one"));
    }

    #[test]
    fn serialization_is_idempotent_on_the_fixture() {
        let doc = parse(F1).unwrap();
        let text = serialize(&doc);
        let reparsed = parse(&text).unwrap();
        assert_eq!(serialize(&reparsed), text);
        // A canonical document is a fixed point at the AST level too.
        let mut canonical = doc.clone();
        canonical.canonicalize();
        assert_eq!(reparsed, canonical);
    }

    #[test]
    fn permuted_entries_share_the_canonical_form() {
        let shuffled = F1.replace(
            "  op 2 @ 0 : p q -> p\n  op 2 @ 0 : q p -> p\n",
            "  op 2 @ 0 : q p -> p\n  op 2 @ 0 : p q -> p\n",
        );
        assert_ne!(shuffled, F1);
        let a = parse(F1).unwrap();
        let b = parse(&shuffled).unwrap();
        assert_eq!(serialize(&a), serialize(&b));
    }

    #[test]
    fn empty_document_with_header_is_valid() {
        let doc = parse("afd 1\nmonoid 1/2\ncutoff 2\n").unwrap();
        assert!(doc.bases.is_empty());
        assert_eq!(doc.monoid, vec![rat(1, 2)]);
    }

    #[test]
    fn level_outside_monoid_is_rejected_with_code() {
        let text = "\
afd 1
monoid 1/2
cutoff 2

begin basis C
  gen p
end

begin algebra A
  basis C
  op 1 @ 1/3 : p -> p
end
";
        let err = parse(text).unwrap_err();
        assert_eq!(err.code, DiagnosticCode::LevelNotInMonoid);
        assert_eq!(err.line, 11);
    }

    #[test]
    fn unsupported_version_is_rejected() {
        let err = parse("afd 2\nmonoid 1\ncutoff 1\n").unwrap_err();
        assert_eq!(err.code, DiagnosticCode::UnsupportedVersion);
    }

    #[test]
    fn builds_typed_structures() {
        let doc = parse(F1).unwrap();
        let reg = build(&doc).unwrap();
        assert_eq!(reg.algebras.len(), 1);
        let module = reg.modules.get("M").unwrap();
        assert!(crate::relations::check_module_relations(module, rat_int(4)).is_ok());
        assert_eq!(reg.cyclic.get("M").map(String::as_str), Some("one"));
    }

    #[test]
    fn document_builder_round_trips_f1() {
        let doc = parse(F1).unwrap();
        let reg = build(&doc).unwrap();
        let mut builder = DocumentBuilder::new(&reg.ctx);
        builder
            .algebra("A", reg.algebras.get("A").unwrap())
            .element("one", reg.elements.get("one").unwrap())
            .module("M", reg.modules.get("M").unwrap(), "A", Some("one"));
        let rebuilt = builder.finish();
        assert_eq!(serialize(&rebuilt), serialize(&doc));
    }

    #[test]
    fn json_rendering_is_stable() {
        let doc = parse(F1).unwrap();
        let v = to_json(&doc);
        assert_eq!(v["cutoff"], "4");
        assert_eq!(v["modules"][0]["cyclic"], "one");
        assert_eq!(v["algebras"][0]["ops"][0]["inputs"][0], "p");
    }
}
