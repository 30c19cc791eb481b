//! ainfty: an exact computational engine for gapped filtered A-infinity
//! algebras, right modules, and bimodules over the Z/2 Novikov ring.
//!
//! The crate is organized around:
//!
//! * [`novikov`] — truncated Novikov-ring arithmetic and discrete energy
//!   monoids;
//! * [`lincomb`] — free modules on named bases, elements, and sparse linear
//!   maps;
//! * [`homology`] — valuation normal forms and homology (free rank plus
//!   torsion exponents) over the valuation ring;
//! * [`structures`] — gapped operation tables for algebras, right modules,
//!   bimodules and homomorphisms, with multilinear evaluation;
//! * [`relations`] — the relation checkers (curved algebra, right module,
//!   bimodule, homomorphism), with deterministic counterexamples;
//! * [`twist`] — twisting by bounding cochains, twisted differentials, the
//!   unit-defect identity, and opposite algebras;
//! * [`mc`] — cyclic-element certificates, the order-by-order bounding
//!   cochain solver, its brute-force oracle, and Maurer-Cartan verification;
//! * [`pairing`] — Floer complexes over the Novikov ring, gluing tensors,
//!   the pairing relation checker, and the induced chain map;
//! * [`specfmt`] — the canonical `.afd` structure-description format.
//!
//! All values are immutable after construction and all operations are pure
//! functions; everything is `Send + Sync` and may be shared freely between
//! threads.

pub mod rat;
pub mod novikov;
pub mod z2;
pub mod lincomb;
pub mod homology;
pub mod structures;
pub mod relations;
pub mod twist;
pub mod mc;
pub mod pairing;
pub mod specfmt;

pub use homology::{homology, homology_by_degree, valuation_normal_form, HomologyReport};
pub use lincomb::{Basis, Element, LinearMap, LincombError};
pub use mc::{
    certify_cyclic, oracle_bounding_cochains, solve_bounding_cochain, verify_mc, BoundingCochain,
    CyclicElementCertificate, McError, SolveTrace,
};
pub use novikov::{Context, Ctx, DiscreteMonoid, NovikovError, Scalar, Valuation};
pub use pairing::{
    check_pairing_relation, induced_gluing_map, realize_floer_boundary, verify_leading_identity,
    FloerComplexData, GluingInstance, PairingError,
};
pub use rat::Rational;
pub use relations::{
    check_algebra_relations, check_bimodule_relations, check_homomorphism,
    check_module_relations, Counterexample, StructureKind,
};
pub use structures::{
    AInftyHomomorphism, AinftyError, AritySig, FilteredAlgebra, FilteredBimodule,
    FilteredRightModule, GappedOperationTable,
};
pub use twist::{
    bimodule_twisted_differential, opposite_algebra, realize_phi_b, twist_algebra,
    twist_bimodule, twist_module, twisted_differential, unit_defect,
};
