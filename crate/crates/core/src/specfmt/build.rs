//! Realizes a parsed document as typed structures, keyed by section name.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::lincomb::{Basis, Element, LincombError};
use crate::novikov::{Context, Ctx, DiscreteMonoid, NovikovError, Scalar};
use crate::pairing::{FloerComplexData, GluingEntry, GluingInstance, PairingError};
use crate::structures::{
    AinftyError, AlgebraEntry, BimoduleEntry, FilteredAlgebra, FilteredBimodule,
    FilteredRightModule, ModuleEntry,
};

use super::ast::*;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error(transparent)]
    Lincomb(#[from] LincombError),
    #[error(transparent)]
    Ainfty(#[from] AinftyError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error("document references undefined name `{0}`")]
    Unresolved(String),
}

/// All structures of one document, addressable by name.
pub struct Registry {
    pub ctx: Ctx,
    pub bases: BTreeMap<String, Arc<Basis>>,
    pub algebras: BTreeMap<String, Arc<FilteredAlgebra>>,
    pub elements: BTreeMap<String, Element>,
    pub modules: BTreeMap<String, Arc<FilteredRightModule>>,
    /// module name -> cyclic element name
    pub cyclic: BTreeMap<String, String>,
    pub bimodules: BTreeMap<String, Arc<FilteredBimodule>>,
    pub floers: BTreeMap<String, Arc<FloerComplexData>>,
    pub gluings: BTreeMap<String, GluingInstance>,
}

fn get<'a, T>(map: &'a BTreeMap<String, T>, name: &str) -> Result<&'a T, BuildError> {
    map.get(name)
        .ok_or_else(|| BuildError::Unresolved(name.to_string()))
}

/// Builds every structure in the document. The parser has already validated
/// names, arities, monoid membership, and duplicates, so failures here
/// indicate programmatically constructed inconsistent documents.
pub fn build(doc: &StructureDocument) -> Result<Registry, BuildError> {
    let monoid = DiscreteMonoid::new(doc.monoid.iter().copied())?;
    let ctx = Context::new(monoid, doc.cutoff)?;

    let mut bases = BTreeMap::new();
    for b in &doc.bases {
        let basis = match b.grading {
            Some(m) => Basis::graded(
                &b.name,
                b.gens
                    .iter()
                    .map(|(g, d)| (g.clone(), d.unwrap_or_default())),
                m,
            )?,
            None => Basis::new(&b.name, b.gens.iter().map(|(g, _)| g.clone()))?,
        };
        bases.insert(b.name.clone(), basis);
    }

    let mut algebras = BTreeMap::new();
    for a in &doc.algebras {
        let basis = get(&bases, &a.basis)?;
        let mut entries = Vec::new();
        for op in &a.ops {
            entries.push(AlgebraEntry {
                level: op.level,
                inputs: op
                    .inputs
                    .iter()
                    .map(|g| basis.index_of(g))
                    .collect::<Result<_, _>>()?,
                output: op
                    .output
                    .iter()
                    .map(|g| basis.index_of(g))
                    .collect::<Result<_, _>>()?,
            });
        }
        algebras.insert(a.name.clone(), FilteredAlgebra::new(&ctx, basis, entries)?);
    }

    let mut elements = BTreeMap::new();
    for e in &doc.elements {
        let basis = get(&bases, &e.basis)?;
        let mut el = Element::zero(&ctx, basis);
        for (level, g) in &e.terms {
            let i = basis.index_of(g)?;
            let term = Element::from_terms(&ctx, basis, [(i, Scalar::gapped(&ctx, [*level])?)])?;
            el = el.add(&term)?;
        }
        elements.insert(e.name.clone(), el);
    }

    let mut modules = BTreeMap::new();
    let mut cyclic = BTreeMap::new();
    for m in &doc.modules {
        let algebra = get(&algebras, &m.algebra)?;
        let basis = get(&bases, &m.basis)?;
        let ab = algebra.basis();
        let mut entries = Vec::new();
        for op in &m.ops {
            entries.push(ModuleEntry {
                level: op.level,
                y: basis.index_of(&op.y)?,
                inputs: op
                    .inputs
                    .iter()
                    .map(|g| ab.index_of(g))
                    .collect::<Result<_, _>>()?,
                output: op
                    .output
                    .iter()
                    .map(|g| basis.index_of(g))
                    .collect::<Result<_, _>>()?,
            });
        }
        modules.insert(
            m.name.clone(),
            FilteredRightModule::new(algebra, basis, entries)?,
        );
        if let Some(c) = &m.cyclic {
            get(&elements, c)?;
            cyclic.insert(m.name.clone(), c.clone());
        }
    }

    let mut bimodules = BTreeMap::new();
    for b in &doc.bimodules {
        let left = get(&algebras, &b.left)?;
        let right = get(&algebras, &b.right)?;
        let basis = get(&bases, &b.basis)?;
        let lb = left.basis();
        let rb = right.basis();
        let mut entries = Vec::new();
        for op in &b.ops {
            entries.push(BimoduleEntry {
                level: op.level,
                left: op
                    .left
                    .iter()
                    .map(|g| lb.index_of(g))
                    .collect::<Result<_, _>>()?,
                y: basis.index_of(&op.y)?,
                right: op
                    .right
                    .iter()
                    .map(|g| rb.index_of(g))
                    .collect::<Result<_, _>>()?,
                output: op
                    .output
                    .iter()
                    .map(|g| basis.index_of(g))
                    .collect::<Result<_, _>>()?,
            });
        }
        bimodules.insert(
            b.name.clone(),
            FilteredBimodule::new(left, right, basis, entries)?,
        );
    }

    let mut floers = BTreeMap::new();
    for f in &doc.floers {
        let basis = get(&bases, &f.basis)?;
        let mut weights = Vec::new();
        for (from, to, energy) in &f.weights {
            weights.push((basis.index_of(from)?, basis.index_of(to)?, *energy));
        }
        floers.insert(f.name.clone(), FloerComplexData::new(&ctx, basis, weights)?);
    }

    let mut gluings = BTreeMap::new();
    for g in &doc.gluings {
        let module1 = get(&modules, &g.module1)?;
        let module2 = get(&modules, &g.module2)?;
        let bimodule = get(&bimodules, &g.bimodule)?;
        let floer = get(&floers, &g.floer)?;
        let m1b = module1.basis();
        let a1b = module1.algebra().basis();
        let pb = bimodule.basis();
        let m2b = module2.basis();
        let a2b = module2.algebra().basis();
        let fb = floer.basis();
        let mut entries = Vec::new();
        for op in &g.ops {
            entries.push(GluingEntry {
                level: op.level,
                y1: m1b.index_of(&op.y1)?,
                xs1: op
                    .xs1
                    .iter()
                    .map(|g| a1b.index_of(g))
                    .collect::<Result<_, _>>()?,
                a: pb.index_of(&op.a)?,
                y2: m2b.index_of(&op.y2)?,
                xs2: op
                    .xs2
                    .iter()
                    .map(|g| a2b.index_of(g))
                    .collect::<Result<_, _>>()?,
                output: op
                    .output
                    .iter()
                    .map(|g| fb.index_of(g))
                    .collect::<Result<_, _>>()?,
            });
        }
        gluings.insert(
            g.name.clone(),
            GluingInstance::new(module1, module2, bimodule, floer, entries)?,
        );
    }

    Ok(Registry {
        ctx,
        bases,
        algebras,
        elements,
        modules,
        cyclic,
        bimodules,
        floers,
        gluings,
    })
}
