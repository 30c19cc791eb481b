//! Gapped operation tables and the filtered A-infinity structures built on
//! them: curved algebras, right modules, algebra-algebra bimodules, and
//! module homomorphisms.
//!
//! A table stores the structure constants of one gapped family of
//! operations: the entry at `(arity, energy level, input generator tuple)`
//! is the Z/2 set of output generators. The energy is carried entirely by
//! the level, so the table *is* the gapped decomposition of the operation
//! family. Level-0 arity-0 curvature is representable in storage but is
//! rejected by the twisting and Maurer-Cartan machinery; the level-0
//! arity-0 part of a module table is the classical boundary operator and is
//! allowed.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::lincomb::{Basis, Element, LincombError, LinearMap};
use crate::novikov::{Ctx, NovikovError, Scalar};
use crate::rat::{format_rational, Rational};
use crate::z2::Z2Vec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AinftyError {
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error(transparent)]
    Lincomb(#[from] LincombError),
    #[error("energy level {} is not in the discrete monoid", format_rational(.0))]
    LevelNotInMonoid(Rational),
    #[error("energy level {} is at or above the cutoff {}", format_rational(.level), format_rational(.cutoff))]
    LevelAboveCutoff { level: Rational, cutoff: Rational },
    #[error("duplicate table entry at level {} , tuple {tuple:?}", format_rational(.level))]
    DuplicateEntry { level: Rational, tuple: Vec<String> },
    #[error("generator index out of range")]
    IndexOutOfRange,
    #[error("expected {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("element must have strictly positive valuation")]
    NotPositiveValuation,
    #[error("element exponent {} is not in the discrete monoid", format_rational(.0))]
    ElementNotGapped(Rational),
    #[error("algebra has arity-0 curvature at energy level 0")]
    LevelZeroCurvature,
    #[error("source and target are modules over different algebras")]
    AlgebraMismatch,
    #[error("structures live over different contexts")]
    ContextMismatch,
    #[error("Maurer-Cartan equation fails at level {}: residual {residual}", format_rational(.level))]
    MaurerCartan { level: Rational, residual: String },
    #[error("relations fail: {0}")]
    RelationsFailed(String),
    #[error("`{0}` is not a strict unit for the product at level 0")]
    NotAUnit(String),
    #[error("chain-map identity fails at level {}", format_rational(.0))]
    ChainMapResidual(Rational),
}

/// Arity signature of a single operation family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AritySig {
    /// `m_k(x_1, ..., x_k)`
    Algebra { k: usize },
    /// `n_k(y; x_1, ..., x_k)`; also the shape of homomorphism components
    Module { k: usize },
    /// `n_{k1,k2}(x_1..x_{k1}; y; z_1..z_{k2})`
    Bimodule { left: usize, right: usize },
}

impl AritySig {
    /// Number of stored input slots (including the `y` slot where present).
    pub fn slots(&self) -> usize {
        match self {
            AritySig::Algebra { k } => *k,
            AritySig::Module { k } => k + 1,
            AritySig::Bimodule { left, right } => left + right + 1,
        }
    }

    /// Deterministic enumeration key: total arity, then left arity.
    pub fn order_key(&self) -> (usize, usize) {
        match self {
            AritySig::Algebra { k } => (*k, 0),
            AritySig::Module { k } => (*k, 0),
            AritySig::Bimodule { left, right } => (left + right, *left),
        }
    }
}

/// Key of one structure constant: sorted by (level, arity, input tuple),
/// the canonical entry order of the external format.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpKey {
    pub level: Rational,
    pub sig: AritySig,
    pub inputs: Vec<usize>,
}

/// Sparse structure constants of a gapped operation family.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GappedOperationTable {
    entries: BTreeMap<OpKey, Z2Vec>,
}

impl GappedOperationTable {
    pub fn new() -> GappedOperationTable {
        GappedOperationTable::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&OpKey, &Z2Vec)> {
        self.entries.iter()
    }

    pub fn constant(&self, sig: AritySig, level: Rational, inputs: &[usize]) -> Option<&Z2Vec> {
        self.entries.get(&OpKey {
            level,
            sig,
            inputs: inputs.to_vec(),
        })
    }

    /// XOR-accumulates a constant; used by twisting and table construction.
    pub(crate) fn xor_entry(&mut self, key: OpKey, out: &Z2Vec) {
        if out.is_zero() {
            return;
        }
        match self.entries.get_mut(&key) {
            Some(slot) => {
                slot.add_assign(out);
                if slot.is_zero() {
                    self.entries.remove(&key);
                }
            }
            None => {
                self.entries.insert(key, out.clone());
            }
        }
    }

    /// Inserts a constant, rejecting duplicates.
    fn insert_entry(
        &mut self,
        key: OpKey,
        out: Z2Vec,
        names: impl Fn(&[usize]) -> Vec<String>,
    ) -> Result<(), AinftyError> {
        if out.is_zero() {
            return Ok(());
        }
        if self.entries.contains_key(&key) {
            return Err(AinftyError::DuplicateEntry {
                level: key.level,
                tuple: names(&key.inputs),
            });
        }
        self.entries.insert(key, out);
        Ok(())
    }

    /// Largest arity with a stored constant, per `order_key` total.
    pub fn max_arity(&self) -> usize {
        self.entries
            .keys()
            .map(|k| k.sig.order_key().0)
            .max()
            .unwrap_or(0)
    }

    /// Largest per-side arity for bimodule tables.
    pub fn max_bimodule_arities(&self) -> (usize, usize) {
        let mut l = 0;
        let mut r = 0;
        for k in self.entries.keys() {
            if let AritySig::Bimodule { left, right } = k.sig {
                l = l.max(left);
                r = r.max(right);
            }
        }
        (l, r)
    }

    /// Multilinear evaluation of the residue constants at one level: each
    /// slot is a Z/2 set of generators, expanded by the cartesian product.
    pub fn eval_sets(&self, sig: AritySig, level: Rational, slots: &[&Z2Vec]) -> Z2Vec {
        debug_assert_eq!(sig.slots(), slots.len());
        let mut out = Z2Vec::new();
        if slots.iter().any(|s| s.is_zero()) {
            return out;
        }
        let supports: Vec<Vec<usize>> = slots.iter().map(|s| s.iter().collect()).collect();
        let mut idx = vec![0usize; supports.len()];
        loop {
            let tuple: Vec<usize> = idx.iter().zip(&supports).map(|(i, s)| s[*i]).collect();
            if let Some(v) = self.constant(sig, level, &tuple) {
                out.add_assign(v);
            }
            // odometer
            let mut p = supports.len();
            loop {
                if p == 0 {
                    return out;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < supports[p].len() {
                    break;
                }
                idx[p] = 0;
            }
        }
    }
}

fn validate_level(ctx: &Ctx, level: Rational) -> Result<(), AinftyError> {
    if !ctx.monoid().contains(&level) {
        return Err(AinftyError::LevelNotInMonoid(level));
    }
    if level >= ctx.cutoff() {
        return Err(AinftyError::LevelAboveCutoff {
            level,
            cutoff: ctx.cutoff(),
        });
    }
    Ok(())
}

fn validate_indices(basis: &Basis, idx: &[usize]) -> Result<(), AinftyError> {
    if idx.iter().any(|i| *i >= basis.len()) {
        return Err(AinftyError::IndexOutOfRange);
    }
    Ok(())
}

/// Validates that an element is a gapped member of the maximal-ideal span:
/// strictly positive valuation, every exponent in the monoid.
pub fn validate_deformation(b: &Element) -> Result<(), AinftyError> {
    if !b.is_positive_valuation() {
        return Err(AinftyError::NotPositiveValuation);
    }
    let ctx = b.ctx();
    for (_, s) in b.terms() {
        for e in s.exponents() {
            if !ctx.monoid().contains(e) {
                return Err(AinftyError::ElementNotGapped(*e));
            }
        }
    }
    Ok(())
}

/// One structure constant of an algebra table, by generator index.
#[derive(Debug, Clone)]
pub struct AlgebraEntry {
    pub level: Rational,
    pub inputs: Vec<usize>,
    pub output: Vec<usize>,
}

/// A gapped filtered (possibly curved) A-infinity algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredAlgebra {
    ctx: Ctx,
    basis: Arc<Basis>,
    table: GappedOperationTable,
}

impl FilteredAlgebra {
    pub fn new(
        ctx: &Ctx,
        basis: &Arc<Basis>,
        entries: impl IntoIterator<Item = AlgebraEntry>,
    ) -> Result<Arc<FilteredAlgebra>, AinftyError> {
        let mut table = GappedOperationTable::new();
        for e in entries {
            validate_level(ctx, e.level)?;
            validate_indices(basis, &e.inputs)?;
            validate_indices(basis, &e.output)?;
            let key = OpKey {
                level: e.level,
                sig: AritySig::Algebra { k: e.inputs.len() },
                inputs: e.inputs,
            };
            table.insert_entry(key, Z2Vec::from_iter(e.output), |idx| {
                idx.iter().map(|i| basis.gen_name(*i).to_string()).collect()
            })?;
        }
        Ok(Arc::new(FilteredAlgebra {
            ctx: Arc::clone(ctx),
            basis: Arc::clone(basis),
            table,
        }))
    }

    /// Convenience constructor with generator names.
    pub fn from_named(
        ctx: &Ctx,
        basis: &Arc<Basis>,
        entries: &[(Rational, &[&str], &[&str])],
    ) -> Result<Arc<FilteredAlgebra>, AinftyError> {
        let mut es = Vec::new();
        for (level, inputs, output) in entries {
            es.push(AlgebraEntry {
                level: *level,
                inputs: inputs
                    .iter()
                    .map(|n| basis.index_of(n))
                    .collect::<Result<_, _>>()
                    .map_err(AinftyError::Lincomb)?,
                output: output
                    .iter()
                    .map(|n| basis.index_of(n))
                    .collect::<Result<_, _>>()
                    .map_err(AinftyError::Lincomb)?,
            });
        }
        FilteredAlgebra::new(ctx, basis, es)
    }

    pub(crate) fn from_table(
        ctx: &Ctx,
        basis: &Arc<Basis>,
        table: GappedOperationTable,
    ) -> Arc<FilteredAlgebra> {
        Arc::new(FilteredAlgebra {
            ctx: Arc::clone(ctx),
            basis: Arc::clone(basis),
            table,
        })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn table(&self) -> &GappedOperationTable {
        &self.table
    }

    pub fn has_level_zero_curvature(&self) -> bool {
        self.table
            .constant(AritySig::Algebra { k: 0 }, Rational::from_integer(0), &[])
            .is_some()
    }

    /// The curvature `m_0` realized as an element of the algebra.
    pub fn curvature(&self) -> Element {
        let mut out = Element::zero(&self.ctx, &self.basis);
        for (key, v) in self.table.entries() {
            if key.sig == (AritySig::Algebra { k: 0 }) {
                for g in v.iter() {
                    let s = Scalar::monomial(&self.ctx, key.level).expect("level below cutoff");
                    out.add_term(g, s).expect("shared context");
                }
            }
        }
        out
    }

    /// Multilinear evaluation of `m_k` on elements, `k = inputs.len()`.
    pub fn eval(&self, inputs: &[Element]) -> Result<Element, AinftyError> {
        for x in inputs {
            if x.basis() != &self.basis {
                return Err(AinftyError::Lincomb(LincombError::BasisMismatch {
                    expected: self.basis.name().to_string(),
                    got: x.basis().name().to_string(),
                }));
            }
        }
        let sig = AritySig::Algebra { k: inputs.len() };
        eval_table(&self.ctx, &self.table, sig, inputs, &self.basis)
    }
}

/// Shared multilinear evaluation over full Novikov elements: sums every
/// constant of the right arity against the product of input coefficients.
fn eval_table(
    ctx: &Ctx,
    table: &GappedOperationTable,
    sig: AritySig,
    inputs: &[Element],
    out_basis: &Arc<Basis>,
) -> Result<Element, AinftyError> {
    let mut out = Element::zero(ctx, out_basis);
    for (key, v) in table.entries() {
        if key.sig != sig {
            continue;
        }
        let mut coeff = Scalar::monomial(ctx, key.level).expect("level below cutoff");
        for (slot, g) in key.inputs.iter().enumerate() {
            match inputs[slot].coeff(*g) {
                Some(s) => coeff = coeff.mul(s)?,
                None => {
                    coeff = Scalar::zero(ctx);
                    break;
                }
            }
            if coeff.is_zero() {
                break;
            }
        }
        if coeff.is_zero() {
            continue;
        }
        for g in v.iter() {
            out.add_term(g, coeff.clone())?;
        }
    }
    Ok(out)
}

/// One structure constant of a right-module table.
#[derive(Debug, Clone)]
pub struct ModuleEntry {
    pub level: Rational,
    pub y: usize,
    pub inputs: Vec<usize>,
    pub output: Vec<usize>,
}

/// A gapped filtered A-infinity right module over a filtered algebra.
///
/// The optional cyclic element is carried as data; certification happens in
/// the Maurer-Cartan layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredRightModule {
    algebra: Arc<FilteredAlgebra>,
    basis: Arc<Basis>,
    table: GappedOperationTable,
}

impl FilteredRightModule {
    pub fn new(
        algebra: &Arc<FilteredAlgebra>,
        basis: &Arc<Basis>,
        entries: impl IntoIterator<Item = ModuleEntry>,
    ) -> Result<Arc<FilteredRightModule>, AinftyError> {
        let ctx = algebra.ctx();
        let mut table = GappedOperationTable::new();
        let alg_basis = algebra.basis().clone();
        for e in entries {
            validate_level(ctx, e.level)?;
            validate_indices(basis, &[e.y])?;
            validate_indices(&alg_basis, &e.inputs)?;
            validate_indices(basis, &e.output)?;
            let mut inputs = vec![e.y];
            inputs.extend_from_slice(&e.inputs);
            let key = OpKey {
                level: e.level,
                sig: AritySig::Module {
                    k: inputs.len() - 1,
                },
                inputs,
            };
            let b = basis.clone();
            let ab = alg_basis.clone();
            table.insert_entry(key, Z2Vec::from_iter(e.output), move |idx| {
                let mut v = vec![b.gen_name(idx[0]).to_string()];
                v.extend(idx[1..].iter().map(|i| ab.gen_name(*i).to_string()));
                v
            })?;
        }
        Ok(Arc::new(FilteredRightModule {
            algebra: Arc::clone(algebra),
            basis: Arc::clone(basis),
            table,
        }))
    }

    pub fn from_named(
        algebra: &Arc<FilteredAlgebra>,
        basis: &Arc<Basis>,
        entries: &[(Rational, &str, &[&str], &[&str])],
    ) -> Result<Arc<FilteredRightModule>, AinftyError> {
        let mut es = Vec::new();
        for (level, y, inputs, output) in entries {
            es.push(ModuleEntry {
                level: *level,
                y: basis.index_of(y).map_err(AinftyError::Lincomb)?,
                inputs: inputs
                    .iter()
                    .map(|n| algebra.basis().index_of(n))
                    .collect::<Result<_, _>>()
                    .map_err(AinftyError::Lincomb)?,
                output: output
                    .iter()
                    .map(|n| basis.index_of(n))
                    .collect::<Result<_, _>>()
                    .map_err(AinftyError::Lincomb)?,
            });
        }
        FilteredRightModule::new(algebra, basis, es)
    }

    pub(crate) fn from_table(
        algebra: &Arc<FilteredAlgebra>,
        basis: &Arc<Basis>,
        table: GappedOperationTable,
    ) -> Arc<FilteredRightModule> {
        Arc::new(FilteredRightModule {
            algebra: Arc::clone(algebra),
            basis: Arc::clone(basis),
            table,
        })
    }

    pub fn ctx(&self) -> &Ctx {
        self.algebra.ctx()
    }

    pub fn algebra(&self) -> &Arc<FilteredAlgebra> {
        &self.algebra
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn table(&self) -> &GappedOperationTable {
        &self.table
    }

    /// Multilinear evaluation of `n_k(y; x_1..x_k)`.
    pub fn eval(&self, y: &Element, inputs: &[Element]) -> Result<Element, AinftyError> {
        if y.basis() != &self.basis {
            return Err(AinftyError::Lincomb(LincombError::BasisMismatch {
                expected: self.basis.name().to_string(),
                got: y.basis().name().to_string(),
            }));
        }
        for x in inputs {
            if x.basis() != self.algebra.basis() {
                return Err(AinftyError::Lincomb(LincombError::BasisMismatch {
                    expected: self.algebra.basis().name().to_string(),
                    got: x.basis().name().to_string(),
                }));
            }
        }
        let mut all = Vec::with_capacity(inputs.len() + 1);
        all.push(y.clone());
        all.extend(inputs.iter().cloned());
        let sig = AritySig::Module { k: inputs.len() };
        eval_table(self.ctx(), &self.table, sig, &all, &self.basis)
    }
}

/// One structure constant of a bimodule table.
#[derive(Debug, Clone)]
pub struct BimoduleEntry {
    pub level: Rational,
    pub left: Vec<usize>,
    pub y: usize,
    pub right: Vec<usize>,
    pub output: Vec<usize>,
}

/// A gapped filtered A-infinity bimodule over a pair of filtered algebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredBimodule {
    left_algebra: Arc<FilteredAlgebra>,
    right_algebra: Arc<FilteredAlgebra>,
    basis: Arc<Basis>,
    table: GappedOperationTable,
}

impl FilteredBimodule {
    pub fn new(
        left_algebra: &Arc<FilteredAlgebra>,
        right_algebra: &Arc<FilteredAlgebra>,
        basis: &Arc<Basis>,
        entries: impl IntoIterator<Item = BimoduleEntry>,
    ) -> Result<Arc<FilteredBimodule>, AinftyError> {
        if left_algebra.ctx() != right_algebra.ctx() {
            return Err(AinftyError::ContextMismatch);
        }
        let ctx = left_algebra.ctx();
        let mut table = GappedOperationTable::new();
        for e in entries {
            validate_level(ctx, e.level)?;
            validate_indices(left_algebra.basis(), &e.left)?;
            validate_indices(basis, &[e.y])?;
            validate_indices(right_algebra.basis(), &e.right)?;
            validate_indices(basis, &e.output)?;
            let sig = AritySig::Bimodule {
                left: e.left.len(),
                right: e.right.len(),
            };
            let mut inputs = e.left.clone();
            inputs.push(e.y);
            inputs.extend_from_slice(&e.right);
            let la = left_algebra.basis().clone();
            let ra = right_algebra.basis().clone();
            let bb = basis.clone();
            let nl = e.left.len();
            table.insert_entry(
                OpKey { level: e.level, sig, inputs },
                Z2Vec::from_iter(e.output),
                move |idx| {
                    let mut v: Vec<String> = idx[..nl]
                        .iter()
                        .map(|i| la.gen_name(*i).to_string())
                        .collect();
                    v.push(bb.gen_name(idx[nl]).to_string());
                    v.extend(idx[nl + 1..].iter().map(|i| ra.gen_name(*i).to_string()));
                    v
                },
            )?;
        }
        Ok(Arc::new(FilteredBimodule {
            left_algebra: Arc::clone(left_algebra),
            right_algebra: Arc::clone(right_algebra),
            basis: Arc::clone(basis),
            table,
        }))
    }

    pub(crate) fn from_table(
        left_algebra: &Arc<FilteredAlgebra>,
        right_algebra: &Arc<FilteredAlgebra>,
        basis: &Arc<Basis>,
        table: GappedOperationTable,
    ) -> Arc<FilteredBimodule> {
        Arc::new(FilteredBimodule {
            left_algebra: Arc::clone(left_algebra),
            right_algebra: Arc::clone(right_algebra),
            basis: Arc::clone(basis),
            table,
        })
    }

    pub fn ctx(&self) -> &Ctx {
        self.left_algebra.ctx()
    }

    pub fn left_algebra(&self) -> &Arc<FilteredAlgebra> {
        &self.left_algebra
    }

    pub fn right_algebra(&self) -> &Arc<FilteredAlgebra> {
        &self.right_algebra
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn table(&self) -> &GappedOperationTable {
        &self.table
    }

    /// Multilinear evaluation of `n_{k1,k2}(left; y; right)`.
    pub fn eval(
        &self,
        left: &[Element],
        y: &Element,
        right: &[Element],
    ) -> Result<Element, AinftyError> {
        let mut all = Vec::with_capacity(left.len() + right.len() + 1);
        all.extend(left.iter().cloned());
        all.push(y.clone());
        all.extend(right.iter().cloned());
        let sig = AritySig::Bimodule {
            left: left.len(),
            right: right.len(),
        };
        eval_table(self.ctx(), &self.table, sig, &all, &self.basis)
    }
}

/// A filtered A-infinity homomorphism between right modules over one
/// algebra. Components are indexed by the number of algebra inputs after
/// `y`; there is no constant component, so a stored homomorphism is strict
/// by shape and the flag records the intent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AInftyHomomorphism {
    source: Arc<FilteredRightModule>,
    target: Arc<FilteredRightModule>,
    components: GappedOperationTable,
    strict: bool,
}

impl AInftyHomomorphism {
    pub fn new(
        source: &Arc<FilteredRightModule>,
        target: &Arc<FilteredRightModule>,
        entries: impl IntoIterator<Item = ModuleEntry>,
        strict: bool,
    ) -> Result<Arc<AInftyHomomorphism>, AinftyError> {
        if source.algebra() != target.algebra() {
            return Err(AinftyError::AlgebraMismatch);
        }
        let ctx = source.ctx();
        let mut components = GappedOperationTable::new();
        for e in entries {
            validate_level(ctx, e.level)?;
            validate_indices(source.basis(), &[e.y])?;
            validate_indices(source.algebra().basis(), &e.inputs)?;
            validate_indices(target.basis(), &e.output)?;
            let mut inputs = vec![e.y];
            inputs.extend_from_slice(&e.inputs);
            let sb = source.basis().clone();
            let ab = source.algebra().basis().clone();
            components.insert_entry(
                OpKey {
                    level: e.level,
                    sig: AritySig::Module {
                        k: inputs.len() - 1,
                    },
                    inputs,
                },
                Z2Vec::from_iter(e.output),
                move |idx| {
                    let mut v = vec![sb.gen_name(idx[0]).to_string()];
                    v.extend(idx[1..].iter().map(|i| ab.gen_name(*i).to_string()));
                    v
                },
            )?;
        }
        Ok(Arc::new(AInftyHomomorphism {
            source: Arc::clone(source),
            target: Arc::clone(target),
            components,
            strict,
        }))
    }

    /// The identity homomorphism of a module: linear part the identity, all
    /// higher components zero.
    pub fn identity(module: &Arc<FilteredRightModule>) -> Arc<AInftyHomomorphism> {
        let mut components = GappedOperationTable::new();
        for i in 0..module.basis().len() {
            components.xor_entry(
                OpKey {
                    level: Rational::from_integer(0),
                    sig: AritySig::Module { k: 0 },
                    inputs: vec![i],
                },
                &Z2Vec::singleton(i),
            );
        }
        Arc::new(AInftyHomomorphism {
            source: Arc::clone(module),
            target: Arc::clone(module),
            components,
            strict: true,
        })
    }

    pub fn ctx(&self) -> &Ctx {
        self.source.ctx()
    }

    pub fn source(&self) -> &Arc<FilteredRightModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FilteredRightModule> {
        &self.target
    }

    pub fn components(&self) -> &GappedOperationTable {
        &self.components
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Whether the linear part is the identity modulo positive valuation.
    /// Requires equal-size bases, compared positionally.
    pub fn linear_part_is_identity_mod_positive(&self) -> bool {
        let n = self.source.basis().len();
        if self.target.basis().len() != n {
            return false;
        }
        for i in 0..n {
            let expected = Z2Vec::singleton(i);
            let got = self
                .components
                .constant(
                    AritySig::Module { k: 0 },
                    Rational::from_integer(0),
                    &[i],
                )
                .cloned()
                .unwrap_or_default();
            if got != expected {
                return false;
            }
        }
        true
    }

    /// Multilinear evaluation of the component with `inputs.len()` algebra
    /// inputs.
    pub fn eval(&self, y: &Element, inputs: &[Element]) -> Result<Element, AinftyError> {
        let mut all = Vec::with_capacity(inputs.len() + 1);
        all.push(y.clone());
        all.extend(inputs.iter().cloned());
        let sig = AritySig::Module { k: inputs.len() };
        eval_table(self.ctx(), &self.components, sig, &all, self.target.basis())
    }

    /// Realizes the linear part as a matrix.
    pub fn linear_part(&self) -> LinearMap {
        let mut m = LinearMap::zero(self.ctx(), self.source.basis(), self.target.basis());
        for (key, v) in self.components.entries() {
            if key.sig == (AritySig::Module { k: 0 }) {
                for r in v.iter() {
                    let s = Scalar::monomial(self.ctx(), key.level).expect("below cutoff");
                    m.add_entry(r, key.inputs[0], s).expect("shared context");
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::Basis;
    use crate::novikov::{Context, DiscreteMonoid};
    use crate::rat::{rat, rat_int};

    pub(crate) fn ctx_int(cutoff: i64) -> Ctx {
        Context::new(
            DiscreteMonoid::new([rat_int(1)]).unwrap(),
            rat_int(cutoff),
        )
        .unwrap()
    }

    /// The canonical worked fixture: G = <1>, cutoff 4, algebra {p, q} with
    /// q a unit and p nilpotent, module {w, v} with boundary T(w -> v).
    pub(crate) fn fixture_f1() -> (Ctx, Arc<FilteredAlgebra>, Arc<FilteredRightModule>) {
        let ctx = ctx_int(4);
        let c = Basis::new("C", ["p", "q"]).unwrap();
        let zero = rat_int(0);
        let alg = FilteredAlgebra::from_named(
            &ctx,
            &c,
            &[
                (zero, &["p", "q"], &["p"]),
                (zero, &["q", "p"], &["p"]),
                (zero, &["q", "q"], &["q"]),
            ],
        )
        .unwrap();
        let d = Basis::new("D", ["w", "v"]).unwrap();
        let one = rat_int(1);
        let module = FilteredRightModule::from_named(
            &alg,
            &d,
            &[
                (one, "w", &[], &["v"]),
                (zero, "w", &["p"], &["v"]),
                (zero, "w", &["q"], &["w"]),
                (zero, "v", &["q"], &["v"]),
            ],
        )
        .unwrap();
        (ctx, alg, module)
    }

    #[test]
    fn eval_is_bilinear_on_f1() {
        let (ctx, alg, _) = fixture_f1();
        let basis = alg.basis().clone();
        // m_2 with m_{2,0}(q,q) = q on (T^... ) inputs: bilinearity.
        let t_half = Scalar::monomial(&ctx, rat_int(1)).unwrap();
        let x = Element::from_terms(&ctx, &basis, [(1, t_half.clone())]).unwrap();
        let y = Element::from_terms(&ctx, &basis, [(1, t_half)]).unwrap();
        let out = alg.eval(&[x, y]).unwrap();
        let expect = Element::from_terms(
            &ctx,
            &basis,
            [(1, Scalar::monomial(&ctx, rat_int(2)).unwrap())],
        )
        .unwrap();
        assert_eq!(out, expect);
    }

    #[test]
    fn eval_on_zero_input_is_zero() {
        let (ctx, alg, module) = fixture_f1();
        let z = Element::zero(&ctx, alg.basis());
        assert!(alg.eval(&[z.clone(), z.clone()]).unwrap().is_zero());
        let zm = Element::zero(&ctx, module.basis());
        assert!(module.eval(&zm, &[z]).unwrap().is_zero());
    }

    #[test]
    fn module_eval_matches_f1_fixture() {
        let (ctx, alg, module) = fixture_f1();
        let w = Element::generator(&ctx, module.basis(), "w").unwrap();
        let p = Element::generator(&ctx, alg.basis(), "p").unwrap();
        let v = Element::generator(&ctx, module.basis(), "v").unwrap();
        assert_eq!(module.eval(&w, &[p]).unwrap(), v);
        // n_0(w) = T v
        let n0 = module.eval(&w, &[]).unwrap();
        let tv = Element::from_terms(
            &ctx,
            module.basis(),
            [(1, Scalar::monomial(&ctx, rat_int(1)).unwrap())],
        )
        .unwrap();
        assert_eq!(n0, tv);
    }

    #[test]
    fn duplicate_entries_rejected() {
        let ctx = ctx_int(2);
        let b = Basis::new("C", ["p"]).unwrap();
        let zero = rat_int(0);
        let err = FilteredAlgebra::from_named(
            &ctx,
            &b,
            &[(zero, &["p", "p"], &["p"]), (zero, &["p", "p"], &["p"])],
        )
        .unwrap_err();
        assert!(matches!(err, AinftyError::DuplicateEntry { .. }));
    }

    #[test]
    fn levels_validated_against_monoid_and_cutoff() {
        let ctx = Context::new(
            DiscreteMonoid::new([rat(1, 2)]).unwrap(),
            rat_int(2),
        )
        .unwrap();
        let b = Basis::new("C", ["p"]).unwrap();
        let bad = FilteredAlgebra::from_named(&ctx, &b, &[(rat(1, 3), &["p"], &["p"])]);
        assert!(matches!(bad, Err(AinftyError::LevelNotInMonoid(_))));
        let high = FilteredAlgebra::from_named(&ctx, &b, &[(rat_int(2), &["p"], &["p"])]);
        assert!(matches!(high, Err(AinftyError::LevelAboveCutoff { .. })));
    }

    #[test]
    fn curvature_element() {
        let ctx = ctx_int(3);
        let b = Basis::new("C", ["p"]).unwrap();
        let alg =
            FilteredAlgebra::from_named(&ctx, &b, &[(rat_int(1), &[], &["p"])]).unwrap();
        let m0 = alg.curvature();
        let expect = Element::from_terms(
            &ctx,
            &b,
            [(0, Scalar::monomial(&ctx, rat_int(1)).unwrap())],
        )
        .unwrap();
        assert_eq!(m0, expect);
        assert!(!alg.has_level_zero_curvature());
    }
}
