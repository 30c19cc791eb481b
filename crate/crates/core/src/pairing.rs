//! Floer complexes over the Novikov ring, gluing tensors, the pairing
//! relation, and the induced chain map between the pair complex and the
//! Floer complex.
//!
//! The gluing tensor has input slots `(y1; x^1_1..x^1_{k1}; a; y2;
//! x^2_1..x^2_{k2})` over the module-1, algebra-1, pair, module-2 and
//! algebra-2 bases, with output in the Floer basis. The pairing relation it
//! must satisfy equates the Floer boundary of a tensor value with five
//! correction families: the bimodule action on the pair slot, the two
//! module actions on the `y` slots, and algebra insertions into the two
//! input strings. The module-2 action consumes its inputs in reversed
//! order; that is the printed convention (the second factor carries the
//! opposite orientation) and is implemented exactly as stated.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::lincomb::{Basis, Element, LincombError, LinearMap};
use crate::mc::{verify_mc, CyclicElementCertificate, McError};
use crate::novikov::{Ctx, NovikovError, Scalar, Valuation};
use crate::rat::{format_rational, Rational};
use crate::relations::{
    check_bimodule_relations, check_module_relations, Counterexample, LevelSet, StructureKind,
};
use crate::structures::{
    AinftyError, AritySig, FilteredBimodule, FilteredRightModule,
};
use crate::twist::bimodule_boundary_raw;
use crate::z2::Z2Vec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error(transparent)]
    Ainfty(#[from] AinftyError),
    #[error(transparent)]
    Lincomb(#[from] LincombError),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error("{0}")]
    Mc(McError),
    #[error("{0}")]
    Relations(Counterexample),
    #[error("Floer boundary does not square to zero: witness `{generator}` at energy {}", format_rational(.level))]
    NotAComplex { generator: String, level: Rational },
    #[error("Floer weight energy must be positive, got {}", format_rational(.0))]
    NonPositiveEnergy(Rational),
    #[error("duplicate Floer weight ({from}, {to}) at energy {}", format_rational(.energy))]
    DuplicateWeight {
        from: String,
        to: String,
        energy: Rational,
    },
    #[error("duplicate gluing component at level {}", format_rational(.0))]
    DuplicateComponent(Rational),
    #[error("gluing instance wiring mismatch: {0}")]
    Wiring(String),
    #[error("induced map is not a chain map: first failing level {}", format_rational(.0))]
    ChainMap(Rational),
    #[error("leading term of the induced map is not the identity pairing")]
    LeadingTermNotIdentity,
}

/// Abstract Floer chain data: a basis of generators and Z/2 boundary
/// weights `(a-, a+) -> energies`. Every energy lies in the monoid and is
/// strictly positive; the realized boundary reduces to zero at `T = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloerComplexData {
    ctx: Ctx,
    basis: Arc<Basis>,
    weights: BTreeMap<(usize, usize), BTreeSet<Rational>>,
}

impl FloerComplexData {
    pub fn new(
        ctx: &Ctx,
        basis: &Arc<Basis>,
        weights: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Arc<FloerComplexData>, PairingError> {
        let mut map: BTreeMap<(usize, usize), BTreeSet<Rational>> = BTreeMap::new();
        for (from, to, energy) in weights {
            if from >= basis.len() || to >= basis.len() {
                return Err(PairingError::Ainfty(AinftyError::IndexOutOfRange));
            }
            if !ctx.monoid().contains(&energy) {
                return Err(PairingError::Ainfty(AinftyError::LevelNotInMonoid(energy)));
            }
            if energy >= ctx.cutoff() {
                return Err(PairingError::Ainfty(AinftyError::LevelAboveCutoff {
                    level: energy,
                    cutoff: ctx.cutoff(),
                }));
            }
            if energy <= Rational::from_integer(0) {
                return Err(PairingError::NonPositiveEnergy(energy));
            }
            if !map.entry((from, to)).or_default().insert(energy) {
                return Err(PairingError::DuplicateWeight {
                    from: basis.gen_name(from).to_string(),
                    to: basis.gen_name(to).to_string(),
                    energy,
                });
            }
        }
        Ok(Arc::new(FloerComplexData {
            ctx: Arc::clone(ctx),
            basis: Arc::clone(basis),
            weights: map,
        }))
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn weights(&self) -> impl Iterator<Item = (usize, usize, &BTreeSet<Rational>)> {
        self.weights.iter().map(|((f, t), es)| (*f, *t, es))
    }

    /// The boundary matrix `a- -> sum T^E a+` without the square-zero check.
    fn matrix(&self) -> LinearMap {
        let mut m = LinearMap::zero(&self.ctx, &self.basis, &self.basis);
        for ((from, to), energies) in &self.weights {
            let s = Scalar::from_exponents(&self.ctx, energies.iter().copied())
                .expect("validated energies");
            m.add_entry(*to, *from, s).expect("shared context");
        }
        m
    }

    /// The level-`mu` part of the boundary applied to a Z/2 chain.
    fn apply_level(&self, mu: Rational, v: &Z2Vec) -> Z2Vec {
        let mut out = Z2Vec::new();
        for ((from, to), energies) in &self.weights {
            if energies.contains(&mu) && v.contains(*from) {
                out.toggle(*to);
            }
        }
        out
    }
}

/// Realizes the Floer boundary operator and certifies that it squares to
/// zero below the cutoff.
pub fn realize_floer_boundary(f: &FloerComplexData) -> Result<LinearMap, PairingError> {
    let d = f.matrix();
    let dd = d.compose(&d)?;
    if !dd.is_zero() {
        let (generator, level) = dd.first_entry_by_name().expect("nonzero");
        return Err(PairingError::NotAComplex { generator, level });
    }
    Ok(d)
}

/// One gluing structure constant.
#[derive(Debug, Clone)]
pub struct GluingEntry {
    pub level: Rational,
    pub y1: usize,
    pub xs1: Vec<usize>,
    pub a: usize,
    pub y2: usize,
    pub xs2: Vec<usize>,
    pub output: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct GluingKey {
    level: Rational,
    k1: usize,
    k2: usize,
    inputs: Vec<usize>,
}

/// Sparse gluing structure constants over the five input bases with output
/// in the Floer basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingTensor {
    components: BTreeMap<GluingKey, Z2Vec>,
}

impl GluingTensor {
    fn constant(&self, k1: usize, k2: usize, level: Rational, inputs: &[usize]) -> Option<&Z2Vec> {
        self.components.get(&GluingKey {
            level,
            k1,
            k2,
            inputs: inputs.to_vec(),
        })
    }

    fn max_arities(&self) -> (usize, usize) {
        let mut m1 = 0;
        let mut m2 = 0;
        for k in self.components.keys() {
            m1 = m1.max(k.k1);
            m2 = m2.max(k.k2);
        }
        (m1, m2)
    }

    /// Multilinear residue evaluation with Z/2-set slots, ordered
    /// `[y1, xs1.., a, y2, xs2..]`.
    fn eval_sets(&self, k1: usize, k2: usize, level: Rational, slots: &[&Z2Vec]) -> Z2Vec {
        debug_assert_eq!(slots.len(), k1 + k2 + 3);
        let mut out = Z2Vec::new();
        if slots.iter().any(|s| s.is_zero()) {
            return out;
        }
        let supports: Vec<Vec<usize>> = slots.iter().map(|s| s.iter().collect()).collect();
        let mut idx = vec![0usize; supports.len()];
        loop {
            let tuple: Vec<usize> = idx.iter().zip(&supports).map(|(i, s)| s[*i]).collect();
            if let Some(v) = self.constant(k1, k2, level, &tuple) {
                out.add_assign(v);
            }
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

    pub fn components(
        &self,
    ) -> impl Iterator<Item = (Rational, usize, usize, &[usize], &Z2Vec)> {
        self.components
            .iter()
            .map(|(k, v)| (k.level, k.k1, k.k2, k.inputs.as_slice(), v))
    }
}

/// A complete gluing package: two modules over their algebras, the
/// connecting bimodule, the Floer data, and the gluing tensor, with all
/// wiring validated.
#[derive(Debug, Clone)]
pub struct GluingInstance {
    pub module1: Arc<FilteredRightModule>,
    pub module2: Arc<FilteredRightModule>,
    pub bimodule: Arc<FilteredBimodule>,
    pub floer: Arc<FloerComplexData>,
    pub tensor: GluingTensor,
}

impl GluingInstance {
    pub fn new(
        module1: &Arc<FilteredRightModule>,
        module2: &Arc<FilteredRightModule>,
        bimodule: &Arc<FilteredBimodule>,
        floer: &Arc<FloerComplexData>,
        entries: impl IntoIterator<Item = GluingEntry>,
    ) -> Result<GluingInstance, PairingError> {
        if bimodule.left_algebra() != module1.algebra() {
            return Err(PairingError::Wiring(
                "bimodule left algebra differs from module-1 algebra".into(),
            ));
        }
        if bimodule.right_algebra() != module2.algebra() {
            return Err(PairingError::Wiring(
                "bimodule right algebra differs from module-2 algebra".into(),
            ));
        }
        if floer.ctx() != module1.ctx() {
            return Err(PairingError::Wiring("contexts differ".into()));
        }
        let ctx = module1.ctx();
        let mut components = BTreeMap::new();
        for e in entries {
            if !ctx.monoid().contains(&e.level) {
                return Err(PairingError::Ainfty(AinftyError::LevelNotInMonoid(e.level)));
            }
            if e.level >= ctx.cutoff() {
                return Err(PairingError::Ainfty(AinftyError::LevelAboveCutoff {
                    level: e.level,
                    cutoff: ctx.cutoff(),
                }));
            }
            let in_range = e.y1 < module1.basis().len()
                && e.xs1.iter().all(|i| *i < module1.algebra().basis().len())
                && e.a < bimodule.basis().len()
                && e.y2 < module2.basis().len()
                && e.xs2.iter().all(|i| *i < module2.algebra().basis().len())
                && e.output.iter().all(|i| *i < floer.basis().len());
            if !in_range {
                return Err(PairingError::Ainfty(AinftyError::IndexOutOfRange));
            }
            let mut inputs = vec![e.y1];
            inputs.extend_from_slice(&e.xs1);
            inputs.push(e.a);
            inputs.push(e.y2);
            inputs.extend_from_slice(&e.xs2);
            let key = GluingKey {
                level: e.level,
                k1: e.xs1.len(),
                k2: e.xs2.len(),
                inputs,
            };
            let out = Z2Vec::from_iter(e.output);
            if out.is_zero() {
                continue;
            }
            if components.insert(key, out).is_some() {
                return Err(PairingError::DuplicateComponent(e.level));
            }
        }
        Ok(GluingInstance {
            module1: Arc::clone(module1),
            module2: Arc::clone(module2),
            bimodule: Arc::clone(bimodule),
            floer: Arc::clone(floer),
            tensor: GluingTensor { components },
        })
    }

    pub fn ctx(&self) -> &Ctx {
        self.module1.ctx()
    }
}

/// The pairing relation residual at one output level and input tuple.
#[allow(clippy::too_many_arguments)]
fn pairing_residual(
    inst: &GluingInstance,
    levels: &LevelSet,
    k1: usize,
    k2: usize,
    level: Rational,
    y1: usize,
    xs1: &[usize],
    a: usize,
    y2: usize,
    xs2: &[usize],
) -> Z2Vec {
    let tensor = &inst.tensor;
    let s1 = singleton_slots(xs1);
    let s2 = singleton_slots(xs2);
    let y1_slot = Z2Vec::singleton(y1);
    let a_slot = Z2Vec::singleton(a);
    let y2_slot = Z2Vec::singleton(y2);
    let mut out = Z2Vec::new();

    let assemble = |y1s: &Z2Vec,
                    left: &[&Z2Vec],
                    a_s: &Z2Vec,
                    y2s: &Z2Vec,
                    right: &[&Z2Vec],
                    mu: Rational|
     -> Z2Vec {
        let mut slots: Vec<&Z2Vec> = Vec::with_capacity(left.len() + right.len() + 3);
        slots.push(y1s);
        slots.extend_from_slice(left);
        slots.push(a_s);
        slots.push(y2s);
        slots.extend_from_slice(right);
        tensor.eval_sets(left.len(), right.len(), mu, &slots)
    };

    // Line 1: Floer boundary after the tensor.
    for (mu, nu) in levels.splits(level) {
        let all1: Vec<&Z2Vec> = s1.iter().collect();
        let all2: Vec<&Z2Vec> = s2.iter().collect();
        let inner = assemble(&y1_slot, &all1, &a_slot, &y2_slot, &all2, nu);
        out.add_assign(&inst.floer.apply_level(mu, &inner));
    }

    // Line 2: bimodule action on the pair slot. The inner operation takes
    // the suffix of the left string and the prefix of the right string.
    for k1o in 0..=k1 {
        for k2i in 0..=k2 {
            for (mu, nu) in levels.splits(level) {
                let mut inner_key = Vec::with_capacity(k1 - k1o + k2i + 1);
                inner_key.extend_from_slice(&xs1[k1o..]);
                inner_key.push(a);
                inner_key.extend_from_slice(&xs2[..k2i]);
                let Some(inner) = inst.bimodule.table().constant(
                    AritySig::Bimodule {
                        left: k1 - k1o,
                        right: k2i,
                    },
                    nu,
                    &inner_key,
                ) else {
                    continue;
                };
                let left: Vec<&Z2Vec> = s1[..k1o].iter().collect();
                let right: Vec<&Z2Vec> = s2[k2i..].iter().collect();
                out.add_assign(&assemble(&y1_slot, &left, inner, &y2_slot, &right, mu));
            }
        }
    }

    // Line 3: module-1 action on y1, consuming a prefix of the left string.
    for kp in 0..=k1 {
        for (mu, nu) in levels.splits(level) {
            let mut inner_key = Vec::with_capacity(kp + 1);
            inner_key.push(y1);
            inner_key.extend_from_slice(&xs1[..kp]);
            let Some(inner) =
                inst.module1
                    .table()
                    .constant(AritySig::Module { k: kp }, nu, &inner_key)
            else {
                continue;
            };
            let left: Vec<&Z2Vec> = s1[kp..].iter().collect();
            let right: Vec<&Z2Vec> = s2.iter().collect();
            out.add_assign(&assemble(inner, &left, &a_slot, &y2_slot, &right, mu));
        }
    }

    // Line 4: module-2 action on y2, consuming the suffix of the right
    // string in reversed order (the printed convention).
    for kp in 0..=k2 {
        for (mu, nu) in levels.splits(level) {
            let mut inner_key = Vec::with_capacity(kp + 1);
            inner_key.push(y2);
            inner_key.extend(xs2[k2 - kp..].iter().rev());
            let Some(inner) =
                inst.module2
                    .table()
                    .constant(AritySig::Module { k: kp }, nu, &inner_key)
            else {
                continue;
            };
            let left: Vec<&Z2Vec> = s1.iter().collect();
            let right: Vec<&Z2Vec> = s2[..k2 - kp].iter().collect();
            out.add_assign(&assemble(&y1_slot, &left, &a_slot, inner, &right, mu));
        }
    }

    // Line 5: algebra-1 insertions into the left string.
    for j in 0..=k1 {
        for s in 0..=(k1 - j) {
            for (mu, nu) in levels.splits(level) {
                let Some(inner) = inst.module1.algebra().table().constant(
                    AritySig::Algebra { k: j },
                    nu,
                    &xs1[s..s + j],
                ) else {
                    continue;
                };
                let mut left: Vec<&Z2Vec> = Vec::with_capacity(k1 - j + 1);
                left.extend(s1[..s].iter());
                left.push(inner);
                left.extend(s1[s + j..].iter());
                let right: Vec<&Z2Vec> = s2.iter().collect();
                out.add_assign(&assemble(&y1_slot, &left, &a_slot, &y2_slot, &right, mu));
            }
        }
    }

    // Line 6: algebra-2 insertions into the right string.
    for j in 0..=k2 {
        for s in 0..=(k2 - j) {
            for (mu, nu) in levels.splits(level) {
                let Some(inner) = inst.module2.algebra().table().constant(
                    AritySig::Algebra { k: j },
                    nu,
                    &xs2[s..s + j],
                ) else {
                    continue;
                };
                let left: Vec<&Z2Vec> = s1.iter().collect();
                let mut right: Vec<&Z2Vec> = Vec::with_capacity(k2 - j + 1);
                right.extend(s2[..s].iter());
                right.push(inner);
                right.extend(s2[s + j..].iter());
                out.add_assign(&assemble(&y1_slot, &left, &a_slot, &y2_slot, &right, mu));
            }
        }
    }

    out
}

fn singleton_slots(tuple: &[usize]) -> Vec<Z2Vec> {
    tuple.iter().map(|g| Z2Vec::singleton(*g)).collect()
}

fn tuples(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total: usize = n.checked_pow(len as u32).unwrap_or(0);
    (0..total).map(move |mut t| {
        let mut v = vec![0usize; len];
        for slot in (0..len).rev() {
            v[slot] = t % n;
            t /= n;
        }
        v
    })
}

/// Checks the pairing relation at every level below `bound`, after first
/// requiring both modules (hence both algebras), the bimodule, and the
/// Floer data to pass their own checks.
pub fn check_pairing_relation(
    inst: &GluingInstance,
    bound: Rational,
) -> Result<(), PairingError> {
    check_module_relations(&inst.module1, bound).map_err(PairingError::Relations)?;
    check_module_relations(&inst.module2, bound).map_err(PairingError::Relations)?;
    check_bimodule_relations(&inst.bimodule, bound).map_err(PairingError::Relations)?;
    realize_floer_boundary(&inst.floer)?;

    let levels = LevelSet::of(inst.ctx());
    let (max_k1, max_k2) = inst.tensor.max_arities();
    let (bim_l, bim_r) = inst.bimodule.table().max_bimodule_arities();
    let cap1 = max_k1
        + bim_l
            .max(inst.module1.table().max_arity())
            .max(inst.module1.algebra().table().max_arity().saturating_sub(1));
    let cap2 = max_k2
        + bim_r
            .max(inst.module2.table().max_arity())
            .max(inst.module2.algebra().table().max_arity().saturating_sub(1));

    let n_m1 = inst.module1.basis().len();
    let n_a1 = inst.module1.algebra().basis().len();
    let n_p = inst.bimodule.basis().len();
    let n_m2 = inst.module2.basis().len();
    let n_a2 = inst.module2.algebra().basis().len();

    for level in &levels.list {
        if *level >= bound {
            break;
        }
        for total in 0..=(cap1 + cap2) {
            for k1 in 0..=total.min(cap1) {
                let k2 = total - k1;
                if k2 > cap2 {
                    continue;
                }
                for y1 in 0..n_m1 {
                    for xs1 in tuples(n_a1, k1) {
                        for a in 0..n_p {
                            for y2 in 0..n_m2 {
                                for xs2 in tuples(n_a2, k2) {
                                    let residual = pairing_residual(
                                        inst, &levels, k1, k2, *level, y1, &xs1, a, y2, &xs2,
                                    );
                                    if !residual.is_zero() {
                                        let mut tuple =
                                            vec![inst.module1.basis().gen_name(y1).to_string()];
                                        tuple.extend(xs1.iter().map(|i| {
                                            inst.module1
                                                .algebra()
                                                .basis()
                                                .gen_name(*i)
                                                .to_string()
                                        }));
                                        tuple.push(
                                            inst.bimodule.basis().gen_name(a).to_string(),
                                        );
                                        tuple.push(
                                            inst.module2.basis().gen_name(y2).to_string(),
                                        );
                                        tuple.extend(xs2.iter().map(|i| {
                                            inst.module2
                                                .algebra()
                                                .basis()
                                                .gen_name(*i)
                                                .to_string()
                                        }));
                                        return Err(PairingError::Relations(Counterexample {
                                            kind: StructureKind::Pairing,
                                            level: *level,
                                            arity: (k1, Some(k2)),
                                            tuple,
                                            residual: residual
                                                .iter()
                                                .map(|g| {
                                                    inst.floer
                                                        .basis()
                                                        .gen_name(g)
                                                        .to_string()
                                                })
                                                .collect(),
                                        }));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// The induced map and the two differentials it intertwines.
#[derive(Debug, Clone)]
pub struct InducedGluing {
    /// Pair basis -> Floer basis.
    pub map: LinearMap,
    /// The pair differential `delta_{b1,b2}` on the bimodule basis.
    pub pair_differential: LinearMap,
    /// The realized Floer boundary.
    pub floer_boundary: LinearMap,
}

/// Builds the induced map by inserting the cyclic elements and bounding
/// cochains into the gluing tensor and certifies the chain-map identity
/// against the pair differential; both must hold for solver outputs.
pub fn induced_gluing_map(
    inst: &GluingInstance,
    cert1: &CyclicElementCertificate,
    b1: &Element,
    cert2: &CyclicElementCertificate,
    b2: &Element,
) -> Result<InducedGluing, PairingError> {
    let ctx = inst.ctx();
    let cutoff = ctx.cutoff();
    verify_mc(inst.module1.algebra(), b1, cutoff).map_err(PairingError::Mc)?;
    verify_mc(inst.module2.algebra(), b2, cutoff).map_err(PairingError::Mc)?;

    let mut map = LinearMap::zero(ctx, inst.bimodule.basis(), inst.floer.basis());
    for (level, k1, k2, inputs, out) in inst.tensor.components() {
        let y1 = inputs[0];
        let xs1 = &inputs[1..1 + k1];
        let a = inputs[1 + k1];
        let y2 = inputs[2 + k1];
        let xs2 = &inputs[3 + k1..3 + k1 + k2];
        let Some(c_y1) = cert1.one().coeff(y1) else { continue };
        let Some(c_y2) = cert2.one().coeff(y2) else { continue };
        let mut coeff = Scalar::monomial(ctx, level).expect("below cutoff");
        coeff = coeff.mul(c_y1)?.mul(c_y2)?;
        for g in xs1 {
            match b1.coeff(*g) {
                Some(s) => coeff = coeff.mul(s)?,
                None => {
                    coeff = Scalar::zero(ctx);
                    break;
                }
            }
        }
        if !coeff.is_zero() {
            for g in xs2 {
                match b2.coeff(*g) {
                    Some(s) => coeff = coeff.mul(s)?,
                    None => {
                        coeff = Scalar::zero(ctx);
                        break;
                    }
                }
            }
        }
        if coeff.is_zero() {
            continue;
        }
        for r in out.iter() {
            map.add_entry(r, a, coeff.clone())?;
        }
    }

    let pair_differential = bimodule_boundary_raw(&inst.bimodule, b1, b2)?;
    let floer_boundary = realize_floer_boundary(&inst.floer)?;

    let residual = floer_boundary
        .compose(&map)?
        .add(&map.compose(&pair_differential)?)?;
    if !residual.is_zero() {
        let level = residual
            .entries()
            .filter_map(|(_, _, s)| s.val().finite())
            .min()
            .expect("nonzero");
        return Err(PairingError::ChainMap(level));
    }

    Ok(InducedGluing {
        map,
        pair_differential,
        floer_boundary,
    })
}

/// Checks that the induced map reduces to the identity pairing at `T = 0`
/// under the positional identification of the pair and Floer bases.
pub fn verify_leading_identity(glued: &InducedGluing) -> Result<(), PairingError> {
    let m = &glued.map;
    let n = m.domain().len();
    if m.codomain().len() != n {
        return Err(PairingError::LeadingTermNotIdentity);
    }
    let residue = m.residue_matrix();
    for r in 0..n {
        for c in 0..n {
            if residue.get(r, c) != (r == c) {
                return Err(PairingError::LeadingTermNotIdentity);
            }
        }
    }
    Ok(())
}

/// Quick validity check used by pipelines: `d^b(1) = 0` below `bound`.
pub fn cyclic_equation_holds(
    cert: &CyclicElementCertificate,
    b: &Element,
    bound: Rational,
) -> Result<bool, PairingError> {
    let d = crate::twist::twisted_differential(cert.module(), b)?;
    let residual = d.apply(cert.one())?;
    Ok(match residual.val() {
        Valuation::Infinite => true,
        Valuation::Finite(v) => v >= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::Basis;
    use crate::novikov::{Context, DiscreteMonoid};
    use crate::rat::{rat, rat_int};
    use crate::structures::{FilteredAlgebra, FilteredBimodule, FilteredRightModule};

    fn ctx_half(cutoff: i64) -> Ctx {
        Context::new(DiscreteMonoid::new([rat(1, 2)]).unwrap(), rat_int(cutoff)).unwrap()
    }

    #[test]
    fn floer_boundary_realizes_weights() {
        let ctx = ctx_half(2);
        let b = Basis::new("R", ["a", "b"]).unwrap();
        let f = FloerComplexData::new(&ctx, &b, [(0, 1, rat_int(1))]).unwrap();
        let d = realize_floer_boundary(&f).unwrap();
        assert_eq!(
            d.entry(1, 0),
            Some(&Scalar::monomial(&ctx, rat_int(1)).unwrap())
        );
        let empty = FloerComplexData::new(&ctx, &b, []).unwrap();
        assert!(realize_floer_boundary(&empty).unwrap().is_zero());
    }

    #[test]
    fn floer_boundary_rejects_non_complex() {
        let ctx = ctx_half(4);
        let b = Basis::new("R", ["a", "b", "c"]).unwrap();
        // a -> T b, b -> T c with nothing cancelling: d^2(a) = T^2 c.
        let f = FloerComplexData::new(
            &ctx,
            &b,
            [(0, 1, rat_int(1)), (1, 2, rat_int(1))],
        )
        .unwrap();
        let err = realize_floer_boundary(&f).unwrap_err();
        match err {
            PairingError::NotAComplex { generator, level } => {
                assert_eq!(generator, "a");
                assert_eq!(level, rat_int(2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn floer_rejects_zero_energy_and_duplicates() {
        let ctx = ctx_half(2);
        let b = Basis::new("R", ["a", "b"]).unwrap();
        assert!(matches!(
            FloerComplexData::new(&ctx, &b, [(0, 1, rat_int(0))]),
            Err(PairingError::NonPositiveEnergy(_))
        ));
        assert!(matches!(
            FloerComplexData::new(&ctx, &b, [(0, 1, rat_int(1)), (0, 1, rat_int(1))]),
            Err(PairingError::DuplicateWeight { .. })
        ));
    }

    /// The one-generator instance: unit algebra, diagonal module, diagonal
    /// bimodule, zero boundary, identity pairing.
    fn trivial_instance() -> (Ctx, GluingInstance) {
        let ctx = ctx_half(2);
        let zero = rat_int(0);
        let cb = Basis::new("C", ["p"]).unwrap();
        let alg =
            FilteredAlgebra::from_named(&ctx, &cb, &[(zero, &["p", "p"], &["p"])]).unwrap();
        let mb = Basis::new("M", ["w"]).unwrap();
        let module =
            FilteredRightModule::from_named(&alg, &mb, &[(zero, "w", &["p"], &["w"])])
                .unwrap();
        let pb = Basis::new("P", ["s"]).unwrap();
        let bim = FilteredBimodule::new(
            &alg,
            &alg,
            &pb,
            [
                crate::structures::BimoduleEntry {
                    level: zero,
                    left: vec![0],
                    y: 0,
                    right: vec![],
                    output: vec![0],
                },
                crate::structures::BimoduleEntry {
                    level: zero,
                    left: vec![],
                    y: 0,
                    right: vec![0],
                    output: vec![0],
                },
            ],
        )
        .unwrap();
        let fb = Basis::new("F", ["f"]).unwrap();
        let floer = FloerComplexData::new(&ctx, &fb, []).unwrap();
        let inst = GluingInstance::new(
            &module,
            &module,
            &bim,
            &floer,
            [GluingEntry {
                level: zero,
                y1: 0,
                xs1: vec![],
                a: 0,
                y2: 0,
                xs2: vec![],
                output: vec![0],
            }],
        )
        .unwrap();
        (ctx, inst)
    }

    #[test]
    fn trivial_instance_passes_pairing_relation() {
        let (_, inst) = trivial_instance();
        check_pairing_relation(&inst, rat_int(2)).unwrap();
    }

    #[test]
    fn trivial_instance_induces_identity() {
        let (ctx, inst) = trivial_instance();
        let one = Element::generator(&ctx, inst.module1.basis(), "w").unwrap();
        let cert1 = crate::mc::certify_cyclic(&inst.module1, &one).unwrap();
        let cert2 = crate::mc::certify_cyclic(&inst.module2, &one).unwrap();
        let b = Element::zero(&ctx, inst.module1.algebra().basis());
        let glued = induced_gluing_map(&inst, &cert1, &b, &cert2, &b).unwrap();
        assert_eq!(
            glued.map,
            LinearMap::from_entries(
                &ctx,
                inst.bimodule.basis(),
                inst.floer.basis(),
                [((0, 0), Scalar::one(&ctx))]
            )
            .unwrap()
        );
        verify_leading_identity(&glued).unwrap();
        assert!(glued.pair_differential.is_zero());
        let h_pair = crate::homology::homology(&glued.pair_differential).unwrap();
        let h_floer = crate::homology::homology(&glued.floer_boundary).unwrap();
        assert!(h_pair.agrees_with(&h_floer));
        assert_eq!(h_pair.free_rank, 1);
    }

    #[test]
    fn corrupted_tensor_fails_pairing_relation() {
        let (_, mut inst) = trivial_instance();
        // Zero out the lone component: the relation instance at arity (1,0)
        // no longer cancels between lines 2 and 3... it does (both vanish).
        // Instead corrupt by adding a bogus higher component.
        let key = GluingKey {
            level: rat_int(0),
            k1: 1,
            k2: 0,
            inputs: vec![0, 0, 0, 0],
        };
        inst.tensor.components.insert(key, Z2Vec::singleton(0));
        let err = check_pairing_relation(&inst, rat_int(2)).unwrap_err();
        match err {
            PairingError::Relations(ce) => {
                assert_eq!(ce.kind, StructureKind::Pairing);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
