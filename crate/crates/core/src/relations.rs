//! Relation checkers for curved algebras, right modules, bimodules, and
//! homomorphisms.
//!
//! Every check is levelwise-exact below the requested energy bound: for each
//! energy level, arity, and generator tuple, the full quadratic relation is
//! expanded over all energy splits and must vanish as a Z/2 chain. The
//! enumeration order (level ascending, then arity, then tuple) is fixed so
//! the first counterexample is deterministic across runs and platforms.
//!
//! Arity enumeration is capped at the largest arity at which any relation
//! term can be nonzero given the stored tables (for an algebra with maximal
//! stored arity `k`, that is `2k - 1`: both the inner and the outer factor
//! of a quadratic term must be stored). Relations above the cap hold
//! vacuously, so the caps lose nothing.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::lincomb::Basis;
use crate::novikov::Ctx;
use crate::rat::{format_rational, Rational};
use crate::structures::{
    AInftyHomomorphism, AritySig, FilteredAlgebra, FilteredBimodule, FilteredRightModule,
    GappedOperationTable,
};
use crate::z2::Z2Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    Algebra,
    Module,
    Bimodule,
    Homomorphism,
    Pairing,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureKind::Algebra => "algebra",
            StructureKind::Module => "module",
            StructureKind::Bimodule => "bimodule",
            StructureKind::Homomorphism => "homomorphism",
            StructureKind::Pairing => "pairing",
        };
        write!(f, "{s}")
    }
}

/// First failing relation instance, in the deterministic enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub kind: StructureKind,
    pub level: Rational,
    /// `(k, None)` for single-arity families, `(k1, Some(k2))` for split
    /// arities.
    pub arity: (usize, Option<usize>),
    pub tuple: Vec<String>,
    pub residual: Vec<String>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arity = match self.arity {
            (k, None) => format!("{k}"),
            (k1, Some(k2)) => format!("({k1},{k2})"),
        };
        write!(
            f,
            "{} relation fails at level {}, arity {}, tuple ({}): residual {}",
            self.kind,
            format_rational(&self.level),
            arity,
            self.tuple.join(", "),
            self.residual.join(" + "),
        )
    }
}

/// Energy levels below the cutoff, with membership lookup for level splits.
pub(crate) struct LevelSet {
    pub list: Vec<Rational>,
    set: BTreeSet<Rational>,
}

impl LevelSet {
    pub fn of(ctx: &Ctx) -> LevelSet {
        let list = ctx.levels();
        let set = list.iter().copied().collect();
        LevelSet { list, set }
    }

    /// All `(mu, nu)` with `mu + nu = total`, both members.
    pub fn splits(&self, total: Rational) -> Vec<(Rational, Rational)> {
        let mut out = Vec::new();
        for nu in &self.list {
            if *nu > total {
                break;
            }
            let mu = total - nu;
            if self.set.contains(&mu) {
                out.push((mu, *nu));
            }
        }
        out
    }
}

fn names(basis: &Arc<Basis>, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|i| basis.gen_name(*i).to_string()).collect()
}

fn singleton_slots(tuple: &[usize]) -> Vec<Z2Vec> {
    tuple.iter().map(|g| Z2Vec::singleton(*g)).collect()
}

/// Iterator over tuples in lexicographic generator-index order.
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

/// The curved A-infinity relation residual at one (arity, level, tuple):
/// sum over all insertions of an inner operation into the outer one, over
/// all energy splits.
pub(crate) fn algebra_residual(
    table: &GappedOperationTable,
    levels: &LevelSet,
    k: usize,
    level: Rational,
    tuple: &[usize],
) -> Z2Vec {
    let slots = singleton_slots(tuple);
    let mut out = Z2Vec::new();
    for j in 0..=k {
        for s in 0..=(k - j) {
            for (mu, nu) in levels.splits(level) {
                let Some(inner) = table.constant(AritySig::Algebra { k: j }, nu, &tuple[s..s + j])
                else {
                    continue;
                };
                let mut outer: Vec<&Z2Vec> = Vec::with_capacity(k - j + 1);
                outer.extend(slots[..s].iter());
                outer.push(inner);
                outer.extend(slots[s + j..].iter());
                out.add_assign(&table.eval_sets(
                    AritySig::Algebra { k: k - j + 1 },
                    mu,
                    &outer,
                ));
            }
        }
    }
    out
}

/// Checks the curved A-infinity algebra relations at every level below
/// `bound`, every arity up to the completeness cap, every generator tuple.
pub fn check_algebra_relations(
    alg: &FilteredAlgebra,
    bound: Rational,
) -> Result<(), Counterexample> {
    let levels = LevelSet::of(alg.ctx());
    let max_arity = alg.table().max_arity();
    let cap = (2 * max_arity).saturating_sub(1);
    let n = alg.basis().len();
    for level in &levels.list {
        if *level >= bound {
            break;
        }
        for k in 0..=cap {
            for tuple in tuples(n, k) {
                let residual = algebra_residual(alg.table(), &levels, k, *level, &tuple);
                if !residual.is_zero() {
                    return Err(Counterexample {
                        kind: StructureKind::Algebra,
                        level: *level,
                        arity: (k, None),
                        tuple: names(alg.basis(), &tuple),
                        residual: names(alg.basis(), &residual.iter().collect::<Vec<_>>()),
                    });
                }
            }
        }
    }
    Ok(())
}

/// The right-module relation residual at `(k, level, (y, xs))`: the module
/// part composes module operations, the algebra part inserts an algebra
/// operation into the input string (including arity-0 curvature insertions).
pub(crate) fn module_residual(
    module_table: &GappedOperationTable,
    algebra_table: &GappedOperationTable,
    levels: &LevelSet,
    k: usize,
    level: Rational,
    y: usize,
    xs: &[usize],
) -> Z2Vec {
    let slots = singleton_slots(xs);
    let y_slot = Z2Vec::singleton(y);
    let mut out = Z2Vec::new();
    // Module-module part.
    for l in 0..=k {
        for (mu, nu) in levels.splits(level) {
            let mut inner_key = Vec::with_capacity(l + 1);
            inner_key.push(y);
            inner_key.extend_from_slice(&xs[..l]);
            let Some(inner) = module_table.constant(AritySig::Module { k: l }, nu, &inner_key)
            else {
                continue;
            };
            let mut outer: Vec<&Z2Vec> = Vec::with_capacity(k - l + 1);
            outer.push(inner);
            outer.extend(slots[l..].iter());
            out.add_assign(&module_table.eval_sets(
                AritySig::Module { k: k - l },
                mu,
                &outer,
            ));
        }
    }
    // Algebra-insertion part.
    for j in 0..=k {
        for s in 0..=(k - j) {
            for (mu, nu) in levels.splits(level) {
                let Some(inner) =
                    algebra_table.constant(AritySig::Algebra { k: j }, nu, &xs[s..s + j])
                else {
                    continue;
                };
                let mut outer: Vec<&Z2Vec> = Vec::with_capacity(k - j + 2);
                outer.push(&y_slot);
                outer.extend(slots[..s].iter());
                outer.push(inner);
                outer.extend(slots[s + j..].iter());
                out.add_assign(&module_table.eval_sets(
                    AritySig::Module { k: k - j + 1 },
                    mu,
                    &outer,
                ));
            }
        }
    }
    out
}

/// Checks the right-module relations; the underlying algebra must pass its
/// own relations first (its counterexample is reported if not).
pub fn check_module_relations(
    module: &FilteredRightModule,
    bound: Rational,
) -> Result<(), Counterexample> {
    check_algebra_relations(module.algebra(), bound)?;
    let levels = LevelSet::of(module.ctx());
    let max_m = module.table().max_arity();
    let max_a = module.algebra().table().max_arity();
    let cap = (2 * max_m).max((max_m + max_a).saturating_sub(1));
    let nd = module.basis().len();
    let nc = module.algebra().basis().len();
    for level in &levels.list {
        if *level >= bound {
            break;
        }
        for k in 0..=cap {
            for y in 0..nd {
                for xs in tuples(nc, k) {
                    let residual = module_residual(
                        module.table(),
                        module.algebra().table(),
                        &levels,
                        k,
                        *level,
                        y,
                        &xs,
                    );
                    if !residual.is_zero() {
                        let mut tuple = vec![module.basis().gen_name(y).to_string()];
                        tuple.extend(names(module.algebra().basis(), &xs));
                        return Err(Counterexample {
                            kind: StructureKind::Module,
                            level: *level,
                            arity: (k, None),
                            tuple,
                            residual: names(
                                module.basis(),
                                &residual.iter().collect::<Vec<_>>(),
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// The bimodule relation residual at `(k1, k2, level, (us, y, vs))`. The
/// inner bimodule operation consumes the inputs adjacent to `y` (the suffix
/// of the left string and the prefix of the right string); the other two
/// parts insert algebra operations into one of the strings.
#[allow(clippy::too_many_arguments)]
pub(crate) fn bimodule_residual(
    bim: &GappedOperationTable,
    left_alg: &GappedOperationTable,
    right_alg: &GappedOperationTable,
    levels: &LevelSet,
    k1: usize,
    k2: usize,
    level: Rational,
    us: &[usize],
    y: usize,
    vs: &[usize],
) -> Z2Vec {
    let u_slots = singleton_slots(us);
    let v_slots = singleton_slots(vs);
    let y_slot = Z2Vec::singleton(y);
    let mut out = Z2Vec::new();
    // Bimodule-bimodule part: outer takes the first k1o left inputs and the
    // last k2o right inputs.
    for k1o in 0..=k1 {
        let k1i = k1 - k1o;
        for k2i in 0..=k2 {
            let k2o = k2 - k2i;
            for (mu, nu) in levels.splits(level) {
                let mut inner_key = Vec::with_capacity(k1i + k2i + 1);
                inner_key.extend_from_slice(&us[k1o..]);
                inner_key.push(y);
                inner_key.extend_from_slice(&vs[..k2i]);
                let Some(inner) = bim.constant(
                    AritySig::Bimodule {
                        left: k1i,
                        right: k2i,
                    },
                    nu,
                    &inner_key,
                ) else {
                    continue;
                };
                let mut outer: Vec<&Z2Vec> = Vec::with_capacity(k1o + k2o + 1);
                outer.extend(u_slots[..k1o].iter());
                outer.push(inner);
                outer.extend(v_slots[k2i..].iter());
                out.add_assign(&bim.eval_sets(
                    AritySig::Bimodule {
                        left: k1o,
                        right: k2o,
                    },
                    mu,
                    &outer,
                ));
            }
        }
    }
    // Left algebra insertions.
    for j in 0..=k1 {
        for s in 0..=(k1 - j) {
            for (mu, nu) in levels.splits(level) {
                let Some(inner) = left_alg.constant(AritySig::Algebra { k: j }, nu, &us[s..s + j])
                else {
                    continue;
                };
                let mut outer: Vec<&Z2Vec> = Vec::with_capacity(k1 - j + k2 + 2);
                outer.extend(u_slots[..s].iter());
                outer.push(inner);
                outer.extend(u_slots[s + j..].iter());
                outer.push(&y_slot);
                outer.extend(v_slots.iter());
                out.add_assign(&bim.eval_sets(
                    AritySig::Bimodule {
                        left: k1 - j + 1,
                        right: k2,
                    },
                    mu,
                    &outer,
                ));
            }
        }
    }
    // Right algebra insertions.
    for j in 0..=k2 {
        for s in 0..=(k2 - j) {
            for (mu, nu) in levels.splits(level) {
                let Some(inner) =
                    right_alg.constant(AritySig::Algebra { k: j }, nu, &vs[s..s + j])
                else {
                    continue;
                };
                let mut outer: Vec<&Z2Vec> = Vec::with_capacity(k1 + k2 - j + 2);
                outer.extend(u_slots.iter());
                outer.push(&y_slot);
                outer.extend(v_slots[..s].iter());
                outer.push(inner);
                outer.extend(v_slots[s + j..].iter());
                out.add_assign(&bim.eval_sets(
                    AritySig::Bimodule {
                        left: k1,
                        right: k2 - j + 1,
                    },
                    mu,
                    &outer,
                ));
            }
        }
    }
    out
}

/// Checks the bimodule relations; both algebras must pass first.
pub fn check_bimodule_relations(
    bim: &FilteredBimodule,
    bound: Rational,
) -> Result<(), Counterexample> {
    check_algebra_relations(bim.left_algebra(), bound)?;
    check_algebra_relations(bim.right_algebra(), bound)?;
    let levels = LevelSet::of(bim.ctx());
    let (max_l, max_r) = bim.table().max_bimodule_arities();
    let max_a1 = bim.left_algebra().table().max_arity();
    let max_a2 = bim.right_algebra().table().max_arity();
    let cap_l = (2 * max_l).max((max_l + max_a1).saturating_sub(1));
    let cap_r = (2 * max_r).max((max_r + max_a2).saturating_sub(1));
    let np = bim.basis().len();
    let n1 = bim.left_algebra().basis().len();
    let n2 = bim.right_algebra().basis().len();
    for level in &levels.list {
        if *level >= bound {
            break;
        }
        for total in 0..=(cap_l + cap_r) {
            for k1 in 0..=total.min(cap_l) {
                let k2 = total - k1;
                if k2 > cap_r {
                    continue;
                }
                for us in tuples(n1, k1) {
                    for y in 0..np {
                        for vs in tuples(n2, k2) {
                            let residual = bimodule_residual(
                                bim.table(),
                                bim.left_algebra().table(),
                                bim.right_algebra().table(),
                                &levels,
                                k1,
                                k2,
                                *level,
                                &us,
                                y,
                                &vs,
                            );
                            if !residual.is_zero() {
                                let mut tuple = names(bim.left_algebra().basis(), &us);
                                tuple.push(bim.basis().gen_name(y).to_string());
                                tuple.extend(names(bim.right_algebra().basis(), &vs));
                                return Err(Counterexample {
                                    kind: StructureKind::Bimodule,
                                    level: *level,
                                    arity: (k1, Some(k2)),
                                    tuple,
                                    residual: names(
                                        bim.basis(),
                                        &residual.iter().collect::<Vec<_>>(),
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// The homomorphism relation residual at `(k, level, (y, xs))`: target
/// operations applied to components, plus components applied to source
/// operations, plus components with algebra insertions; the three parts sum
/// to zero for a filtered homomorphism.
pub(crate) fn homomorphism_residual(
    phi: &AInftyHomomorphism,
    levels: &LevelSet,
    k: usize,
    level: Rational,
    y: usize,
    xs: &[usize],
) -> Z2Vec {
    let slots = singleton_slots(xs);
    let y_slot = Z2Vec::singleton(y);
    let mut out = Z2Vec::new();
    // Target operations after phi.
    for k2 in 0..=k {
        for (mu, nu) in levels.splits(level) {
            let mut inner_key = Vec::with_capacity(k2 + 1);
            inner_key.push(y);
            inner_key.extend_from_slice(&xs[..k2]);
            let Some(inner) = phi
                .components()
                .constant(AritySig::Module { k: k2 }, nu, &inner_key)
            else {
                continue;
            };
            let mut outer: Vec<&Z2Vec> = Vec::with_capacity(k - k2 + 1);
            outer.push(inner);
            outer.extend(slots[k2..].iter());
            out.add_assign(&phi.target().table().eval_sets(
                AritySig::Module { k: k - k2 },
                mu,
                &outer,
            ));
        }
    }
    // Phi after source operations.
    for k2 in 0..=k {
        for (mu, nu) in levels.splits(level) {
            let mut inner_key = Vec::with_capacity(k2 + 1);
            inner_key.push(y);
            inner_key.extend_from_slice(&xs[..k2]);
            let Some(inner) =
                phi.source()
                    .table()
                    .constant(AritySig::Module { k: k2 }, nu, &inner_key)
            else {
                continue;
            };
            let mut outer: Vec<&Z2Vec> = Vec::with_capacity(k - k2 + 1);
            outer.push(inner);
            outer.extend(slots[k2..].iter());
            out.add_assign(&phi.components().eval_sets(
                AritySig::Module { k: k - k2 },
                mu,
                &outer,
            ));
        }
    }
    // Phi with algebra insertions.
    let alg = phi.source().algebra().table();
    for j in 0..=k {
        for s in 0..=(k - j) {
            for (mu, nu) in levels.splits(level) {
                let Some(inner) = alg.constant(AritySig::Algebra { k: j }, nu, &xs[s..s + j])
                else {
                    continue;
                };
                let mut outer: Vec<&Z2Vec> = Vec::with_capacity(k - j + 2);
                outer.push(&y_slot);
                outer.extend(slots[..s].iter());
                outer.push(inner);
                outer.extend(slots[s + j..].iter());
                out.add_assign(&phi.components().eval_sets(
                    AritySig::Module { k: k - j + 1 },
                    mu,
                    &outer,
                ));
            }
        }
    }
    out
}

/// Checks the homomorphism relation; both modules must pass their module
/// relations first.
pub fn check_homomorphism(
    phi: &AInftyHomomorphism,
    bound: Rational,
) -> Result<(), Counterexample> {
    check_module_relations(phi.source(), bound)?;
    check_module_relations(phi.target(), bound)?;
    let levels = LevelSet::of(phi.ctx());
    let max_phi = phi.components().max_arity();
    let max_m1 = phi.source().table().max_arity();
    let max_m2 = phi.target().table().max_arity();
    let max_a = phi.source().algebra().table().max_arity();
    let cap = (max_phi + max_m1)
        .max(max_phi + max_m2)
        .max((max_phi + max_a).saturating_sub(1));
    let nd = phi.source().basis().len();
    let nc = phi.source().algebra().basis().len();
    for level in &levels.list {
        if *level >= bound {
            break;
        }
        for k in 0..=cap {
            for y in 0..nd {
                for xs in tuples(nc, k) {
                    let residual = homomorphism_residual(phi, &levels, k, *level, y, &xs);
                    if !residual.is_zero() {
                        let mut tuple = vec![phi.source().basis().gen_name(y).to_string()];
                        tuple.extend(names(phi.source().algebra().basis(), &xs));
                        return Err(Counterexample {
                            kind: StructureKind::Homomorphism,
                            level: *level,
                            arity: (k, None),
                            tuple,
                            residual: names(
                                phi.target().basis(),
                                &residual.iter().collect::<Vec<_>>(),
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::Basis;
    use crate::novikov::{Context, DiscreteMonoid};
    use crate::rat::rat_int;
    use crate::structures::{FilteredAlgebra, FilteredRightModule};

    fn ctx_int(cutoff: i64) -> Ctx {
        Context::new(DiscreteMonoid::new([rat_int(1)]).unwrap(), rat_int(cutoff)).unwrap()
    }

    fn fixture_f1() -> (Ctx, std::sync::Arc<FilteredAlgebra>, std::sync::Arc<FilteredRightModule>)
    {
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
        let module = FilteredRightModule::from_named(
            &alg,
            &d,
            &[
                (rat_int(1), "w", &[], &["v"]),
                (zero, "w", &["p"], &["v"]),
                (zero, "w", &["q"], &["w"]),
                (zero, "v", &["q"], &["v"]),
            ],
        )
        .unwrap();
        (ctx, alg, module)
    }

    #[test]
    fn idempotent_algebra_passes() {
        let ctx = ctx_int(2);
        let b = Basis::new("C", ["e"]).unwrap();
        let alg = FilteredAlgebra::from_named(&ctx, &b, &[(rat_int(0), &["e", "e"], &["e"])])
            .unwrap();
        assert!(check_algebra_relations(&alg, rat_int(2)).is_ok());
    }

    #[test]
    fn square_zero_differential_passes_and_flip_fails() {
        let ctx = ctx_int(2);
        let b = Basis::new("C", ["x", "y"]).unwrap();
        let zero = rat_int(0);
        let good =
            FilteredAlgebra::from_named(&ctx, &b, &[(zero, &["x"], &["y"])]).unwrap();
        assert!(check_algebra_relations(&good, rat_int(2)).is_ok());

        let bad = FilteredAlgebra::from_named(
            &ctx,
            &b,
            &[(zero, &["x"], &["y"]), (zero, &["y"], &["x"])],
        )
        .unwrap();
        let ce = check_algebra_relations(&bad, rat_int(2)).unwrap_err();
        assert_eq!(ce.arity, (1, None));
        assert_eq!(ce.level, rat_int(0));
    }

    #[test]
    fn f1_passes_algebra_and_module_relations() {
        let (_, alg, module) = fixture_f1();
        assert!(check_algebra_relations(&alg, rat_int(4)).is_ok());
        assert!(check_module_relations(&module, rat_int(4)).is_ok());
    }

    #[test]
    fn zero_module_passes() {
        let ctx = ctx_int(2);
        let cb = Basis::new("C", ["p"]).unwrap();
        let alg = FilteredAlgebra::new(&ctx, &cb, []).unwrap();
        let db = Basis::new("D", ["w"]).unwrap();
        let module = FilteredRightModule::new(&alg, &db, []).unwrap();
        assert!(check_module_relations(&module, rat_int(2)).is_ok());
    }

    #[test]
    fn corrupted_f1_first_counterexample_is_deterministic() {
        // Replace the level-1 boundary w -> v by w -> w. The earliest
        // violation in enumeration order is at level 1: n_1(n_0(w); p) has a
        // T v term that n_0(n_1(w; p)) no longer cancels.
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
        let module = FilteredRightModule::from_named(
            &alg,
            &d,
            &[
                (rat_int(1), "w", &[], &["w"]),
                (zero, "w", &["p"], &["v"]),
                (zero, "w", &["q"], &["w"]),
                (zero, "v", &["q"], &["v"]),
            ],
        )
        .unwrap();
        let ce = check_module_relations(&module, rat_int(4)).unwrap_err();
        assert_eq!(ce.kind, StructureKind::Module);
        assert_eq!(ce.level, rat_int(1));
        assert_eq!(ce.arity, (1, None));
        assert_eq!(ce.tuple, vec!["w".to_string(), "p".to_string()]);
        assert_eq!(ce.residual, vec!["v".to_string()]);
    }

    #[test]
    fn lone_boundary_corruption_is_caught_at_level_two_arity_zero() {
        // A module whose only operation is the level-1 boundary w -> w fails
        // first at level 2, arity 0, tuple (w): the boundary no longer
        // squares to zero.
        let ctx = ctx_int(4);
        let cb = Basis::new("C", ["p"]).unwrap();
        let alg = FilteredAlgebra::new(&ctx, &cb, []).unwrap();
        let d = Basis::new("D", ["w", "v"]).unwrap();
        let module =
            FilteredRightModule::from_named(&alg, &d, &[(rat_int(1), "w", &[], &["w"])])
                .unwrap();
        let ce = check_module_relations(&module, rat_int(4)).unwrap_err();
        assert_eq!(ce.level, rat_int(2));
        assert_eq!(ce.arity, (0, None));
        assert_eq!(ce.tuple, vec!["w".to_string()]);
        assert_eq!(ce.residual, vec!["w".to_string()]);
    }

    #[test]
    fn arity_cap_catches_inner_inner_violations() {
        // A table with only an arity-3 operation m_3(a,a,a) = a violates the
        // relation only at arity 5 (three m_3-in-m_3 insertions); the cap
        // must reach it.
        let ctx = ctx_int(2);
        let b = Basis::new("C", ["a"]).unwrap();
        let alg = FilteredAlgebra::from_named(
            &ctx,
            &b,
            &[(rat_int(0), &["a", "a", "a"], &["a"])],
        )
        .unwrap();
        let ce = check_algebra_relations(&alg, rat_int(2)).unwrap_err();
        assert_eq!(ce.arity, (5, None));
    }

    #[test]
    fn counterexample_display_is_stable() {
        let ce = Counterexample {
            kind: StructureKind::Module,
            level: rat_int(2),
            arity: (0, None),
            tuple: vec!["w".into()],
            residual: vec!["w".into()],
        };
        assert_eq!(
            ce.to_string(),
            "module relation fails at level 2, arity 0, tuple (w): residual w"
        );
    }
}
