//! Deformation machinery: twisting structures by elements of positive
//! valuation, realized twisted differentials, the unit-defect identity of
//! curved algebras, opposite algebras, and homomorphisms with deformation
//! insertions.
//!
//! Twisting inserts copies of a gapped element `b` of positive valuation
//! into the input string of every operation. Each inserted copy carries
//! energy at least the smallest positive monoid level, so only finitely
//! many insertions survive below the cutoff and all sums here are finite.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::lincomb::{Element, LinearMap};
use crate::mc::verify_mc;
use crate::rat::Rational;
use crate::relations::check_homomorphism;
use crate::structures::{
    validate_deformation, AInftyHomomorphism, AinftyError, AritySig, FilteredAlgebra,
    FilteredBimodule, FilteredRightModule, GappedOperationTable, OpKey,
};
use crate::z2::Z2Vec;

/// Exponent lists of `b`'s coefficients at the given generator positions;
/// `None` when some position has zero coefficient (no fill possible).
fn fill_exponents(b: &Element, gens: &[usize]) -> Option<Vec<Vec<Rational>>> {
    let mut out = Vec::with_capacity(gens.len());
    for g in gens {
        let s = b.coeff(*g)?;
        out.push(s.exponents().copied().collect());
    }
    Some(out)
}

/// Z/2 parities of total inserted energy over all ways of picking one
/// exponent per filled slot, pruned at `budget`.
fn fill_parities(b: &Element, gens: &[usize], budget: Rational) -> BTreeMap<Rational, bool> {
    let mut out = BTreeMap::new();
    let Some(exps) = fill_exponents(b, gens) else {
        return out;
    };
    fn rec(
        exps: &[Vec<Rational>],
        acc: Rational,
        budget: Rational,
        out: &mut BTreeMap<Rational, bool>,
    ) {
        if acc >= budget {
            return;
        }
        match exps.split_first() {
            None => {
                let p = out.entry(acc).or_insert(false);
                *p = !*p;
            }
            Some((first, rest)) => {
                for e in first {
                    rec(rest, acc + e, budget, out);
                }
            }
        }
    }
    rec(&exps, Rational::from_integer(0), budget, &mut out);
    out.retain(|_, p| *p);
    out
}

/// Enumerates order-preserving choices of `keep` kept positions out of
/// `total`, as sorted index vectors.
fn kept_subsets(total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(1 << total);
    for mask in 0u32..(1 << total) {
        out.push((0..total).filter(|i| mask >> i & 1 == 1).collect());
    }
    out
}

fn twist_algebra_table(
    alg: &FilteredAlgebra,
    b: &Element,
) -> Result<GappedOperationTable, AinftyError> {
    let cutoff = alg.ctx().cutoff();
    let mut table = GappedOperationTable::new();
    for (key, out) in alg.table().entries() {
        let AritySig::Algebra { k } = key.sig else { continue };
        for kept in kept_subsets(k) {
            let filled: Vec<usize> = (0..k)
                .filter(|i| !kept.contains(i))
                .map(|i| key.inputs[i])
                .collect();
            let budget = cutoff - key.level;
            for (extra, _) in fill_parities(b, &filled, budget) {
                table.xor_entry(
                    OpKey {
                        level: key.level + extra,
                        sig: AritySig::Algebra { k: kept.len() },
                        inputs: kept.iter().map(|i| key.inputs[*i]).collect(),
                    },
                    out,
                );
            }
        }
    }
    Ok(table)
}

/// The twisted algebra `m^b`: every operation summed over all insertions of
/// `b` between and around its inputs. If `b` satisfies the Maurer-Cartan
/// equation the twisted curvature vanishes.
pub fn twist_algebra(
    alg: &Arc<FilteredAlgebra>,
    b: &Element,
) -> Result<Arc<FilteredAlgebra>, AinftyError> {
    validate_deformation(b)?;
    if alg.has_level_zero_curvature() {
        return Err(AinftyError::LevelZeroCurvature);
    }
    let table = twist_algebra_table(alg, b)?;
    Ok(FilteredAlgebra::from_table(alg.ctx(), alg.basis(), table))
}

/// The twisted right module over the twisted algebra: `b` is inserted into
/// the algebra-input string only (the module input `y` stays leftmost).
pub fn twist_module(
    module: &Arc<FilteredRightModule>,
    b: &Element,
) -> Result<Arc<FilteredRightModule>, AinftyError> {
    let twisted_alg = twist_algebra(module.algebra(), b)?;
    let cutoff = module.ctx().cutoff();
    let mut table = GappedOperationTable::new();
    for (key, out) in module.table().entries() {
        let AritySig::Module { k } = key.sig else { continue };
        let xs = &key.inputs[1..];
        for kept in kept_subsets(k) {
            let filled: Vec<usize> = (0..k)
                .filter(|i| !kept.contains(i))
                .map(|i| xs[i])
                .collect();
            let budget = cutoff - key.level;
            for (extra, _) in fill_parities(b, &filled, budget) {
                let mut inputs = vec![key.inputs[0]];
                inputs.extend(kept.iter().map(|i| xs[*i]));
                table.xor_entry(
                    OpKey {
                        level: key.level + extra,
                        sig: AritySig::Module { k: kept.len() },
                        inputs,
                    },
                    out,
                );
            }
        }
    }
    Ok(FilteredRightModule::from_table(
        &twisted_alg,
        module.basis(),
        table,
    ))
}

/// The two-sided twisted bimodule over the pair of twisted algebras: `b1`
/// into the left string, `b2` into the right string.
pub fn twist_bimodule(
    bim: &Arc<FilteredBimodule>,
    b1: &Element,
    b2: &Element,
) -> Result<Arc<FilteredBimodule>, AinftyError> {
    let left = twist_algebra(bim.left_algebra(), b1)?;
    let right = twist_algebra(bim.right_algebra(), b2)?;
    let cutoff = bim.ctx().cutoff();
    let mut table = GappedOperationTable::new();
    for (key, out) in bim.table().entries() {
        let AritySig::Bimodule { left: l, right: r } = key.sig else {
            continue;
        };
        let us = &key.inputs[..l];
        let y = key.inputs[l];
        let vs = &key.inputs[l + 1..];
        for kept_l in kept_subsets(l) {
            let filled_l: Vec<usize> = (0..l)
                .filter(|i| !kept_l.contains(i))
                .map(|i| us[i])
                .collect();
            let budget_l = cutoff - key.level;
            for (extra_l, _) in fill_parities(b1, &filled_l, budget_l) {
                for kept_r in kept_subsets(r) {
                    let filled_r: Vec<usize> = (0..r)
                        .filter(|i| !kept_r.contains(i))
                        .map(|i| vs[i])
                        .collect();
                    let budget_r = cutoff - key.level - extra_l;
                    for (extra_r, _) in fill_parities(b2, &filled_r, budget_r) {
                        let mut inputs: Vec<usize> =
                            kept_l.iter().map(|i| us[*i]).collect();
                        inputs.push(y);
                        inputs.extend(kept_r.iter().map(|i| vs[*i]));
                        table.xor_entry(
                            OpKey {
                                level: key.level + extra_l + extra_r,
                                sig: AritySig::Bimodule {
                                    left: kept_l.len(),
                                    right: kept_r.len(),
                                },
                                inputs,
                            },
                            out,
                        );
                    }
                }
            }
        }
    }
    Ok(FilteredBimodule::from_table(
        &left,
        &right,
        bim.basis(),
        table,
    ))
}

/// The raw twisted boundary `y -> sum_k n_k(y; b, ..., b)` as a matrix,
/// without Maurer-Cartan certification. Crate-internal building block.
pub(crate) fn twisted_boundary_raw(
    module: &FilteredRightModule,
    b: &Element,
) -> Result<LinearMap, AinftyError> {
    validate_deformation(b)?;
    let ctx = module.ctx();
    let cutoff = ctx.cutoff();
    let mut m = LinearMap::zero(ctx, module.basis(), module.basis());
    for (key, out) in module.table().entries() {
        let AritySig::Module { .. } = key.sig else { continue };
        let y = key.inputs[0];
        let budget = cutoff - key.level;
        for (extra, _) in fill_parities(b, &key.inputs[1..], budget) {
            let s = crate::novikov::Scalar::monomial(ctx, key.level + extra)
                .expect("below cutoff");
            for g in out.iter() {
                m.add_entry(g, y, s.clone()).map_err(AinftyError::Lincomb)?;
            }
        }
    }
    Ok(m)
}

/// The twisted differential `d^b` of a right module, certified: `b` must
/// satisfy the Maurer-Cartan equation for the module's algebra below the
/// cutoff, which makes `d^b ∘ d^b = 0` exact below the cutoff.
pub fn twisted_differential(
    module: &FilteredRightModule,
    b: &Element,
) -> Result<LinearMap, AinftyError> {
    let cutoff = module.ctx().cutoff();
    verify_mc(module.algebra(), b, cutoff).map_err(|e| match e {
        crate::mc::McError::Residual { level, residual } => AinftyError::MaurerCartan {
            level,
            residual,
        },
        crate::mc::McError::Ainfty(e) => e,
        other => AinftyError::RelationsFailed(other.to_string()),
    })?;
    twisted_boundary_raw(module, b)
}

/// The raw two-sided twisted boundary of a bimodule.
pub(crate) fn bimodule_boundary_raw(
    bim: &FilteredBimodule,
    b1: &Element,
    b2: &Element,
) -> Result<LinearMap, AinftyError> {
    validate_deformation(b1)?;
    validate_deformation(b2)?;
    let ctx = bim.ctx();
    let cutoff = ctx.cutoff();
    let mut m = LinearMap::zero(ctx, bim.basis(), bim.basis());
    for (key, out) in bim.table().entries() {
        let AritySig::Bimodule { left, .. } = key.sig else { continue };
        let y = key.inputs[left];
        let budget = cutoff - key.level;
        for (extra_l, _) in fill_parities(b1, &key.inputs[..left], budget) {
            for (extra_r, _) in
                fill_parities(b2, &key.inputs[left + 1..], budget - extra_l)
            {
                let s = crate::novikov::Scalar::monomial(ctx, key.level + extra_l + extra_r)
                    .expect("below cutoff");
                for g in out.iter() {
                    m.add_entry(g, y, s.clone()).map_err(AinftyError::Lincomb)?;
                }
            }
        }
    }
    Ok(m)
}

/// The pair differential `delta_{b1,b2}(y) = sum n_{k1,k2}(b1..; y; ..b2)`,
/// certified against both Maurer-Cartan equations. Its homology is the
/// Floer homology of the pair.
pub fn bimodule_twisted_differential(
    bim: &FilteredBimodule,
    b1: &Element,
    b2: &Element,
) -> Result<LinearMap, AinftyError> {
    let cutoff = bim.ctx().cutoff();
    for (alg, b) in [(bim.left_algebra(), b1), (bim.right_algebra(), b2)] {
        verify_mc(alg, b, cutoff).map_err(|e| match e {
            crate::mc::McError::Residual { level, residual } => AinftyError::MaurerCartan {
                level,
                residual,
            },
            crate::mc::McError::Ainfty(e) => e,
            other => AinftyError::RelationsFailed(other.to_string()),
        })?;
    }
    bimodule_boundary_raw(bim, b1, b2)
}

/// Checks that `e` is a strict unit for the level-0 product.
fn check_strict_unit(alg: &FilteredAlgebra, e: usize) -> Result<(), AinftyError> {
    let zero = Rational::from_integer(0);
    for x in 0..alg.basis().len() {
        let expect = Z2Vec::singleton(x);
        for tuple in [[e, x], [x, e]] {
            let got = alg
                .table()
                .constant(AritySig::Algebra { k: 2 }, zero, &tuple)
                .cloned()
                .unwrap_or_default();
            if got != expect {
                return Err(AinftyError::NotAUnit(alg.basis().gen_name(e).to_string()));
            }
        }
    }
    Ok(())
}

/// Both sides of the unit-defect identity of a curved algebra with a strict
/// unit: the would-be right-module relation for `n_k(y; xs) := m_{k+1}(y,
/// xs)` does not vanish, and its defect equals `m_{k+2}(m_0, y, xs)`.
///
/// Returns `(relation value, defect)`; the two are equal component-wise at
/// every level for any algebra passing its relations.
pub fn unit_defect(
    alg: &Arc<FilteredAlgebra>,
    unit: &str,
    y: &str,
    xs: &[&str],
) -> Result<(Element, Element), AinftyError> {
    let cutoff = alg.ctx().cutoff();
    crate::relations::check_algebra_relations(alg, cutoff)
        .map_err(|ce| AinftyError::RelationsFailed(ce.to_string()))?;
    let e = alg.basis().index_of(unit).map_err(AinftyError::Lincomb)?;
    check_strict_unit(alg, e)?;

    let ctx = alg.ctx();
    let basis = alg.basis();
    let gen = |name: &str| Element::generator(ctx, basis, name).map_err(AinftyError::Lincomb);
    let y_el = gen(y)?;
    let x_els: Vec<Element> = xs.iter().map(|n| gen(n)).collect::<Result<_, _>>()?;
    let k = x_els.len();

    // Diagonal module action: n_j(z; ws) := m_{j+1}(z, ws).
    let diag = |z: &Element, ws: &[Element]| -> Result<Element, AinftyError> {
        let mut args = Vec::with_capacity(ws.len() + 1);
        args.push(z.clone());
        args.extend_from_slice(ws);
        alg.eval(&args)
    };

    let mut lhs = Element::zero(ctx, basis);
    // Module-module part of the would-be relation.
    for l in 0..=k {
        let inner = diag(&y_el, &x_els[..l])?;
        let outer = diag(&inner, &x_els[l..])?;
        lhs = lhs.add(&outer).map_err(AinftyError::Lincomb)?;
    }
    // Algebra-insertion part, including arity-0 curvature insertions.
    let max_arity = alg.table().max_arity();
    for j in 0..=k.min(max_arity) {
        for s in 0..=(k - j) {
            let inner = alg.eval(&x_els[s..s + j])?;
            if inner.is_zero() {
                continue;
            }
            let mut args = Vec::with_capacity(k - j + 2);
            args.push(y_el.clone());
            args.extend_from_slice(&x_els[..s]);
            args.push(inner);
            args.extend_from_slice(&x_els[s + j..]);
            lhs = lhs.add(&alg.eval(&args)?).map_err(AinftyError::Lincomb)?;
        }
    }

    // Defect: m_{k+2}(m_0, y, xs).
    let mut args = Vec::with_capacity(k + 2);
    args.push(alg.curvature());
    args.push(y_el);
    args.extend_from_slice(&x_els);
    let rhs = alg.eval(&args)?;
    Ok((lhs, rhs))
}

/// The opposite algebra: every operation with its input tuple reversed. An
/// involution, and it passes the algebra relations exactly when the
/// original does.
pub fn opposite_algebra(alg: &Arc<FilteredAlgebra>) -> Arc<FilteredAlgebra> {
    let mut table = GappedOperationTable::new();
    for (key, out) in alg.table().entries() {
        let mut inputs = key.inputs.clone();
        inputs.reverse();
        table.xor_entry(
            OpKey {
                level: key.level,
                sig: key.sig,
                inputs,
            },
            out,
        );
    }
    FilteredAlgebra::from_table(alg.ctx(), alg.basis(), table)
}

/// Realizes `phi^b(y) = sum_k phi_k(y; b, ..., b)` as a matrix and verifies
/// the chain-map identity `d^b_target ∘ phi^b = phi^b ∘ d^b_source` below
/// the cutoff. A nonzero residual signals invalid input certification.
pub fn realize_phi_b(
    phi: &AInftyHomomorphism,
    b: &Element,
) -> Result<LinearMap, AinftyError> {
    let cutoff = phi.ctx().cutoff();
    check_homomorphism(phi, cutoff).map_err(|ce| AinftyError::RelationsFailed(ce.to_string()))?;
    verify_mc(phi.source().algebra(), b, cutoff).map_err(|e| match e {
        crate::mc::McError::Residual { level, residual } => AinftyError::MaurerCartan {
            level,
            residual,
        },
        crate::mc::McError::Ainfty(e) => e,
        other => AinftyError::RelationsFailed(other.to_string()),
    })?;

    let ctx = phi.ctx();
    let mut m = LinearMap::zero(ctx, phi.source().basis(), phi.target().basis());
    for (key, out) in phi.components().entries() {
        let AritySig::Module { .. } = key.sig else { continue };
        let y = key.inputs[0];
        let budget = ctx.cutoff() - key.level;
        for (extra, _) in fill_parities(b, &key.inputs[1..], budget) {
            let s = crate::novikov::Scalar::monomial(ctx, key.level + extra)
                .expect("below cutoff");
            for g in out.iter() {
                m.add_entry(g, y, s.clone()).map_err(AinftyError::Lincomb)?;
            }
        }
    }

    let d_src = twisted_boundary_raw(phi.source(), b)?;
    let d_tgt = twisted_boundary_raw(phi.target(), b)?;
    let residual = d_tgt
        .compose(&m)
        .and_then(|a| m.compose(&d_src).and_then(|c| a.add(&c)))
        .map_err(AinftyError::Lincomb)?;
    if !residual.is_zero() {
        let level = residual
            .entries()
            .filter_map(|(_, _, s)| s.val().finite())
            .min()
            .expect("nonzero map has a finite valuation");
        return Err(AinftyError::ChainMapResidual(level));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::Basis;
    use crate::novikov::{Context, DiscreteMonoid, Scalar};
    use crate::rat::rat_int;
    use crate::relations::{check_algebra_relations, check_module_relations};
    use crate::structures::{FilteredAlgebra, FilteredRightModule};

    fn ctx_int(cutoff: i64) -> crate::novikov::Ctx {
        Context::new(DiscreteMonoid::new([rat_int(1)]).unwrap(), rat_int(cutoff)).unwrap()
    }

    fn fixture_f1() -> (
        crate::novikov::Ctx,
        Arc<FilteredAlgebra>,
        Arc<FilteredRightModule>,
    ) {
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

    fn t_times(ctx: &crate::novikov::Ctx, basis: &Arc<Basis>, name: &str) -> Element {
        let i = basis.index_of(name).unwrap();
        Element::from_terms(
            ctx,
            basis,
            [(i, Scalar::monomial(ctx, rat_int(1)).unwrap())],
        )
        .unwrap()
    }

    #[test]
    fn twist_by_zero_is_identity_on_tables() {
        let (ctx, alg, module) = fixture_f1();
        let zero = Element::zero(&ctx, alg.basis());
        let twisted = twist_algebra(&alg, &zero).unwrap();
        assert_eq!(twisted.table(), alg.table());
        let tm = twist_module(&module, &zero).unwrap();
        assert_eq!(tm.table(), module.table());
    }

    #[test]
    fn twisted_curvature_vanishes_for_mc_element() {
        let (ctx, alg, _) = fixture_f1();
        // b = T p: m_0^b = T^2 m_{2,0}(p,p) = 0 in F1.
        let b = t_times(&ctx, alg.basis(), "p");
        let twisted = twist_algebra(&alg, &b).unwrap();
        assert!(twisted.curvature().is_zero());
        assert!(check_algebra_relations(&twisted, rat_int(4)).is_ok());
    }

    #[test]
    fn twisted_curvature_appears_for_non_mc_element() {
        let (ctx, alg, _) = fixture_f1();
        // b = T q: m_2(b, b) = T^2 q.
        let b = t_times(&ctx, alg.basis(), "q");
        let twisted = twist_algebra(&alg, &b).unwrap();
        let expect = Element::from_terms(
            &ctx,
            alg.basis(),
            [(1, Scalar::monomial(&ctx, rat_int(2)).unwrap())],
        )
        .unwrap();
        assert_eq!(twisted.curvature(), expect);
        // Twisting preserves the relations even off the Maurer-Cartan locus.
        assert!(check_algebra_relations(&twisted, rat_int(4)).is_ok());
    }

    #[test]
    fn twisted_module_stays_valid() {
        let (ctx, alg, module) = fixture_f1();
        let b = t_times(&ctx, alg.basis(), "q");
        let tm = twist_module(&module, &b).unwrap();
        assert!(check_module_relations(&tm, rat_int(4)).is_ok());
    }

    #[test]
    fn twist_rejects_valuation_zero_elements() {
        let (ctx, alg, _) = fixture_f1();
        let bad = Element::generator(&ctx, alg.basis(), "p").unwrap();
        assert!(matches!(
            twist_algebra(&alg, &bad),
            Err(AinftyError::NotPositiveValuation)
        ));
    }

    #[test]
    fn twisted_differential_on_f1_is_zero_for_b() {
        let (ctx, alg, module) = fixture_f1();
        let b = t_times(&ctx, alg.basis(), "p");
        let d = twisted_differential(&module, &b).unwrap();
        // d^b(w) = T v + T v = 0, d^b(v) = 0.
        assert!(d.is_zero());
    }

    #[test]
    fn twisted_differential_rejects_non_mc() {
        let (ctx, alg, module) = fixture_f1();
        let b = t_times(&ctx, alg.basis(), "q");
        let err = twisted_differential(&module, &b).unwrap_err();
        match err {
            AinftyError::MaurerCartan { level, .. } => assert_eq!(level, rat_int(2)),
            other => panic!("expected Maurer-Cartan rejection, got {other}"),
        }
    }

    #[test]
    fn bare_differential_is_arity_zero_part() {
        let (ctx, alg, module) = fixture_f1();
        let zero = Element::zero(&ctx, alg.basis());
        let d0 = twisted_differential(&module, &zero).unwrap();
        let w = module.basis().index_of("w").unwrap();
        let v = module.basis().index_of("v").unwrap();
        assert_eq!(
            d0.entry(v, w),
            Some(&Scalar::monomial(&ctx, rat_int(1)).unwrap())
        );
        assert_eq!(d0.entries().count(), 1);
    }

    #[test]
    fn opposite_is_involution_and_preserves_verdict() {
        let (_, alg, _) = fixture_f1();
        let op = opposite_algebra(&alg);
        let opop = opposite_algebra(&op);
        assert_eq!(opop.table(), alg.table());
        // m^op_{2,0}(q,p) = m_{2,0}(p,q) = p.
        let zero = rat_int(0);
        let q = alg.basis().index_of("q").unwrap();
        let p = alg.basis().index_of("p").unwrap();
        assert_eq!(
            op.table()
                .constant(AritySig::Algebra { k: 2 }, zero, &[q, p]),
            Some(&Z2Vec::singleton(p))
        );
        assert_eq!(
            check_algebra_relations(&alg, rat_int(4)).is_ok(),
            check_algebra_relations(&op, rat_int(4)).is_ok(),
        );
    }

    #[test]
    fn unit_defect_vanishes_without_curvature() {
        let (_, alg, _) = fixture_f1();
        // q is the strict unit of F1's algebra; m_0 = 0.
        let (lhs, rhs) = unit_defect(&alg, "q", "p", &["p", "q"]).unwrap();
        assert!(lhs.is_zero());
        assert!(rhs.is_zero());
    }

    #[test]
    fn unit_defect_matches_curvature_insertion() {
        // Twist F1's algebra by T q to create genuine curvature, then check
        // the defect identity on a few tuples.
        let (ctx, alg, _) = fixture_f1();
        let b = t_times(&ctx, alg.basis(), "q");
        let twisted = twist_algebra(&alg, &b).unwrap();
        assert!(!twisted.curvature().is_zero());
        for y in ["p", "q"] {
            for xs in [&[][..], &["p"][..], &["q", "p"][..]] {
                let (lhs, rhs) = unit_defect(&twisted, "q", y, xs).unwrap();
                assert_eq!(lhs, rhs, "unit defect mismatch at y={y}, xs={xs:?}");
            }
        }
    }

    #[test]
    fn identity_phi_b_is_identity() {
        let (ctx, alg, module) = fixture_f1();
        let phi = AInftyHomomorphism::identity(&module);
        let zero = Element::zero(&ctx, alg.basis());
        let m = realize_phi_b(&phi, &zero).unwrap();
        assert_eq!(m, LinearMap::identity(&ctx, module.basis()));
        let b = t_times(&ctx, alg.basis(), "p");
        let mb = realize_phi_b(&phi, &b).unwrap();
        assert_eq!(mb, LinearMap::identity(&ctx, module.basis()));
    }
}
