//! The bounding-cochain machinery: cyclic-element certificates, the
//! order-by-order solver, the exhaustive uniqueness oracle, and
//! Maurer-Cartan verification.
//!
//! For a gapped right module with a cyclic element `1`, the equation
//! `d^b(1) = 0` determines a unique gapped `b` of positive valuation: the
//! coefficient of each energy level `l_n` reads
//!
//! `n_{1,0}(1_0; b_n) + sum n_{k,m}(1_{n_0}; b_{n_1}, ..., b_{n_k}) = 0`
//!
//! with the sum over all decompositions `l_n = l_m + l_{n_0} + sum l_{n_i}`
//! other than the extracted leading term. Every `b`-index in the sum is a
//! previously solved level (a term with an index equal to `l_n` would need
//! all other energies zero, which is exactly the extracted term, since `b`
//! has no level-0 part), so iterating over already-solved components is
//! itself the structural exclusion of the leading term and the recursion is
//! well founded. Each `b_n` is recovered through the inverse of the residue
//! leading map `x -> n_{1,0}(1_0; x)`.
//!
//! The solved `b` satisfies the Maurer-Cartan equation below the bound;
//! this is re-verified numerically after the solve, as is `d^b(1) = 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lincomb::Element;
use crate::novikov::{Scalar, Valuation};
use crate::rat::{format_rational, Rational};
use crate::relations::check_module_relations;
use crate::structures::{
    validate_deformation, AinftyError, AritySig, FilteredAlgebra, FilteredRightModule,
};
use crate::twist::twisted_boundary_raw;
use crate::z2::{Z2Matrix, Z2Vec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McError {
    #[error(transparent)]
    Ainfty(#[from] AinftyError),
    #[error("module relations fail: {0}")]
    Relations(String),
    #[error("not a cyclic element: the residue leading map x -> n_(1,0)(1_0; x) is singular")]
    NotCyclic,
    #[error("cyclic condition (2) fails: n_0(1) has a level-0 part")]
    PositiveBoundaryCondition,
    #[error("Maurer-Cartan residual at level {}: {residual}", format_rational(.level))]
    Residual { level: Rational, residual: String },
    #[error("d^b(1) fails to vanish at level {}", format_rational(.0))]
    CyclicEquationResidual(Rational),
    #[error("solver inconsistency (stale certificate): {0}")]
    Inconsistent(String),
    #[error("enumeration budget exceeded: needs {required} candidates, budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
}

/// A certified cyclic element: the module passes its relations, the residue
/// leading map is invertible over Z/2, and `n_0(1)` has positive valuation.
#[derive(Debug, Clone)]
pub struct CyclicElementCertificate {
    module: Arc<FilteredRightModule>,
    one: Element,
    leading_inverse: Z2Matrix,
}

impl CyclicElementCertificate {
    pub fn module(&self) -> &Arc<FilteredRightModule> {
        &self.module
    }

    pub fn one(&self) -> &Element {
        &self.one
    }

    pub fn leading_inverse(&self) -> &Z2Matrix {
        &self.leading_inverse
    }
}

/// Builds a cyclic-element certificate, checking both defining conditions.
pub fn certify_cyclic(
    module: &Arc<FilteredRightModule>,
    one: &Element,
) -> Result<CyclicElementCertificate, McError> {
    let cutoff = module.ctx().cutoff();
    check_module_relations(module, cutoff).map_err(|ce| McError::Relations(ce.to_string()))?;

    let zero = Rational::from_integer(0);
    let one0 = one.residue_at(zero);
    let nc = module.algebra().basis().len();
    let nd = module.basis().len();
    let mut leading = Z2Matrix::zero(nd, nc);
    for x in 0..nc {
        let image = module.table().eval_sets(
            AritySig::Module { k: 1 },
            zero,
            &[&one0, &Z2Vec::singleton(x)],
        );
        for r in image.iter() {
            leading.toggle(r, x);
        }
    }
    let leading_inverse = leading.inverse().ok_or(McError::NotCyclic)?;

    let n0_one = module.eval(one, &[]).map_err(McError::Ainfty)?;
    if !n0_one.is_positive_valuation() {
        return Err(McError::PositiveBoundaryCondition);
    }

    Ok(CyclicElementCertificate {
        module: Arc::clone(module),
        one: one.clone(),
        leading_inverse,
    })
}

/// A solved bounding cochain together with the bound below which it is
/// certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundingCochain {
    pub value: Element,
    pub certified_cutoff: Rational,
}

/// Level-by-level record of the solve, in a stable text format.
#[derive(Debug, Clone, Default)]
pub struct SolveTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub level: Rational,
    pub forcing: Vec<String>,
    pub solved: Vec<String>,
}

impl fmt::Display for SolveTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            let forcing = if step.forcing.is_empty() {
                "0".to_string()
            } else {
                step.forcing.join(" + ")
            };
            let solved = if step.solved.is_empty() {
                "0".to_string()
            } else {
                step.solved.join(" + ")
            };
            writeln!(
                f,
                "level {}: forcing = {}; b = {}",
                format_rational(&step.level),
                forcing,
                solved
            )?;
        }
        Ok(())
    }
}

/// Solves `d^b(1) = 0` for the unique gapped bounding cochain below `bound`.
pub fn solve_bounding_cochain(
    cert: &CyclicElementCertificate,
    bound: Rational,
) -> Result<(BoundingCochain, SolveTrace), McError> {
    let module = &cert.module;
    let ctx = module.ctx();
    let levels = ctx.monoid().levels_below(bound.min(ctx.cutoff()));

    // Gapped components of 1, by level.
    let mut one_parts: BTreeMap<Rational, Z2Vec> = BTreeMap::new();
    for level in ctx.levels() {
        let part = cert.one.residue_at(level);
        if !part.is_zero() {
            one_parts.insert(level, part);
        }
    }

    let mut solved: BTreeMap<Rational, Z2Vec> = BTreeMap::new();
    let mut trace = SolveTrace::default();
    for level in levels.iter().copied().filter(|l| *l > Rational::from_integer(0)) {
        let forcing = forcing_sum(module, &one_parts, &solved, level);
        let b_n = cert.leading_inverse.mul_vec(&forcing);
        trace.steps.push(TraceStep {
            level,
            forcing: forcing
                .iter()
                .map(|g| module.basis().gen_name(g).to_string())
                .collect(),
            solved: b_n
                .iter()
                .map(|g| module.algebra().basis().gen_name(g).to_string())
                .collect(),
        });
        if !b_n.is_zero() {
            solved.insert(level, b_n);
        }
    }

    let alg_basis = module.algebra().basis();
    let mut terms = Vec::new();
    for (level, gens) in &solved {
        for g in gens.iter() {
            terms.push((g, Scalar::monomial(ctx, *level).map_err(AinftyError::Novikov)?));
        }
    }
    let value = Element::from_terms(ctx, alg_basis, terms)
        .map_err(|e| McError::Ainfty(AinftyError::Lincomb(e)))?;

    // Post-certification: the Maurer-Cartan equation and d^b(1) = 0 must
    // hold below the bound; failure means the certificate went stale.
    verify_mc(module.algebra(), &value, bound).map_err(|e| match e {
        McError::Residual { level, residual } => {
            McError::Inconsistent(format!("Maurer-Cartan residual at level {level}: {residual}"))
        }
        other => other,
    })?;
    let d_b = twisted_boundary_raw(module, &value)?;
    let residual = d_b.apply(&cert.one).map_err(AinftyError::Lincomb)?;
    if let Valuation::Finite(v) = residual.val() {
        if v < bound {
            return Err(McError::Inconsistent(format!(
                "d^b(1) residual at level {}",
                format_rational(&v)
            )));
        }
    }

    Ok((
        BoundingCochain {
            value,
            certified_cutoff: bound,
        },
        trace,
    ))
}

/// The forcing sum at `target`: every module constant evaluated on a level
/// component of `1` and already-solved components of `b`, over all exact
/// energy decompositions. Iterating over solved components only is the
/// structural exclusion of the leading term: a decomposition using the
/// not-yet-solved level would force every other energy to zero, which is
/// the extracted `n_{1,0}(1_0; b_n)` itself.
fn forcing_sum(
    module: &FilteredRightModule,
    one_parts: &BTreeMap<Rational, Z2Vec>,
    solved: &BTreeMap<Rational, Z2Vec>,
    target: Rational,
) -> Z2Vec {
    let mut out = Z2Vec::new();
    for (key, val) in module.table().entries() {
        let AritySig::Module { k } = key.sig else { continue };
        if key.level > target {
            continue;
        }
        let y = key.inputs[0];
        let xs = &key.inputs[1..];
        for (nu, one_part) in one_parts {
            if !one_part.contains(y) {
                continue;
            }
            let remaining = target - key.level - nu;
            if remaining < Rational::from_integer(0) {
                continue;
            }
            let parity = filled_parity(xs, solved, remaining);
            if parity {
                // The extracted leading term (arity 1, level 0, 1_0-slot,
                // b at the target level) cannot appear here: the target
                // level is not yet in `solved`.
                debug_assert!(!(k == 1 && remaining == target && solved.contains_key(&target)));
                out.add_assign(val);
            }
        }
    }
    out
}

/// Parity of the number of ways to assign a solved level of `b` to each
/// slot so that coefficients are present and the levels sum to `total`.
fn filled_parity(
    xs: &[usize],
    solved: &BTreeMap<Rational, Z2Vec>,
    total: Rational,
) -> bool {
    match xs.split_first() {
        None => total == Rational::from_integer(0),
        Some((first, rest)) => {
            let mut parity = false;
            for (level, gens) in solved {
                if *level > total {
                    break;
                }
                if gens.contains(*first) && filled_parity(rest, solved, total - level) {
                    parity = !parity;
                }
            }
            parity
        }
    }
}

/// Verifies the Maurer-Cartan equation `sum_k m_k(b, ..., b) = 0` at every
/// level below `bound`, reporting the first nonzero residual. Level-0
/// arity-0 curvature is rejected here naturally: it is the level-0 residual.
pub fn verify_mc(
    alg: &FilteredAlgebra,
    b: &Element,
    bound: Rational,
) -> Result<(), McError> {
    validate_deformation(b)?;
    let mut residuals: BTreeMap<Rational, Z2Vec> = BTreeMap::new();
    for (key, out) in alg.table().entries() {
        let AritySig::Algebra { .. } = key.sig else { continue };
        // Parities of total fill energy over choices of one exponent of the
        // matching coefficient of b per slot.
        let mut level_parities: BTreeMap<Rational, bool> = BTreeMap::new();
        collect_fill_parities(
            b,
            &key.inputs,
            bound - key.level,
            Rational::from_integer(0),
            &mut level_parities,
        );
        for (extra, parity) in level_parities {
            if parity {
                let slot = residuals.entry(key.level + extra).or_default();
                slot.add_assign(out);
            }
        }
    }
    for (level, residual) in residuals {
        if level < bound && !residual.is_zero() {
            let names: Vec<String> = residual
                .iter()
                .map(|g| alg.basis().gen_name(g).to_string())
                .collect();
            return Err(McError::Residual {
                level,
                residual: names.join(" + "),
            });
        }
    }
    Ok(())
}

fn collect_fill_parities(
    b: &Element,
    gens: &[usize],
    budget: Rational,
    acc: Rational,
    out: &mut BTreeMap<Rational, bool>,
) {
    if acc >= budget {
        return;
    }
    match gens.split_first() {
        None => {
            let p = out.entry(acc).or_insert(false);
            *p = !*p;
        }
        Some((first, rest)) => {
            let Some(s) = b.coeff(*first) else { return };
            for e in s.exponents() {
                collect_fill_parities(b, rest, budget, acc + e, out);
            }
        }
    }
}

/// Exhaustively enumerates every gapped candidate `b` supported on the
/// positive levels below `bound` and returns those satisfying both the
/// Maurer-Cartan equation and `d^b(1) = 0` below `bound`.
///
/// This is the brute-force uniqueness oracle: it shares only the low-level
/// evaluation plumbing with the solver and knows nothing of the recursion.
pub fn oracle_bounding_cochains(
    module: &Arc<FilteredRightModule>,
    one: &Element,
    bound: Rational,
    budget: u128,
) -> Result<Vec<Element>, McError> {
    let ctx = module.ctx();
    let levels: Vec<Rational> = ctx
        .monoid()
        .levels_below(bound.min(ctx.cutoff()))
        .into_iter()
        .filter(|l| *l > Rational::from_integer(0))
        .collect();
    let n = module.algebra().basis().len();
    let bits = n * levels.len();
    if bits >= 128 {
        return Err(McError::BudgetExceeded {
            required: u128::MAX,
            budget,
        });
    }
    let required = 1u128 << bits;
    if required > budget {
        return Err(McError::BudgetExceeded { required, budget });
    }

    let mut found = Vec::new();
    for mask in 0..required {
        let mut terms = Vec::new();
        for (li, level) in levels.iter().enumerate() {
            for g in 0..n {
                if mask >> (li * n + g) & 1 == 1 {
                    terms.push((g, Scalar::monomial(ctx, *level).map_err(AinftyError::Novikov)?));
                }
            }
        }
        let b = Element::from_terms(ctx, module.algebra().basis(), terms)
            .map_err(|e| McError::Ainfty(AinftyError::Lincomb(e)))?;
        if verify_mc(module.algebra(), &b, bound).is_err() {
            continue;
        }
        let d_b = twisted_boundary_raw(module, &b)?;
        let residual = d_b.apply(one).map_err(AinftyError::Lincomb)?;
        let ok = match residual.val() {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= bound,
        };
        if ok {
            found.push(b);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::Basis;
    use crate::novikov::{Context, Ctx, DiscreteMonoid};
    use crate::rat::rat_int;

    fn ctx_int(cutoff: i64) -> Ctx {
        Context::new(DiscreteMonoid::new([rat_int(1)]).unwrap(), rat_int(cutoff)).unwrap()
    }

    fn fixture_f1() -> (Ctx, Arc<FilteredAlgebra>, Arc<FilteredRightModule>) {
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
    fn f1_certificate_inverts_leading_map() {
        let (ctx, alg, module) = fixture_f1();
        let w = Element::generator(&ctx, module.basis(), "w").unwrap();
        let cert = certify_cyclic(&module, &w).unwrap();
        // Leading map: p -> v, q -> w; inverse must send v -> p, w -> q.
        let v = module.basis().index_of("v").unwrap();
        let w_i = module.basis().index_of("w").unwrap();
        let p = alg.basis().index_of("p").unwrap();
        let q = alg.basis().index_of("q").unwrap();
        assert_eq!(
            cert.leading_inverse().mul_vec(&Z2Vec::singleton(v)),
            Z2Vec::singleton(p)
        );
        assert_eq!(
            cert.leading_inverse().mul_vec(&Z2Vec::singleton(w_i)),
            Z2Vec::singleton(q)
        );
    }

    #[test]
    fn identity_leading_map_pattern() {
        // A module whose leading action is the identity yields the identity
        // inverse.
        let ctx = ctx_int(2);
        let cb = Basis::new("C", ["x", "y"]).unwrap();
        let zero = rat_int(0);
        let alg = FilteredAlgebra::from_named(
            &ctx,
            &cb,
            &[
                (zero, &["x", "x"], &["x"]),
                (zero, &["x", "y"], &["y"]),
                (zero, &["y", "x"], &["y"]),
            ],
        )
        .unwrap();
        let db = Basis::new("D", ["u", "t"]).unwrap();
        let module = FilteredRightModule::from_named(
            &alg,
            &db,
            &[(zero, "u", &["x"], &["u"]), (zero, "u", &["y"], &["t"]),
              (zero, "t", &["x"], &["t"])],
        )
        .unwrap();
        // 1 = u: n_{1,0}(u; x) = u, n_{1,0}(u; y) = t -- an isomorphism.
        let one = Element::generator(&ctx, module.basis(), "u").unwrap();
        if check_module_relations(&module, rat_int(2)).is_ok() {
            let cert = certify_cyclic(&module, &one).unwrap();
            let u = module.basis().index_of("u").unwrap();
            let x = alg.basis().index_of("x").unwrap();
            assert_eq!(
                cert.leading_inverse().mul_vec(&Z2Vec::singleton(u)),
                Z2Vec::singleton(x)
            );
        }
    }

    #[test]
    fn zero_one_is_not_cyclic() {
        let (ctx, _, module) = fixture_f1();
        let zero = Element::zero(&ctx, module.basis());
        assert!(matches!(
            certify_cyclic(&module, &zero),
            Err(McError::NotCyclic)
        ));
    }

    #[test]
    fn f1_solves_to_t_p() {
        let (ctx, alg, module) = fixture_f1();
        let w = Element::generator(&ctx, module.basis(), "w").unwrap();
        let cert = certify_cyclic(&module, &w).unwrap();
        let (b, trace) = solve_bounding_cochain(&cert, rat_int(4)).unwrap();
        let p = alg.basis().index_of("p").unwrap();
        let expect = Element::from_terms(
            &ctx,
            alg.basis(),
            [(p, Scalar::monomial(&ctx, rat_int(1)).unwrap())],
        )
        .unwrap();
        assert_eq!(b.value, expect);
        assert_eq!(b.certified_cutoff, rat_int(4));
        let rendered = trace.to_string();
        assert_eq!(
            rendered,
            "level 1: forcing = v; b = p\nlevel 2: forcing = 0; b = 0\nlevel 3: forcing = 0; b = 0\n"
        );
    }

    #[test]
    fn trivial_module_solves_to_zero() {
        // n_0(1) = 0 exactly and no higher interactions beyond the leading
        // action: every forcing term vanishes.
        let ctx = ctx_int(3);
        let cb = Basis::new("C", ["x"]).unwrap();
        let zero = rat_int(0);
        let alg = FilteredAlgebra::from_named(&ctx, &cb, &[(zero, &["x", "x"], &["x"])])
            .unwrap();
        let db = Basis::new("D", ["u"]).unwrap();
        let module =
            FilteredRightModule::from_named(&alg, &db, &[(zero, "u", &["x"], &["u"])])
                .unwrap();
        let one = Element::generator(&ctx, module.basis(), "u").unwrap();
        let cert = certify_cyclic(&module, &one).unwrap();
        let (b, _) = solve_bounding_cochain(&cert, rat_int(3)).unwrap();
        assert!(b.value.is_zero());
    }

    #[test]
    fn verify_mc_matches_f1_expansion() {
        let (ctx, alg, _) = fixture_f1();
        let p = alg.basis().index_of("p").unwrap();
        let q = alg.basis().index_of("q").unwrap();
        let t = Scalar::monomial(&ctx, rat_int(1)).unwrap();
        let b_good = Element::from_terms(&ctx, alg.basis(), [(p, t.clone())]).unwrap();
        assert!(verify_mc(&alg, &b_good, rat_int(4)).is_ok());
        let b_bad = Element::from_terms(&ctx, alg.basis(), [(q, t)]).unwrap();
        match verify_mc(&alg, &b_bad, rat_int(4)) {
            Err(McError::Residual { level, residual }) => {
                assert_eq!(level, rat_int(2));
                assert_eq!(residual, "q");
            }
            other => panic!("expected residual, got {other:?}"),
        }
    }

    #[test]
    fn mc_of_zero_passes_without_curvature() {
        let (ctx, alg, _) = fixture_f1();
        let zero = Element::zero(&ctx, alg.basis());
        assert!(verify_mc(&alg, &zero, rat_int(4)).is_ok());
    }

    #[test]
    fn oracle_finds_exactly_t_p_on_f1_below_two() {
        let (ctx, alg, module) = fixture_f1();
        let w = Element::generator(&ctx, module.basis(), "w").unwrap();
        let found =
            oracle_bounding_cochains(&module, &w, rat_int(2), 1 << 20).unwrap();
        let p = alg.basis().index_of("p").unwrap();
        let expect = Element::from_terms(
            &ctx,
            alg.basis(),
            [(p, Scalar::monomial(&ctx, rat_int(1)).unwrap())],
        )
        .unwrap();
        assert_eq!(found, vec![expect]);
    }

    #[test]
    fn oracle_respects_budget() {
        let (ctx, _, module) = fixture_f1();
        let w = Element::generator(&ctx, module.basis(), "w").unwrap();
        let err = oracle_bounding_cochains(&module, &w, rat_int(4), 3).unwrap_err();
        assert!(matches!(err, McError::BudgetExceeded { required: 64, budget: 3 }));
    }

    #[test]
    fn solver_is_monotone_under_truncation() {
        let (ctx, alg, module) = fixture_f1();
        let w = Element::generator(&ctx, module.basis(), "w").unwrap();
        let cert = certify_cyclic(&module, &w).unwrap();
        let (b4, _) = solve_bounding_cochain(&cert, rat_int(4)).unwrap();
        let (b2, _) = solve_bounding_cochain(&cert, rat_int(2)).unwrap();
        // Truncating the deeper solve to the shallower bound reproduces it.
        let truncated: Vec<(usize, Scalar)> = b4
            .value
            .terms()
            .filter_map(|(g, s)| {
                let exps: Vec<_> = s
                    .exponents()
                    .copied()
                    .filter(|e| *e < rat_int(2))
                    .collect();
                if exps.is_empty() {
                    None
                } else {
                    Some((g, Scalar::from_exponents(&ctx, exps).unwrap()))
                }
            })
            .collect();
        let b4_cut = Element::from_terms(&ctx, alg.basis(), truncated).unwrap();
        assert_eq!(b4_cut, b2.value);
    }
}
