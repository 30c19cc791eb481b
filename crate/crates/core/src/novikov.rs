//! The universal Novikov ring with Z/2 coefficients, truncated at an energy
//! cutoff, together with the discrete monoid of allowed structure energies.
//!
//! A scalar is a finite formal sum of monomials `T^a` with rational `a >= 0`,
//! every exponent strictly below the cutoff `E`. Exponents at or above the
//! cutoff are identically dropped, so truncation at `E` is a ring quotient
//! and every statement computed here is an exact statement "below energy E".
//!
//! Gapped *structure data* must have all its energies inside the discrete
//! monoid `G`. Scalars produced by ring arithmetic on gapped data stay inside
//! `G`, but normal-form reduction also needs quotients whose exponents are
//! differences of monoid elements; those may leave `G` (e.g. `1 - 2/3` for
//! `G = <2/3, 1>`). The scalar type therefore carries the monoid only as
//! context, and membership is enforced where gapped data is ingested.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::rat::{format_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NovikovError {
    #[error("monoid generator {} is not strictly positive", format_rational(.0))]
    NonPositiveGenerator(Rational),
    #[error("operands have different cutoff or monoid")]
    ContextMismatch,
    #[error("exponent {} is negative", format_rational(.0))]
    NegativeExponent(Rational),
    #[error("exponent {} is not in the discrete monoid", format_rational(.0))]
    ExponentNotInMonoid(Rational),
    #[error("not a unit: valuation must be 0 to invert")]
    NotAUnit,
    #[error("cutoff can only be lowered, not raised from {} to {}", format_rational(.from), format_rational(.to))]
    CutoffRaise { from: Rational, to: Rational },
    #[error("cutoff {} is not strictly positive", format_rational(.0))]
    NonPositiveCutoff(Rational),
}

/// A discrete submonoid of the nonnegative rationals, given by finitely many
/// strictly positive generators. `G` always contains `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMonoid {
    generators: BTreeSet<Rational>,
}

impl DiscreteMonoid {
    pub fn new<I: IntoIterator<Item = Rational>>(gens: I) -> Result<Self, NovikovError> {
        let mut generators = BTreeSet::new();
        for g in gens {
            if g <= Rational::zero() {
                return Err(NovikovError::NonPositiveGenerator(g));
            }
            generators.insert(g);
        }
        Ok(DiscreteMonoid { generators })
    }

    pub fn generators(&self) -> impl Iterator<Item = &Rational> {
        self.generators.iter()
    }

    /// Smallest strictly positive element, if the monoid is nontrivial.
    pub fn min_positive(&self) -> Option<Rational> {
        self.generators.first().copied()
    }

    /// Enumerates `G ∩ [0, bound)` sorted ascending. Always starts with `0`.
    pub fn levels_below(&self, bound: Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut frontier: BTreeSet<Rational> = BTreeSet::new();
        frontier.insert(Rational::zero());
        while let Some(x) = frontier.pop_first() {
            if x >= bound {
                break;
            }
            out.push(x);
            for g in &self.generators {
                let y = x + g;
                if y < bound {
                    frontier.insert(y);
                }
            }
        }
        out
    }

    /// Exact membership test, decided by bounded enumeration.
    pub fn contains(&self, x: &Rational) -> bool {
        if x.is_zero() {
            return true;
        }
        if *x < Rational::zero() {
            return false;
        }
        let mut frontier: BTreeSet<Rational> = BTreeSet::new();
        frontier.insert(Rational::zero());
        while let Some(y) = frontier.pop_first() {
            if y == *x {
                return true;
            }
            if y > *x {
                return false;
            }
            for g in &self.generators {
                let z = y + g;
                if z <= *x {
                    frontier.insert(z);
                }
            }
        }
        false
    }
}

/// Shared ambient data for all scalars of one computation: the energy monoid
/// and the truncation cutoff. Cross-context arithmetic is rejected rather
/// than coerced, so validity thresholds cannot be silently corrupted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    monoid: DiscreteMonoid,
    cutoff: Rational,
}

pub type Ctx = Arc<Context>;

impl Context {
    pub fn new(monoid: DiscreteMonoid, cutoff: Rational) -> Result<Ctx, NovikovError> {
        if cutoff <= Rational::zero() {
            return Err(NovikovError::NonPositiveCutoff(cutoff));
        }
        Ok(Arc::new(Context { monoid, cutoff }))
    }

    pub fn monoid(&self) -> &DiscreteMonoid {
        &self.monoid
    }

    pub fn cutoff(&self) -> Rational {
        self.cutoff
    }

    /// `G ∩ [0, cutoff)`, the energy levels every gapped structure lives on.
    pub fn levels(&self) -> Vec<Rational> {
        self.monoid.levels_below(self.cutoff)
    }

    pub fn lowered(&self, cutoff: Rational) -> Result<Ctx, NovikovError> {
        if cutoff > self.cutoff {
            return Err(NovikovError::CutoffRaise {
                from: self.cutoff,
                to: cutoff,
            });
        }
        Context::new(self.monoid.clone(), cutoff)
    }
}

/// The valuation of a scalar: its smallest exponent, with `0` mapped to a
/// sentinel larger than every rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(Rational),
    Infinite,
}

impl Valuation {
    pub fn is_positive(&self) -> bool {
        match self {
            Valuation::Finite(r) => *r > Rational::zero(),
            Valuation::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<Rational> {
        match self {
            Valuation::Finite(r) => Some(*r),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) => write!(f, "{}", format_rational(r)),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of the truncated Novikov ring: a finite set of exponents, each
/// carrying the implicit coefficient `1` in Z/2. Canonical by construction
/// (sorted, deduplicated, all exponents in `[0, cutoff)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    ctx: Ctx,
    terms: BTreeSet<Rational>,
}

impl Scalar {
    pub fn zero(ctx: &Ctx) -> Scalar {
        Scalar {
            ctx: Arc::clone(ctx),
            terms: BTreeSet::new(),
        }
    }

    pub fn one(ctx: &Ctx) -> Scalar {
        Scalar::monomial(ctx, Rational::zero()).expect("0 < cutoff")
    }

    /// `T^exp`, identically zero when `exp >= cutoff`.
    pub fn monomial(ctx: &Ctx, exp: Rational) -> Result<Scalar, NovikovError> {
        Scalar::from_exponents(ctx, [exp])
    }

    pub fn from_exponents<I: IntoIterator<Item = Rational>>(
        ctx: &Ctx,
        exps: I,
    ) -> Result<Scalar, NovikovError> {
        let mut s = Scalar::zero(ctx);
        for e in exps {
            if e < Rational::zero() {
                return Err(NovikovError::NegativeExponent(e));
            }
            if e < ctx.cutoff() {
                // Repeats cancel in characteristic 2.
                if !s.terms.insert(e) {
                    s.terms.remove(&e);
                }
            }
        }
        Ok(s)
    }

    /// Like [`Scalar::from_exponents`] but additionally requires every
    /// exponent to lie in the ambient monoid. Used when ingesting gapped
    /// structure data.
    pub fn gapped<I: IntoIterator<Item = Rational>>(
        ctx: &Ctx,
        exps: I,
    ) -> Result<Scalar, NovikovError> {
        let exps: Vec<Rational> = exps.into_iter().collect();
        for e in &exps {
            if !ctx.monoid().contains(e) {
                return Err(NovikovError::ExponentNotInMonoid(*e));
            }
        }
        Scalar::from_exponents(ctx, exps)
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn cutoff(&self) -> Rational {
        self.ctx.cutoff()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.contains(&Rational::zero())
    }

    /// Sorted exponent list; the canonical external form.
    pub fn exponents(&self) -> impl Iterator<Item = &Rational> {
        self.terms.iter()
    }

    pub fn val(&self) -> Valuation {
        match self.terms.first() {
            Some(e) => Valuation::Finite(*e),
            None => Valuation::Infinite,
        }
    }

    fn check_ctx(&self, other: &Scalar) -> Result<(), NovikovError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(NovikovError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, NovikovError> {
        self.check_ctx(other)?;
        let mut terms = self.terms.clone();
        for e in &other.terms {
            if !terms.insert(*e) {
                terms.remove(e);
            }
        }
        Ok(Scalar {
            ctx: Arc::clone(&self.ctx),
            terms,
        })
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, NovikovError> {
        self.check_ctx(other)?;
        let cutoff = self.cutoff();
        let mut terms = BTreeSet::new();
        for a in &self.terms {
            for b in &other.terms {
                let e = a + b;
                if e < cutoff && !terms.insert(e) {
                    terms.remove(&e);
                }
            }
        }
        Ok(Scalar {
            ctx: Arc::clone(&self.ctx),
            terms,
        })
    }

    /// Multiplication by a single monomial `T^exp`.
    pub fn mul_monomial(&self, exp: Rational) -> Scalar {
        let cutoff = self.cutoff();
        let terms = self
            .terms
            .iter()
            .map(|a| a + exp)
            .filter(|e| *e < cutoff)
            .collect();
        Scalar {
            ctx: Arc::clone(&self.ctx),
            terms,
        }
    }

    /// Geometric-series inverse of a valuation-0 scalar, truncated at the
    /// cutoff: in characteristic 2, `(1 + r)^{-1} = 1 + r + r^2 + ...`.
    pub fn invert(&self) -> Result<Scalar, NovikovError> {
        if self.val() != Valuation::Finite(Rational::zero()) {
            return Err(NovikovError::NotAUnit);
        }
        let one = Scalar::one(&self.ctx);
        let r = self.add(&one)?;
        let mut acc = one.clone();
        let mut term = one;
        while !term.is_zero() {
            term = term.mul(&r)?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Re-truncates at a lower cutoff.
    pub fn truncate(&self, ctx: &Ctx) -> Result<Scalar, NovikovError> {
        if ctx.cutoff() > self.cutoff() || ctx.monoid() != self.ctx.monoid() {
            return Err(NovikovError::ContextMismatch);
        }
        let cutoff = ctx.cutoff();
        Ok(Scalar {
            ctx: Arc::clone(ctx),
            terms: self.terms.iter().copied().filter(|e| *e < cutoff).collect(),
        })
    }

    /// Divides all exponents down by `shift`; requires `val >= shift`.
    ///
    /// This is exact division by `T^shift` at unchanged cutoff. The result is
    /// known below `cutoff`, which is enough for normal-form reduction: the
    /// unknown tail re-enters products only above the cutoff.
    pub(crate) fn shift_down(&self, shift: Rational) -> Scalar {
        debug_assert!(self
            .terms
            .first()
            .map(|e| *e >= shift)
            .unwrap_or(true));
        Scalar {
            ctx: Arc::clone(&self.ctx),
            terms: self.terms.iter().map(|e| e - shift).collect(),
        }
    }

    /// Exact quotient `self / other` for `val(self) >= val(other)`, valid
    /// below the cutoff. `other` must be nonzero.
    pub(crate) fn div(&self, other: &Scalar) -> Result<Scalar, NovikovError> {
        self.check_ctx(other)?;
        let dv = other.val().finite().ok_or(NovikovError::NotAUnit)?;
        let unit = other.shift_down(dv).invert()?;
        if self.is_zero() {
            return Ok(Scalar::zero(&self.ctx));
        }
        let sv = self.val().finite().expect("nonzero");
        debug_assert!(sv >= dv);
        self.shift_down(dv).mul(&unit)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for e in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "1")?;
            } else {
                write!(f, "T^{}", format_rational(e))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn ctx(gens: &[Rational], cutoff: Rational) -> Ctx {
        Context::new(DiscreteMonoid::new(gens.iter().copied()).unwrap(), cutoff).unwrap()
    }

    #[test]
    fn monoid_levels_integer() {
        let g = DiscreteMonoid::new([rat_int(1)]).unwrap();
        assert_eq!(g.levels_below(rat_int(3)), vec![rat_int(0), rat_int(1), rat_int(2)]);
    }

    #[test]
    fn monoid_levels_half() {
        let g = DiscreteMonoid::new([rat(1, 2)]).unwrap();
        assert_eq!(
            g.levels_below(rat_int(2)),
            vec![rat_int(0), rat(1, 2), rat_int(1), rat(3, 2)]
        );
    }

    #[test]
    fn monoid_levels_two_gens() {
        // Brute-force oracle for <2/3, 1> below 2: all c1*(2/3) + c2*1.
        let mut expect: BTreeSet<Rational> = BTreeSet::new();
        for c1 in 0..4i64 {
            for c2 in 0..3i64 {
                let x = rat(2, 3) * rat_int(c1) + rat_int(c2);
                if x < rat_int(2) {
                    expect.insert(x);
                }
            }
        }
        let g = DiscreteMonoid::new([rat(2, 3), rat_int(1)]).unwrap();
        let got = g.levels_below(rat_int(2));
        assert_eq!(got, expect.into_iter().collect::<Vec<_>>());
        assert_eq!(
            got,
            vec![rat_int(0), rat(2, 3), rat_int(1), rat(4, 3), rat(5, 3)]
        );
    }

    #[test]
    fn monoid_rejects_nonpositive() {
        assert!(DiscreteMonoid::new([rat_int(0)]).is_err());
        assert!(DiscreteMonoid::new([rat(-1, 2)]).is_err());
    }

    #[test]
    fn monoid_membership() {
        let g = DiscreteMonoid::new([rat(1, 2)]).unwrap();
        assert!(g.contains(&rat_int(0)));
        assert!(g.contains(&rat(3, 2)));
        assert!(!g.contains(&rat(1, 3)));
        let g2 = DiscreteMonoid::new([rat(2, 3), rat_int(1)]).unwrap();
        assert!(g2.contains(&rat(5, 3)));
        assert!(!g2.contains(&rat(1, 3)));
    }

    #[test]
    fn add_is_characteristic_two() {
        let c = ctx(&[rat_int(1)], rat_int(4));
        let one = Scalar::one(&c);
        let t = Scalar::monomial(&c, rat_int(1)).unwrap();
        let a = one.add(&t).unwrap();
        // (1 + T) + T = 1
        assert_eq!(a.add(&t).unwrap(), one);
        // x + 0 = x
        assert_eq!(a.add(&Scalar::zero(&c)).unwrap(), a);
    }

    #[test]
    fn add_half_exponents() {
        let c = ctx(&[rat(1, 2)], rat_int(2));
        let th = Scalar::monomial(&c, rat(1, 2)).unwrap();
        let t = Scalar::monomial(&c, rat_int(1)).unwrap();
        let s = th.add(&t).unwrap();
        assert_eq!(s.add(&th).unwrap(), t);
    }

    #[test]
    fn mul_truncates_at_cutoff() {
        let c2 = ctx(&[rat(1, 2)], rat_int(2));
        let a = Scalar::one(&c2)
            .add(&Scalar::monomial(&c2, rat(1, 2)).unwrap())
            .unwrap();
        let th = Scalar::monomial(&c2, rat(1, 2)).unwrap();
        let p = a.mul(&th).unwrap();
        assert_eq!(
            p,
            Scalar::from_exponents(&c2, [rat(1, 2), rat_int(1)]).unwrap()
        );

        let c1 = ctx(&[rat(1, 2)], rat_int(1));
        let a1 = a.truncate(&c1).unwrap();
        let th1 = th.truncate(&c1).unwrap();
        assert_eq!(a1.mul(&th1).unwrap(), th1);
    }

    #[test]
    fn mul_squares_cancel() {
        let c = ctx(&[rat_int(1)], rat_int(4));
        let a = Scalar::one(&c)
            .add(&Scalar::monomial(&c, rat_int(1)).unwrap())
            .unwrap();
        // (1+T)(1+T) = 1 + T^2 over Z/2
        assert_eq!(
            a.mul(&a).unwrap(),
            Scalar::from_exponents(&c, [rat_int(0), rat_int(2)]).unwrap()
        );
    }

    #[test]
    fn valuation() {
        let c = ctx(&[rat(1, 2)], rat_int(4));
        let s = Scalar::from_exponents(&c, [rat(1, 2), rat_int(1)]).unwrap();
        assert_eq!(s.val(), Valuation::Finite(rat(1, 2)));
        assert_eq!(Scalar::zero(&c).val(), Valuation::Infinite);
        let u = Scalar::from_exponents(&c, [rat_int(0), rat_int(3)]).unwrap();
        assert_eq!(u.val(), Valuation::Finite(rat_int(0)));
        assert!(Valuation::Infinite > Valuation::Finite(rat_int(1_000_000)));
    }

    #[test]
    fn invert_geometric_series() {
        let c3 = ctx(&[rat_int(1)], rat_int(3));
        let one = Scalar::one(&c3);
        assert_eq!(one.invert().unwrap(), one);
        let a = one.add(&Scalar::monomial(&c3, rat_int(1)).unwrap()).unwrap();
        let inv = a.invert().unwrap();
        assert_eq!(
            inv,
            Scalar::from_exponents(&c3, [rat_int(0), rat_int(1), rat_int(2)]).unwrap()
        );
        assert_eq!(a.mul(&inv).unwrap(), one);

        let ch = ctx(&[rat(1, 2)], rat(3, 2));
        let b = Scalar::from_exponents(&ch, [rat_int(0), rat(1, 2)]).unwrap();
        let binv = b.invert().unwrap();
        assert_eq!(
            binv,
            Scalar::from_exponents(&ch, [rat_int(0), rat(1, 2), rat_int(1)]).unwrap()
        );
        assert!(b.mul(&binv).unwrap().is_one());
    }

    #[test]
    fn invert_rejects_non_units() {
        let c = ctx(&[rat_int(1)], rat_int(3));
        assert_eq!(Scalar::zero(&c).invert(), Err(NovikovError::NotAUnit));
        let t = Scalar::monomial(&c, rat_int(1)).unwrap();
        assert_eq!(t.invert(), Err(NovikovError::NotAUnit));
    }

    #[test]
    fn cross_context_rejected() {
        let a = Scalar::one(&ctx(&[rat_int(1)], rat_int(3)));
        let b = Scalar::one(&ctx(&[rat_int(1)], rat_int(4)));
        assert_eq!(a.add(&b), Err(NovikovError::ContextMismatch));
        assert_eq!(a.mul(&b), Err(NovikovError::ContextMismatch));
    }

    #[test]
    fn gapped_enforces_monoid() {
        let c = ctx(&[rat(1, 2)], rat_int(2));
        assert!(Scalar::gapped(&c, [rat(3, 2)]).is_ok());
        assert_eq!(
            Scalar::gapped(&c, [rat(1, 3)]),
            Err(NovikovError::ExponentNotInMonoid(rat(1, 3)))
        );
    }

    #[test]
    fn div_exact_below_cutoff() {
        let c = ctx(&[rat(1, 2)], rat_int(3));
        let x = Scalar::from_exponents(&c, [rat(1, 2), rat_int(1)]).unwrap();
        let y = Scalar::from_exponents(&c, [rat_int(1), rat(3, 2)]).unwrap();
        let q = y.div(&x).unwrap();
        // q * x should reproduce y below the cutoff.
        assert_eq!(q.mul(&x).unwrap(), y);
    }

    #[test]
    fn display_forms() {
        let c = ctx(&[rat(1, 2)], rat_int(3));
        assert_eq!(Scalar::zero(&c).to_string(), "0");
        assert_eq!(Scalar::one(&c).to_string(), "1");
        let s = Scalar::from_exponents(&c, [rat_int(0), rat(1, 2), rat_int(2)]).unwrap();
        assert_eq!(s.to_string(), "1 + T^1/2 + T^2");
    }
}
