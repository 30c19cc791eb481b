//! Free modules over the truncated Novikov ring on named bases, their
//! elements, and sparse linear maps between them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::novikov::{Ctx, NovikovError, Scalar, Valuation};
use crate::rat::{format_rational, Rational};
use crate::z2::Z2Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LincombError {
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("bases do not match (expected `{expected}`, got `{got}`)")]
    BasisMismatch { expected: String, got: String },
    #[error("generator `{0}` has no degree although the basis is graded")]
    MissingDegree(String),
    #[error("map is not square (domain and codomain differ)")]
    NotSquare,
    #[error("not a chain complex: d^2(`{generator}`) is nonzero at energy {}", format_rational(.level))]
    NotAComplex { generator: String, level: Rational },
}

/// An ordered basis of named generators, optionally graded modulo `N >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    name: String,
    generators: Vec<String>,
    index: BTreeMap<String, usize>,
    grading: Option<Grading>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    pub modulus: i64,
    pub degrees: Vec<i64>,
}

impl Basis {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(
        name: &str,
        gens: I,
    ) -> Result<Arc<Basis>, LincombError> {
        Self::build(name, gens.into_iter().map(|g| (g.into(), None)), None)
    }

    /// Graded basis; `modulus >= 1` and every generator carries a degree,
    /// stored reduced modulo `modulus`.
    pub fn graded<S: Into<String>, I: IntoIterator<Item = (S, i64)>>(
        name: &str,
        gens: I,
        modulus: i64,
    ) -> Result<Arc<Basis>, LincombError> {
        Self::build(
            name,
            gens.into_iter().map(|(g, d)| (g.into(), Some(d))),
            Some(modulus),
        )
    }

    fn build(
        name: &str,
        gens: impl Iterator<Item = (String, Option<i64>)>,
        modulus: Option<i64>,
    ) -> Result<Arc<Basis>, LincombError> {
        let mut generators = Vec::new();
        let mut index = BTreeMap::new();
        let mut degrees = Vec::new();
        for (g, d) in gens {
            if index.insert(g.clone(), generators.len()).is_some() {
                return Err(LincombError::DuplicateGenerator(g));
            }
            match (modulus, d) {
                (Some(m), Some(d)) => degrees.push(d.rem_euclid(m.max(1))),
                (Some(_), None) => return Err(LincombError::MissingDegree(g.clone())),
                (None, _) => {}
            }
            generators.push(g);
        }
        let grading = modulus.map(|m| Grading {
            modulus: m,
            degrees,
        });
        Ok(Arc::new(Basis {
            name: name.to_string(),
            generators,
            index,
            grading,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn gen_name(&self, i: usize) -> &str {
        &self.generators[i]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.generators.iter().map(|s| s.as_str())
    }

    pub fn index_of(&self, name: &str) -> Result<usize, LincombError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| LincombError::UnknownGenerator(name.to_string()))
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_ref()
    }
}

fn same_basis(expected: &Arc<Basis>, got: &Arc<Basis>) -> Result<(), LincombError> {
    if Arc::ptr_eq(expected, got) || expected == got {
        Ok(())
    } else {
        Err(LincombError::BasisMismatch {
            expected: expected.name().to_string(),
            got: got.name().to_string(),
        })
    }
}

/// A Novikov-linear combination of basis generators. Zero coefficients are
/// never stored, so equality of values is equality of representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    ctx: Ctx,
    basis: Arc<Basis>,
    coeffs: BTreeMap<usize, Scalar>,
}

impl Element {
    pub fn zero(ctx: &Ctx, basis: &Arc<Basis>) -> Element {
        Element {
            ctx: Arc::clone(ctx),
            basis: Arc::clone(basis),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn generator(ctx: &Ctx, basis: &Arc<Basis>, name: &str) -> Result<Element, LincombError> {
        let i = basis.index_of(name)?;
        let mut e = Element::zero(ctx, basis);
        e.add_term(i, Scalar::one(ctx))?;
        Ok(e)
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Scalar)>>(
        ctx: &Ctx,
        basis: &Arc<Basis>,
        terms: I,
    ) -> Result<Element, LincombError> {
        let mut e = Element::zero(ctx, basis);
        for (i, s) in terms {
            e.add_term(i, s)?;
        }
        Ok(e)
    }

    pub(crate) fn add_term(&mut self, i: usize, s: Scalar) -> Result<(), LincombError> {
        debug_assert!(i < self.basis.len());
        if s.is_zero() {
            return Ok(());
        }
        match self.coeffs.remove(&i) {
            None => {
                self.coeffs.insert(i, s);
            }
            Some(old) => {
                let sum = old.add(&s)?;
                if !sum.is_zero() {
                    self.coeffs.insert(i, sum);
                }
            }
        }
        Ok(())
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Option<&Scalar> {
        self.coeffs.get(&i)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.coeffs.iter().map(|(i, s)| (*i, s))
    }

    pub fn add(&self, other: &Element) -> Result<Element, LincombError> {
        same_basis(&self.basis, &other.basis)?;
        let mut out = self.clone();
        for (i, s) in other.terms() {
            out.add_term(i, s.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Result<Element, LincombError> {
        let mut out = Element::zero(&self.ctx, &self.basis);
        for (i, c) in self.terms() {
            out.add_term(i, c.mul(s)?)?;
        }
        Ok(out)
    }

    /// Smallest valuation among coefficients; infinite for zero.
    pub fn val(&self) -> Valuation {
        self.coeffs
            .values()
            .map(|s| s.val())
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// True when every coefficient has strictly positive valuation, i.e. the
    /// element lies in the span of the maximal ideal.
    pub fn is_positive_valuation(&self) -> bool {
        self.val().is_positive()
    }

    /// The Z/2 part of the coefficient of each generator at energy `level`.
    pub fn residue_at(&self, level: Rational) -> crate::z2::Z2Vec {
        let mut v = crate::z2::Z2Vec::new();
        for (i, s) in self.terms() {
            if s.exponents().any(|e| *e == level) {
                v.toggle(i);
            }
        }
        v
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, s) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let name = self.basis.gen_name(*i);
            if s.is_one() {
                write!(f, "{name}")?;
            } else if s.exponents().count() == 1 {
                write!(f, "{s} * {name}")?;
            } else {
                write!(f, "({s}) * {name}")?;
            }
        }
        Ok(())
    }
}

/// A sparse Novikov-linear map, stored as `(row, column) -> scalar` with rows
/// indexing the codomain and columns the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    ctx: Ctx,
    domain: Arc<Basis>,
    codomain: Arc<Basis>,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl LinearMap {
    pub fn zero(ctx: &Ctx, domain: &Arc<Basis>, codomain: &Arc<Basis>) -> LinearMap {
        LinearMap {
            ctx: Arc::clone(ctx),
            domain: Arc::clone(domain),
            codomain: Arc::clone(codomain),
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(ctx: &Ctx, basis: &Arc<Basis>) -> LinearMap {
        let mut m = LinearMap::zero(ctx, basis, basis);
        for i in 0..basis.len() {
            m.entries.insert((i, i), Scalar::one(ctx));
        }
        m
    }

    pub fn from_entries<I: IntoIterator<Item = ((usize, usize), Scalar)>>(
        ctx: &Ctx,
        domain: &Arc<Basis>,
        codomain: &Arc<Basis>,
        entries: I,
    ) -> Result<LinearMap, LincombError> {
        let mut m = LinearMap::zero(ctx, domain, codomain);
        for ((r, c), s) in entries {
            m.add_entry(r, c, s)?;
        }
        Ok(m)
    }

    pub fn add_entry(&mut self, r: usize, c: usize, s: Scalar) -> Result<(), LincombError> {
        debug_assert!(r < self.codomain.len() && c < self.domain.len());
        if s.is_zero() {
            return Ok(());
        }
        match self.entries.remove(&(r, c)) {
            None => {
                self.entries.insert((r, c), s);
            }
            Some(old) => {
                let sum = old.add(&s)?;
                if !sum.is_zero() {
                    self.entries.insert((r, c), sum);
                }
            }
        }
        Ok(())
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn domain(&self) -> &Arc<Basis> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Basis> {
        &self.codomain
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|((r, c), s)| (*r, *c, s))
    }

    pub fn entry(&self, r: usize, c: usize) -> Option<&Scalar> {
        self.entries.get(&(r, c))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn apply(&self, x: &Element) -> Result<Element, LincombError> {
        same_basis(&self.domain, x.basis())?;
        let mut out = Element::zero(&self.ctx, &self.codomain);
        for ((r, c), s) in &self.entries {
            if let Some(xc) = x.coeff(*c) {
                out.add_term(*r, s.mul(xc)?)?;
            }
        }
        Ok(out)
    }

    /// `self ∘ f`, defined when `f`'s codomain is `self`'s domain.
    pub fn compose(&self, f: &LinearMap) -> Result<LinearMap, LincombError> {
        same_basis(&self.domain, &f.codomain)?;
        let mut out = LinearMap::zero(&self.ctx, &f.domain, &self.codomain);
        for ((r, k), g) in &self.entries {
            for ((k2, c), h) in &f.entries {
                if k == k2 {
                    out.add_entry(*r, *c, g.mul(h)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &LinearMap) -> Result<LinearMap, LincombError> {
        same_basis(&self.domain, &other.domain)?;
        same_basis(&self.codomain, &other.codomain)?;
        let mut out = self.clone();
        for ((r, c), s) in &other.entries {
            out.add_entry(*r, *c, s.clone())?;
        }
        Ok(out)
    }

    /// The Z/2 matrix of the reduction at `T = 0`.
    pub fn residue_matrix(&self) -> Z2Matrix {
        let mut m = Z2Matrix::zero(self.codomain.len(), self.domain.len());
        for ((r, c), s) in &self.entries {
            if s.val() == Valuation::Finite(Rational::from_integer(0)) {
                m.set(*r, *c, true);
            }
        }
        m
    }

    /// Whether the determinant of a square map is a unit of the Novikov ring,
    /// decided over the residue field at `T = 0`.
    pub fn has_unit_determinant(&self) -> bool {
        self.domain.len() == self.codomain.len() && self.residue_matrix().is_invertible()
    }

    /// First nonzero entry of the map in (row name, column name) order,
    /// reported as `(column generator, valuation)`. Used for witnesses.
    pub(crate) fn first_entry_by_name(&self) -> Option<(String, Rational)> {
        self.entries
            .iter()
            .min_by_key(|((r, c), _)| {
                (
                    self.codomain.gen_name(*r).to_string(),
                    self.domain.gen_name(*c).to_string(),
                )
            })
            .map(|((_, c), s)| {
                let level = s.val().finite().expect("stored entries are nonzero");
                (self.domain.gen_name(*c).to_string(), level)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::{Context, DiscreteMonoid};
    use crate::rat::{rat, rat_int};

    fn ctx() -> Ctx {
        Context::new(
            DiscreteMonoid::new([rat(1, 2)]).unwrap(),
            rat_int(2),
        )
        .unwrap()
    }

    #[test]
    fn identity_and_zero_act_as_expected() {
        let c = ctx();
        let b = Basis::new("C", ["e1", "e2"]).unwrap();
        let x = Element::from_terms(
            &c,
            &b,
            [
                (0, Scalar::one(&c)),
                (1, Scalar::monomial(&c, rat(1, 2)).unwrap()),
            ],
        )
        .unwrap();
        let id = LinearMap::identity(&c, &b);
        assert_eq!(id.apply(&x).unwrap(), x);
        let z = LinearMap::zero(&c, &b, &b);
        assert!(z.apply(&x).unwrap().is_zero());
    }

    #[test]
    fn apply_is_linear_over_scalars() {
        let c = ctx();
        let b = Basis::new("C", ["e1", "e2"]).unwrap();
        // d(e1) = T^{1/2} e2
        let d = LinearMap::from_entries(
            &c,
            &b,
            &b,
            [((1, 0), Scalar::monomial(&c, rat(1, 2)).unwrap())],
        )
        .unwrap();
        // x = (1 + T^{1/2}) e1
        let x = Element::from_terms(
            &c,
            &b,
            [(0, Scalar::from_exponents(&c, [rat_int(0), rat(1, 2)]).unwrap())],
        )
        .unwrap();
        let y = d.apply(&x).unwrap();
        let expect = Element::from_terms(
            &c,
            &b,
            [(1, Scalar::from_exponents(&c, [rat(1, 2), rat_int(1)]).unwrap())],
        )
        .unwrap();
        assert_eq!(y, expect);
    }

    #[test]
    fn compose_detects_nilpotence_and_non_complexes() {
        let c = ctx();
        let b = Basis::new("C", ["e1", "e2"]).unwrap();
        let t = Scalar::monomial(&c, rat_int(1)).unwrap();
        let d = LinearMap::from_entries(&c, &b, &b, [((1, 0), t)]).unwrap();
        assert!(d.compose(&d).unwrap().is_zero());

        let flip = LinearMap::from_entries(
            &c,
            &b,
            &b,
            [((1, 0), Scalar::one(&c)), ((0, 1), Scalar::one(&c))],
        )
        .unwrap();
        assert_eq!(flip.compose(&flip).unwrap(), LinearMap::identity(&c, &b));
    }

    #[test]
    fn compose_respects_identity() {
        let c = ctx();
        let b = Basis::new("C", ["e1", "e2"]).unwrap();
        let g = LinearMap::from_entries(
            &c,
            &b,
            &b,
            [((0, 1), Scalar::monomial(&c, rat(1, 2)).unwrap())],
        )
        .unwrap();
        let id = LinearMap::identity(&c, &b);
        assert_eq!(g.compose(&id).unwrap(), g);
        assert_eq!(id.compose(&g).unwrap(), g);
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let c = ctx();
        let b1 = Basis::new("C", ["e1"]).unwrap();
        let b2 = Basis::new("D", ["f1"]).unwrap();
        let x = Element::generator(&c, &b2, "f1").unwrap();
        let id = LinearMap::identity(&c, &b1);
        assert!(matches!(
            id.apply(&x),
            Err(LincombError::BasisMismatch { .. })
        ));
    }

    #[test]
    fn graded_basis_requires_degrees() {
        assert!(Basis::graded("C", [("x", 1), ("y", 6)], 4).is_ok());
        let b = Basis::graded("C", [("x", 1), ("y", 6)], 4).unwrap();
        assert_eq!(b.grading().unwrap().degrees, vec![1, 2]);
        assert!(Basis::new("C", ["x", "x"]).is_err());
    }

    #[test]
    fn element_display() {
        let c = ctx();
        let b = Basis::new("C", ["p", "q"]).unwrap();
        let e = Element::from_terms(
            &c,
            &b,
            [
                (0, Scalar::monomial(&c, rat_int(1)).unwrap()),
                (1, Scalar::one(&c)),
            ],
        )
        .unwrap();
        assert_eq!(e.to_string(), "T^1 * p + q");
    }
}
