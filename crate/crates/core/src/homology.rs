//! Normal forms and homology of chain complexes over the truncated Novikov
//! ring.
//!
//! The ring is a valuation domain: among the nonzero entries of a matrix, an
//! entry of minimal valuation divides every other entry, so Smith-type
//! reduction needs no divisibility repair loop. Pivots are normalized to pure
//! monomials `T^lambda`, and the exponents that survive below the cutoff are
//! exact invariants of the untruncated map. An entry whose true valuation is
//! at or above the cutoff is indistinguishable from zero here; the homology
//! report records the cutoff as its validity threshold for that reason.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::lincomb::{Basis, Element, LinearMap, LincombError};
use crate::novikov::{Ctx, Scalar};
use crate::rat::{format_rational, Rational};

/// Result of the Smith-type reduction `left ∘ f ∘ right = diag(T^d1, ..)`.
///
/// `left` and `right` are invertible over the ring (their determinants are
/// units; equivalently their residue matrices at `T = 0` are invertible), and
/// the recorded inverses are exact below the cutoff.
#[derive(Debug, Clone)]
pub struct ValuationNormalForm {
    pub diagonal: Vec<Rational>,
    pub left: LinearMap,
    pub left_inv: LinearMap,
    pub right: LinearMap,
    pub right_inv: LinearMap,
}

struct Dense {
    rows: usize,
    cols: usize,
    a: Vec<Vec<Scalar>>,
}

impl Dense {
    fn from_map(f: &LinearMap) -> Dense {
        let rows = f.codomain().len();
        let cols = f.domain().len();
        let mut a = vec![vec![Scalar::zero(f.ctx()); cols]; rows];
        for (r, c, s) in f.entries() {
            a[r][c] = s.clone();
        }
        Dense { rows, cols, a }
    }

    fn identity(ctx: &Ctx, n: usize) -> Dense {
        let mut a = vec![vec![Scalar::zero(ctx); n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = Scalar::one(ctx);
        }
        Dense { rows: n, cols: n, a }
    }

    fn to_map(&self, ctx: &Ctx, domain: &Arc<Basis>, codomain: &Arc<Basis>) -> LinearMap {
        let mut m = LinearMap::zero(ctx, domain, codomain);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if !self.a[r][c].is_zero() {
                    m.add_entry(r, c, self.a[r][c].clone())
                        .expect("shared context");
                }
            }
        }
        m
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
    }

    /// row_i += q * row_t
    fn row_axpy(&mut self, i: usize, t: usize, q: &Scalar) {
        for c in 0..self.cols {
            let delta = self.a[t][c].mul(q).expect("shared context");
            self.a[i][c] = self.a[i][c].add(&delta).expect("shared context");
        }
    }

    /// col_j += q * col_t
    fn col_axpy(&mut self, j: usize, t: usize, q: &Scalar) {
        for r in 0..self.rows {
            let delta = self.a[r][t].mul(q).expect("shared context");
            self.a[r][j] = self.a[r][j].add(&delta).expect("shared context");
        }
    }

    fn scale_row(&mut self, i: usize, s: &Scalar) {
        for c in 0..self.cols {
            self.a[i][c] = self.a[i][c].mul(s).expect("shared context");
        }
    }

    fn scale_col(&mut self, j: usize, s: &Scalar) {
        for r in 0..self.rows {
            self.a[r][j] = self.a[r][j].mul(s).expect("shared context");
        }
    }
}

/// Reduces `f` to `diag(T^{d_1}, ..., T^{d_r})` with `d_1 <= ... <= d_r` by
/// invertible row and column operations.
///
/// Pivots are chosen by minimal valuation, ties broken by the
/// lexicographically smallest (row name, column name) pair of the current
/// positions, which makes the reduction deterministic across platforms.
pub fn valuation_normal_form(f: &LinearMap) -> ValuationNormalForm {
    let ctx = f.ctx().clone();
    let mut w = Dense::from_map(f);
    let m = w.rows;
    let n = w.cols;
    let mut u = Dense::identity(&ctx, m);
    let mut u_inv = Dense::identity(&ctx, m);
    let mut v = Dense::identity(&ctx, n);
    let mut v_inv = Dense::identity(&ctx, n);
    let mut row_names: Vec<String> = f.codomain().names().map(str::to_string).collect();
    let mut col_names: Vec<String> = f.domain().names().map(str::to_string).collect();
    let mut diagonal = Vec::new();

    for t in 0..m.min(n) {
        // Minimal-valuation pivot in the trailing submatrix.
        let mut pivot: Option<(usize, usize, Rational)> = None;
        for i in t..m {
            for j in t..n {
                let s = &w.a[i][j];
                let Some(val) = s.val().finite() else { continue };
                let better = match &pivot {
                    None => true,
                    Some((pi, pj, pval)) => {
                        (val, (&row_names[i], &col_names[j]))
                            < (*pval, (&row_names[*pi], &col_names[*pj]))
                    }
                };
                if better {
                    pivot = Some((i, j, val));
                }
            }
        }
        let Some((pi, pj, pval)) = pivot else { break };

        if pi != t {
            w.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            row_names.swap(t, pi);
        }
        if pj != t {
            w.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);
            col_names.swap(t, pj);
        }

        // Normalize the pivot to the pure monomial T^pval.
        let unit = w.a[t][t].shift_down(pval);
        let unit_inv = unit.invert().expect("valuation-0 part is a unit");
        w.scale_row(t, &unit_inv);
        u.scale_row(t, &unit_inv);
        u_inv.scale_col(t, &unit);

        // Clear the pivot column, then the pivot row. Every remaining entry
        // has valuation >= pval, so the quotients are exact below the cutoff.
        for i in t + 1..m {
            if !w.a[i][t].is_zero() {
                let q = w.a[i][t].div(&w.a[t][t]).expect("divisible by pivot");
                w.row_axpy(i, t, &q);
                u.row_axpy(i, t, &q);
                u_inv.col_axpy(t, i, &q);
            }
        }
        for j in t + 1..n {
            if !w.a[t][j].is_zero() {
                let q = w.a[t][j].div(&w.a[t][t]).expect("divisible by pivot");
                w.col_axpy(j, t, &q);
                v.col_axpy(j, t, &q);
                v_inv.row_axpy(t, j, &q);
            }
        }
        diagonal.push(pval);
    }

    ValuationNormalForm {
        diagonal,
        left: u.to_map(&ctx, f.codomain(), f.codomain()),
        left_inv: u_inv.to_map(&ctx, f.codomain(), f.codomain()),
        right: v.to_map(&ctx, f.domain(), f.domain()),
        right_inv: v_inv.to_map(&ctx, f.domain(), f.domain()),
    }
}

/// Free rank and torsion exponents of `ker d / im d` over the Novikov ring,
/// valid below `validity_threshold`: torsion at or above the threshold is
/// indistinguishable from free summands under truncation and is reported as
/// free rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyReport {
    pub free_rank: usize,
    pub torsion_exponents: Vec<Rational>,
    pub validity_threshold: Rational,
}

impl fmt::Display for HomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let torsion = self
            .torsion_exponents
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(", ");
        write!(
            f,
            "free {}, torsion [{}], threshold {}",
            self.free_rank,
            torsion,
            format_rational(&self.validity_threshold)
        )
    }
}

impl HomologyReport {
    /// Agreement below the smaller threshold: equal free ranks and equal
    /// torsion multisets.
    pub fn agrees_with(&self, other: &HomologyReport) -> bool {
        self.free_rank == other.free_rank && self.torsion_exponents == other.torsion_exponents
    }
}

/// Homology of a square differential with `d ∘ d = 0` below the cutoff.
///
/// With `r` pivots `T^{d_i}` in the normal form of `d` on an `n`-dimensional
/// module, the kernel has rank `n - r`, the image has rank `r`, and because
/// the kernel is a pure submodule all torsion of the cokernel lives in the
/// homology: free rank `n - 2r` and torsion `{d_i > 0}`.
pub fn homology(d: &LinearMap) -> Result<HomologyReport, LincombError> {
    if d.domain() != d.codomain() {
        return Err(LincombError::NotSquare);
    }
    let dd = d.compose(d)?;
    if !dd.is_zero() {
        let (generator, level) = dd.first_entry_by_name().expect("nonzero map has entries");
        return Err(LincombError::NotAComplex { generator, level });
    }
    let vnf = valuation_normal_form(d);
    Ok(report_from_pivots(
        d.domain().len(),
        &vnf.diagonal,
        &vnf.diagonal,
        d.ctx(),
    ))
}

fn report_from_pivots(
    dim: usize,
    outgoing: &[Rational],
    incoming: &[Rational],
    ctx: &Ctx,
) -> HomologyReport {
    let torsion: Vec<Rational> = incoming
        .iter()
        .copied()
        .filter(|e| !e.is_zero())
        .collect();
    HomologyReport {
        free_rank: dim - outgoing.len() - incoming.len(),
        torsion_exponents: torsion,
        validity_threshold: ctx.cutoff(),
    }
}

/// Per-degree-class homology reports, when the basis is graded and the
/// differential shifts degree uniformly. Grading never gates computation:
/// when no uniform shift exists the per-class breakdown is simply absent.
#[derive(Debug, Clone)]
pub struct GradedHomology {
    pub total: HomologyReport,
    /// `(degree class, report)` pairs, ascending by class.
    pub classes: Option<Vec<(i64, HomologyReport)>>,
}

pub fn homology_by_degree(d: &LinearMap) -> Result<GradedHomology, LincombError> {
    let total = homology(d)?;
    let basis = d.domain();
    let Some(grading) = basis.grading() else {
        return Ok(GradedHomology {
            total,
            classes: None,
        });
    };
    let modulus = grading.modulus.max(1);
    // A per-class report needs a uniform degree shift.
    let mut shift: Option<i64> = None;
    for (r, c, _) in d.entries() {
        let s = (grading.degrees[r] - grading.degrees[c]).rem_euclid(modulus);
        match shift {
            None => shift = Some(s),
            Some(prev) if prev != s => {
                return Ok(GradedHomology {
                    total,
                    classes: None,
                })
            }
            _ => {}
        }
    }
    let shift = shift.unwrap_or(0);

    // Rank/pivot data of each block C_delta -> C_{delta+shift}.
    let mut pivots_from: std::collections::BTreeMap<i64, Vec<Rational>> = Default::default();
    let classes: std::collections::BTreeSet<i64> = grading.degrees.iter().copied().collect();
    for &delta in &classes {
        let dom: Vec<&str> = basis
            .names()
            .enumerate()
            .filter(|(i, _)| grading.degrees[*i] == delta)
            .map(|(_, n)| n)
            .collect();
        let cod_class = (delta + shift).rem_euclid(modulus);
        let cod: Vec<&str> = basis
            .names()
            .enumerate()
            .filter(|(i, _)| grading.degrees[*i] == cod_class)
            .map(|(_, n)| n)
            .collect();
        let sub_dom = Basis::new(&format!("{}@{}", basis.name(), delta), dom.clone())?;
        let sub_cod = Basis::new(&format!("{}@{}", basis.name(), cod_class), cod.clone())?;
        let mut block = LinearMap::zero(d.ctx(), &sub_dom, &sub_cod);
        for (r, c, s) in d.entries() {
            if grading.degrees[c] == delta {
                let br = cod
                    .iter()
                    .position(|n| *n == basis.gen_name(r))
                    .expect("uniform shift");
                let bc = dom
                    .iter()
                    .position(|n| *n == basis.gen_name(c))
                    .expect("column in class");
                block.add_entry(br, bc, s.clone())?;
            }
        }
        pivots_from.insert(delta, valuation_normal_form(&block).diagonal);
    }

    let empty = Vec::new();
    let mut out = Vec::new();
    for &delta in &classes {
        let dim = grading.degrees.iter().filter(|d| **d == delta).count();
        let outgoing = pivots_from.get(&delta).unwrap_or(&empty);
        let prev = (delta - shift).rem_euclid(modulus);
        let incoming = pivots_from.get(&prev).unwrap_or(&empty);
        out.push((
            delta,
            report_from_pivots(dim, outgoing, incoming, d.ctx()),
        ));
    }
    Ok(GradedHomology {
        total,
        classes: Some(out),
    })
}

/// Reconstructs `left ∘ f ∘ right` and the expected diagonal map for tests
/// and consistency checks.
pub fn diagonal_map(vnf: &ValuationNormalForm, f: &LinearMap) -> LinearMap {
    let mut d = LinearMap::zero(f.ctx(), f.domain(), f.codomain());
    for (t, e) in vnf.diagonal.iter().enumerate() {
        d.add_entry(t, t, Scalar::monomial(f.ctx(), *e).expect("pivot below cutoff"))
            .expect("shared context");
    }
    d
}

/// The kernel-side residue comparison used by invariance tests: homology of
/// the residue complex at `T = 0` (a plain Z/2 complex).
pub fn residue_homology_rank(d: &LinearMap) -> Result<usize, LincombError> {
    if d.domain() != d.codomain() {
        return Err(LincombError::NotSquare);
    }
    let m = d.residue_matrix();
    let r = m.rank();
    Ok(d.domain().len() - 2 * r)
}

/// Applies a basis change `p ∘ d ∘ p_inv` for conjugation-invariance checks.
pub fn conjugate(d: &LinearMap, p: &LinearMap, p_inv: &LinearMap) -> Result<LinearMap, LincombError> {
    p.compose(d)?.compose(p_inv)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<HomologyReport>();
    check::<ValuationNormalForm>();
    check::<Element>();
    check::<LinearMap>();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::Basis;
    use crate::novikov::{Context, DiscreteMonoid};
    use crate::rat::{rat, rat_int};

    fn ctx(cutoff: i64) -> Ctx {
        Context::new(
            DiscreteMonoid::new([rat(1, 2)]).unwrap(),
            rat_int(cutoff),
        )
        .unwrap()
    }

    #[test]
    fn vnf_zero_map_has_no_pivots() {
        let c = ctx(2);
        let b = Basis::new("C", ["e1", "e2"]).unwrap();
        let z = LinearMap::zero(&c, &b, &b);
        let vnf = valuation_normal_form(&z);
        assert!(vnf.diagonal.is_empty());
    }

    #[test]
    fn vnf_already_diagonal() {
        let c = ctx(2);
        let b = Basis::new("C", ["e1", "e2"]).unwrap();
        let d = LinearMap::from_entries(
            &c,
            &b,
            &b,
            [((1, 0), Scalar::monomial(&c, rat(1, 2)).unwrap())],
        )
        .unwrap();
        let vnf = valuation_normal_form(&d);
        assert_eq!(vnf.diagonal, vec![rat(1, 2)]);
    }

    #[test]
    fn vnf_unit_pivot_first() {
        // d(e1) = e2 + T e3, d(e4) = T^2 e3: hand reduction gives unit pivot
        // on e2 first, then the remaining T^2 pivot.
        let c = ctx(4);
        let b = Basis::new("C", ["e1", "e2", "e3", "e4"]).unwrap();
        let d = LinearMap::from_entries(
            &c,
            &b,
            &b,
            [
                ((1, 0), Scalar::one(&c)),
                ((2, 0), Scalar::monomial(&c, rat_int(1)).unwrap()),
                ((2, 3), Scalar::monomial(&c, rat_int(2)).unwrap()),
            ],
        )
        .unwrap();
        let vnf = valuation_normal_form(&d);
        assert_eq!(vnf.diagonal, vec![rat_int(0), rat_int(2)]);
    }

    #[test]
    fn vnf_round_trip_and_unit_determinants() {
        let c = ctx(3);
        let b = Basis::new("C", ["a", "b", "c"]).unwrap();
        let one = Scalar::one(&c);
        let th = Scalar::monomial(&c, rat(1, 2)).unwrap();
        let mix = one.add(&th).unwrap();
        let f = LinearMap::from_entries(
            &c,
            &b,
            &b,
            [
                ((0, 0), th.clone()),
                ((0, 1), mix.clone()),
                ((1, 0), Scalar::monomial(&c, rat_int(1)).unwrap()),
                ((2, 2), Scalar::monomial(&c, rat(3, 2)).unwrap()),
                ((1, 2), mix),
            ],
        )
        .unwrap();
        let vnf = valuation_normal_form(&f);
        let lhs = vnf.left.compose(&f).unwrap().compose(&vnf.right).unwrap();
        assert_eq!(lhs, diagonal_map(&vnf, &f));
        assert!(vnf.left.has_unit_determinant());
        assert!(vnf.right.has_unit_determinant());
        // Recorded inverses really invert below the cutoff.
        let id = LinearMap::identity(&c, &b);
        assert_eq!(vnf.left.compose(&vnf.left_inv).unwrap(), id);
        assert_eq!(vnf.right_inv.compose(&vnf.right).unwrap(), id);
        // Ascending diagonal.
        let mut sorted = vnf.diagonal.clone();
        sorted.sort();
        assert_eq!(vnf.diagonal, sorted);
    }

    #[test]
    fn homology_of_zero_map_is_free() {
        let c = ctx(2);
        let b = Basis::new("C", ["x", "y", "z"]).unwrap();
        let z = LinearMap::zero(&c, &b, &b);
        let h = homology(&z).unwrap();
        assert_eq!(h.free_rank, 3);
        assert!(h.torsion_exponents.is_empty());
        assert_eq!(h.validity_threshold, rat_int(2));
        assert_eq!(h.to_string(), "free 3, torsion [], threshold 2");
    }

    #[test]
    fn homology_torsion_from_positive_pivot() {
        let c = ctx(2);
        let b = Basis::new("C", ["e1", "e2"]).unwrap();
        let d = LinearMap::from_entries(
            &c,
            &b,
            &b,
            [((1, 0), Scalar::monomial(&c, rat(1, 2)).unwrap())],
        )
        .unwrap();
        let h = homology(&d).unwrap();
        assert_eq!(h.free_rank, 0);
        assert_eq!(h.torsion_exponents, vec![rat(1, 2)]);
    }

    #[test]
    fn homology_acyclic_unit_pivot() {
        let c = ctx(2);
        let b = Basis::new("C", ["e1", "e2"]).unwrap();
        let d =
            LinearMap::from_entries(&c, &b, &b, [((1, 0), Scalar::one(&c))]).unwrap();
        let h = homology(&d).unwrap();
        assert_eq!(h.free_rank, 0);
        assert!(h.torsion_exponents.is_empty());
    }

    #[test]
    fn homology_rejects_non_complex() {
        let c = ctx(2);
        let b = Basis::new("C", ["e1", "e2"]).unwrap();
        let d = LinearMap::from_entries(
            &c,
            &b,
            &b,
            [((1, 0), Scalar::one(&c)), ((0, 1), Scalar::one(&c))],
        )
        .unwrap();
        let err = homology(&d).unwrap_err();
        assert!(matches!(err, LincombError::NotAComplex { .. }));
    }

    #[test]
    fn graded_reporting_with_uniform_shift() {
        let c = ctx(2);
        let b = Basis::graded("C", [("x0", 0), ("y1", 1), ("z1", 1)], 2).unwrap();
        // d(x0) = T^{1/2} y1: shift 1 mod 2.
        let d = LinearMap::from_entries(
            &c,
            &b,
            &b,
            [((1, 0), Scalar::monomial(&c, rat(1, 2)).unwrap())],
        )
        .unwrap();
        let g = homology_by_degree(&d).unwrap();
        let classes = g.classes.unwrap();
        assert_eq!(classes.len(), 2);
        // Class 0: one generator, one outgoing pivot, nothing incoming.
        assert_eq!(classes[0].0, 0);
        assert_eq!(classes[0].1.free_rank, 0);
        assert!(classes[0].1.torsion_exponents.is_empty());
        // Class 1: two generators, incoming torsion 1/2.
        assert_eq!(classes[1].0, 1);
        assert_eq!(classes[1].1.free_rank, 1);
        assert_eq!(classes[1].1.torsion_exponents, vec![rat(1, 2)]);
        // Totals agree with the aggregate computation.
        assert_eq!(g.total.free_rank, 1);
        assert_eq!(g.total.torsion_exponents, vec![rat(1, 2)]);
    }
}
