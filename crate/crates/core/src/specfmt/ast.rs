//! Document model of the `.afd` structure-description format.
//!
//! A document is canonical when its sections are grouped by kind in the
//! fixed order (bases, algebras, elements, modules, bimodules, floer data,
//! gluings), sorted by name within each kind, and every entry list is
//! sorted by (level, arity, input tuple). [`super::serialize`] always emits
//! canonical text; the parser accepts any order that still defines names
//! before use.


use crate::rat::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureDocument {
    pub version: u32,
    pub monoid: Vec<Rational>,
    pub cutoff: Rational,
    pub bases: Vec<BasisSection>,
    pub algebras: Vec<AlgebraSection>,
    pub elements: Vec<ElementSection>,
    pub modules: Vec<ModuleSection>,
    pub bimodules: Vec<BimoduleSection>,
    pub floers: Vec<FloerSection>,
    pub gluings: Vec<GluingSection>,
}

impl StructureDocument {
    pub fn empty(monoid: Vec<Rational>, cutoff: Rational) -> StructureDocument {
        StructureDocument {
            version: super::FORMAT_VERSION,
            monoid,
            cutoff,
            bases: Vec::new(),
            algebras: Vec::new(),
            elements: Vec::new(),
            modules: Vec::new(),
            bimodules: Vec::new(),
            floers: Vec::new(),
            gluings: Vec::new(),
        }
    }

    /// Sorts every section and entry list into the canonical order. Output
    /// lists sort by generator name (they are Z/2 sets); input tuples keep
    /// their order, which is semantic.
    pub fn canonicalize(&mut self) {
        self.monoid.sort();
        self.monoid.dedup();
        for a in &mut self.algebras {
            a.ops.iter_mut().for_each(|op| op.output.sort());
        }
        for m in &mut self.modules {
            m.ops.iter_mut().for_each(|op| op.output.sort());
        }
        for b in &mut self.bimodules {
            b.ops.iter_mut().for_each(|op| op.output.sort());
        }
        for g in &mut self.gluings {
            g.ops.iter_mut().for_each(|op| op.output.sort());
        }
        self.bases.sort_by(|a, b| a.name.cmp(&b.name));
        self.algebras.sort_by(|a, b| a.name.cmp(&b.name));
        self.elements.sort_by(|a, b| a.name.cmp(&b.name));
        self.modules.sort_by(|a, b| a.name.cmp(&b.name));
        self.bimodules.sort_by(|a, b| a.name.cmp(&b.name));
        self.floers.sort_by(|a, b| a.name.cmp(&b.name));
        self.gluings.sort_by(|a, b| a.name.cmp(&b.name));
        for a in &mut self.algebras {
            a.ops
                .sort_by(|x, y| (x.level, x.inputs.len(), &x.inputs).cmp(&(y.level, y.inputs.len(), &y.inputs)));
        }
        for e in &mut self.elements {
            e.terms.sort();
        }
        for m in &mut self.modules {
            m.ops.sort_by(|x, y| {
                (x.level, x.inputs.len(), &x.y, &x.inputs)
                    .cmp(&(y.level, y.inputs.len(), &y.y, &y.inputs))
            });
        }
        for b in &mut self.bimodules {
            b.ops.sort_by(|x, y| {
                (
                    x.level,
                    x.left.len() + x.right.len(),
                    x.left.len(),
                    &x.left,
                    &x.y,
                    &x.right,
                )
                    .cmp(&(
                        y.level,
                        y.left.len() + y.right.len(),
                        y.left.len(),
                        &y.left,
                        &y.y,
                        &y.right,
                    ))
            });
        }
        for f in &mut self.floers {
            f.weights.sort();
        }
        for g in &mut self.gluings {
            g.ops.sort_by(|x, y| {
                (
                    x.level,
                    x.xs1.len() + x.xs2.len(),
                    x.xs1.len(),
                    &x.y1,
                    &x.xs1,
                    &x.a,
                    &x.y2,
                    &x.xs2,
                )
                    .cmp(&(
                        y.level,
                        y.xs1.len() + y.xs2.len(),
                        y.xs1.len(),
                        &y.y1,
                        &y.xs1,
                        &y.a,
                        &y.y2,
                        &y.xs2,
                    ))
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisSection {
    pub name: String,
    /// Grading modulus; absent means ungraded.
    pub grading: Option<i64>,
    /// Generator names with degrees (present exactly when graded).
    pub gens: Vec<(String, Option<i64>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSection {
    pub name: String,
    pub basis: String,
    pub ops: Vec<AlgOp>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgOp {
    pub level: Rational,
    pub inputs: Vec<String>,
    pub output: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSection {
    pub name: String,
    pub basis: String,
    pub terms: Vec<(Rational, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSection {
    pub name: String,
    pub algebra: String,
    pub basis: String,
    pub cyclic: Option<String>,
    pub ops: Vec<ModOp>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModOp {
    pub level: Rational,
    pub y: String,
    pub inputs: Vec<String>,
    pub output: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimoduleSection {
    pub name: String,
    pub left: String,
    pub right: String,
    pub basis: String,
    pub ops: Vec<BimOp>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimOp {
    pub level: Rational,
    pub left: Vec<String>,
    pub y: String,
    pub right: Vec<String>,
    pub output: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloerSection {
    pub name: String,
    pub basis: String,
    /// `(a-, a+, energy)` with Z/2 multiplicity one.
    pub weights: Vec<(String, String, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingSection {
    pub name: String,
    pub module1: String,
    pub module2: String,
    pub bimodule: String,
    pub floer: String,
    pub ops: Vec<GluOp>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluOp {
    pub level: Rational,
    pub y1: String,
    pub xs1: Vec<String>,
    pub a: String,
    pub y2: String,
    pub xs2: Vec<String>,
    pub output: Vec<String>,
}
