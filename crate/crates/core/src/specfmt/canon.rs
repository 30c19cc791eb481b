//! Canonical text rendering of documents, and a builder that produces
//! canonical documents from typed structures.
//!
//! Serialization always canonicalizes first, so serializing any parse
//! result is a fixed point of parse-then-serialize.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::lincomb::{Basis, Element};
use crate::novikov::Ctx;
use crate::pairing::{FloerComplexData, GluingInstance};
use crate::rat::format_rational;
use crate::structures::{
    AritySig, FilteredAlgebra, FilteredBimodule, FilteredRightModule,
};

use super::ast::*;

fn push_line(out: &mut String, toks: &[String]) {
    out.push_str(&toks.join(" "));
    out.push('\n');
}

fn body_line(out: &mut String, toks: &[String]) {
    out.push_str("  ");
    push_line(out, toks);
}

fn s(x: impl Into<String>) -> String {
    x.into()
}

/// Renders the canonical text of a document.
pub fn serialize(doc: &StructureDocument) -> String {
    let mut doc = doc.clone();
    doc.canonicalize();
    let mut out = String::new();
    push_line(&mut out, &[s("afd"), doc.version.to_string()]);
    let mut monoid = vec![s("monoid")];
    monoid.extend(doc.monoid.iter().map(format_rational));
    push_line(&mut out, &monoid);
    push_line(&mut out, &[s("cutoff"), format_rational(&doc.cutoff)]);

    for b in &doc.bases {
        out.push('\n');
        let mut head = vec![s("begin"), s("basis"), b.name.clone()];
        if let Some(m) = b.grading {
            head.push(s("mod"));
            head.push(m.to_string());
        }
        push_line(&mut out, &head);
        for (g, d) in &b.gens {
            let mut toks = vec![s("gen"), g.clone()];
            if let Some(d) = d {
                toks.push(s("deg"));
                toks.push(d.to_string());
            }
            body_line(&mut out, &toks);
        }
        push_line(&mut out, &[s("end")]);
    }

    for a in &doc.algebras {
        out.push('\n');
        push_line(&mut out, &[s("begin"), s("algebra"), a.name.clone()]);
        body_line(&mut out, &[s("basis"), a.basis.clone()]);
        for op in &a.ops {
            let mut toks = vec![
                s("op"),
                op.inputs.len().to_string(),
                s("@"),
                format_rational(&op.level),
                s(":"),
            ];
            toks.extend(op.inputs.iter().cloned());
            toks.push(s("->"));
            toks.extend(op.output.iter().cloned());
            body_line(&mut out, &toks);
        }
        push_line(&mut out, &[s("end")]);
    }

    for e in &doc.elements {
        out.push('\n');
        push_line(&mut out, &[s("begin"), s("element"), e.name.clone()]);
        body_line(&mut out, &[s("basis"), e.basis.clone()]);
        for (level, g) in &e.terms {
            body_line(&mut out, &[s("term"), format_rational(level), g.clone()]);
        }
        push_line(&mut out, &[s("end")]);
    }

    for m in &doc.modules {
        out.push('\n');
        push_line(&mut out, &[s("begin"), s("module"), m.name.clone()]);
        body_line(&mut out, &[s("algebra"), m.algebra.clone()]);
        body_line(&mut out, &[s("basis"), m.basis.clone()]);
        if let Some(c) = &m.cyclic {
            body_line(&mut out, &[s("cyclic"), c.clone()]);
        }
        for op in &m.ops {
            let mut toks = vec![
                s("op"),
                op.inputs.len().to_string(),
                s("@"),
                format_rational(&op.level),
                s(":"),
                op.y.clone(),
            ];
            toks.extend(op.inputs.iter().cloned());
            toks.push(s("->"));
            toks.extend(op.output.iter().cloned());
            body_line(&mut out, &toks);
        }
        push_line(&mut out, &[s("end")]);
    }

    for b in &doc.bimodules {
        out.push('\n');
        push_line(&mut out, &[s("begin"), s("bimodule"), b.name.clone()]);
        body_line(&mut out, &[s("left"), b.left.clone()]);
        body_line(&mut out, &[s("right"), b.right.clone()]);
        body_line(&mut out, &[s("basis"), b.basis.clone()]);
        for op in &b.ops {
            let mut toks = vec![
                s("op"),
                op.left.len().to_string(),
                op.right.len().to_string(),
                s("@"),
                format_rational(&op.level),
                s(":"),
            ];
            toks.extend(op.left.iter().cloned());
            toks.push(s("|"));
            toks.push(op.y.clone());
            toks.push(s("|"));
            toks.extend(op.right.iter().cloned());
            toks.push(s("->"));
            toks.extend(op.output.iter().cloned());
            body_line(&mut out, &toks);
        }
        push_line(&mut out, &[s("end")]);
    }

    for f in &doc.floers {
        out.push('\n');
        push_line(&mut out, &[s("begin"), s("floer"), f.name.clone()]);
        body_line(&mut out, &[s("basis"), f.basis.clone()]);
        for (from, to, energy) in &f.weights {
            body_line(
                &mut out,
                &[
                    s("weight"),
                    from.clone(),
                    to.clone(),
                    s("@"),
                    format_rational(energy),
                ],
            );
        }
        push_line(&mut out, &[s("end")]);
    }

    for g in &doc.gluings {
        out.push('\n');
        push_line(&mut out, &[s("begin"), s("gluing"), g.name.clone()]);
        body_line(&mut out, &[s("module1"), g.module1.clone()]);
        body_line(&mut out, &[s("module2"), g.module2.clone()]);
        body_line(&mut out, &[s("bimodule"), g.bimodule.clone()]);
        body_line(&mut out, &[s("floer"), g.floer.clone()]);
        for op in &g.ops {
            let mut toks = vec![
                s("op"),
                op.xs1.len().to_string(),
                op.xs2.len().to_string(),
                s("@"),
                format_rational(&op.level),
                s(":"),
                op.y1.clone(),
                s("|"),
            ];
            toks.extend(op.xs1.iter().cloned());
            toks.push(s("|"));
            toks.push(op.a.clone());
            toks.push(s("|"));
            toks.push(op.y2.clone());
            toks.push(s("|"));
            toks.extend(op.xs2.iter().cloned());
            toks.push(s("->"));
            toks.extend(op.output.iter().cloned());
            body_line(&mut out, &toks);
        }
        push_line(&mut out, &[s("end")]);
    }

    out
}

/// Builds canonical documents from typed structures; referenced structures
/// are added under caller-chosen names and bases are deduplicated by name.
pub struct DocumentBuilder {
    doc: StructureDocument,
    seen_bases: BTreeSet<String>,
}

impl DocumentBuilder {
    pub fn new(ctx: &Ctx) -> DocumentBuilder {
        DocumentBuilder {
            doc: StructureDocument::empty(
                ctx.monoid().generators().copied().collect(),
                ctx.cutoff(),
            ),
            seen_bases: BTreeSet::new(),
        }
    }

    pub fn basis(&mut self, basis: &Arc<Basis>) -> &mut Self {
        if !self.seen_bases.insert(basis.name().to_string()) {
            return self;
        }
        let grading = basis.grading().map(|g| g.modulus);
        let gens = basis
            .names()
            .enumerate()
            .map(|(i, n)| {
                (
                    n.to_string(),
                    basis.grading().map(|g| g.degrees[i]),
                )
            })
            .collect();
        self.doc.bases.push(BasisSection {
            name: basis.name().to_string(),
            grading,
            gens,
        });
        self
    }

    pub fn algebra(&mut self, name: &str, alg: &FilteredAlgebra) -> &mut Self {
        self.basis(alg.basis());
        let b = alg.basis();
        let mut ops = Vec::new();
        for (key, out) in alg.table().entries() {
            let AritySig::Algebra { .. } = key.sig else { continue };
            ops.push(AlgOp {
                level: key.level,
                inputs: key.inputs.iter().map(|i| b.gen_name(*i).to_string()).collect(),
                output: out.iter().map(|i| b.gen_name(i).to_string()).collect(),
            });
        }
        self.doc.algebras.push(AlgebraSection {
            name: name.to_string(),
            basis: b.name().to_string(),
            ops,
        });
        self
    }

    pub fn element(&mut self, name: &str, el: &Element) -> &mut Self {
        self.basis(el.basis());
        let b = el.basis();
        let mut terms = Vec::new();
        for (g, scalar) in el.terms() {
            for e in scalar.exponents() {
                terms.push((*e, b.gen_name(g).to_string()));
            }
        }
        self.doc.elements.push(ElementSection {
            name: name.to_string(),
            basis: b.name().to_string(),
            terms,
        });
        self
    }

    pub fn module(
        &mut self,
        name: &str,
        module: &FilteredRightModule,
        algebra_name: &str,
        cyclic: Option<&str>,
    ) -> &mut Self {
        self.basis(module.basis());
        let mb = module.basis();
        let ab = module.algebra().basis();
        let mut ops = Vec::new();
        for (key, out) in module.table().entries() {
            let AritySig::Module { .. } = key.sig else { continue };
            ops.push(ModOp {
                level: key.level,
                y: mb.gen_name(key.inputs[0]).to_string(),
                inputs: key.inputs[1..]
                    .iter()
                    .map(|i| ab.gen_name(*i).to_string())
                    .collect(),
                output: out.iter().map(|i| mb.gen_name(i).to_string()).collect(),
            });
        }
        self.doc.modules.push(ModuleSection {
            name: name.to_string(),
            algebra: algebra_name.to_string(),
            basis: mb.name().to_string(),
            cyclic: cyclic.map(str::to_string),
            ops,
        });
        self
    }

    pub fn bimodule(
        &mut self,
        name: &str,
        bim: &FilteredBimodule,
        left_name: &str,
        right_name: &str,
    ) -> &mut Self {
        self.basis(bim.basis());
        let pb = bim.basis();
        let lb = bim.left_algebra().basis();
        let rb = bim.right_algebra().basis();
        let mut ops = Vec::new();
        for (key, out) in bim.table().entries() {
            let AritySig::Bimodule { left, .. } = key.sig else { continue };
            ops.push(BimOp {
                level: key.level,
                left: key.inputs[..left]
                    .iter()
                    .map(|i| lb.gen_name(*i).to_string())
                    .collect(),
                y: pb.gen_name(key.inputs[left]).to_string(),
                right: key.inputs[left + 1..]
                    .iter()
                    .map(|i| rb.gen_name(*i).to_string())
                    .collect(),
                output: out.iter().map(|i| pb.gen_name(i).to_string()).collect(),
            });
        }
        self.doc.bimodules.push(BimoduleSection {
            name: name.to_string(),
            left: left_name.to_string(),
            right: right_name.to_string(),
            basis: pb.name().to_string(),
            ops,
        });
        self
    }

    pub fn floer(&mut self, name: &str, f: &FloerComplexData) -> &mut Self {
        self.basis(f.basis());
        let b = f.basis();
        let mut weights = Vec::new();
        for (from, to, energies) in f.weights() {
            for e in energies {
                weights.push((
                    b.gen_name(from).to_string(),
                    b.gen_name(to).to_string(),
                    *e,
                ));
            }
        }
        self.doc.floers.push(FloerSection {
            name: name.to_string(),
            basis: b.name().to_string(),
            weights,
        });
        self
    }

    #[allow(clippy::too_many_arguments)]
    pub fn gluing(
        &mut self,
        name: &str,
        inst: &GluingInstance,
        module1_name: &str,
        module2_name: &str,
        bimodule_name: &str,
        floer_name: &str,
    ) -> &mut Self {
        let m1 = inst.module1.basis();
        let a1 = inst.module1.algebra().basis();
        let pb = inst.bimodule.basis();
        let m2 = inst.module2.basis();
        let a2 = inst.module2.algebra().basis();
        let fb = inst.floer.basis();
        let mut ops = Vec::new();
        for (level, k1, _k2, inputs, out) in inst.tensor.components() {
            ops.push(GluOp {
                level,
                y1: m1.gen_name(inputs[0]).to_string(),
                xs1: inputs[1..1 + k1]
                    .iter()
                    .map(|i| a1.gen_name(*i).to_string())
                    .collect(),
                a: pb.gen_name(inputs[1 + k1]).to_string(),
                y2: m2.gen_name(inputs[2 + k1]).to_string(),
                xs2: inputs[3 + k1..]
                    .iter()
                    .map(|i| a2.gen_name(*i).to_string())
                    .collect(),
                output: out.iter().map(|i| fb.gen_name(i).to_string()).collect(),
            });
        }
        self.doc.gluings.push(GluingSection {
            name: name.to_string(),
            module1: module1_name.to_string(),
            module2: module2_name.to_string(),
            bimodule: bimodule_name.to_string(),
            floer: floer_name.to_string(),
            ops,
        });
        self
    }

    pub fn finish(mut self) -> StructureDocument {
        self.doc.canonicalize();
        self.doc
    }
}
