//! Machine-interchange rendering of documents as JSON with the same
//! canonical ordering as the text form. Rationals render as their canonical
//! strings.

use serde_json::{json, Value};

use crate::rat::format_rational;

use super::ast::StructureDocument;

pub fn to_json(doc: &StructureDocument) -> Value {
    let mut doc = doc.clone();
    doc.canonicalize();
    json!({
        "format_version": doc.version,
        "monoid": doc.monoid.iter().map(format_rational).collect::<Vec<_>>(),
        "cutoff": format_rational(&doc.cutoff),
        "bases": doc.bases.iter().map(|b| json!({
            "name": b.name,
            "grading": b.grading,
            "generators": b.gens.iter().map(|(g, d)| json!({
                "name": g,
                "degree": d,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "algebras": doc.algebras.iter().map(|a| json!({
            "name": a.name,
            "basis": a.basis,
            "ops": a.ops.iter().map(|op| json!({
                "arity": op.inputs.len(),
                "level": format_rational(&op.level),
                "inputs": op.inputs,
                "output": op.output,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "elements": doc.elements.iter().map(|e| json!({
            "name": e.name,
            "basis": e.basis,
            "terms": e.terms.iter().map(|(l, g)| json!({
                "level": format_rational(l),
                "generator": g,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "modules": doc.modules.iter().map(|m| json!({
            "name": m.name,
            "algebra": m.algebra,
            "basis": m.basis,
            "cyclic": m.cyclic,
            "ops": m.ops.iter().map(|op| json!({
                "arity": op.inputs.len(),
                "level": format_rational(&op.level),
                "y": op.y,
                "inputs": op.inputs,
                "output": op.output,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "bimodules": doc.bimodules.iter().map(|b| json!({
            "name": b.name,
            "left": b.left,
            "right": b.right,
            "basis": b.basis,
            "ops": b.ops.iter().map(|op| json!({
                "arity": [op.left.len(), op.right.len()],
                "level": format_rational(&op.level),
                "left": op.left,
                "y": op.y,
                "right": op.right,
                "output": op.output,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "floer": doc.floers.iter().map(|f| json!({
            "name": f.name,
            "basis": f.basis,
            "weights": f.weights.iter().map(|(from, to, e)| json!({
                "from": from,
                "to": to,
                "energy": format_rational(e),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "gluings": doc.gluings.iter().map(|g| json!({
            "name": g.name,
            "module1": g.module1,
            "module2": g.module2,
            "bimodule": g.bimodule,
            "floer": g.floer,
            "ops": g.ops.iter().map(|op| json!({
                "arity": [op.xs1.len(), op.xs2.len()],
                "level": format_rational(&op.level),
                "y1": op.y1,
                "xs1": op.xs1,
                "a": op.a,
                "y2": op.y2,
                "xs2": op.xs2,
                "output": op.output,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}
