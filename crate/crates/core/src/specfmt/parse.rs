//! Strict line-based parser for `.afd` documents.
//!
//! Parsing is total: every failure is a [`Diagnostic`] with a 1-based line
//! and column, a stable code, and a reason. Names must be defined before
//! use; section names share one global namespace; generator names are
//! scoped to their basis. Every energy level is checked for membership in
//! the declared monoid and against the cutoff at the line that mentions it.

use std::collections::{BTreeMap, BTreeSet};

use crate::novikov::DiscreteMonoid;
use crate::rat::{parse_rational, Rational};

use super::ast::*;
use super::{Diagnostic, DiagnosticCode};

type Tok = (usize, String);

fn tokenize(line: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut cur = String::new();
    for (i, ch) in line.chars().enumerate() {
        if ch.is_whitespace() {
            if !cur.is_empty() {
                out.push((start + 1, std::mem::take(&mut cur)));
            }
        } else {
            if cur.is_empty() {
                start = i;
            }
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push((start + 1, cur));
    }
    out
}

fn diag(line: usize, col: usize, code: DiagnosticCode, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        line,
        col,
        code,
        message: message.into(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct LineStream<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    total: usize,
}

impl<'a> LineStream<'a> {
    fn new(text: &'a str) -> LineStream<'a> {
        LineStream {
            lines: text.lines().enumerate(),
            total: text.lines().count(),
        }
    }

    /// Next significant line (skipping blanks and full-line comments).
    fn next(&mut self) -> Option<(usize, Vec<Tok>)> {
        for (idx, line) in self.lines.by_ref() {
            let toks = tokenize(line);
            match toks.first() {
                None => continue,
                Some((_, t)) if t.starts_with('#') => continue,
                _ => return Some((idx + 1, toks)),
            }
        }
        None
    }
}

/// Reference information gathered while parsing, for definition-before-use
/// resolution.
#[derive(Default)]
struct Names {
    kinds: BTreeMap<String, &'static str>,
    /// basis name -> (generator set, graded?)
    bases: BTreeMap<String, (BTreeSet<String>, bool)>,
    /// algebra name -> basis
    algebras: BTreeMap<String, String>,
    /// element name -> basis
    elements: BTreeMap<String, String>,
    /// module name -> (algebra, basis)
    modules: BTreeMap<String, (String, String)>,
    /// bimodule name -> (left algebra, right algebra, basis)
    bimodules: BTreeMap<String, (String, String, String)>,
    /// floer name -> basis
    floers: BTreeMap<String, String>,
}

impl Names {
    fn declare(
        &mut self,
        name: &str,
        kind: &'static str,
        line: usize,
        col: usize,
    ) -> Result<(), Diagnostic> {
        if self.kinds.insert(name.to_string(), kind).is_some() {
            return Err(diag(
                line,
                col,
                DiagnosticCode::DuplicateName,
                format!("name `{name}` is already defined"),
            ));
        }
        Ok(())
    }

    fn basis_gens(&self, name: &str, line: usize, col: usize) -> Result<&BTreeSet<String>, Diagnostic> {
        self.bases
            .get(name)
            .map(|(g, _)| g)
            .ok_or_else(|| {
                diag(
                    line,
                    col,
                    DiagnosticCode::UnresolvedName,
                    format!("`{name}` is not a defined basis"),
                )
            })
    }

    fn resolve_gen(
        &self,
        basis: &str,
        gen: &str,
        line: usize,
        col: usize,
    ) -> Result<(), Diagnostic> {
        let gens = self.basis_gens(basis, line, col)?;
        if gens.contains(gen) {
            Ok(())
        } else {
            Err(diag(
                line,
                col,
                DiagnosticCode::UnresolvedName,
                format!("`{gen}` is not a generator of basis `{basis}`"),
            ))
        }
    }
}

struct Parser {
    monoid: DiscreteMonoid,
    cutoff: Rational,
    names: Names,
}

impl Parser {
    fn rational(&self, line: usize, tok: &Tok) -> Result<Rational, Diagnostic> {
        parse_rational(&tok.1)
            .map_err(|e| diag(line, tok.0, DiagnosticCode::BadRational, e))
    }

    fn level(&self, line: usize, tok: &Tok) -> Result<Rational, Diagnostic> {
        let r = self.rational(line, tok)?;
        if !self.monoid.contains(&r) {
            return Err(diag(
                line,
                tok.0,
                DiagnosticCode::LevelNotInMonoid,
                format!("level {} is not in the declared monoid", tok.1),
            ));
        }
        if r >= self.cutoff {
            return Err(diag(
                line,
                tok.0,
                DiagnosticCode::LevelAboveCutoff,
                format!("level {} is at or above the cutoff", tok.1),
            ));
        }
        Ok(r)
    }
}

fn expect(toks: &[Tok], pos: usize, what: &str, line: usize) -> Result<Tok, Diagnostic> {
    toks.get(pos).cloned().ok_or_else(|| {
        let col = toks.last().map(|(c, t)| c + t.chars().count()).unwrap_or(1);
        diag(line, col, DiagnosticCode::Syntax, format!("expected {what}"))
    })
}

fn expect_literal(toks: &[Tok], pos: usize, lit: &str, line: usize) -> Result<(), Diagnostic> {
    let t = expect(toks, pos, &format!("`{lit}`"), line)?;
    if t.1 == lit {
        Ok(())
    } else {
        Err(diag(
            line,
            t.0,
            DiagnosticCode::Syntax,
            format!("expected `{lit}`, found `{}`", t.1),
        ))
    }
}

fn expect_ident(toks: &[Tok], pos: usize, what: &str, line: usize) -> Result<Tok, Diagnostic> {
    let t = expect(toks, pos, what, line)?;
    if is_ident(&t.1) {
        Ok(t)
    } else {
        Err(diag(
            line,
            t.0,
            DiagnosticCode::Syntax,
            format!("`{}` is not a valid {what} name", t.1),
        ))
    }
}

fn expect_end(toks: &[Tok], pos: usize, line: usize) -> Result<(), Diagnostic> {
    if let Some(t) = toks.get(pos) {
        return Err(diag(
            line,
            t.0,
            DiagnosticCode::Syntax,
            format!("unexpected trailing token `{}`", t.1),
        ));
    }
    Ok(())
}

fn parse_usize(tok: &Tok, line: usize) -> Result<usize, Diagnostic> {
    tok.1.parse::<usize>().map_err(|_| {
        diag(
            line,
            tok.0,
            DiagnosticCode::Syntax,
            format!("`{}` is not a nonnegative integer", tok.1),
        )
    })
}

/// Splits the tokens of an op line at `:` and `->`, returning
/// (head, lhs, rhs).
fn split_op<'t>(
    toks: &'t [Tok],
    line: usize,
) -> Result<(&'t [Tok], &'t [Tok], &'t [Tok]), Diagnostic> {
    let colon = toks.iter().position(|(_, t)| t == ":").ok_or_else(|| {
        diag(line, 1, DiagnosticCode::Syntax, "op line is missing `:`")
    })?;
    let arrow = toks.iter().position(|(_, t)| t == "->").ok_or_else(|| {
        diag(line, 1, DiagnosticCode::Syntax, "op line is missing `->`")
    })?;
    if arrow < colon {
        return Err(diag(
            line,
            toks[arrow].0,
            DiagnosticCode::Syntax,
            "`->` before `:`",
        ));
    }
    Ok((&toks[..colon], &toks[colon + 1..arrow], &toks[arrow + 1..]))
}

/// Splits a token slice on `|` tokens into groups.
fn split_pipes(toks: &[Tok]) -> Vec<Vec<Tok>> {
    let mut groups = vec![Vec::new()];
    for t in toks {
        if t.1 == "|" {
            groups.push(Vec::new());
        } else {
            groups.last_mut().expect("nonempty").push(t.clone());
        }
    }
    groups
}

/// Parses op head tokens `op <k1> [<k2>] @ <level>`.
fn parse_op_head(
    p: &Parser,
    head: &[Tok],
    arities: usize,
    line: usize,
) -> Result<(Vec<usize>, Rational), Diagnostic> {
    let mut ks = Vec::new();
    for i in 0..arities {
        ks.push(parse_usize(&expect(head, 1 + i, "arity", line)?, line)?);
    }
    expect_literal(head, 1 + arities, "@", line)?;
    let level_tok = expect(head, 2 + arities, "energy level", line)?;
    expect_end(head, 3 + arities, line)?;
    let level = p.level(line, &level_tok)?;
    Ok((ks, level))
}

fn gen_list(
    p: &Parser,
    basis: &str,
    toks: &[Tok],
    line: usize,
) -> Result<Vec<String>, Diagnostic> {
    let mut out = Vec::new();
    for t in toks {
        p.names.resolve_gen(basis, &t.1, line, t.0)?;
        out.push(t.1.clone());
    }
    Ok(out)
}

fn nonempty_output(
    p: &Parser,
    basis: &str,
    toks: &[Tok],
    line: usize,
) -> Result<Vec<String>, Diagnostic> {
    if toks.is_empty() {
        return Err(diag(
            line,
            1,
            DiagnosticCode::Syntax,
            "empty output list (omit the entry instead)",
        ));
    }
    let mut seen = BTreeSet::new();
    for t in toks {
        if !seen.insert(&t.1) {
            return Err(diag(
                line,
                t.0,
                DiagnosticCode::Syntax,
                format!("repeated output generator `{}` (coefficients are Z/2)", t.1),
            ));
        }
    }
    gen_list(p, basis, toks, line)
}

pub fn parse(text: &str) -> Result<StructureDocument, Diagnostic> {
    let mut stream = LineStream::new(text);
    let last_line = stream.total.max(1);

    // Header: version, monoid, cutoff.
    let (vline, vtoks) = stream.next().ok_or_else(|| {
        diag(1, 1, DiagnosticCode::MissingField, "empty document: expected `afd <version>`")
    })?;
    expect_literal(&vtoks, 0, "afd", vline)?;
    let vt = expect(&vtoks, 1, "format version", vline)?;
    expect_end(&vtoks, 2, vline)?;
    let version: u32 = vt.1.parse().map_err(|_| {
        diag(vline, vt.0, DiagnosticCode::Syntax, "version must be an integer")
    })?;
    if version != super::FORMAT_VERSION {
        return Err(diag(
            vline,
            vt.0,
            DiagnosticCode::UnsupportedVersion,
            format!("unsupported format version {version}, expected {}", super::FORMAT_VERSION),
        ));
    }

    let (mline, mtoks) = stream.next().ok_or_else(|| {
        diag(vline, 1, DiagnosticCode::MissingField, "expected `monoid <generators>`")
    })?;
    expect_literal(&mtoks, 0, "monoid", mline)?;
    let mut monoid_gens = Vec::new();
    for t in &mtoks[1..] {
        let r = parse_rational(&t.1)
            .map_err(|e| diag(mline, t.0, DiagnosticCode::BadRational, e))?;
        if r <= Rational::from_integer(0) {
            return Err(diag(
                mline,
                t.0,
                DiagnosticCode::NonPositiveGenerator,
                format!("monoid generator {} must be strictly positive", t.1),
            ));
        }
        monoid_gens.push(r);
    }
    let monoid = DiscreteMonoid::new(monoid_gens.iter().copied())
        .expect("generators validated positive");

    let (cline, ctoks) = stream.next().ok_or_else(|| {
        diag(mline, 1, DiagnosticCode::MissingField, "expected `cutoff <rational>`")
    })?;
    expect_literal(&ctoks, 0, "cutoff", cline)?;
    let cut_tok = expect(&ctoks, 1, "cutoff value", cline)?;
    expect_end(&ctoks, 2, cline)?;
    let cutoff = parse_rational(&cut_tok.1)
        .map_err(|e| diag(cline, cut_tok.0, DiagnosticCode::BadRational, e))?;
    if cutoff <= Rational::from_integer(0) {
        return Err(diag(
            cline,
            cut_tok.0,
            DiagnosticCode::Syntax,
            "cutoff must be strictly positive",
        ));
    }

    let mut p = Parser {
        monoid,
        cutoff,
        names: Names::default(),
    };
    let mut doc = StructureDocument::empty(monoid_gens, cutoff);
    doc.version = version;

    // Sections.
    while let Some((line, toks)) = stream.next() {
        expect_literal(&toks, 0, "begin", line)?;
        let kind_tok = expect(&toks, 1, "section kind", line)?;
        let name_tok = expect_ident(&toks, 2, "section", line)?;
        let name = name_tok.1.clone();
        match kind_tok.1.as_str() {
            "basis" => {
                let grading = match toks.get(3) {
                    None => None,
                    Some((c, t)) if t == "mod" => {
                        let m = expect(&toks, 4, "grading modulus", line)?;
                        expect_end(&toks, 5, line)?;
                        let modulus: i64 = m.1.parse().map_err(|_| {
                            diag(line, m.0, DiagnosticCode::Syntax, "modulus must be an integer")
                        })?;
                        if modulus < 1 {
                            return Err(diag(
                                line,
                                *c,
                                DiagnosticCode::GradingMismatch,
                                "grading modulus must be at least 1",
                            ));
                        }
                        Some(modulus)
                    }
                    Some((c, t)) => {
                        return Err(diag(
                            line,
                            *c,
                            DiagnosticCode::Syntax,
                            format!("unexpected token `{t}` after basis name"),
                        ))
                    }
                };
                p.names.declare(&name, "basis", line, name_tok.0)?;
                let section = parse_basis(&mut stream, &name, grading, line, last_line)?;
                p.names.bases.insert(
                    name.clone(),
                    (
                        section.gens.iter().map(|(g, _)| g.clone()).collect(),
                        grading.is_some(),
                    ),
                );
                doc.bases.push(section);
            }
            "algebra" => {
                expect_end(&toks, 3, line)?;
                p.names.declare(&name, "algebra", line, name_tok.0)?;
                let section = parse_algebra(&mut stream, &p, &name, line, last_line)?;
                p.names
                    .algebras
                    .insert(name.clone(), section.basis.clone());
                doc.algebras.push(section);
            }
            "element" => {
                expect_end(&toks, 3, line)?;
                p.names.declare(&name, "element", line, name_tok.0)?;
                let section = parse_element(&mut stream, &p, &name, line, last_line)?;
                p.names
                    .elements
                    .insert(name.clone(), section.basis.clone());
                doc.elements.push(section);
            }
            "module" => {
                expect_end(&toks, 3, line)?;
                p.names.declare(&name, "module", line, name_tok.0)?;
                let section = parse_module(&mut stream, &p, &name, line, last_line)?;
                p.names.modules.insert(
                    name.clone(),
                    (section.algebra.clone(), section.basis.clone()),
                );
                doc.modules.push(section);
            }
            "bimodule" => {
                expect_end(&toks, 3, line)?;
                p.names.declare(&name, "bimodule", line, name_tok.0)?;
                let section = parse_bimodule(&mut stream, &p, &name, line, last_line)?;
                p.names.bimodules.insert(
                    name.clone(),
                    (
                        section.left.clone(),
                        section.right.clone(),
                        section.basis.clone(),
                    ),
                );
                doc.bimodules.push(section);
            }
            "floer" => {
                expect_end(&toks, 3, line)?;
                p.names.declare(&name, "floer", line, name_tok.0)?;
                let section = parse_floer(&mut stream, &p, &name, line, last_line)?;
                p.names.floers.insert(name.clone(), section.basis.clone());
                doc.floers.push(section);
            }
            "gluing" => {
                expect_end(&toks, 3, line)?;
                p.names.declare(&name, "gluing", line, name_tok.0)?;
                let section = parse_gluing(&mut stream, &p, &name, line, last_line)?;
                doc.gluings.push(section);
            }
            other => {
                return Err(diag(
                    line,
                    kind_tok.0,
                    DiagnosticCode::UnknownSection,
                    format!("unknown section kind `{other}`"),
                ))
            }
        }
    }
    Ok(doc)
}

fn unterminated(name: &str, line: usize) -> Diagnostic {
    diag(
        line,
        1,
        DiagnosticCode::Syntax,
        format!("section `{name}` is not terminated by `end`"),
    )
}

fn parse_basis(
    stream: &mut LineStream,
    name: &str,
    grading: Option<i64>,
    begin_line: usize,
    last_line: usize,
) -> Result<BasisSection, Diagnostic> {
    let mut gens: Vec<(String, Option<i64>)> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    while let Some((line, toks)) = stream.next() {
        match toks[0].1.as_str() {
            "end" => {
                expect_end(&toks, 1, line)?;
                return Ok(BasisSection {
                    name: name.to_string(),
                    grading,
                    gens,
                });
            }
            "gen" => {
                let g = expect_ident(&toks, 1, "generator", line)?;
                let deg = match toks.get(2) {
                    None => None,
                    Some((_, t)) if t == "deg" => {
                        let d = expect(&toks, 3, "degree", line)?;
                        expect_end(&toks, 4, line)?;
                        Some(d.1.parse::<i64>().map_err(|_| {
                            diag(line, d.0, DiagnosticCode::Syntax, "degree must be an integer")
                        })?)
                    }
                    Some((c, t)) => {
                        return Err(diag(
                            line,
                            *c,
                            DiagnosticCode::Syntax,
                            format!("unexpected token `{t}`"),
                        ))
                    }
                };
                match (grading.is_some(), deg.is_some()) {
                    (true, false) => {
                        return Err(diag(
                            line,
                            toks[0].0,
                            DiagnosticCode::GradingMismatch,
                            format!("generator `{}` needs a degree in a graded basis", g.1),
                        ))
                    }
                    (false, true) => {
                        return Err(diag(
                            line,
                            toks[0].0,
                            DiagnosticCode::GradingMismatch,
                            format!("generator `{}` has a degree in an ungraded basis", g.1),
                        ))
                    }
                    _ => {}
                }
                if !seen.insert(g.1.clone()) {
                    return Err(diag(
                        line,
                        g.0,
                        DiagnosticCode::DuplicateName,
                        format!("duplicate generator `{}`", g.1),
                    ));
                }
                gens.push((g.1, deg));
            }
            other => {
                return Err(diag(
                    line,
                    toks[0].0,
                    DiagnosticCode::UnknownDirective,
                    format!("unknown directive `{other}` in basis section"),
                ))
            }
        }
    }
    Err(unterminated(name, begin_line.max(last_line)))
}

fn require_field(
    field: &Option<String>,
    what: &str,
    section: &str,
    line: usize,
) -> Result<String, Diagnostic> {
    field.clone().ok_or_else(|| {
        diag(
            line,
            1,
            DiagnosticCode::MissingField,
            format!("section `{section}` needs `{what}` before this line"),
        )
    })
}

fn resolve_ref<'m>(
    map: &'m BTreeMap<String, String>,
    tok: &Tok,
    what: &str,
    line: usize,
) -> Result<&'m String, Diagnostic> {
    map.get(&tok.1).ok_or_else(|| {
        diag(
            line,
            tok.0,
            DiagnosticCode::UnresolvedName,
            format!("`{}` is not a defined {what}", tok.1),
        )
    })
}

fn parse_algebra(
    stream: &mut LineStream,
    p: &Parser,
    name: &str,
    begin_line: usize,
    last_line: usize,
) -> Result<AlgebraSection, Diagnostic> {
    let mut basis: Option<String> = None;
    let mut ops: Vec<AlgOp> = Vec::new();
    let mut keys: BTreeSet<(Rational, Vec<String>)> = BTreeSet::new();
    while let Some((line, toks)) = stream.next() {
        match toks[0].1.as_str() {
            "end" => {
                expect_end(&toks, 1, line)?;
                let basis = require_field(&basis, "basis", name, line)?;
                return Ok(AlgebraSection {
                    name: name.to_string(),
                    basis,
                    ops,
                });
            }
            "basis" => {
                let b = expect(&toks, 1, "basis name", line)?;
                expect_end(&toks, 2, line)?;
                p.names.basis_gens(&b.1, line, b.0)?;
                basis = Some(b.1);
            }
            "op" => {
                let basis = require_field(&basis, "basis", name, line)?;
                let (head, lhs, rhs) = split_op(&toks, line)?;
                let (ks, level) = parse_op_head(p, head, 1, line)?;
                if lhs.len() != ks[0] {
                    return Err(diag(
                        line,
                        head[1].0,
                        DiagnosticCode::ArityMismatch,
                        format!("declared arity {} but {} inputs listed", ks[0], lhs.len()),
                    ));
                }
                let inputs = gen_list(p, &basis, lhs, line)?;
                let output = nonempty_output(p, &basis, rhs, line)?;
                if !keys.insert((level, inputs.clone())) {
                    return Err(diag(
                        line,
                        toks[0].0,
                        DiagnosticCode::DuplicateEntry,
                        "duplicate operation entry",
                    ));
                }
                ops.push(AlgOp {
                    level,
                    inputs,
                    output,
                });
            }
            other => {
                return Err(diag(
                    line,
                    toks[0].0,
                    DiagnosticCode::UnknownDirective,
                    format!("unknown directive `{other}` in algebra section"),
                ))
            }
        }
    }
    Err(unterminated(name, begin_line.max(last_line)))
}

fn parse_element(
    stream: &mut LineStream,
    p: &Parser,
    name: &str,
    begin_line: usize,
    last_line: usize,
) -> Result<ElementSection, Diagnostic> {
    let mut basis: Option<String> = None;
    let mut terms: Vec<(Rational, String)> = Vec::new();
    let mut seen: BTreeSet<(Rational, String)> = BTreeSet::new();
    while let Some((line, toks)) = stream.next() {
        match toks[0].1.as_str() {
            "end" => {
                expect_end(&toks, 1, line)?;
                let basis = require_field(&basis, "basis", name, line)?;
                return Ok(ElementSection {
                    name: name.to_string(),
                    basis,
                    terms,
                });
            }
            "basis" => {
                let b = expect(&toks, 1, "basis name", line)?;
                expect_end(&toks, 2, line)?;
                p.names.basis_gens(&b.1, line, b.0)?;
                basis = Some(b.1);
            }
            "term" => {
                let basis = require_field(&basis, "basis", name, line)?;
                let level_tok = expect(&toks, 1, "term level", line)?;
                let gen_tok = expect(&toks, 2, "generator", line)?;
                expect_end(&toks, 3, line)?;
                let level = p.level(line, &level_tok)?;
                p.names.resolve_gen(&basis, &gen_tok.1, line, gen_tok.0)?;
                if !seen.insert((level, gen_tok.1.clone())) {
                    return Err(diag(
                        line,
                        toks[0].0,
                        DiagnosticCode::DuplicateEntry,
                        "duplicate element term",
                    ));
                }
                terms.push((level, gen_tok.1));
            }
            other => {
                return Err(diag(
                    line,
                    toks[0].0,
                    DiagnosticCode::UnknownDirective,
                    format!("unknown directive `{other}` in element section"),
                ))
            }
        }
    }
    Err(unterminated(name, begin_line.max(last_line)))
}

fn parse_module(
    stream: &mut LineStream,
    p: &Parser,
    name: &str,
    begin_line: usize,
    last_line: usize,
) -> Result<ModuleSection, Diagnostic> {
    let mut algebra: Option<String> = None;
    let mut basis: Option<String> = None;
    let mut cyclic: Option<String> = None;
    let mut ops: Vec<ModOp> = Vec::new();
    let mut keys: BTreeSet<(Rational, String, Vec<String>)> = BTreeSet::new();
    while let Some((line, toks)) = stream.next() {
        match toks[0].1.as_str() {
            "end" => {
                expect_end(&toks, 1, line)?;
                let algebra = require_field(&algebra, "algebra", name, line)?;
                let basis = require_field(&basis, "basis", name, line)?;
                return Ok(ModuleSection {
                    name: name.to_string(),
                    algebra,
                    basis,
                    cyclic,
                    ops,
                });
            }
            "algebra" => {
                let a = expect(&toks, 1, "algebra name", line)?;
                expect_end(&toks, 2, line)?;
                resolve_ref(&p.names.algebras, &a, "algebra", line)?;
                algebra = Some(a.1);
            }
            "basis" => {
                let b = expect(&toks, 1, "basis name", line)?;
                expect_end(&toks, 2, line)?;
                p.names.basis_gens(&b.1, line, b.0)?;
                basis = Some(b.1);
            }
            "cyclic" => {
                let basis_name = require_field(&basis, "basis", name, line)?;
                let e = expect(&toks, 1, "element name", line)?;
                expect_end(&toks, 2, line)?;
                let elem_basis = resolve_ref(&p.names.elements, &e, "element", line)?;
                if *elem_basis != basis_name {
                    return Err(diag(
                        line,
                        e.0,
                        DiagnosticCode::BasisMismatch,
                        format!(
                            "cyclic element `{}` lives over basis `{elem_basis}`, module over `{basis_name}`",
                            e.1
                        ),
                    ));
                }
                cyclic = Some(e.1);
            }
            "op" => {
                let algebra = require_field(&algebra, "algebra", name, line)?;
                let basis = require_field(&basis, "basis", name, line)?;
                let alg_basis = p.names.algebras.get(&algebra).expect("validated").clone();
                let (head, lhs, rhs) = split_op(&toks, line)?;
                let (ks, level) = parse_op_head(p, head, 1, line)?;
                if lhs.len() != ks[0] + 1 {
                    return Err(diag(
                        line,
                        head[1].0,
                        DiagnosticCode::ArityMismatch,
                        format!(
                            "declared arity {} needs {} input slots (y plus inputs), got {}",
                            ks[0],
                            ks[0] + 1,
                            lhs.len()
                        ),
                    ));
                }
                let y_tok = &lhs[0];
                p.names.resolve_gen(&basis, &y_tok.1, line, y_tok.0)?;
                let inputs = gen_list(p, &alg_basis, &lhs[1..], line)?;
                let output = nonempty_output(p, &basis, rhs, line)?;
                if !keys.insert((level, y_tok.1.clone(), inputs.clone())) {
                    return Err(diag(
                        line,
                        toks[0].0,
                        DiagnosticCode::DuplicateEntry,
                        "duplicate operation entry",
                    ));
                }
                ops.push(ModOp {
                    level,
                    y: y_tok.1.clone(),
                    inputs,
                    output,
                });
            }
            other => {
                return Err(diag(
                    line,
                    toks[0].0,
                    DiagnosticCode::UnknownDirective,
                    format!("unknown directive `{other}` in module section"),
                ))
            }
        }
    }
    Err(unterminated(name, begin_line.max(last_line)))
}

fn parse_bimodule(
    stream: &mut LineStream,
    p: &Parser,
    name: &str,
    begin_line: usize,
    last_line: usize,
) -> Result<BimoduleSection, Diagnostic> {
    let mut left: Option<String> = None;
    let mut right: Option<String> = None;
    let mut basis: Option<String> = None;
    let mut ops: Vec<BimOp> = Vec::new();
    let mut keys: BTreeSet<(Rational, Vec<String>, String, Vec<String>)> = BTreeSet::new();
    while let Some((line, toks)) = stream.next() {
        match toks[0].1.as_str() {
            "end" => {
                expect_end(&toks, 1, line)?;
                let left = require_field(&left, "left", name, line)?;
                let right = require_field(&right, "right", name, line)?;
                let basis = require_field(&basis, "basis", name, line)?;
                return Ok(BimoduleSection {
                    name: name.to_string(),
                    left,
                    right,
                    basis,
                    ops,
                });
            }
            "left" => {
                let a = expect(&toks, 1, "algebra name", line)?;
                expect_end(&toks, 2, line)?;
                resolve_ref(&p.names.algebras, &a, "algebra", line)?;
                left = Some(a.1);
            }
            "right" => {
                let a = expect(&toks, 1, "algebra name", line)?;
                expect_end(&toks, 2, line)?;
                resolve_ref(&p.names.algebras, &a, "algebra", line)?;
                right = Some(a.1);
            }
            "basis" => {
                let b = expect(&toks, 1, "basis name", line)?;
                expect_end(&toks, 2, line)?;
                p.names.basis_gens(&b.1, line, b.0)?;
                basis = Some(b.1);
            }
            "op" => {
                let left_a = require_field(&left, "left", name, line)?;
                let right_a = require_field(&right, "right", name, line)?;
                let basis = require_field(&basis, "basis", name, line)?;
                let lb = p.names.algebras.get(&left_a).expect("validated").clone();
                let rb = p.names.algebras.get(&right_a).expect("validated").clone();
                let (head, lhs, rhs) = split_op(&toks, line)?;
                let (ks, level) = parse_op_head(p, head, 2, line)?;
                let groups = split_pipes(lhs);
                if groups.len() != 3 {
                    return Err(diag(
                        line,
                        toks[0].0,
                        DiagnosticCode::Syntax,
                        "bimodule op needs `left | y | right` input groups",
                    ));
                }
                if groups[0].len() != ks[0] || groups[2].len() != ks[1] {
                    return Err(diag(
                        line,
                        head[1].0,
                        DiagnosticCode::ArityMismatch,
                        format!(
                            "declared arities ({},{}) but ({},{}) inputs listed",
                            ks[0],
                            ks[1],
                            groups[0].len(),
                            groups[2].len()
                        ),
                    ));
                }
                if groups[1].len() != 1 {
                    return Err(diag(
                        line,
                        toks[0].0,
                        DiagnosticCode::Syntax,
                        "bimodule op needs exactly one module input between pipes",
                    ));
                }
                let lefts = gen_list(p, &lb, &groups[0], line)?;
                let y_tok = &groups[1][0];
                p.names.resolve_gen(&basis, &y_tok.1, line, y_tok.0)?;
                let rights = gen_list(p, &rb, &groups[2], line)?;
                let output = nonempty_output(p, &basis, rhs, line)?;
                if !keys.insert((level, lefts.clone(), y_tok.1.clone(), rights.clone())) {
                    return Err(diag(
                        line,
                        toks[0].0,
                        DiagnosticCode::DuplicateEntry,
                        "duplicate operation entry",
                    ));
                }
                ops.push(BimOp {
                    level,
                    left: lefts,
                    y: y_tok.1.clone(),
                    right: rights,
                    output,
                });
            }
            other => {
                return Err(diag(
                    line,
                    toks[0].0,
                    DiagnosticCode::UnknownDirective,
                    format!("unknown directive `{other}` in bimodule section"),
                ))
            }
        }
    }
    Err(unterminated(name, begin_line.max(last_line)))
}

fn parse_floer(
    stream: &mut LineStream,
    p: &Parser,
    name: &str,
    begin_line: usize,
    last_line: usize,
) -> Result<FloerSection, Diagnostic> {
    let mut basis: Option<String> = None;
    let mut weights: Vec<(String, String, Rational)> = Vec::new();
    let mut seen: BTreeSet<(String, String, Rational)> = BTreeSet::new();
    while let Some((line, toks)) = stream.next() {
        match toks[0].1.as_str() {
            "end" => {
                expect_end(&toks, 1, line)?;
                let basis = require_field(&basis, "basis", name, line)?;
                return Ok(FloerSection {
                    name: name.to_string(),
                    basis,
                    weights,
                });
            }
            "basis" => {
                let b = expect(&toks, 1, "basis name", line)?;
                expect_end(&toks, 2, line)?;
                p.names.basis_gens(&b.1, line, b.0)?;
                basis = Some(b.1);
            }
            "weight" => {
                let basis = require_field(&basis, "basis", name, line)?;
                let from = expect(&toks, 1, "source generator", line)?;
                let to = expect(&toks, 2, "target generator", line)?;
                expect_literal(&toks, 3, "@", line)?;
                let e_tok = expect(&toks, 4, "energy", line)?;
                expect_end(&toks, 5, line)?;
                p.names.resolve_gen(&basis, &from.1, line, from.0)?;
                p.names.resolve_gen(&basis, &to.1, line, to.0)?;
                let energy = p.level(line, &e_tok)?;
                if energy <= Rational::from_integer(0) {
                    return Err(diag(
                        line,
                        e_tok.0,
                        DiagnosticCode::NonPositiveEnergy,
                        "boundary weight energy must be strictly positive",
                    ));
                }
                if !seen.insert((from.1.clone(), to.1.clone(), energy)) {
                    return Err(diag(
                        line,
                        toks[0].0,
                        DiagnosticCode::DuplicateEntry,
                        "duplicate boundary weight",
                    ));
                }
                weights.push((from.1, to.1, energy));
            }
            other => {
                return Err(diag(
                    line,
                    toks[0].0,
                    DiagnosticCode::UnknownDirective,
                    format!("unknown directive `{other}` in floer section"),
                ))
            }
        }
    }
    Err(unterminated(name, begin_line.max(last_line)))
}

fn parse_gluing(
    stream: &mut LineStream,
    p: &Parser,
    name: &str,
    begin_line: usize,
    last_line: usize,
) -> Result<GluingSection, Diagnostic> {
    let mut module1: Option<String> = None;
    let mut module2: Option<String> = None;
    let mut bimodule: Option<String> = None;
    let mut floer: Option<String> = None;
    let mut ops: Vec<GluOp> = Vec::new();
    let mut keys: BTreeSet<(Rational, Vec<String>)> = BTreeSet::new();
    while let Some((line, toks)) = stream.next() {
        match toks[0].1.as_str() {
            "end" => {
                expect_end(&toks, 1, line)?;
                return Ok(GluingSection {
                    name: name.to_string(),
                    module1: require_field(&module1, "module1", name, line)?,
                    module2: require_field(&module2, "module2", name, line)?,
                    bimodule: require_field(&bimodule, "bimodule", name, line)?,
                    floer: require_field(&floer, "floer", name, line)?,
                    ops,
                });
            }
            "module1" | "module2" => {
                let m = expect(&toks, 1, "module name", line)?;
                expect_end(&toks, 2, line)?;
                if !p.names.modules.contains_key(&m.1) {
                    return Err(diag(
                        line,
                        m.0,
                        DiagnosticCode::UnresolvedName,
                        format!("`{}` is not a defined module", m.1),
                    ));
                }
                if toks[0].1 == "module1" {
                    module1 = Some(m.1);
                } else {
                    module2 = Some(m.1);
                }
            }
            "bimodule" => {
                let b = expect(&toks, 1, "bimodule name", line)?;
                expect_end(&toks, 2, line)?;
                if !p.names.bimodules.contains_key(&b.1) {
                    return Err(diag(
                        line,
                        b.0,
                        DiagnosticCode::UnresolvedName,
                        format!("`{}` is not a defined bimodule", b.1),
                    ));
                }
                bimodule = Some(b.1);
            }
            "floer" => {
                let f = expect(&toks, 1, "floer name", line)?;
                expect_end(&toks, 2, line)?;
                resolve_ref(&p.names.floers, &f, "floer complex", line)?;
                floer = Some(f.1);
            }
            "op" => {
                let m1 = require_field(&module1, "module1", name, line)?;
                let m2 = require_field(&module2, "module2", name, line)?;
                let bm = require_field(&bimodule, "bimodule", name, line)?;
                let fl = require_field(&floer, "floer", name, line)?;
                let (m1_alg, m1_basis) = p.names.modules.get(&m1).expect("validated").clone();
                let (m2_alg, m2_basis) = p.names.modules.get(&m2).expect("validated").clone();
                let a1_basis = p.names.algebras.get(&m1_alg).expect("validated").clone();
                let a2_basis = p.names.algebras.get(&m2_alg).expect("validated").clone();
                let pair_basis = p.names.bimodules.get(&bm).expect("validated").2.clone();
                let floer_basis = p.names.floers.get(&fl).expect("validated").clone();

                let (head, lhs, rhs) = split_op(&toks, line)?;
                let (ks, level) = parse_op_head(p, head, 2, line)?;
                let groups = split_pipes(lhs);
                if groups.len() != 5 {
                    return Err(diag(
                        line,
                        toks[0].0,
                        DiagnosticCode::Syntax,
                        "gluing op needs `y1 | xs1 | a | y2 | xs2` input groups",
                    ));
                }
                for (i, expected) in [(0usize, 1usize), (2, 1), (3, 1)] {
                    if groups[i].len() != expected {
                        return Err(diag(
                            line,
                            toks[0].0,
                            DiagnosticCode::Syntax,
                            "gluing op needs single y1, a, y2 slots",
                        ));
                    }
                }
                if groups[1].len() != ks[0] || groups[4].len() != ks[1] {
                    return Err(diag(
                        line,
                        head[1].0,
                        DiagnosticCode::ArityMismatch,
                        format!(
                            "declared arities ({},{}) but ({},{}) inputs listed",
                            ks[0],
                            ks[1],
                            groups[1].len(),
                            groups[4].len()
                        ),
                    ));
                }
                let y1 = &groups[0][0];
                p.names.resolve_gen(&m1_basis, &y1.1, line, y1.0)?;
                let xs1 = gen_list(p, &a1_basis, &groups[1], line)?;
                let a = &groups[2][0];
                p.names.resolve_gen(&pair_basis, &a.1, line, a.0)?;
                let y2 = &groups[3][0];
                p.names.resolve_gen(&m2_basis, &y2.1, line, y2.0)?;
                let xs2 = gen_list(p, &a2_basis, &groups[4], line)?;
                let output = nonempty_output(p, &floer_basis, rhs, line)?;

                let mut key_tuple = vec![y1.1.clone()];
                key_tuple.extend(xs1.iter().cloned());
                key_tuple.push(a.1.clone());
                key_tuple.push(y2.1.clone());
                key_tuple.extend(xs2.iter().cloned());
                if !keys.insert((level, key_tuple)) {
                    return Err(diag(
                        line,
                        toks[0].0,
                        DiagnosticCode::DuplicateEntry,
                        "duplicate gluing component",
                    ));
                }
                ops.push(GluOp {
                    level,
                    y1: y1.1.clone(),
                    xs1,
                    a: a.1.clone(),
                    y2: y2.1.clone(),
                    xs2,
                    output,
                });
            }
            other => {
                return Err(diag(
                    line,
                    toks[0].0,
                    DiagnosticCode::UnknownDirective,
                    format!("unknown directive `{other}` in gluing section"),
                ))
            }
        }
    }
    Err(unterminated(name, begin_line.max(last_line)))
}
