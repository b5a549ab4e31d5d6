//! The plain-text module format: parser and canonical emitter.
//!
//! See docs/module-format.md for the grammar.

use std::fmt::Write as _;

use crate::arith::{Ctx, PrimeContext, Zq};
use crate::error::{Error, Result};
use crate::fl::{FLModule, FLMorphism};
use crate::gradmod::{FPModule, GradedModule, Mat};
use crate::mazsyn::MazurModule;

pub const MODULE_MAGIC: &str = "flgauge-module 1";
pub const MORPHISM_MAGIC: &str = "flgauge-morphism 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Fl,
    Mazur,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleDoc {
    Fl(FLModule),
    Mazur(MazurModule),
}

impl ModuleDoc {
    pub fn kind(&self) -> Kind {
        match self {
            ModuleDoc::Fl(_) => Kind::Fl,
            ModuleDoc::Mazur(_) => Kind::Mazur,
        }
    }

    pub fn into_fl(self) -> Result<FLModule> {
        match self {
            ModuleDoc::Fl(m) => Ok(m),
            ModuleDoc::Mazur(_) => Err(Error::InvalidArgument("expected an fl module, found kind mazur".into())),
        }
    }

    pub fn emit(&self) -> String {
        match self {
            ModuleDoc::Fl(m) => emit_fl(m),
            ModuleDoc::Mazur(m) => emit_mazur(m),
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Attaches a line number to an error raised while assembling parsed data.
fn at(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => perr(line, other.to_string()),
    }
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut last = 0;
        for (k, raw) in text.lines().enumerate() {
            last = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                items.push((k + 1, body.split_whitespace().collect()));
            }
        }
        Lines { items, pos: 0, last: last.max(1) }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let it = self.items.get(self.pos).cloned();
        if it.is_some() {
            self.pos += 1;
        }
        it
    }

    fn end_line(&self) -> usize {
        self.last
    }
}

fn int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| perr(line, format!("{what}: cannot read '{tok}' as an integer")))
}

fn expect_key<'a>(lines: &mut Lines<'a>, key: &str) -> Result<(usize, Vec<&'a str>)> {
    match lines.next() {
        Some((l, toks)) if toks[0] == key => Ok((l, toks)),
        Some((l, toks)) => Err(perr(l, format!("expected '{key}', found '{}'", toks[0]))),
        None => Err(perr(lines.end_line(), format!("expected '{key}', found end of input"))),
    }
}

fn single<T: std::str::FromStr>(lines: &mut Lines, key: &str) -> Result<(usize, T)> {
    let (l, toks) = expect_key(lines, key)?;
    if toks.len() != 2 {
        return Err(perr(l, format!("'{key}' takes exactly one value")));
    }
    Ok((l, int(l, toks[1], key)?))
}

fn parse_header(lines: &mut Lines, magic: &str) -> Result<Ctx> {
    match lines.next() {
        Some((l, toks)) if toks.join(" ") != magic => {
            return Err(perr(l, format!("expected header '{magic}', found '{}'", toks.join(" "))))
        }
        None => return Err(perr(1, "empty document")),
        _ => {}
    }
    let (lp, p) = single::<u64>(lines, "p")?;
    let (ln, n) = single::<u32>(lines, "N")?;
    let (lf, f) = single::<usize>(lines, "f")?;
    let mut minpoly = None;
    let mut mline = lf;
    if matches!(lines.peek(), Some((_, t)) if t[0] == "minpoly") {
        let (l, toks) = lines.next().unwrap();
        mline = l;
        let c = toks[1..].iter().map(|t| int::<i64>(l, t, "minpoly")).collect::<Result<Vec<_>>>()?;
        minpoly = Some(c);
    }
    if !crate::arith::is_prime(p) {
        return Err(perr(lp, format!("p = {p} is not prime")));
    }
    if n == 0 {
        return Err(perr(ln, "N must be at least 1"));
    }
    PrimeContext::new(p, n, f, minpoly).map_err(|e| at(mline, e))
}

fn parse_entry(ctx: &Ctx, line: usize, tok: &str) -> Result<Zq> {
    let parts = tok.split(',').map(|t| int::<i64>(line, t, "matrix entry")).collect::<Result<Vec<_>>>()?;
    if parts.len() > ctx.degree() {
        return Err(perr(line, format!("entry '{tok}' has {} coefficients but f = {}", parts.len(), ctx.degree())));
    }
    Zq::from_coeffs(ctx, &parts).map_err(|e| at(line, e))
}

/// Reads `<key> <deg> <r>x<c>` followed by r rows of c entries, checking the shape first.
fn parse_matrix(ctx: &Ctx, lines: &mut Lines, key: &str, deg: usize, want: (usize, usize)) -> Result<(usize, Mat)> {
    let (l, toks) = expect_key(lines, key)?;
    if toks.len() != 3 {
        return Err(perr(l, format!("expected '{key} <degree> <rows>x<cols>'")));
    }
    let found: usize = int(l, toks[1], "degree")?;
    if found != deg {
        return Err(perr(l, format!("expected {key} {deg}, found {key} {found}")));
    }
    let (r, c) = toks[2].split_once('x').ok_or_else(|| perr(l, format!("bad shape '{}'", toks[2])))?;
    let (r, c): (usize, usize) = (int(l, r, "rows")?, int(l, c, "cols")?);
    if (r, c) != want {
        return Err(perr(l, format!("dimension mismatch in degree {deg}: {key} is {r}x{c}, expected {}x{}", want.0, want.1)));
    }
    let mut rows = Vec::with_capacity(r);
    if c > 0 {
        for k in 0..r {
            let (lr, entries) = lines
                .next()
                .ok_or_else(|| perr(lines.end_line(), format!("{key} {deg}: missing row {} of {r}", k + 1)))?;
            if entries.len() != c {
                return Err(perr(lr, format!("{key} {deg}: row has {} entries, expected {c}", entries.len())));
            }
            rows.push(entries.iter().map(|t| parse_entry(ctx, lr, t)).collect::<Result<Vec<_>>>()?);
        }
    }
    let m = if c == 0 { Mat::zeros(ctx, r, 0) } else { Mat::from_rows(ctx, rows, c).map_err(|e| at(l, e))? };
    Ok((l, m))
}

struct Body {
    kind: Kind,
    base: GradedModule,
    phi: Vec<Mat>,
    phi_lines: Vec<usize>,
}

fn parse_body(ctx: &Ctx, lines: &mut Lines) -> Result<Body> {
    let (lk, toks) = expect_key(lines, "kind")?;
    let kind = match toks.get(1).copied() {
        Some("fl") if toks.len() == 2 => Kind::Fl,
        Some("mazur") if toks.len() == 2 => Kind::Mazur,
        _ => return Err(perr(lk, "kind must be 'fl' or 'mazur'")),
    };
    let (_, wmax) = single::<usize>(lines, "wmax")?;
    let n = ctx.precision();

    let mut pieces = Vec::with_capacity(wmax + 1);
    for i in 0..=wmax {
        let (l, toks) = expect_key(lines, "piece")?;
        let deg: usize = int(l, toks.get(1).copied().unwrap_or(""), "degree")?;
        if deg != i {
            return Err(perr(l, format!("expected piece {i}, found piece {deg}")));
        }
        if toks.get(2) != Some(&"free") || toks.len() < 4 {
            return Err(perr(l, "expected 'piece <degree> free <rank> [torsion <exponents>]'"));
        }
        let free: usize = int(l, toks[3], "free rank")?;
        let mut exps = vec![n; free];
        match toks.get(4) {
            None => {}
            Some(&"torsion") => {
                for t in &toks[5..] {
                    let e: u32 = int(l, t, "torsion exponent")?;
                    if e == 0 || e >= n {
                        return Err(perr(l, format!("torsion exponent {e} outside [1, {}]", n - 1)));
                    }
                    exps.push(e);
                }
            }
            Some(t) => return Err(perr(l, format!("unexpected '{t}' in piece descriptor"))),
        }
        pieces.push(FPModule::new(ctx, exps).map_err(|e| at(l, e))?);
    }

    let mut vminus = Vec::with_capacity(wmax);
    for i in 1..=wmax {
        let (l, m) = parse_matrix(ctx, lines, "vminus", i, (pieces[i - 1].ngens(), pieces[i].ngens()))?;
        vminus.push((l, m));
    }
    let first_v = vminus.first().map_or(lk, |(l, _)| *l);
    let base = GradedModule::from_matrices(pieces.clone(), vminus.iter().map(|(_, m)| m.clone()).collect()).map_err(|e| {
        let deg = vminus_degree(&e);
        at(deg.and_then(|d| vminus.get(d - 1)).map_or(first_v, |(l, _)| *l), e)
    })?;

    let mut phi = Vec::with_capacity(wmax + 1);
    let mut phi_lines = Vec::with_capacity(wmax + 1);
    for i in 0..=wmax {
        let (l, m) = parse_matrix(ctx, lines, "phi", i, (pieces[0].ngens(), pieces[i].ngens()))?;
        phi.push(m);
        phi_lines.push(l);
    }
    Ok(Body { kind, base, phi, phi_lines })
}

/// Degree named in a "v- in degree i" style error, if any.
fn vminus_degree(e: &Error) -> Option<usize> {
    let s = e.to_string();
    let idx = s.find("degree ")?;
    s[idx + 7..].split(|c: char| !c.is_ascii_digit()).next()?.parse().ok()
}

fn phi_error(body: &Body, e: Error) -> Error {
    let s = e.to_string();
    let deg = s.find("phi ").and_then(|k| s[k + 4..].split(|c: char| !c.is_ascii_digit()).next()?.parse::<usize>().ok());
    let line = deg.and_then(|d| body.phi_lines.get(d).copied()).unwrap_or(body.phi_lines[0]);
    at(line, e)
}

fn finish(lines: &Lines) -> Result<()> {
    match lines.peek() {
        Some((l, toks)) => Err(perr(*l, format!("unexpected trailing '{}'", toks.join(" ")))),
        None => Ok(()),
    }
}

pub fn parse_module(text: &str) -> Result<ModuleDoc> {
    let mut lines = Lines::new(text);
    let ctx = parse_header(&mut lines, MODULE_MAGIC)?;
    let body = parse_body(&ctx, &mut lines)?;
    finish(&lines)?;
    build(body)
}

fn build(body: Body) -> Result<ModuleDoc> {
    match body.kind {
        Kind::Fl => FLModule::new(body.base.clone(), body.phi.clone()).map(ModuleDoc::Fl).map_err(|e| phi_error(&body, e)),
        Kind::Mazur => MazurModule::new(body.base.clone(), body.phi.clone()).map(ModuleDoc::Mazur).map_err(|e| phi_error(&body, e)),
    }
}

pub fn parse_fl(text: &str) -> Result<FLModule> {
    parse_module(text)?.into_fl()
}

pub fn read_module(path: &std::path::Path) -> Result<ModuleDoc> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_module(&text)
}

fn fmt_entry(z: &Zq) -> String {
    let c = z.coeffs();
    if c[1..].iter().all(|&x| x == 0) {
        c[0].to_string()
    } else {
        c.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    }
}

fn emit_matrix(out: &mut String, key: &str, deg: usize, m: &Mat) {
    let _ = writeln!(out, "{key} {deg} {}x{}", m.rows(), m.cols());
    if m.cols() == 0 {
        return;
    }
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(fmt_entry).collect();
        let _ = writeln!(out, "  {}", row.join(" "));
    }
}

fn emit_header(out: &mut String, magic: &str, ctx: &Ctx) {
    let _ = writeln!(out, "{magic}");
    let _ = writeln!(out, "p {}", ctx.p());
    let _ = writeln!(out, "N {}", ctx.precision());
    let _ = writeln!(out, "f {}", ctx.degree());
    if ctx.degree() > 1 {
        let mp: Vec<String> = ctx.minpoly().iter().map(u64::to_string).collect();
        let _ = writeln!(out, "minpoly {}", mp.join(" "));
    }
}

/// Generator order with free generators first, stable otherwise.
fn free_first(m: &FPModule) -> Vec<usize> {
    let n = m.ctx().precision();
    let mut idx: Vec<usize> = (0..m.ngens()).collect();
    idx.sort_by_key(|&k| m.exps()[k] != n);
    idx
}

fn emit_body(out: &mut String, kind: Kind, base: &GradedModule, phi: &[Mat]) {
    let ctx = base.ctx();
    let n = ctx.precision();
    let _ = writeln!(out, "kind {}", match kind {
        Kind::Fl => "fl",
        Kind::Mazur => "mazur",
    });
    let w = base.wmax();
    let _ = writeln!(out, "wmax {w}");
    let perms: Vec<Vec<usize>> = (0..=w).map(|i| free_first(&base.piece(i as i64))).collect();
    for (i, perm) in perms.iter().enumerate() {
        let piece = base.piece(i as i64);
        let free = piece.exps().iter().filter(|&&e| e == n).count();
        let tors: Vec<String> = perm[free..].iter().map(|&k| piece.exps()[k].to_string()).collect();
        if tors.is_empty() {
            let _ = writeln!(out, "piece {i} free {free}");
        } else {
            let _ = writeln!(out, "piece {i} free {free} torsion {}", tors.join(" "));
        }
    }
    for i in 1..=w {
        let m = base.vminus(i as i64).matrix().select_rows(&perms[i - 1]).select_cols(&perms[i]);
        emit_matrix(out, "vminus", i, &m);
    }
    for (i, ph) in phi.iter().enumerate().take(w + 1) {
        emit_matrix(out, "phi", i, &ph.select_rows(&perms[0]).select_cols(&perms[i]));
    }
}

/// Canonical text of an FL module.
pub fn emit_fl(m: &FLModule) -> String {
    let mut out = String::new();
    emit_header(&mut out, MODULE_MAGIC, m.ctx());
    emit_body(&mut out, Kind::Fl, m.base(), m.phis());
    out
}

pub fn emit_mazur(m: &MazurModule) -> String {
    let mut out = String::new();
    emit_header(&mut out, MODULE_MAGIC, m.base().ctx());
    emit_body(&mut out, Kind::Mazur, m.base(), m.phis());
    out
}

fn expect_block(lines: &mut Lines, name: &str) -> Result<()> {
    let (l, toks) = expect_key(lines, "begin")?;
    if toks.len() != 2 || toks[1] != name {
        return Err(perr(l, format!("expected 'begin {name}'")));
    }
    Ok(())
}

/// A morphism document: shared header, `begin source`/`end`, `begin target`/`end`, then `map` blocks.
pub fn parse_morphism(text: &str) -> Result<FLMorphism> {
    let mut lines = Lines::new(text);
    let ctx = parse_header(&mut lines, MORPHISM_MAGIC)?;
    let mut modules = Vec::new();
    for name in ["source", "target"] {
        expect_block(&mut lines, name)?;
        let body = parse_body(&ctx, &mut lines)?;
        if body.kind != Kind::Fl {
            return Err(perr(lines.items[lines.pos.saturating_sub(1)].0, "morphisms are between fl modules"));
        }
        expect_key(&mut lines, "end")?;
        modules.push(build(body)?.into_fl()?);
    }
    let (src, tgt) = (&modules[0], &modules[1]);
    let w = src.wmax().max(tgt.wmax());
    let mut maps = Vec::with_capacity(w + 1);
    let mut first = lines.end_line();
    for i in 0..=w {
        let want = (tgt.piece(i as i64).ngens(), src.piece(i as i64).ngens());
        let (l, m) = parse_matrix(&ctx, &mut lines, "map", i, want)?;
        if i == 0 {
            first = l;
        }
        maps.push(m);
    }
    finish(&lines)?;
    FLMorphism::new(src, tgt, maps).map_err(|e| at(first, e))
}

pub fn read_morphism(path: &std::path::Path) -> Result<FLMorphism> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_morphism(&text)
}

pub fn emit_morphism(f: &FLMorphism) -> String {
    let mut out = String::new();
    let (src, tgt) = (f.source(), f.target());
    emit_header(&mut out, MORPHISM_MAGIC, src.ctx());
    for (name, m) in [("source", src), ("target", tgt)] {
        let _ = writeln!(out, "begin {name}");
        emit_body(&mut out, Kind::Fl, m.base(), m.phis());
        let _ = writeln!(out, "end");
    }
    let w = src.wmax().max(tgt.wmax());
    let ps: Vec<Vec<usize>> = (0..=w).map(|i| free_first(&src.piece(i as i64))).collect();
    let pt: Vec<Vec<usize>> = (0..=w).map(|i| free_first(&tgt.piece(i as i64))).collect();
    for i in 0..=w {
        let m = f.map(i).matrix().select_rows(&pt[i]).select_cols(&ps[i]);
        emit_matrix(&mut out, "map", i, &m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fl::{tate_twist, unit_mod_p};
    use crate::sen::standard_extension;

    #[test]
    fn round_trip_twist() {
        let c = PrimeContext::prime(3, 4).unwrap();
        let w1 = tate_twist(&c, 1, &Zq::one(&c)).unwrap();
        let text = emit_fl(&w1);
        let back = parse_fl(&text).unwrap();
        assert_eq!(back, w1);
        assert_eq!(emit_fl(&back), text);
    }

    #[test]
    fn round_trip_extension_over_f9() {
        let c = PrimeContext::new(3, 1, 2, None).unwrap();
        let m = standard_extension(&c, &Zq::generator(&c));
        let text = emit_fl(&m);
        assert!(text.contains("minpoly"));
        assert_eq!(parse_fl(&text).unwrap(), m);
    }

    #[test]
    fn torsion_first_pieces_are_reordered() {
        let c = PrimeContext::prime(3, 3).unwrap();
        let piece = FPModule::new(&c, vec![1, 3]).unwrap();
        let base = GradedModule::from_matrices(vec![piece], vec![]).unwrap();
        let m = FLModule::new(base, vec![Mat::from_i64(&c, &[vec![2, 0], vec![0, 1]], 2).unwrap()]).unwrap();
        let text = emit_fl(&m);
        assert!(text.contains("piece 0 free 1 torsion 1"));
        let back = parse_fl(&text).unwrap();
        assert_eq!(emit_fl(&back), text);
        assert_eq!(back.phi(0), Mat::from_i64(&c, &[vec![1, 0], vec![0, 2]], 2).unwrap());
    }

    #[test]
    fn errors_are_line_addressed() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let good = emit_fl(&unit_mod_p(&c, 1));
        let bad = good.replace("p 3", "p 4");
        assert!(matches!(parse_module(&bad), Err(Error::Parse { line: 2, .. })));
        let bad = good.replace("vminus 1 1x1", "vminus 1 1x2");
        match parse_module(&bad) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("degree 1"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let truncated: String = good.lines().take(8).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_module(&truncated), Err(Error::Parse { .. })));
    }

    #[test]
    fn morphism_round_trip() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let k = unit_mod_p(&c, 1);
        let id = FLMorphism::identity(&k);
        let text = emit_morphism(&id);
        let back = parse_morphism(&text).unwrap();
        assert_eq!(emit_morphism(&back), text);
    }
}
