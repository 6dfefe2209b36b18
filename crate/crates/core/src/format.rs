//! The line-based `.dga` file format.
//!
//! ```text
//! dga A1
//! generator x1 2
//! alias w = x2^2 y1 y2 - x1 x2 y1 y3 + x1^2 y2 y3
//! d y1 = x1^3 x2
//! fundamental x2^16 scale 1/2
//! basis x2 w
//! ```
//! Generators may be declared anywhere; every other statement is evaluated in
//! file order. `basis` lines name classes for the middle-degree intersection form.

use crate::algebra::{Element, Generator};
use crate::dga::{fmt_scale, DgaSpec, FundamentalClass};
use crate::error::{DgaError, Result};
use crate::expr::{parse_expr, Aliases};
use crate::rational::parse_rational;

#[derive(Clone, Debug, PartialEq)]
pub struct DgaFile {
    pub spec: DgaSpec,
    pub fundamental: Option<FundamentalClass>,
    pub basis: Vec<Element>,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> DgaError {
    DgaError::Parse { line, col, msg: msg.into() }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

/// Column (1-based) of `needle` within `line`, assuming it occurs.
fn col_of(line: &str, needle: &str) -> usize {
    line.find(needle).map_or(1, |b| line[..b].chars().count() + 1)
}

pub fn parse_dga(text: &str) -> Result<DgaFile> {
    let lines: Vec<&str> = text.lines().map(strip_comment).collect();
    let mut name: Option<String> = None;
    let mut gens: Vec<Generator> = Vec::new();
    for (ln, raw) in lines.iter().enumerate() {
        let line = ln + 1;
        let words: Vec<&str> = raw.split_whitespace().collect();
        match words.first() {
            Some(&"generator") => {
                if words.len() != 3 {
                    return Err(perr(line, 1, "expected `generator <name> <degree>`"));
                }
                let gname = words[1];
                if !gname.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    || !gname.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
                {
                    return Err(perr(line, col_of(raw, gname), format!("invalid generator name `{gname}`")));
                }
                let degree: u32 = words[2]
                    .parse()
                    .ok()
                    .filter(|&d| d > 0)
                    .ok_or_else(|| perr(line, col_of(raw, words[2]), "degree must be a positive integer"))?;
                if gens.iter().any(|g| g.name == gname) {
                    return Err(perr(line, col_of(raw, gname), format!("duplicate generator `{gname}`")));
                }
                gens.push(Generator::new(gname, degree));
            }
            Some(&"dga") => {
                if words.len() != 2 {
                    return Err(perr(line, 1, "expected `dga <name>`"));
                }
                if name.is_some() {
                    return Err(perr(line, 1, "duplicate `dga` statement"));
                }
                name = Some(words[1].to_string());
            }
            _ => {}
        }
    }
    let name = name.unwrap_or_else(|| "unnamed".to_string());
    let zero = DgaSpec::new(&name, gens.clone(), vec![Element::zero(); gens.len()])?;
    let alg = zero.algebra().clone();
    let mut aliases = Aliases::new();
    let mut diff: Vec<Option<Element>> = vec![None; gens.len()];
    let mut fundamental = None;
    let mut basis = Vec::new();

    for (ln, raw) in lines.iter().enumerate() {
        let line = ln + 1;
        let trimmed = raw.trim_start();
        let Some(keyword) = trimmed.split_whitespace().next() else { continue };
        let rest_col = col_of(raw, keyword) + keyword.chars().count();
        let rest = &trimmed[keyword.len()..];
        let expr_at = |text: &str| -> Result<Element> {
            let offset = col_of(raw, text.trim_start());
            parse_expr(&alg, &aliases, text).map_err(|e| e.at_line(line, offset))
        };
        match keyword {
            "generator" | "dga" => {}
            "d" | "alias" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(line, rest_col, format!("expected `{keyword} <name> = <expr>`")))?;
                let target = lhs.trim();
                if rhs.trim().is_empty() {
                    return Err(perr(line, col_of(raw, "=") + 1, "missing expression"));
                }
                let value = expr_at(rhs)?;
                if keyword == "alias" {
                    if target.is_empty() || alg.index_of(target).is_some() {
                        return Err(perr(line, rest_col, format!("invalid alias name `{target}`")));
                    }
                    aliases.insert(target.to_string(), value);
                } else {
                    let g = alg
                        .index_of(target)
                        .ok_or_else(|| perr(line, col_of(raw, target), format!("unknown generator `{target}`")))?;
                    if diff[g].is_some() {
                        return Err(perr(line, 1, format!("differential of `{target}` given twice")));
                    }
                    let want = alg.generators()[g].degree + 1;
                    match value.homogeneous_degree() {
                        Some(dd) if dd != want => {
                            return Err(perr(
                                line,
                                col_of(raw, rhs.trim_start()),
                                format!("d {target} has degree {dd}, expected {want}"),
                            ))
                        }
                        None if !value.is_zero() => {
                            return Err(perr(line, col_of(raw, rhs.trim_start()), "inhomogeneous differential"))
                        }
                        _ => {}
                    }
                    diff[g] = Some(value);
                }
            }
            "fundamental" => {
                let (expr_text, scale) = match rest.rsplit_once(" scale ") {
                    Some((e, s)) => {
                        let q = parse_rational(s)
                            .filter(|q| !num_traits::Zero::is_zero(q))
                            .ok_or_else(|| perr(line, col_of(raw, s.trim()), "malformed or zero scale"))?;
                        (e, q)
                    }
                    None => (rest, num_traits::One::one()),
                };
                let rep = expr_at(expr_text)?;
                if !rep.is_homogeneous() || rep.is_zero() {
                    return Err(perr(line, rest_col, "fundamental class must be a nonzero homogeneous element"));
                }
                fundamental = Some(FundamentalClass { representative: rep, scale });
            }
            "basis" => basis.push(expr_at(rest)?),
            other => return Err(perr(line, col_of(raw, other), format!("unknown statement `{other}`"))),
        }
    }
    let diff = diff.into_iter().map(Option::unwrap_or_default).collect();
    let mut spec = DgaSpec::new(name, gens, diff)?;
    spec.aliases = aliases;
    Ok(DgaFile { spec, fundamental, basis })
}

/// Canonical text: generators in declaration order, aliases expanded, zero differentials omitted.
pub fn serialize_dga(file: &DgaFile) -> String {
    let a = &file.spec;
    let mut out = format!("dga {}\n", a.name);
    for g in a.generators() {
        out.push_str(&format!("generator {} {}\n", g.name, g.degree));
    }
    for (k, v) in &a.aliases {
        out.push_str(&format!("alias {} = {}\n", k, a.fmt(v)));
    }
    for (i, g) in a.generators().iter().enumerate() {
        let d = a.generator_differential(i);
        if !d.is_zero() {
            out.push_str(&format!("d {} = {}\n", g.name, a.fmt(d)));
        }
    }
    if let Some(fc) = &file.fundamental {
        out.push_str(&format!("fundamental {}{}\n", a.fmt(&fc.representative), fmt_scale(&fc.scale)));
    }
    for b in &file.basis {
        out.push_str(&format!("basis {}\n", a.fmt(b)));
    }
    out
}
