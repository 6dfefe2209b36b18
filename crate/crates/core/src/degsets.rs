//! Mapping-degree sets and the rules by which inflexibility passes to connected sums.
//!
//! Nothing here computes a degree set from homotopy data. A catalog asserts facts
//! about named objects; [`propagate`] closes them under a fixed rule set and
//! records, for every derived fact, the rule and premises it came from so the
//! chain can be replayed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{DgaError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "set", rename_all = "snake_case")]
pub enum DegKind {
    Finite(BTreeSet<i64>),
    Infinite,
    Unknown,
}

/// What is known about deg(N, M): its shape plus a subset known to occur.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegSet {
    #[serde(flatten)]
    pub kind: DegKind,
    pub known: BTreeSet<i64>,
}

impl DegSet {
    /// An explicit finite set. 0 is always added: constant maps have degree 0.
    pub fn finite(values: impl IntoIterator<Item = i64>) -> Self {
        let mut s: BTreeSet<i64> = values.into_iter().collect();
        s.insert(0);
        Self { kind: DegKind::Finite(s.clone()), known: s }
    }

    pub fn infinite() -> Self {
        Self { kind: DegKind::Infinite, known: BTreeSet::from([0]) }
    }

    pub fn unknown() -> Self {
        Self { kind: DegKind::Unknown, known: BTreeSet::from([0]) }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, DegKind::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&BTreeSet<i64>> {
        match &self.kind {
            DegKind::Finite(s) => Some(s),
            _ => None,
        }
    }
}

fn add_sets(a: &BTreeSet<i64>, b: &BTreeSet<i64>) -> BTreeSet<i64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect()
}

/// A + B = {a + b}. Only two finite sets give a finite answer; anything else
/// carries no finiteness and degrades to unknown.
pub fn sum_sets(a: &DegSet, b: &DegSet) -> DegSet {
    let known = add_sets(&a.known, &b.known);
    match (&a.kind, &b.kind) {
        (DegKind::Finite(x), DegKind::Finite(y)) => DegSet { kind: DegKind::Finite(add_sets(x, y)), known },
        _ => DegSet { kind: DegKind::Unknown, known },
    }
}

pub fn fmt_set(s: &BTreeSet<i64>) -> String {
    let inner: Vec<String> = s.iter().map(i64::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjFlag {
    /// deg(X, X) is finite.
    Inflexible,
    /// deg(N, X) is finite for every N of the same dimension. Only ever asserted.
    StronglyInflexible,
    /// π_{n−1}(X) ⊗ Q = 0.
    PiTopRationalZero,
    /// deg(X_Q, X_Q) is finite, i.e. X has an inflexible minimal model.
    ModelInflexible,
}

impl ObjFlag {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "inflexible" => Self::Inflexible,
            "strongly_inflexible" => Self::StronglyInflexible,
            "pi_top_rational_zero" | "pi_{n-1}_rational_zero" | "pi_{n−1}_rational_zero" => Self::PiTopRationalZero,
            "model_inflexible" => Self::ModelInflexible,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Inflexible => "inflexible",
            Self::StronglyInflexible => "strongly_inflexible",
            Self::PiTopRationalZero => "pi_top_rational_zero",
            Self::ModelInflexible => "model_inflexible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub dimension: i64,
    pub flags: BTreeSet<ObjFlag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Connected summands when the name has the form `A#B#...`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub summands: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegRecord {
    pub from: String,
    pub to: String,
    /// A statement about deg(from_Q, to_Q) rather than deg(from, to).
    pub rational: bool,
    pub set: DegSet,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    /// (object, flag, line) in file order.
    pub flags: Vec<(String, ObjFlag, usize)>,
    pub degsets: Vec<DegRecord>,
}

impl Catalog {
    pub fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> DgaError {
    DgaError::Parse { line, col, msg: msg.into() }
}

fn parse_set(text: &str, line: usize, col: usize) -> Result<BTreeSet<i64>> {
    let t = text.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|x| x.strip_suffix('}'))
        .ok_or_else(|| perr(line, col, format!("expected {{a,b,...}}, found `{t}`")))?;
    let mut out = BTreeSet::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v: i64 = part.parse().map_err(|_| perr(line, col, format!("bad integer `{part}`")))?;
        out.insert(v);
    }
    Ok(out)
}

/// Parses the line-based catalog format and checks names and dimensions.
pub fn parse_catalog(text: &str) -> Result<Catalog> {
    let mut cat = Catalog::default();
    let mut models: Vec<(String, String, usize)> = Vec::new();
    let mut refs: Vec<(String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        // `#` also joins connected-sum names, so only a leading or space-preceded `#` starts a comment.
        let content = if raw.trim_start().starts_with('#') {
            ""
        } else {
            raw.find(" #").or_else(|| raw.find("\t#")).map_or(raw, |p| &raw[..p])
        };
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let col = raw.len() - raw.trim_start().len() + 1;
        match toks[0] {
            "entry" => {
                let [_, name, "dim", n] = toks[..] else {
                    return Err(perr(line, col, "expected `entry <name> dim <n>`"));
                };
                if cat.entry(name).is_some() {
                    return Err(perr(line, col, format!("duplicate entry `{name}`")));
                }
                let dimension: i64 = n.parse().map_err(|_| perr(line, col, format!("bad dimension `{n}`")))?;
                let parts: Vec<String> = name.split('#').map(str::to_string).collect();
                if parts.iter().any(String::is_empty) {
                    return Err(perr(line, col, format!("malformed connected sum `{name}`")));
                }
                let summands = if parts.len() > 1 { parts } else { Vec::new() };
                cat.entries.push(CatalogEntry {
                    name: name.to_string(),
                    dimension,
                    flags: BTreeSet::new(),
                    model: None,
                    summands,
                });
            }
            "flag" => {
                let [_, name, flag] = toks[..] else {
                    return Err(perr(line, col, "expected `flag <name> <flag>`"));
                };
                let f = ObjFlag::parse(flag).ok_or_else(|| perr(line, col, format!("unknown flag `{flag}`")))?;
                refs.push((name.to_string(), line));
                cat.flags.push((name.to_string(), f, line));
            }
            "model" => {
                let [_, name, path] = toks[..] else {
                    return Err(perr(line, col, "expected `model <name> <path>`"));
                };
                refs.push((name.to_string(), line));
                models.push((name.to_string(), path.to_string(), line));
            }
            "degset" => {
                if toks.len() < 4 {
                    return Err(perr(line, col, "expected `degset <from> <to> [rational] finite {...} | infinite`"));
                }
                let (from, to) = (toks[1], toks[2]);
                let mut k = 3;
                let rational = toks[k] == "rational";
                if rational {
                    k += 1;
                }
                let set = match toks.get(k).copied() {
                    Some("infinite") if toks.len() == k + 1 => DegSet::infinite(),
                    Some("finite") => {
                        let s = parse_set(&toks[k + 1..].join(""), line, col)?;
                        if !s.contains(&0) {
                            return Err(perr(line, col, "a finite deg-set must contain 0 (constant maps)"));
                        }
                        DegSet::finite(s)
                    }
                    _ => return Err(perr(line, col, "expected `finite {...}` or `infinite`")),
                };
                refs.push((from.to_string(), line));
                refs.push((to.to_string(), line));
                cat.degsets.push(DegRecord { from: from.to_string(), to: to.to_string(), rational, set, line });
            }
            other => return Err(perr(line, col, format!("unknown record `{other}`"))),
        }
    }
    for (name, line) in &refs {
        if cat.entry(name).is_none() {
            return Err(perr(*line, 1, format!("undeclared entry `{name}`")));
        }
    }
    for (name, path, _) in models {
        cat.entries.iter_mut().find(|e| e.name == name).expect("checked").model = Some(path);
    }
    for (name, f, _) in &cat.flags {
        let f = *f;
        cat.entries.iter_mut().find(|e| &e.name == name).expect("checked").flags.insert(f);
    }
    for e in &cat.entries {
        for s in &e.summands {
            let d = cat.entry(s).ok_or_else(|| DgaError::Invalid(format!("summand `{s}` of `{}` is not an entry", e.name)))?;
            if d.dimension != e.dimension {
                return Err(DgaError::Invalid(format!(
                    "`{}` has dimension {} but summand `{s}` has {}",
                    e.name, e.dimension, d.dimension
                )));
            }
        }
    }
    for r in &cat.degsets {
        let (a, b) = (cat.entry(&r.from).expect("checked"), cat.entry(&r.to).expect("checked"));
        if a.dimension != b.dimension {
            return Err(perr(r.line, 1, format!("deg({}, {}) between dimensions {} and {}", a.name, b.name, a.dimension, b.dimension)));
        }
    }
    Ok(cat)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fact {
    Flag { object: String, flag: ObjFlag },
    /// deg ⊂ set.
    Within { from: String, to: String, rational: bool, set: BTreeSet<i64> },
    /// degree ∈ deg.
    Member { from: String, to: String, rational: bool, degree: i64 },
    Infinite { from: String, to: String, rational: bool },
}

fn fmt_deg(from: &str, to: &str, rational: bool) -> String {
    if rational {
        let q = |x: &str| if x.contains('#') { format!("({x})_Q") } else { format!("{x}_Q") };
        format!("deg({}, {})", q(from), q(to))
    } else {
        format!("deg({from}, {to})")
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Flag { object, flag } => write!(f, "{object} {}", flag.as_str()),
            Fact::Within { from, to, rational, set } => write!(f, "{} ⊂ {}", fmt_deg(from, to, *rational), fmt_set(set)),
            Fact::Member { from, to, rational, degree } => write!(f, "{degree} ∈ {}", fmt_deg(from, to, *rational)),
            Fact::Infinite { from, to, rational } => write!(f, "{} infinite", fmt_deg(from, to, *rational)),
        }
    }
}

impl Fact {
    fn key(&self) -> Option<(&str, &str, bool)> {
        match self {
            Fact::Within { from, to, rational, .. }
            | Fact::Member { from, to, rational, .. }
            | Fact::Infinite { from, to, rational } => Some((from, to, *rational)),
            Fact::Flag { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// Stated in the catalog.
    #[serde(rename = "catalog")]
    Catalog,
    /// deg(N, M) ⊂ deg(N_Q, M_Q): rationalization preserves rational cohomology.
    #[serde(rename = "RQ")]
    Rationalize,
    /// Connected-sum bound: deg((N_1#…#N_r)_Q, M_Q) ⊂ Σ deg(N_j,Q, M_Q) when π_{n−1}(M) ⊗ Q = 0.
    R1,
    /// 1 ∈ deg(N, M) gives deg(N, N) ⊂ deg(N, M); a finite self-degree set means inflexible.
    R2,
    /// The collapse map M#N → M has degree 1.
    R3,
    /// Strongly inflexible implies inflexible.
    R4,
    /// deg(X, X) is closed under composition, so finiteness forces it into {−1, 0, 1}.
    #[serde(rename = "R-monoid")]
    SelfMonoid,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Catalog => "catalog",
            Rule::Rationalize => "RQ",
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
            Rule::SelfMonoid => "R-monoid",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Derivation {
    pub id: usize,
    pub fact: Fact,
    pub statement: String,
    pub rule: Rule,
    pub premises: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}

/// All facts known after propagation, in derivation order.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Closure {
    pub facts: Vec<Derivation>,
    #[serde(skip)]
    index: BTreeMap<Fact, usize>,
}

fn unit_set() -> BTreeSet<i64> {
    BTreeSet::from([-1, 0, 1])
}

type Candidate = (Fact, Rule, Vec<usize>);

impl Closure {
    pub fn find(&self, fact: &Fact) -> Option<usize> {
        self.index.get(fact).copied()
    }

    pub fn get(&self, id: usize) -> &Derivation {
        &self.facts[id]
    }

    pub fn has_flag(&self, object: &str, flag: ObjFlag) -> bool {
        self.find(&Fact::Flag { object: object.to_string(), flag }).is_some()
    }

    pub fn derived(&self) -> impl Iterator<Item = &Derivation> {
        self.facts.iter().filter(|d| d.rule != Rule::Catalog)
    }

    /// The tightest finite bound on deg(from, to), if any.
    pub fn tightest(&self, from: &str, to: &str, rational: bool) -> Option<(usize, &BTreeSet<i64>)> {
        self.facts
            .iter()
            .filter_map(|d| match &d.fact {
                Fact::Within { from: a, to: b, rational: r, set } if a == from && b == to && *r == rational => Some((d.id, set)),
                _ => None,
            })
            .min_by(|x, y| x.1.len().cmp(&y.1.len()).then_with(|| x.1.cmp(y.1)))
    }

    /// Summary of deg(from, to) as a [`DegSet`].
    pub fn degset(&self, from: &str, to: &str, rational: bool) -> DegSet {
        let mut known = BTreeSet::from([0]);
        let mut infinite = false;
        for d in &self.facts {
            match &d.fact {
                Fact::Member { from: a, to: b, rational: r, degree } if a == from && b == to && *r == rational => {
                    known.insert(*degree);
                }
                Fact::Infinite { from: a, to: b, rational: r } if a == from && b == to && *r == rational => infinite = true,
                _ => {}
            }
        }
        let kind = match self.tightest(from, to, rational) {
            Some((_, s)) => DegKind::Finite(s.clone()),
            None if infinite => DegKind::Infinite,
            None => DegKind::Unknown,
        };
        DegSet { kind, known }
    }

    fn conflict(&self, fact: &Fact) -> Option<usize> {
        let (from, to, rational) = fact.key()?;
        self.facts.iter().find_map(|d| {
            if d.fact.key() != Some((from, to, rational)) {
                return None;
            }
            let clash = match (&d.fact, fact) {
                (Fact::Within { set, .. }, Fact::Member { degree, .. }) | (Fact::Member { degree, .. }, Fact::Within { set, .. }) => {
                    !set.contains(degree)
                }
                (Fact::Within { .. }, Fact::Infinite { .. }) | (Fact::Infinite { .. }, Fact::Within { .. }) => true,
                _ => false,
            };
            clash.then_some(d.id)
        })
    }

    fn insert(&mut self, fact: Fact, rule: Rule, premises: Vec<usize>, line: Option<usize>) -> Result<bool> {
        if self.index.contains_key(&fact) {
            return Ok(false);
        }
        if let Some(j) = self.conflict(&fact) {
            let other = &self.facts[j];
            let origin = |rule: Rule, line: Option<usize>| match line {
                Some(l) => format!("{} line {l}", rule.as_str()),
                None => rule.as_str().to_string(),
            };
            return Err(DgaError::Invalid(format!(
                "contradictory facts: `{}` ({}) and `{}` ({})",
                other.statement,
                origin(other.rule, other.line),
                fact,
                origin(rule, line)
            )));
        }
        let id = self.facts.len();
        self.index.insert(fact.clone(), id);
        self.facts.push(Derivation { id, statement: fact.to_string(), fact, rule, premises, line });
        Ok(true)
    }

    fn candidates(&self, cat: &Catalog) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = Vec::new();
        for d in &self.facts {
            match &d.fact {
                Fact::Flag { object, flag: ObjFlag::StronglyInflexible } => {
                    out.push((Fact::Flag { object: object.clone(), flag: ObjFlag::Inflexible }, Rule::R4, vec![d.id]));
                }
                Fact::Flag { object, flag: f @ (ObjFlag::Inflexible | ObjFlag::ModelInflexible) } => {
                    let rational = *f == ObjFlag::ModelInflexible;
                    let fact = Fact::Within { from: object.clone(), to: object.clone(), rational, set: unit_set() };
                    out.push((fact, Rule::SelfMonoid, vec![d.id]));
                }
                Fact::Within { from, to, rational, set } => {
                    if *rational {
                        let fact = Fact::Within { from: from.clone(), to: to.clone(), rational: false, set: set.clone() };
                        out.push((fact, Rule::Rationalize, vec![d.id]));
                    }
                    if from == to {
                        let flag = if *rational { ObjFlag::ModelInflexible } else { ObjFlag::Inflexible };
                        out.push((Fact::Flag { object: from.clone(), flag }, Rule::R2, vec![d.id]));
                        let cut: BTreeSet<i64> = set.intersection(&unit_set()).copied().collect();
                        if cut != *set {
                            let fact = Fact::Within { from: from.clone(), to: to.clone(), rational: *rational, set: cut };
                            out.push((fact, Rule::SelfMonoid, vec![d.id]));
                        }
                    } else if let Some(m) = self.find(&Fact::Member { from: from.clone(), to: to.clone(), rational: *rational, degree: 1 }) {
                        let fact = Fact::Within { from: from.clone(), to: from.clone(), rational: *rational, set: set.clone() };
                        out.push((fact, Rule::R2, vec![m, d.id]));
                    }
                }
                Fact::Member { from, to, rational: false, degree } => {
                    let fact = Fact::Member { from: from.clone(), to: to.clone(), rational: true, degree: *degree };
                    out.push((fact, Rule::Rationalize, vec![d.id]));
                }
                Fact::Infinite { from, to, rational: false } => {
                    let fact = Fact::Infinite { from: from.clone(), to: to.clone(), rational: true };
                    out.push((fact, Rule::Rationalize, vec![d.id]));
                }
                _ => {}
            }
        }
        for n in cat.entries.iter().filter(|e| !e.summands.is_empty()) {
            for c in &n.summands {
                let fact = Fact::Member { from: n.name.clone(), to: c.clone(), rational: false, degree: 1 };
                out.push((fact, Rule::R3, Vec::new()));
            }
            for m in &cat.entries {
                if m.dimension != n.dimension {
                    continue;
                }
                let Some(pi) = self.find(&Fact::Flag { object: m.name.clone(), flag: ObjFlag::PiTopRationalZero }) else {
                    continue;
                };
                let mut premises = vec![pi];
                let mut acc = DegSet::finite([0]);
                let mut complete = true;
                for c in &n.summands {
                    match self.tightest(c, &m.name, true) {
                        Some((id, s)) => {
                            premises.push(id);
                            acc = sum_sets(&acc, &DegSet::finite(s.iter().copied()));
                        }
                        None => {
                            complete = false;
                            break;
                        }
                    }
                }
                if complete {
                    let set = acc.as_finite().expect("finite sums stay finite").clone();
                    let fact = Fact::Within { from: n.name.clone(), to: m.name.clone(), rational: true, set };
                    out.push((fact, Rule::R1, premises));
                }
            }
        }
        out
    }

    /// Applies every rule until nothing new appears; returns the number of facts added.
    pub fn saturate(&mut self, cat: &Catalog) -> Result<usize> {
        let mut added = 0;
        loop {
            let mut round = 0;
            for (fact, rule, premises) in self.candidates(cat) {
                if self.insert(fact, rule, premises, None)? {
                    round += 1;
                }
            }
            if round == 0 {
                return Ok(added);
            }
            added += round;
        }
    }

    /// Ids of every fact the given one depends on, premises before conclusions.
    pub fn chain(&self, id: usize) -> Vec<usize> {
        fn visit(c: &Closure, id: usize, seen: &mut BTreeSet<usize>, out: &mut Vec<usize>) {
            if !seen.insert(id) {
                return;
            }
            for &p in &c.facts[id].premises {
                visit(c, p, seen, out);
            }
            out.push(id);
        }
        let mut out = Vec::new();
        visit(self, id, &mut BTreeSet::new(), &mut out);
        out
    }

    /// Re-checks every step of a fact's chain against the catalog, independently of propagation.
    pub fn replay(&self, cat: &Catalog, id: usize) -> Result<()> {
        for step in self.chain(id) {
            let d = &self.facts[step];
            let premises: Vec<&Fact> = d.premises.iter().map(|&p| &self.facts[p].fact).collect();
            if !check_step(cat, &d.fact, d.rule, &premises) {
                return Err(DgaError::Invalid(format!("step [{step}] `{}` does not follow by {}", d.statement, d.rule.as_str())));
            }
        }
        Ok(())
    }

    /// Human-readable proof of a fact.
    pub fn explain(&self, id: usize) -> Vec<String> {
        self.chain(id)
            .into_iter()
            .map(|s| {
                let d = &self.facts[s];
                let from = if d.premises.is_empty() {
                    String::new()
                } else {
                    let ps: Vec<String> = d.premises.iter().map(|p| format!("[{p}]")).collect();
                    format!(" from {}", ps.join(", "))
                };
                let line = d.line.map(|l| format!(" line {l}")).unwrap_or_default();
                format!("[{s}] {} by {}{line}{from}", d.statement, d.rule.as_str())
            })
            .collect()
    }
}

fn catalog_axioms(cat: &Catalog) -> Vec<(Fact, usize)> {
    let mut out = Vec::new();
    for (object, flag, line) in &cat.flags {
        out.push((Fact::Flag { object: object.clone(), flag: *flag }, *line));
    }
    for r in &cat.degsets {
        let (from, to, rational) = (r.from.clone(), r.to.clone(), r.rational);
        match &r.set.kind {
            DegKind::Finite(s) => {
                out.push((Fact::Within { from: from.clone(), to: to.clone(), rational, set: s.clone() }, r.line));
                for &degree in s {
                    out.push((Fact::Member { from: from.clone(), to: to.clone(), rational, degree }, r.line));
                }
            }
            DegKind::Infinite => out.push((Fact::Infinite { from, to, rational }, r.line)),
            DegKind::Unknown => {}
        }
    }
    out
}

fn check_step(cat: &Catalog, fact: &Fact, rule: Rule, premises: &[&Fact]) -> bool {
    match (rule, fact, premises) {
        (Rule::Catalog, _, []) => catalog_axioms(cat).iter().any(|(f, _)| f == fact),
        (Rule::R4, Fact::Flag { object, flag: ObjFlag::Inflexible }, [Fact::Flag { object: o, flag: ObjFlag::StronglyInflexible }]) => {
            object == o
        }
        (Rule::SelfMonoid, Fact::Within { from, to, rational, set }, [p]) => {
            from == to
                && match p {
                    Fact::Flag { object, flag } => {
                        object == from
                            && *set == unit_set()
                            && *flag == if *rational { ObjFlag::ModelInflexible } else { ObjFlag::Inflexible }
                    }
                    Fact::Within { from: a, to: b, rational: r, set: s } => {
                        a == from && b == to && r == rational && s.iter().filter(|x| x.abs() <= 1).copied().collect::<BTreeSet<_>>() == *set
                    }
                    _ => false,
                }
        }
        (Rule::Rationalize, _, [p]) => match (fact, p) {
            (Fact::Within { from, to, rational: false, set }, Fact::Within { from: a, to: b, rational: true, set: s }) => {
                from == a && to == b && set == s
            }
            (Fact::Member { from, to, rational: true, degree }, Fact::Member { from: a, to: b, rational: false, degree: k }) => {
                from == a && to == b && degree == k
            }
            (Fact::Infinite { from, to, rational: true }, Fact::Infinite { from: a, to: b, rational: false }) => from == a && to == b,
            _ => false,
        },
        (Rule::R2, Fact::Flag { object, flag }, [Fact::Within { from, to, rational, .. }]) => {
            object == from && from == to && *flag == if *rational { ObjFlag::ModelInflexible } else { ObjFlag::Inflexible }
        }
        (
            Rule::R2,
            Fact::Within { from, to, rational, set },
            [Fact::Member { from: a, to: b, rational: r1, degree: 1 }, Fact::Within { from: c, to: e, rational: r2, set: s }],
        ) => from == to && a == from && c == from && b == e && r1 == rational && r2 == rational && s == set,
        (Rule::R3, Fact::Member { from, to, rational: false, degree: 1 }, []) => {
            cat.entry(from).is_some_and(|e| e.summands.contains(to))
        }
        (Rule::R1, Fact::Within { from, to, rational: true, set }, [Fact::Flag { object, flag: ObjFlag::PiTopRationalZero }, rest @ ..]) => {
            let Some(n) = cat.entry(from) else { return false };
            if object != to || n.summands.len() != rest.len() || cat.entry(to).map(|m| m.dimension) != Some(n.dimension) {
                return false;
            }
            let mut acc = BTreeSet::from([0]);
            for (c, p) in n.summands.iter().zip(rest) {
                let Fact::Within { from: a, to: b, rational: true, set: s } = p else { return false };
                if a != c || b != to {
                    return false;
                }
                acc = add_sets(&acc, s);
            }
            acc == *set
        }
        _ => false,
    }
}

/// Closes the catalog under the rules. Contradictions name both facts.
pub fn propagate(cat: &Catalog) -> Result<Closure> {
    let mut c = Closure::default();
    for (fact, line) in catalog_axioms(cat) {
        c.insert(fact, Rule::Catalog, Vec::new(), Some(line))?;
    }
    c.saturate(cat)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_of_small_sets() {
        let s = sum_sets(&DegSet::finite([0, 1]), &DegSet::finite([0, 1]));
        assert_eq!(s.as_finite().unwrap(), &BTreeSet::from([0, 1, 2]));
        let s = sum_sets(&DegSet::finite([-1, 0, 1]), &DegSet::finite([0]));
        assert_eq!(s.as_finite().unwrap(), &BTreeSet::from([-1, 0, 1]));
        assert_eq!(sum_sets(&DegSet::finite([0]), &DegSet::infinite()).kind, DegKind::Unknown);
    }

    #[test]
    fn comments_and_sum_names() {
        let cat = parse_catalog("# header\nentry M dim 4 # trailing\nentry M#M dim 4\n").unwrap();
        assert_eq!(cat.entries.len(), 2);
        assert_eq!(cat.entries[1].summands, vec!["M", "M"]);
    }
}
