//! Branch-and-deduce solver for chain-map constraint systems.
//!
//! Each branch carries substitutions, nonzero facts and the remaining
//! constraints. Rules run to a fixpoint; when none applies the branch splits on
//! an unknown, and leaves record what is known about the degree polynomial P.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::dga::DgaSpec;
use crate::exec::Exec;
use crate::poly::{PMono, Poly, Var};
use crate::rational::{fmt_q, rational_root, Q};

use super::ansatz::EndoAnsatz;
use super::lattice::{consistent, isolate, power_of_monomial, Relation};

pub const DEFAULT_MAX_SPLITS: u32 = 8;

#[derive(Clone, Copy, Debug)]
pub struct SolveConfig {
    /// Depth limit for heuristic zero/nonzero splits; rule-forced splits are not counted.
    pub max_splits: u32,
    pub max_nodes: usize,
    pub exec: Exec,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { max_splits: DEFAULT_MAX_SPLITS, max_nodes: 50_000, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AssumptionKind {
    Zero,
    NonZero,
    Equals(Q),
}

#[derive(Clone, Debug, Serialize)]
pub struct Assumption {
    #[serde(skip)]
    pub var: Var,
    #[serde(skip)]
    pub kind: AssumptionKind,
    pub unknown: String,
    pub relation: String,
}

impl Assumption {
    fn new(var: Var, kind: AssumptionKind, names: &dyn Fn(Var) -> String) -> Self {
        let relation = match &kind {
            AssumptionKind::Zero => "= 0".to_string(),
            AssumptionKind::NonZero => "!= 0".to_string(),
            AssumptionKind::Equals(c) => format!("= {}", fmt_q(c)),
        };
        Self { var, kind, unknown: names(var), relation }
    }

    pub fn holds(&self, values: &[Q]) -> bool {
        let x = &values[self.var as usize];
        match &self.kind {
            AssumptionKind::Zero => x.is_zero(),
            AssumptionKind::NonZero => !x.is_zero(),
            AssumptionKind::Equals(c) => x == c,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleApp {
    pub rule: &'static str,
    pub detail: String,
    pub provenance: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeafVerdict {
    /// P vanishes on the branch.
    DegreeZero,
    /// P^k = value with |value| = 1, so |P| = 1.
    UnitDegree { k: String, value: String },
    /// The branch has no rational solutions.
    Contradiction { reason: String },
    /// Nothing conclusive about |P|.
    Inconclusive { reason: String },
}

impl LeafVerdict {
    pub fn bounds_degree(&self) -> bool {
        !matches!(self, LeafVerdict::Inconclusive { .. })
    }
}

/// Leaf data needed to rebuild concrete solutions.
#[derive(Clone, Debug, Default)]
pub struct LeafState {
    pub substitutions: BTreeMap<Var, Poly>,
    pub nonzero: BTreeSet<Var>,
    /// Constraints left unsolved when the leaf was closed.
    pub residual: Vec<Poly>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchNode {
    pub id: usize,
    pub assumptions: Vec<Assumption>,
    pub rules: Vec<RuleApp>,
    /// Relations Π u^e = c used by R-mono in this node.
    pub relations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<LeafVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub substitutions: BTreeMap<String, String>,
    pub children: Vec<BranchNode>,
    #[serde(skip)]
    pub leaf: Option<LeafState>,
}

impl BranchNode {
    pub fn leaves(&self) -> Vec<&BranchNode> {
        if self.children.is_empty() {
            vec![self]
        } else {
            self.children.iter().flat_map(|c| c.leaves()).collect()
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    fn number(&mut self, next: &mut usize) {
        self.id = *next;
        *next += 1;
        for c in &mut self.children {
            c.number(next);
        }
    }

    /// Children whose assumptions all hold at `values`, at every level along the way.
    /// Returns the path of child indices, or the level at which the count was not exactly one.
    pub fn route(&self, values: &[Q]) -> Result<Vec<usize>, (usize, usize)> {
        let mut path = Vec::new();
        let mut node = self;
        while !node.children.is_empty() {
            let hits: Vec<usize> = node
                .children
                .iter()
                .enumerate()
                .filter(|(_, c)| c.assumptions.iter().all(|a| a.holds(values)))
                .map(|(i, _)| i)
                .collect();
            if hits.len() != 1 {
                return Err((path.len(), hits.len()));
            }
            path.push(hits[0]);
            node = &node.children[hits[0]];
        }
        Ok(path)
    }
}

/// The shape f(x_1)^e_1 ⋯ f(x_r)^e_r = d f(g) behind the tensor-power argument.
#[derive(Clone, Debug)]
pub struct SupportPattern {
    pub generator: usize,
    pub label: String,
    pub forms: Vec<SupportForm>,
    /// Exponent vectors of all monomials in d(degree-|g| basis).
    pub support: BTreeSet<Vec<u16>>,
    pub n_generators: usize,
}

#[derive(Clone, Debug)]
pub struct SupportForm {
    pub generator: usize,
    pub label: String,
    pub exponent: u16,
    /// (unknown, generator its basis element is).
    pub entries: Vec<(Var, usize)>,
}

/// Generators whose differential is a single monomial in even generators, each
/// of which maps to a general combination of single generators, with disjoint
/// generator sets across the factors.
pub fn support_patterns(a: &DgaSpec, an: &EndoAnsatz) -> Vec<SupportPattern> {
    let alg = a.algebra();
    let mut out = Vec::new();
    for g in 0..alg.len() {
        let dg = a.generator_differential(g);
        if dg.len() != 1 {
            continue;
        }
        let (m, _) = dg.terms().next().unwrap();
        let mut forms = Vec::new();
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut ok = true;
        for (x, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if alg.is_odd(x) {
                ok = false;
                break;
            }
            let mut entries = Vec::new();
            for &v in &an.by_generator[x] {
                let b = &an.unknowns[v as usize].monomial;
                let single = b.word_length() == 1;
                let Some(h) = b.exps().iter().position(|&k| k > 0) else { ok = false; break };
                if !single || !seen.insert(h) {
                    ok = false;
                    break;
                }
                entries.push((v, h));
            }
            if !ok {
                break;
            }
            forms.push(SupportForm { generator: x, label: alg.generators()[x].name.clone(), exponent: e, entries });
        }
        if !ok || forms.iter().all(|f| f.entries.len() < 2) {
            continue;
        }
        let mut support = BTreeSet::new();
        for b in alg.basis_of_degree(alg.generators()[g].degree) {
            for (t, _) in a.d_monomial(&b).terms() {
                support.insert(t.exps().to_vec());
            }
        }
        out.push(SupportPattern {
            generator: g,
            label: alg.generators()[g].name.clone(),
            forms,
            support,
            n_generators: alg.len(),
        });
    }
    out
}

#[derive(Clone, Debug)]
struct Tagged {
    poly: Poly,
    prov: String,
}

#[derive(Clone)]
struct State {
    constraints: Vec<Tagged>,
    subst: BTreeMap<Var, Poly>,
    nonzero: BTreeSet<Var>,
    nonzero_polys: Vec<Poly>,
    p: Poly,
    splits: u32,
    fired: BTreeSet<String>,
}

enum Step {
    Continue,
    Leaf(LeafVerdict),
    Split(Vec<(Vec<(Var, AssumptionKind)>, bool)>),
    Stuck,
}

struct Ctx<'a> {
    names: &'a (dyn Fn(Var) -> String + Sync),
    /// Generator index per unknown; later generators are eliminated first.
    rank: &'a [usize],
    patterns: &'a [SupportPattern],
    config: SolveConfig,
    nodes: std::sync::atomic::AtomicUsize,
}

impl Ctx<'_> {
    fn fmt(&self, p: &Poly) -> String {
        p.fmt_with(self.names)
    }

    fn fmt_mono(&self, m: &PMono) -> String {
        m.fmt_with(self.names)
    }
}

fn known_nonzero(st: &State, p: &Poly) -> bool {
    match p.as_monomial() {
        Some((m, _)) => m.vars().all(|v| st.nonzero.contains(&v)),
        None => false,
    }
}

impl State {
    fn value(&self, v: Var) -> Poly {
        self.subst.get(&v).cloned().unwrap_or_else(|| Poly::var(v))
    }

    fn substitute(&mut self, v: Var, e: &Poly) {
        for c in &mut self.constraints {
            c.poly = c.poly.substitute(v, e);
        }
        for s in self.subst.values_mut() {
            *s = s.substitute(v, e);
        }
        for s in &mut self.nonzero_polys {
            *s = s.substitute(v, e);
        }
        self.p = self.p.substitute(v, e);
        if self.nonzero.remove(&v) {
            self.nonzero_polys.push(e.clone());
        }
        self.subst.insert(v, e.clone());
    }

    /// Drops zeros, divides out nonzero monomial content, makes monic; detects constant constraints.
    fn normalize(&mut self) -> Result<bool, String> {
        let mut changed = false;
        let mut polys = std::mem::take(&mut self.nonzero_polys);
        polys.retain(|p| {
            if let Some((m, _)) = p.as_monomial() {
                for v in m.vars() {
                    changed |= self.nonzero.insert(v);
                }
                false
            } else {
                true
            }
        });
        if polys.iter().any(|p| p.is_zero()) {
            return Err("an unknown assumed nonzero was forced to 0".into());
        }
        self.nonzero_polys = polys;
        let mut out = Vec::with_capacity(self.constraints.len());
        let mut seen: BTreeSet<Poly> = BTreeSet::new();
        for mut c in std::mem::take(&mut self.constraints) {
            if c.poly.is_zero() {
                changed = true;
                continue;
            }
            let content = c.poly.monomial_content();
            let removable =
                PMono::from_pairs(content.pairs().iter().copied().filter(|(v, _)| self.nonzero.contains(v)).collect());
            if !removable.is_one() {
                c.poly = c.poly.div_monomial(&removable);
                changed = true;
            }
            let monic = c.poly.monic();
            if monic != c.poly {
                c.poly = monic;
            }
            if let Some(k) = c.poly.as_constant() {
                return Err(format!("constraint from {} reduces to {} = 0", c.prov, fmt_q(&k)));
            }
            if seen.insert(c.poly.clone()) {
                out.push(c);
            } else {
                changed = true;
            }
        }
        self.constraints = out;
        Ok(changed)
    }
}

fn rule(rules: &mut Vec<RuleApp>, rule: &'static str, detail: String, provenance: Vec<String>) {
    rules.push(RuleApp { rule, detail, provenance });
}

/// One pass of the rule set; returns what the branch should do next.
fn step(ctx: &Ctx, st: &mut State, rules: &mut Vec<RuleApp>, relations: &mut Vec<String>) -> Step {
    if let Err(reason) = st.normalize() {
        return Step::Leaf(LeafVerdict::Contradiction { reason });
    }
    if st.p.is_zero() {
        return Step::Leaf(LeafVerdict::DegreeZero);
    }
    if let Some(c) = st.p.as_constant() {
        if c.abs().is_one() {
            return Step::Leaf(LeafVerdict::UnitDegree { k: "1".into(), value: fmt_q(&c) });
        }
    }

    // R-support: pairwise-separated supports force single nonzero coefficients.
    if let Some(s) = apply_support(ctx, st, rules) {
        return s;
    }

    // R-factor-zero with a single unknown: substitute it away.
    for c in &st.constraints {
        if let Some((m, _)) = c.poly.as_monomial() {
            if m.pairs().len() == 1 {
                let v = m.pairs()[0].0;
                let prov = c.prov.clone();
                rule(rules, "R-factor-zero", format!("{} = 0", (ctx.names)(v)), vec![prov]);
                st.substitute(v, &Poly::zero());
                return Step::Continue;
            }
        }
    }

    // R-subst: c·u + E = 0 with u absent from E.
    let p_vars = st.p.vars();
    let mut best: Option<((bool, std::cmp::Reverse<usize>, usize), usize, Var)> = None;
    for (i, c) in st.constraints.iter().enumerate() {
        for v in c.poly.vars() {
            let mut occurrences = c.poly.terms().filter(|(m, _)| m.exp(v) > 0);
            let (m, _) = occurrences.next().unwrap();
            if occurrences.next().is_some() || *m != PMono::var(v) {
                continue;
            }
            let key = (p_vars.contains(&v), std::cmp::Reverse(ctx.rank.get(v as usize).copied().unwrap_or(0)), c.poly.len());
            if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                best = Some((key, i, v));
            }
        }
    }
    if let Some((_, i, v)) = best {
        let c = &st.constraints[i];
        let coeff = c.poly.coeff(&PMono::var(v));
        let mut rest = c.poly.clone();
        rest.add_term(PMono::var(v), -coeff.clone());
        let e = rest.scale(&-coeff.recip());
        rule(rules, "R-subst", format!("{} := {}", (ctx.names)(v), ctx.fmt(&e)), vec![c.prov.clone()]);
        st.substitute(v, &e);
        return Step::Continue;
    }

    // R-sum-reduce: a two-term constraint is a monomial equation; propagate nonzero facts.
    for c in &st.constraints {
        if c.poly.len() != 2 {
            continue;
        }
        let t: Vec<(&PMono, &Q)> = c.poly.terms().collect();
        for (a, b) in [(t[0].0, t[1].0), (t[1].0, t[0].0)] {
            if a.vars().all(|v| st.nonzero.contains(&v)) && b.vars().any(|v| !st.nonzero.contains(&v)) {
                let new: Vec<Var> = b.vars().filter(|v| !st.nonzero.contains(v)).collect();
                rule(
                    rules,
                    "R-sum-reduce",
                    format!(
                        "{} = 0 with {} nonzero gives {} nonzero",
                        ctx.fmt(&c.poly),
                        ctx.fmt_mono(a),
                        new.iter().map(|v| (ctx.names)(*v)).collect::<Vec<_>>().join(", ")
                    ),
                    vec![c.prov.clone()],
                );
                st.nonzero.extend(new);
                return Step::Continue;
            }
        }
    }

    // R-mono on binomials whose unknowns are all nonzero.
    let mut rels = Vec::new();
    let mut provs = Vec::new();
    for c in &st.constraints {
        if c.poly.len() != 2 || !c.poly.vars().iter().all(|v| st.nonzero.contains(v)) {
            continue;
        }
        let t: Vec<(&PMono, &Q)> = c.poly.terms().collect();
        rels.push(Relation::ratio(t[0].0, t[1].0, -(t[1].1 / t[0].1)));
        provs.push(c.prov.clone());
    }
    if !rels.is_empty() {
        if let Err(super::lattice::LatticeError::Inconsistent(c)) = consistent(&rels) {
            rule(rules, "R-mono", format!("relations combine to 1 = {}", fmt_q(&c)), provs);
            return Step::Leaf(LeafVerdict::Contradiction { reason: format!("monomial relations force 1 = {}", fmt_q(&c)) });
        }
        let vars: BTreeSet<Var> = rels.iter().flat_map(|r| r.exps.keys().copied()).collect();
        for v in vars {
            let Ok(Some((k, c))) = isolate(&rels, v) else { continue };
            *relations = rels.iter().map(|r| fmt_relation(ctx, r)).collect();
            let name = (ctx.names)(v);
            let kk = k.to_u32().filter(|&k| k <= 4096).unwrap_or(u32::MAX);
            let fact = format!("{name}^{k} = {}", fmt_q(&c));
            let odd = k.is_odd();
            match (odd, kk, (kk != u32::MAX).then(|| rational_root(&c, kk)).flatten()) {
                (_, u32::MAX, _) => continue,
                (true, _, Some(r)) => {
                    rule(rules, "R-mono", format!("{fact}, odd exponent: {name} = {}", fmt_q(&r)), provs);
                    st.substitute(v, &Poly::constant(r));
                    return Step::Continue;
                }
                (false, _, Some(r)) => {
                    rule(rules, "R-mono", format!("{fact}, even exponent: {name} = ±{}", fmt_q(&r)), provs);
                    return Step::Split(vec![
                        (vec![(v, AssumptionKind::Equals(r.clone()))], false),
                        (vec![(v, AssumptionKind::Equals(-r))], false),
                    ]);
                }
                (_, _, None) => {
                    rule(rules, "R-mono", format!("{fact} has no rational solution"), provs);
                    return Step::Leaf(LeafVerdict::Contradiction { reason: format!("{fact} has no rational solution") });
                }
            }
        }
    }

    // P as a monomial in nonzero unknowns: ask the lattice for P^k.
    if let Some((m, c)) = st.p.as_monomial() {
        if m.vars().all(|v| st.nonzero.contains(&v)) {
            let fresh = Var::MAX;
            if let Ok(Some((k, value))) = power_of_monomial(&rels, c, m, fresh) {
                if value.abs().is_one() {
                    *relations = rels.iter().map(|r| fmt_relation(ctx, r)).collect();
                    return Step::Leaf(LeafVerdict::UnitDegree { k: k.to_string(), value: fmt_q(&value) });
                }
                return Step::Leaf(LeafVerdict::Inconclusive {
                    reason: format!("P^{k} = {} on this branch", fmt_q(&value)),
                });
            }
        }
    }

    // R-split to unblock R-support: a pattern lacks a known-nonzero witness.
    if st.splits < ctx.config.max_splits {
        if let Some(v) = support_witness_candidate(ctx, st) {
            rule(rules, "R-split", format!("{0} = 0 or {0} != 0 (R-support witness)", (ctx.names)(v)), Vec::new());
            return Step::Split(vec![(vec![(v, AssumptionKind::Zero)], true), (vec![(v, AssumptionKind::NonZero)], true)]);
        }
    }

    // R-factor-zero with several unknowns: forced partition split.
    for c in &st.constraints {
        if let Some((m, _)) = c.poly.as_monomial() {
            let vars: Vec<Var> = m.vars().collect();
            rule(
                rules,
                "R-factor-zero",
                format!("{} = 0 splits on {}", ctx.fmt_mono(m), vars.iter().map(|v| (ctx.names)(*v)).collect::<Vec<_>>().join(", ")),
                vec![c.prov.clone()],
            );
            let mut branches = Vec::new();
            for (i, &v) in vars.iter().enumerate() {
                let mut a: Vec<(Var, AssumptionKind)> = vars[..i].iter().map(|&u| (u, AssumptionKind::NonZero)).collect();
                a.push((v, AssumptionKind::Zero));
                branches.push((a, false));
            }
            return Step::Split(branches);
        }
    }

    Step::Stuck
}

fn fmt_relation(ctx: &Ctx, r: &Relation) -> String {
    let lhs: Vec<String> = r
        .exps
        .iter()
        .map(|(v, e)| if e.is_one() { (ctx.names)(*v) } else { format!("{}^{}", (ctx.names)(*v), e) })
        .collect();
    format!("{} = {}", lhs.join("*"), fmt_q(&r.value))
}

fn apply_support(ctx: &Ctx, st: &mut State, rules: &mut Vec<RuleApp>) -> Option<Step> {
    for pat in ctx.patterns {
        for (i, form) in pat.forms.iter().enumerate() {
            // Witness: a known-nonzero coefficient in every other form.
            let mut witness = vec![0u16; pat.n_generators];
            let mut names = Vec::new();
            let mut ok = true;
            for (j, other) in pat.forms.iter().enumerate() {
                if j == i {
                    continue;
                }
                match other.entries.iter().find(|(v, _)| known_nonzero(st, &st.value(*v))) {
                    Some((v, h)) => {
                        witness[*h] += other.exponent;
                        names.push((ctx.names)(*v));
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let key = format!("{}:{}:{}", pat.label, form.label, names.join(","));
            if st.fired.contains(&key) {
                continue;
            }
            let live: Vec<(Var, usize, Poly)> = form
                .entries
                .iter()
                .map(|(v, h)| (*v, *h, st.value(*v)))
                .filter(|(_, _, p)| !p.is_zero())
                .collect();
            let outside = |exps: Vec<u16>| !pat.support.contains(&exps);
            let mut derived = Vec::new();
            let e = form.exponent;
            if e == 1 {
                for (_, h, p) in &live {
                    let mut exps = witness.clone();
                    exps[*h] += 1;
                    if outside(exps) {
                        derived.push(p.clone());
                    }
                }
            } else {
                let mut all = true;
                for a in 0..live.len() {
                    for b in a + 1..live.len() {
                        let mut exps = witness.clone();
                        exps[live[a].1] += e - 1;
                        exps[live[b].1] += 1;
                        if outside(exps) {
                            derived.push(live[a].2.mul(&live[b].2));
                        } else {
                            all = false;
                        }
                    }
                }
                if !all {
                    derived.clear();
                }
            }
            st.fired.insert(key);
            if derived.is_empty() {
                continue;
            }
            let detail = if e == 1 {
                format!(
                    "f({}) restricted by witnesses {}: {} vanish",
                    form.label,
                    names.join(", "),
                    derived.iter().map(|p| ctx.fmt(p)).collect::<Vec<_>>().join(", ")
                )
            } else {
                format!("f({}) has at most one nonzero coefficient (witnesses {})", form.label, names.join(", "))
            };
            let prov = format!("support of d({})", pat.label);
            rule(rules, "R-support", detail, vec![prov.clone()]);
            for poly in derived {
                st.constraints.push(Tagged { poly, prov: prov.clone() });
            }
            return Some(Step::Continue);
        }
    }
    None
}

/// A free unknown whose nonzeroness would supply a missing R-support witness.
fn support_witness_candidate(ctx: &Ctx, st: &State) -> Option<Var> {
    for pat in ctx.patterns {
        let witnessed: Vec<bool> = pat
            .forms
            .iter()
            .map(|f| f.entries.iter().any(|(v, _)| known_nonzero(st, &st.value(*v))))
            .collect();
        for (i, form) in pat.forms.iter().enumerate() {
            let others_missing = pat.forms.iter().enumerate().any(|(j, _)| j != i && !witnessed[j]);
            let live = form.entries.iter().filter(|(v, _)| !st.value(*v).is_zero()).count();
            if !others_missing || live < 2 {
                continue;
            }
            for (j, other) in pat.forms.iter().enumerate() {
                if j == i || witnessed[j] {
                    continue;
                }
                if let Some((v, _)) = other.entries.iter().find(|(v, _)| !st.subst.contains_key(v) && !st.nonzero.contains(v)) {
                    return Some(*v);
                }
            }
        }
    }
    None
}

/// Heuristic split variable: unknowns in binomials, then in P, then in the shortest constraint.
fn choose_split(st: &State) -> Option<Var> {
    let free = |v: &Var| !st.nonzero.contains(v);
    for c in &st.constraints {
        if c.poly.len() == 2 {
            if let Some(v) = c.poly.vars().into_iter().find(free) {
                return Some(v);
            }
        }
    }
    if let Some(v) = st.p.vars().into_iter().find(free) {
        return Some(v);
    }
    st.constraints.iter().min_by_key(|c| (c.poly.len(), c.poly.total_degree())).and_then(|c| c.poly.vars().into_iter().find(free))
}

fn explore(ctx: &Ctx, mut st: State, assumptions: Vec<Assumption>) -> BranchNode {
    use std::sync::atomic::Ordering;
    let mut rules = Vec::new();
    let mut relations = Vec::new();
    let count = ctx.nodes.fetch_add(1, Ordering::Relaxed);
    let finish = |st: &State, rules: Vec<RuleApp>, relations: Vec<String>, verdict: Option<LeafVerdict>, children: Vec<BranchNode>| BranchNode {
        id: 0,
        assumptions: assumptions.clone(),
        rules,
        relations,
        degree: verdict.as_ref().map(|_| ctx.fmt(&st.p)),
        substitutions: if verdict.is_some() {
            st.subst.iter().map(|(v, p)| ((ctx.names)(*v), ctx.fmt(p))).collect()
        } else {
            BTreeMap::new()
        },
        leaf: verdict.as_ref().map(|_| LeafState {
            substitutions: st.subst.clone(),
            nonzero: st.nonzero.clone(),
            residual: st.constraints.iter().map(|c| c.poly.clone()).collect(),
        }),
        verdict,
        children,
    };
    if count >= ctx.config.max_nodes {
        let v = LeafVerdict::Inconclusive { reason: format!("node budget of {} exhausted", ctx.config.max_nodes) };
        return finish(&st, rules, relations, Some(v), Vec::new());
    }
    loop {
        match step(ctx, &mut st, &mut rules, &mut relations) {
            Step::Continue => continue,
            Step::Leaf(v) => return finish(&st, rules, relations, Some(v), Vec::new()),
            Step::Split(branches) => return split(ctx, st, rules, relations, branches, &finish),
            Step::Stuck => {
                if st.splits >= ctx.config.max_splits {
                    let v = LeafVerdict::Inconclusive {
                        reason: format!("split depth {} reached with {} open constraints", st.splits, st.constraints.len()),
                    };
                    return finish(&st, rules, relations, Some(v), Vec::new());
                }
                let Some(v) = choose_split(&st) else {
                    let v = LeafVerdict::Inconclusive {
                        reason: format!("no rule applies; P = {}", ctx.fmt(&st.p)),
                    };
                    return finish(&st, rules, relations, Some(v), Vec::new());
                };
                rule(&mut rules, "R-split", format!("{} = 0 or {} != 0", (ctx.names)(v), (ctx.names)(v)), Vec::new());
                let branches = vec![(vec![(v, AssumptionKind::Zero)], true), (vec![(v, AssumptionKind::NonZero)], true)];
                return split(ctx, st, rules, relations, branches, &finish);
            }
        }
    }
}

type Finish<'f> = dyn Fn(&State, Vec<RuleApp>, Vec<String>, Option<LeafVerdict>, Vec<BranchNode>) -> BranchNode + 'f;

fn split(
    ctx: &Ctx,
    st: State,
    rules: Vec<RuleApp>,
    relations: Vec<String>,
    branches: Vec<(Vec<(Var, AssumptionKind)>, bool)>,
    finish: &Finish,
) -> BranchNode {
    let children = ctx.config.exec.map(&branches, |(assume, heuristic)| {
        let mut child = st.clone();
        if *heuristic {
            child.splits += 1;
        }
        let mut list = Vec::new();
        for (v, kind) in assume {
            match kind {
                AssumptionKind::Zero => child.substitute(*v, &Poly::zero()),
                AssumptionKind::NonZero => {
                    child.nonzero.insert(*v);
                }
                AssumptionKind::Equals(c) => child.substitute(*v, &Poly::constant(c.clone())),
            }
            list.push(Assumption::new(*v, kind.clone(), ctx.names));
        }
        explore(ctx, child, list)
    });
    finish(&st, rules, relations, None, children)
}

/// Runs the solver on tagged constraints. `rank` orders unknowns for elimination
/// (higher first), typically the index of the generator they belong to.
pub fn solve(
    constraints: &[(Poly, String)],
    p: &Poly,
    names: &(dyn Fn(Var) -> String + Sync),
    rank: &[usize],
    patterns: &[SupportPattern],
    config: SolveConfig,
) -> BranchNode {
    let ctx = Ctx { names, rank, patterns, config, nodes: std::sync::atomic::AtomicUsize::new(0) };
    let st = State {
        constraints: constraints.iter().map(|(poly, prov)| Tagged { poly: poly.clone(), prov: prov.clone() }).collect(),
        subst: BTreeMap::new(),
        nonzero: BTreeSet::new(),
        nonzero_polys: Vec::new(),
        p: p.clone(),
        splits: 0,
        fired: BTreeSet::new(),
    };
    let mut root = explore(&ctx, st, Vec::new());
    let mut next = 0;
    root.number(&mut next);
    root
}

impl LeafState {
    /// A full assignment in this leaf's region: free unknowns take `free` (or 1 when
    /// assumed nonzero) and substituted ones follow. `None` if the residual
    /// constraints or the nonzero assumptions fail there.
    pub fn specialize(&self, n: usize, free: &Q) -> Option<Vec<Q>> {
        let mut values: Vec<Q> = (0..n as Var)
            .map(|v| if self.nonzero.contains(&v) && free.is_zero() { Q::one() } else { free.clone() })
            .collect();
        // Substitution targets may mention other substituted unknowns; iterate to a fixed point.
        for _ in 0..=self.substitutions.len() {
            let mut changed = false;
            for (v, p) in &self.substitutions {
                let x = p.eval(&|u| values.get(u as usize).cloned())?;
                if values[*v as usize] != x {
                    values[*v as usize] = x;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let at = |p: &Poly| p.eval(&|u| values.get(u as usize).cloned());
        if self.substitutions.iter().any(|(v, p)| at(p).as_ref() != Some(&values[*v as usize])) {
            return None;
        }
        if self.residual.iter().any(|p| !at(p).is_some_and(|x| x.is_zero())) {
            return None;
        }
        if self.nonzero.iter().any(|v| values[*v as usize].is_zero()) {
            return None;
        }
        Some(values)
    }
}
