//! Inflexibility certificates for self-maps of Poincaré DGAs.
//!
//! [`certify_inflexible`] builds the generic endomorphism, extracts its chain-map
//! constraints, reduces f(fundamental class) to a degree polynomial P and runs
//! the branch solver. The verdict is `inflexible` only when every leaf pins |P|
//! to 0 or 1; anything else is `inconclusive`. Flexibility is shown only by
//! evaluating concrete endomorphisms with [`degree_of`].

pub mod ansatz;
pub mod lattice;
pub mod solver;

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::Element;
use crate::cohomology::Cohomology;
use crate::dga::{odd_word_length, ConcreteEndo, DgaSpec, FundamentalClass};
use crate::error::{DgaError, Result};
use crate::exec::Exec;
use crate::poly::Poly;
use crate::rational::{fmt_q, Q};

pub use ansatz::{
    build_ansatz, chain_constraints, eval_poly, symbolic_degree, Constraint, ConstraintSystem, EndoAnsatz, Unknown,
    DEFAULT_EXPANSION_BUDGET,
};
pub use solver::{
    solve, support_patterns, Assumption, AssumptionKind, BranchNode, LeafVerdict, SolveConfig, SupportPattern,
    DEFAULT_MAX_SPLITS,
};

#[derive(Clone, Copy, Debug)]
pub struct CertifyConfig {
    pub solve: SolveConfig,
    pub expansion_budget: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { solve: SolveConfig::default(), expansion_budget: DEFAULT_EXPANSION_BUDGET }
    }
}

impl CertifyConfig {
    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.solve.exec = exec;
        self
    }
}

/// Everything the solver consumes, kept for replaying solutions.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub ansatz: EndoAnsatz,
    pub system: ConstraintSystem,
    pub degree: Poly,
    pub patterns: Vec<SupportPattern>,
}

pub fn analyze(h: &Cohomology, fc: &FundamentalClass, config: &CertifyConfig) -> Result<Analysis> {
    let a = h.dga();
    let ansatz = build_ansatz(a);
    let system = chain_constraints(a, &ansatz, config.solve.exec, config.expansion_budget)?;
    let degree = symbolic_degree(h, &ansatz, fc, config.expansion_budget)?;
    let patterns = support_patterns(a, &ansatz);
    Ok(Analysis { ansatz, system, degree, patterns })
}

impl Analysis {
    pub fn solve(&self, h: &Cohomology, config: SolveConfig) -> BranchNode {
        let names = |v| self.ansatz.name(v);
        let rank: Vec<usize> = self.ansatz.unknowns.iter().map(|u| u.generator).collect();
        solve(&self.system.tagged(h.dga().algebra()), &self.degree, &names, &rank, &self.patterns, config)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Inflexible,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafSummary {
    pub id: usize,
    pub assumptions: Vec<String>,
    pub degree: String,
    pub verdict: LeafVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub algebra: String,
    pub fundamental_class: String,
    pub degree_polynomial: Option<String>,
    pub unknowns: usize,
    pub constraints: usize,
    pub leaves: Vec<LeafSummary>,
    pub rules_used: BTreeSet<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip)]
    pub tree: Option<BranchNode>,
}

pub fn certify_inflexible(h: &Cohomology, fc: &FundamentalClass, config: &CertifyConfig) -> Certificate {
    let a = h.dga();
    let mut cert = Certificate {
        algebra: a.name.clone(),
        fundamental_class: format!("{}{}", a.fmt(&fc.representative), crate::dga::fmt_scale(&fc.scale)),
        degree_polynomial: None,
        unknowns: 0,
        constraints: 0,
        leaves: Vec::new(),
        rules_used: BTreeSet::new(),
        verdict: Verdict::Inconclusive,
        reason: None,
        tree: None,
    };
    let analysis = match analyze(h, fc, config) {
        Ok(x) => x,
        Err(e) => {
            cert.reason = Some(e.to_string());
            return cert;
        }
    };
    cert.degree_polynomial = Some(analysis.degree.fmt_with(&analysis.ansatz.namer()));
    cert.unknowns = analysis.ansatz.len();
    cert.constraints = analysis.system.len();
    let tree = analysis.solve(h, config.solve);
    fn collect(n: &BranchNode, out: &mut BTreeSet<String>) {
        out.extend(n.rules.iter().map(|r| r.rule.to_string()));
        n.children.iter().for_each(|c| collect(c, out));
    }
    collect(&tree, &mut cert.rules_used);
    cert.leaves = tree
        .leaves()
        .into_iter()
        .map(|l| LeafSummary {
            id: l.id,
            assumptions: l.assumptions.iter().map(|a| format!("{} {}", a.unknown, a.relation)).collect(),
            degree: l.degree.clone().unwrap_or_default(),
            verdict: l.verdict.clone().expect("leaves carry verdicts"),
        })
        .collect();
    let open = cert.leaves.iter().filter(|l| !l.verdict.bounds_degree()).count();
    if open == 0 {
        cert.verdict = Verdict::Inflexible;
    } else {
        cert.reason = Some(format!("{open} of {} leaves inconclusive", cert.leaves.len()));
    }
    cert.tree = Some(tree);
    cert
}

/// The scalar d with [f(rep)] = d·[rep].
pub fn degree_of_with(h: &Cohomology, f: &ConcreteEndo, fc: &FundamentalClass) -> Result<Q> {
    let a = h.dga();
    if let Err(g) = a.check_chain_map(f)? {
        return Err(DgaError::NotChainMap(g));
    }
    let rep = &fc.representative;
    let n = fc.degree().ok_or_else(|| DgaError::Invalid("fundamental class is zero".into()))?;
    let base = h.class_in_degree(n, rep)?;
    let image = h.class_in_degree(n, &f.apply(a, rep))?;
    let Some(k) = base.coordinates.iter().position(|x| !x.is_zero()) else {
        return Err(DgaError::Invalid("fundamental class representative is exact".into()));
    };
    let d = &image.coordinates[k] / &base.coordinates[k];
    if base.scale(&d) != image {
        return Err(DgaError::Invalid("image class is not a multiple of the fundamental class".into()));
    }
    Ok(d)
}

pub fn degree_of(a: &DgaSpec, f: &ConcreteEndo, fc: &FundamentalClass) -> Result<Q> {
    degree_of_with(&Cohomology::new(a), f, fc)
}

/// A word-length component of a cohomology basis class and its scaling eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct FlexWitness {
    pub degree: u32,
    pub class_index: usize,
    pub odd_word_length: u32,
    pub component: String,
    pub factor: String,
    #[serde(skip)]
    pub factor_q: Q,
    /// [f(component)] = factor·[component] was checked.
    pub verified: bool,
    pub flexible: bool,
}

pub const SCALING_BASE: i64 = 2;

/// Scaling eigenclasses covering every cohomology class of a pure DGA, degrees 0..=formal dimension.
pub fn pure_flexibility_witnesses(h: &Cohomology) -> Result<Vec<FlexWitness>> {
    let a = h.dga();
    let base = Q::from_integer(SCALING_BASE.into());
    let f = a.pure_scaling_endo(&base)?;
    let top = u32::try_from(a.formal_dimension()).unwrap_or(0);
    let alg = a.algebra();
    let mut out = Vec::new();
    for n in 0..=top {
        let space = h.space(n);
        for (i, rep) in space.representatives.iter().enumerate() {
            let mut parts: std::collections::BTreeMap<u32, Element> = std::collections::BTreeMap::new();
            for (m, c) in rep.terms() {
                parts.entry(odd_word_length(alg, m)).or_default().add_term(m.clone(), c.clone());
            }
            let mut total = vec![Q::zero(); space.dimension()];
            for (k, comp) in parts {
                let class = h.class_in_degree(n, &comp)?;
                if class.is_zero() {
                    continue;
                }
                let factor = num_traits::pow(base.clone(), (n + k) as usize);
                let image = h.class_in_degree(n, &f.apply(a, &comp))?;
                let verified = image == class.scale(&factor);
                for (t, x) in total.iter_mut().zip(&class.coordinates) {
                    *t += x;
                }
                out.push(FlexWitness {
                    degree: n,
                    class_index: i,
                    odd_word_length: k,
                    component: a.fmt(&comp),
                    factor: fmt_q(&factor),
                    flexible: n > 0 && factor != Q::one() && factor != -Q::one() && !factor.is_zero(),
                    factor_q: factor,
                    verified,
                });
            }
            let expected: Vec<Q> = (0..space.dimension()).map(|j| if j == i { Q::one() } else { Q::zero() }).collect();
            if total != expected {
                return Err(DgaError::Invalid(format!("word-length components of class {i} in degree {n} do not sum to it")));
            }
        }
    }
    Ok(out)
}
