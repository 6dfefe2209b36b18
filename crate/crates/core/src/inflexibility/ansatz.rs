//! The generic endomorphism, its chain-map constraints and its symbolic degree.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::{Coeff, Element, GradedAlgebra, Monomial};
use crate::cohomology::Cohomology;
use crate::dga::{ConcreteEndo, DgaSpec, FundamentalClass};
use crate::error::{DgaError, Result};
use crate::exec::Exec;
use crate::poly::{Poly, Var};
use crate::rational::Q;

/// Default cap on coefficient multiplications during one symbolic expansion.
pub const DEFAULT_EXPANSION_BUDGET: u64 = 40_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Unknown {
    pub name: String,
    pub generator: usize,
    pub monomial: Monomial,
}

/// f(g) = Σ u_{g,i} b_i over the degree-|g| monomial basis, for every generator g.
#[derive(Clone, Debug)]
pub struct EndoAnsatz {
    pub images: Vec<Element<Poly>>,
    pub unknowns: Vec<Unknown>,
    pub by_generator: Vec<Vec<Var>>,
}

impl EndoAnsatz {
    pub fn name(&self, v: Var) -> String {
        self.unknowns.get(v as usize).map_or_else(|| format!("u{v}"), |u| u.name.clone())
    }

    pub fn namer(&self) -> impl Fn(Var) -> String + '_ {
        move |v| self.name(v)
    }

    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    /// u = 1 on f(g)[g], 0 elsewhere.
    pub fn identity_assignment(&self, alg: &GradedAlgebra) -> Vec<Q> {
        self.unknowns
            .iter()
            .map(|u| {
                let g = alg.generator_power(u.generator, 1).expect("generator monomial");
                if u.monomial == g {
                    Q::one()
                } else {
                    Q::zero()
                }
            })
            .collect()
    }

    pub fn zero_assignment(&self) -> Vec<Q> {
        vec![Q::zero(); self.unknowns.len()]
    }

    /// The concrete endomorphism with the given unknown values.
    pub fn specialize(&self, values: &[Q]) -> ConcreteEndo {
        assert_eq!(values.len(), self.unknowns.len());
        let mut images = vec![Element::zero(); self.by_generator.len()];
        for (v, u) in self.unknowns.iter().enumerate() {
            images[u.generator].add_term(u.monomial.clone(), values[v].clone());
        }
        ConcreteEndo { images }
    }

    /// Values of the unknowns for a concrete endomorphism (inverse of [`Self::specialize`]).
    pub fn coordinates_of(&self, f: &ConcreteEndo) -> Vec<Q> {
        self.unknowns
            .iter()
            .map(|u| f.images[u.generator].coefficient(&u.monomial).cloned().unwrap_or_else(Q::zero))
            .collect()
    }
}

pub fn build_ansatz(a: &DgaSpec) -> EndoAnsatz {
    let alg = a.algebra();
    let mut unknowns = Vec::new();
    let mut images = Vec::new();
    let mut by_generator = Vec::new();
    for (g, gen) in alg.generators().iter().enumerate() {
        let mut img = Element::zero();
        let mut vars = Vec::new();
        for b in alg.basis_of_degree(gen.degree) {
            let v = unknowns.len() as Var;
            unknowns.push(Unknown {
                name: format!("f({})[{}]", gen.name, alg.fmt_monomial(&b)),
                generator: g,
                monomial: b.clone(),
            });
            img.add_term(b, Poly::var(v));
            vars.push(v);
        }
        images.push(img);
        by_generator.push(vars);
    }
    EndoAnsatz { images, unknowns, by_generator }
}

/// A polynomial required to vanish, tagged with the coefficient it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub poly: Poly,
    pub generator: usize,
    pub monomial: Monomial,
}

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn provenance(&self, alg: &GradedAlgebra, i: usize) -> String {
        let c = &self.constraints[i];
        format!("d({}) @ {}", alg.generators()[c.generator].name, alg.fmt_monomial(&c.monomial))
    }

    /// Every constraint vanishes at `values`.
    pub fn satisfied_by(&self, values: &[Q]) -> bool {
        self.constraints.iter().all(|c| {
            c.poly.eval(&|v| values.get(v as usize).cloned()).expect("all unknowns assigned").is_zero()
        })
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Constraints paired with their provenance strings.
    pub fn tagged(&self, alg: &GradedAlgebra) -> Vec<(Poly, String)> {
        (0..self.len()).map(|i| (self.constraints[i].poly.clone(), self.provenance(alg, i))).collect()
    }
}

fn cost(e: &Element<Poly>) -> u64 {
    e.terms().map(|(_, c)| c.len() as u64).sum()
}

/// Multiplicative extension of the ansatz images with a cap on coefficient products.
///
/// With `targets`, partial products that divide no target monomial are dropped;
/// every later factor only multiplies on, so this is exact for those targets.
pub fn expand(
    alg: &GradedAlgebra,
    images: &[Element<Poly>],
    e: &Element<Poly>,
    budget: u64,
    targets: Option<&[Monomial]>,
) -> Result<Element<Poly>> {
    let prune = |x: &mut Element<Poly>| {
        if let Some(ts) = targets {
            x.retain(|m| ts.iter().any(|t| m.divides(t)));
        }
    };
    let mut spent = 0u64;
    let mut charge = |a: &Element<Poly>, b: &Element<Poly>| -> Result<()> {
        spent = spent.saturating_add(cost(a).saturating_mul(cost(b)));
        if spent > budget {
            Err(DgaError::Unsupported(format!("symbolic expansion exceeds budget of {budget} coefficient products")))
        } else {
            Ok(())
        }
    };
    let mut powers: BTreeMap<(usize, u16), Element<Poly>> = BTreeMap::new();
    let mut out = Element::zero();
    for (m, c) in e.terms() {
        let mut t: Element<Poly> = alg.constant(c.clone());
        for (g, &k) in m.exps().iter().enumerate() {
            if k == 0 {
                continue;
            }
            if !powers.contains_key(&(g, k)) {
                let mut p: Element<Poly> = alg.unit();
                let mut img = images[g].clone();
                prune(&mut img);
                for _ in 0..k {
                    charge(&p, &img)?;
                    p = alg.multiply(&p, &img);
                    prune(&mut p);
                }
                powers.insert((g, k), p);
            }
            let p = &powers[&(g, k)];
            charge(&t, p)?;
            t = alg.multiply(&t, p);
            prune(&mut t);
            if t.is_zero() {
                break;
            }
        }
        out.add_assign(&t);
    }
    Ok(out)
}

/// Coefficients of f(dg) − d(f(g)) for every generator g.
pub fn chain_constraints(a: &DgaSpec, f: &EndoAnsatz, exec: Exec, budget: u64) -> Result<ConstraintSystem> {
    let alg = a.algebra();
    let per_gen = exec.map_range(0..alg.len(), |g| -> Result<Vec<Constraint>> {
        let dg: Element<Poly> = a.generator_differential(g).lift();
        let lhs = expand(alg, &f.images, &dg, budget, None)?;
        let rhs = a.differential(&f.images[g]);
        Ok(lhs
            .sub(&rhs)
            .into_terms()
            .map(|(monomial, poly)| Constraint { poly, generator: g, monomial })
            .collect())
    });
    let mut constraints = Vec::new();
    for c in per_gen {
        constraints.extend(c?);
    }
    Ok(ConstraintSystem { constraints })
}

/// P with [f(rep)] = P · [rep], by projecting every monomial of the expansion.
pub fn symbolic_degree(h: &Cohomology, f: &EndoAnsatz, fc: &FundamentalClass, budget: u64) -> Result<Poly> {
    let a = h.dga();
    let alg = a.algebra();
    let rep = &fc.representative;
    let n = fc.degree().ok_or_else(|| DgaError::Invalid("fundamental class is zero".into()))?;
    let base = h.class_in_degree(n, rep)?;
    let Some((k, r)) = base.coordinates.iter().enumerate().find(|(_, x)| !x.is_zero()) else {
        return Err(DgaError::Invalid("fundamental class representative is exact".into()));
    };
    let (k, r) = (k, r.clone());
    let targets = h.projecting_monomials(n);
    let image = expand(alg, &f.images, &rep.lift(), budget, Some(&targets))?;
    let mut p = Poly::zero();
    for (m, c) in image.terms() {
        for (j, x) in h.project_monomial(m) {
            if j == k {
                p.c_add_assign(&c.scale(&(&x / &r)));
            }
        }
    }
    Ok(p)
}

/// Symbolic degree as a `Q` when every unknown is assigned.
pub fn eval_poly(p: &Poly, values: &[Q]) -> Q {
    p.eval(&|v| values.get(v as usize).cloned()).expect("all unknowns assigned")
}
