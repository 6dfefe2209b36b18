use std::fmt::Write as _;
use std::path::Path;

use dgalab::cohomology::Cohomology;
use dgalab::degsets::{parse_catalog, propagate, ObjFlag};
use dgalab::dga::{fmt_scale, DgaSpec, FundamentalClass};
use dgalab::expr::parse_expr;
use dgalab::format::{parse_dga, serialize_dga, DgaFile};
use dgalab::inflexibility::{certify_inflexible, CertifyConfig, Verdict};
use dgalab::poincare::{barge_sullivan_report, check_poincare, verify_lagrangian, Tri, DEFAULT_HEIGHT_BOUND};
use dgalab::rational::{fmt_q, parse_rational};
use dgalab::{Exec, Q};
use serde_json::{json, Value};

use crate::report::{Exit, InputDigest};

pub struct Outcome {
    pub exit: Exit,
    pub verdict: String,
    pub payload: Value,
    pub text: String,
    pub trace: Option<String>,
}

impl Outcome {
    fn new(exit: Exit, verdict: impl Into<String>, payload: Value, text: String) -> Self {
        Self { exit, verdict: verdict.into(), payload, text, trace: None }
    }
}

/// Input problems; always exit 3.
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

pub struct Ctx {
    pub exec: Exec,
    pub inputs: Vec<InputDigest>,
}

impl Ctx {
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure(format!("{path}: {e}")))?;
        self.inputs.push(InputDigest::new(path, &bytes));
        String::from_utf8(bytes).map_err(|_| Failure(format!("{path}: not UTF-8")))
    }

    fn load(&mut self, path: &str) -> Result<DgaFile, Failure> {
        let text = self.read(path)?;
        parse_dga(&text).map_err(|e| Failure(format!("{path}: {e}")))
    }

    fn cohomology(&self, spec: &DgaSpec) -> Cohomology {
        Cohomology::with_exec(spec, self.exec)
    }
}

fn fundamental(file: &DgaFile, scale: Option<&str>) -> Result<FundamentalClass, Failure> {
    let fc = file.fundamental.clone().ok_or_else(|| Failure("no `fundamental` statement in the input".into()))?;
    match scale {
        None => Ok(fc),
        Some(s) => {
            let a = parse_rational(s).ok_or_else(|| Failure(format!("bad rational `{s}`")))?;
            if a == Q::from_integer(0.into()) {
                return Err(Failure("scale must be nonzero".into()));
            }
            Ok(fc.scaled(&a))
        }
    }
}

fn fmt_fc(a: &DgaSpec, fc: &FundamentalClass) -> String {
    format!("{}{}", a.fmt(&fc.representative), fmt_scale(&fc.scale))
}

fn tri(t: Tri) -> &'static str {
    match t {
        Tri::Yes => "yes",
        Tri::No => "no",
        Tri::Undetermined => "undetermined",
    }
}

fn q_rows(m: &[Vec<Q>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(fmt_q).collect()).collect()
}

pub fn check(ctx: &mut Ctx, path: &str) -> Result<Outcome, Failure> {
    let file = ctx.load(path)?;
    let a = &file.spec;
    let d2 = a.check_d_squared();
    let s = a.structural_report();
    let mut text = String::new();
    let _ = writeln!(text, "{}: {} generators, formal dimension {}", a.name, a.generators().len(), a.formal_dimension());
    let _ = writeln!(
        text,
        "d^2 = 0: {}",
        match &d2 {
            Ok(()) => "yes".to_string(),
            Err(g) => format!("no (fails at {g})"),
        }
    );
    let _ = writeln!(text, "simply connected: {}, minimal: {}, pure: {}", s.simply_connected, s.minimal, s.pure);
    let mut ok = d2.is_ok();
    let mut fc_json = Value::Null;
    if let (Ok(()), Some(fc)) = (&d2, &file.fundamental) {
        let h = ctx.cohomology(a);
        let class = h.class_of(&fc.representative)?;
        let nonexact = !class.is_zero();
        ok &= nonexact;
        let _ = writeln!(text, "fundamental class {}: {}", fmt_fc(a, fc), if nonexact { "non-exact" } else { "EXACT" });
        fc_json = json!({
            "representative": a.fmt(&fc.representative),
            "scale": fmt_q(&fc.scale),
            "degree": class.degree,
            "nonexact": nonexact,
        });
    }
    let generators: Vec<Value> = a
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| json!({"name": g.name, "degree": g.degree, "d": a.fmt(a.generator_differential(i))}))
        .collect();
    let payload = json!({
        "name": a.name,
        "generators": generators,
        "d_squared_zero": d2.is_ok(),
        "d_squared_failure": d2.err(),
        "simply_connected": s.simply_connected,
        "minimal": s.minimal,
        "pure": s.pure,
        "formal_dimension": a.formal_dimension(),
        "fundamental": fc_json,
    });
    let (exit, verdict) = if ok { (Exit::Holds, "valid") } else { (Exit::Fails, "invalid") };
    Ok(Outcome::new(exit, verdict, payload, text))
}

pub fn cohom(ctx: &mut Ctx, path: &str, degree: Option<u32>, upto: Option<u32>) -> Result<Outcome, Failure> {
    let file = ctx.load(path)?;
    let a = &file.spec;
    let h = ctx.cohomology(a);
    let range = match (degree, upto) {
        (Some(n), None) => n..=n,
        (None, Some(n)) => 0..=n,
        _ => return Err(Failure("give exactly one of --degree N or --upto N".into())),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for sp in h.spaces(range) {
        let reps: Vec<String> = sp.representatives.iter().map(|e| a.fmt(e)).collect();
        let _ = writeln!(text, "H^{} dimension {}{}", sp.degree, sp.dimension(), if reps.is_empty() { String::new() } else { format!(": {}", reps.join(", ")) });
        rows.push(json!({"degree": sp.degree, "dimension": sp.dimension(), "representatives": reps}));
    }
    Ok(Outcome::new(Exit::Holds, "computed", json!({"name": a.name, "degrees": rows}), text))
}

pub fn class(ctx: &mut Ctx, path: &str, expr: &str) -> Result<Outcome, Failure> {
    let file = ctx.load(path)?;
    let a = &file.spec;
    let e = parse_expr(a.algebra(), &a.aliases, expr).map_err(|err| Failure(err.at_line(1, 1).to_string()))?;
    let h = ctx.cohomology(a);
    let class = h.class_of(&e)?;
    let sp = h.space(class.degree);
    let witness = if class.is_zero() { h.coboundary_witness(&e)? } else { None };
    let coords: Vec<String> = class.coordinates.iter().map(fmt_q).collect();
    let basis: Vec<String> = sp.representatives.iter().map(|x| a.fmt(x)).collect();
    let mut text = format!("[{}] in H^{}\n", a.fmt(&e), class.degree);
    if class.is_zero() {
        let _ = writeln!(text, "exact{}", witness.as_ref().map(|u| format!(": d({})", a.fmt(u))).unwrap_or_default());
    } else {
        let _ = writeln!(text, "coordinates ({}) over {}", coords.join(", "), basis.join(", "));
    }
    let payload = json!({
        "element": a.fmt(&e),
        "degree": class.degree,
        "exact": class.is_zero(),
        "coordinates": coords,
        "basis": basis,
        "witness": witness.map(|u| a.fmt(&u)),
    });
    let verdict = if class.is_zero() { "exact" } else { "nonzero" };
    Ok(Outcome::new(Exit::Holds, verdict, payload, text))
}

pub fn poincare(ctx: &mut Ctx, path: &str, spot_check: bool) -> Result<Outcome, Failure> {
    let file = ctx.load(path)?;
    let fc = fundamental(&file, None)?;
    let h = ctx.cohomology(&file.spec);
    let r = check_poincare(&h, &fc, spot_check);
    let mut text = format!("formal dimension {}, top cohomology dimension {}\n", r.formal_dimension, r.top_dimension);
    for p in &r.pairings {
        let _ = writeln!(text, "H^{} x H^{}: {} x {} {}", p.degree, r.formal_dimension - p.degree as i64, p.dim_low, p.dim_high, if p.perfect { "perfect" } else { "NOT perfect" });
    }
    if let Some(f) = &r.failure {
        let _ = writeln!(text, "failed: {f}");
    }
    let (exit, verdict) = if r.passed { (Exit::Holds, "poincare") } else { (Exit::Fails, "not_poincare") };
    Ok(Outcome::new(exit, verdict, serde_json::to_value(&r)?, text))
}

pub fn height_bound() -> Result<u32, Failure> {
    match std::env::var("DGALAB_HEIGHT_BOUND") {
        Ok(v) => v.trim().parse().map_err(|_| Failure(format!("DGALAB_HEIGHT_BOUND: bad value `{v}`"))),
        Err(_) => Ok(DEFAULT_HEIGHT_BOUND),
    }
}

pub fn intersection(ctx: &mut Ctx, path: &str, scale: Option<&str>, canonical: bool) -> Result<Outcome, Failure> {
    let file = ctx.load(path)?;
    let fc = fundamental(&file, scale)?;
    let a = &file.spec;
    let h = ctx.cohomology(a);
    let basis = (!canonical && !file.basis.is_empty()).then_some(file.basis.as_slice());
    let r = barge_sullivan_report(&h, &fc, basis, height_bound()?)?;
    let lag_ok = r.witt.lagrangian.as_ref().map(|l| verify_lagrangian(&r.form, l));
    let mut text = format!("intersection form on H^{} ({})\n", a.formal_dimension() / 2, r.form.labels.join(", "));
    for row in q_rows(&r.form.matrix) {
        let _ = writeln!(text, "  [{}]", row.join(", "));
    }
    let _ = writeln!(text, "signature {}, metabolic {} ({})", r.witt.signature, tri(r.witt.metabolic), r.witt.reason);
    if let Some(l) = &r.witt.lagrangian {
        let vs: Vec<String> = q_rows(l).into_iter().map(|v| format!("({})", v.join(", "))).collect();
        let _ = writeln!(text, "lagrangian {}", vs.join(" "));
    }
    let _ = writeln!(text, "witt condition {}, signature condition {}", tri(r.condition_witt), tri(r.condition_signature));
    let payload = json!({
        "degree": a.formal_dimension() / 2,
        "fundamental_class": fmt_fc(a, &fc),
        "labels": r.form.labels,
        "matrix": q_rows(&r.form.matrix),
        "signature": r.witt.signature,
        "metabolic": tri(r.witt.metabolic),
        "reason": r.witt.reason,
        "lagrangian": r.witt.lagrangian.as_deref().map(q_rows),
        "lagrangian_verified": lag_ok,
        "height_bound": r.witt.height_bound,
        "condition_witt": tri(r.condition_witt),
        "condition_signature": tri(r.condition_signature),
    });
    let (exit, verdict) = if r.both_hold() {
        (Exit::Holds, "realizable")
    } else if r.condition_signature == Tri::No || r.witt.metabolic == Tri::No {
        (Exit::Fails, "not_realizable")
    } else {
        (Exit::Inconclusive, "undetermined")
    };
    Ok(Outcome::new(exit, verdict, payload, text))
}

pub fn inflexible(ctx: &mut Ctx, path: &str, max_splits: Option<u32>, trace: Option<&Path>) -> Result<Outcome, Failure> {
    let file = ctx.load(path)?;
    let fc = fundamental(&file, None)?;
    let h = ctx.cohomology(&file.spec);
    let mut config = CertifyConfig::default().with_exec(ctx.exec);
    if let Some(d) = max_splits {
        config.solve.max_splits = d;
    }
    let cert = certify_inflexible(&h, &fc, &config);
    let mut text = format!("{}: {} unknowns, {} constraints\n", cert.algebra, cert.unknowns, cert.constraints);
    if let Some(p) = &cert.degree_polynomial {
        let _ = writeln!(text, "degree polynomial {p}");
    }
    for l in &cert.leaves {
        let assumptions = if l.assumptions.is_empty() { "(none)".to_string() } else { l.assumptions.join(", ") };
        let _ = writeln!(text, "leaf {}: {} => degree {} [{}]", l.id, assumptions, l.degree, serde_json::to_value(&l.verdict)?["kind"].as_str().unwrap_or(""));
    }
    let rules: Vec<&str> = cert.rules_used.iter().map(String::as_str).collect();
    let _ = writeln!(text, "rules {}", rules.join(", "));
    let verdict = match cert.verdict {
        Verdict::Inflexible => "inflexible",
        Verdict::Inconclusive => "inconclusive",
    };
    let _ = writeln!(text, "verdict {verdict}{}", cert.reason.as_ref().map(|r| format!(" ({r})")).unwrap_or_default());
    let mut out = Outcome::new(
        if cert.verdict == Verdict::Inflexible { Exit::Holds } else { Exit::Inconclusive },
        verdict,
        serde_json::to_value(&cert)?,
        text,
    );
    if let (Some(p), Some(tree)) = (trace, &cert.tree) {
        std::fs::write(p, serde_json::to_string_pretty(tree)? + "\n").map_err(|e| Failure(format!("{}: {e}", p.display())))?;
        out.trace = Some(p.display().to_string());
    }
    Ok(out)
}

pub fn tensor(ctx: &mut Ctx, left: &str, right: &str, out: &Path) -> Result<Outcome, Failure> {
    let fa = ctx.load(left)?;
    let fb = ctx.load(right)?;
    let t = DgaSpec::tensor_product(&fa.spec, &fb.spec);
    let fundamental = match (&fa.fundamental, &fb.fundamental) {
        (Some(x), Some(y)) => Some(FundamentalClass::tensor(&fa.spec, x, &fb.spec, y, &t)),
        _ => None,
    };
    let file = DgaFile { spec: t, fundamental, basis: Vec::new() };
    let body = serialize_dga(&file);
    std::fs::write(out, &body).map_err(|e| Failure(format!("{}: {e}", out.display())))?;
    let t = &file.spec;
    let text = format!("wrote {} ({} generators, formal dimension {}) to {}\n", t.name, t.generators().len(), t.formal_dimension(), out.display());
    let payload = json!({
        "name": t.name,
        "generators": t.generators().len(),
        "formal_dimension": t.formal_dimension(),
        "fundamental": file.fundamental.as_ref().map(|f| fmt_fc(t, f)),
        "output": out.display().to_string(),
    });
    Ok(Outcome::new(Exit::Holds, "written", payload, text))
}

pub fn homotopy(ctx: &mut Ctx, path: &str, upto: Option<u32>) -> Result<Outcome, Failure> {
    let file = ctx.load(path)?;
    let a = &file.spec;
    let top = upto.unwrap_or_else(|| a.generators().iter().map(|g| g.degree).max().unwrap_or(0));
    let dims = a.rational_homotopy_dims(top);
    let s = a.structural_report();
    let mut text = format!("{}: dim π_k ⊗ Q for k ≤ {top}\n", a.name);
    for (k, d) in dims.iter().filter(|(_, d)| **d > 0) {
        let _ = writeln!(text, "  π_{k}: {d}");
    }
    if !s.minimal {
        let _ = writeln!(text, "warning: not minimal; generator counts need not be homotopy ranks");
    }
    let dims_json: serde_json::Map<String, Value> = dims.iter().map(|(k, d)| (k.to_string(), json!(d))).collect();
    let payload = json!({"name": a.name, "upto": top, "minimal": s.minimal, "dimensions": dims_json});
    Ok(Outcome::new(Exit::Holds, "computed", payload, text))
}

pub fn degsets(ctx: &mut Ctx, path: &str) -> Result<Outcome, Failure> {
    let text_in = ctx.read(path)?;
    let cat = parse_catalog(&text_in).map_err(|e| Failure(format!("{path}: {e}")))?;
    let closure = propagate(&cat).map_err(|e| Failure(format!("{path}: {e}")))?;
    let mut text = String::new();
    let mut derived = Vec::new();
    for d in closure.derived() {
        let _ = writeln!(text, "{} [{}]", d.statement, d.rule.as_str());
        let replay = closure.replay(&cat, d.id).is_ok();
        derived.push(json!({
            "id": d.id,
            "fact": d.fact,
            "statement": d.statement,
            "rule": d.rule,
            "premises": d.premises,
            "chain": closure.explain(d.id),
            "replayed": replay,
        }));
    }
    if derived.is_empty() {
        text.push_str("no derivations\n");
    }
    let inflexible: Vec<String> = cat
        .entries
        .iter()
        .filter(|e| closure.has_flag(&e.name, ObjFlag::Inflexible))
        .map(|e| e.name.clone())
        .collect();
    let payload = json!({"entries": cat.entries, "facts": closure.facts, "derived": derived, "inflexible": inflexible});
    Ok(Outcome::new(Exit::Holds, "propagated", payload, text))
}
