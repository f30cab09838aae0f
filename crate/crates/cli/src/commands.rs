use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use hardy_core::dynamics::{iterate, Classification, Experiment, IterationTrace, StoppingRule};
use hardy_core::fourier_tables::{c2_closed, c3_even, c3_quadrature, C3_EVEN_CAP};
use hardy_core::hilbert::{check, lambda_expected_linear, PValue, Verdict};
use hardy_core::khintchin::{clt_limit_check, constants, equal_coeff_norm, CltRow};
use hardy_core::phi::{phi_bergman, phi_curve, phi_even, phi_grid, phi_quadrature, PhiSample};
use hardy_core::projection::{lambda_from_ij, project_linear_detailed, project_linear_even};
use hardy_core::{CoefVec, LaurentPoly, QuadratureSpec};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::config::{ConfigFile, RunConfig};
use crate::output::{coef_json, fixed, num, Artifact, Format, Table};
use crate::parse::{parse_coeffs, parse_poly};
use crate::{Command, Global};

/// Start vector of the published p = 1 trajectory.
pub const TABLE1_START: [f64; 3] = [0.7256, 0.6766, 0.1251];
pub const TABLE1_ITERS: usize = 8;

const DEFAULT_FIXED_POINT_TOL: f64 = 1e-10;
const MAX_TRIALS: usize = 100_000;
/// Beyond this even p the exact Φ sum is skipped in favour of the Bergman formula.
const PHI_EXACT_MAX_P: u32 = 64;

struct Ctx<'a> {
    global: &'a Global,
    file: &'a ConfigFile,
}

impl Ctx<'_> {
    fn spec(&self) -> Result<QuadratureSpec> {
        self.file.quadrature(self.global.tol, self.global.angular, self.global.radial)
    }

    /// Quadrature settings for the iteration commands, where `--tol` is the
    /// fixed-point tolerance instead.
    fn iteration_spec(&self) -> Result<(QuadratureSpec, f64)> {
        let spec = self.file.quadrature(None, self.global.angular, self.global.radial)?;
        let tol = self.file.resolve(self.global.tol, "tol")?.unwrap_or(DEFAULT_FIXED_POINT_TOL);
        Ok((spec, tol))
    }

    fn seed(&self) -> Result<u64> {
        Ok(self.file.resolve(self.global.seed, "seed")?.unwrap_or(0))
    }

    fn p_text(&self, flag: &Option<String>) -> Result<String> {
        self.file.resolve(flag.clone(), "p")?.ok_or_else(|| anyhow!("missing --p"))
    }

    fn p_real(&self, flag: &Option<String>) -> Result<f64> {
        let text = self.p_text(flag)?;
        let p: f64 = text.trim().parse().map_err(|_| anyhow!("--p must be a real number, got {text:?}"))?;
        if !(p >= 1.0 && p.is_finite()) {
            bail!("--p must be a finite number ≥ 1, got {text}");
        }
        Ok(p)
    }

    fn usize_of(&self, flag: Option<usize>, key: &str, default: usize) -> Result<usize> {
        Ok(self.file.resolve(flag, key)?.unwrap_or(default))
    }
}

/// Runs one subcommand and returns its configuration, result and preferred format.
pub fn dispatch(command: &Command, global: &Global, file: &ConfigFile) -> Result<(RunConfig, Artifact, Format)> {
    let ctx = Ctx { global, file };
    match command {
        Command::Project { coeffs, p, even_exact } => project(&ctx, coeffs, p, *even_exact),
        Command::Iterate { coeffs, p, max_iters } => {
            let c = parse_coeffs(coeffs)?;
            let p = ctx.p_real(p)?;
            let iters = ctx.usize_of(*max_iters, "max_iters", StoppingRule::default().max_iters)?;
            trajectory(&ctx, "iterate", &c, p, iters)
        }
        Command::Experiment { d, p, trials, max_iters, no_phases } => experiment(&ctx, *d, p, *trials, *max_iters, !*no_phases),
        Command::Check { poly, p, exact } => check_cmd(&ctx, poly, p, *exact),
        Command::Phi { p } => phi(&ctx, p),
        Command::PhiCurve { min, max, step } => curve(&ctx, "phi-curve", *min, *max, *step, false),
        Command::Khintchin { p, d_max } => khintchin(&ctx, p, *d_max),
        Command::Fourier { d, p, alpha, range } => fourier(&ctx, *d, p, alpha.as_deref(), *range),
        Command::Table1 { max_iters } => {
            let c = CoefVec::from_f64(&TABLE1_START)?;
            let iters = ctx.usize_of(*max_iters, "max_iters", TABLE1_ITERS)?;
            trajectory(&ctx, "table1", &c, 1.0, iters)
        }
        Command::Figure2 { step } => curve(&ctx, "figure2", 1.0, 8.0, *step, true),
    }
}

fn coeffs_json(c: &CoefVec) -> Value {
    Value::Array(c.coeffs().iter().map(coef_json).collect())
}

fn project(ctx: &Ctx, coeffs: &str, p: &Option<String>, even_exact: bool) -> Result<(RunConfig, Artifact, Format)> {
    let c = parse_coeffs(coeffs)?;
    let p = ctx.p_real(p)?;
    let spec = ctx.spec()?;
    let config = RunConfig::new("project", ctx.seed()?, spec.clone())
        .with("coeffs", coeffs.trim())
        .with("p", p)
        .with("even_exact", even_exact);
    let mut summary = String::new();
    let body = if even_exact {
        let n = even_index(p).ok_or_else(|| anyhow!("--even-exact needs an even integer p ≥ 2, got {p}"))?;
        if !c.is_exact() {
            bail!("--even-exact needs exact coefficients");
        }
        let out = project_linear_even(&c, n)?;
        let lambda = lambda_expected_linear(&c, p, &spec)?;
        for (j, z) in out.coeffs().iter().enumerate() {
            writeln!(summary, "c{} -> {z}", j + 1)?;
        }
        writeln!(summary, "lambda = {}", fixed(lambda.value))?;
        json!({
            "input": coeffs_json(&c),
            "p": p,
            "method": "even-exact",
            "ij": Value::Null,
            "output": coeffs_json(&out),
            "lambda": { "value": lambda.value, "error": lambda.error },
        })
    } else {
        let (out, ij) = project_linear_detailed(&c, p, &spec)?;
        let lambda = lambda_from_ij(&c, &ij);
        let moduli = out.moduli();
        for (j, (v, e)) in ij.values.iter().zip(&ij.error_estimates).enumerate() {
            writeln!(summary, "I{} = {} ± {e:.1e}   |out{}| = {}", j + 1, fixed(*v), j + 1, fixed(moduli[j]))?;
        }
        writeln!(summary, "lambda = {} ± {:.1e}", fixed(lambda.value), lambda.error)?;
        json!({
            "input": coeffs_json(&c),
            "p": p,
            "method": "quadrature",
            "ij": { "values": ij.values, "errors": ij.error_estimates },
            "output": coeffs_json(&out),
            "lambda": { "value": lambda.value, "error": lambda.error },
        })
    };
    Ok((config, Artifact::new(body, summary), Format::Json))
}

fn even_index(p: f64) -> Option<u32> {
    PValue::Finite(p).even_index()
}

fn trajectory(ctx: &Ctx, command: &str, c: &CoefVec, p: f64, max_iters: usize) -> Result<(RunConfig, Artifact, Format)> {
    let (spec, tol) = ctx.iteration_spec()?;
    let rule = StoppingRule { max_iters, fixed_point_tol: tol, ..Default::default() };
    let coeffs: Vec<String> = c.coeffs().iter().map(|z| z.to_string()).collect();
    let config = RunConfig::new(command, ctx.seed()?, spec.clone())
        .with("coeffs", coeffs.join(","))
        .with("p", p)
        .with("max_iters", max_iters)
        .with("fixed_point_tol", tol);
    let trace = iterate(c, p, &rule, &spec)?;
    let mut art = Artifact::new(trace.to_json(), trajectory_summary(&trace));
    art.table = Some(moduli_table(&trace));
    // a fixed iteration count is the point of table1, not a failure to settle
    if command == "iterate" && trace.classification == Classification::Unresolved {
        art.inconclusive = true;
        art.notes.push(trace.note.clone().unwrap_or_else(|| "the iteration did not settle".to_string()));
    }
    let format = if command == "table1" { Format::Csv } else { Format::Json };
    Ok((config, art, format))
}

fn moduli_table(trace: &IterationTrace) -> Table {
    let d = trace.start.dim();
    let mut t = Table::new(std::iter::once("n".to_string()).chain((1..=d).map(|j| format!("|c{j}|"))));
    for (n, row) in trace.moduli().iter().enumerate() {
        t.push(std::iter::once(n.to_string()).chain(row.iter().map(|&x| num(x))).collect());
    }
    t
}

fn trajectory_summary(trace: &IterationTrace) -> String {
    let mut s = String::new();
    let rows = trace.moduli();
    let shown: Vec<usize> = if rows.len() <= 12 { (0..rows.len()).collect() } else { (0..10).chain([rows.len() - 1]).collect() };
    for n in shown {
        let cells: Vec<String> = rows[n].iter().map(|&x| fixed(x)).collect();
        let _ = writeln!(s, "{n:>4}  {}", cells.join("  "));
    }
    let _ = writeln!(s, "classification: {} after {} steps", trace.classification, trace.residuals.len());
    s
}

fn experiment(
    ctx: &Ctx,
    d: Option<usize>,
    p: &Option<String>,
    trials: Option<usize>,
    max_iters: Option<usize>,
    random_phases: bool,
) -> Result<(RunConfig, Artifact, Format)> {
    let d = ctx.usize_of(d, "d", 3)?;
    let p = ctx.p_real(p)?;
    let trials = ctx.usize_of(trials, "trials", 50)?;
    if trials == 0 || trials > MAX_TRIALS {
        bail!("--trials must be between 1 and {MAX_TRIALS}");
    }
    let max_iters = ctx.usize_of(max_iters, "max_iters", StoppingRule::default().max_iters)?;
    let seed = ctx.seed()?;
    let (spec, tol) = ctx.iteration_spec()?;
    let config = RunConfig::new("experiment", seed, spec.clone())
        .with("d", d)
        .with("p", p)
        .with("trials", trials)
        .with("max_iters", max_iters)
        .with("fixed_point_tol", tol)
        .with("random_phases", random_phases);
    let rule = StoppingRule { max_iters, fixed_point_tol: tol, ..Default::default() };
    let report = Experiment { d, p, trials, seed, random_phases, rule }.run(&spec)?;
    let mut summary = format!(
        "d = {d}, p = {p}: {} of {trials} starts ended at their largest coordinate ({})\n",
        report.largest_coordinate_limits,
        fixed(report.fraction_largest)
    );
    for (class, count) in &report.classifications {
        writeln!(summary, "  {class}: {count}")?;
    }
    let mut art = Artifact::new(serde_json::to_value(&report)?, summary);
    if !report.failures.is_empty() {
        art.inconclusive = true;
        art.notes.push(format!("{} of {trials} runs failed numerically", report.failures.len()));
    }
    Ok((config, art, Format::Json))
}

fn read_poly(text: &str) -> Result<LaurentPoly> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).context("reading polynomial JSON");
    }
    if t.contains(',') && !t.contains('z') {
        return Ok(parse_coeffs(t)?.to_poly());
    }
    Ok(parse_poly(t)?.into_poly())
}

fn check_cmd(ctx: &Ctx, poly: &str, p: &Option<String>, exact: bool) -> Result<(RunConfig, Artifact, Format)> {
    let f = read_poly(poly)?;
    let p_text = ctx.p_text(p)?;
    let pv = PValue::parse(&p_text)?;
    let spec = ctx.spec()?;
    let config = RunConfig::new("check", ctx.seed()?, spec.clone())
        .with("poly", f.to_string())
        .with("p", pv.to_string())
        .with("exact", exact);
    let report = check(&f, pv, exact, &spec)?;
    let mut body = serde_json::to_value(&report)?;
    body["input"] = json!(f.to_string());
    let mut summary = format!("{}: {} at p = {pv} ({})\n", f, report.verdict, report.method);
    writeln!(summary, "residual {:.3e}, error bound {:.3e}", report.residual, report.error_estimate)?;
    if let Some(l) = report.lambda_expected {
        writeln!(summary, "lambda = {}", fixed(l))?;
    }
    let mut art = Artifact::new(body, summary);
    if report.verdict == Verdict::Inconclusive {
        art.inconclusive = true;
        art.notes.push(report.note.clone().unwrap_or_else(|| "residual between the accept and reject thresholds".to_string()));
    }
    Ok((config, art, Format::Json))
}

/// What is known about the sign of Φ at `p`.
fn phi_status(p: f64) -> &'static str {
    if even_index(p).is_some() {
        "exact"
    } else if p > 4.0 {
        "theorem"
    } else {
        "conjecture"
    }
}

fn phi_at(p: f64, spec: &QuadratureSpec) -> Result<PhiSample> {
    match even_index(p) {
        Some(n) if n + 1 <= PHI_EXACT_MAX_P / 2 => {
            let mut s = hardy_core::phi::phi_even_sample(n);
            s.p = p;
            Ok(s)
        }
        _ if p > 4.0 => Ok(phi_bergman(p, spec)?),
        _ => Ok(phi_quadrature(p, spec)?),
    }
}

fn phi_row(s: &PhiSample) -> Vec<String> {
    vec![num(s.p), num(s.value), num(s.error_estimate), s.method.to_string()]
}

fn phi(ctx: &Ctx, p: &Option<String>) -> Result<(RunConfig, Artifact, Format)> {
    let p = ctx.p_real(p)?;
    let spec = ctx.spec()?;
    let config = RunConfig::new("phi", ctx.seed()?, spec.clone()).with("p", p);
    let s = phi_at(p, &spec)?;
    let status = phi_status(p);
    let mut body = serde_json::to_value(&s)?;
    body["status"] = json!(status);
    if let Some(n) = even_index(p).filter(|n| n + 1 <= PHI_EXACT_MAX_P / 2) {
        body["exact"] = json!(phi_even(n).to_string());
    }
    let summary = format!("Phi({p}) = {} ± {:.1e}  [{}, {status}]\n", fixed(s.value), s.error_estimate, s.method);
    let mut art = Artifact::new(body, summary);
    let mut t = Table::new(["p", "value", "error", "method"]);
    t.push(phi_row(&s));
    art.table = Some(t);
    if status == "conjecture" {
        art.notes.push(conjecture_note());
    }
    Ok((config, art, Format::Json))
}

fn conjecture_note() -> String {
    "on [1,4) away from p = 2 the sign of Phi is established numerically only (conjecture)".to_string()
}

fn curve(ctx: &Ctx, command: &str, min: f64, max: f64, step: f64, bergman_tail: bool) -> Result<(RunConfig, Artifact, Format)> {
    let spec = ctx.spec()?;
    let config = RunConfig::new(command, ctx.seed()?, spec.clone()).with("min", min).with("max", max).with("step", step);
    let (head_max, tail) = if bergman_tail { (4.0, Some(max)) } else { (max, None) };
    let mut samples: Vec<(f64, Result<PhiSample>)> =
        phi_curve(min, head_max, step, &spec)?.into_iter().map(|(p, r)| (p, r.map_err(anyhow::Error::from))).collect();
    if let Some(top) = tail {
        for p in phi_grid(head_max, top, step)?.into_iter().filter(|&p| p > head_max) {
            samples.push((p, phi_bergman(p, &spec).map_err(anyhow::Error::from)));
        }
    }
    let mut table = Table::new(["p", "value", "error", "method"]);
    let mut points = Vec::with_capacity(samples.len());
    let mut failed = Vec::new();
    let mut summary = String::new();
    for (p, r) in &samples {
        match r {
            Ok(s) => {
                table.push(phi_row(s));
                writeln!(summary, "{p:>8.4}  {:>12}  ± {:.1e}  {}", fixed(s.value), s.error_estimate, s.method)?;
                points.push(json!({ "p": p, "value": s.value, "error": s.error_estimate, "method": s.method, "status": phi_status(*p) }));
            }
            Err(e) => {
                table.push(vec![num(*p), "nan".into(), "nan".into(), "failed".into()]);
                writeln!(summary, "{p:>8.4}  failed: {e}")?;
                points.push(json!({ "p": p, "value": Value::Null, "error": Value::Null, "method": "failed", "message": e.to_string() }));
                failed.push(*p);
            }
        }
    }
    let mut art = Artifact::new(json!({ "points": points }), summary);
    art.table = Some(table);
    art.notes.push(conjecture_note());
    if !failed.is_empty() {
        art.inconclusive = true;
        art.notes.push(format!("{} grid points failed to converge, first at p = {}", failed.len(), failed[0]));
    }
    Ok((config, art, Format::Csv))
}

fn khintchin(ctx: &Ctx, p: &Option<String>, d_max: usize) -> Result<(RunConfig, Artifact, Format)> {
    let p = ctx.p_real(p)?;
    if d_max == 0 {
        bail!("--d-max must be at least 1");
    }
    let spec = ctx.spec()?;
    let config = RunConfig::new("khintchin", ctx.seed()?, spec.clone()).with("p", p).with("d_max", d_max);
    let k = constants(p)?;
    let d_list: Vec<usize> = (1..=d_max).collect();
    let (bound, rows, monotone) = if p > 2.0 {
        let r = clt_limit_check(p, &d_list, &spec)?;
        (r.b_p, r.rows, r.monotone)
    } else {
        // for p ≤ 2 the norms decrease towards the Gaussian moment from above
        let mut rows = Vec::with_capacity(d_max);
        for &d in &d_list {
            let e = equal_coeff_norm(d, p, &spec)?;
            rows.push(CltRow { d, norm: e.value, error: e.error, bound: k.a_p, gap: e.value - k.a_p });
        }
        let monotone = p == 2.0 || rows.windows(2).all(|w| w[0].norm - w[1].norm > w[0].error + w[1].error);
        (k.a_p, rows, monotone)
    };
    let mut table = Table::new(["d", "norm", "bound", "gap"]);
    let mut summary = format!("p = {p}, bound = {}\n", fixed(bound));
    for r in &rows {
        table.push(vec![r.d.to_string(), num(r.norm), num(r.bound), num(r.gap)]);
        writeln!(summary, "{:>4}  {}  gap {}", r.d, fixed(r.norm), fixed(r.gap))?;
    }
    let body = json!({ "p": p, "a_p": k.a_p, "b_p": k.b_p, "bound": bound, "monotone": monotone, "rows": rows });
    let mut art = Artifact::new(body, summary);
    art.table = Some(table);
    Ok((config, art, Format::Csv))
}

fn parse_alpha(text: &str) -> Result<Vec<i32>> {
    text.split(',')
        .map(|s| s.trim().parse::<i32>().map_err(|_| anyhow!("--alpha entries must be integers, got {s:?}")))
        .collect()
}

fn fourier(ctx: &Ctx, d: Option<usize>, p: &Option<String>, alpha: Option<&str>, range: i32) -> Result<(RunConfig, Artifact, Format)> {
    let d = ctx.usize_of(d, "d", 3)?;
    if d != 2 && d != 3 {
        bail!("--d must be 2 or 3, got {d}");
    }
    let p = ctx.p_real(p)?;
    if range < 0 || range > 20 {
        bail!("--range must be between 0 and 20");
    }
    let spec = ctx.spec()?;
    let mut config = RunConfig::new("fourier", ctx.seed()?, spec.clone()).with("d", d).with("p", p);
    let alphas: Vec<Vec<i32>> = match alpha {
        Some(text) => {
            let a = parse_alpha(text)?;
            if a.len() != d {
                bail!("--alpha needs {d} entries, got {}", a.len());
            }
            if a.iter().sum::<i32>() != 1 {
                bail!("the entries of --alpha must add up to 1");
            }
            config = config.with("alpha", text.trim());
            vec![a]
        }
        None => {
            config = config.with("range", range);
            exponents(d, range)
        }
    };
    let exact = if d == 3 { even_index(p).filter(|&n| n + 1 <= C3_EVEN_CAP) } else { None };
    let exact_table = exact.map(|n| c3_even(n + 1)).transpose()?;
    let mut header: Vec<String> = (1..=d).map(|j| format!("alpha{j}")).collect();
    header.push("value".into());
    let mut table = Table::new(header);
    let mut entries = Vec::new();
    let mut summary = String::new();
    for a in &alphas {
        let (value, error, method, exact_text) = if d == 2 {
            (c2_closed(p, i64::from(a[0])), 0.0, "closed-form", None)
        } else if let Some(t) = &exact_table {
            let c = t.get(a);
            let q = c.as_exact_real().ok_or_else(|| anyhow!("table entry is not real"))?;
            (q.to_f64().unwrap_or(f64::NAN), 0.0, "exact", Some(q.to_string()))
        } else {
            let e = c3_quadrature(p, [a[0], a[1], a[2]], &spec)?;
            (e.value, e.error, "quadrature", None)
        };
        let mut row: Vec<String> = a.iter().map(|x| x.to_string()).collect();
        row.push(exact_text.clone().unwrap_or_else(|| num(value)));
        table.push(row);
        writeln!(summary, "{a:?}  {}", fixed(value))?;
        entries.push(json!({ "alpha": a, "value": value, "error": error, "method": method, "exact": exact_text }));
    }
    let mut art = Artifact::new(json!({ "d": d, "p": p, "entries": entries }), summary);
    art.table = Some(table);
    let format = if alpha.is_some() { Format::Json } else { Format::Csv };
    Ok((config, art, format))
}

/// Exponents with entries in `[−range, range + 1]` that add up to 1.
fn exponents(d: usize, range: i32) -> Vec<Vec<i32>> {
    let lo = -range;
    let hi = range + 1;
    let mut out = Vec::new();
    if d == 2 {
        for a in lo..=hi {
            if (lo..=hi).contains(&(1 - a)) {
                out.push(vec![a, 1 - a]);
            }
        }
    } else {
        for a in lo..=hi {
            for b in lo..=hi {
                let c = 1 - a - b;
                if (lo..=hi).contains(&c) {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    out
}
