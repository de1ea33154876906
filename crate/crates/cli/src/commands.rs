use std::io::Write;
use std::path::PathBuf;

use modzeta::config::ExperimentConfig;
use modzeta::constructions::{construct_dyadic, construct_windows, pnt_check, DyadicConstruction, WindowConstruction};
use modzeta::error::{Error, Result};
use modzeta::exec::Execution;
use modzeta::frame::{assemble, band_compare, spectrum, FrameOptions, FrameTail, IntervalSpec};
use modzeta::frequency::FrequencySet;
use modzeta::lp::{lq_norm_ladder, malliavin_diagnostic, summability_scan, Weight, MALLIAVIN_CONSTANT};
use modzeta::primes::PrimeTable;
use modzeta::selector::PrimeSelector;
use modzeta::semigroup::{density_with, generate_with, panejah_check, Semigroup, DEFAULT_MAX_EULER_PRIME};
use modzeta::suite::{run_suite, Scale, CRITERIA};
use modzeta::trend::ZERO_FLOOR;
use modzeta::zeta::{re_zeta_line, TailModel, ZetaOptions};
use serde_json::{json, Value};

use crate::output::{path, write_csv, write_json};
use crate::{parse_list, Command, Common, TailArg, Which};

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    exec: Execution,
    written: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn file(&mut self, name: &str) -> Result<PathBuf> {
        let p = path(self.cfg, name)?;
        self.written.push(p.clone());
        Ok(p)
    }

    fn selector(&self) -> Result<PrimeSelector> {
        PrimeSelector::parse(&self.cfg.selector)
    }

    fn semigroup(&self) -> Result<Semigroup> {
        generate_with(&self.selector()?, self.cfg.x, self.exec)
    }

    /// `a` if given, else the Euler-product density of the selector.
    fn density_or(&self, a: Option<f64>) -> Result<f64> {
        match a {
            Some(a) => Ok(a),
            None => Ok(density_with(&self.selector()?, 1e-10, DEFAULT_MAX_EULER_PRIME, self.exec)?.density),
        }
    }
}

/// Powers of ten from `from` up to `upto`.
fn decades(from: f64, upto: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x = from;
    while x <= upto {
        out.push(x);
        x *= 10.0;
    }
    out
}

/// Runs a subcommand; `Ok(false)` reports a failed verdict.
pub fn run(cmd: &Command, cfg: &ExperimentConfig, common: &Common) -> Result<bool> {
    let exec = if common.sequential { Execution::Sequential } else { Execution::Parallel };
    let mut ctx = Ctx { cfg, exec, written: Vec::new() };
    let (passed, summary, lines) = match cmd {
        Command::Semigroup => semigroup(&mut ctx)?,
        Command::Density { precision } => density(&mut ctx, *precision)?,
        Command::Zeta { delta, t_max, t_step, a, tol } => zeta(&mut ctx, *delta, *t_max, *t_step, *a, *tol)?,
        Command::Panejah { window, xi_step, check_delta, a } => panejah(&mut ctx, *window, *xi_step, *check_delta, *a)?,
        Command::Spectrum { a_ref, tail, band_compare } => spectrum_cmd(&mut ctx, *a_ref, *tail, *band_compare)?,
        Command::Construct { which, params, check_delta } => construct(&mut ctx, *which, params, *check_delta)?,
        Command::Lpscan { a, weight, p0, malliavin_weight, sigma, tol } => {
            lpscan(&mut ctx, *a, weight, p0.as_deref(), malliavin_weight, *sigma, *tol)?
        }
        Command::Suite { quick } => suite(&mut ctx, *quick)?,
    };
    let mut text = String::new();
    if common.json {
        text = serde_json::to_string_pretty(&summary).expect("summary serialises") + "\n";
    } else {
        for l in lines {
            text += &format!("{l}\n");
        }
        for p in &ctx.written {
            text += &format!("wrote {}\n", p.display());
        }
    }
    // A closed pipe on stdout is not an error of the computation.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    Ok(passed)
}

type Outcome = (bool, Value, Vec<String>);

fn semigroup(ctx: &mut Ctx) -> Result<Outcome> {
    let k = ctx.semigroup()?;
    write_csv(&ctx.file("semigroup.csv")?, &["n"], k.elements().iter().map(|&n| (n,)))?;
    let summary = json!({
        "selector": k.selector().to_string(),
        "X": k.bound(),
        "count": k.len(),
        "ratio": k.len() as f64 / k.bound() as f64,
    });
    write_json(&ctx.file("semigroup.json")?, &summary)?;
    let line = format!("{} elements of K up to {} ({})", k.len(), k.bound(), k.selector());
    Ok((true, summary, vec![line]))
}

fn density(ctx: &mut Ctx, precision: f64) -> Result<Outcome> {
    let sel = ctx.selector()?;
    let k = ctx.semigroup()?;
    let report = density_with(&sel, precision, DEFAULT_MAX_EULER_PRIME, ctx.exec)?.with_empirical(&k);
    write_json(&ctx.file("density.json")?, &report)?;
    let mut lines = vec![format!("A={}", report.density)];
    if report.divergent {
        lines.push(format!("complement product diverges; partial product {}", report.euler_tail_bound));
    } else if !report.certified {
        lines.push(format!("not certified; tail bound {}", report.euler_tail_bound));
    }
    Ok((true, serde_json::to_value(&report).expect("serialises"), lines))
}

fn zeta(ctx: &mut Ctx, delta: f64, t_max: f64, t_step: f64, a: Option<f64>, tol: f64) -> Result<Outcome> {
    if !(t_step > 0.0 && t_max >= 0.0) {
        return Err(Error::Input("t-step must be positive and t-max non-negative".into()));
    }
    let k = ctx.semigroup()?;
    let a = ctx.density_or(a)?;
    let n = (t_max / t_step).floor() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * t_step).collect();
    let opts = ZetaOptions { tol, tail: TailModel::Auto, exec: ctx.exec };
    let points = re_zeta_line(&k, a, delta, &grid, &opts)?;
    write_csv(
        &ctx.file("zeta.csv")?,
        &["t", "re", "im", "poisson_term", "remainder", "bound"],
        points.iter().map(|p| (p.t, p.re, p.im, p.poisson_term, p.remainder, p.bound)),
    )?;
    let max_rem = points.iter().map(|p| p.remainder.abs()).fold(0.0, f64::max);
    let max_bound = points.iter().map(|p| p.bound).fold(0.0, f64::max);
    let summary = json!({
        "selector": k.selector().to_string(),
        "A": a,
        "delta": delta,
        "points": points.len(),
        "max_abs_remainder": max_rem,
        "max_bound": max_bound,
    });
    write_json(&ctx.file("zeta.json")?, &summary)?;
    let line = format!("{} points at δ={delta}; max |remainder| {max_rem:.6e}, max bound {max_bound:.3e}", points.len());
    Ok((true, summary, vec![line]))
}

fn panejah(ctx: &mut Ctx, window: f64, step: f64, check_delta: f64, a: Option<f64>) -> Result<Outcome> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::Input("xi-step must be positive".into()));
    }
    let k = ctx.semigroup()?;
    let a = ctx.density_or(a)?;
    let f = FrequencySet::new(&k);
    let count = ((f.xi_max() - window) / step).floor().max(0.0) as usize;
    let grid: Vec<f64> = (0..=count).map(|i| window + i as f64 * step).collect();
    let measure = f.panejah_measure_inf(window, &grid)?;
    let deviation = f.local_density_deviation(a, &grid, window)?;
    write_csv(
        &ctx.file("panejah.csv")?,
        &["xi", "measure", "ratio", "deviation"],
        measure.rows.iter().zip(&deviation).map(|(r, d)| (r.xi, r.measure, r.ratio, *d)),
    )?;
    let trend = f.deviation_trend(a, &grid, window, 0.1)?;
    let samples = decades(100.0, k.bound() as f64);
    let check = panejah_check(&k, check_delta, &samples)?;
    let sandwich_holds = measure.rows.iter().all(|r| r.holds);
    let summary = json!({
        "selector": k.selector().to_string(),
        "A": a,
        "window": window,
        "measure_inf": measure.inf,
        "sandwich_holds": sandwich_holds,
        "deviation_trend": trend,
        "ratio_check": check,
    });
    write_json(&ctx.file("panejah.json")?, &summary)?;
    let lines = vec![
        format!("inf |L ∩ (ξ−δ, ξ)|/δ = {:.6} over {} windows", measure.inf, grid.len()),
        format!(
            "ratio check at δ={check_delta}: top-half min {:.6e} ({})",
            check.top_half_min,
            if check.passed { "pass" } else { "fail" }
        ),
    ];
    Ok((true, summary, lines))
}

fn spectrum_cmd(ctx: &mut Ctx, a_ref: Option<f64>, tail: TailArg, band: bool) -> Result<Outcome> {
    let cfg = ctx.cfg;
    let k = ctx.semigroup()?;
    let a_ref = ctx.density_or(a_ref)?;
    let tail = match tail {
        TailArg::Auto => FrameTail::Auto,
        TailArg::Truncate => FrameTail::Truncate,
    };
    let f = assemble(&k, IntervalSpec::new(cfg.t)?, cfg.m, cfg.n, &FrameOptions { tail, exec: ctx.exec })?;
    let report = spectrum(&f, a_ref)?;
    write_csv(&ctx.file("eigenvalues.csv")?, &["eigenvalue"], report.eigenvalues.iter().map(|&l| (l,)))?;
    let mut summary = serde_json::to_value(&report).expect("serialises");
    summary["selector"] = json!(k.selector().to_string());
    summary["raw_min_eigenvalue"] = json!(f.raw_min_eigenvalue);
    summary["symmetry_defect"] = json!(f.symmetry_defect);
    if band {
        let cmp = band_compare(&k, &f)?;
        write_csv(&ctx.file("band_singular_values.csv")?, &["singular_value"], cmp.singular_values.iter().map(|&s| (s,)))?;
        summary["band_singular_values"] = json!(cmp.singular_values);
    }
    write_json(&ctx.file("spectrum.json")?, &summary)?;
    let mut lines = vec![format!(
        "{}×{} at T={}, N={}: λ ∈ [{:.6}, {:.6}], lower bound estimate {:.6}, tail bound {:.3e}",
        report.dim,
        report.dim,
        cfg.t,
        report.cutoff,
        report.eigenvalues[0],
        report.eigenvalues[report.dim - 1],
        report.lower_bound_estimate,
        report.tail_bound
    )];
    for (eps, frac) in &report.cluster_fractions {
        lines.push(format!("fraction within {eps} of A_ref={a_ref}: {frac:.4}"));
    }
    Ok((true, summary, lines))
}

fn construct(ctx: &mut Ctx, which: Which, params: &str, check_delta: f64) -> Result<Outcome> {
    let limit = ctx.cfg.x;
    let table = PrimeTable::with_execution(limit, ctx.exec)?;
    let (selector, name, mut report, pnt_samples, pnt_delta) = match which {
        Which::Windows => {
            let c = WindowConstruction::parse(params)?;
            let r = construct_windows(&c, &table)?;
            let samples = r.intervals.iter().map(|i| i.upper).collect();
            (PrimeSelector::Windows(c.clone()), "6a", serde_json::to_value(&r).expect("serialises"), samples, c.delta)
        }
        Which::Dyadic => {
            let c = DyadicConstruction::parse(params)?;
            let covered = 1u64 << (63 - (limit + 1).leading_zeros());
            let samples = decades(1e3, covered as f64);
            let r = construct_dyadic(&c, &table, &[check_delta], &samples)?;
            (PrimeSelector::Dyadic(c), "6b", serde_json::to_value(&r).expect("serialises"), samples, check_delta)
        }
    };
    let member = selector.resolve(&table)?;
    let kept: Vec<u64> = table.primes().iter().zip(&member).filter(|(_, &m)| m).map(|(&p, _)| p).collect();
    let list = ctx.file(&format!("construct_{name}_primes.txt"))?;
    std::fs::write(&list, kept.iter().map(|p| format!("{p}\n")).collect::<String>())?;
    let pnt = if pnt_samples.is_empty() {
        None
    } else {
        Some(pnt_check(&selector, pnt_delta, &pnt_samples, &table, None)?)
    };
    let density = density_with(&selector, 1e-8, DEFAULT_MAX_EULER_PRIME, ctx.exec)?;
    report["pnt_check"] = json!(pnt);
    report["density"] = json!(density);
    report["primes_kept"] = json!(kept.len());
    report["primes_removed"] = json!(table.primes().len() - kept.len());
    write_json(&ctx.file(&format!("construct_{name}.json"))?, &report)?;
    let mut lines = vec![
        format!("{selector}: {} primes kept, {} removed up to {limit}", kept.len(), table.primes().len() - kept.len()),
        format!("A = {} ({})", density.density, if density.divergent { "divergent complement" } else { "convergent complement" }),
    ];
    if let Some(p) = &pnt {
        lines.push(format!("window sums over the complement decay: {}", p.holds));
    }
    Ok((true, report, lines))
}

fn lpscan(
    ctx: &mut Ctx,
    a: Option<f64>,
    weight: &str,
    p0: Option<&str>,
    malliavin_weight: &str,
    sigma: f64,
    tol: f64,
) -> Result<Outcome> {
    let cfg = ctx.cfg;
    let sel = ctx.selector()?;
    let k = ctx.semigroup()?;
    let a = ctx.density_or(a)?;
    let weight = Weight::parse(weight)?;
    let opts = ZetaOptions { tol, tail: TailModel::Auto, exec: ctx.exec };
    let ladders = cfg
        .qs
        .iter()
        .map(|&q| lq_norm_ladder(&k, a, q, cfg.t, &cfg.deltas, &opts))
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &ctx.file("lp_norms.csv")?,
        &["delta", "q", "norm", "error_estimate"],
        ladders.iter().flat_map(|l| l.rows.iter().map(|r| (r.delta, r.q, r.norm, r.error_estimate))),
    )?;
    let grid: Vec<u64> = match p0 {
        Some(s) => parse_list("p0", s)?.into_iter().map(|v| v as u64).collect(),
        None => decades(1e3, cfg.x as f64).into_iter().map(|v| v as u64).collect(),
    };
    let scan = summability_scan(&sel, weight, &grid, ctx.exec)?;
    write_csv(&ctx.file("lp_summability.csv")?, &["P0", "partial_sum"], scan.partial_sums.iter().copied())?;
    let mw = Weight::parse(malliavin_weight)?;
    let malliavin = malliavin_diagnostic(&sel, mw, sigma, cfg.x.min(1_000_000), MALLIAVIN_CONSTANT, ctx.exec)?;
    let summary = json!({
        "selector": sel.to_string(),
        "A": a,
        "T": cfg.t,
        "ladders": ladders,
        "summability": scan,
        "malliavin": malliavin,
    });
    write_json(&ctx.file("lpscan.json")?, &summary)?;
    let mut lines: Vec<String> = ladders
        .iter()
        .map(|l| format!("q={}: last relative change {:.3e} ({:?})", l.q, l.last_relative_change, l.verdict))
        .collect();
    lines.push(format!("Σ f(p)/p over the complement with {weight}: {:?}", scan.verdict));
    let ratio = if malliavin.rhs > ZERO_FLOOR { malliavin.lhs / malliavin.rhs } else { 0.0 };
    lines.push(format!("weighted sum over J: lhs/rhs = {ratio:.4} (holds with C={}: {})", malliavin.constant, malliavin.holds));
    Ok((true, summary, lines))
}

fn suite(ctx: &mut Ctx, quick: bool) -> Result<Outcome> {
    let scale = if quick { Scale::Quick } else { Scale::Full };
    let (report, times) = run_suite(scale, ctx.cfg.seed, ctx.exec);
    write_json(&ctx.file("suite.json")?, &report)?;
    let lines = report
        .criteria
        .iter()
        .zip(&times)
        .map(|(c, t)| {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            format!("{verdict} {:>2} {} ({:.1}s)", c.id, CRITERIA[c.id as usize - 1].1, t.as_secs_f64())
        })
        .collect();
    Ok((report.passed, serde_json::to_value(&report).expect("serialises"), lines))
}
