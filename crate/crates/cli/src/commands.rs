use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fs;

use crate::args::*;
use crate::output::Output;
use crate::{report, usage, CliError, Context, Outcome};
use waring_core::arcs::{self, classify, classify_fast, default_w};
use waring_core::counting::{
    dft_rep_count, even_moment, holder_check, minor_arc_moment, mixed_counts_fixed_p, mixed_rep_count, power_series,
    rep_counts_range, vinogradov_count, DftEvaluator,
};
use waring_core::expsums::{
    gauss_sum, major_arc_approx_f, major_arc_approx_g, smooth_weyl_sum_g, v_integral, weyl_sum_f, Frequency, SumRecord,
};
use waring_core::ledger::{self, rational, ExponentRow};
use waring_core::local::{
    a_q, asymptotic_comparison, local_density, positivity_check, singular_integral, singular_series_values,
    SingularSeriesTable,
};
use waring_core::smooth::{self, dickman_estimate, dickman_rho};

type CmdResult = Result<Outcome, CliError>;

pub fn dispatch(cmd: &Command, ctx: &Context, out: &mut Output) -> CmdResult {
    match cmd {
        Command::LedgerVerify(a) => ledger_verify(a, out),
        Command::LedgerTable => ledger_table(out),
        Command::Smooth(a) => smooth_cmd(a, ctx, out),
        Command::Dickman(a) => dickman(a, out),
        Command::Sums(a) => sums(a, ctx, out),
        Command::Arcs(a) => arcs_cmd(a, ctx, out),
        Command::Classify(a) => classify_cmd(a, out),
        Command::Count(a) => count(a, ctx, out),
        Command::Moments(a) => moments(a, ctx, out),
        Command::Vinogradov(a) => vinogradov(a, ctx, out),
        Command::Series(a) => series(a, ctx, out),
        Command::Local(a) => local(a, ctx, out),
        Command::Integral(a) => integral(a, ctx, out),
        Command::Asymptotic(a) => asymptotic(a, ctx, out),
        Command::Report(a) => report::run(a, ctx, out),
    }
}

/// Built-in rows with the `k` row perturbed in `field`.
pub fn mutated_rows(mutate: Option<u32>, field: FieldArg) -> Result<Vec<ExponentRow>, CliError> {
    let mut rows = ledger::builtin_rows();
    if let Some(k) = mutate {
        let row = rows
            .iter_mut()
            .find(|r| r.k == k)
            .ok_or_else(|| usage(format!("no built-in row with k = {k}")))?;
        *row = row.mutated(field.into());
    }
    Ok(rows)
}

#[derive(Serialize)]
struct LedgerSummary {
    certificates: usize,
    passed: usize,
    reproduced_h: String,
    pass: bool,
}

fn ledger_verify(a: &LedgerVerifyArgs, out: &mut Output) -> CmdResult {
    if a.all && a.rows.is_some() {
        return Err(usage("--all and --rows are mutually exclusive"));
    }
    let mut rows = match &a.rows {
        Some(path) => ledger::parse_rows(&fs::read_to_string(path)?)?,
        None => ledger::builtin_rows(),
    };
    if let Some(k) = a.mutate_row {
        let row = rows
            .iter_mut()
            .find(|r| r.k == k)
            .ok_or_else(|| usage(format!("no row with k = {k}")))?;
        *row = row.mutated(a.field.into());
    }
    let certs = ledger::verify_rows(&rows);
    let passed = certs.iter().filter(|c| c.pass).count();
    let reproduced_h = ledger::reproduced_bounds(&certs)
        .iter()
        .map(|(_, h)| h.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let summary = LedgerSummary {
        certificates: certs.len(),
        passed,
        reproduced_h,
        pass: passed == certs.len(),
    };
    if out.format() == Format::Text {
        out.text(&ledger::render_certificate_table(&certs))?;
        out.text(&format!(
            "H(k): {}\n{}/{} rows certified\n",
            summary.reproduced_h, passed, summary.certificates
        ))?;
        for c in &certs {
            for ch in c.failed() {
                eprintln!("k = {}: check ({}) failed: {}", c.row.k, ch.id.letter(), ch.detail);
            }
        }
    } else {
        for c in &certs {
            out.record(c)?;
        }
        out.record(&summary)?;
    }
    Ok(Outcome::from_pass(summary.pass))
}

fn ledger_table(out: &mut Output) -> CmdResult {
    for row in ledger::builtin_rows() {
        out.record(&row)?;
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct SmoothRecord {
    #[serde(rename = "P")]
    p: f64,
    eta: f64,
    bound: f64,
    #[serde(flatten)]
    density: smooth::SmoothDensity,
}

fn smooth_cmd(a: &SmoothArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    let set = match &ctx.cache_dir {
        Some(dir) => smooth::cache::load_or_build(dir, a.p, a.eta, &ctx.budget)?,
        None => smooth::smooth_set(a.p, a.eta, &ctx.budget)?,
    };
    out.record(&SmoothRecord {
        p: a.p,
        eta: a.eta,
        bound: set.bound,
        density: smooth::density_of(&set),
    })?;
    if a.list {
        #[derive(Serialize)]
        struct Member {
            member: u64,
        }
        for &m in &set.members {
            out.record(&Member { member: m })?;
        }
    }
    Ok(Outcome::Pass)
}

fn dickman(a: &DickmanArgs, out: &mut Output) -> CmdResult {
    for &x in &a.x {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(usage(format!("x must be a finite non-negative number (got {x})")));
        }
        out.record(&dickman_estimate(x))?;
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct ValueRecord {
    kind: &'static str,
    k: u32,
    #[serde(rename = "P")]
    p: f64,
    q: u64,
    a: i64,
    beta: f64,
    re: f64,
    im: f64,
    abs: f64,
}

fn sums(a: &SumsArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    let freq = match a.alpha {
        Some(alpha) => Frequency::real(alpha),
        None => {
            if a.q == 0 {
                return Err(usage("--q must be positive"));
            }
            Frequency::near(a.a, a.q, a.beta)
        }
    };
    let value = |kind, v: Complex64| ValueRecord {
        kind,
        k: a.k,
        p: a.p,
        q: freq.q,
        a: freq.a,
        beta: freq.beta,
        re: v.re,
        im: v.im,
        abs: v.norm(),
    };
    match a.kind {
        SumKindArg::F => {
            let e = weyl_sum_f(a.k, a.p, freq)?;
            out.record(&SumRecord::new(a.k, a.p, &e))?;
        }
        SumKindArg::G => {
            let eta = a.eta.ok_or_else(|| usage("--kind g needs --eta"))?;
            let e = smooth_weyl_sum_g(a.k, a.p, eta, freq, &ctx.budget)?;
            out.record(&SumRecord::new(a.k, a.p, &e))?;
        }
        SumKindArg::Complete => {
            out.record(&value("complete", gauss_sum(a.q, a.a, a.k, false)?))?;
        }
        SumKindArg::V => {
            out.record(&value("v", v_integral(a.k, a.p, a.beta, &ctx.budget)?))?;
        }
        SumKindArg::Approx => {
            let r = match a.eta {
                None => major_arc_approx_f(a.k, a.p, a.q, a.a, a.beta, &ctx.budget)?,
                Some(eta) => {
                    let rho = dickman_rho(1.0 / eta);
                    major_arc_approx_g(a.k, a.p, eta, a.q, a.a, a.beta, rho, &ctx.budget)?
                }
            };
            out.record(&r)?;
            return Ok(Outcome::from_pass(r.within));
        }
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct ArcSummary {
    kind: &'static str,
    k: u32,
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "W")]
    w: Option<f64>,
    arcs: usize,
    measure: f64,
    raw_length: f64,
    disjoint: bool,
    /// `P^{2-k}` for the major arcs.
    measure_bound: Option<f64>,
    samples: u64,
    classify_mismatches: u64,
}

fn arcs_cmd(a: &ArcsArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    let (set, name) = match a.kind {
        ArcKindArg::Major => (arcs::major_arcs(a.k, a.p, &ctx.budget)?, "major"),
        ArcKindArg::Minor => (arcs::minor_arcs(a.k, a.p, &ctx.budget)?, "minor"),
        ArcKindArg::Pruned => {
            let w = a.w.unwrap_or_else(|| default_w(a.p));
            (arcs::pruned_arcs(a.k, a.p, w, &ctx.budget)?, "pruned")
        }
    };
    let mut mismatches = 0;
    if a.samples > 0 {
        if a.kind == ArcKindArg::Pruned {
            return Err(usage("--samples compares against the major/minor classification"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        for _ in 0..a.samples {
            let alpha: f64 = rng.gen_range(0.0..1.0);
            let major = matches!(classify(alpha, a.k, a.p)?, arcs::Classification::Major { .. });
            let member = set.contains(alpha);
            let expected = if a.kind == ArcKindArg::Major { major } else { !major };
            if member != expected {
                mismatches += 1;
            }
        }
    }
    let measure_bound = (a.kind == ArcKindArg::Major).then(|| a.p.powf(2.0 - a.k as f64));
    let summary = ArcSummary {
        kind: name,
        k: a.k,
        p: a.p,
        w: set.w,
        arcs: set.len(),
        measure: set.measure(),
        raw_length: set.raw_length(),
        disjoint: set.is_pairwise_disjoint(),
        measure_bound,
        samples: a.samples,
        classify_mismatches: mismatches,
    };
    if a.list {
        if out.format() == Format::Csv {
            out.raw(&set.to_csv())?;
        } else {
            for arc in &set.arcs {
                out.record(arc)?;
            }
        }
    } else {
        out.record(&summary)?;
    }
    // Disjointness is only claimed for k >= 3; the measure bound for major arcs.
    let geometry_ok = (a.k < 3 || a.kind == ArcKindArg::Pruned || summary.disjoint)
        && measure_bound.is_none_or(|b| summary.measure <= b);
    Ok(Outcome::from_pass(geometry_ok && mismatches == 0))
}

#[derive(Serialize)]
struct ClassifyRecord {
    alpha: f64,
    k: u32,
    #[serde(rename = "P")]
    p: f64,
    #[serde(flatten)]
    class: arcs::Classification,
}

fn classify_cmd(a: &ClassifyArgs, out: &mut Output) -> CmdResult {
    let class = if a.fast {
        classify_fast(a.alpha, a.k, a.p)?
    } else {
        classify(a.alpha, a.k, a.p)?
    };
    out.record(&ClassifyRecord {
        alpha: a.alpha,
        k: a.k,
        p: a.p,
        class,
    })?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct CountRecord {
    n: u64,
    k: u32,
    t: u32,
    u: u32,
    eta: Option<f64>,
    conv: Option<String>,
    dft: Option<String>,
    agree: Option<bool>,
}

fn count(a: &CountArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    if a.u > 0 && a.eta.is_none() {
        return Err(usage("--u > 0 needs --eta"));
    }
    let mut all_agree = true;
    let mut emit = |out: &mut Output, n: u64, conv: Option<String>, dft: Option<String>| {
        let agree = conv.as_ref().zip(dft.as_ref()).map(|(c, d)| c == d);
        all_agree &= agree.unwrap_or(true);
        out.record(&CountRecord {
            n,
            k: a.k,
            t: a.t,
            u: a.u,
            eta: a.eta,
            conv,
            dft,
            agree,
        })
    };
    let want_conv = a.method != CountMethod::Dft;
    let want_dft = a.method != CountMethod::Conv;

    if let Some(p) = a.p {
        let series = want_conv
            .then(|| mixed_counts_fixed_p(a.k, p, a.t, a.u, a.eta, &ctx.budget))
            .transpose()?;
        let dft = want_dft
            .then(|| DftEvaluator::fixed_p(a.k, p, a.t, a.u, a.eta, &ctx.budget))
            .transpose()?;
        let degree = series
            .as_ref()
            .map(|s| s.max_index() as u64)
            .or(dft.as_ref().map(|d| d.degree()))
            .unwrap_or(0);
        let (lo, hi) = match (a.n, a.lo, a.hi) {
            (Some(n), None, None) => (n, n),
            (None, lo, hi) => (lo.unwrap_or(0), hi.unwrap_or(degree)),
            _ => return Err(usage("use either --n or --lo/--hi")),
        };
        for n in lo..=hi {
            let c = series.as_ref().map(|s| s.get(n).to_string());
            let d = dft.as_ref().map(|d| d.count(n)).transpose()?.map(|v| v.to_string());
            emit(out, n, c, d)?;
        }
        return Ok(Outcome::from_pass(all_agree));
    }

    match (a.n, a.lo, a.hi) {
        (Some(n), None, None) => {
            let c = want_conv
                .then(|| mixed_rep_count(a.k, a.t, a.u, a.eta, n, &ctx.budget))
                .transpose()?
                .map(|v| v.to_string());
            let d = want_dft
                .then(|| dft_rep_count(a.k, a.t, a.u, a.eta, n, &ctx.budget))
                .transpose()?
                .map(|v| v.to_string());
            emit(out, n, c, d)?;
        }
        (None, Some(lo), Some(hi)) => {
            let conv = rep_counts_range(a.k, a.t, a.u, a.eta, lo, hi, &ctx.budget)?;
            for (n, r) in conv {
                let d = want_dft
                    .then(|| dft_rep_count(a.k, a.t, a.u, a.eta, n, &ctx.budget))
                    .transpose()?
                    .map(|v| v.to_string());
                emit(out, n, Some(r.to_string()), d)?;
            }
        }
        _ => return Err(usage("give --n, or --lo and --hi")),
    }
    Ok(Outcome::from_pass(all_agree))
}

#[derive(Serialize)]
struct MomentRecord {
    k: u32,
    #[serde(rename = "P")]
    p: f64,
    eta: Option<f64>,
    order: u32,
    moment: String,
}

fn moments(a: &MomentsArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    if let Some(row_k) = a.holder_row {
        let row = ledger::builtin_row(row_k).ok_or_else(|| usage(format!("no built-in row with k = {row_k}")))?;
        let eta = a.eta.unwrap_or(0.7);
        let h = holder_check(&row, a.k, a.p, eta, &ctx.budget)?;
        out.record(&h)?;
        return Ok(Outcome::from_pass(h.holds));
    }
    if let Some(w) = a.w {
        let degree = (w as f64 / 2.0) * a.p.floor().powi(a.k as i32);
        let grid = a.grid.unwrap_or((4.0 * degree).ceil() as u64);
        let r = minor_arc_moment(a.k, a.p, w, grid, a.direct, &ctx.budget)?;
        out.record(&r)?;
        return Ok(Outcome::Pass);
    }
    let s = a.s.ok_or_else(|| usage("give --s, --w or --holder-row"))?;
    let series = power_series(a.k, a.p, a.eta, &ctx.budget)?;
    let m = even_moment(&series, s, &ctx.budget)?;
    out.record(&MomentRecord {
        k: a.k,
        p: a.p,
        eta: a.eta,
        order: 2 * s,
        moment: m.to_string(),
    })?;
    Ok(Outcome::Pass)
}

fn vinogradov(a: &VinogradovArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    let v = vinogradov_count(a.s, a.k, a.x, &ctx.budget)?;
    out.record(&v)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct SeriesRecord {
    n: u64,
    #[serde(rename = "Q")]
    q: u64,
    value: f64,
}

#[derive(Serialize)]
struct TermRecord {
    n: u64,
    q: u64,
    re: f64,
    im: f64,
}

fn series(a: &SeriesArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    let (lo, hi) = match (a.n, a.lo, a.hi) {
        (Some(n), None, None) => (n, n),
        (None, Some(lo), Some(hi)) if lo <= hi => (lo, hi),
        _ => return Err(usage("give --n, or --lo <= --hi")),
    };
    if a.positivity {
        let r = positivity_check(lo, hi, a.k, a.s, a.q, &ctx.budget)?;
        out.record(&r)?;
        return Ok(Outcome::from_pass(r.pass));
    }
    let table = SingularSeriesTable::new(a.k, a.s, a.q, &ctx.budget)?;
    if a.terms {
        if lo != hi {
            return Err(usage("--terms needs a single --n"));
        }
        let st = table.state(lo)?;
        for (q, v) in &st.terms {
            out.record(&TermRecord {
                n: lo,
                q: *q,
                re: v.re,
                im: v.im,
            })?;
        }
        return Ok(Outcome::from_pass(st.non_real_terms().is_empty()));
    }
    for (n, value) in singular_series_values(&table, lo, hi)? {
        out.record(&SeriesRecord { n, q: a.q, value })?;
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct LocalRecord {
    p: u64,
    gamma: u32,
    n: u64,
    s: u32,
    k: u32,
    density: String,
    density_value: f64,
    euler_partial: f64,
    gap: f64,
    pass: bool,
}

pub(crate) const EULER_TOL: f64 = 1e-9;

fn local(a: &LocalArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    let d = local_density(a.p, a.gamma, a.n, a.s, a.k, &ctx.budget)?;
    let mut partial = 0.0;
    for h in 0..=a.gamma {
        let q = a.p.checked_pow(h).ok_or_else(|| usage("p^gamma overflows"))?;
        partial += a_q(q, a.n, a.s, a.k)?.re;
    }
    let value = rational::to_f64(&d);
    let gap = (value - partial).abs();
    let pass = gap < EULER_TOL;
    out.record(&LocalRecord {
        p: a.p,
        gamma: a.gamma,
        n: a.n,
        s: a.s,
        k: a.k,
        density: rational::to_fraction(&d),
        density_value: value,
        euler_partial: partial,
        gap,
        pass,
    })?;
    Ok(Outcome::from_pass(pass))
}

fn integral(a: &IntegralArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    let r = singular_integral(a.n, a.k, a.s, a.w, &ctx.budget)?;
    out.record(&r)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct AsymptoticSummary {
    k: u32,
    t: u32,
    u: u32,
    eta: Option<f64>,
    #[serde(rename = "Q")]
    q: u64,
    rho: waring_core::RhoSource,
    lo: u64,
    hi: u64,
    mean_ratio: f64,
    min_ratio: f64,
    max_ratio: f64,
    tolerance: Option<f64>,
}

fn asymptotic(a: &AsymptoticArgs, ctx: &Context, out: &mut Output) -> CmdResult {
    let r = asymptotic_comparison(a.k, a.t, a.u, a.eta, a.lo, a.hi, a.q, a.rho.into(), &ctx.budget)?;
    if a.points {
        for p in &r.points {
            out.record(p)?;
        }
    } else {
        out.record(&AsymptoticSummary {
            k: r.k,
            t: r.t,
            u: r.u,
            eta: r.eta,
            q: r.q_max,
            rho: r.rho,
            lo: r.lo,
            hi: r.hi,
            mean_ratio: r.mean_ratio,
            min_ratio: r.min_ratio,
            max_ratio: r.max_ratio,
            tolerance: a.tol,
        })?;
    }
    Ok(Outcome::from_pass(
        a.tol.is_none_or(|tol| (r.mean_ratio - 1.0).abs() <= tol),
    ))
}
