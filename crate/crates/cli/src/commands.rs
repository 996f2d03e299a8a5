//! One function per subcommand. Each returns the rendered document so the
//! caller decides where it goes.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use serde::Serialize;

use randci::analysis::{
    coverage_curve, default_theta_grid, domination_report, korn_domination_report,
    longrun_simulate, refinement_check, stevens_refinement_check, uniform_grid, MethodSpec,
    Procedure, RefinementReport, SimulationReport, Witness, MAX_ENUMERATION_N,
};
use randci::auxiliary::AuxKind;
use randci::intervals::{
    cp_interval, discrete_aux_interval, korn_interval, split_design, split_sample_interval,
    stevens_generalized, stevens_interval, thetahat_support, AuxInputs, BernoulliSequence,
    Interval, Level, SplitDesign,
};
use randci::numerics::choose;

use crate::args::{
    Command, CompareArgs, CoverageArgs, DataFormat, IntervalArgs, MethodArg, OutputArgs,
    SimulateArgs, SourceArg, TextFormat,
};
use crate::render::{sig12, Table};
use crate::svg::{Chart, Panel, Series};

/// A rendered result and a suggested file name.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub name: String,
    pub body: String,
    /// Short summary shown alongside the main document (simulation only).
    pub summary: Option<String>,
}

pub fn execute(command: &Command) -> Result<Output> {
    match command {
        Command::Interval(a) => cmd_interval(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

pub fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Interval(a) => &a.output,
        Command::Coverage(a) => &a.output,
        Command::Simulate(a) => &a.output,
        Command::Compare(a) => &a.output,
    }
}

/// Write `output` to `--out` or into the output directory; `None` means the
/// caller should print it.
pub fn deliver(output: &Output, target: &OutputArgs) -> Result<Option<PathBuf>> {
    let path = match (&target.out, &target.out_dir) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => dir.join(&output.name),
        (None, None) => return Ok(None),
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(&path, &output.body).with_context(|| format!("writing {}", path.display()))?;
    Ok(Some(path))
}

fn reject_unused(method: &str, flags: &[(&str, bool)]) -> Result<()> {
    for (flag, given) in flags {
        if *given {
            bail!("{flag} is not used by --method {method}");
        }
    }
    Ok(())
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Cp => "cp",
        MethodArg::Stevens => "stevens",
        MethodArg::StevensGeneralized => "stevens-generalized",
        MethodArg::Antithetic => "antithetic",
        MethodArg::Discrete => "discrete",
        MethodArg::Korn => "korn",
        MethodArg::Split => "split",
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str, method: &str) -> Result<T> {
    value.with_context(|| format!("--method {method} needs {flag}"))
}

/// `n` and `y` from `--n/--y` and/or `--bits`, which must agree.
fn counts(a: &IntervalArgs, method: &str) -> Result<(u32, u32, Option<BernoulliSequence>)> {
    let seq = a
        .bits
        .as_deref()
        .map(|b| b.parse::<BernoulliSequence>())
        .transpose()?;
    if let Some(s) = &seq {
        if let Some(n) = a.n {
            ensure!(n == s.n(), "--n {n} conflicts with --bits of length {}", s.n());
        }
        if let Some(y) = a.y {
            ensure!(y == s.y(), "--y {y} conflicts with --bits containing {} ones", s.y());
        }
        return Ok((s.n(), s.y(), seq));
    }
    Ok((need(a.n, "--n", method)?, need(a.y, "--y", method)?, None))
}

fn parse_level(w: &str) -> Result<(Level, Level)> {
    let (k, m) = w
        .split_once('/')
        .with_context(|| format!("--w expects k/M, got {w:?}"))?;
    let k: u128 = k.trim().parse().with_context(|| format!("bad numerator in --w {w:?}"))?;
    let m: u128 = m.trim().parse().with_context(|| format!("bad denominator in --w {w:?}"))?;
    ensure!(m >= 2, "--w needs M >= 2, got {m}");
    ensure!((1..=m).contains(&k), "--w needs 1 <= k <= M, got {k}/{m}");
    Ok((Level::new(k, m), Level::new(k - 1, m)))
}

fn design_from(n: Option<u32>, n1: Option<u32>, n2: Option<u32>) -> Result<SplitDesign> {
    match (n1, n2) {
        (Some(a), Some(b)) => {
            let d = SplitDesign::new(a, b)?;
            if let Some(n) = n {
                ensure!(n == d.n(), "--n {n} conflicts with --n1 {a} --n2 {b}");
            }
            Ok(d)
        }
        (None, None) => Ok(split_design(n.context("split needs --n or --n1/--n2")?)?),
        _ => bail!("--n1 and --n2 go together"),
    }
}

pub fn cmd_interval(a: &IntervalArgs) -> Result<Output> {
    let name = method_name(a.method);
    let v_flags = [
        ("--v", a.v.is_some()),
        ("--v-lower", a.v_lower.is_some()),
        ("--v-upper", a.v_upper.is_some()),
        ("--w", a.w.is_some()),
    ];
    let split_flags = [
        ("--y1", a.y1.is_some()),
        ("--y2", a.y2.is_some()),
        ("--n1", a.n1.is_some()),
        ("--n2", a.n2.is_some()),
    ];
    let iv = match a.method {
        MethodArg::Split => {
            reject_unused(name, &v_flags)?;
            reject_unused(name, &[("--bits", a.bits.is_some())])?;
            let design = design_from(a.n, a.n1, a.n2)?;
            let (y1, y2) = (need(a.y1, "--y1", name)?, need(a.y2, "--y2", name)?);
            if let Some(y) = a.y {
                ensure!(y == y1 + y2, "--y {y} conflicts with --y1 {y1} --y2 {y2}");
            }
            split_sample_interval(y1, y2, &design, a.alpha)
        }
        MethodArg::Korn => {
            reject_unused(name, &v_flags)?;
            reject_unused(name, &split_flags)?;
            let (_, _, seq) = counts(a, name)?;
            let seq = seq.context("--method korn needs --bits")?;
            korn_interval(&seq, a.alpha)
        }
        m => {
            reject_unused(name, &split_flags)?;
            let (n, y, _) = counts(a, name)?;
            match m {
                MethodArg::Cp => {
                    reject_unused(name, &v_flags)?;
                    cp_interval(n, y, a.alpha)
                }
                MethodArg::Stevens | MethodArg::Antithetic => {
                    reject_unused(name, &v_flags[1..])?;
                    let v = need(a.v, "--v", name)?;
                    if m == MethodArg::Stevens {
                        stevens_interval(n, y, v, a.alpha)
                    } else {
                        stevens_generalized(n, y, 1.0 - v, v, a.alpha)
                    }
                }
                MethodArg::StevensGeneralized => {
                    reject_unused(name, &[("--v", a.v.is_some()), ("--w", a.w.is_some())])?;
                    stevens_generalized(
                        n,
                        y,
                        need(a.v_lower, "--v-lower", name)?,
                        need(a.v_upper, "--v-upper", name)?,
                        a.alpha,
                    )
                }
                MethodArg::Discrete => {
                    reject_unused(name, &v_flags[..3])?;
                    let w = a.w.as_deref().context("--method discrete needs --w k/M")?;
                    let (w, wt) = parse_level(w)?;
                    discrete_aux_interval(n, y, w, wt, a.alpha)
                }
                MethodArg::Split | MethodArg::Korn => unreachable!(),
            }
        }
    }
    .with_context(|| {
        format!(
            "interval --method {name} n={:?} y={:?} bits={:?} y1={:?} y2={:?} alpha={} v={:?} v_lower={:?} v_upper={:?} w={:?}",
            a.n, a.y, a.bits, a.y1, a.y2, a.alpha, a.v, a.v_lower, a.v_upper, a.w
        )
    })?;
    let body = match a.format {
        TextFormat::Text => interval_text(name, &iv),
        TextFormat::Json => serde_json::to_string_pretty(&iv)? + "\n",
    };
    let ext = if a.format == TextFormat::Json { "json" } else { "txt" };
    Ok(Output {
        name: format!("interval-{name}.{ext}"),
        body,
        summary: None,
    })
}

fn interval_text(name: &str, iv: &Interval) -> String {
    let mut lines = vec![
        format!("method: {name}"),
        format!("n: {}", iv.inputs.n),
        format!("y: {}", iv.inputs.y),
        format!("alpha: {}", iv.inputs.alpha),
    ];
    match &iv.inputs.aux {
        AuxInputs::None => {}
        AuxInputs::Uniform { v } => lines.push(format!("v: {v}")),
        AuxInputs::Pair { v_lower, v_upper } => {
            lines.push(format!("v_lower: {v_lower}"));
            lines.push(format!("v_upper: {v_upper}"));
        }
        AuxInputs::Levels { w, w_tilde } => {
            lines.push(format!("w: {w}"));
            lines.push(format!("w_tilde: {w_tilde}"));
        }
        AuxInputs::Korn { bits, rank, count } => {
            lines.push(format!("bits: {bits}"));
            lines.push(format!("rank: {rank}"));
            lines.push(format!("count: {count}"));
        }
        AuxInputs::Split { n1, n2, y1, y2 } => {
            lines.push(format!("n1: {n1}"));
            lines.push(format!("n2: {n2}"));
            lines.push(format!("y1: {y1}"));
            lines.push(format!("y2: {y2}"));
        }
    }
    lines.push(format!("lower: {}", sig12(iv.lower)));
    lines.push(format!("upper: {}", sig12(iv.upper)));
    if iv.crossed {
        lines.push("crossed: true".into());
    }
    lines.join("\n") + "\n"
}

fn parse_grid(spec: &str, n: u32, alpha: f64) -> Result<Vec<f64>> {
    let grid = if spec == "default" {
        default_theta_grid(n, alpha)?
    } else if let Some(k) = spec.strip_prefix("uniform:") {
        let k: usize = k.parse().with_context(|| format!("bad point count in --grid {spec:?}"))?;
        ensure!(k >= 1, "--grid uniform:K needs K >= 1");
        uniform_grid(k)
    } else if let Some(list) = spec.strip_prefix("list:") {
        list.split(',')
            .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad theta {t:?} in --grid")))
            .collect::<Result<_>>()?
    } else {
        bail!("--grid must be default, uniform:K or list:t1,t2,..., got {spec:?}");
    };
    randci::analysis::check_grid(&grid)?;
    Ok(grid)
}

fn method_spec(
    m: MethodArg,
    n: u32,
    levels: Option<u128>,
    n1: Option<u32>,
    n2: Option<u32>,
) -> Result<MethodSpec> {
    let name = method_name(m);
    if m != MethodArg::Discrete {
        reject_unused(name, &[("--levels", levels.is_some())])?;
    }
    if m != MethodArg::Split {
        reject_unused(name, &[("--n1", n1.is_some()), ("--n2", n2.is_some())])?;
    }
    Ok(match m {
        MethodArg::Cp => MethodSpec::ClopperPearson,
        MethodArg::Stevens => MethodSpec::Stevens,
        MethodArg::Antithetic => MethodSpec::Antithetic,
        MethodArg::Discrete => MethodSpec::Discrete {
            levels: need(levels, "--levels", name)?,
        },
        MethodArg::Korn => MethodSpec::Korn,
        MethodArg::Split => {
            let d = design_from(Some(n), n1, n2)?;
            MethodSpec::Split {
                n1: d.n1(),
                n2: d.n2(),
            }
        }
        MethodArg::StevensGeneralized => {
            bail!("stevens-generalized has no single coverage curve; use antithetic or stevens")
        }
    })
}

/// Exact curve for one method; lengths are `None` when too costly to tabulate.
struct Sweep {
    tag: String,
    upper: Vec<f64>,
    lower: Vec<f64>,
    length: Option<Vec<f64>>,
    note: Option<String>,
}

fn sweep(spec: &MethodSpec, n: u32, alpha: f64, grid: &[f64]) -> Result<Sweep> {
    match coverage_curve(spec, n, alpha, grid) {
        Ok(c) => Ok(Sweep {
            tag: c.method,
            upper: c.upper_noncoverage,
            lower: c.lower_noncoverage,
            length: Some(c.expected_length),
            note: None,
        }),
        Err(randci::Error::Unsupported(why)) => {
            let p = Procedure::new(spec.clone(), n, alpha)?;
            let (upper, lower) = grid
                .iter()
                .map(|&t| p.noncoverage(t))
                .collect::<randci::Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            Ok(Sweep {
                tag: spec.tag(),
                upper,
                lower,
                length: None,
                note: Some(format!("{} expected length not computed: {why}", spec.tag())),
            })
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct CoverageJson<'a> {
    schema: String,
    method: &'a str,
    alpha: f64,
    n: u32,
    theta_grid: &'a [f64],
    upper_noncoverage: &'a [f64],
    lower_noncoverage: &'a [f64],
    expected_length: Option<&'a [f64]>,
}

pub fn cmd_coverage(a: &CoverageArgs) -> Result<Output> {
    let spec = method_spec(a.method, a.n, a.levels, a.n1, a.n2)?;
    let grid = parse_grid(&a.grid, a.n, a.alpha)?;
    let s = sweep(&spec, a.n, a.alpha, &grid)?;
    let mut table = Table::new(
        "coverage",
        ["theta", "upper_noncoverage", "lower_noncoverage", "expected_length"]
            .map(String::from)
            .to_vec(),
    )
    .meta("method", &s.tag)
    .meta("n", a.n)
    .meta("alpha", a.alpha);
    table.comments.extend(s.note.clone());
    for (i, &t) in grid.iter().enumerate() {
        table.rows.push(vec![
            Some(t),
            Some(s.upper[i]),
            Some(s.lower[i]),
            s.length.as_ref().map(|l| l[i]),
        ]);
    }
    let body = match a.format {
        DataFormat::Csv => table.to_csv()?,
        DataFormat::Json => {
            serde_json::to_string_pretty(&CoverageJson {
                schema: format!("randci coverage {}", crate::render::SCHEMA_VERSION),
                method: &s.tag,
                alpha: a.alpha,
                n: a.n,
                theta_grid: &grid,
                upper_noncoverage: &s.upper,
                lower_noncoverage: &s.lower,
                expected_length: s.length.as_deref(),
            })? + "\n"
        }
        DataFormat::Svg => coverage_svg(&table, &[s.tag.clone()], a.n, a.alpha),
    };
    Ok(Output {
        name: format!("coverage-{}-n{}.{}", s.tag, a.n, a.format.extension()),
        body,
        summary: None,
    })
}

fn points(table: &Table, x: &str, y: &str) -> Vec<(f64, f64)> {
    let xs = table.column(x).expect("x column");
    let ys = table.column(y).expect("y column");
    xs.into_iter()
        .zip(ys)
        .map(|(a, b)| (a.unwrap_or(f64::NAN), b.unwrap_or(f64::NAN)))
        .collect()
}

/// Non-coverage panel with the `alpha/2` line and, when any lengths exist,
/// an expected-length panel. Built from the rounded CSV values.
fn coverage_svg(table: &Table, tags: &[String], n: u32, alpha: f64) -> String {
    let single = tags.len() == 1;
    let col = |tag: &str, what: &str| {
        if single {
            match what {
                "upper" => "upper_noncoverage".to_string(),
                "lower" => "lower_noncoverage".to_string(),
                _ => "expected_length".to_string(),
            }
        } else {
            format!("{tag}_{what}")
        }
    };
    let mut nc = Vec::new();
    let mut len = Vec::new();
    for tag in tags {
        nc.push(Series {
            name: format!("{tag} upper"),
            points: points(table, "theta", &col(tag, "upper")),
        });
        nc.push(Series {
            name: format!("{tag} lower"),
            points: points(table, "theta", &col(tag, "lower")),
        });
        let l = points(table, "theta", &col(tag, "length"));
        if l.iter().any(|p| p.1.is_finite()) {
            len.push(Series {
                name: format!("{tag} length"),
                points: l,
            });
        }
    }
    let mut panels = vec![Panel {
        y_label: "non-coverage probability".into(),
        series: nc,
        references: vec![("alpha/2".into(), alpha / 2.0)],
    }];
    if !len.is_empty() {
        panels.push(Panel {
            y_label: "expected length".into(),
            series: len,
            references: Vec::new(),
        });
    }
    Chart {
        title: format!("{} (n = {n}, alpha = {alpha})", tags.join(" vs ")),
        x_label: "theta".into(),
        panels,
    }
    .render()
}

fn source_kind(a: &SimulateArgs) -> Result<AuxKind> {
    let unused = |name: &str, flags: &[(&str, bool)]| -> Result<()> {
        for (flag, given) in flags {
            if *given {
                bail!("{flag} is not used by --source {name}");
            }
        }
        Ok(())
    };
    let seeded = ("--aux-seed", a.aux_seed.is_some());
    let weyl = ("--lambda", a.lambda.is_some());
    let base = ("--base", a.base.is_some());
    let periodic = [("--period", a.period.is_some()), ("--perm", a.perm.is_some())];
    Ok(match a.source {
        SourceArg::Seeded => {
            unused("seeded", &[weyl, base, periodic[0], periodic[1]])?;
            AuxKind::SeededUniform {
                seed: a.aux_seed.unwrap_or(a.seed),
            }
        }
        SourceArg::Weyl => {
            unused("weyl", &[seeded, base, periodic[0], periodic[1]])?;
            match a.lambda {
                Some(lambda) => AuxKind::Weyl { lambda },
                None => AuxKind::weyl_default(),
            }
        }
        SourceArg::VanDerCorput => {
            unused("van-der-corput", &[seeded, weyl, periodic[0], periodic[1]])?;
            match a.base {
                Some(base) => AuxKind::VanDerCorput { base },
                None => AuxKind::van_der_corput_default(),
            }
        }
        SourceArg::Periodic => {
            unused("periodic", &[seeded, weyl, base])?;
            match (&a.perm, a.period) {
                (Some(p), period) => {
                    if let Some(nper) = period {
                        ensure!(
                            p.len() == nper as usize,
                            "--period {nper} conflicts with a --perm of length {}",
                            p.len()
                        );
                    }
                    AuxKind::PeriodicPerm { perm: p.clone() }
                }
                (None, Some(nper)) => AuxKind::periodic_identity(nper),
                (None, None) => bail!("--source periodic needs --period or --perm"),
            }
        }
    })
}

fn source_label(s: SourceArg) -> &'static str {
    match s {
        SourceArg::Seeded => "seeded",
        SourceArg::Weyl => "weyl",
        SourceArg::VanDerCorput => "van-der-corput",
        SourceArg::Periodic => "periodic",
    }
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    schema: String,
    source: &'a AuxKind,
    n: u32,
    alpha: f64,
    theta: f64,
    m: u64,
    seed: u64,
    running_upper_prop: f64,
    running_lower_prop: f64,
    average_length: f64,
}

fn simulation_summary(r: &SimulationReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SimulationSummary {
        schema: format!("randci simulate {}", crate::render::SCHEMA_VERSION),
        source: &r.source,
        n: r.n,
        alpha: r.alpha,
        theta: r.theta,
        m: r.m,
        seed: r.seed,
        running_upper_prop: r.running_upper_prop,
        running_lower_prop: r.running_lower_prop,
        average_length: r.average_length,
    })? + "\n")
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Output> {
    let kind = source_kind(a)?;
    let report = longrun_simulate(kind, a.n, a.alpha, a.theta, a.m, a.seed)?;
    let mut table = Table::new(
        "simulate",
        ["k", "upper_prop", "lower_prop", "average_length"]
            .map(String::from)
            .to_vec(),
    )
    .meta("source", serde_json::to_string(&report.source)?)
    .meta("n", a.n)
    .meta("alpha", a.alpha)
    .meta("theta", a.theta)
    .meta("m", a.m)
    .meta("seed", a.seed);
    for c in &report.checkpoints {
        table.rows.push(vec![
            Some(c.k as f64),
            Some(c.upper_prop),
            Some(c.lower_prop),
            Some(c.average_length),
        ]);
    }
    let summary = simulation_summary(&report)?;
    let body = match a.format {
        DataFormat::Csv => table.to_csv()?,
        DataFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
        DataFormat::Svg => Chart {
            title: format!(
                "running non-coverage, {} source (n = {}, theta = {})",
                source_label(a.source),
                a.n,
                a.theta
            ),
            x_label: "trials k".into(),
            panels: vec![Panel {
                y_label: "proportion".into(),
                series: vec![
                    Series {
                        name: "upper".into(),
                        points: points(&table, "k", "upper_prop"),
                    },
                    Series {
                        name: "lower".into(),
                        points: points(&table, "k", "lower_prop"),
                    },
                ],
                references: vec![("alpha/2".into(), a.alpha / 2.0)],
            }],
        }
        .render(),
    };
    Ok(Output {
        name: format!(
            "simulate-{}-n{}.{}",
            source_label(a.source),
            a.n,
            a.format.extension()
        ),
        body,
        summary: Some(summary),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationVerdict {
    pub method: String,
    pub checked: bool,
    pub dominates: Option<bool>,
    pub pairs: u64,
    pub worst_slack: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareSummary {
    pub domination: Vec<DominationVerdict>,
    pub refinement: Vec<RefinementReport>,
    pub statistic_cardinality: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct CompareJson<'a> {
    schema: String,
    n: u32,
    alpha: f64,
    methods: Vec<&'a str>,
    theta_grid: &'a [f64],
    upper_noncoverage: Vec<&'a [f64]>,
    lower_noncoverage: Vec<&'a [f64]>,
    expected_length: Vec<Option<&'a [f64]>>,
    summary: &'a CompareSummary,
}

fn fmt_witness(w: &Witness) -> String {
    format!(
        "({},{}) -> {} vs ({},{}) -> {}",
        w.first.y1, w.first.y2, w.first.estimate, w.second.y1, w.second.y2, w.second.estimate
    )
}

fn summary_lines(s: &CompareSummary) -> Vec<String> {
    let mut out = Vec::new();
    for d in &s.domination {
        out.push(match (d.dominates, &d.note) {
            (Some(ok), _) => format!(
                "dominates-cp {}: {} ({} pairs, worst slack {})",
                d.method,
                if ok { "yes" } else { "no" },
                d.pairs,
                d.worst_slack.map(sig12).unwrap_or_default()
            ),
            (None, note) => format!(
                "dominates-cp {}: not checked ({})",
                d.method,
                note.as_deref().unwrap_or("")
            ),
        });
    }
    for r in &s.refinement {
        out.push(format!(
            "refinement {}: {} (ties {}, inversions {})",
            r.statistic,
            if r.is_refinement { "yes" } else { "no" },
            r.ties.len(),
            r.inversion_count
        ));
        for w in &r.ties {
            out.push(format!("  tie {}", fmt_witness(w)));
        }
        for w in &r.inversions {
            out.push(format!("  inversion {}", fmt_witness(w)));
        }
        if let Some(an) = &r.anomaly {
            out.push(format!(
                "  ordering (t,0) vs (0,t+1) flips for t > {}; t = {}: {}/{} > {}/{} ({})",
                an.threshold,
                an.t,
                an.t,
                2 * an.n1,
                an.t + 1,
                2 * an.n2,
                if an.attainable { "attainable" } else { "beyond the group sizes" }
            ));
        }
    }
    if let Some(c) = &s.statistic_cardinality {
        out.push(c.clone());
    }
    out.extend(s.notes.iter().cloned());
    out
}

pub fn cmd_compare(a: &CompareArgs) -> Result<Output> {
    ensure!(a.methods.len() >= 2, "compare needs two or more --methods");
    for (i, m) in a.methods.iter().enumerate() {
        ensure!(
            !a.methods[..i].contains(m),
            "--methods lists {} twice",
            method_name(*m)
        );
    }
    if !a.methods.contains(&MethodArg::Discrete) && a.levels.is_some() {
        bail!("--levels is only used with the discrete method");
    }
    if !a.methods.contains(&MethodArg::Split) && (a.n1.is_some() || a.n2.is_some()) {
        bail!("--n1/--n2 are only used with the split method");
    }
    ensure!(a.v_points >= 2, "--v-points needs at least 2");
    let grid = parse_grid(&a.grid, a.n, a.alpha)?;
    let specs = a
        .methods
        .iter()
        .map(|&m| {
            let levels = if m == MethodArg::Discrete { a.levels } else { None };
            let (n1, n2) = if m == MethodArg::Split { (a.n1, a.n2) } else { (None, None) };
            method_spec(m, a.n, levels, n1, n2)
        })
        .collect::<Result<Vec<_>>>()?;
    let sweeps = specs
        .iter()
        .map(|s| sweep(s, a.n, a.alpha, &grid))
        .collect::<Result<Vec<_>>>()?;

    let mut summary = CompareSummary {
        domination: Vec::new(),
        refinement: Vec::new(),
        statistic_cardinality: None,
        notes: sweeps.iter().filter_map(|s| s.note.clone()).collect(),
    };
    let v_grid: Vec<f64> = (0..a.v_points)
        .map(|i| i as f64 / (a.v_points - 1) as f64)
        .collect();
    for spec in &specs {
        match spec {
            MethodSpec::Stevens => {
                let r = domination_report(a.n, a.alpha, &v_grid)?;
                summary.domination.push(DominationVerdict {
                    method: spec.tag(),
                    checked: true,
                    dominates: Some(r.dominates()),
                    pairs: r.pairs_checked,
                    worst_slack: Some(r.worst_slack),
                    note: None,
                });
                let half_open: Vec<f64> = v_grid.iter().copied().filter(|&v| v < 1.0).collect();
                summary
                    .refinement
                    .push(stevens_refinement_check(a.n, &half_open)?);
            }
            MethodSpec::Korn if a.n <= MAX_ENUMERATION_N => {
                let r = korn_domination_report(a.n, a.alpha)?;
                summary.domination.push(DominationVerdict {
                    method: spec.tag(),
                    checked: true,
                    dominates: Some(r.dominates()),
                    pairs: r.pairs_checked,
                    worst_slack: Some(r.worst_slack),
                    note: None,
                });
            }
            MethodSpec::Korn => summary.domination.push(DominationVerdict {
                method: spec.tag(),
                checked: false,
                dominates: None,
                pairs: 0,
                worst_slack: None,
                note: Some(format!("2^{} patterns exceed the enumeration cap n <= {MAX_ENUMERATION_N}", a.n)),
            }),
            MethodSpec::Split { n1, n2 } => {
                summary
                    .refinement
                    .push(refinement_check(&SplitDesign::new(*n1, *n2)?));
            }
            _ => {}
        }
    }
    let korn = specs.iter().any(|s| *s == MethodSpec::Korn);
    if let (true, Some(MethodSpec::Split { n1, n2 })) = (
        korn,
        specs.iter().find(|s| matches!(s, MethodSpec::Split { .. })),
    ) {
        let support = thetahat_support(&SplitDesign::new(*n1, *n2)?).len();
        let patterns: u128 = (0..=a.n).map(|y| choose(a.n, y).map(|c| c.0)).sum::<randci::Result<u128>>()?;
        summary.statistic_cardinality = Some(format!(
            "statistic-cardinality: korn 2^{} = {patterns} vs split-{n1}-{n2} |support| = {support}",
            a.n
        ));
    }

    let tags: Vec<String> = sweeps.iter().map(|s| s.tag.clone()).collect();
    let mut header = vec!["theta".to_string()];
    for t in &tags {
        header.extend([format!("{t}_upper"), format!("{t}_lower"), format!("{t}_length")]);
    }
    let mut table = Table::new("compare", header)
        .meta("n", a.n)
        .meta("alpha", a.alpha)
        .meta("methods", tags.join(","));
    table.comments = summary_lines(&summary);
    for (i, &t) in grid.iter().enumerate() {
        let mut row = vec![Some(t)];
        for s in &sweeps {
            row.extend([
                Some(s.upper[i]),
                Some(s.lower[i]),
                s.length.as_ref().map(|l| l[i]),
            ]);
        }
        table.rows.push(row);
    }
    let body = match a.format {
        DataFormat::Csv => table.to_csv()?,
        DataFormat::Json => {
            serde_json::to_string_pretty(&CompareJson {
                schema: format!("randci compare {}", crate::render::SCHEMA_VERSION),
                n: a.n,
                alpha: a.alpha,
                methods: tags.iter().map(String::as_str).collect(),
                theta_grid: &grid,
                upper_noncoverage: sweeps.iter().map(|s| s.upper.as_slice()).collect(),
                lower_noncoverage: sweeps.iter().map(|s| s.lower.as_slice()).collect(),
                expected_length: sweeps.iter().map(|s| s.length.as_deref()).collect(),
                summary: &summary,
            })? + "\n"
        }
        DataFormat::Svg => coverage_svg(&table, &tags, a.n, a.alpha),
    };
    Ok(Output {
        name: format!("compare-n{}.{}", a.n, a.format.extension()),
        body,
        summary: None,
    })
}
