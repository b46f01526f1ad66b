use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use expertnet::bounds::{self, Constants};
use expertnet::harness::{run_sweep, SweepPoint, SweepReport};
use expertnet::models::{self, AbilityHistogram};
use expertnet::{ExpertId, ExpertiseVector, ModelConfig};
use serde::Serialize;

use crate::args::{
    BoundsArgs, DistributionArgs, Format, GenerateArgs, IngestArgs, ModelKind, PredictArgs,
    SweepArgs,
};
use crate::error::CliError;

type CliResult<T> = Result<T, CliError>;

/// Parses `0,0.5,2` and `0:4:0.5` (inclusive) forms, mixed freely.
pub fn parse_grid(input: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in input.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number `{s}` in `{input}`")))
        };
        match fields.as_slice() {
            [v] => out.push(num(v)?),
            [start, stop, step] => {
                let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
                if !(step > 0.0) || stop < start {
                    return Err(CliError::Usage(format!("bad range `{part}`")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                // snap to 1e-9 so 0.1 steps do not print as 0.30000000000000004
                out.extend((0..=count).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9));
            }
            _ => return Err(CliError::Usage(format!("bad grid entry `{part}`"))),
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("empty grid".into()));
    }
    Ok(out)
}

fn diversified_lambda(m: usize, n: Option<usize>, lambda: Option<u32>) -> CliResult<u32> {
    match (lambda, n) {
        (Some(l), Some(n)) => {
            let expect = (l as usize).checked_pow(m as u32);
            if expect != Some(n) {
                return Err(CliError::Usage(format!("n = {n} is not lambda^m = {l}^{m}")));
            }
            Ok(l)
        }
        (Some(l), None) => Ok(l),
        (None, Some(n)) => models::integer_root(n as u64, m)
            .and_then(|l| u32::try_from(l).ok())
            .ok_or_else(|| CliError::Usage(format!("n = {n} is not a perfect {m}-th power"))),
        (None, None) => Err(CliError::Usage("diversified model needs --lambda or --n".into())),
    }
}

fn model_config(
    kind: ModelKind,
    n: Option<usize>,
    h: Option<usize>,
    m: Option<usize>,
    lambda: Option<u32>,
    k: usize,
    r: f64,
    seed: u64,
) -> CliResult<ModelConfig> {
    let config = match kind {
        ModelKind::Unified => {
            let n = n.ok_or_else(|| CliError::Usage("unified model needs --n".into()))?;
            let h = h.ok_or_else(|| CliError::Usage("unified model needs --h".into()))?;
            ModelConfig::unified(n, h, k, r, seed)
        }
        ModelKind::Diversified => {
            let m = m.ok_or_else(|| CliError::Usage("diversified model needs --m".into()))?;
            if m == 0 {
                return Err(CliError::Usage("m must be at least 1".into()));
            }
            ModelConfig::diversified(m, diversified_lambda(m, n, lambda)?, k, r, seed)
        }
    };
    config.validate()?;
    Ok(config)
}

/// Writes to `path`, or stdout when `None`.
fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => io::stdout().write_all(bytes).map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

fn csv_raw(header: &[String], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Runtime(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let mut config = model_config(
        args.model, args.n, args.h, args.m, args.lambda, args.k, args.r, args.seed,
    )?;
    config.no_long_range = args.no_long_range;
    let net = models::build(&config)?;
    let mut json = net.to_json()?;
    json.push('\n');
    emit(args.out.as_deref(), json.as_bytes())?;

    if let Some(dir) = &args.export_csv {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let m = config.areas();
        let mut header = vec!["id".to_string()];
        header.extend((1..=m).map(|i| format!("e_{i}")));
        let experts: Vec<Vec<String>> = net
            .ids()
            .map(|u| {
                std::iter::once(u.to_string())
                    .chain(net.expertise(u).levels().iter().map(|l| l.to_string()))
                    .collect()
            })
            .collect();
        let path = dir.join("experts.csv");
        fs::write(&path, csv_raw(&header, &experts)?).map_err(|e| CliError::io(&path, e))?;
        let edges: Vec<Vec<String>> = net
            .ids()
            .flat_map(|u| {
                net.long_range_contacts(u)
                    .iter()
                    .map(move |w| vec![u.to_string(), w.to_string()])
            })
            .collect();
        let path = dir.join("edges.csv");
        fs::write(&path, csv_raw(&["src_id".into(), "dst_id".into()], &edges)?)
            .map_err(|e| CliError::io(&path, e))?;
    }

    let local: Vec<usize> = net.ids().map(|u| net.local_contacts(u).len()).collect();
    let long: usize = net.ids().map(|u| net.long_range_contacts(u).len()).sum();
    eprintln!(
        "n={} m={} local contacts min={} mean={:.3} max={} long-range edges={}",
        net.len(),
        config.areas(),
        local.iter().min().unwrap_or(&0),
        local.iter().sum::<usize>() as f64 / net.len() as f64,
        local.iter().max().unwrap_or(&0),
        long
    );
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    model: &'static str,
    n: usize,
    h_or_m: usize,
    k: usize,
    r: f64,
    c: f64,
    #[serde(rename = "mean_L")]
    mean: f64,
    #[serde(rename = "stderr_L")]
    stderr: f64,
    #[serde(rename = "max_L")]
    max: u64,
    trials: u64,
}

impl From<&SweepReport> for SweepRow {
    fn from(r: &SweepReport) -> Self {
        SweepRow {
            model: r.model,
            n: r.n,
            h_or_m: r.h_or_m,
            k: r.k,
            r: r.r,
            c: r.c,
            mean: r.mean_hops,
            stderr: r.stderr_hops,
            max: r.max_hops,
            trials: r.trials,
        }
    }
}

#[derive(Serialize)]
struct HistogramRow {
    bin_lo: f64,
    bin_hi: f64,
    probability: f64,
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let r_grid = parse_grid(&args.r)?;
    if args.k.is_empty() || args.c.is_empty() {
        return Err(CliError::Usage("k and c lists must be non-empty".into()));
    }
    let shapes: Vec<(Option<usize>, Option<usize>)> = match args.model {
        ModelKind::Unified if args.h.is_empty() => {
            return Err(CliError::Usage("unified model needs --h".into()))
        }
        ModelKind::Unified => args.h.iter().map(|&h| (Some(h), None)).collect(),
        ModelKind::Diversified if args.m.is_empty() => {
            return Err(CliError::Usage("diversified model needs --m".into()))
        }
        ModelKind::Diversified => args.m.iter().map(|&m| (None, Some(m))).collect(),
    };

    let mut reports = Vec::new();
    for (h, m) in shapes {
        let lambda = if m.is_some() && args.n.is_some() { None } else { args.lambda };
        let mut config = model_config(args.model, args.n, h, m, lambda, args.k[0], r_grid[0], 0)?;
        config.no_long_range = args.no_long_range;
        for &c in &args.c {
            let point = SweepPoint::new(config, c, args.realizations, args.trials)?
                .with_bin_width(args.bin_width)?;
            reports.extend(run_sweep(&point, &r_grid, &args.k, args.seed)?);
        }
    }

    let bytes = match args.format {
        Format::Csv => csv_bytes(&reports.iter().map(SweepRow::from).collect::<Vec<_>>())?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&reports)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
    };
    emit(args.out.as_deref(), &bytes)?;

    if let Some(path) = &args.histogram_out {
        let [single] = reports.as_slice() else {
            return Err(CliError::Usage(format!(
                "--histogram-out needs a single-point sweep, this one has {} points",
                reports.len()
            )));
        };
        let rows: Vec<HistogramRow> = single
            .histogram
            .bins()
            .into_iter()
            .map(|b| HistogramRow { bin_lo: b.bin_lo, bin_hi: b.bin_hi, probability: b.probability })
            .collect();
        fs::write(path, csv_bytes(&rows)?).map_err(|e| CliError::io(path, e))?;
    }

    let mut violations = 0;
    for r in &reports {
        eprintln!(
            "{} n={} h_or_m={} k={} r={} c={} mean_L={:.3} stderr={:.3} max_L={} trials={}",
            r.model, r.n, r.h_or_m, r.k, r.r, r.c, r.mean_hops, r.stderr_hops, r.max_hops, r.trials
        );
        if r.aborted + r.failed > 0 {
            eprintln!("  {} aborted, {} failed trials", r.aborted, r.failed);
        }
        violations += r.cap_violations;
    }
    if violations > 0 {
        return Err(CliError::Runtime(format!(
            "{violations} trials exceeded the path-length cap"
        )));
    }
    Ok(())
}

pub fn bounds(args: &BoundsArgs) -> CliResult<()> {
    let constants = if args.explicit_constants {
        Constants::Explicit { c0: args.c0 }
    } else {
        Constants::Shape
    };
    for r in parse_grid(&args.r)? {
        let config = model_config(args.model, args.n, args.h, args.m, args.lambda, args.k, r, 0)?;
        for b in bounds::evaluate(&config, constants) {
            let kind = serde_json::to_value(b.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            println!(
                "{kind} n={} h_or_m={} k={} r={} value={:.3}",
                b.n, b.h_or_m, b.k, b.r, b.value
            );
        }
    }
    Ok(())
}

pub fn predict(args: &PredictArgs) -> CliResult<()> {
    let ratio = bounds::predict_ratio(args.n, args.m, args.k, args.r1, args.r2)?;
    println!("{ratio:.2}");
    Ok(())
}

/// Reads a headerless-or-headed CSV into `(line number, fields)` rows.
fn read_rows(path: &Path) -> CliResult<Vec<(u64, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        let fields: Vec<String> = rec.iter().map(str::to_owned).collect();
        if i == 0 && fields.first().is_some_and(|f| f.parse::<i64>().is_err()) {
            continue;
        }
        rows.push((line, fields));
    }
    Ok(rows)
}

pub fn ingest(args: &IngestArgs) -> CliResult<()> {
    let mut problems = Vec::new();
    let mut experts = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut areas = None;
    let experts_name = args.experts.display().to_string();
    for (line, fields) in read_rows(&args.experts)? {
        if fields.len() < 2 {
            problems.push(format!("{experts_name}:{line}: expected id and at least one level"));
            continue;
        }
        let levels: Result<Vec<u32>, _> = fields[1..].iter().map(|f| f.parse::<u32>()).collect();
        let Ok(levels) = levels else {
            problems.push(format!("{experts_name}:{line}: levels must be non-negative integers"));
            continue;
        };
        if *areas.get_or_insert(levels.len()) != levels.len() {
            problems.push(format!(
                "{experts_name}:{line}: {} levels, expected {}",
                levels.len(),
                areas.unwrap_or(0)
            ));
            continue;
        }
        if index.insert(fields[0].clone(), experts.len()).is_some() {
            problems.push(format!("{experts_name}:{line}: duplicate id {}", fields[0]));
            continue;
        }
        experts.push(ExpertiseVector::new(levels)?);
    }

    let edges_name = args.edges.display().to_string();
    let mut edges = Vec::new();
    for (line, fields) in read_rows(&args.edges)? {
        if fields.len() != 2 {
            problems.push(format!("{edges_name}:{line}: expected src_id,dst_id"));
            continue;
        }
        let (Some(&src), Some(&dst)) = (index.get(&fields[0]), index.get(&fields[1])) else {
            problems.push(format!("{edges_name}:{line}: unknown expert id"));
            continue;
        };
        if src == dst || experts[dst].dominated_by(&experts[src]) {
            problems.push(format!(
                "{edges_name}:{line}: edge {} -> {} violates candidate set",
                fields[0], fields[1]
            ));
            continue;
        }
        edges.push((ExpertId(src), ExpertId(dst)));
    }

    if !problems.is_empty() {
        return Err(CliError::Usage(problems.join("\n")));
    }
    if edges.is_empty() {
        return Err(CliError::Usage(format!("{edges_name}: no edges")));
    }
    let r = bounds::fit_r(&edges, &experts)?;
    println!(
        "fitted_r={r:.3} n={} m={} edges={}",
        experts.len(),
        areas.unwrap_or(0),
        edges.len()
    );
    Ok(())
}

pub fn distribution(args: &DistributionArgs) -> CliResult<()> {
    if args.m == 0 {
        return Err(CliError::Usage("m must be at least 1".into()));
    }
    let lambda = diversified_lambda(args.m, args.n.map(|n| n as usize), args.lambda)?;
    if lambda == 0 {
        return Err(CliError::Usage("lambda must be at least 1".into()));
    }
    let hist = AbilityHistogram::new(args.m, lambda);
    let rows: Vec<Vec<String>> = hist
        .rows()
        .into_iter()
        .map(|(phi, count, p)| vec![phi.to_string(), count.to_string(), p.to_string()])
        .collect();
    let header = ["phi", "count", "probability"].map(String::from);
    emit(args.out.as_deref(), &csv_raw(&header, &rows)?)?;
    let n = hist.total();
    eprintln!(
        "n={n} m={} lambda={lambda} expected_ability={:.3}",
        args.m,
        models::expected_ability(args.m, u64::try_from(&n).unwrap_or(u64::MAX))
    );
    Ok(())
}
