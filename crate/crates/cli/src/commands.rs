use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use satotate::census::{self, CensusOptions, ScatterRow};
use satotate::sampler::{self, EmpiricalSummary, SamplerConfig};
use satotate::tracedist::{self, DensityControl, DensityRoute};
use satotate::GroupKind;

use crate::args::{CensusArgs, CurveArgs, SampleArgs, StrataArgs, StrataMode, TableArgs};
use crate::error::{CliError, CliResult};
use crate::selfcheck::{self, SelfCheckOptions};
use crate::svg;

/// Below this many draws the KS threshold is not meaningful.
pub const KS_MIN_SAMPLES: usize = 1_000_000;
pub const KS_THRESHOLD: f64 = 0.003;
const NORMALIZATION_TOL: f64 = 1e-8;

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn grid(args: &CurveArgs) -> CliResult<Vec<f64>> {
    if args.grid < 2 {
        return Err(CliError::Usage(format!(
            "--grid must be at least 2, got {}",
            args.grid
        )));
    }
    if !(-4.0 <= args.from && args.from < args.to && args.to <= 4.0) {
        return Err(CliError::Usage(format!(
            "need -4 <= --from < --to <= 4, got [{}, {}]",
            args.from, args.to
        )));
    }
    let step = (args.to - args.from) / (args.grid - 1) as f64;
    let mut xs: Vec<f64> = (0..args.grid)
        .map(|i| args.from + i as f64 * step)
        .collect();
    xs[args.grid - 1] = args.to;
    Ok(xs)
}

pub fn density(args: &CurveArgs) -> CliResult<()> {
    let xs = grid(args)?;
    let group: GroupKind = args.group.into();
    let ctrl = DensityControl::default();
    let mut rows = Vec::with_capacity(xs.len());
    for &s in &xs {
        let v = tracedist::density(group, s, args.route.into(), &ctrl)?;
        rows.push((s, v.value, v.est_error));
    }
    let mut out = output(args.csv.as_deref())?;
    writeln!(out, "s1,f,est_error")?;
    for (s, f, e) in &rows {
        writeln!(out, "{s},{f},{e:e}")?;
    }
    out.flush()?;
    if let Some(path) = &args.svg {
        let pts: Vec<(f64, f64)> = rows.iter().map(|&(s, f, _)| (s, f)).collect();
        write_text(
            path,
            &svg::line_plot(&format!("trace density, {group}"), "s1", "f(s1)", &pts),
        )?;
    }
    Ok(())
}

pub fn cdf(args: &CurveArgs) -> CliResult<()> {
    let xs = grid(args)?;
    let group: GroupKind = args.group.into();
    let route: DensityRoute = args.route.into();
    let ctrl = DensityControl::default();
    let mut acc = if xs[0] > -4.0 {
        tracedist::mass_between(group, -4.0, xs[0], route, &ctrl)?.value
    } else {
        0.0
    };
    let mut rows = vec![(xs[0], acc)];
    for w in xs.windows(2) {
        acc += tracedist::mass_between(group, w[0], w[1], route, &ctrl)?.value;
        rows.push((w[1], acc));
    }
    let mut out = output(args.csv.as_deref())?;
    writeln!(out, "s1,F")?;
    for (s, f) in &rows {
        writeln!(out, "{s},{f}")?;
    }
    out.flush()?;
    if let Some(path) = &args.svg {
        write_text(
            path,
            &svg::line_plot(
                &format!("distribution function, {group}"),
                "s1",
                "F(s1)",
                &rows,
            ),
        )?;
    }
    if args.to == 4.0 && (acc - 1.0).abs() > NORMALIZATION_TOL {
        return Err(CliError::Tolerance(format!(
            "F(4) = {acc} differs from 1 by more than {NORMALIZATION_TOL:e}"
        )));
    }
    Ok(())
}

pub fn table(args: &TableArgs) -> CliResult<()> {
    if !(args.q > 0.0 && args.q.is_finite()) {
        return Err(CliError::Usage(format!(
            "--q must be positive, got {}",
            args.q
        )));
    }
    let eps = args.d / args.q.sqrt();
    if !(args.d > 0.0 && eps <= 4.0) {
        return Err(CliError::Usage(format!(
            "--d must satisfy 0 < d <= 4 sqrt(q), got {}",
            args.d
        )));
    }
    let (d, q) = (args.d, args.q);
    let mut out = io::stdout().lock();
    writeln!(out, "q = {q}, d = {d}, eps = {eps}")?;
    writeln!(out, "leading densities")?;
    for g in GroupKind::ALL {
        writeln!(
            out,
            "  f_{g}(-4 + eps) ~ {:e}",
            tracedist::leading_density(g, eps)
        )?;
    }
    writeln!(out, "leading cumulative densities")?;
    for g in GroupKind::ALL {
        writeln!(
            out,
            "  F_{g}(-4 + eps) ~ {:e}",
            tracedist::leading_cdf(g, eps)
        )?;
    }
    writeln!(out, "ratios")?;
    writeln!(
        out,
        "  F_Delta/F_H ~ {}",
        tracedist::ratio_delta_over_h(d, q)
    )?;
    writeln!(out, "  F_H/F_G ~ {}", tracedist::ratio_h_over_g(d, q))?;
    let t = tracedist::dominance_table(d, q);
    writeln!(out, "expected extremal counts")?;
    writeln!(out, "  generic  F_G q^3 = {}", t.generic)?;
    writeln!(out, "  humbert  F_H q^2 = {}", t.humbert)?;
    writeln!(out, "  shimura  F_Delta q = {}", t.shimura)?;
    Ok(())
}

pub fn sample(args: &SampleArgs, threads: usize) -> CliResult<()> {
    let group: GroupKind = args.group.into();
    let cfg = SamplerConfig::new(args.seed, args.n, group)?;
    let traces = sampler::draw(&cfg, threads);
    if let Some(path) = &args.csv {
        let out = create(path)?;
        sampler::write_samples_csv(out, &traces)?;
    }
    let mean = traces.iter().sum::<f64>() / traces.len() as f64;
    let second = traces.iter().map(|s| s * s).sum::<f64>() / traces.len() as f64;
    println!("group {group}, n = {}, seed = {}", args.n, args.seed);
    println!("mean {mean:.6}, second moment {second:.6}");
    if args.ks {
        if args.n < KS_MIN_SAMPLES {
            eprintln!(
                "warning: KS check skipped, the {KS_THRESHOLD} threshold needs n >= {KS_MIN_SAMPLES} (got {})",
                args.n
            );
            return Ok(());
        }
        let ks = sampler::ks_distance(&EmpiricalSummary::from_traces(traces), group)?;
        let verdict = if ks <= KS_THRESHOLD { "PASS" } else { "FAIL" };
        println!("KS distance {ks:.6} (threshold {KS_THRESHOLD}): {verdict}");
        if ks > KS_THRESHOLD {
            return Err(CliError::Tolerance(format!(
                "KS distance {ks} exceeds {KS_THRESHOLD}"
            )));
        }
    }
    Ok(())
}

pub fn census(args: &CensusArgs, threads: usize) -> CliResult<()> {
    let opts = CensusOptions {
        include_degree6: args.degree6,
        threads,
    };
    let report = census::run_census(args.q, &opts)?;
    let rows = report.rows()?;
    census::write_census_csv(create(&args.out)?, &rows)?;
    let models = if args.degree6 {
        "quintic and sextic"
    } else {
        "quintic"
    };
    println!("q = {}, {models} models: {}", args.q, report.model_count);
    println!("classes {}, curves {}", rows.len(), report.total_curves());
    let failures = &report.band_failures;
    let count = |f: fn(&census::BandCheck) -> bool| failures.iter().filter(|(_, c)| !f(c)).count();
    println!("band checks over {} classes:", rows.len());
    println!("  weil bound          {} failing", count(|c| c.weil_bound));
    println!(
        "  delta0 <= eps       {} failing",
        count(|c| c.delta_within_eps)
    );
    println!(
        "  D <= d^2            {} failing",
        count(|c| c.disc_within_defect)
    );
    println!(
        "  exclusion zone      {} failing",
        count(|c| c.exclusion_zone)
    );
    println!(
        "  decomposable        {} failing",
        count(|c| c.decomposable)
    );
    eprintln!(
        "census took {:.2?} on {} threads",
        report.runtime, report.threads
    );
    if !failures.is_empty() {
        for (fc, _) in failures {
            eprintln!("  failing class a1 = {}, a2 = {}", fc.a1, fc.a2);
        }
        return Err(CliError::Tolerance(format!(
            "{} classes violate the band inequalities",
            failures.len()
        )));
    }
    Ok(())
}

pub fn strata(args: &StrataArgs, threads: usize) -> CliResult<()> {
    if let Some(&bad) = args.discs.iter().find(|&&d| d < 1) {
        return Err(CliError::Usage(format!(
            "discriminant labels must be positive, got {bad}"
        )));
    }
    let rows = match args.mode {
        StrataMode::Weil => census::weil_class_scatter(args.q, &args.discs)?,
        StrataMode::Census => {
            let opts = CensusOptions {
                include_degree6: false,
                threads,
            };
            census::census_scatter(&census::run_census(args.q, &opts)?, &args.discs)?
        }
    };
    match &args.csv {
        Some(path) => {
            census::write_scatter_csv(create(path)?, &rows)?;
            for &d in &args.discs {
                let band: Vec<&ScatterRow> = rows.iter().filter(|r| r.disc == d).collect();
                match band.iter().map(|r| r.delta0).min_by(f64::total_cmp) {
                    Some(low) => println!("D = {d}: {} points, lowest delta0 {low:.6}", band.len()),
                    None => println!("D = {d}: no points"),
                }
            }
        }
        None => census::write_scatter_csv(io::stdout().lock(), &rows)?,
    }
    if let Some(path) = &args.svg {
        let series: Vec<(String, Vec<(f64, f64)>)> = args
            .discs
            .iter()
            .map(|&d| {
                let pts = rows
                    .iter()
                    .filter(|r| r.disc == d)
                    .map(|r| (r.s1, r.delta0))
                    .collect();
                (format!("D = {d}"), pts)
            })
            .collect();
        write_text(
            path,
            &svg::scatter_plot(
                &format!("strata over F_{}", args.q),
                "s1",
                "delta0",
                &series,
            ),
        )?;
    }
    Ok(())
}

pub fn selfcheck(threads: usize) -> CliResult<()> {
    let lines = selfcheck::run(&SelfCheckOptions {
        threads,
        ..SelfCheckOptions::default()
    });
    print!("{}", selfcheck::render(&lines));
    let failed = lines.iter().filter(|l| !l.passed).count();
    if failed > 0 {
        return Err(CliError::Tolerance(format!("{failed} self-checks failed")));
    }
    Ok(())
}
