use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;

use hamming_shift_core::exact_dp::{exact_is_default, is_light};
use hamming_shift_core::numeric::{binomial, ratio, ratio_big, to_f64};
use hamming_shift_core::sampler::{sample_joint, EmpiricalJoint};
use hamming_shift_core::verify::{
    verify_bounds, verify_dp, verify_lemmas, verify_moments, SuiteOutcome,
};
use hamming_shift_core::{
    decompose_blocks, estimate_fraction, joint_distribution, parse_alpha, theorem_walkthrough,
    BitString, Block, Error, Modulus, ModulusKind, MonteCarloEstimate, ShiftReport, TheoremReport,
    WalkthroughBudget,
};

use crate::args::{AlphaArgs, AnalyzeArgs, Format, SampleArgs, ScanArgs, VerifyArgs};
use crate::family::{parse_family, parse_grid};
use crate::output::{csv_preamble, print, to_json, write_file, Envelope};
use crate::VerificationFailed;

/// Widest instance `--exact` will accept.
pub const FORCED_EXACT_MAX: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Mc,
}

impl Method {
    fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Mc => "mc",
        }
    }
}

fn resolve_alpha(args: &AlphaArgs) -> Result<(BitString, Modulus)> {
    let alpha = parse_alpha(&args.alpha, args.n)?;
    let modulus = Modulus::new(args.modulus.into(), alpha.width())?;
    modulus.check(&alpha)?;
    Ok((alpha, modulus))
}

#[derive(Debug, Serialize)]
struct AnalyzeConfig {
    alpha: BitString,
    n: usize,
    modulus: ModulusKind,
    method: Method,
    samples: Option<u64>,
    walkthrough: bool,
    carry_samples: Option<u64>,
}

#[derive(Debug, Serialize)]
struct AnalyzeResult {
    method: Method,
    report: Option<ShiftReport>,
    estimate: Option<MonteCarloEstimate>,
    block_count: usize,
    blocks: Vec<Block>,
    walkthrough: Option<TheoremReport>,
}

fn joint_csv(rows: impl Iterator<Item = (usize, usize, String)>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "count"])
        .expect("in-memory write");
    for (x, y, c) in rows {
        w.write_record([x.to_string(), y.to_string(), c])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

fn sampled_csv(joint: &EmpiricalJoint) -> String {
    joint_csv(
        joint
            .counts
            .iter()
            .map(|(&(x, y), c)| (x, y, c.to_string())),
    )
}

pub fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let (alpha, modulus) = resolve_alpha(&args.alpha)?;
    let n = modulus.width();
    let method = if args.sample {
        Method::Mc
    } else if args.exact {
        if n > FORCED_EXACT_MAX {
            return Err(Error::TooWide {
                width: n,
                max: FORCED_EXACT_MAX,
            }
            .into());
        }
        Method::Exact
    } else if exact_is_default(modulus) {
        Method::Exact
    } else {
        Method::Mc
    };
    let sampling = method == Method::Mc || args.walkthrough;
    let config = AnalyzeConfig {
        alpha: alpha.clone(),
        n,
        modulus: modulus.kind(),
        method,
        samples: sampling.then_some(args.samples),
        walkthrough: args.walkthrough,
        carry_samples: args.walkthrough.then_some(args.carry_samples),
    };
    let seed = sampling.then_some(args.seed);

    let (report, estimate, csv) = match method {
        Method::Exact => {
            let dist = joint_distribution(&alpha, modulus)?;
            let csv = joint_csv(dist.iter_nonzero().map(|(x, y, c)| (x, y, c.to_string())));
            (Some(ShiftReport::from_joint(&alpha, &dist)), None, csv)
        }
        Method::Mc => {
            let e = estimate_fraction(&alpha, modulus, args.samples, args.seed)?;
            let joint = sample_joint(&alpha, modulus, args.samples, args.seed)?;
            (None, Some(e), sampled_csv(&joint))
        }
    };
    let walkthrough = if args.walkthrough {
        let budget = WalkthroughBudget {
            carry_samples: args.carry_samples,
            mc_samples: args.samples,
            seed: args.seed,
            force_sampling: method == Method::Mc,
        };
        Some(theorem_walkthrough(&alpha, modulus, budget)?)
    } else {
        None
    };
    let decomposition = decompose_blocks(&alpha);
    let result = AnalyzeResult {
        method,
        report,
        estimate,
        block_count: decomposition.len(),
        blocks: decomposition.blocks().to_vec(),
        walkthrough,
    };

    if let Some(dir) = &args.out {
        write_analysis(dir, &config, seed, &result, &csv)?;
    }
    match args.format {
        Format::Json => print(&to_json(&Envelope::new("analyze", &config, seed, &result))?),
        Format::Csv => print(&(csv_preamble("analyze", &config, seed)? + &csv)),
        Format::Text => print(&analysis_text(&config, &result)),
    }
}

fn write_analysis(
    dir: &Path,
    config: &AnalyzeConfig,
    seed: Option<u64>,
    result: &AnalyzeResult,
    csv: &str,
) -> Result<()> {
    let headline = serde_json::json!({
        "method": result.method,
        "report": result.report,
        "estimate": result.estimate,
    });
    write_file(
        dir,
        "report.json",
        &to_json(&Envelope::new("analyze", config, seed, headline))?,
    )?;
    write_file(
        dir,
        "joint.csv",
        &(csv_preamble("analyze", config, seed)? + csv),
    )?;
    let blocks = serde_json::json!({ "block_count": result.block_count, "blocks": result.blocks });
    write_file(
        dir,
        "blocks.json",
        &to_json(&Envelope::new("analyze", config, seed, blocks))?,
    )?;
    if let Some(w) = &result.walkthrough {
        write_file(
            dir,
            "walkthrough.json",
            &to_json(&Envelope::new("analyze", config, seed, w))?,
        )?;
    }
    Ok(())
}

fn analysis_text(config: &AnalyzeConfig, result: &AnalyzeResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "alpha        {} (n={}, {})",
        config.alpha, config.n, config.modulus
    );
    let _ = writeln!(s, "blocks       {}", result.block_count);
    if let Some(r) = &result.report {
        let f = r.light_to_heavy_fraction();
        let _ = writeln!(
            s,
            "epsilon      {}",
            hamming_shift_core::numeric::ratio_string(&r.epsilon)
        );
        let _ = writeln!(
            s,
            "light->heavy {} / {} = {:.6}",
            r.light_to_heavy,
            r.total,
            to_f64(&f)
        );
    }
    if let Some(e) = &result.estimate {
        let _ = writeln!(
            s,
            "light->heavy {:.6} +- {:.6} ({} samples)",
            e.estimate, e.standard_error, e.samples
        );
    }
    if let Some(w) = &result.walkthrough {
        let _ = writeln!(s, "floor (log)  {:?}", w.predicted_quadrant_floor_log);
        let _ = writeln!(s, "bound (log)  {}", w.final_bound_log);
    }
    s
}

#[derive(Debug, Serialize)]
struct VerifyConfig {
    suites: Vec<&'static str>,
    max_n: usize,
    max_l: usize,
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let all = !(args.dp || args.lemmas || args.moments || args.bounds);
    let mut suites = Vec::new();
    if all || args.dp {
        if args.max_n > hamming_shift_core::oracle::MAX_BRUTE_FORCE_WIDTH {
            return Err(Error::TooWide {
                width: args.max_n,
                max: hamming_shift_core::oracle::MAX_BRUTE_FORCE_WIDTH,
            }
            .into());
        }
        suites.push("dp");
    }
    for (flag, name) in [(args.lemmas, "lemmas"), (args.moments, "moments")] {
        if all || flag {
            if args.max_l > hamming_shift_core::oracle::MAX_BLOCK_LENGTH {
                return Err(Error::TooWide {
                    width: args.max_l,
                    max: hamming_shift_core::oracle::MAX_BLOCK_LENGTH,
                }
                .into());
            }
            suites.push(name);
        }
    }
    if all || args.bounds {
        suites.push("bounds");
    }
    let outcomes: Vec<SuiteOutcome> = suites
        .iter()
        .map(|&s| match s {
            "dp" => verify_dp(args.max_n),
            "lemmas" => verify_lemmas(args.max_l),
            "moments" => verify_moments(args.max_l),
            _ => verify_bounds(64),
        })
        .collect();
    let passed = outcomes.iter().all(SuiteOutcome::passed);
    let config = VerifyConfig {
        suites,
        max_n: args.max_n,
        max_l: args.max_l,
    };
    match args.format {
        Format::Json => {
            let result = serde_json::json!({ "passed": passed, "suites": outcomes });
            print(&to_json(&Envelope::new("verify", &config, None, result))?)?;
        }
        Format::Text | Format::Csv => {
            let mut s = String::new();
            for o in &outcomes {
                let tag = if o.passed() { "PASS" } else { "FAIL" };
                let _ = write!(
                    s,
                    "{tag} {:<8} {} checks, {} failed",
                    o.name, o.checks, o.failures
                );
                if let Some(f) = &o.first_failure {
                    let _ = write!(s, " (first: {f})");
                }
                s.push('\n');
            }
            print(&s)?;
        }
    }
    if !passed {
        bail!(VerificationFailed);
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ScanConfig {
    family: String,
    n_grid: Vec<usize>,
    modulus: ModulusKind,
    force_sampling: bool,
    samples: u64,
    seed: u64,
}

#[derive(Debug, Clone, Serialize)]
struct ScanRow {
    family: &'static str,
    param: String,
    n: usize,
    modulus: ModulusKind,
    method: &'static str,
    epsilon_num: String,
    epsilon_den: String,
    lth_fraction: f64,
    stderr: Option<f64>,
    seed: Option<u64>,
}

/// `|M| / |Z|` for light set `M`; the all-ones string is never light.
fn light_fraction(modulus: Modulus) -> hamming_shift_core::numeric::BigRational {
    let n = modulus.width();
    let light = (0..=n)
        .filter(|&k| is_light(k, n))
        .map(|k| binomial(n, k))
        .sum();
    ratio_big(&light, &modulus.order())
}

fn scan_point(
    args: &ScanArgs,
    family: &'static str,
    point: &crate::family::Point,
    n: usize,
) -> Result<Option<ScanRow>> {
    let Ok(modulus) = Modulus::new(args.modulus.into(), n) else {
        return Ok(None);
    };
    let Some(alpha) = point.alpha(modulus) else {
        return Ok(None);
    };
    let exact = !args.sample && exact_is_default(modulus);
    let (epsilon, lth, stderr, seed) = if exact {
        let r = hamming_shift_core::shift_report(&alpha, modulus)?;
        (
            r.epsilon.clone(),
            to_f64(&r.light_to_heavy_fraction()),
            None,
            None,
        )
    } else {
        let e = estimate_fraction(&alpha, modulus, args.samples, args.seed)?;
        let eps = light_fraction(modulus) + ratio(e.hits, e.samples) - ratio(1, 2);
        (eps, e.estimate, Some(e.standard_error), Some(args.seed))
    };
    Ok(Some(ScanRow {
        family,
        param: point.param(),
        n,
        modulus: modulus.kind(),
        method: if exact { Method::Exact } else { Method::Mc }.as_str(),
        epsilon_num: epsilon.numer().to_string(),
        epsilon_den: epsilon.denom().to_string(),
        lth_fraction: lth,
        stderr,
        seed,
    }))
}

pub fn scan(args: &ScanArgs) -> Result<()> {
    let family = parse_family(&args.family)?;
    let grid = parse_grid(&args.n_grid)?;
    if args.samples == 0 {
        return Err(Error::ZeroTrials.into());
    }
    let config = ScanConfig {
        family: args.family.clone(),
        n_grid: grid.clone(),
        modulus: args.modulus.into(),
        force_sampling: args.sample,
        samples: args.samples,
        seed: args.seed,
    };
    let jobs: Vec<_> = family
        .points
        .iter()
        .flat_map(|p| grid.iter().map(move |&n| (p, n)))
        .collect();
    let rows: Vec<ScanRow> = jobs
        .par_iter()
        .map(|&(p, n)| {
            let row = scan_point(args, family.name, p, n)?;
            if row.is_none() {
                eprintln!("skipping {} at n={n}: undefined for this width", p.param());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let text = match args.format {
        Format::Json => to_json(&Envelope::new("scan", &config, Some(args.seed), &rows))?,
        Format::Csv | Format::Text => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "family",
                "param",
                "n",
                "modulus",
                "method",
                "epsilon_num",
                "epsilon_den",
                "lth_fraction",
                "stderr",
                "seed",
            ])?;
            for r in &rows {
                w.write_record([
                    r.family.to_string(),
                    r.param.clone(),
                    r.n.to_string(),
                    r.modulus.to_string(),
                    r.method.to_string(),
                    r.epsilon_num.clone(),
                    r.epsilon_den.clone(),
                    r.lth_fraction.to_string(),
                    r.stderr.map(|v| v.to_string()).unwrap_or_default(),
                    r.seed.map(|v| v.to_string()).unwrap_or_default(),
                ])?;
            }
            csv_preamble("scan", &config, Some(args.seed))? + &String::from_utf8(w.into_inner()?)?
        }
    };
    match &args.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, text)?;
            Ok(())
        }
        None => print(&text),
    }
}

#[derive(Debug, Serialize)]
struct SampleConfig {
    alpha: BitString,
    n: usize,
    modulus: ModulusKind,
    samples: u64,
    joint: bool,
}

#[derive(Debug, Serialize)]
struct SampleResult {
    estimate: MonteCarloEstimate,
    joint: Option<EmpiricalJoint>,
}

pub fn sample(args: &SampleArgs) -> Result<()> {
    let (alpha, modulus) = resolve_alpha(&args.alpha)?;
    let estimate = estimate_fraction(&alpha, modulus, args.samples, args.seed)?;
    let joint = if args.joint {
        Some(sample_joint(&alpha, modulus, args.samples, args.seed)?)
    } else {
        None
    };
    let config = SampleConfig {
        alpha,
        n: modulus.width(),
        modulus: modulus.kind(),
        samples: args.samples,
        joint: args.joint,
    };
    let text = to_json(&Envelope::new(
        "sample",
        &config,
        Some(args.seed),
        SampleResult { estimate, joint },
    ))?;
    if let Some(dir) = &args.out {
        write_file(dir, "sample.json", &text)?;
    }
    print(&text)
}
