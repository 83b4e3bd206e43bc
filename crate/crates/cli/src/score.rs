use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tscg_core::metrics::{
    arr, bootstrap_ci, decompose, holm_bonferroni, mcnemar, paired_discordance, record_scores, score_transcript_with,
    BootstrapConfig, Decomposition, F1Averaging, Scores, Transcript,
};

use crate::{read_text, CmdResult, Failure};

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// JSONL transcript, one record per line.
    #[arg(long = "transcript", value_name = "PATH")]
    transcript: PathBuf,
    /// Condition the ratios are taken against; defaults to the first one seen.
    #[arg(long)]
    baseline: Option<String>,
    /// Three conditions `native,text,compiled` to decompose; defaults to the
    /// transcript's conditions when there are exactly three.
    #[arg(long, value_delimiter = ',')]
    decompose: Option<Vec<String>>,
    /// Average PF1 per record instead of pooling counts.
    #[arg(long = "macro")]
    macro_f1: bool,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Print JSON instead of tables.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Serialize)]
struct ConditionRow {
    condition: String,
    ci_high: f64,
    ci_low: f64,
    scores: Scores,
}

#[derive(Debug, Serialize)]
struct Comparison {
    a: String,
    b: String,
    only_a: u64,
    only_b: u64,
    pairs: usize,
    p: f64,
    p_holm: f64,
    significant: bool,
}

#[derive(Debug, Serialize)]
struct ScoreReport {
    arr: Vec<(String, f64)>,
    baseline: String,
    comparisons: Vec<Comparison>,
    conditions: Vec<ConditionRow>,
    decomposition: Option<Decomposition>,
}

fn build(args: &ScoreArgs, t: &Transcript) -> Result<ScoreReport, Failure> {
    let averaging = if args.macro_f1 {
        F1Averaging::Macro
    } else {
        F1Averaging::Micro
    };
    let cfg = BootstrapConfig {
        resamples: args.resamples,
        seed: args.seed,
        ..BootstrapConfig::default()
    };
    let conditions = t.conditions();
    let mut rows = Vec::new();
    for c in &conditions {
        let scores = score_transcript_with(t, c, averaging).map_err(Failure::input)?;
        let samples: Vec<f64> = record_scores(t, c).map(|(_, s)| s.overall()).collect();
        let (lo, hi) = bootstrap_ci(&samples, &cfg).map_err(Failure::input)?;
        rows.push(ConditionRow {
            condition: c.to_string(),
            ci_high: hi,
            ci_low: lo,
            scores,
        });
    }
    let overall = |c: &str| rows.iter().find(|r| r.condition == c).map(|r| r.scores.overall);

    let baseline = args.baseline.clone().unwrap_or_else(|| conditions[0].to_string());
    let base = overall(&baseline).ok_or_else(|| Failure::input(format!("unknown baseline condition `{baseline}`")))?;
    let ratios = conditions
        .iter()
        .filter(|c| **c != baseline)
        .map(|c| Ok((c.to_string(), arr(overall(c).unwrap_or(0.0), base)?)))
        .collect::<Result<Vec<_>, tscg_core::metrics::MetricsError>>()
        .map_err(Failure::input)?;

    let triple = match &args.decompose {
        Some(names) if names.len() == 3 => Some(names.clone()),
        Some(_) => return Err(Failure::input("--decompose takes exactly three conditions")),
        None if conditions.len() == 3 => Some(conditions.iter().map(|c| c.to_string()).collect()),
        None => None,
    };
    let decomposition = match triple {
        Some(names) => {
            let acc = names
                .iter()
                .map(|n| {
                    overall(n)
                        .map(|x| x * 100.0)
                        .ok_or_else(|| Failure::input(format!("unknown condition `{n}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(decompose(acc[0], acc[1], acc[2]))
        }
        None => None,
    };

    let mut comparisons = Vec::new();
    for (i, a) in conditions.iter().enumerate() {
        for b in &conditions[i + 1..] {
            let (only_a, only_b, pairs) = paired_discordance(t, a, b).map_err(Failure::input)?;
            comparisons.push(Comparison {
                a: a.to_string(),
                b: b.to_string(),
                only_a,
                only_b,
                pairs,
                p: mcnemar(only_a, only_b),
                p_holm: 1.0,
                significant: false,
            });
        }
    }
    if !comparisons.is_empty() {
        let p: Vec<f64> = comparisons.iter().map(|c| c.p).collect();
        let holm = holm_bonferroni(&p, args.alpha).map_err(Failure::input)?;
        for (c, h) in comparisons.iter_mut().zip(holm) {
            c.p_holm = h.adjusted;
            c.significant = h.significant;
        }
    }

    Ok(ScoreReport {
        arr: ratios,
        baseline,
        comparisons,
        conditions: rows,
        decomposition,
    })
}

pub fn run(args: &ScoreArgs) -> CmdResult {
    let t = Transcript::from_jsonl(&read_text(&args.transcript)?)
        .map_err(|e| Failure::input(format!("{}: {e}", args.transcript.display())))?;
    if t.is_empty() {
        return Err(Failure::input(format!(
            "{}: transcript has no records",
            args.transcript.display()
        )));
    }
    let report = build(args, &t)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        return Ok(());
    }

    let pct = |x: f64| x * 100.0;
    println!(
        "{:<16} {:>5} {:>7} {:>7} {:>8}  95% CI",
        "condition", "n", "TSA", "PF1", "overall"
    );
    for r in &report.conditions {
        println!(
            "{:<16} {:>5} {:>7.1} {:>7.1} {:>8.1}  [{:.1}, {:.1}]",
            r.condition,
            r.scores.records,
            pct(r.scores.tsa),
            pct(r.scores.pf1),
            pct(r.scores.overall),
            pct(r.ci_low),
            pct(r.ci_high)
        );
    }
    if !report.arr.is_empty() {
        println!("\nARR vs {}", report.baseline);
        for (c, ratio) in &report.arr {
            println!("  {c:<16} {ratio:.2}");
        }
    }
    if let Some(d) = report.decomposition {
        println!(
            "\ndecomposition: format {:+.1} pp, compression {:+.1} pp",
            d.format_effect, d.compression_effect
        );
    }
    if !report.comparisons.is_empty() {
        println!("\nexact McNemar, Holm-adjusted at alpha {}", args.alpha);
        for c in &report.comparisons {
            println!(
                "  {} vs {}: {}/{} discordant of {}, p {:.4}, adjusted {:.4}{}",
                c.a,
                c.b,
                c.only_a,
                c.only_b,
                c.pairs,
                c.p,
                c.p_holm,
                if c.significant { " *" } else { "" }
            );
        }
    }
    Ok(())
}
