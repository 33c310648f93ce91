//! Result files: per-replication metrics CSV, cross-replication summary JSON,
//! SVG line charts and optional event traces.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{self, RunSummary};
use crate::config::ScenarioConfig;
use crate::des::run_replications;
use crate::error::SimError;
use crate::market::{run, RunOutput};
use crate::metrics::YearFrame;

pub const METRICS_HEADER: &str =
    "seed,year,syndicate_id,capital,premiums_offered_mean,premiums_earned,claims_paid,loss_ratio,insolvent";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn metrics_csv(seed: u64, frames: &[YearFrame]) -> String {
    let mut out = String::with_capacity(64 * (frames.len() + 1));
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for f in frames {
        let _ = writeln!(
            out,
            "{seed},{},{},{},{},{},{},{},{}",
            f.year,
            f.syndicate_id,
            f.capital,
            opt(f.premiums_offered_mean),
            f.premiums_earned,
            f.claims_paid,
            opt(f.loss_ratio),
            f.insolvent
        );
    }
    out
}

/// Parses a metrics CSV back into frames (the uniform deviation and policy
/// count are not part of the file and come back as zero).
pub fn parse_metrics_csv(text: &str) -> Result<Vec<(u64, YearFrame)>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(METRICS_HEADER) {
        return Err("unexpected header".into());
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s}: {e}"));
    let opt_num = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let c: Vec<&str> = line.split(',').collect();
            if c.len() != 9 {
                return Err(format!("expected 9 fields: {line}"));
            }
            let seed = c[0].parse::<u64>().map_err(|e| e.to_string())?;
            Ok((
                seed,
                YearFrame {
                    year: c[1].parse().map_err(|e| format!("{e}"))?,
                    syndicate_id: c[2].parse().map_err(|e| format!("{e}"))?,
                    capital: num(c[3])?,
                    premiums_offered_mean: opt_num(c[4])?,
                    premiums_earned: num(c[5])?,
                    claims_paid: num(c[6])?,
                    loss_ratio: opt_num(c[7])?,
                    insolvent: c[8].parse().map_err(|e| format!("{e}"))?,
                    uniform_deviation: 0.0,
                    policies_in_force: 0,
                },
            ))
        })
        .collect()
}

pub fn industry_csv(run: &RunOutput) -> String {
    let mut out = String::from(
        "seed,year,claim_frequency,claim_severity,claims,policy_years,risks_entered,policies_bound,mean_bound_premium\n",
    );
    for y in &run.industry {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            run.seed,
            y.year,
            y.claim_frequency,
            y.claim_severity,
            y.claims,
            y.policy_years,
            y.risks_entered,
            y.policies_bound,
            y.mean_bound_premium
        );
    }
    out
}

/// One row per catastrophe; `uninsured` is the ground-up loss no live syndicate paid.
pub fn catastrophes_csv(run: &RunOutput) -> String {
    let mut out = String::from("seed,day,region,damage_fraction,policies_hit,ground_up,insured,uninsured\n");
    for c in &run.catastrophes {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            run.seed,
            c.day,
            c.region,
            c.damage_fraction,
            c.policies_hit,
            c.ground_up,
            c.insured,
            c.ground_up - c.insured
        );
    }
    out
}

pub fn portfolio_csv(run: &RunOutput) -> String {
    let mut out = String::from("seed,year,syndicate_id,policies_in_force,uniform_deviation\n");
    for f in &run.frames {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            run.seed, f.year, f.syndicate_id, f.policies_in_force, f.uniform_deviation
        );
    }
    out
}

pub fn trace_csv(run: &RunOutput) -> Option<String> {
    let trace = run.trace.as_ref()?;
    let mut out = String::from("day,seq,kind,payload-summary\n");
    for r in trace {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    Some(out)
}

/// One named series of `(x, y)` points.
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Static SVG line chart with axes, ticks and a legend.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (720.0, 420.0);
    let (left, right, top, bottom) = (80.0, 140.0, 40.0, 50.0);
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if (x1 - x0).abs() < f64::EPSILON {
        x1 = x0 + 1.0;
    }
    if (y1 - y0).abs() < f64::EPSILON {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pw = w - left - right;
    let ph = h - top - bottom;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#,
        top + ph,
        left + pw,
        top + ph,
        top + ph
    );
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * f64::from(i) / 5.0;
        let fy = y0 + (y1 - y0) * f64::from(i) / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(fx),
            top + ph + 18.0,
            tick_label(fx)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            sy(fy),
            left + pw,
            sy(fy),
            left - 6.0,
            sy(fy) + 4.0,
            tick_label(fy)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        if !s.points.is_empty() {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        let ly = top + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            left + pw + 12.0,
            left + pw + 32.0,
            left + pw + 38.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a >= 1e6 {
        format!("{:.1}M", v / 1e6)
    } else if a >= 1e3 {
        format!("{:.0}k", v / 1e3)
    } else if a >= 10.0 || v == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn per_syndicate(frames: &[YearFrame], value: impl Fn(&YearFrame) -> Option<f64>) -> Vec<Series> {
    let mut ids: Vec<usize> = frames.iter().map(|f| f.syndicate_id).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter()
        .map(|id| Series {
            name: format!("syndicate {id}"),
            points: frames
                .iter()
                .filter(|f| f.syndicate_id == id)
                .filter_map(|f| value(f).map(|v| (f64::from(f.year), v)))
                .collect(),
        })
        .collect()
}

/// Capital, offered premium and loss ratio charts for one replication.
pub fn charts(run: &RunOutput) -> Vec<(String, String)> {
    let seed = run.seed;
    vec![
        (
            format!("capital_seed_{seed}.svg"),
            line_chart(
                &format!("Capital (seed {seed})"),
                "year",
                "capital",
                &per_syndicate(&run.frames, |f| Some(f.capital)),
            ),
        ),
        (
            format!("premium_seed_{seed}.svg"),
            line_chart(
                &format!("Mean offered premium (seed {seed})"),
                "year",
                "premium",
                &per_syndicate(&run.frames, |f| f.premiums_offered_mean),
            ),
        ),
        (
            format!("loss_ratio_seed_{seed}.svg"),
            line_chart(
                &format!("Loss ratio (seed {seed})"),
                "year",
                "loss ratio",
                &per_syndicate(&run.frames, |f| f.loss_ratio),
            ),
        ),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct Aggregate {
    pub mean: Option<f64>,
    pub std_dev: Option<f64>,
}

impl Aggregate {
    fn of(xs: impl IntoIterator<Item = Option<f64>>) -> Self {
        let v: Vec<f64> = xs.into_iter().flatten().collect();
        Aggregate {
            mean: analysis::mean(&v),
            std_dev: analysis::std_dev(&v),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub preset: Option<String>,
    pub seeds: Vec<u64>,
    pub insolvencies_total: usize,
    pub seeds_without_insolvency: usize,
    pub final_capital: Aggregate,
    pub offered_premium_final_decade: Aggregate,
    pub premium_dispersion: Aggregate,
    pub loss_ratio_correlation: Aggregate,
    pub uniform_deviation_final_decade: Aggregate,
    pub runs: Vec<RunSummary>,
}

impl Summary {
    pub fn new(cfg: &ScenarioConfig, runs: &[RunOutput]) -> Self {
        let per_run: Vec<RunSummary> = runs
            .iter()
            .map(|r| RunSummary::from_run(r, cfg.horizon_years))
            .collect();
        Summary {
            preset: cfg.preset.map(|p| p.name().to_string()),
            seeds: runs.iter().map(|r| r.seed).collect(),
            insolvencies_total: per_run.iter().map(|r| r.insolvencies).sum(),
            seeds_without_insolvency: per_run.iter().filter(|r| r.insolvencies == 0).count(),
            final_capital: Aggregate::of(per_run.iter().map(|r| Some(r.final_capital_mean))),
            offered_premium_final_decade: Aggregate::of(per_run.iter().map(|r| r.offered_premium_final_decade)),
            premium_dispersion: Aggregate::of(per_run.iter().map(|r| r.premium_dispersion)),
            loss_ratio_correlation: Aggregate::of(per_run.iter().map(|r| r.loss_ratio_correlation)),
            uniform_deviation_final_decade: Aggregate::of(per_run.iter().map(|r| r.uniform_deviation_final_decade)),
            runs: per_run,
        }
    }
}

/// Runs every seed (in parallel when asked) and returns outputs in seed order.
pub fn run_batch(cfg: &ScenarioConfig, seeds: &[u64], trace: bool, parallel: bool) -> Result<Vec<RunOutput>, SimError> {
    run_replications(seeds, parallel, |seed| run(cfg, seed, trace))
        .into_iter()
        .collect()
}

fn write(path: PathBuf, contents: &str) -> Result<(), SimError> {
    fs::write(&path, contents).map_err(|source| SimError::Output { path, source })
}

/// Makes sure `dir` exists and is writable.
pub fn prepare_output_dir(dir: &Path) -> Result<(), SimError> {
    let err = |source| SimError::Output {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir.join("plots")).map_err(err)?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(err)?;
    fs::remove_file(&probe).map_err(err)?;
    Ok(())
}

/// Runs the configured seeds and writes every result file into `out`.
pub fn run_scenarios(cfg: &ScenarioConfig, out: &Path, trace: bool) -> Result<Summary, SimError> {
    prepare_output_dir(out)?;
    let runs = run_batch(cfg, &cfg.seeds, trace, true)?;
    write(out.join("config.toml"), &cfg.to_toml_string())?;
    for r in &runs {
        write(out.join(format!("metrics_seed_{}.csv", r.seed)), &metrics_csv(r.seed, &r.frames))?;
        write(out.join(format!("industry_seed_{}.csv", r.seed)), &industry_csv(r))?;
        write(out.join(format!("portfolio_seed_{}.csv", r.seed)), &portfolio_csv(r))?;
        write(out.join(format!("catastrophes_seed_{}.csv", r.seed)), &catastrophes_csv(r))?;
        if let Some(t) = trace_csv(r) {
            write(out.join(format!("trace_seed_{}.csv", r.seed)), &t)?;
        }
        for (name, svg) in charts(r) {
            write(out.join("plots").join(name), &svg)?;
        }
    }
    let summary = Summary::new(cfg, &runs);
    write(out.join("summary.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let frames = vec![YearFrame {
            year: 3,
            syndicate_id: 1,
            capital: 9_876_543.21,
            premiums_offered_mean: None,
            premiums_earned: 0.0,
            claims_paid: 0.0,
            loss_ratio: None,
            insolvent: true,
            uniform_deviation: 0.0,
            policies_in_force: 0,
        }];
        let text = metrics_csv(7, &frames);
        assert!(text.starts_with(METRICS_HEADER));
        let back = parse_metrics_csv(&text).unwrap();
        assert_eq!(back, vec![(7, frames[0].clone())]);
    }

    #[test]
    fn chart_is_well_formed() {
        let svg = line_chart(
            "t",
            "x",
            "y",
            &[Series {
                name: "a<b".into(),
                points: vec![(1.0, 2.0), (2.0, 3.0)],
            }],
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("polyline") && svg.contains("a&lt;b"));
    }
}
