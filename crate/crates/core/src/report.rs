//! Text renderings of metric reports and score tables.
//!
//! Markdown rounds every metric to two decimals; CSV and structured (JSON)
//! output keep full precision. CSV output uses the metric-row schema so it
//! can be loaded again with [`load_metric_rows`](crate::ingest::load_metric_rows).

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::metrics::{IcpSource, MetricReport, SmSource};
use crate::scoring::{rank_table, RankedTool, ScoreTable, StdConvention};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderFormat {
    #[default]
    Markdown,
    Csv,
    /// Pretty-printed JSON.
    Structured,
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "md" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            "structured" | "json" => Ok(Self::Structured),
            other => Err(format!(
                "unknown format `{other}` (expected markdown, csv or structured)"
            )),
        }
    }
}

/// Two-decimal rendering with halves rounded away from zero (`0.125` -> `0.13`).
pub fn round2(x: f64) -> String {
    let r = (x * 100.0).round() / 100.0;
    // Avoid "-0.00".
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.2}")
}

fn sm_source_name(s: SmSource) -> &'static str {
    match s {
        SmSource::StaticDistinct => "static-distinct",
        SmSource::StaticWeighted => "static-weighted",
        SmSource::RuntimeWeighted => "runtime-weighted",
    }
}

fn icp_source_name(s: IcpSource) -> &'static str {
    match s {
        IcpSource::RuntimeElseStatic => "runtime-else-static",
        IcpSource::RuntimeOnly => "runtime-only",
        IcpSource::StaticOnly => "static-only",
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(cells).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn render_report(report: &MetricReport, format: RenderFormat) -> String {
    match format {
        RenderFormat::Markdown => report_markdown(report),
        RenderFormat::Csv => {
            let mut out = csv_line(&["tool", "sm", "ifn", "icp", "ned", "micro"].map(String::from));
            let [sm, ifn, icp, ned] = report.values();
            out.push_str(&csv_line(&[
                report.tool.clone(),
                sm.to_string(),
                ifn.to_string(),
                icp.to_string(),
                ned.to_string(),
                report.micro.to_string(),
            ]));
            out
        }
        RenderFormat::Structured => json(report),
    }
}

fn report_markdown(r: &MetricReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "## {} / {}\n", r.system, r.tool);
    let _ = writeln!(
        out,
        "Edge policy: SM/IFN from {}{}, ICP from {} ({} edges used).\n",
        sm_source_name(r.policy.sm_source),
        if r.policy.include_self_edges_in_cohesion {
            ""
        } else {
            " without self-edges"
        },
        icp_source_name(r.policy.icp_source),
        r.icp.edge_kind,
    );
    out.push_str("| SM | IFN | ICP | NED | Micro |\n|---:|---:|---:|---:|---:|\n");
    let [sm, ifn, icp, ned] = r.values();
    let _ = writeln!(
        out,
        "| {} | {} | {} | {} | {} |\n",
        round2(sm),
        round2(ifn),
        round2(icp),
        round2(ned),
        r.micro
    );
    out.push_str("| Service | Classes | Intra calls | scoh | Interfaces |\n|---|---:|---:|---:|---:|\n");
    for (i, name) in r.services.iter().enumerate() {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            name,
            r.sm.sizes[i],
            r.sm.mu[i],
            round2(r.sm.scoh[i]),
            r.ifn.ifn_per_service[i]
        );
    }
    let _ = writeln!(
        out,
        "\nCohesion term {}, coupling term {}; {} of {} calls cross service boundaries; {} of {} services within [{}, {}] classes.",
        round2(r.sm.cohesion_term),
        round2(r.sm.coupling_term),
        r.icp.inter_calls,
        r.icp.total_calls,
        r.ned.non_extreme_count,
        r.micro,
        r.ned.bounds.lo,
        r.ned.bounds.hi,
    );
    out
}

#[derive(Serialize)]
struct RankedTableOut<'a> {
    #[serde(flatten)]
    table: &'a ScoreTable,
    ranking: Vec<RankedTool>,
}

pub fn render_table(table: &ScoreTable, format: RenderFormat) -> String {
    let ranking = rank_table(table);
    match format {
        RenderFormat::Markdown => table_markdown(table, &ranking),
        RenderFormat::Csv => {
            let mut out = csv_line(&["tool", "sm", "ifn", "icp", "ned", "micro", "score", "rank"].map(String::from));
            for r in &ranking {
                let t = table
                    .scored
                    .iter()
                    .find(|t| t.tool == r.tool)
                    .expect("ranked tool is scored");
                let [sm, ifn, icp, ned] = t.raw;
                out.push_str(&csv_line(&[
                    t.tool.clone(),
                    sm.to_string(),
                    ifn.to_string(),
                    icp.to_string(),
                    ned.to_string(),
                    t.micro.map(|m| m.to_string()).unwrap_or_default(),
                    r.score.to_string(),
                    r.rank.to_string(),
                ]));
            }
            for tool in &table.not_scored {
                out.push_str(&csv_line(&[
                    tool.clone(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]));
            }
            out
        }
        RenderFormat::Structured => json(&RankedTableOut { table, ranking }),
    }
}

fn table_markdown(table: &ScoreTable, ranking: &[RankedTool]) -> String {
    let mut out = String::new();
    if !table.benchmark.is_empty() {
        let _ = writeln!(out, "## {}\n", table.benchmark);
    }
    out.push_str("| Rank | Tool | SM | IFN | ICP | NED | Micro | Score |\n");
    out.push_str("|---:|---|---:|---:|---:|---:|---:|---:|\n");
    for r in ranking {
        let t = table
            .scored
            .iter()
            .find(|t| t.tool == r.tool)
            .expect("ranked tool is scored");
        let [sm, ifn, icp, ned] = t.raw;
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            r.rank,
            t.tool,
            round2(sm),
            round2(ifn),
            round2(icp),
            round2(ned),
            t.micro.map_or_else(|| "-".to_owned(), |m| m.to_string()),
            round2(r.score),
        );
    }
    let w = table.weights;
    let _ = writeln!(
        out,
        "\nWeights (SM, IFN, ICP, NED) = ({}, {}, {}, {}); {} standard deviation.",
        w.sm,
        w.ifn,
        w.icp,
        w.ned,
        match table.convention {
            StdConvention::Population => "population",
            StdConvention::Sample => "sample",
        }
    );
    if !table.not_scored.is_empty() {
        let _ = writeln!(out, "Not scored (missing metrics): {}.", table.not_scored.join(", "));
    }
    out
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}
