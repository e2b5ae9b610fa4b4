//! Published per-tool metric tables for the four reference benchmarks,
//! embedded from `fixtures/table1/`.

/// A benchmark's metric table as shipped (CSV text, metric-row schema).
#[derive(Debug, Clone, Copy)]
pub struct Benchmark {
    pub name: &'static str,
    pub metrics_csv: &'static str,
}

pub const DAYTRADER: Benchmark = Benchmark {
    name: "DayTrader",
    metrics_csv: include_str!("../fixtures/table1/daytrader.csv"),
};

pub const PLANTS: Benchmark = Benchmark {
    name: "Plants",
    metrics_csv: include_str!("../fixtures/table1/plants.csv"),
};

pub const JPETSTORE: Benchmark = Benchmark {
    name: "JPetStore",
    metrics_csv: include_str!("../fixtures/table1/jpetstore.csv"),
};

pub const ACMEAIR: Benchmark = Benchmark {
    name: "AcmeAir",
    metrics_csv: include_str!("../fixtures/table1/acmeair.csv"),
};

pub const BENCHMARKS: [Benchmark; 4] = [DAYTRADER, PLANTS, JPETSTORE, ACMEAIR];

const PUBLISHED_SCORES: &str = include_str!("../fixtures/table1/published_scores.csv");

/// Published composite scores for `benchmark`, as `(tool, score)` in table order.
pub fn published_scores(benchmark: &str) -> Vec<(String, f64)> {
    PUBLISHED_SCORES
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1)
        .filter_map(|l| {
            let mut parts = l.split(',');
            let (b, tool, score) = (parts.next()?, parts.next()?, parts.next()?);
            (b == benchmark).then(|| (tool.to_owned(), score.parse().expect("fixture score is numeric")))
        })
        .collect()
}
