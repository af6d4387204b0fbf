//! Kruskal–Wallis omnibus test and Dunn's pairwise follow-up.

use std::io::Write;

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::aggregate::AggregateRecord;
use crate::error::{Error, Result};
use crate::metrics::MetricName;

#[derive(Clone, Debug, PartialEq)]
pub struct KruskalResult {
    /// Tie-corrected H statistic.
    pub h: f64,
    pub df: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DunnPair {
    pub method_a: String,
    pub method_b: String,
    /// `(R̄_a − R̄_b) / σ_ab`; antisymmetric in the pair.
    pub z: f64,
    pub p_raw: f64,
    /// `min(1, correction · p_raw)`.
    pub p_corrected: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DunnTable {
    pub kruskal: KruskalResult,
    /// Every ordered pair `a < b` in input order.
    pub pairs: Vec<DunnPair>,
}

impl DunnTable {
    /// Pair lookup in either orientation; `z` is negated for the reversed pair.
    pub fn pair(&self, a: &str, b: &str) -> Option<DunnPair> {
        self.pairs.iter().find_map(|p| {
            if p.method_a == a && p.method_b == b {
                Some(p.clone())
            } else if p.method_a == b && p.method_b == a {
                Some(DunnPair {
                    method_a: a.to_string(),
                    method_b: b.to_string(),
                    z: -p.z,
                    ..p.clone()
                })
            } else {
                None
            }
        })
    }
}

/// Midranks (1-based) of the pooled values and the tie sum `Σ (t³ − t)`.
fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

/// Pools all observations, ranks them jointly and compares every pair of
/// groups with Dunn's z statistic (tie-corrected variance). Two-sided normal
/// p-values are multiplied by `correction_factor` and capped at 1.
pub fn kruskal_dunn(observations: &[(String, Vec<f64>)], correction_factor: usize) -> Result<DunnTable> {
    if observations.len() < 2 {
        return Err(Error::Config("the Dunn test needs at least two groups".into()));
    }
    if let Some((name, _)) = observations.iter().find(|(_, v)| v.is_empty()) {
        return Err(Error::Config(format!("group `{name}` has no observations")));
    }
    if observations.iter().any(|(_, v)| v.iter().any(|x| x.is_nan())) {
        return Err(Error::Numerical("NaN observation in the Dunn test".into()));
    }
    let pooled: Vec<f64> = observations.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let n = pooled.len() as f64;
    let (ranks, tie_sum) = midranks(&pooled);

    let mut mean_ranks = Vec::with_capacity(observations.len());
    let mut offset = 0;
    for (_, v) in observations {
        mean_ranks.push(ranks[offset..offset + v.len()].iter().sum::<f64>() / v.len() as f64);
        offset += v.len();
    }

    let k = observations.len();
    let df = k - 1;
    let h_raw = 12.0 / (n * (n + 1.0))
        * observations
            .iter()
            .zip(&mean_ranks)
            .map(|((_, v), r)| v.len() as f64 * r * r)
            .sum::<f64>()
        - 3.0 * (n + 1.0);
    let tie_factor = 1.0 - tie_sum / (n * n * n - n);
    let (h, p) = if tie_factor > 0.0 {
        let h = (h_raw / tie_factor).max(0.0);
        let chi = ChiSquared::new(df as f64).expect("df >= 1");
        (h, chi.sf(h))
    } else {
        (0.0, 1.0)
    };

    let normal = Normal::standard();
    let variance_base = n * (n + 1.0) / 12.0 - tie_sum / (12.0 * (n - 1.0));
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            let (na, nb) = (observations[a].1.len() as f64, observations[b].1.len() as f64);
            let sigma2 = variance_base * (1.0 / na + 1.0 / nb);
            let diff = mean_ranks[a] - mean_ranks[b];
            let (z, p_raw) = if sigma2 > 0.0 && diff != 0.0 {
                let z = diff / sigma2.sqrt();
                (z, (2.0 * normal.sf(z.abs())).min(1.0))
            } else {
                (0.0, 1.0)
            };
            pairs.push(DunnPair {
                method_a: observations[a].0.clone(),
                method_b: observations[b].0.clone(),
                z,
                p_raw,
                p_corrected: (p_raw * correction_factor as f64).min(1.0),
            });
        }
    }
    Ok(DunnTable {
        kruskal: KruskalResult { h, df, p },
        pairs,
    })
}

/// Which pairs a comparison table reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Every other method against `uniform`.
    VsUniform,
    /// All pairs among the non-uniform methods (all methods if there is no `uniform`).
    AllPairs,
}

pub const BASELINE: &str = "uniform";

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub metric: MetricName,
    pub method_a: String,
    pub method_b: String,
    pub z: f64,
    pub p_corrected: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KruskalRow {
    pub metric: MetricName,
    pub h: f64,
    pub df: usize,
    pub p: f64,
    /// Number of (dataset, size) conditions entering the test.
    pub blocks: usize,
}

fn methods_in_order(aggregates: &[AggregateRecord]) -> Vec<String> {
    let mut methods: Vec<String> = Vec::new();
    for a in aggregates {
        if !methods.contains(&a.method) {
            methods.push(a.method.clone());
        }
    }
    methods
}

/// Per-method observation vectors for one metric: the cell medians over the
/// (dataset, size) conditions in which every method has a median.
pub fn observations(aggregates: &[AggregateRecord], metric: MetricName) -> Vec<(String, Vec<f64>)> {
    let methods = methods_in_order(aggregates);
    let mut blocks: Vec<(&str, usize)> = Vec::new();
    for a in aggregates.iter().filter(|a| a.metric == metric) {
        let key = (a.dataset.as_str(), a.size);
        if !blocks.contains(&key) {
            blocks.push(key);
        }
    }
    let lookup = |method: &str, (dataset, size): (&str, usize)| {
        aggregates
            .iter()
            .find(|a| a.metric == metric && a.method == method && a.dataset == dataset && a.size == size)
            .and_then(|a| a.median)
    };
    let complete: Vec<(&str, usize)> = blocks
        .into_iter()
        .filter(|&b| methods.iter().all(|m| lookup(m, b).is_some()))
        .collect();
    methods
        .iter()
        .map(|m| {
            let values = complete.iter().map(|&b| lookup(m, b).expect("complete block")).collect();
            (m.clone(), values)
        })
        .collect()
}

fn metrics_present(aggregates: &[AggregateRecord]) -> Vec<MetricName> {
    MetricName::ALL
        .into_iter()
        .filter(|m| aggregates.iter().any(|a| a.metric == *m))
        .collect()
}

/// Dunn comparisons per metric for the requested family, corrected by the
/// family size. Ranks are always pooled over every method present. Returns
/// no rows when the family is empty (e.g. no `uniform` method for `VsUniform`).
pub fn compare_report(aggregates: &[AggregateRecord], family: Family) -> Result<Vec<ComparisonRow>> {
    let methods = methods_in_order(aggregates);
    if methods.len() < 2 {
        return Ok(Vec::new());
    }
    let has_baseline = methods.iter().any(|m| m == BASELINE);
    let others: Vec<&String> = methods.iter().filter(|m| *m != BASELINE).collect();
    let wanted: Vec<(&str, &str)> = match family {
        Family::VsUniform if has_baseline => others.iter().map(|m| (m.as_str(), BASELINE)).collect(),
        Family::VsUniform => Vec::new(),
        Family::AllPairs => {
            let pool: Vec<&String> = if has_baseline { others.clone() } else { methods.iter().collect() };
            let mut v = Vec::new();
            for (i, a) in pool.iter().enumerate() {
                for b in &pool[i + 1..] {
                    v.push((a.as_str(), b.as_str()));
                }
            }
            v
        }
    };
    if wanted.is_empty() {
        return Ok(Vec::new());
    }

    let mut rows = Vec::new();
    for metric in metrics_present(aggregates) {
        let obs = observations(aggregates, metric);
        if obs[0].1.is_empty() {
            log::warn!("no complete conditions for {metric}; comparisons skipped");
            continue;
        }
        let table = kruskal_dunn(&obs, wanted.len())?;
        for &(a, b) in &wanted {
            let p = table.pair(a, b).expect("pair of known methods");
            rows.push(ComparisonRow {
                metric,
                method_a: a.to_string(),
                method_b: b.to_string(),
                z: p.z,
                p_corrected: p.p_corrected,
            });
        }
    }
    Ok(rows)
}

/// Kruskal–Wallis H per metric over all methods.
pub fn kruskal_report(aggregates: &[AggregateRecord]) -> Result<Vec<KruskalRow>> {
    if methods_in_order(aggregates).len() < 2 {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    for metric in metrics_present(aggregates) {
        let obs = observations(aggregates, metric);
        if obs[0].1.is_empty() {
            continue;
        }
        let t = kruskal_dunn(&obs, 1)?;
        rows.push(KruskalRow {
            metric,
            h: t.kruskal.h,
            df: t.kruskal.df,
            p: t.kruskal.p,
            blocks: obs[0].1.len(),
        });
    }
    Ok(rows)
}

pub const COMPARISONS_HEADER: [&str; 5] = ["metric", "method_a", "method_b", "z", "p_corrected"];
pub const KRUSKAL_HEADER: [&str; 5] = ["metric", "h", "df", "p", "blocks"];

pub fn write_comparisons<W: Write>(rows: &[ComparisonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARISONS_HEADER)?;
    for r in rows {
        w.write_record([
            r.metric.to_string(),
            r.method_a.clone(),
            r.method_b.clone(),
            r.z.to_string(),
            r.p_corrected.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_kruskal<W: Write>(rows: &[KruskalRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(KRUSKAL_HEADER)?;
    for r in rows {
        w.write_record([
            r.metric.to_string(),
            r.h.to_string(),
            r.df.to_string(),
            r.p.to_string(),
            r.blocks.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(groups: &[(&str, &[f64])]) -> Vec<(String, Vec<f64>)> {
        groups.iter().map(|(n, v)| (n.to_string(), v.to_vec())).collect()
    }

    #[test]
    fn hand_example() {
        let t = kruskal_dunn(&obs(&[("a", &[1.0, 2.0, 3.0]), ("b", &[10.0, 20.0, 30.0])]), 1).unwrap();
        let p = &t.pairs[0];
        assert!((p.z + 1.964).abs() < 1e-3, "z = {}", p.z);
        assert!((p.p_raw - 0.0495).abs() < 1e-3, "p = {}", p.p_raw);
        // H = 12/(6·7)·(3·4 + 3·25) − 21 = 27/7.
        assert!((t.kruskal.h - 27.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn identical_inputs() {
        let t = kruskal_dunn(&obs(&[("a", &[1.0, 2.0]), ("b", &[1.0, 2.0])]), 3).unwrap();
        assert_eq!((t.pairs[0].z, t.pairs[0].p_corrected), (0.0, 1.0));
        let flat = kruskal_dunn(&obs(&[("a", &[5.0; 3]), ("b", &[5.0; 3]), ("c", &[5.0; 3])]), 3).unwrap();
        assert!(flat.pairs.iter().all(|p| p.p_corrected == 1.0));
        assert_eq!(flat.kruskal.p, 1.0);
    }

    #[test]
    fn correction_and_symmetry() {
        let groups = obs(&[("a", &[1.0, 2.5, 3.0, 0.1]), ("b", &[4.0, 2.5, 6.0, 9.0]), ("c", &[0.5, 7.0, 8.0, 2.5])]);
        let raw = kruskal_dunn(&groups, 1).unwrap();
        let corrected = kruskal_dunn(&groups, 21).unwrap();
        for (r, c) in raw.pairs.iter().zip(&corrected.pairs) {
            assert_eq!(c.p_corrected, (21.0 * r.p_raw).min(1.0));
        }
        let ab = raw.pair("a", "b").unwrap();
        let ba = raw.pair("b", "a").unwrap();
        assert_eq!((ab.p_raw, ab.z), (ba.p_raw, -ba.z));
    }

    fn agg(method: &str, size: usize, median: f64) -> AggregateRecord {
        AggregateRecord {
            dataset: "d".into(),
            method: method.into(),
            size,
            metric: MetricName::CoefMse,
            median: Some(median),
            q25: Some(median),
            q75: Some(median),
            n_ok: 1,
        }
    }

    #[test]
    fn report_families() {
        let methods = ["uniform", "kmeans", "leverage", "monotonic", "lewis", "osmac_vc", "osmac_mse"];
        let aggs: Vec<AggregateRecord> = methods
            .iter()
            .flat_map(|m| (1..=4).map(move |s| agg(m, s * 100, 1.0 / s as f64)))
            .collect();
        let vs = compare_report(&aggs, Family::VsUniform).unwrap();
        assert_eq!(vs.len(), 6);
        assert!(vs.iter().all(|r| r.method_b == "uniform" && r.p_corrected == 1.0));
        assert_eq!(compare_report(&aggs, Family::AllPairs).unwrap().len(), 15);
        let one: Vec<AggregateRecord> = aggs.iter().filter(|a| a.method == "uniform").cloned().collect();
        assert!(compare_report(&one, Family::VsUniform).unwrap().is_empty());
        assert_eq!(kruskal_report(&aggs).unwrap()[0].p, 1.0);
    }

    #[test]
    fn incomplete_blocks_are_dropped() {
        let mut aggs = vec![agg("uniform", 100, 1.0), agg("lewis", 100, 2.0), agg("uniform", 200, 3.0)];
        aggs.push(AggregateRecord {
            median: None,
            ..agg("lewis", 200, 0.0)
        });
        let o = observations(&aggs, MetricName::CoefMse);
        assert_eq!(o, vec![("uniform".to_string(), vec![1.0]), ("lewis".to_string(), vec![2.0])]);
    }
}
