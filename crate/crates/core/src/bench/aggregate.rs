use std::io::Write;

use super::records::ResultRecord;
use crate::error::Result;
use crate::metrics::MetricName;

/// Median and quartiles of one metric over the successful replications of a cell.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRecord {
    pub dataset: String,
    pub method: String,
    pub size: usize,
    pub metric: MetricName,
    pub median: Option<f64>,
    pub q25: Option<f64>,
    pub q75: Option<f64>,
    pub n_ok: usize,
}

/// Linear-interpolation quantile of ascending data: position `(n − 1) q`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// One row per (dataset, method, size, metric), in first-appearance order
/// of the cells. Error-tagged records are skipped; `n_ok` counts the rest.
/// Support accuracy is reported only when some record carries it.
pub fn aggregate(records: &[ResultRecord]) -> Vec<AggregateRecord> {
    let with_support = records
        .iter()
        .any(|r| r.metrics.as_ref().is_some_and(|m| m.support_accuracy.is_some()));
    let metrics: Vec<MetricName> = MetricName::ALL
        .into_iter()
        .filter(|&m| with_support || m != MetricName::SupportAcc)
        .collect();

    let mut cells: Vec<(&str, &str, usize)> = Vec::new();
    let mut members: Vec<Vec<&ResultRecord>> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for r in records {
        let key = (r.dataset.as_str(), r.method.as_str(), r.size);
        let slot = *index.entry(key).or_insert_with(|| {
            cells.push(key);
            members.push(Vec::new());
            cells.len() - 1
        });
        members[slot].push(r);
    }

    let mut out = Vec::with_capacity(cells.len() * metrics.len());
    for ((dataset, method, size), rows) in cells.into_iter().zip(members) {
        for &metric in &metrics {
            let mut values: Vec<f64> = rows
                .iter()
                .filter_map(|r| r.metrics.as_ref().and_then(|m| metric.get(m)))
                .filter(|v| !v.is_nan())
                .collect();
            values.sort_by(f64::total_cmp);
            let stat = |q| (!values.is_empty()).then(|| quantile(&values, q));
            out.push(AggregateRecord {
                dataset: dataset.to_string(),
                method: method.to_string(),
                size,
                metric,
                median: stat(0.5),
                q25: stat(0.25),
                q75: stat(0.75),
                n_ok: values.len(),
            });
        }
    }
    out
}

pub const AGGREGATES_HEADER: [&str; 8] = ["dataset", "method", "size", "metric", "median", "q25", "q75", "n_ok"];

pub fn write_aggregates<W: Write>(rows: &[AggregateRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATES_HEADER)?;
    for r in rows {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            r.dataset.clone(),
            r.method.clone(),
            r.size.to_string(),
            r.metric.to_string(),
            opt(r.median),
            opt(r.q25),
            opt(r.q75),
            r.n_ok.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricSet;

    #[test]
    fn quantile_examples() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!((quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75)), (2.0, 3.0, 4.0));
        assert_eq!(quantile(&[7.0], 0.25), 7.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
    }

    fn rec(method: &str, rep: usize, v: Option<f64>) -> ResultRecord {
        ResultRecord {
            dataset: "d".into(),
            method: method.into(),
            size: 10,
            rep,
            metrics: v.map(|v| MetricSet {
                rel_nll_error: v,
                coef_mse: 2.0 * v,
                rel_roc: 1.0,
                support_accuracy: None,
            }),
            wall_time_ms: 0.0,
            fallback_used: false,
            error: v.is_none().then(|| "degenerate_pilot".into()),
        }
    }

    #[test]
    fn skips_failures_and_keeps_order() {
        let records = vec![
            rec("b", 0, Some(1.0)),
            rec("b", 1, None),
            rec("b", 2, Some(3.0)),
            rec("a", 0, None),
        ];
        let agg = aggregate(&records);
        assert_eq!(agg.len(), 6);
        assert_eq!(agg[0].method, "b");
        assert_eq!((agg[0].median, agg[0].n_ok), (Some(2.0), 2));
        assert_eq!(agg[1].median, Some(4.0));
        assert_eq!(agg[2].q25, Some(1.0));
        assert_eq!((agg[3].method.as_str(), agg[3].median, agg[3].n_ok), ("a", None, 0));
        let mut buf = Vec::new();
        write_aggregates(&agg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("dataset,method,size,metric,median,q25,q75,n_ok\nd,b,10,rel_nll_error,2,1.5,2.5,2\n"));
        assert!(text.contains("d,a,10,coef_mse,,,,0"));
    }
}
