//! Empirical distributions, correlation tests, external score tables and the
//! trolls-vs-ego-net top-k summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::cascades::InitiatorCounts;
use crate::error::{Error, Result};
use crate::graph::{BaseGroup, DegreeRecord, GroupLabel};
use crate::topology::CorenessMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CcdfConvention {
    /// P(X >= x)
    #[default]
    Geq,
    /// P(X > x)
    Gt,
}

/// Sorted sample with CDF/CCDF evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Undefined("empirical distribution of an empty sample".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Data("NaN in sample".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples <= x.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    pub fn ccdf(&self, x: f64, conv: CcdfConvention) -> f64 {
        let below = match conv {
            CcdfConvention::Geq => self.sorted.partition_point(|&v| v < x),
            CcdfConvention::Gt => self.sorted.partition_point(|&v| v <= x),
        };
        (self.len() - below) as f64 / self.len() as f64
    }

    fn distinct(&self) -> impl Iterator<Item = f64> + '_ {
        let mut prev: Option<f64> = None;
        self.sorted.iter().copied().filter(move |&v| {
            let fresh = prev != Some(v);
            prev = Some(v);
            fresh
        })
    }

    /// `(x, CCDF(x))` at each distinct sample value, ascending in x.
    pub fn ccdf_points(&self, conv: CcdfConvention) -> Vec<(f64, f64)> {
        self.distinct().map(|x| (x, self.ccdf(x, conv))).collect()
    }

    pub fn cdf_points(&self) -> Vec<(f64, f64)> {
        self.distinct().map(|x| (x, self.cdf(x))).collect()
    }
}

pub fn ccdf(values: &[f64], conv: CcdfConvention) -> Result<Vec<(f64, f64)>> {
    Ok(EmpiricalDistribution::new(values.to_vec())?.ccdf_points(conv))
}

/// Largest absolute gap between the two empirical CDFs.
pub fn distribution_compare(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    a.values()
        .iter()
        .chain(b.values())
        .map(|&x| (a.cdf(x) - b.cdf(x)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub coefficient: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub n: usize,
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Data(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::Undefined(format!("correlation needs at least 3 pairs, got {}", x.len())));
    }
    Ok(())
}

fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-sided p-value of r under the t approximation with n - 2 degrees of
/// freedom.
fn t_test(r: f64, n: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    check_pair(x, y)?;
    let r = pearson_r(x, y)?;
    Ok(Correlation { coefficient: r, p_value: t_test(r, x.len()), n: x.len() })
}

/// 1-based ranks; tied values share their mean rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = mean;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<Correlation> {
    check_pair(x, y)?;
    let r = pearson_r(&average_ranks(x), &average_ranks(y))?;
    Ok(Correlation { coefficient: r, p_value: t_test(r, x.len()), n: x.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
}

/// Two-sided permutation p-value: the share of `permutations` shuffles of `y`
/// whose |coefficient| reaches the observed one (with the +1 correction).
pub fn permutation_p_value(
    x: &[f64],
    y: &[f64],
    method: CorrelationMethod,
    permutations: usize,
    seed: u64,
) -> Result<f64> {
    check_pair(x, y)?;
    let (xs, mut ys) = match method {
        CorrelationMethod::Pearson => (x.to_vec(), y.to_vec()),
        CorrelationMethod::Spearman => (average_ranks(x), average_ranks(y)),
    };
    let observed = pearson_r(&xs, &ys)?.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..permutations {
        ys.shuffle(&mut rng);
        if pearson_r(&xs, &ys)?.abs() >= observed - 1e-12 {
            hits += 1;
        }
    }
    Ok((hits + 1) as f64 / (permutations + 1) as f64)
}

/// External per-user scores in [0, 1].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    pub scores: BTreeMap<String, f64>,
}

impl ScoreTable {
    /// Read CSV `user,score` with a header row. Out-of-range scores are
    /// clamped into [0, 1] and logged.
    pub fn from_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("user") || headers.get(1) != Some("score") {
            return Err(Error::Data(format!("score file header must be user,score, found {headers:?}")));
        }
        let mut scores = BTreeMap::new();
        let mut clamped = 0usize;
        for rec in rdr.records() {
            let rec = rec?;
            let user = rec.get(0).unwrap_or("").trim().to_string();
            let raw: f64 = rec
                .get(1)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| Error::Data(format!("bad score for {user:?}")))?;
            if raw.is_nan() {
                return Err(Error::Data(format!("NaN score for {user:?}")));
            }
            let s = raw.clamp(0.0, 1.0);
            if s != raw {
                clamped += 1;
            }
            scores.insert(user, s);
        }
        if clamped > 0 {
            log::warn!("{clamped} scores outside [0,1] were clamped");
        }
        Ok(ScoreTable { scores })
    }

    pub fn get(&self, user: &str) -> Option<f64> {
        self.scores.get(user).copied()
    }
}

#[derive(Debug)]
pub struct CorrelationReport {
    pub n: usize,
    pub pearson: Result<Correlation>,
    pub spearman: Result<Correlation>,
    /// `(user, score, influence)` pairs that entered the computation.
    pub pairs: Vec<(String, f64, u64)>,
}

/// Correlate scores with influence over users whose influence exceeds
/// `threshold` and that have a score. Candidates are `(user, influence)`.
pub fn correlate_scores<'a>(
    scores: &ScoreTable,
    candidates: impl IntoIterator<Item = (&'a str, u64)>,
    threshold: u64,
) -> Result<CorrelationReport> {
    let mut pairs = Vec::new();
    let mut unknown = 0usize;
    for (user, infl) in candidates {
        if infl <= threshold {
            continue;
        }
        match scores.get(user) {
            Some(s) => pairs.push((user.to_string(), s, infl)),
            None => unknown += 1,
        }
    }
    if unknown > 0 {
        log::warn!("{unknown} users above the influence threshold have no score");
    }
    if pairs.len() < 3 {
        return Err(Error::Undefined(format!(
            "only {} users with influence > {threshold} and a score",
            pairs.len()
        )));
    }
    let s: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let i: Vec<f64> = pairs.iter().map(|p| p.2 as f64).collect();
    Ok(CorrelationReport { n: pairs.len(), pearson: pearson(&s, &i), spearman: spearman(&s, &i), pairs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopkThresholds {
    pub in_degree: u64,
    pub out_degree: u64,
    pub viral_size: usize,
    pub influence: u64,
}

impl Default for TopkThresholds {
    fn default() -> Self {
        TopkThresholds { in_degree: 1000, out_degree: 1000, viral_size: 1000, influence: 1000 }
    }
}

/// Upstream metrics for the top-k table; every field must be supplied.
#[derive(Debug, Default, Clone, Copy)]
pub struct TopkInputs<'a> {
    pub labels: Option<&'a [GroupLabel]>,
    pub degrees: Option<&'a [DegreeRecord]>,
    pub coreness: Option<&'a CorenessMap>,
    pub initiators: Option<&'a InitiatorCounts>,
    pub influence: Option<&'a [u64]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopkRow {
    pub metric: String,
    pub trolls: u64,
    pub ego_net: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopkTable {
    pub rows: Vec<TopkRow>,
}

/// Trolls vs ego-net spreaders on six activity/influence metrics. The viral
/// row uses `initiators.viral`, which was computed against its own size
/// threshold; `thresholds.viral_size` only labels that row.
pub fn topk_summary(inputs: TopkInputs<'_>, thresholds: TopkThresholds) -> Result<TopkTable> {
    let labels = inputs.labels.ok_or(Error::MissingMetric("group labels"))?;
    let degrees = inputs.degrees.ok_or(Error::MissingMetric("degree profile"))?;
    let coreness = inputs.coreness.ok_or(Error::MissingMetric("coreness"))?;
    let initiators = inputs.initiators.ok_or(Error::MissingMetric("cascade initiators"))?;
    let influence = inputs.influence.ok_or(Error::MissingMetric("influence degree"))?;
    let n = labels.len();
    if degrees.len() != n
        || coreness.coreness.len() != n
        || initiators.cascades.len() != n
        || influence.len() != n
    {
        return Err(Error::Data("top-k inputs disagree on node count".into()));
    }

    // 0 = troll, 1 = ego-net spreader, None = neither
    let column = |v: usize| match labels[v] {
        GroupLabel { base: BaseGroup::Troll, .. } => Some(0),
        GroupLabel { base: BaseGroup::EgoNet, spreader: true } => Some(1),
        _ => None,
    };
    let tally = |f: &dyn Fn(usize) -> u64| -> (u64, u64) {
        let mut c = (0, 0);
        for v in 0..n {
            match column(v) {
                Some(0) => c.0 += f(v),
                Some(_) => c.1 += f(v),
                None => {}
            }
        }
        c
    };
    let max_k = coreness.max();
    let rows = [
        (
            format!("Popularity: in-degree > {}", thresholds.in_degree),
            tally(&|v| (degrees[v].in_multi > thresholds.in_degree) as u64),
        ),
        (
            format!("Sociability: out-degree > {}", thresholds.out_degree),
            tally(&|v| (degrees[v].out_multi > thresholds.out_degree) as u64),
        ),
        (
            "Nodes in the largest k-core".to_string(),
            tally(&|v| (coreness.coreness[v] == max_k) as u64),
        ),
        (
            "Source node (\"patient-zero\"): Number of cascades".to_string(),
            tally(&|v| initiators.cascades[v]),
        ),
        (
            format!("Source node: number of cascades with cascade size > {}", thresholds.viral_size),
            tally(&|v| initiators.viral[v]),
        ),
        (
            format!("influence-degree > {}", thresholds.influence),
            tally(&|v| (influence[v] > thresholds.influence) as u64),
        ),
    ];
    Ok(TopkTable {
        rows: rows
            .into_iter()
            .map(|(metric, (trolls, ego_net))| TopkRow { metric, trolls, ego_net })
            .collect(),
    })
}

impl TopkTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["metric", "trolls", "ego_net"])?;
        for r in &self.rows {
            w.write_record([r.metric.as_str(), &r.trolls.to_string(), &r.ego_net.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|r| r.metric.len()).max().unwrap_or(0).max("Metrics".len());
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:>10}  {:>10}", "Metrics", "trolls", "ego-net");
        for r in &self.rows {
            let _ = writeln!(s, "{:<width$}  {:>10}  {:>10}", r.metric, r.trolls, r.ego_net);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ccdf_examples() {
        let d = EmpiricalDistribution::new(vec![1.0, 2.0, 2.0, 5.0]).unwrap();
        assert_eq!(d.ccdf(2.0, CcdfConvention::Geq), 0.75);
        assert_eq!(d.ccdf(2.0, CcdfConvention::Gt), 0.25);
        assert_eq!(ccdf(&[3.0, 3.0, 3.0], CcdfConvention::Geq).unwrap(), vec![(3.0, 1.0)]);
        let d = EmpiricalDistribution::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d.ccdf(3.0, CcdfConvention::Geq), 1.0 / 3.0);
        assert_eq!(d.cdf(3.0), 1.0);
        assert!(ccdf(&[], CcdfConvention::Geq).is_err());
    }

    #[test]
    fn pearson_examples() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap().coefficient, 1.0);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap().coefficient, -1.0);
        let c = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((c.coefficient - 0.8).abs() < 1e-12);
        // t = 0.8 * sqrt(2 / 0.36) = 1.8856; two-sided p with 2 df = 0.2
        assert!((c.p_value - 0.2).abs() < 1e-9, "{}", c.p_value);
        assert!(matches!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::Undefined(_))));
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman(&[1.0, 5.0, 9.0, 20.0], &[0.1, 0.2, 0.3, 7.0]).unwrap().coefficient, 1.0);
        let c = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((c.coefficient - 0.8).abs() < 1e-12);
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        // Pearson on ranks [1,2.5,2.5,4] vs [1,2,3,4]: cov 4.5, var 4.5 and 5
        let tied = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!((tied.coefficient - 4.5 / (4.5f64 * 5.0).sqrt()).abs() < 1e-12);
        assert!(spearman(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn permutation_test_agrees_in_direction() {
        let x: Vec<f64> = (0..12).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| v * 2.0 + (v * 1.7).sin()).collect();
        let p = permutation_p_value(&x, &y, CorrelationMethod::Spearman, 999, 1).unwrap();
        assert!(p < 0.01);
        let noise = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0, 3.0, 5.0, 8.0];
        let p = permutation_p_value(&x, &noise, CorrelationMethod::Pearson, 999, 1).unwrap();
        assert!(p > 0.05);
    }

    #[test]
    fn compare_examples() {
        let d = |v: &[f64]| EmpiricalDistribution::new(v.to_vec()).unwrap();
        assert_eq!(distribution_compare(&d(&[1.0, 2.0]), &d(&[1.0, 2.0])), 0.0);
        assert_eq!(distribution_compare(&d(&[0.0, 0.0]), &d(&[1.0, 1.0])), 1.0);
        assert_eq!(distribution_compare(&d(&[1.0, 2.0]), &d(&[1.0, 3.0])), 0.5);
    }

    #[test]
    fn score_file_parsing() {
        let t = ScoreTable::from_csv("user,score\na,0.5\nb,1.5\nc,-2\n".as_bytes()).unwrap();
        assert_eq!(t.get("a"), Some(0.5));
        assert_eq!(t.get("b"), Some(1.0));
        assert_eq!(t.get("c"), Some(0.0));
        assert!(ScoreTable::from_csv("id,value\na,1\n".as_bytes()).is_err());
    }

    #[test]
    fn correlate_examples() {
        let scores = ScoreTable::from_csv("user,score\na,0.5\nb,0.5\nc,0.5\nd,0.1\n".as_bytes()).unwrap();
        let r = correlate_scores(&scores, [("a", 200), ("b", 300), ("c", 400)], 100).unwrap();
        assert!(r.pearson.is_err());
        assert!(r.spearman.is_err());
        assert!(correlate_scores(&scores, [("a", 200), ("b", 300), ("c", 400)], 1000).is_err());
        let scores = ScoreTable::from_csv("user,score\na,0.9\nb,0.6\nc,0.3\nd,0.1\n".as_bytes()).unwrap();
        let r = correlate_scores(&scores, [("a", 101), ("b", 300), ("c", 500), ("d", 900), ("e", 1000)], 100).unwrap();
        assert_eq!(r.n, 4);
        assert!(r.spearman.unwrap().coefficient < 0.0);
    }

    fn zero_inputs(n: usize) -> (Vec<GroupLabel>, Vec<DegreeRecord>, CorenessMap, InitiatorCounts, Vec<u64>) {
        let labels = (0..n)
            .map(|i| GroupLabel {
                base: if i % 2 == 0 { BaseGroup::Troll } else { BaseGroup::EgoNet },
                spreader: true,
            })
            .collect();
        let degrees = (0..n as u32)
            .map(|node| DegreeRecord { node, in_multi: 0, out_multi: 0, in_simple: 0, out_simple: 0 })
            .collect();
        (
            labels,
            degrees,
            CorenessMap { coreness: vec![0; n] },
            InitiatorCounts { cascades: vec![0; n], viral: vec![0; n], viral_threshold: 1000 },
            vec![0; n],
        )
    }

    #[test]
    fn topk_all_zero_and_missing() {
        let (labels, degrees, coreness, init, infl) = zero_inputs(4);
        let mut inputs = TopkInputs {
            labels: Some(&labels),
            degrees: Some(&degrees),
            coreness: Some(&coreness),
            initiators: Some(&init),
            influence: Some(&infl),
        };
        let t = topk_summary(inputs, TopkThresholds::default()).unwrap();
        assert_eq!(t.rows.len(), 6);
        // every node is in the (0-)core when nothing has edges
        assert_eq!((t.rows[2].trolls, t.rows[2].ego_net), (2, 2));
        for (i, r) in t.rows.iter().enumerate() {
            if i != 2 {
                assert_eq!((r.trolls, r.ego_net), (0, 0));
            }
        }
        assert_eq!(t.rows[0].metric, "Popularity: in-degree > 1000");
        assert_eq!(t.rows[3].metric, "Source node (\"patient-zero\"): Number of cascades");
        inputs.coreness = None;
        assert!(matches!(topk_summary(inputs, TopkThresholds::default()), Err(Error::MissingMetric("coreness"))));
    }

    proptest! {
        #[test]
        fn ccdf_is_monotone(values in proptest::collection::vec(-1e6f64..1e6, 1..200)) {
            let pts = ccdf(&values, CcdfConvention::Geq).unwrap();
            prop_assert_eq!(pts[0].1, 1.0);
            for w in pts.windows(2) {
                prop_assert!(w[0].1 >= w[1].1);
            }
            let d = EmpiricalDistribution::new(values).unwrap();
            prop_assert_eq!(d.cdf(*d.values().last().unwrap()), 1.0);
        }

        #[test]
        fn correlations_symmetric_and_invariant(
            pairs in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40),
            a in 0.1f64..10.0,
            b in -50.0f64..50.0,
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            if let (Ok(p1), Ok(p2)) = (pearson(&x, &y), pearson(&y, &x)) {
                prop_assert!((p1.coefficient - p2.coefficient).abs() < 1e-9);
                let xt: Vec<f64> = x.iter().map(|v| a * v + b).collect();
                let p3 = pearson(&xt, &y).unwrap();
                prop_assert!((p1.coefficient - p3.coefficient).abs() < 1e-9);
            }
            if let (Ok(s1), Ok(s2)) = (spearman(&x, &y), spearman(&y, &x)) {
                prop_assert!((s1.coefficient - s2.coefficient).abs() < 1e-12);
                let xt: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
                let s3 = spearman(&xt, &y).unwrap();
                prop_assert!((s1.coefficient - s3.coefficient).abs() < 1e-12);
            }
        }

        #[test]
        fn topk_counts_fall_as_thresholds_rise(
            raw in proptest::collection::vec((0u64..50, 0u64..50, 0u64..5, 0u64..5, 0u64..50), 1..30),
            t_lo in 0u64..25,
            bump in 0u64..25,
        ) {
            let n = raw.len();
            let (labels, _, coreness, _, _) = zero_inputs(n);
            let degrees: Vec<DegreeRecord> = raw.iter().enumerate()
                .map(|(i, r)| DegreeRecord { node: i as u32, in_multi: r.0, out_multi: r.1, in_simple: 0, out_simple: 0 })
                .collect();
            let init = InitiatorCounts { cascades: raw.iter().map(|r| r.2).collect(), viral: raw.iter().map(|r| r.3).collect(), viral_threshold: 0 };
            let infl: Vec<u64> = raw.iter().map(|r| r.4).collect();
            let inputs = TopkInputs { labels: Some(&labels), degrees: Some(&degrees), coreness: Some(&coreness), initiators: Some(&init), influence: Some(&infl) };
            let th = |t: u64| TopkThresholds { in_degree: t, out_degree: t, viral_size: 0, influence: t };
            let lo = topk_summary(inputs, th(t_lo)).unwrap();
            let hi = topk_summary(inputs, th(t_lo + bump)).unwrap();
            for (a, b) in lo.rows.iter().zip(&hi.rows) {
                prop_assert!(b.trolls <= a.trolls && b.ego_net <= a.ego_net);
            }
        }
    }
}
