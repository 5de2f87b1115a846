//! Statistical and exact test harness shared by the coupling diagnostics and
//! the experiments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::TestError;
use crate::rng::Law;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Exact,
    ChiSquare,
    Ci,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

/// Outcome of one test. Exact tests carry rational evidence instead of a
/// p-value.
#[derive(Clone, Debug, Serialize)]
pub struct TestReport {
    pub test: String,
    pub kind: TestKind,
    pub statistic: f64,
    pub dof: Option<usize>,
    pub p_value: Option<f64>,
    pub exact_equal: Option<bool>,
    /// Largest absolute probability difference, as `p/q`, for exact tests.
    pub evidence: Option<String>,
    pub decision: Decision,
    pub alpha: f64,
}

impl TestReport {
    pub fn passed(&self) -> bool {
        self.decision == Decision::Accept
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Accepts when `|estimate - target| <= z * se`.
    pub fn ci(test: &str, estimate: f64, target: f64, se: f64, z: f64) -> Self {
        let diff = (estimate - target).abs();
        let statistic = if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        TestReport {
            test: test.to_string(),
            kind: TestKind::Ci,
            statistic,
            dof: None,
            p_value: None,
            exact_equal: None,
            evidence: None,
            decision: if statistic <= z { Decision::Accept } else { Decision::Reject },
            alpha: 2.0 * (1.0 - standard_normal_cdf(z)),
        }
    }

    fn chi_square(test: &str, statistic: f64, dof: usize, alpha: f64) -> Self {
        let p = chi_square_sf(statistic, dof);
        TestReport {
            test: test.to_string(),
            kind: TestKind::ChiSquare,
            statistic,
            dof: Some(dof),
            p_value: Some(p),
            exact_equal: None,
            evidence: None,
            decision: if p < alpha { Decision::Reject } else { Decision::Accept },
            alpha,
        }
    }
}

fn standard_normal_cdf(z: f64) -> f64 {
    use statrs::distribution::Normal;
    Normal::new(0.0, 1.0).unwrap().cdf(z)
}

/// Upper tail of the chi-square distribution; 1 when there are no degrees
/// of freedom.
pub fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).unwrap().sf(statistic.max(0.0))
}

pub const MIN_EXPECTED: f64 = 5.0;

// Groups cell indices in ascending order of `key` until each group's key sum
// reaches `threshold`; a short trailing group joins the previous one.
fn merge_cells(keys: &[f64], threshold: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..keys.len()).filter(|&i| keys[i] > 0.0).collect();
    order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).unwrap());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    let mut mass = 0.0;
    for i in order {
        current.push(i);
        mass += keys[i];
        if mass >= threshold {
            groups.push(std::mem::take(&mut current));
            mass = 0.0;
        }
    }
    if !current.is_empty() {
        match groups.last_mut() {
            Some(g) => g.extend(current),
            None => groups.push(current),
        }
    }
    groups
}

/// Goodness of fit of observed counts against cell probabilities, merging
/// cells with expected count below five.
pub fn chi_square_goodness_of_fit(test: &str, counts: &[u64], probs: &[f64], alpha: f64) -> TestReport {
    assert_eq!(counts.len(), probs.len());
    let n: u64 = counts.iter().sum();
    let expected: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
    let groups = merge_cells(&expected, MIN_EXPECTED);
    let mut stat = 0.0;
    for g in &groups {
        let o: u64 = g.iter().map(|&i| counts[i]).sum();
        let e: f64 = g.iter().map(|&i| expected[i]).sum();
        stat += (o as f64 - e).powi(2) / e;
    }
    // Observations in zero-probability cells make the fit impossible.
    if counts.iter().zip(probs).any(|(&c, &p)| c > 0 && p <= 0.0) {
        stat = f64::INFINITY;
    }
    TestReport::chi_square(test, stat, groups.len().saturating_sub(1), alpha)
}

/// Pearson test of independence on the contingency table of `pairs`.
pub fn contingency_independence<A: Ord + Copy, B: Ord + Copy>(test: &str, pairs: &[(A, B)], alpha: f64) -> TestReport {
    let rows: BTreeSet<A> = pairs.iter().map(|p| p.0).collect();
    let cols: BTreeSet<B> = pairs.iter().map(|p| p.1).collect();
    let rows: BTreeMap<A, usize> = rows.into_iter().enumerate().map(|(i, a)| (a, i)).collect();
    let cols: BTreeMap<B, usize> = cols.into_iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut table = vec![vec![0u64; cols.len()]; rows.len()];
    for (a, b) in pairs {
        table[rows[a]][cols[b]] += 1;
    }
    let n = pairs.len() as f64;
    let row_tot: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_tot: Vec<f64> = (0..cols.len()).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let mut stat = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            let e = row_tot[i] * col_tot[j] / n;
            stat += (o as f64 - e).powi(2) / e;
        }
    }
    let dof = rows.len().saturating_sub(1) * cols.len().saturating_sub(1);
    TestReport::chi_square(test, stat, dof, alpha)
}

/// Two-sample chi-square with pooled expected counts; cells are merged in
/// increasing order of pooled count until both expected counts reach five.
pub fn two_sample_chi_square(test: &str, a: &[u64], b: &[u64], alpha: f64) -> TestReport {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let total = (na + nb) as f64;
    let small = na.min(nb) as f64;
    let pooled: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x + y) as f64).collect();
    // Smaller sample's expected count is pooled * small / total.
    let groups = merge_cells(&pooled, MIN_EXPECTED * total / small.max(1.0));
    let mut stat = 0.0;
    for g in &groups {
        let oa: u64 = g.iter().map(|&i| a[i]).sum();
        let ob: u64 = g.iter().map(|&i| b[i]).sum();
        let t = (oa + ob) as f64;
        let ea = t * na as f64 / total;
        let eb = t * nb as f64 / total;
        stat += (oa as f64 - ea).powi(2) / ea + (ob as f64 - eb).powi(2) / eb;
    }
    TestReport::chi_square(test, stat, groups.len().saturating_sub(1), alpha)
}

/// Either an exact law or an empirical sample of counts.
#[derive(Clone, Debug)]
pub enum Distribution<K> {
    Exact(Law<K>),
    Sample(BTreeMap<K, u64>),
}

impl<K: Ord + Clone> Distribution<K> {
    pub fn from_samples<I: IntoIterator<Item = K>>(it: I) -> Self {
        let mut m = BTreeMap::new();
        for k in it {
            *m.entry(k).or_insert(0) += 1;
        }
        Distribution::Sample(m)
    }
}

/// Exact comparison when both sides are laws; goodness of fit when one side
/// is exact; two-sample chi-square otherwise.
pub fn distribution_equality_test<K: Ord + Clone + Debug>(
    test: &str,
    a: &Distribution<K>,
    b: &Distribution<K>,
    alpha: f64,
) -> Result<TestReport, TestError> {
    match (a, b) {
        (Distribution::Exact(x), Distribution::Exact(y)) => Ok(exact_equality(test, x, y)),
        (Distribution::Exact(law), Distribution::Sample(s)) | (Distribution::Sample(s), Distribution::Exact(law)) => {
            if s.values().sum::<u64>() == 0 {
                return Err(TestError::EmptySample);
            }
            if let Some(k) = s.keys().find(|k| law.get(*k).is_none_or(Zero::is_zero)) {
                return Err(TestError::UnmatchedSupport(format!("{k:?}")));
            }
            let keys: Vec<&K> = law.keys().collect();
            let counts: Vec<u64> = keys.iter().map(|k| s.get(*k).copied().unwrap_or(0)).collect();
            let probs: Vec<f64> = keys.iter().map(|k| law[*k].to_f64().unwrap()).collect();
            Ok(chi_square_goodness_of_fit(test, &counts, &probs, alpha))
        }
        (Distribution::Sample(x), Distribution::Sample(y)) => {
            if x.values().sum::<u64>() == 0 || y.values().sum::<u64>() == 0 {
                return Err(TestError::EmptySample);
            }
            let keys: BTreeSet<&K> = x.keys().chain(y.keys()).collect();
            let a: Vec<u64> = keys.iter().map(|k| x.get(*k).copied().unwrap_or(0)).collect();
            let b: Vec<u64> = keys.iter().map(|k| y.get(*k).copied().unwrap_or(0)).collect();
            Ok(two_sample_chi_square(test, &a, &b, alpha))
        }
    }
}

/// Zero-tolerance comparison of two exact laws.
pub fn exact_equality<K: Ord>(test: &str, x: &Law<K>, y: &Law<K>) -> TestReport {
    let zero = BigRational::zero();
    let keys: BTreeSet<&K> = x.keys().chain(y.keys()).collect();
    let mut worst = BigRational::zero();
    for k in keys {
        let d = (x.get(k).unwrap_or(&zero) - y.get(k).unwrap_or(&zero)).abs();
        if d > worst {
            worst = d;
        }
    }
    let equal = worst.is_zero();
    TestReport {
        test: test.to_string(),
        kind: TestKind::Exact,
        statistic: worst.to_f64().unwrap_or(f64::INFINITY),
        dof: None,
        p_value: None,
        exact_equal: Some(equal),
        evidence: Some(worst.to_string()),
        decision: if equal { Decision::Accept } else { Decision::Reject },
        alpha: 0.0,
    }
}
