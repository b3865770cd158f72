//! Hand-built hard instances and exhaustive certification of the lower
//! bounds they witness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::audit::{bruteforce_violation, Criterion};
use crate::error::{Error, Result};
use crate::instance::{Cluster, Clustering, Instance};
use crate::loss::LossModel;
use crate::metric::{complete_metric, DistanceMatrix, DEFAULT_BIG};

/// Largest agent count `enumerate_clusterings` accepts.
pub const ENUMERATION_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleKind {
    /// Two triangles `{a,b,c}` and `{d,e,f}` joined by one huge edge.
    Fig1,
    /// Paired non-centroid metric against a two-center centroid metric.
    FjrImpossibility,
    /// Two agent triangles with a cyclic agent-to-center table.
    Claim1Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub name: CounterexampleKind,
    pub p: f64,
    pub lambda: f64,
    pub big_value: f64,
}

impl CounterexampleSpec {
    pub fn fig1(p: f64) -> Self {
        Self {
            name: CounterexampleKind::Fig1,
            p,
            lambda: 0.5,
            big_value: DEFAULT_BIG,
        }
    }

    pub fn fjr_impossibility() -> Self {
        Self {
            name: CounterexampleKind::FjrImpossibility,
            p: f64::NAN,
            lambda: 0.5,
            big_value: DEFAULT_BIG,
        }
    }

    pub fn claim1_table(lambda: f64) -> Self {
        Self {
            name: CounterexampleKind::Claim1Table,
            p: f64::NAN,
            lambda,
            big_value: DEFAULT_BIG,
        }
    }

    /// `fig1` with the side length that makes the `GLambda` bound tight.
    pub fn g_lambda(lambda: f64) -> Self {
        Self::fig1(g_lambda_p(lambda)).with_lambda(lambda)
    }

    /// `fig1` with `p = 1/√λ`.
    pub fn balanced_sqrt(lambda: f64) -> Self {
        Self::fig1(1.0 / lambda.sqrt()).with_lambda(lambda)
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_big(self, big_value: f64) -> Self {
        Self { big_value, ..self }
    }
}

fn g_lambda_p(lambda: f64) -> f64 {
    ((lambda * lambda - 2.0 * lambda + 5.0).sqrt() + lambda - 1.0) / (2.0 * lambda)
}

pub fn build_instance(spec: &CounterexampleSpec) -> Result<Instance> {
    let big = spec.big_value;
    if !(0.0..=1.0).contains(&spec.lambda) {
        return Err(Error::BadParameters(format!(
            "lambda {} outside [0, 1]",
            spec.lambda
        )));
    }
    if !(big.is_finite() && big > 0.0) {
        return Err(Error::BadParameters(format!(
            "big value {big} must be finite and positive"
        )));
    }
    match spec.name {
        CounterexampleKind::Fig1 => {
            let p = spec.p;
            if !(p > 1.0 && p.is_finite()) {
                return Err(Error::BadParameters(format!(
                    "p = {p} must be finite and above 1"
                )));
            }
            if p >= big {
                return Err(Error::BadParameters(format!(
                    "p = {p} is not below big value {big}"
                )));
            }
            let (a, b, c, d, e, f) = (0, 1, 2, 3, 4, 5);
            let edges = [
                (a, b, 1.0),
                (a, c, p),
                (b, c, p),
                (c, d, big),
                (d, e, p),
                (d, f, p),
                (e, f, 1.0),
            ];
            let m = complete_metric(&edges, 6, Some(big))?;
            Instance::weighted_agents_as_centers(m, 3, spec.lambda)
        }
        CounterexampleKind::FjrImpossibility => {
            let noncentroid =
                DistanceMatrix::from_fn(6, |i, j| if i / 2 == j / 2 { 0.0 } else { big })
                    .with_big_value(big);
            // agents a, c, e sit on center point 6; b, d, f on point 7
            let side = |p: usize| if p >= 6 { p - 6 } else { p % 2 };
            let centroid =
                DistanceMatrix::from_fn(8, |x, y| if side(x) == side(y) { 0.0 } else { big })
                    .with_big_value(big);
            Instance::dual(noncentroid, centroid, vec![6, 7], 3)
        }
        CounterexampleKind::Claim1Table => {
            const TABLE: [[f64; 3]; 3] = [[4.0, 1.0, 2.0], [2.0, 4.0, 1.0], [1.0, 2.0, 4.0]];
            let mut edges = Vec::new();
            for group in 0..2 {
                let base = 3 * group;
                for (r, row) in TABLE.iter().enumerate() {
                    for (s, &w) in row.iter().enumerate() {
                        edges.push((base + r, 6 + base + s, w));
                    }
                    for s in r + 1..3 {
                        edges.push((base + r, base + s, 3.0));
                    }
                }
            }
            let m = complete_metric(&edges, 12, Some(big))?;
            Instance::weighted(m, 6, (6..12).collect(), 3, spec.lambda)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Any,
    /// Every part has exactly `n/k` agents when `k` divides `n`.
    Balanced,
}

/// Every clustering of the agents into at most `k` parts, crossed with every
/// center assignment. Parts are listed in order of their smallest member.
pub fn enumerate_clusterings(inst: &Instance, constraint: Constraint) -> Result<ClusteringIter> {
    let n = inst.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLargeToEnumerate {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let k = inst.k().min(n);
    let part_size =
        (constraint == Constraint::Balanced && n.is_multiple_of(inst.k())).then(|| n / inst.k());
    let mut it = ClusteringIter {
        k,
        m: inst.m(),
        part_size,
        labels: vec![0; n],
        centers: Vec::new(),
        done: false,
    };
    if !it.labels_ok() && !it.next_partition() {
        it.done = true;
    }
    it.reset_centers();
    Ok(it)
}

#[derive(Debug, Clone)]
pub struct ClusteringIter {
    k: usize,
    m: usize,
    part_size: Option<usize>,
    /// Restricted growth string: `labels[i]` is the part of agent `i`.
    labels: Vec<usize>,
    centers: Vec<usize>,
    done: bool,
}

impl ClusteringIter {
    fn parts(&self) -> usize {
        self.labels.iter().max().map_or(0, |&l| l + 1)
    }

    fn labels_ok(&self) -> bool {
        match self.part_size {
            None => true,
            Some(size) => {
                let mut counts = vec![0; self.parts()];
                for &l in &self.labels {
                    counts[l] += 1;
                }
                counts.iter().all(|&c| c == size)
            }
        }
    }

    fn advance_labels(&mut self) -> bool {
        let n = self.labels.len();
        for i in (1..n).rev() {
            let prefix_max = self.labels[..i].iter().copied().max().unwrap_or(0);
            if self.labels[i] <= prefix_max && self.labels[i] + 1 < self.k {
                self.labels[i] += 1;
                self.labels[i + 1..].fill(0);
                return true;
            }
        }
        false
    }

    fn next_partition(&mut self) -> bool {
        while self.advance_labels() {
            if self.labels_ok() {
                return true;
            }
        }
        false
    }

    fn reset_centers(&mut self) {
        self.centers = vec![0; self.parts()];
    }

    fn advance_centers(&mut self) -> bool {
        for c in self.centers.iter_mut().rev() {
            *c += 1;
            if *c < self.m {
                return true;
            }
            *c = 0;
        }
        false
    }

    fn current(&self) -> Clustering {
        let mut groups = vec![Vec::new(); self.centers.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            groups[l].push(i);
        }
        Clustering::new(
            groups
                .into_iter()
                .zip(&self.centers)
                .map(|(members, &center)| Cluster { members, center })
                .collect(),
        )
    }
}

impl Iterator for ClusteringIter {
    type Item = Clustering;

    fn next(&mut self) -> Option<Clustering> {
        if self.done {
            return None;
        }
        let out = self.current();
        if !self.advance_centers() {
            if self.next_partition() {
                self.reset_centers();
            } else {
                self.done = true;
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// No clustering is close to the core for both pure losses at once.
    BobwCore,
    /// Same for FJR when the two losses use different metrics.
    FjrBobw,
    /// Weighted core lower bound `(√(λ²−2λ+5)−λ+1)/2`.
    GLambda,
    /// Weighted core lower bound `2(1−λ)/(2λ+1)`.
    CentroidRatio,
    /// Balanced clusterings cannot beat `1/√λ`.
    BalancedSqrt,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [
        Theorem::BobwCore,
        Theorem::FjrBobw,
        Theorem::GLambda,
        Theorem::CentroidRatio,
        Theorem::BalancedSqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::BobwCore => "bobw_core",
            Theorem::FjrBobw => "fjr_bobw",
            Theorem::GLambda => "g_lambda",
            Theorem::CentroidRatio => "centroid_ratio",
            Theorem::BalancedSqrt => "balanced_sqrt",
        }
    }

    fn family(self) -> CounterexampleKind {
        match self {
            Theorem::FjrBobw => CounterexampleKind::FjrImpossibility,
            Theorem::CentroidRatio => CounterexampleKind::Claim1Table,
            _ => CounterexampleKind::Fig1,
        }
    }

    /// The bound every clustering of `spec`'s instance must meet.
    pub fn threshold(self, spec: &CounterexampleSpec, inst: &Instance) -> f64 {
        let l = spec.lambda;
        match self {
            Theorem::BobwCore => spec.p,
            Theorem::FjrBobw => spec.big_value / (10.0 * largest_finite(inst).max(1.0)),
            Theorem::GLambda => ((l * l - 2.0 * l + 5.0).sqrt() - l + 1.0) / 2.0,
            Theorem::CentroidRatio => 2.0 * (1.0 - l) / (2.0 * l + 1.0),
            Theorem::BalancedSqrt => 1.0 / l.sqrt(),
        }
    }
}

fn largest_finite(inst: &Instance) -> f64 {
    match inst.metrics() {
        crate::instance::Metrics::Weighted { d, .. } => d.max_finite_entry(),
        crate::instance::Metrics::Dual {
            noncentroid,
            centroid,
        } => noncentroid
            .max_finite_entry()
            .max(centroid.max_finite_entry()),
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::BadParameters(format!("unknown theorem {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem: Theorem,
    pub spec: CounterexampleSpec,
    pub threshold: f64,
    pub clusterings_checked: usize,
    /// Smallest measured violation over all clusterings.
    pub min_value: f64,
    /// A clustering attaining `min_value`.
    pub tightest: Clustering,
}

/// Audits every clustering of the spec's instance and fails with the first
/// one whose violation falls below the theorem's bound.
pub fn verify_bound(spec: &CounterexampleSpec, theorem: Theorem) -> Result<Certificate> {
    if spec.name != theorem.family() {
        return Err(Error::BadParameters(format!(
            "{theorem} needs a {:?} instance, got {:?}",
            theorem.family(),
            spec.name
        )));
    }
    let expected_p = match theorem {
        Theorem::GLambda => Some(g_lambda_p(spec.lambda)),
        Theorem::BalancedSqrt => Some(1.0 / spec.lambda.sqrt()),
        _ => None,
    };
    if let Some(p) = expected_p {
        if spec.p.is_nan() || (spec.p - p).abs() > 1e-12 * p {
            return Err(Error::BadParameters(format!(
                "{theorem} at lambda {} needs p = {p}, got {}",
                spec.lambda, spec.p
            )));
        }
    }
    let inst = build_instance(spec)?;
    let threshold = theorem.threshold(spec, &inst);
    let tol = 1e-9 * threshold.max(1.0);
    let constraint = match theorem {
        Theorem::BalancedSqrt => Constraint::Balanced,
        _ => Constraint::Any,
    };
    let (criterion, models) = match theorem {
        Theorem::BobwCore => (
            Criterion::Core,
            vec![
                LossModel::centroid_only(&inst),
                LossModel::noncentroid_only(&inst),
            ],
        ),
        Theorem::FjrBobw => (
            Criterion::Fjr,
            vec![
                LossModel::centroid_only(&inst),
                LossModel::noncentroid_only(&inst),
            ],
        ),
        _ => (Criterion::Core, vec![LossModel::native(&inst)]),
    };

    let mut checked = 0;
    let mut tightest: Option<(f64, Clustering)> = None;
    for x in enumerate_clusterings(&inst, constraint)? {
        let mut value = f64::NEG_INFINITY;
        for model in &models {
            value = value.max(bruteforce_violation(&inst, model, &x, criterion)?.violation);
        }
        if value < threshold - tol {
            return Err(Error::TheoremFalsified {
                theorem: theorem.name().into(),
                value,
                threshold,
                clustering: Box::new(x),
            });
        }
        checked += 1;
        if tightest.as_ref().is_none_or(|(v, _)| value < *v) {
            tightest = Some((value, x));
        }
    }
    let (min_value, tightest) = tightest.expect("at least one clustering exists");
    Ok(Certificate {
        theorem,
        spec: *spec,
        threshold,
        clusterings_checked: checked,
        min_value,
        tightest,
    })
}
