//! Corpus statistics over a sealed index.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::index::{HypergraphIndex, ScaffoldSummary};

pub const DEFAULT_TAIL_CUTOFF: usize = 10;
pub const MAX_COVERAGE_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("need at least 3 histogram bins at or above the cutoff, found {0}")]
    InsufficientPoints(usize),
}

/// Number of observed classes of each size. Virtual scaffolds are not
/// classes of the corpus and are left out; `S_0` counts when it has
/// members.
pub fn class_size_histogram(idx: &HypergraphIndex) -> BTreeMap<usize, u64> {
    let mut hist = BTreeMap::new();
    for c in idx.classes().iter().filter(|c| !c.members.is_empty()) {
        *hist.entry(c.members.len()).or_insert(0) += 1;
    }
    hist
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveragePoint {
    pub classes_used: u64,
    pub molecules_covered: u64,
    pub fraction: f64,
}

/// Cumulative molecule coverage taking classes largest first (ties by
/// key), one point per class.
pub fn coverage_curve(idx: &HypergraphIndex) -> Vec<CoveragePoint> {
    let mut classes: Vec<_> = idx.classes().iter().filter(|c| !c.members.is_empty()).collect();
    classes.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then_with(|| a.scaffold.key.cmp(&b.scaffold.key))
    });
    accumulate(classes.iter().map(|c| c.members.len() as u64))
}

/// The coverage curve implied by a class-size histogram alone.
pub fn coverage_from_histogram(hist: &BTreeMap<usize, u64>) -> Vec<CoveragePoint> {
    accumulate(
        hist.iter()
            .rev()
            .flat_map(|(&size, &count)| std::iter::repeat_n(size as u64, count as usize)),
    )
}

fn accumulate(sizes: impl Iterator<Item = u64> + Clone) -> Vec<CoveragePoint> {
    let total: u64 = sizes.clone().sum();
    let mut covered = 0;
    sizes
        .enumerate()
        .map(|(i, s)| {
            covered += s;
            CoveragePoint {
                classes_used: i as u64 + 1,
                molecules_covered: covered,
                fraction: covered as f64 / total as f64,
            }
        })
        .collect()
}

/// At most `max_points` evenly spaced points, always keeping both ends.
pub fn downsample(curve: &[CoveragePoint], max_points: usize) -> Vec<CoveragePoint> {
    if curve.len() <= max_points || max_points < 2 {
        return curve.to_vec();
    }
    let last = curve.len() - 1;
    (0..max_points)
        .map(|k| curve[k * last / (max_points - 1)])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LevelCounts {
    /// Classes with at least one member.
    pub classes: u64,
    pub virtual_classes: u64,
    pub molecules: u64,
}

pub fn hierarchy_histogram(idx: &HypergraphIndex) -> BTreeMap<u32, LevelCounts> {
    let mut out: BTreeMap<u32, LevelCounts> = BTreeMap::new();
    for c in idx.classes() {
        let e = out.entry(c.scaffold.ring_count).or_default();
        if c.scaffold.is_virtual {
            e.virtual_classes += 1;
        } else {
            e.classes += 1;
            e.molecules += c.members.len() as u64;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    /// Out-degree histogram over all scaffolds of level 1 and up.
    pub hist: BTreeMap<usize, u64>,
    /// Highest out-degree scaffolds per level 1..=3.
    pub top_by_level: BTreeMap<u32, Vec<ScaffoldSummary>>,
    /// Seeded sample of minimal out-degree scaffolds per level 1..=3.
    pub min_degree_sample: BTreeMap<u32, Vec<ScaffoldSummary>>,
}

pub fn degree_distribution(idx: &HypergraphIndex, top_k: usize, seed: u64) -> DegreeReport {
    let mut hist = BTreeMap::new();
    for c in idx.classes().iter().filter(|c| c.scaffold.ring_count >= 1) {
        *hist.entry(idx.successor_ids(c.scaffold_id).len()).or_insert(0) += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut top_by_level = BTreeMap::new();
    let mut min_degree_sample = BTreeMap::new();
    for level in 1..=3u32 {
        let mut summaries: Vec<ScaffoldSummary> = idx
            .hierarchy(level)
            .iter()
            .map(|&id| idx.summary(id).expect("hierarchy ids are valid"))
            .collect();
        if summaries.is_empty() {
            continue;
        }
        summaries.sort_by(|a, b| b.out_degree.cmp(&a.out_degree).then_with(|| a.scaffold.cmp(&b.scaffold)));
        let min = summaries.last().map_or(0, |s| s.out_degree);
        let minimal: Vec<&ScaffoldSummary> = summaries.iter().filter(|s| s.out_degree == min).collect();
        let mut sample: Vec<ScaffoldSummary> = minimal.choose_multiple(&mut rng, top_k).map(|s| (*s).clone()).collect();
        sample.sort_by(|a, b| a.scaffold.cmp(&b.scaffold));
        summaries.truncate(top_k);
        top_by_level.insert(level, summaries);
        min_degree_sample.insert(level, sample);
    }
    DegreeReport {
        hist,
        top_by_level,
        min_degree_sample,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub cutoff: usize,
    pub points: usize,
}

/// Least-squares line through `(ln size, ln count)` for sizes at or above
/// `cutoff`.
pub fn fit_tail_slope(hist: &BTreeMap<usize, u64>, cutoff: usize) -> Result<TailFit, StatsError> {
    let pts: Vec<(f64, f64)> = hist
        .iter()
        .filter(|(&s, &c)| s >= cutoff && s > 0 && c > 0)
        .map(|(&s, &c)| ((s as f64).ln(), (c as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(StatsError::InsufficientPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - (intercept + slope * p.0)).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(TailFit {
        slope,
        intercept,
        r2,
        cutoff,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatsOptions {
    pub tail_cutoff: usize,
    pub top_k: usize,
    pub seed: u64,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            tail_cutoff: DEFAULT_TAIL_CUTOFF,
            top_k: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    pub molecules: u64,
    /// Classes with members.
    pub classes: u64,
    pub virtual_scaffolds: u64,
    pub scaffolds: u64,
    pub edges: u64,
    pub rejects: u64,
    /// classes / molecules.
    pub compression_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFitReport {
    pub slope: Option<f64>,
    pub r2: Option<f64>,
    pub cutoff: usize,
    pub points: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub totals: Totals,
    pub class_size_hist: BTreeMap<usize, u64>,
    pub coverage_curve: Vec<CoveragePoint>,
    pub hierarchy_hist: BTreeMap<u32, LevelCounts>,
    pub degree_hist: BTreeMap<usize, u64>,
    pub tail_fit: TailFitReport,
    pub top_scaffolds_by_level: BTreeMap<u32, Vec<ScaffoldSummary>>,
    pub min_degree_sample_by_level: BTreeMap<u32, Vec<ScaffoldSummary>>,
}

impl CorpusStats {
    pub fn compute(idx: &HypergraphIndex, opts: &StatsOptions) -> Self {
        let class_size_hist = class_size_histogram(idx);
        let classes: u64 = class_size_hist.values().sum();
        let molecules = idx.molecules().len() as u64;
        let degrees = degree_distribution(idx, opts.top_k, opts.seed);
        let tail_fit = match fit_tail_slope(&class_size_hist, opts.tail_cutoff) {
            Ok(f) => TailFitReport {
                slope: Some(f.slope),
                r2: Some(f.r2),
                cutoff: f.cutoff,
                points: f.points,
                error: None,
            },
            Err(e) => TailFitReport {
                slope: None,
                r2: None,
                cutoff: opts.tail_cutoff,
                points: match e {
                    StatsError::InsufficientPoints(n) => n,
                },
                error: Some(e.to_string()),
            },
        };
        let m = idx.manifest();
        CorpusStats {
            totals: Totals {
                molecules,
                classes,
                virtual_scaffolds: m.counts.virtual_scaffolds,
                scaffolds: m.counts.scaffolds,
                edges: m.counts.edges,
                rejects: m.counts.rejects,
                compression_ratio: if molecules == 0 { 0.0 } else { classes as f64 / molecules as f64 },
            },
            coverage_curve: downsample(&coverage_curve(idx), MAX_COVERAGE_POINTS),
            class_size_hist,
            hierarchy_hist: hierarchy_histogram(idx),
            degree_hist: degrees.hist,
            tail_fit,
            top_scaffolds_by_level: degrees.top_by_level,
            min_degree_sample_by_level: degrees.min_degree_sample,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }

    /// Flat `section<TAB>key<TAB>value...` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let t = &self.totals;
        for (k, v) in [
            ("molecules", t.molecules.to_string()),
            ("classes", t.classes.to_string()),
            ("virtual_scaffolds", t.virtual_scaffolds.to_string()),
            ("scaffolds", t.scaffolds.to_string()),
            ("edges", t.edges.to_string()),
            ("rejects", t.rejects.to_string()),
            ("compression_ratio", t.compression_ratio.to_string()),
        ] {
            let _ = writeln!(out, "totals\t{k}\t{v}");
        }
        for (size, count) in &self.class_size_hist {
            let _ = writeln!(out, "class_size\t{size}\t{count}");
        }
        for p in &self.coverage_curve {
            let _ = writeln!(out, "coverage\t{}\t{}\t{}", p.classes_used, p.molecules_covered, p.fraction);
        }
        for (level, c) in &self.hierarchy_hist {
            let _ = writeln!(out, "hierarchy\t{level}\t{}\t{}\t{}", c.classes, c.virtual_classes, c.molecules);
        }
        for (d, count) in &self.degree_hist {
            let _ = writeln!(out, "out_degree\t{d}\t{count}");
        }
        let f = &self.tail_fit;
        let opt = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
        let _ = writeln!(out, "tail_fit\t{}\t{}\t{}\t{}", opt(f.slope), opt(f.r2), f.cutoff, f.points);
        for (level, list) in &self.top_scaffolds_by_level {
            for s in list {
                let _ = writeln!(out, "top\t{level}\t{}\t{}", s.scaffold, s.out_degree);
            }
        }
        for (level, list) in &self.min_degree_sample_by_level {
            for s in list {
                let _ = writeln!(out, "min_degree\t{level}\t{}\t{}", s.scaffold, s.out_degree);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{BuildParams, IndexBuilder};

    fn build(smiles: &[&str]) -> HypergraphIndex {
        let mut b = IndexBuilder::new(BuildParams::default());
        for s in smiles {
            b.insert_molecule(s, None);
        }
        b.build()
    }

    #[test]
    fn ringless_corpus() {
        let idx = build(&["CCO", "CCCO", "CCCCO", "CC(C)O", "CCN"]);
        assert_eq!(class_size_histogram(&idx), BTreeMap::from([(5, 1)]));
        let curve = coverage_curve(&idx);
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0].fraction, 1.0);
        let h = hierarchy_histogram(&idx);
        assert_eq!(h[&0].classes, 1);
        assert_eq!(h[&0].molecules, 5);
    }

    #[test]
    fn unique_scaffolds_give_a_diagonal() {
        let idx = build(&["c1ccccc1", "c1ccncc1", "C1CCCCC1"]);
        assert_eq!(class_size_histogram(&idx), BTreeMap::from([(1, 3)]));
        let curve = coverage_curve(&idx);
        for (i, p) in curve.iter().enumerate() {
            assert_eq!(p.molecules_covered, i as u64 + 1);
        }
        assert_eq!(curve, coverage_from_histogram(&class_size_histogram(&idx)));
        let d = degree_distribution(&idx, 5, 1);
        assert_eq!(d.hist, BTreeMap::from([(0, 3)]));
    }

    #[test]
    fn biphenyl_ether_degrees() {
        let idx = build(&["c1ccc(COc2ccccc2)cc1"]);
        let d = degree_distribution(&idx, 5, 0);
        assert_eq!(d.hist, BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(d.top_by_level[&1][0].out_degree, 1);
        let total: usize = d.hist.iter().map(|(k, v)| k * *v as usize).sum();
        assert_eq!(total, idx.edges().len());
    }

    #[test]
    fn power_law_slope() {
        let hist: BTreeMap<usize, u64> = (10..=200).step_by(10).map(|s| (s, 0)).collect();
        let exact: BTreeMap<usize, u64> = [(1usize, 1_000_000u64), (10, 10_000), (100, 100), (1000, 1)].into();
        let fit = fit_tail_slope(&exact, 1).unwrap();
        assert!((fit.slope + 2.0).abs() <= 1e-9, "{}", fit.slope);
        assert!((fit.r2 - 1.0).abs() <= 1e-9);
        assert_eq!(fit_tail_slope(&hist, 10), Err(StatsError::InsufficientPoints(0)));
        let uniform: BTreeMap<usize, u64> = (10..20).map(|s| (s, 7)).collect();
        assert!(fit_tail_slope(&uniform, 10).unwrap().slope.abs() <= 1e-12);
    }

    #[test]
    fn downsampling_keeps_endpoints() {
        let curve: Vec<CoveragePoint> = (1..=5000)
            .map(|i| CoveragePoint {
                classes_used: i,
                molecules_covered: i,
                fraction: i as f64 / 5000.0,
            })
            .collect();
        let d = downsample(&curve, 1000);
        assert_eq!(d.len(), 1000);
        assert_eq!(d[0], curve[0]);
        assert_eq!(d[999], curve[4999]);
    }

    #[test]
    fn stats_json_is_deterministic() {
        let idx = build(&["c1ccc(COc2ccccc2)cc1", "Cc1ccccc1", "CCO"]);
        let a = CorpusStats::compute(&idx, &StatsOptions::default()).to_json();
        let b = CorpusStats::compute(&idx, &StatsOptions::default()).to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        for k in ["totals", "class_size_hist", "coverage_curve", "hierarchy_hist", "degree_hist", "tail_fit", "top_scaffolds_by_level"] {
            assert!(v.get(k).is_some(), "{k}");
        }
    }
}
