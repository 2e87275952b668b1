//! Class-size histogram, coverage curve and tail fit for a .smi corpus.
//!
//! cargo run --release -p scafnav-core --example corpus_stats -- data/desk_10k.smi

use scafnav_core::ingest::{ingest_paths, IngestOptions};
use scafnav_core::stats::{CorpusStats, StatsOptions};

fn main() {
    let input = std::env::args().nth(1).unwrap_or_else(|| "data/desk_10k.smi".to_string());
    let (idx, _) = match ingest_paths(&[&input], IngestOptions::default()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let s = CorpusStats::compute(&idx, &StatsOptions { tail_cutoff: 2, ..Default::default() });
    let t = &s.totals;
    println!("{} molecules in {} classes (ratio {:.4}), {} virtual scaffolds", t.molecules, t.classes, t.compression_ratio, t.virtual_scaffolds);
    println!("class sizes:");
    for (size, n) in s.class_size_hist.iter().take(10) {
        println!("  {size:>5}: {n}");
    }
    for p in s.coverage_curve.iter().filter(|p| p.classes_used.is_power_of_two()) {
        println!("  top {:>5} classes cover {:.1}%", p.classes_used, p.fraction * 100.0);
    }
    match (s.tail_fit.slope, s.tail_fit.r2) {
        (Some(slope), Some(r2)) => println!("tail slope {slope:.3} (r2 {r2:.3}, {} bins)", s.tail_fit.points),
        _ => println!("tail fit: {}", s.tail_fit.error.unwrap_or_default()),
    }
}
