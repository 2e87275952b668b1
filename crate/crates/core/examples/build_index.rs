//! Ingest a .smi file, seal the index, save it and read it back.
//!
//! cargo run --release -p scafnav-core --example build_index -- data/desk_10k.smi /tmp/desk-index

use std::path::PathBuf;
use std::time::Instant;

use scafnav_core::index::{load_index, save_index};
use scafnav_core::ingest::{ingest_paths, IngestOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let input = PathBuf::from(args.next().unwrap_or_else(|| "data/desk_10k.smi".to_string()));
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("scafnav-example-index"));
    let (idx, report) = match ingest_paths(&[&input], IngestOptions::default()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    let m = save_index(&idx, &out).expect("save");
    println!("saved to {}: {:?}", out.display(), m.counts);
    let t = Instant::now();
    let back = load_index(&out).expect("load");
    println!(
        "reloaded {} molecules and {} scaffolds in {:.2} s",
        back.molecules().len(),
        back.classes().len(),
        t.elapsed().as_secs_f64()
    );
    for (level, ids) in back.levels().take(6) {
        println!("  H_{level}: {} scaffolds", ids.len());
    }
}
