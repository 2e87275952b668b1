//! Parse SMILES, print the canonical form and a few random renderings
//! that canonicalize back to it.
//!
//! cargo run -p scafnav-core --example canonicalize -- 'OC(=O)c1ccccc1O'

use scafnav_core::molgraph::{parse_smiles, randomize_smiles, write_canonical};

fn main() {
    let input = std::env::args().nth(1).unwrap_or_else(|| "OC(=O)c1ccccc1OC(C)=O".to_string());
    let g = match parse_smiles(&input) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("{input}: {e}");
            std::process::exit(1);
        }
    };
    let canonical = write_canonical(&g);
    println!("input      {input}");
    println!("canonical  {canonical}");
    for seed in 0..4 {
        let r = randomize_smiles(&g, seed).expect("non-empty");
        let back = write_canonical(&parse_smiles(&r).expect("rendering parses"));
        println!("random {seed}   {r:<40} -> {}", if back == canonical { "same key" } else { "DIFFERENT" });
    }
}
