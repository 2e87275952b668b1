//! One-step fragmentation against a reference scaffold-network package,
//! plus the order properties the fragments must witness.

use std::collections::BTreeSet;
use std::path::PathBuf;

use scafnav_core::fragment::{fragment_once, is_fragment_of, lower_cone};
use scafnav_core::molgraph::{parse_smiles, write_canonical};
use scafnav_core::scaffold_key;

fn rows() -> Vec<(String, Vec<String>)> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let text = std::fs::read_to_string(root.join("data/fragment_oracle.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut cols = l.split('\t');
            let s = cols.next().unwrap().to_string();
            let frags = cols
                .next()
                .unwrap_or("")
                .split_whitespace()
                .map(str::to_string)
                .collect();
            (s, frags)
        })
        .collect()
}

fn canon(s: &str) -> String {
    write_canonical(&parse_smiles(s).unwrap()).into_string()
}

#[test]
fn reference_fragment_agreement() {
    let rows = rows();
    let mut misses = Vec::new();
    for (s, frags) in &rows {
        let sc = scaffold_key(s).unwrap();
        let ours: BTreeSet<String> = fragment_once(&sc)
            .unwrap()
            .into_iter()
            .map(|f| f.key.into_string())
            .collect();
        let reference: BTreeSet<String> = frags.iter().map(|f| canon(f)).collect();
        if ours != reference {
            misses.push(format!("{s}\tours={ours:?}\treference={reference:?}"));
        }
    }
    let agree = rows.len() - misses.len();
    println!("fragment agreement: {agree}/{}", rows.len());
    for m in &misses {
        println!("  {m}");
    }
    assert!(agree * 100 >= rows.len() * 90, "{agree}/{}", rows.len());
}

#[test]
fn fragments_step_one_level_and_embed() {
    let mut edges = 0;
    for (s, _) in rows() {
        let sc = scaffold_key(&s).unwrap();
        let g = sc.graph().unwrap();
        for f in fragment_once(&sc).unwrap() {
            assert_eq!(f.ring_count + 1, sc.ring_count, "{s} -> {}", f.key);
            assert!(is_fragment_of(&f.graph().unwrap(), &g).unwrap(), "{s} -> {}", f.key);
            edges += 1;
        }
        for f in lower_cone(&sc).unwrap() {
            assert!(f.ring_count < sc.ring_count);
            assert!(f.ring_count >= 1);
        }
    }
    assert!(edges >= 300);
}
