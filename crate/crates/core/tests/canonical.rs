//! Canonical form against independently produced renderings of the same
//! molecules.

use std::path::PathBuf;

use proptest::prelude::*;
use scafnav_core::molgraph::{parse_smiles, randomize_smiles, write_canonical, MolGraph};

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn external_renderings_share_one_key() {
    let text = data("rdkit_renderings.tsv");
    let mut rows = 0;
    let mut failures = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let cols: Vec<&str> = line.split('\t').collect();
        let key = write_canonical(&parse_smiles(cols[0]).unwrap());
        for r in &cols[1..] {
            let k = write_canonical(&parse_smiles(r).unwrap());
            if k != key {
                failures.push(format!("{} | {} -> {} vs {}", cols[0], r, k, key));
            }
        }
        rows += 1;
    }
    assert_eq!(rows, 300);
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn corpus_keys_are_fixpoints_and_survive_relabeling() {
    let text = data("desk_10k.smi");
    let mut checked = 0;
    for line in text.lines().filter(|l| !l.starts_with('#')).take(2000) {
        let smi = line.split('\t').next().unwrap();
        let Ok(g) = parse_smiles(smi) else { continue };
        let key = write_canonical(&g);
        let again = write_canonical(&parse_smiles(key.as_str()).unwrap());
        assert_eq!(again, key, "{smi}");
        let n = g.atom_count();
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
        if gcd(7, n) == 1 {
            assert_eq!(write_canonical(&g.permuted(&perm)), key, "{smi}");
        }
        checked += 1;
    }
    assert!(checked > 1900);
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn corpus_sample() -> Vec<MolGraph> {
    data("desk_10k.smi")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .step_by(50)
        .filter_map(|l| parse_smiles(l.split('\t').next()?).ok())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn randomized_rendering_round_trips(idx in 0usize..200, seed in any::<u64>()) {
        let graphs = corpus_sample();
        let g = &graphs[idx % graphs.len()];
        let key = write_canonical(g);
        let s = randomize_smiles(g, seed).unwrap();
        prop_assert_eq!(write_canonical(&parse_smiles(&s).unwrap()), key);
    }
}
