//! Successors, cones, union and fragment-growing queries on a small
//! corpus.
//!
//! cargo run -p scafnav-core --example navigate

use scafnav_core::algebra::{fbdd_intersection, fbdd_search, union_scaffolds, upper_cone, ConeCaps};
use scafnav_core::index::{BuildParams, IndexBuilder};
use scafnav_core::scaffold_key;

fn main() {
    let corpus = [
        "Cc1ccccc1",
        "C1CCCNCC1",
        "O=S(=O)(c1ccccc1)N1CCCCCC1",
        "Cc1ccc(S(=O)(=O)N2CCCCCC2)cc1",
        "c1ccc(COc2ccccc2)cc1",
        "c1ccc(-c2ccccc2)cc1",
        "O=C(c1ccccc1)N1CCCCCC1",
    ];
    let mut b = IndexBuilder::new(BuildParams::default());
    for s in corpus {
        b.insert_molecule(s, None);
    }
    let idx = b.build();

    let benzene = scaffold_key("c1ccccc1").unwrap();
    let azepane = scaffold_key("C1CCCNCC1").unwrap();
    println!("successors of benzene:");
    for s in idx.successors(&benzene).unwrap() {
        println!("  {}", s.key);
    }
    let cone = upper_cone(&idx, &benzene, ConeCaps::default()).unwrap();
    println!("upper cone of benzene: {} scaffolds (truncated: {})", cone.members.len(), cone.truncated);
    println!("union(benzene, azepane):");
    for s in union_scaffolds(&idx, &benzene, &azepane).unwrap() {
        println!("  {}", s.key);
    }

    let hits: Vec<String> = ["Clc1ccccc1", "CN1CCCCCC1", "c1ccc(Oc2ccccc2)cc1"].map(String::from).to_vec();
    match fbdd_intersection(&idx, &hits, Some(&[0, 1]), ConeCaps::default()) {
        Ok(r) => {
            println!("scaffolds growing from hits 0 and 1:");
            for s in r.scaffolds {
                println!("  {}", s.key);
            }
        }
        Err(e) => println!("fbdd: {e}"),
    }
    match fbdd_search(&idx, &hits[..2], 1, ConeCaps::default()) {
        Ok(found) => {
            for r in found {
                println!("subset {:?}: {} scaffold(s)", r.subset, r.scaffolds.len());
            }
        }
        Err(e) => println!("fbdd search: {e}"),
    }
}
