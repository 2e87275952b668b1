//! Maximum common substructure of two scaffolds.
//!
//! cargo run -p scafnav-core --example common_substructure -- 'c1ccc2ncccc2c1' 'c1ccc2occc2c1'

use scafnav_core::mcs::{intersection, DEFAULT_MCS_BUDGET};
use scafnav_core::scaffold_key;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (a, b) = match args.as_slice() {
        [a, b, ..] => (a.clone(), b.clone()),
        _ => ("c1ccc2ncccc2c1".to_string(), "O=S(=O)(c1ccccc1)N1CCCCCC1".to_string()),
    };
    let (s1, s2) = match (scaffold_key(&a), scaffold_key(&b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let r = intersection(&s1, &s2, DEFAULT_MCS_BUDGET).expect("keys reparse");
    println!("{}  ^  {}", s1.key, s2.key);
    println!("common     {}", r.smiles());
    println!("size       {} atoms, {} bonds", r.atom_count(), r.bond_count());
    println!("maps       {:?} / {:?}", r.atom_maps.0, r.atom_maps.1);
    println!("exhausted  {}", r.exhausted);
}
