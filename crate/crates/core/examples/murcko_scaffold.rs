//! Project molecules onto their ring frameworks.
//!
//! cargo run -p scafnav-core --example murcko_scaffold -- 'CC(=O)Nc1ccc(O)cc1'

use scafnav_core::scaffold::hierarchy_level;
use scafnav_core::scaffold_key;

fn main() {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = [
            "CC(=O)Nc1ccc(O)cc1",
            "CC1(C)S[C@@H]2[C@H](NC(=O)Cc3ccccc3)C(=O)N2[C@H]1C(=O)O",
            "O=C(O)c1ccccc1-c1ccccc1C=O",
            "CCCCO",
        ]
        .map(String::from)
        .to_vec();
    }
    for s in &inputs {
        match scaffold_key(s) {
            Ok(sc) => {
                let shown = if sc.is_empty() { "(S_0, no rings)" } else { sc.key.as_str() };
                println!("{s}\n  -> {shown}  level {}", hierarchy_level(&sc));
            }
            Err(e) => println!("{s}\n  -> error: {e}"),
        }
    }
}
