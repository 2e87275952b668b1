//! Walk the fragmentation network below a scaffold, one ring at a time.
//!
//! cargo run -p scafnav-core --example fragment_network -- 'O=C(Cc1ccccc1)NC1C(=O)N2CCSC12'

use scafnav_core::fragment::{fragment_once, is_fragment_of, lower_cone, ring_systems};
use scafnav_core::scaffold_key;

fn main() {
    let input = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "c1ccc(Cc2ccc3ccccc3n2)cc1".to_string());
    let root = match scaffold_key(&input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{input}: {e}");
            std::process::exit(1);
        }
    };
    let g = root.graph().expect("keys reparse");
    println!("scaffold {} ({} rings)", root.key, root.ring_count);
    for (i, sys) in ring_systems(&g).iter().enumerate() {
        println!("  ring {i}: atoms {:?}, fused group {}", sys.atoms, sys.fused_group);
    }
    println!("immediate fragments:");
    for f in fragment_once(&root).expect("valid scaffold") {
        let witness = is_fragment_of(&f.graph().unwrap(), &g).unwrap_or(false);
        println!("  {:<40} embeds: {witness}", f.key);
    }
    println!("lower cone:");
    for f in lower_cone(&root).expect("valid scaffold") {
        println!("  [{}] {}", f.ring_count, f.key);
    }
}
