//! Training pairs with SMILES augmentation, checked against the index.
//!
//! cargo run -p scafnav-core --example export_pairs

use scafnav_core::export::{export_pairs, verify_pairs, write_pairs, ExportOptions, PairKind};
use scafnav_core::index::{BuildParams, IndexBuilder};

fn main() {
    let mut b = IndexBuilder::new(BuildParams::default());
    for s in ["Cc1ccccc1", "O=S(=O)(c1ccccc1)N1CCCCCC1", "c1ccc(COc2ccccc2)cc1", "Cc1ccc2ccccc2c1"] {
        b.insert_molecule(s, None);
    }
    let idx = b.build();
    for kind in [PairKind::Scaffold, PairKind::Successor, PairKind::Predecessor] {
        let pairs = export_pairs(&idx, &ExportOptions::new(kind, 3, 7)).train;
        let report = verify_pairs(&idx, &pairs);
        println!("# {kind}: {} pairs, {} verified", pairs.len(), report.checked - report.failures.len());
        write_pairs(&pairs[..pairs.len().min(6)], std::io::stdout()).unwrap();
    }
}
