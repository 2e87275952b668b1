//! Serve a small in-memory index over the /v1 API.
//!
//! cargo run -p scafnav-server --example serve_demo -- 8080
//! curl 'http://127.0.0.1:8080/v1/scaffold/c1ccccc1/successors'

use std::net::SocketAddr;

use scafnav_core::index::{BuildParams, IndexBuilder};

#[tokio::main]
async fn main() {
    let port: u16 = std::env::args().nth(1).and_then(|p| p.parse().ok()).unwrap_or(8080);
    let corpus = [
        "Cc1ccccc1",
        "C1CCCNCC1",
        "O=S(=O)(c1ccccc1)N1CCCCCC1",
        "c1ccc(COc2ccccc2)cc1",
        "c1ccc(-c2ccccc2)cc1",
        "CC1(C)SC2C(NC(=O)Cc3ccccc3)C(=O)N2C1C(=O)O",
    ];
    let mut b = IndexBuilder::new(BuildParams::default());
    for s in corpus {
        b.insert_molecule(s, None);
    }
    let idx = b.build();
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    println!("{} scaffolds, listening on http://{addr}/v1 (ctrl-c to stop)", idx.classes().len());
    if let Err(e) = scafnav_server::serve(idx, addr).await {
        eprintln!("serve_demo: {e}");
        std::process::exit(1);
    }
}
