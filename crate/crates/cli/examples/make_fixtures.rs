//! Regenerates the synthetic CSVs under `fixtures/`.
//!
//!     cargo run -p fts-cli --example make_fixtures

use std::path::Path;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    for (name, text) in fts_cli::fixtures::bundled() {
        std::fs::write(dir.join(name), text)?;
        println!("wrote fixtures/{name}");
    }
    Ok(())
}
