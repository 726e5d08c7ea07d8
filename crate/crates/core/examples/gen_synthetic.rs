//! Writes the bundled synthetic datasets: `cargo run --example gen_synthetic -- DIR`.

use std::path::PathBuf;

use rescaledexp::synthetic::{generate, Flavor, SyntheticConfig};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "tests/data".into()),
    );
    std::fs::create_dir_all(&dir)?;
    for flavor in Flavor::ALL {
        let path = dir.join(flavor.file_name());
        std::fs::write(&path, generate(&SyntheticConfig::bundled(flavor)))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
