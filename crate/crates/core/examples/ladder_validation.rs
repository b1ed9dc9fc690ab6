//! Validates the bundled ladder and its seeded-fault twin.

use std::path::PathBuf;

use ogop_sim::constraints::validate_ladder;
use ogop_sim::io::load_ladder;

fn main() -> ogop_sim::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    for name in [
        "ladder.json",
        "ladder_faulty_dmvr.json",
        "ladder_2160_720.json",
    ] {
        let loaded = load_ladder(&data.join(name))?;
        let report = validate_ladder(&loaded.ladder);
        println!("== {name}");
        print!("{}", report.to_text());
    }
    Ok(())
}
