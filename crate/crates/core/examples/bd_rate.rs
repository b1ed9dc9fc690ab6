//! BD-rate of the constrained 720p encode against its closed-GOP twin.

use std::path::PathBuf;

use ogop_sim::io::read_rd_curve;
use ogop_sim::quality::BdRateTable;

fn main() -> ogop_sim::Result<()> {
    let rd = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/rd");
    let anchor = read_rd_curve(&rd.join("720p_closed.csv"))?;
    let test = read_rd_curve(&rd.join("720p.csv"))?;
    print!(
        "{}",
        BdRateTable::compute("constrained vs closed", &anchor, &test)?.to_text()
    );
    Ok(())
}
