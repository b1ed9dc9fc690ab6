//! Prints the hierarchical GOP of one IRAP period next to its decode order.
//!
//! `cargo run --example gop_structure -- 16 64`

use ogop_sim::gop::{build_sequence, GopConfig, IrapMode};

fn main() -> ogop_sim::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u32>());
    let gop = args.next().transpose().ok().flatten().unwrap_or(8);
    let irap = args.next().transpose().ok().flatten().unwrap_or(32);

    let seq = build_sequence(
        GopConfig::aligned(gop, irap, IrapMode::OpenGop)?,
        1 + 2 * irap,
    )?;
    println!(
        "gop {gop}, irap {irap}: {} pictures in {} segments",
        seq.length,
        seq.segments.len()
    );
    println!(
        "{:>4} {:>6} {:>3} {:>5}  refs",
        "poc", "decode", "tid", "kind"
    );
    for p in seq.pictures.iter().take(irap as usize + 1) {
        println!(
            "{:>4} {:>6} {:>3} {:>5}  {:?}",
            p.poc,
            p.decode_idx,
            p.tid,
            p.kind.to_string(),
            p.refs
        );
    }
    for cra in seq.irap_pocs().into_iter().filter(|&p| p > 0) {
        println!("CRA {cra}: leading {:?}", seq.leading_pictures(cra));
    }
    println!(
        "pictures referencing across an IRAP: {:?}",
        seq.pictures_crossing_irap()
    );
    Ok(())
}
