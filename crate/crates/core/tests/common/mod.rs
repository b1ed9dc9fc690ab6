#![allow(dead_code)]

use std::path::PathBuf;

use ogop_sim::constraints::{LevelTable, SpsModel, SwitchingMode};
use ogop_sim::gop::{GopConfig, IrapMode};
use ogop_sim::io::{load_ladder, read_rd_curve};
use ogop_sim::switching::{Ladder, Representation, RepresentationParams};

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn data(name: &str) -> PathBuf {
    crate_dir().join("data").join(name)
}

pub fn test_data(name: &str) -> PathBuf {
    crate_dir().join("tests").join("data").join(name)
}

pub fn schema(name: &str) -> serde_json::Value {
    let p = crate_dir().join("schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Asserts `instance` validates against the named schema.
pub fn assert_schema(name: &str, instance: &serde_json::Value) {
    let validator = jsonschema::validator_for(&schema(name)).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}");
}

/// The bundled 2160p/1080p/720p ladder, with its closed-GOP fallback.
pub fn bundled() -> Ladder {
    load_ladder(&data("ladder.json")).unwrap().ladder
}

/// Three representations on the given structure, using the bundled RD data.
pub fn ladder_with(gop: u32, irap: u32, mode: IrapMode, periods: u32) -> Ladder {
    let sps = SpsModel::switchable(3840, 2160, &LevelTable::default());
    let reps = [
        ("2160p", 3840, 2160),
        ("1080p", 1920, 1080),
        ("720p", 1280, 720),
    ]
    .into_iter()
    .map(|(id, w, h)| {
        Representation::encode(
            RepresentationParams {
                id: id.into(),
                width: w,
                height: h,
                scaling_window: None,
                gop: GopConfig::aligned(gop, irap, mode).unwrap(),
                length: 1 + irap * periods,
                rd_curve: read_rd_curve(&data(&format!("rd/{id}.csv"))).unwrap(),
                operating_point: 1,
                sps,
            },
            SwitchingMode::FullRpr,
        )
        .unwrap()
    })
    .collect();
    Ladder::new(reps, sps, 60.0, SwitchingMode::FullRpr).unwrap()
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_ogop-sim"))
}
