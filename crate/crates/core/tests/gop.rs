use std::collections::BTreeMap;

use ogop_sim::gop::{
    build_decode_order, build_sequence, tid_of, validate_structure, GopConfig, IrapMode,
    PictureKind,
};

#[test]
fn gop8_tid_histogram() {
    let mut hist = BTreeMap::new();
    for o in 1..=8 {
        *hist.entry(tid_of(o, 8).unwrap()).or_insert(0) += 1;
    }
    assert_eq!(hist, BTreeMap::from([(0, 1), (1, 1), (2, 2), (3, 4)]));
}

#[test]
fn decode_order_topological_for_all_sizes() {
    for gop in [1u32, 2, 4, 8, 16, 32] {
        let order = build_decode_order(gop).unwrap();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(sorted, (1..=gop).collect::<Vec<_>>());
        for mode in [
            IrapMode::ClosedGop,
            IrapMode::OpenGop,
            IrapMode::ConstrainedOpenGop,
        ] {
            let irap = gop.max(32) * 2;
            let seq =
                build_sequence(GopConfig::aligned(gop, irap, mode).unwrap(), 1 + 3 * irap).unwrap();
            assert!(validate_structure(&seq).is_empty(), "gop {gop} {mode:?}");
            for p in &seq.pictures {
                for &r in &p.refs {
                    assert!(seq.pictures[r as usize].decode_idx < p.decode_idx);
                    assert!(seq.pictures[r as usize].tid <= p.tid);
                }
            }
        }
    }
}

#[test]
fn leading_count_is_gop_minus_one_on_grid() {
    for gop in [8u32, 16, 32] {
        for irap in [64u32, 128, 256] {
            let seq = build_sequence(
                GopConfig::aligned(gop, irap, IrapMode::OpenGop).unwrap(),
                1 + 3 * irap,
            )
            .unwrap();
            for cra in seq.irap_pocs().into_iter().filter(|&p| p > 0) {
                let lead = seq.leading_pictures(cra);
                assert_eq!(
                    lead.len() as u32,
                    gop - 1,
                    "gop {gop} irap {irap} cra {cra}"
                );
                assert!(lead
                    .iter()
                    .all(|&p| seq.pictures[p as usize].kind == PictureKind::Rasl));
                assert!(!lead.contains(&cra));
            }
            assert_eq!(seq.count_kind(PictureKind::Rasl) as u32, 3 * (gop - 1));
        }
    }
}

#[test]
fn open_and_closed_differ_only_in_irap_and_leading() {
    let open = build_sequence(GopConfig::aligned(16, 64, IrapMode::OpenGop).unwrap(), 129).unwrap();
    let closed = build_sequence(
        GopConfig::aligned(16, 64, IrapMode::ClosedGop).unwrap(),
        129,
    )
    .unwrap();
    assert_eq!(open.count_kind(PictureKind::Cra), 2);
    assert_eq!(closed.count_kind(PictureKind::Idr), 3);
    assert_eq!(closed.count_kind(PictureKind::Rasl), 0);
    assert_eq!(closed.count_kind(PictureKind::Radl), 30);
    for (o, c) in open.pictures.iter().zip(&closed.pictures) {
        assert_eq!(o.decode_idx, c.decode_idx);
        assert_eq!(o.tid, c.tid);
    }
    assert!(closed.pictures_crossing_irap().is_empty());
    assert!(!open.pictures_crossing_irap().is_empty());
}

#[test]
fn segments_partition_decode_order() {
    let seq = build_sequence(GopConfig::new(8, 64, IrapMode::OpenGop, 16).unwrap(), 129).unwrap();
    let flat: Vec<u32> = seq
        .segments
        .iter()
        .flat_map(|s| s.picture_pocs.clone())
        .collect();
    assert_eq!(flat, seq.decode_order());
    let irap_led = seq.segments.iter().filter(|s| s.starts_with_irap).count();
    assert_eq!(irap_led, 3);
    assert_eq!(seq.segments.len(), 9);
}

#[test]
fn invalid_configs() {
    assert!(GopConfig::aligned(12, 64, IrapMode::OpenGop)
        .unwrap_err()
        .to_string()
        .contains("power of two"));
    assert!(GopConfig::aligned(64, 128, IrapMode::OpenGop).is_err());
    assert!(GopConfig::aligned(8, 60, IrapMode::OpenGop).is_err());
    assert!(GopConfig::new(8, 64, IrapMode::OpenGop, 12).is_err());
    assert!(GopConfig::new(8, 64, IrapMode::OpenGop, 4).is_err());
}
