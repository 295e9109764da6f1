use std::collections::HashSet;
use std::sync::Arc;
use std::thread;

use climbtrace_core::ingest::{ClimbTrace, GapFlag};
use climbtrace_core::store::{load_dir, ClimbRecord, ClimbStore, StoreError};
use climbtrace_core::videosync::{attach_video, VideoLink};
use proptest::prelude::*;
use tempfile::TempDir;

fn trace_from(seed: u64, len: usize) -> ClimbTrace {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let values = (0..len)
        .map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1);
            1.0 + ((x >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        })
        .collect();
    ClimbTrace::new(values, 1_554_000_000_000 + (seed % 7) as i64 * 1000, vec![]).unwrap()
}

#[derive(Debug, Clone)]
enum Op {
    Save(u64, usize),
    Import(u64, usize),
    Resave(usize),
    Delete(usize),
    Crop(usize, f64),
    Rename(usize, String),
    Attach(usize, i64),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0u64..12, 2usize..80).prop_map(|(s, n)| Op::Save(s, n)),
        (0u64..12, 2usize..80).prop_map(|(s, n)| Op::Import(s, n)),
        (0usize..8).prop_map(Op::Resave),
        (0usize..8).prop_map(Op::Delete),
        (0usize..8, 0.0f64..1.2).prop_map(|(i, f)| Op::Crop(i, f)),
        (0usize..8, "[a-z ]{0,12}").prop_map(|(i, t)| Op::Rename(i, t)),
        (0usize..8, -3000i64..3000).prop_map(|(i, o)| Op::Attach(i, o)),
    ]
}

fn pick(store: &ClimbStore, i: usize) -> Option<ClimbRecord> {
    let recs = store.records().unwrap();
    (!recs.is_empty()).then(|| recs[i % recs.len()].clone())
}

fn apply(store: &ClimbStore, op: &Op) {
    let outcome: Result<(), StoreError> = match op {
        Op::Save(s, n) => store.save(&ClimbRecord::new(trace_from(*s, *n), None)).map(|_| ()),
        Op::Import(s, n) => store
            .import_climb(&ClimbRecord::new(trace_from(*s, *n), Some("shared".into())).to_json())
            .map(|_| ()),
        Op::Resave(i) => match pick(store, *i) {
            Some(mut r) => {
                r.title.push('!');
                store.save(&r).map(|_| ())
            }
            None => Ok(()),
        },
        Op::Delete(i) => match pick(store, *i) {
            Some(r) => store.delete(r.id()),
            None => Ok(()),
        },
        Op::Crop(i, f) => match pick(store, *i) {
            Some(r) => store.crop(r.id(), f * r.trace().duration()).map(|_| ()),
            None => Ok(()),
        },
        Op::Rename(i, t) => match pick(store, *i) {
            Some(r) => store.rename(r.id(), t).map(|_| ()),
            None => Ok(()),
        },
        Op::Attach(i, o) => match pick(store, *i) {
            Some(r) => attach_video(store, r.id(), "clip.mp4", 30.0, Some(*o))
                .map(|_| ())
                .map_err(|e| panic!("{e}")),
            None => Ok(()),
        },
    };
    match outcome {
        Ok(()) | Err(StoreError::CutOutOfRange { .. }) | Err(StoreError::EmptyTitle) => {}
        Err(e) => panic!("{op:?}: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cache_tracks_disk(ops in prop::collection::vec(op(), 1..25)) {
        let dir = TempDir::new().unwrap();
        let store = ClimbStore::open(dir.path()).unwrap();
        for op in &ops {
            apply(&store, op);
            let cached = store.records().unwrap();
            let on_disk = load_dir(dir.path()).unwrap();
            prop_assert!(on_disk.skipped.is_empty());
            prop_assert_eq!(&cached, &on_disk.records);
            let ids: HashSet<&str> = cached.iter().map(|r| r.id()).collect();
            prop_assert_eq!(ids.len(), cached.len());
        }
    }

    #[test]
    fn json_round_trip(
        vals in prop::collection::vec(0.0f64..16.0, 1..200),
        epoch in -10_000_000_000_000i64..10_000_000_000_000,
        title in ".{1,20}",
        video in prop::option::of((-100_000i64..100_000, 1.0f64..240.0)),
        crops in 0u32..5,
    ) {
        let duration = (vals.len() - 1) as f64 / 20.0;
        let gaps = if duration > 0.0 { vec![GapFlag(0.0, duration / 2.0)] } else { vec![] };
        let mut rec = ClimbRecord::new(ClimbTrace::new(vals, epoch, gaps).unwrap(), Some(title));
        rec.video = video.map(|(offset_ms, fps)| VideoLink { filename: "a b.mp4".into(), offset_ms, fps });
        rec.crop_history = crops;
        let back = ClimbRecord::from_json(&rec.to_json()).unwrap();
        for (a, b) in back.trace().values().iter().zip(rec.trace().values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(back, rec);
    }
}

#[test]
fn export_import_across_stores_preserves_fields() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let src = ClimbStore::open(a.path()).unwrap();
    let dst = ClimbStore::open(b.path()).unwrap();
    let rec = ClimbRecord::new(trace_from(3, 120), Some("yellow v1 route".into()));
    src.save(&rec).unwrap();
    let rec = attach_video(&src, rec.id(), "VID_1553999998000.mp4", 29.97, None).unwrap();
    assert_eq!(rec.video.as_ref().unwrap().offset_ms, 1_554_000_000_000 + 3000 - 1_553_999_998_000);
    let bytes = src.export_climb(rec.id()).unwrap();
    let imported = dst.import_climb(&bytes).unwrap();
    assert_eq!(imported, rec);
    assert_eq!(ClimbStore::open(b.path()).unwrap().get(rec.id()).unwrap(), rec);
    let _: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
}

#[test]
fn concurrent_crop_and_rename_are_linearizable() {
    for round in 0..20 {
        let dir = TempDir::new().unwrap();
        let store = Arc::new(ClimbStore::open(dir.path()).unwrap());
        let rec = ClimbRecord::new(trace_from(round, 201), Some("start".into()));
        store.save(&rec).unwrap();
        let id = rec.id().to_string();

        let s1 = Arc::clone(&store);
        let id1 = id.clone();
        let cropper = thread::spawn(move || s1.crop(&id1, 6.0));
        let s2 = Arc::clone(&store);
        let renamer = thread::spawn(move || s2.rename(&id, "renamed"));
        let cropped = cropper.join().unwrap().unwrap();
        let renamed = renamer.join().unwrap();

        let recs = store.records().unwrap();
        assert_eq!(recs.len(), 1);
        let final_rec = &recs[0];
        assert_eq!(final_rec.trace().len(), 121);
        assert_eq!(final_rec.id(), cropped.id());
        match renamed {
            // rename ran first; crop carried the new title forward
            Ok(_) => assert_eq!(final_rec.title, "renamed"),
            // crop ran first; the old id no longer exists
            Err(StoreError::UnknownClimb(_)) => assert_eq!(final_rec.title, "start"),
            Err(e) => panic!("{e}"),
        }
        assert_eq!(load_dir(dir.path()).unwrap().records, recs);
    }
}

#[test]
fn readers_see_consistent_snapshots_during_writes() {
    let dir = TempDir::new().unwrap();
    let store = Arc::new(ClimbStore::open(dir.path()).unwrap());
    let writer = {
        let store = Arc::clone(&store);
        thread::spawn(move || {
            for s in 0..40 {
                store.save(&ClimbRecord::new(trace_from(s, 30), None)).unwrap();
            }
        })
    };
    let readers: Vec<_> = (0..4)
        .map(|_| {
            let store = Arc::clone(&store);
            thread::spawn(move || {
                for _ in 0..200 {
                    let recs = store.records().unwrap();
                    let ids: HashSet<&str> = recs.iter().map(|r| r.id()).collect();
                    assert_eq!(ids.len(), recs.len());
                }
            })
        })
        .collect();
    writer.join().unwrap();
    for r in readers {
        r.join().unwrap();
    }
}

#[test]
fn duplicate_files_collapse_and_delete_removes_all() {
    let dir = TempDir::new().unwrap();
    let store = ClimbStore::open(dir.path()).unwrap();
    let rec = ClimbRecord::new(trace_from(1, 40), None);
    store.save(&rec).unwrap();
    std::fs::write(dir.path().join("shared-copy.json"), rec.to_json()).unwrap();
    let report = store.load_all().unwrap();
    assert_eq!(report.records.len(), 1);
    store.delete(rec.id()).unwrap();
    assert!(load_dir(dir.path()).unwrap().records.is_empty());
}
