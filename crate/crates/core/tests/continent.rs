mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use veerkit::continent::{Continent, MouthKind, Slot, Which};
use veerkit::{Error, Veering};

fn fig8() -> Arc<Veering> {
    Arc::new(Veering::from_sig(FIG8).unwrap())
}

fn random_face(c: &Continent, rng: &mut ChaCha8Rng) -> (Which, Slot) {
    let w = if rng.gen_bool(0.5) { Which::Upper } else { Which::Lower };
    let faces: Vec<Slot> = c.boundary(w).iter().copied().collect();
    (w, faces[rng.gen_range(0..faces.len())])
}

#[test]
fn initial_continent_is_one_convex_tetrahedron() {
    for sig in CENSUS {
        let v = Arc::new(Veering::from_sig(sig).unwrap());
        for b in 0..v.tet_count() {
            let c = Continent::initial(v.clone(), b).unwrap();
            assert_eq!(c.tet_count(), 1);
            assert_eq!(c.coast().len(), 4);
            assert_eq!(c.boundary(Which::Upper).len(), 2);
            assert_eq!(c.boundary(Which::Lower).len(), 2);
            assert!(c.is_convex());
            c.validate().unwrap();
        }
    }
    assert!(matches!(Continent::initial(fig8(), 5), Err(Error::BadTetIndex(_))));
}

#[test]
fn convexify_respects_the_infill_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut c = Continent::initial(fig8(), 0).unwrap();
    for _ in 0..30 {
        let (w, slot) = random_face(&c, &mut rng);
        let r = c.maximal_river(w, slot).unwrap();
        assert_eq!(r.mouth_kind, MouthKind::Coastal, "convex continents only have coastal rivers");
        let n = c.tet_count();
        let count = c.channelise(w, slot).unwrap();
        assert!(count.upper <= count.upper_bound && count.lower <= count.lower_bound);
        assert_eq!(c.tet_count(), n + 1 + count.upper + count.lower);
        assert!(c.is_convex());
        for w in [Which::Upper, Which::Lower] {
            assert!(c.landscape(w).sinks(w).is_empty());
        }
        c.validate().unwrap();
    }
    assert!(c.coastal_landfills >= 30);
}

#[test]
fn channelisation_decreases_complexity() {
    for sig in &CENSUS[..5] {
        let v = Arc::new(Veering::from_sig(sig).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut c = Continent::initial(v, 0).unwrap();
        let mut survivors = 0;
        for _ in 0..40 {
            let (w, slot) = random_face(&c, &mut rng);
            let before = c.maximal_river(w, slot).unwrap().complexity().unwrap();
            c.channelise(w, slot).unwrap();
            if c.side_of(slot) == Some(w) {
                survivors += 1;
                let after = c.maximal_river(w, slot).unwrap().complexity().unwrap();
                assert!(after < before, "{sig}: {after:?} !< {before:?}");
            }
        }
        assert!(survivors > 0, "{sig}");
        assert!(c.parallel_edges().is_empty());
    }
}

#[test]
fn channelise_rejects_bad_faces() {
    let mut c = Continent::initial(fig8(), 0).unwrap();
    let up = *c.boundary(Which::Upper).iter().next().unwrap();
    assert!(matches!(c.channelise(Which::Lower, up), Err(Error::FaceNotOnBoundary)));
    assert!(matches!(c.maximal_river(Which::Lower, up), Err(Error::FaceNotOnBoundary)));
}

#[test]
fn forked_rivers_have_no_complexity() {
    let c = Continent::initial(fig8(), 0).unwrap();
    for w in [Which::Upper, Which::Lower] {
        for &slot in c.boundary(w) {
            let r = c.forked_river(w, slot).unwrap();
            if r.fork.is_some() {
                assert!(matches!(r.complexity(), Err(Error::ForkedRiverHasNoComplexity)));
            } else {
                assert_eq!(r.mouths().len(), 1);
            }
        }
    }
}

#[test]
fn grow_along_covers_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for sig in CENSUS {
        let v = Arc::new(Veering::from_sig(sig).unwrap());
        let mut c = Continent::initial(v.clone(), 0).unwrap();
        let path: Vec<usize> = (0..6).map(|_| rng.gen_range(0..4)).collect();
        let end = c.grow_along(0, &path, 64).unwrap();
        let mut cur = 0;
        for &f in &path {
            cur = c.s.neighbour(cur, f).expect("path is covered").0;
        }
        assert_eq!(cur, end);
        let mut b = 0;
        for &f in &path {
            b = v.tri.gluing(b, f).unwrap().tet;
        }
        assert_eq!(c.s.base(end), b, "{sig}");
        assert!(c.is_convex());
        c.validate().unwrap();
        assert!(c.parallel_edges().is_empty());
        check_layering(&c, &c.extract_layering().unwrap()).unwrap();
    }
}

#[test]
fn grow_along_reports_exhaustion_and_bad_input() {
    let mut c = Continent::initial(fig8(), 0).unwrap();
    assert!(matches!(c.grow_along(9, &[0], 64), Err(Error::BadTetIndex(9))));
    assert!(matches!(c.grow_along(0, &[4], 64), Err(Error::InvalidGluing(_))));
    let f = (0..4).find(|&f| c.s.link(0, f).is_none()).unwrap();
    assert!(matches!(c.grow_along(0, &[f, f ^ 1, f, f ^ 1, f], 0), Err(Error::DepthExhausted(_))));
}

#[test]
fn layering_of_grown_continents() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut c = Continent::initial(fig8(), 0).unwrap();
    for _ in 0..25 {
        let (w, slot) = random_face(&c, &mut rng);
        c.channelise(w, slot).unwrap();
    }
    let lay = c.extract_layering().unwrap();
    assert_eq!(lay.len(), c.tet_count() + 1);
    check_layering(&c, &lay).unwrap();
    let again = c.extract_layering().unwrap();
    assert_eq!(lay.order, again.order);
}

#[test]
fn dump_lists_every_tetrahedron() {
    let mut c = Continent::initial(fig8(), 0).unwrap();
    c.grow_along(0, &[0, 1, 2], 64).unwrap();
    let j = c.dump_json();
    assert_eq!(j["tets"].as_array().unwrap().len(), c.tet_count());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_growth_keeps_invariants(
        idx in 0..CENSUS.len(),
        path in proptest::collection::vec(0usize..4, 1..6),
    ) {
        let v = Arc::new(Veering::from_sig(CENSUS[idx]).unwrap());
        let mut c = Continent::initial(v, 0).unwrap();
        c.grow_along(0, &path, 64).unwrap();
        prop_assert!(c.is_convex());
        prop_assert!(c.validate().is_ok());
        prop_assert!(c.parallel_edges().is_empty());
        let lay = c.extract_layering().unwrap();
        prop_assert!(check_layering(&c, &lay).is_ok());
    }
}
