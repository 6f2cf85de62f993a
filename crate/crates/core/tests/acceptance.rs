//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.
//!
//! `VEERKIT_CENSUS_FILE` names a census file for criteria 3 and 11; without
//! it the built-in signatures are used.

mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;
use veerkit::continent::{Continent, Which};
use veerkit::linkspace::{edge_colour, edges_of, grow_ball, Corner, LinkSpace};
use veerkit::order::{check_compatibility, check_deck_invariance, deck_loops, CuspName, OrderOracle};
use veerkit::report::{census_records, check_signature, roundtrip};
use veerkit::structure::Colour;
use veerkit::tracks::{
    arcs_strictly_nested, colours_in_every_window, crown_sequence, follow_branch_line, step_layers, steps_tile_layers,
    track_cusp,
};
use veerkit::{parse_taut_isosig, Veering};

const SEED: u64 = 20;

/// Continents built by the run, for the parallel-edge criterion.
#[derive(Default)]
struct Ledger {
    continents: usize,
    parallel: usize,
}

impl Ledger {
    fn note(&mut self, c: &Continent) {
        self.continents += 1;
        if !c.parallel_edges().is_empty() {
            self.parallel += 1;
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn veering(sig: &str) -> Arc<Veering> {
    Arc::new(Veering::from_sig(sig).expect("signature"))
}

fn user_census() -> Option<(String, Vec<String>)> {
    let path = std::env::var("VEERKIT_CENSUS_FILE").ok()?;
    let text = std::fs::read_to_string(&path).ok()?;
    Some((path, census_records(&text)))
}

fn figure_eight() -> Outcome {
    let Ok(r) = check_signature(FIG8) else { return ok(false, "parse failed") };
    let degrees = r.edges.iter().all(|e| e.degree == 6);
    let colours: BTreeSet<_> = r.edges.iter().filter_map(|e| e.colour).collect();
    let toggles = r.tet_kinds.len() == 2 && r.tet_kinds.iter().all(|k| k.is_toggle());
    let pass = r.passes() && r.tet_count == 2 && r.edges.len() == 2 && degrees && colours.len() == 2 && toggles;
    ok(pass, format!("tets {} edges {} degrees {:?} kinds {:?}", r.tet_count, r.edges.len(), r.edges.iter().map(|e| e.degree).collect::<Vec<_>>(), r.tet_kinds))
}

fn local_rule() -> Outcome {
    let mut tally = RuleTally::default();
    for tri in all_gluings(1, false) {
        for pi in pi_strings(1) {
            compare_rule(&tri, &pi, &mut tally);
        }
    }
    let mut kinds = BTreeSet::new();
    for tri in all_gluings(2, true) {
        for pi in pi_strings(2) {
            let before = tally.accepted;
            compare_rule(&tri, &pi, &mut tally);
            if tally.accepted > before {
                if let Ok(v) = Veering::new(tri.clone(), pi) {
                    kinds.extend(v.kinds().iter().map(|k| format!("{k:?}")));
                }
            }
        }
    }
    for sig in CENSUS {
        let (tri, pi) = parse_taut_isosig(sig).expect("census");
        compare_rule(&tri, &pi, &mut tally);
        kinds.extend(veering(sig).kinds().iter().map(|k| format!("{k:?}")));
    }
    let pass = tally.mismatches.is_empty() && kinds.len() == 4;
    ok(
        pass,
        format!(
            "{} configurations, {} taut, {} accepted, {} mismatches, kinds {}",
            tally.configurations,
            tally.taut,
            tally.accepted,
            tally.mismatches.len(),
            kinds.len()
        ),
    )
}

/// Channelises at random boundary faces. A face that survives a round must
/// have a strictly smaller river complexity afterwards.
fn channelise_rounds(sig: &str, rounds: usize, rng: &mut ChaCha8Rng, ledger: &mut Ledger) -> (usize, usize, Option<String>) {
    let mut c = Continent::initial(veering(sig), 0).expect("initial");
    let (mut survived, mut decreased) = (0, 0);
    for _ in 0..rounds {
        let w = if rng.gen_bool(0.5) { Which::Upper } else { Which::Lower };
        let faces: Vec<_> = c.boundary(w).iter().copied().collect();
        let slot = faces[rng.gen_range(0..faces.len())];
        let before = match c.maximal_river(w, slot).and_then(|r| r.complexity()) {
            Ok(x) => x,
            Err(e) => return (survived, decreased, Some(e.to_string())),
        };
        if let Err(e) = c.channelise(w, slot) {
            return (survived, decreased, Some(e.to_string()));
        }
        if c.side_of(slot) == Some(w) {
            survived += 1;
            match c.maximal_river(w, slot).and_then(|r| r.complexity()) {
                Ok(after) if after < before => decreased += 1,
                Ok(after) => return (survived, decreased, Some(format!("{after:?} not below {before:?}"))),
                Err(e) => return (survived, decreased, Some(e.to_string())),
            }
        }
    }
    ledger.note(&c);
    (survived, decreased, None)
}

fn channelisation(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut sigs = vec![FIG8.to_string()];
    let source = match user_census() {
        Some((path, recs)) => {
            sigs.extend(recs.into_iter().take(5));
            path
        }
        None => {
            sigs.extend(CENSUS[1..4].iter().map(|s| s.to_string()));
            "built-in".into()
        }
    };
    let mut total = (0, 0);
    for (i, sig) in sigs.iter().enumerate() {
        let rounds = if i == 0 { 200 } else { 50 };
        let (s, d, err) = channelise_rounds(sig, rounds, &mut rng, ledger);
        total.0 += s;
        total.1 += d;
        if let Some(e) = err {
            return ok(false, format!("{sig}: {e}"));
        }
    }
    ok(total.0 == total.1 && total.0 > 0, format!("{} signatures ({source}), {} surviving faces, all decreased", sigs.len(), total.0))
}

fn exhaustion(ledger: &mut Ledger, out: &mut Vec<Continent>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut max_tets = 0;
    for i in 0..50 {
        let sig = CENSUS[i % CENSUS.len()];
        let mut c = Continent::initial(veering(sig), 0).expect("initial");
        let len = rng.gen_range(1..=8);
        let path: Vec<usize> = (0..len).map(|_| rng.gen_range(0..4)).collect();
        if let Err(e) = c.grow_along(0, &path, 64) {
            return ok(false, format!("{sig} {path:?}: {e}"));
        }
        let sinks = [Which::Upper, Which::Lower].iter().map(|&w| c.landscape(w).sinks(w).len()).sum::<usize>();
        if !c.is_convex() || sinks > 0 || c.validate().is_err() {
            return ok(false, format!("{sig} {path:?}: not convex ({sinks} sinks)"));
        }
        max_tets = max_tets.max(c.tet_count());
        ledger.note(&c);
        out.push(c);
    }
    ok(true, format!("50 targets, convex, largest continent {max_tets} tetrahedra"))
}

fn layering(continents: &[Continent]) -> Outcome {
    let mut layers = 0;
    for (i, c) in continents.iter().enumerate() {
        let lay = match c.extract_layering() {
            Ok(l) => l,
            Err(e) => return ok(false, format!("continent {i}: {e}")),
        };
        if let Err(e) = check_layering(c, &lay) {
            return ok(false, format!("continent {i}: {e}"));
        }
        layers += lay.len();
    }
    ok(!continents.is_empty(), format!("{} continents, {layers} layers checked", continents.len()))
}

fn random_name(rng: &mut ChaCha8Rng, n: usize) -> CuspName {
    let k = rng.gen_range(0..=5);
    CuspName::new(rng.gen_range(0..n), rng.gen_range(0..4), (0..k).map(|_| rng.gen_range(0..4)).collect())
}

fn realisable(s: &dyn Fn(usize, usize, usize) -> i8) -> bool {
    let perms = [[0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1]];
    perms.iter().any(|p| {
        let pos = |x: usize| p.iter().position(|&y| y == x).expect("in perm");
        [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)].iter().all(|&(a, b, c)| {
            let want = if (pos(b) + 4 - pos(a)) % 4 < (pos(c) + 4 - pos(a)) % 4 { 1 } else { -1 };
            s(a, b, c) == want
        })
    })
}

fn circular_order(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let v = veering(FIG8);
    let Ok(mut o) = OrderOracle::new(v.clone(), 64) else { return ok(false, "oracle") };
    let run = |o: &mut OrderOracle, rng: &mut ChaCha8Rng| -> veerkit::Result<(usize, usize, usize, usize)> {
        let mut triples = 0;
        for _ in 0..1000 {
            let [a, b, c] = [0; 3].map(|_| random_name(rng, 2));
            let (x, y, z) = (o.cusp(&a)?, o.cusp(&b)?, o.cusp(&c)?);
            let s = o.sign(x, y, z);
            let distinct = x != y && y != z && x != z;
            if (s != 0) != distinct || o.sign(y, z, x) != s || o.sign(y, x, z) != -s {
                return Ok((triples, 0, 0, 0));
            }
            triples += 1;
        }
        let mut quads = 0;
        let mut tries = 0;
        while quads < 500 && tries < 5000 {
            tries += 1;
            let ids = [0; 4].map(|_| random_name(rng, 2));
            let ids: Vec<usize> = ids.iter().map(|n| o.cusp(n)).collect::<veerkit::Result<_>>()?;
            if (0..4).any(|i| (i + 1..4).any(|j| ids[i] == ids[j])) {
                continue;
            }
            let mut tbl = std::collections::HashMap::new();
            for (a, b, c) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
                tbl.insert((a, b, c), o.sign(ids[a], ids[b], ids[c]));
            }
            if !realisable(&|a, b, c| tbl[&(a, b, c)]) {
                return Ok((triples, quads, 0, 0));
            }
            quads += 1;
        }
        let stale = o.recheck_memo();
        Ok((triples, quads, stale, tries))
    };
    let (triples, quads, stale, _) = match run(&mut o, &mut rng) {
        Ok(x) => x,
        Err(e) => return ok(false, e.to_string()),
    };
    ledger.note(&o.c);

    let mut c = Continent::initial(v.clone(), 0).expect("initial");
    while c.tet_count() < 50 {
        let w = if rng.gen_bool(0.5) { Which::Upper } else { Which::Lower };
        let faces: Vec<_> = c.boundary(w).iter().copied().collect();
        let slot = faces[rng.gen_range(0..faces.len())];
        if let Err(e) = c.channelise(w, slot) {
            return ok(false, e.to_string());
        }
    }
    let compat = check_compatibility(&c);
    ledger.note(&c);

    let loops = match deck_loops(&mut o, 3, 6) {
        Ok(l) => l,
        Err(e) => return ok(false, e.to_string()),
    };
    let sample: Vec<_> = (0..100)
        .map(|_| {
            let [a, b, c] = [0; 3].map(|_| random_name(&mut rng, 2));
            (a, b, c)
        })
        .collect();
    let mut deck_ok = loops.len() == 3;
    let mut deck_checked = 0;
    for g in &loops {
        match check_deck_invariance(&mut o, g, &sample) {
            Ok(r) => {
                deck_ok &= r.passes();
                deck_checked += r.triples_checked;
            }
            Err(e) => return ok(false, e.to_string()),
        }
    }
    ledger.note(&o.c);
    let pass = triples == 1000 && quads == 500 && stale == 0 && compat.passes() && c.tet_count() >= 50 && deck_ok;
    ok(
        pass,
        format!(
            "{triples} triples, {quads} 4-tuples, {} faces on a {}-tet continent ({} bad), {} deck loops x 100 ({deck_checked} checked)",
            compat.faces_checked,
            c.tet_count(),
            compat.failures.len(),
            loops.len()
        ),
    )
}

fn branch_lines(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut snapshots = 0;
    for i in 0..20 {
        let sig = CENSUS[i % CENSUS.len()];
        let v = veering(sig);
        let window = v.max_edge_degree();
        let mut c = Continent::initial(v, 0).expect("initial");
        let which = if rng.gen_bool(0.5) { Which::Upper } else { Which::Lower };
        let faces: Vec<_> = c.boundary(which.other()).iter().copied().collect();
        let tc = track_cusp(&c, faces[rng.gen_range(0..faces.len())], which);
        let p = match follow_branch_line(&mut c, tc, 63, 64) {
            Ok(p) => p,
            Err(e) => return ok(false, format!("{sig}: {e}")),
        };
        let idx = veerkit::order::CoastIndex::new(&c.coast());
        if p.steps.len() != 64 || !arcs_strictly_nested(&idx, &p.arcs(&idx)) {
            return ok(false, format!("{sig}: arcs not strictly nested"));
        }
        if !colours_in_every_window(&p, window) {
            return ok(false, format!("{sig}: a window of {window} steps misses a colour"));
        }
        let lay = match c.extract_layering() {
            Ok(l) => l,
            Err(e) => return ok(false, e.to_string()),
        };
        let spans = step_layers(&c, &lay, &p);
        if !steps_tile_layers(&spans, p.which) {
            return ok(false, format!("{sig}: steps do not tile the layers"));
        }
        let visited: BTreeSet<usize> = spans.iter().flat_map(|&(a, b)| a..=b).collect();
        let seq = match crown_sequence(&c, &lay, p.cusp) {
            Ok(s) => s,
            Err(e) => return ok(false, e.to_string()),
        };
        // the fan at the cusp is constant between the recorded snapshots
        for k in &visited {
            let Some(s) = seq.iter().rev().find(|s| s.layer <= *k) else { continue };
            if !s.interleaves() || s.mismatches != 0 {
                return ok(false, format!("{sig}: crown at cusp {} layer {k} does not interleave", p.cusp));
            }
            snapshots += 1;
        }
        ledger.note(&c);
    }
    ok(true, format!("20 prefixes of 64 steps, {snapshots} (cusp, layer) crowns interleave"))
}

fn edge_rectangles(ledger: &mut Ledger) -> Outcome {
    let mut c = Continent::initial(veering(FIG8), 0).expect("initial");
    let tets = match grow_ball(&mut c, 4, 64) {
        Ok(t) => t,
        Err(e) => return ok(false, e.to_string()),
    };
    let edges = edges_of(&c, &tets);
    let mut ls = LinkSpace::new(c, 64);
    let mut certified = 0;
    let mut problems = Vec::new();
    for &e in &edges {
        match ls.edge_rectangle(e, 64) {
            Ok(r) => {
                let col = edge_colour(&ls.c, e);
                let corners = match col {
                    Some(Colour::Red) => [Corner::SW, Corner::NE],
                    _ => [Corner::SE, Corner::NW],
                };
                let placed = r.ideal_corners.len() == 2 && r.ideal_corners.iter().all(|(_, k)| corners.contains(k));
                if r.certified() && r.slope == col && placed {
                    certified += 1;
                } else if problems.len() < 3 {
                    problems.push(format!("{e:?}"));
                }
            }
            Err(err) => {
                if problems.len() < 3 {
                    problems.push(format!("{e:?}: {err}"));
                }
            }
        }
    }
    ledger.note(&ls.c);
    ok(
        certified == edges.len() && ls.orientation_conflicts == 0,
        format!(
            "{} tets, {certified}/{} edges certified, deepest line {} steps {}",
            tets.len(),
            edges.len(),
            ls.deepest(),
            problems.join(" ")
        ),
    )
}

fn round_trip() -> Outcome {
    match roundtrip(veering(FIG8), None, 64) {
        Ok(r) => ok(
            r.pass,
            format!(
                "radius {}, {} lifted, {} face pairs, {} -> {}",
                r.radius, r.reconstruction.lifted, r.reconstruction.pairs, r.reconstruction.input, r.reconstruction.signature
            ),
        ),
        Err(e) => ok(false, e.to_string()),
    }
}

fn census_batch() -> Outcome {
    let (source, records) = match user_census() {
        Some(x) => x,
        None => ("built-in signatures x 20".to_string(), (0..20).flat_map(|_| CENSUS.iter().map(|s| s.to_string())).collect()),
    };
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return ok(false, e.to_string()),
    };
    let path = dir.path().join("census.txt");
    if std::fs::write(&path, records.join("\n")).is_err() {
        return ok(false, "cannot write census file");
    }
    let out = match Command::new(env!("CARGO_BIN_EXE_veerkit")).args(["check", "--file"]).arg(&path).output() {
        Ok(o) => o,
        Err(e) => return ok(false, e.to_string()),
    };
    let text = String::from_utf8_lossy(&out.stdout);
    let Some(summary) = text.lines().last().and_then(|l| serde_json::from_str::<serde_json::Value>(l).ok()) else {
        return ok(false, "no summary");
    };
    let r = &summary["results"];
    let rate = r["records_per_second"].as_f64().unwrap_or(0.0);
    let passed = r["passed"].as_u64().unwrap_or(0) as usize;
    let pass = out.status.success() && passed == records.len() && rate >= 100.0;
    ok(pass, format!("{source}: {passed}/{} passed, {rate:.0} records/s", records.len()))
}

fn main() -> ExitCode {
    let mut ledger = Ledger::default();
    let mut continents = Vec::new();
    let mut all = true;
    let mut report = |n: usize, name: &str, limit: f64, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let pass = o.pass && secs < limit;
        all &= pass;
        println!(
            "{} {n:>2} {name}: {:.3} s (limit {limit} s) {}",
            if pass { "PASS" } else { "FAIL" },
            secs,
            o.detail
        );
    };
    report(1, "figure-eight check", 0.1, &mut figure_eight);
    report(2, "local rule against enumeration", 1.0, &mut local_rule);
    report(3, "channelisation decreases complexity", 5.0, &mut || channelisation(&mut ledger));
    report(4, "growth to 50 random targets", 10.0, &mut || exhaustion(&mut ledger, &mut continents));
    report(5, "layerings of grown continents", 10.0, &mut || layering(&continents));
    report(6, "circular order axioms and invariance", 30.0, &mut || circular_order(&mut ledger));
    report(7, "branch lines and crowns", 30.0, &mut || branch_lines(&mut ledger));
    report(8, "edge rectangles in a radius-4 ball", 60.0, &mut || edge_rectangles(&mut ledger));
    report(9, "round trip of the figure-eight", 120.0, &mut round_trip);
    let (n, bad) = (ledger.continents, ledger.parallel);
    report(10, "no parallel edges", f64::INFINITY, &mut || ok(n > 0 && bad == 0, format!("{n} continents, {bad} with parallel edges")));
    report(11, "census batch", f64::INFINITY, &mut census_batch);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
