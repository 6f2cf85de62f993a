#![allow(dead_code)]

use std::collections::BTreeSet;
use veerkit::continent::{rotate_to_min, Continent, Layering, Slot, Which};
use veerkit::perm::{edge_index, S4};
use veerkit::{Colour, Gluing, Triangulation};

pub const FIG8: &str = "cPcbbbiht_12";

/// Transverse veering signatures with two to five tetrahedra.
pub const CENSUS: &[&str] = &[
    "cPcbbbiht_12",
    "cPcbbbdxm_10",
    "dLQacccjsnk_200",
    "dLQbccchhfo_122",
    "dLQbccchhsj_122",
    "eLMkbcddddedde_2100",
    "eLMkbcdddhhhdu_1221",
    "eLMkbcdddhhhml_1221",
    "eLMkbcdddhhqqa_1220",
    "eLMkbcdddhhqxh_1220",
    "eLMkbcdddhxqdu_1200",
    "eLMkbcdddhxqlm_1200",
    "eLPkaccddjnkaj_2002",
    "eLPkbcdddhrrcv_1200",
];

pub const NOT_TAUT: &str = "fLLQcbcdeeemgopdp_21012";

/// All closed gluings of `n` tetrahedra. With `odd_only`, each gluing map is
/// an odd permutation, which reaches every orientable triangulation up to
/// relabelling the vertices of each tetrahedron.
pub fn all_gluings(n: usize, odd_only: bool) -> Vec<Triangulation> {
    let faces: Vec<(usize, usize)> = (0..n).flat_map(|t| (0..4).map(move |f| (t, f))).collect();
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    matchings(&faces, &mut vec![false; faces.len()], &mut pairs, &mut |ps| {
        let mut choice = vec![0usize; ps.len()];
        loop {
            let mut g: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; n];
            let mut ok = true;
            for (k, &((t, f), (u, h))) in ps.iter().enumerate() {
                let cands: Vec<_> = S4
                    .iter()
                    .copied()
                    .filter(|p| p.apply(f) == h && (!odd_only || p.sign() < 0))
                    .collect();
                let Some(&p) = cands.get(choice[k]) else {
                    ok = false;
                    break;
                };
                g[t][f] = Some(Gluing { tet: u, perm: p });
                g[u][h] = Some(Gluing { tet: t, perm: p.inverse() });
            }
            if ok {
                if let Ok(tri) = Triangulation::new(g) {
                    out.push(tri);
                }
            }
            let per = if odd_only { 3 } else { 6 };
            let mut i = 0;
            while i < choice.len() {
                choice[i] += 1;
                if choice[i] < per {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
        }
    });
    out
}

type FacePair = ((usize, usize), (usize, usize));

fn matchings(faces: &[(usize, usize)], used: &mut Vec<bool>, acc: &mut Vec<FacePair>, f: &mut impl FnMut(&[FacePair])) {
    let Some(i) = used.iter().position(|u| !u) else {
        f(acc);
        return;
    };
    used[i] = true;
    for j in i + 1..faces.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        acc.push((faces[i], faces[j]));
        matchings(faces, used, acc, f);
        acc.pop();
        used[j] = false;
    }
    used[i] = false;
}

pub fn pi_strings(n: usize) -> Vec<Vec<u8>> {
    (0..3usize.pow(n as u32))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = (k % 3) as u8;
                    k /= 3;
                    d
                })
                .collect()
        })
        .collect()
}

fn pi_model_edge(p: u8, a: usize, b: usize) -> bool {
    // the π-pair of digit p joins 0 to vertex p + 1
    let other = if a == 0 { b } else if b == 0 { a } else { 6 - a - b };
    other == p as usize + 1
}

/// Taut by counting: every edge class carries exactly two π model edges.
pub fn oracle_taut(tri: &Triangulation, pi: &[u8]) -> bool {
    (0..tri.edge_count()).all(|c| {
        tri.edge_members(c)
            .iter()
            .filter(|&&(t, e)| {
                let (a, b) = veerkit::perm::EDGE_VERTS[e];
                pi_model_edge(pi[t], a, b)
            })
            .count()
            == 2
    })
}

fn point(sign: i8, v: usize) -> [f64; 3] {
    let p = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]][v];
    [p[0], p[1], if sign < 0 { -p[2] } else { p[2] }]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Vertices of face `f` anticlockwise seen from outside an embedded model
/// tetrahedron, mirrored when `sign` is negative.
pub fn geometric_ccw(sign: i8, f: usize) -> [usize; 3] {
    let vs: Vec<usize> = (0..4).filter(|&v| v != f).collect();
    let (a, b, c) = (point(sign, vs[0]), point(sign, vs[1]), point(sign, vs[2]));
    let n = cross(sub(b, a), sub(c, a));
    if dot(n, sub(a, point(sign, f))) > 0.0 {
        [vs[0], vs[1], vs[2]]
    } else {
        [vs[0], vs[2], vs[1]]
    }
}

/// Orientation signs with tetrahedron 0 positive, by trying every
/// assignment: a glued face must be anticlockwise from outside on one side
/// and clockwise from outside on the other.
pub fn oracle_orientation(tri: &Triangulation) -> Option<Vec<i8>> {
    let n = tri.tet_count();
    'outer: for mask in 0..(1u32 << n.saturating_sub(1)) {
        let s: Vec<i8> = (0..n).map(|t| if t > 0 && mask >> (t - 1) & 1 == 1 { -1 } else { 1 }).collect();
        for t in 0..n {
            for f in 0..4 {
                let g = tri.gluing(t, f).expect("closed");
                let mine = geometric_ccw(s[t], f).map(|v| g.perm.apply(v));
                let theirs = geometric_ccw(s[g.tet], g.perm.apply(f));
                if cyclic_eq(mine, theirs) {
                    continue 'outer;
                }
            }
        }
        return Some(s);
    }
    None
}

fn cyclic_eq(a: [usize; 3], b: [usize; 3]) -> bool {
    (0..3).any(|r| (0..3).all(|i| a[(i + r) % 3] == b[i]))
}

/// Whether a colouring of edge classes meets the face rule in every face of
/// every tetrahedron.
pub fn satisfies_rule(tri: &Triangulation, pi: &[u8], orient: &[i8], colour: &[Colour]) -> bool {
    (0..tri.tet_count()).all(|t| {
        (0..4).all(|f| {
            let v = geometric_ccw(orient[t], f);
            let es = [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])];
            let Some(k) = es.iter().position(|&(a, b)| pi_model_edge(pi[t], a, b)) else {
                return false;
            };
            let c = |(a, b): (usize, usize)| colour[tri.edge_class(t, edge_index(a, b))];
            c(es[(k + 1) % 3]) == Colour::Red && c(es[(k + 2) % 3]) == Colour::Blue
        })
    })
}

/// Every colouring meeting the rule, by enumeration.
pub fn oracle_colourings(tri: &Triangulation, pi: &[u8], orient: &[i8]) -> Vec<Vec<Colour>> {
    let e = tri.edge_count();
    (0..1u64 << e)
        .map(|m| (0..e).map(|i| if m >> i & 1 == 1 { Colour::Blue } else { Colour::Red }).collect::<Vec<_>>())
        .filter(|c| satisfies_rule(tri, pi, orient, c))
        .collect()
}

/// Outcome of comparing the local-rule derivation with the enumeration.
#[derive(Default, Debug, Clone)]
pub struct RuleTally {
    pub configurations: usize,
    pub taut: usize,
    pub accepted: usize,
    pub mismatches: Vec<String>,
}

pub fn compare_rule(tri: &Triangulation, pi: &[u8], tally: &mut RuleTally) {
    use veerkit::structure::{check_taut, derive_veering_colours, orientation};
    tally.configurations += 1;
    let taut = oracle_taut(tri, pi);
    if taut != check_taut(tri, pi).passes() {
        tally.mismatches.push(format!("taut disagrees on {pi:?}"));
        return;
    }
    if !taut {
        return;
    }
    tally.taut += 1;
    let o = oracle_orientation(tri);
    if o != orientation(tri) {
        tally.mismatches.push(format!("orientation disagrees on {pi:?}"));
        return;
    }
    let Some(o) = o else { return };
    let good = oracle_colourings(tri, pi, &o);
    match derive_veering_colours(tri, pi, &o) {
        Ok(c) => {
            if good.len() != 1 || good[0] != c {
                tally.mismatches.push(format!("accepted {pi:?} with {} rule colourings", good.len()));
            } else {
                tally.accepted += 1;
            }
        }
        Err(_) => {
            if good.len() == 1 {
                tally.mismatches.push(format!("rejected {pi:?} with a unique rule colouring"));
            }
        }
    }
}

/// Independent layering check: every layer is a disk bounded by the coast,
/// and consecutive layers differ by the faces of exactly one tetrahedron.
pub fn check_layering(c: &Continent, lay: &Layering) -> Result<(), String> {
    let s = &c.s;
    let coast = rotate_to_min(&c.coast());
    let mut layers: Vec<BTreeSet<Slot>> = Vec::new();
    lay.for_each(s, |_, l| layers.push(l.clone()));
    if layers.len() != c.tet_count() + 1 {
        return Err(format!("{} layers for {} tetrahedra", layers.len(), c.tet_count()));
    }
    if layers[0] != *c.boundary(Which::Lower) || layers[layers.len() - 1] != *c.boundary(Which::Upper) {
        return Err("layering does not run from the lower to the upper landscape".into());
    }
    let mut used = BTreeSet::new();
    for (k, l) in layers.iter().enumerate() {
        let land = c.layer_landscape(l);
        land.validate_disk().map_err(|e| format!("layer {k}: {e}"))?;
        if land.boundary_cycle().map_err(|e| e.to_string())? != coast {
            return Err(format!("layer {k} does not span the coast"));
        }
    }
    for (k, w) in layers.windows(2).enumerate() {
        let gone: BTreeSet<Slot> = w[0].difference(&w[1]).copied().collect();
        let new: BTreeSet<Slot> = w[1].difference(&w[0]).copied().collect();
        let t = (0..c.tet_count())
            .find(|&t| {
                let (mut lo, mut up) = (BTreeSet::new(), BTreeSet::new());
                for f in 0..4 {
                    let slot = s.canon_face(t, f);
                    if s.v.is_upper_face(s.base(t), f) {
                        up.insert(slot);
                    } else {
                        lo.insert(slot);
                    }
                }
                lo == gone && up == new
            })
            .ok_or_else(|| format!("layers {k} and {} do not cobound one tetrahedron", k + 1))?;
        if !used.insert(t) {
            return Err(format!("tetrahedron {t} stacked twice"));
        }
    }
    Ok(())
}
