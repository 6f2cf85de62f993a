//! Train tracks on landscapes, branch lines, crowns and cusp train rays.

use crate::continent::{Continent, EdgeClass, LFace, Landscape, Layering, Slot, Which};
use crate::cover::{CuspId, EdgeKey, TetId};
use crate::error::{Error, Result};
use crate::order::CoastIndex;
use crate::structure::Colour;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// The track-cusp of one of the two tracks in a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TrackCusp {
    pub face: Slot,
    pub which: Which,
    /// The corner the track-cusp sits at.
    pub cusp: CuspId,
    /// The edge it points at.
    pub edge: EdgeKey,
}

pub fn track_cusp(c: &Continent, face: Slot, which: Which) -> TrackCusp {
    let lf = LFace::new(&c.s, face);
    let k = lf.pointed_corner(which);
    TrackCusp { face, which, cusp: lf.cusps[k], edge: lf.edge(k) }
}

/// Colour of the edge opposite corner `i` of a face.
pub fn face_edge_colour(c: &Continent, lf: &LFace, i: usize) -> Colour {
    let (t, a, b) = lf.model_edge(i);
    c.s.v.colour_of(c.s.base(t), a, b)
}

/// A track on a landscape: the pointed edge of every face and the switch
/// type of every interior edge.
#[derive(Clone, Debug)]
pub struct Track {
    pub which: Which,
    pub pointed: Vec<EdgeKey>,
    pub classes: BTreeMap<EdgeKey, EdgeClass>,
}

pub fn track(l: &Landscape, which: Which) -> Track {
    Track {
        which,
        pointed: l.faces.iter().map(|f| f.pointed(which)).collect(),
        classes: l.edges.keys().filter_map(|&e| l.classify(e, which).map(|k| (e, k))).collect(),
    }
}

pub fn upper_track(l: &Landscape) -> Track {
    track(l, Which::Upper)
}

pub fn lower_track(l: &Landscape) -> Track {
    track(l, Which::Lower)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BranchStep {
    pub face: Slot,
    pub edge: EdgeKey,
    pub colour: Colour,
}

/// A finite piece of a branch line: track-cusps at one cusp, each the one
/// immediately above (or below, for lower lines) the previous.
#[derive(Clone, Debug, Serialize)]
pub struct BranchLinePrefix {
    pub cusp: CuspId,
    pub which: Which,
    pub steps: Vec<BranchStep>,
}

impl BranchLinePrefix {
    pub fn start(&self) -> TrackCusp {
        let s = self.steps[0];
        TrackCusp { face: s.face, which: self.which, cusp: self.cusp, edge: s.edge }
    }

    pub fn edges(&self) -> Vec<EdgeKey> {
        self.steps.iter().map(|s| s.edge).collect()
    }

    /// Arcs cut off by the pointed edges on the side away from the cusp.
    pub fn arcs(&self, idx: &CoastIndex) -> Vec<(CuspId, CuspId)> {
        self.steps.iter().map(|s| arc_away(idx, s.edge, self.cusp)).collect()
    }
}

/// The anticlockwise arc `(start, end)` between the endpoints of `e` on the
/// side not containing `c`.
pub fn arc_away(idx: &CoastIndex, e: EdgeKey, c: CuspId) -> (CuspId, CuspId) {
    let (a, b) = e;
    if idx.sign(a, c, b) == 1 {
        (b, a)
    } else {
        (a, b)
    }
}

/// The tetrahedron beyond `face` on side `which`, growing the continent if
/// needed, with the local index of the face in it.
fn beyond(c: &mut Continent, (t, f): Slot, which: Which, cap: usize) -> Result<(TetId, usize)> {
    let upper = c.s.v.is_upper_face(c.s.base(t), f);
    if upper != (which == Which::Upper) {
        return Ok((t, f));
    }
    if c.s.link(t, f).is_none() {
        c.grow_along(t, &[f], cap)?;
    }
    Ok(c.s.neighbour(t, f).expect("covered"))
}

/// Follows the branch line through `start` for `n` steps, upward for upper
/// track-cusps and downward for lower ones.
pub fn follow_branch_line(c: &mut Continent, start: TrackCusp, n: usize, cap: usize) -> Result<BranchLinePrefix> {
    let lf = LFace::new(&c.s, start.face);
    let colour = face_edge_colour(c, &lf, lf.pointed_corner(start.which));
    let mut p = BranchLinePrefix {
        cusp: start.cusp,
        which: start.which,
        steps: vec![BranchStep { face: start.face, edge: start.edge, colour }],
    };
    extend_branch_line(c, &mut p, n, cap)?;
    Ok(p)
}

/// Extends a prefix until it has `n` steps past its start.
pub fn extend_branch_line(c: &mut Continent, p: &mut BranchLinePrefix, n: usize, cap: usize) -> Result<()> {
    let which = p.which;
    let cusp = p.cusp;
    while p.steps.len() <= n {
        let cur = p.steps[p.steps.len() - 1].face;
        let (x, _) = beyond(c, cur, which, cap)?;
        let b = c.s.base(x);
        let mut next = None;
        for h in 0..4 {
            let far = c.s.v.is_upper_face(b, h) == (which == Which::Upper);
            if !far {
                continue;
            }
            let lf = LFace::new(&c.s, (x, h));
            if lf.cusps[lf.pointed_corner(which)] == cusp {
                if next.is_some() {
                    return Err(Error::Internal("two track-cusps of one branch line in a tetrahedron".into()));
                }
                next = Some(lf);
            }
        }
        let lf = next.ok_or_else(|| Error::Internal("branch line stops".into()))?;
        let colour = face_edge_colour(c, &lf, lf.pointed_corner(which));
        p.steps.push(BranchStep { face: lf.slot, edge: lf.pointed(which), colour });
    }
    Ok(())
}

/// Layer ranges of the steps of a prefix. Each layer meeting the prefix
/// should meet it in exactly one step, and these layers should be
/// consecutive.
pub fn step_layers(c: &Continent, lay: &Layering, p: &BranchLinePrefix) -> Vec<(usize, usize)> {
    p.steps.iter().map(|s| lay.face_span(&c.s, s.face)).collect()
}

pub fn steps_tile_layers(spans: &[(usize, usize)], which: Which) -> bool {
    let mut v = spans.to_vec();
    if which == Which::Lower {
        v.reverse();
    }
    v.iter().all(|(a, b)| a <= b) && v.windows(2).all(|w| w[1].0 == w[0].1 + 1)
}

/// Crown data at one cusp of one layer.
#[derive(Clone, Debug, Serialize)]
pub struct CrownSnapshot {
    pub cusp: CuspId,
    pub layer: usize,
    /// Edges at the cusp anticlockwise, as far endpoint and colour.
    pub edges: Vec<(CuspId, Colour)>,
    /// Tips in the same order: the face and which track-cusp sits at the cusp.
    pub tips: Vec<(Which, Slot)>,
    /// Faces at the cusp whose track-cusp position disagrees with the
    /// colour rule.
    pub mismatches: usize,
    pub closed: bool,
}

impl CrownSnapshot {
    pub fn interleaves(&self) -> bool {
        let ok_pairs = self.tips.windows(2).all(|w| w[0].0 != w[1].0);
        let wrap = !self.closed || self.tips.len() < 2 || self.tips[0].0 != self.tips[self.tips.len() - 1].0;
        ok_pairs && wrap
    }

    pub fn counts(&self) -> (usize, usize) {
        let u = self.tips.iter().filter(|t| t.0 == Which::Upper).count();
        (u, self.tips.len() - u)
    }
}

/// Orders the faces at `cusp` anticlockwise. The flag is set when the fan
/// closes up around the cusp.
pub fn fan_order(faces: &[LFace], cusp: CuspId) -> Result<(Vec<usize>, bool)> {
    // face keyed by its first edge at the cusp, anticlockwise
    let mut by_first: BTreeMap<CuspId, (usize, CuspId)> = BTreeMap::new();
    let mut seconds = BTreeSet::new();
    for (i, lf) in faces.iter().enumerate() {
        let k = lf.corner_of(cusp).ok_or_else(|| Error::Internal("face misses the cusp".into()))?;
        let (x, y) = (lf.cusps[(k + 1) % 3], lf.cusps[(k + 2) % 3]);
        if by_first.insert(x, (i, y)).is_some() {
            return Err(Error::Internal("fan at a cusp is pinched".into()));
        }
        seconds.insert(y);
    }
    let starts: Vec<CuspId> = by_first.keys().copied().filter(|x| !seconds.contains(x)).collect();
    let (start, closed) = match starts.len() {
        0 => (*by_first.keys().next().ok_or_else(|| Error::Internal("empty fan".into()))?, true),
        1 => (starts[0], false),
        _ => return Err(Error::Internal("fan at a cusp is disconnected".into())),
    };
    let mut order = Vec::new();
    let mut cur = start;
    while let Some(&(i, y)) = by_first.get(&cur) {
        order.push(i);
        cur = y;
        if cur == start || order.len() > faces.len() {
            break;
        }
    }
    if order.len() != faces.len() {
        return Err(Error::Internal("fan at a cusp is disconnected".into()));
    }
    Ok((order, closed))
}

/// Walks the faces at `cusp` anticlockwise. A red then blue pair of edges
/// emits an upper tip, blue then red a lower tip.
pub fn crown_from_faces(c: &Continent, cusp: CuspId, layer: usize, faces: &[LFace]) -> Result<CrownSnapshot> {
    let (order, closed) = fan_order(faces, cusp)?;
    let mut edges = Vec::new();
    let mut tips = Vec::new();
    let mut mismatches = 0;
    for (j, &i) in order.iter().enumerate() {
        let lf = &faces[i];
        let k = lf.corner_of(cusp).expect("corner");
        // edge to cusps[k+1] is opposite corner k+2
        let first = face_edge_colour(c, lf, (k + 2) % 3);
        let second = face_edge_colour(c, lf, (k + 1) % 3);
        if j == 0 {
            edges.push((lf.cusps[(k + 1) % 3], first));
        }
        edges.push((lf.cusps[(k + 2) % 3], second));
        let emitted = match (first, second) {
            (Colour::Red, Colour::Blue) => Some(Which::Upper),
            (Colour::Blue, Colour::Red) => Some(Which::Lower),
            _ => None,
        };
        let actual_u = lf.upper_pt == k;
        let actual_l = lf.lower_pt == k;
        if actual_u != (emitted == Some(Which::Upper)) || actual_l != (emitted == Some(Which::Lower)) {
            mismatches += 1;
        }
        if let Some(w) = emitted {
            tips.push((w, lf.slot));
        }
    }
    if closed {
        edges.pop();
    }
    Ok(CrownSnapshot { cusp, layer, edges, tips, mismatches, closed })
}

pub fn crown_snapshot(c: &Continent, layer: &BTreeSet<Slot>, k: usize, cusp: CuspId) -> Result<CrownSnapshot> {
    let faces: Vec<LFace> =
        layer.iter().map(|&s| LFace::new(&c.s, s)).filter(|lf| lf.corner_of(cusp).is_some()).collect();
    crown_from_faces(c, cusp, k, &faces)
}

/// Crown snapshots at `cusp` for every layer where its fan changes.
pub fn crown_sequence(c: &Continent, lay: &Layering, cusp: CuspId) -> Result<Vec<CrownSnapshot>> {
    let s = &c.s;
    let mut fan: BTreeSet<Slot> = lay
        .bottom
        .iter()
        .copied()
        .filter(|&sl| LFace::new(s, sl).corner_of(cusp).is_some())
        .collect();
    let snap = |fan: &BTreeSet<Slot>, k: usize| -> Result<CrownSnapshot> {
        let faces: Vec<LFace> = fan.iter().map(|&sl| LFace::new(s, sl)).collect();
        crown_from_faces(c, cusp, k, &faces)
    };
    let mut out = vec![snap(&fan, 0)?];
    for (i, &t) in lay.order.iter().enumerate() {
        if !s.cusps(t).contains(&cusp) {
            continue;
        }
        for g in 0..4 {
            let sl = s.canon_face(t, g);
            if LFace::new(s, sl).corner_of(cusp).is_none() {
                continue;
            }
            if s.v.is_upper_face(s.base(t), g) {
                fan.insert(sl);
            } else {
                fan.remove(&sl);
            }
        }
        out.push(snap(&fan, i + 1)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Turn {
    Left,
    Right,
}

/// A cusp train ray in one layer: the edges it crosses and the turn it
/// makes in each face after the first.
#[derive(Clone, Debug, Serialize)]
pub struct TrainRay {
    pub start: TrackCusp,
    pub crossings: Vec<EdgeKey>,
    pub turns: Vec<Turn>,
    pub reached_coast: bool,
}

/// Runs the train ray of the branch line `line` in the layer `layer`, from
/// the line's track-cusp in that layer, for at most `n` crossings. At a
/// large switch the ray takes the branch whose arc contains the nested arcs
/// of the line.
pub fn cusp_train_ray(c: &Continent, layer: &Landscape, line: &BranchLinePrefix, n: usize) -> Result<TrainRay> {
    let which = line.which;
    let idx = CoastIndex::new(&c.coast());
    let arcs = line.arcs(&idx);
    let start = line
        .steps
        .iter()
        .find_map(|s| layer.face_index(c.s.canon_face(s.face.0, s.face.1)).map(|i| (i, s)))
        .ok_or_else(|| Error::Internal("branch line prefix misses the layer".into()))?;
    let (mut fi, st) = start;
    let start_tc = TrackCusp { face: layer.faces[fi].slot, which, cusp: line.cusp, edge: st.edge };
    let mut entry = st.edge;
    let mut crossings = vec![entry];
    let mut turns = Vec::new();
    while crossings.len() < n {
        let Some(g) = layer.across(fi, entry) else {
            return Ok(TrainRay { start: start_tc, crossings, turns, reached_coast: true });
        };
        let lf = &layer.faces[g];
        let k = lf.corner_opposite(entry).expect("entry edge");
        let left_k = (k + 2) % 3;
        let right_k = (k + 1) % 3;
        let exit_k = if lf.pointed(which) == entry {
            // large switch: split towards the branch line's endpoint
            let left = arc_away(&idx, lf.edge(left_k), lf.cusps[left_k]);
            let right = arc_away(&idx, lf.edge(right_k), lf.cusps[right_k]);
            arcs.iter()
                .find_map(|&a| {
                    if arc_contains(&idx, left, a) {
                        Some(left_k)
                    } else if arc_contains(&idx, right, a) {
                        Some(right_k)
                    } else {
                        None
                    }
                })
                .ok_or_else(|| Error::DepthExhausted("branch line prefix too short to steer the ray".into()))?
        } else {
            lf.pointed_corner(which)
        };
        turns.push(if exit_k == left_k { Turn::Left } else { Turn::Right });
        entry = lf.edge(exit_k);
        crossings.push(entry);
        fi = g;
    }
    Ok(TrainRay { start: start_tc, crossings, turns, reached_coast: false })
}

/// Longest run of equal turns.
pub fn longest_turn_run(turns: &[Turn]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for (i, t) in turns.iter().enumerate() {
        run = if i > 0 && turns[i - 1] == *t { run + 1 } else { 1 };
        best = best.max(run);
    }
    best
}

/// Whether both colours occur in every window of `w` consecutive steps.
pub fn colours_in_every_window(p: &BranchLinePrefix, w: usize) -> bool {
    if w == 0 || p.steps.len() < w {
        return true;
    }
    p.steps.windows(w).all(|win| {
        win.iter().any(|s| s.colour == Colour::Red) && win.iter().any(|s| s.colour == Colour::Blue)
    })
}

/// Consecutive arcs are strictly nested and share exactly one endpoint.
pub fn arcs_strictly_nested(idx: &CoastIndex, arcs: &[(CuspId, CuspId)]) -> bool {
    arcs.windows(2).all(|w| {
        let ((a0, b0), (a1, b1)) = (w[0], w[1]);
        let shared = [a1, b1].iter().filter(|x| **x == a0 || **x == b0).count();
        shared == 1 && arc_contains(idx, (a0, b0), (a1, b1)) && (a0, b0) != (a1, b1)
    })
}

/// Whether the anticlockwise arc `inner` lies inside `outer`.
pub fn arc_contains(idx: &CoastIndex, outer: (CuspId, CuspId), inner: (CuspId, CuspId)) -> bool {
    let (i0, i1, o1) = (idx.offset(outer.0, inner.0), idx.offset(outer.0, inner.1), idx.offset(outer.0, outer.1));
    i0 <= i1 && i1 <= o1
}

/// Whether `x` has left the arcs by the end of the prefix.
pub fn excluded_at(idx: &CoastIndex, arcs: &[(CuspId, CuspId)], x: CuspId) -> Option<usize> {
    arcs.iter().position(|&(a, b)| !idx.in_arc(a, b, x))
}

/// First crossing at which two rays differ.
pub fn divergence_index(a: &TrainRay, b: &TrainRay) -> Option<usize> {
    a.crossings.iter().zip(&b.crossings).position(|(x, y)| x != y)
}
