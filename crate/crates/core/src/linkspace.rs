//! Rectangles in the link space, described by the singular leaves that bound
//! them. Every predicate reduces to the circular order of leaf endpoints,
//! which are tracked as nested arc chains of branch lines.

use crate::continent::{Continent, LFace, Layering, Slot, Which};
use crate::cover::{CuspId, EdgeKey, TetId};
use crate::error::{Error, Result};
use crate::isosig::{canonical_labelling, pair_of, serialize_taut_isosig};
use crate::order::CoastIndex;
use crate::perm::Perm4;
use crate::structure::{Colour, Veering};
use crate::tracks::{arc_away, extend_branch_line, fan_order, track_cusp, BranchLinePrefix, BranchStep, TrackCusp};
use crate::tracks::face_edge_colour;
use crate::tri::{Gluing, Triangulation};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub type LineId = usize;

/// A point of the circle at infinity: a cusp, or the endpoint of a branch line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum IdealPoint {
    Cusp(CuspId),
    End(LineId),
}

/// A singular leaf, from a cusp to the endpoint of one of its branch lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LeafHandle {
    pub cusp: CuspId,
    pub which: Which,
    pub line: LineId,
    pub tip: TrackCusp,
}

/// Closed arc of the circle, anticlockwise from `start` to `end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub start: IdealPoint,
    pub end: IdealPoint,
}

fn arc(start: IdealPoint, end: IdealPoint) -> Arc {
    Arc { start, end }
}

/// The leaves of one lamination crossing a rectangle: those with one
/// endpoint in each arc.
pub type Strip = [Arc; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RectKind {
    Edge,
    Face,
    Tet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Corner {
    NE,
    NW,
    SE,
    SW,
}

impl Corner {
    pub fn opposite(self) -> Corner {
        match self {
            Corner::NE => Corner::SW,
            Corner::SW => Corner::NE,
            Corner::NW => Corner::SE,
            Corner::SE => Corner::NW,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    SN,
    WE,
}

#[derive(Clone, Debug, Serialize)]
pub struct RectangleSignature {
    pub kind: RectKind,
    /// Ideal corners of an edge or face rectangle first, then ideal points
    /// inside sides.
    pub cusps: Vec<CuspId>,
    pub leaves: Vec<(String, LeafHandle)>,
    pub upper: Strip,
    pub lower: Strip,
    /// Certified anticlockwise order of the defining points.
    pub order: Vec<IdealPoint>,
    /// Edge rectangles: the colour whose corner pattern the order matches.
    pub slope: Option<Colour>,
    pub ideal_corners: Vec<(CuspId, Corner)>,
    /// Face rectangles: the singular leaves crossing at the median.
    pub median: Option<(LeafHandle, LeafHandle)>,
    /// Tetrahedron rectangles: whether the lower faces give the same rectangle.
    pub lower_agrees: Option<bool>,
}

impl RectangleSignature {
    pub fn points(&self) -> Vec<IdealPoint> {
        let mut v: Vec<IdealPoint> = self.cusps.iter().map(|&c| IdealPoint::Cusp(c)).collect();
        for a in self.upper.iter().chain(self.lower.iter()) {
            v.push(a.start);
            v.push(a.end);
        }
        v.sort();
        v.dedup();
        v
    }

    pub fn certified(&self) -> bool {
        self.kind != RectKind::Edge || self.slope.is_some()
    }
}

/// Positions of finitely many ideal points in anticlockwise order.
#[derive(Clone, Debug)]
pub struct Frame {
    pos: HashMap<IdealPoint, usize>,
    n: usize,
    pub depth: usize,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn position(&self, p: IdealPoint) -> usize {
        *self.pos.get(&p).unwrap_or_else(|| panic!("{p:?} is not in the frame"))
    }

    pub fn same(&self, a: IdealPoint, b: IdealPoint) -> bool {
        self.position(a) == self.position(b)
    }

    fn off(&self, a: IdealPoint, b: IdealPoint) -> usize {
        (self.position(b) + self.n - self.position(a)) % self.n
    }

    /// Points sorted anticlockwise starting at `from`.
    pub fn sorted_from(&self, from: IdealPoint, pts: &[IdealPoint]) -> Vec<IdealPoint> {
        let mut v = pts.to_vec();
        v.sort_by_key(|&p| self.off(from, p));
        v
    }

    pub fn point_in(&self, x: IdealPoint, a: Arc) -> bool {
        self.off(a.start, x) <= self.off(a.start, a.end)
    }

    pub fn arc_in(&self, inner: Arc, outer: Arc) -> bool {
        let o1 = self.off(outer.start, inner.start);
        let o2 = self.off(outer.start, inner.end);
        o1 <= o2 && o2 <= self.off(outer.start, outer.end)
    }

    pub fn arcs_equal(&self, a: Arc, b: Arc) -> bool {
        self.same(a.start, b.start) && self.same(a.end, b.end)
    }

    /// Whether the open arcs meet.
    pub fn arcs_meet(&self, a: Arc, b: Arc) -> bool {
        let o = self.off(a.start, b.start);
        !(o >= self.off(a.start, a.end) && o + self.off(b.start, b.end) <= self.n)
    }

    fn arcs_touch(&self, a: Arc, b: Arc) -> bool {
        self.point_in(b.start, a) || self.point_in(a.start, b)
    }

    fn arc_union(&self, a: Arc, b: Arc) -> Arc {
        let (a, b) = if self.point_in(b.start, a) { (a, b) } else { (b, a) };
        let end = if self.off(a.start, b.end) > self.off(a.start, a.end) { b.end } else { a.end };
        arc(a.start, end)
    }

    pub fn strip_in(&self, inner: &Strip, outer: &Strip) -> bool {
        (self.arc_in(inner[0], outer[0]) && self.arc_in(inner[1], outer[1]))
            || (self.arc_in(inner[0], outer[1]) && self.arc_in(inner[1], outer[0]))
    }

    pub fn strips_meet(&self, a: &Strip, b: &Strip) -> bool {
        (self.arcs_meet(a[0], b[0]) && self.arcs_meet(a[1], b[1]))
            || (self.arcs_meet(a[0], b[1]) && self.arcs_meet(a[1], b[0]))
    }

    pub fn strips_equal(&self, a: &Strip, b: &Strip) -> bool {
        (self.arcs_equal(a[0], b[0]) && self.arcs_equal(a[1], b[1]))
            || (self.arcs_equal(a[0], b[1]) && self.arcs_equal(a[1], b[0]))
    }

    /// The smallest strip containing two strips that overlap or abut.
    pub fn strip_hull(&self, a: &Strip, b: &Strip) -> Result<Strip> {
        if self.arcs_touch(a[0], b[0]) && self.arcs_touch(a[1], b[1]) {
            Ok([self.arc_union(a[0], b[0]), self.arc_union(a[1], b[1])])
        } else if self.arcs_touch(a[0], b[1]) && self.arcs_touch(a[1], b[0]) {
            Ok([self.arc_union(a[0], b[1]), self.arc_union(a[1], b[0])])
        } else {
            Err(Error::Internal("strips neither overlap nor abut".into()))
        }
    }

    pub fn contains(&self, inner: &RectangleSignature, outer: &RectangleSignature) -> bool {
        self.strip_in(&inner.upper, &outer.upper) && self.strip_in(&inner.lower, &outer.lower)
    }

    pub fn spans(&self, a: &RectangleSignature, b: &RectangleSignature, axis: Axis) -> bool {
        match axis {
            Axis::SN => self.strip_in(&b.lower, &a.lower) && self.strips_meet(&a.upper, &b.upper),
            Axis::WE => self.strip_in(&b.upper, &a.upper) && self.strips_meet(&a.lower, &b.lower),
        }
    }

    pub fn rect_equal(&self, a: &RectangleSignature, b: &RectangleSignature) -> bool {
        self.strips_equal(&a.upper, &b.upper) && self.strips_equal(&a.lower, &b.lower)
    }
}

/// The eight track-cusps nearest an edge in the fans at its two ends.
#[derive(Clone, Copy, Debug)]
struct EdgeTips {
    /// Indexed by end (0 for the smaller cusp), then which, then side
    /// (0 anticlockwise of the edge, 1 clockwise).
    tips: [[[TrackCusp; 2]; 2]; 2],
}

const GROW_ROUNDS: usize = 12;

/// Link-space queries over a continent that is grown on demand.
pub struct LinkSpace {
    pub c: Continent,
    /// Channelisations allowed per crossed face when growing.
    pub cap: usize,
    lines: Vec<BranchLinePrefix>,
    parent: Vec<LineId>,
    by_face: HashMap<([CuspId; 3], Which), LineId>,
    homes: HashMap<EdgeKey, (TetId, usize, usize)>,
    homes_upto: usize,
    layering: Option<(usize, Layering)>,
    signs: HashMap<[CuspId; 3], bool>,
    pub orientation_conflicts: usize,
    edges: HashMap<EdgeKey, RectangleSignature>,
    faces: HashMap<[CuspId; 3], RectangleSignature>,
}

fn face_key(c: &Continent, slot: Slot) -> [CuspId; 3] {
    let mut k = LFace::new(&c.s, slot).cusps;
    k.sort();
    k
}

impl LinkSpace {
    pub fn new(c: Continent, cap: usize) -> LinkSpace {
        LinkSpace {
            c,
            cap,
            lines: Vec::new(),
            parent: Vec::new(),
            by_face: HashMap::new(),
            homes: HashMap::new(),
            homes_upto: 0,
            layering: None,
            signs: HashMap::new(),
            orientation_conflicts: 0,
            edges: HashMap::new(),
            faces: HashMap::new(),
        }
    }

    pub fn veering(&self) -> &Veering {
        &self.c.s.v
    }

    pub fn find(&mut self, mut l: LineId) -> LineId {
        while self.parent[l] != l {
            self.parent[l] = self.parent[self.parent[l]];
            l = self.parent[l];
        }
        l
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    /// Steps in the longest branch-line prefix built so far.
    pub fn deepest(&self) -> usize {
        self.lines.iter().map(|p| p.steps.len() - 1).max().unwrap_or(0)
    }

    /// The current prefix of a branch line.
    pub fn prefix(&mut self, l: LineId) -> &BranchLinePrefix {
        let r = self.find(l);
        &self.lines[r]
    }

    fn canon_point(&mut self, p: IdealPoint) -> IdealPoint {
        match p {
            IdealPoint::End(l) => IdealPoint::End(self.find(l)),
            x => x,
        }
    }

    /// The branch line through a track-cusp.
    pub fn line_for(&mut self, tip: TrackCusp) -> LineId {
        let key = (face_key(&self.c, tip.face), tip.which);
        if let Some(&l) = self.by_face.get(&key) {
            return self.find(l);
        }
        let lf = LFace::new(&self.c.s, tip.face);
        let colour = face_edge_colour(&self.c, &lf, lf.pointed_corner(tip.which));
        let id = self.lines.len();
        self.lines.push(BranchLinePrefix {
            cusp: tip.cusp,
            which: tip.which,
            steps: vec![BranchStep { face: tip.face, edge: tip.edge, colour }],
        });
        self.parent.push(id);
        self.by_face.insert(key, id);
        id
    }

    fn leaf(&mut self, tip: TrackCusp) -> LeafHandle {
        let line = self.line_for(tip);
        LeafHandle { cusp: tip.cusp, which: tip.which, line, tip }
    }

    fn extend_line(&mut self, l: LineId, n: usize) -> Result<()> {
        let l = self.find(l);
        let old = self.lines[l].steps.len();
        extend_branch_line(&mut self.c, &mut self.lines[l], n, self.cap)?;
        let which = self.lines[l].which;
        for i in old..self.lines[l].steps.len() {
            let key = (face_key(&self.c, self.lines[l].steps[i].face), which);
            match self.by_face.get(&key).copied() {
                None => {
                    self.by_face.insert(key, l);
                }
                Some(o) => {
                    let o = self.find(o);
                    if o != l {
                        self.parent[o] = l;
                    }
                }
            }
        }
        Ok(())
    }

    /// Deepens the branch lines among `pts` until all endpoints are
    /// separated from each other and from the cusps, and returns their
    /// anticlockwise order. Each line is deepened to at most `depth` steps.
    pub fn frame(&mut self, pts: &[IdealPoint], depth: usize) -> Result<Frame> {
        loop {
            let canon: BTreeSet<IdealPoint> = pts.iter().map(|&p| self.canon_point(p)).collect();
            let idx = CoastIndex::new(&self.c.coast());
            let cusps: Vec<CuspId> = canon
                .iter()
                .filter_map(|p| if let IdealPoint::Cusp(c) = p { Some(*c) } else { None })
                .collect();
            let lines: Vec<LineId> = canon
                .iter()
                .filter_map(|p| if let IdealPoint::End(l) = p { Some(*l) } else { None })
                .collect();
            let arcs: Vec<(CuspId, CuspId)> = lines
                .iter()
                .map(|&l| {
                    let p = &self.lines[l];
                    arc_away(&idx, p.steps[p.steps.len() - 1].edge, p.cusp)
                })
                .collect();
            let n = idx.len();
            let mut bad = vec![false; lines.len()];
            let mut pairs = Vec::new();
            let lens: Vec<usize> = arcs.iter().map(|&(s, e)| idx.offset(s, e)).collect();
            for i in 0..lines.len() {
                let (s, e) = arcs[i];
                for j in i + 1..lines.len() {
                    let (s2, _) = arcs[j];
                    let o = idx.offset(s, s2);
                    if !(o >= lens[i] && o + lens[j] <= n) {
                        bad[i] = true;
                        bad[j] = true;
                        pairs.push((i, j));
                    }
                }
                if cusps.iter().any(|&x| idx.in_open_arc(s, e, x)) {
                    bad[i] = true;
                    pairs.push((i, i));
                }
            }
            let max_steps = lines.iter().map(|&l| self.lines[l].steps.len() - 1).max().unwrap_or(0);
            if !bad.iter().any(|&b| b) {
                let reference = arcs.first().map(|a| a.0).or(cusps.first().copied());
                let mut keyed: Vec<((usize, u8), IdealPoint)> = Vec::new();
                if let Some(r) = reference {
                    for &x in &cusps {
                        keyed.push(((idx.offset(r, x), 0), IdealPoint::Cusp(x)));
                    }
                    for (i, &l) in lines.iter().enumerate() {
                        keyed.push(((idx.offset(r, arcs[i].0), 1), IdealPoint::End(l)));
                    }
                }
                keyed.sort();
                let rank: HashMap<IdealPoint, usize> = keyed.iter().enumerate().map(|(i, k)| (k.1, i)).collect();
                let mut pos = HashMap::new();
                for &p in pts {
                    let c = self.canon_point(p);
                    pos.insert(p, rank[&c]);
                }
                return Ok(Frame { pos, n: keyed.len(), depth: max_steps });
            }
            let steps: Vec<usize> = lines.iter().map(|&l| self.lines[l].steps.len() - 1).collect();
            let mut grow = BTreeSet::new();
            for &(i, j) in &pairs {
                let mut cand = [i, j];
                if lens[j] > lens[i] {
                    cand.swap(0, 1);
                }
                match cand.into_iter().find(|&k| steps[k] < depth) {
                    Some(k) => {
                        grow.insert(k);
                    }
                    None => {
                        return Err(Error::DepthExhausted(format!(
                            "branch line endpoints not separated after {depth} steps"
                        )))
                    }
                }
            }
            for k in grow {
                self.extend_line(lines[k], (steps[k] * 2).max(4).min(depth))?;
            }
        }
    }

    fn layering(&mut self) -> Result<()> {
        let n = self.c.tet_count();
        if self.layering.as_ref().map(|l| l.0) != Some(n) {
            let lay = self.c.extract_layering()?;
            self.update_signs(&lay);
            self.layering = Some((n, lay));
        }
        Ok(())
    }

    fn home(&mut self, e: EdgeKey) -> Option<(TetId, usize, usize)> {
        let s = &self.c.s;
        for t in self.homes_upto..s.len() {
            for a in 0..4 {
                for b in a + 1..4 {
                    self.homes.entry(s.edge_key(t, a, b)).or_insert((t, a, b));
                }
            }
        }
        self.homes_upto = s.len();
        self.homes.get(&e).copied()
    }

    /// Propagates the orientation of the lower track through the layering.
    /// Adjacent faces of a layer must carry the flow across their common
    /// edge in one direction. Pinned so that the flow enters the root
    /// tetrahedron's first lower face through its pointed edge.
    fn update_signs(&mut self, lay: &Layering) {
        let s = &self.c.s;
        let key = |sl: Slot| face_key(&self.c, sl);
        let large = |sl: Slot, e: EdgeKey| LFace::new(s, sl).pointed(Which::Lower) == e;
        let mut sign: HashMap<Slot, bool> = HashMap::new();
        let mut conflicts = 0;
        let mut by_edge: HashMap<EdgeKey, Vec<Slot>> = HashMap::new();
        for &f in &lay.bottom {
            for e in LFace::new(s, f).edges() {
                by_edge.entry(e).or_default().push(f);
            }
        }
        let solve = |sign: &HashMap<Slot, bool>, a: Slot, e: EdgeKey, b: Slot| -> bool {
            let exits_a = sign[&a] ^ large(a, e);
            !exits_a ^ large(b, e)
        };
        let set = |sign: &mut HashMap<Slot, bool>, b: Slot, v: bool, conflicts: &mut usize| -> bool {
            match sign.get(&b) {
                None => {
                    sign.insert(b, v);
                    true
                }
                Some(&w) => {
                    if w != v {
                        *conflicts += 1;
                    }
                    false
                }
            }
        };
        if let Some(&seed) = lay.bottom.iter().next() {
            sign.insert(seed, true);
            let mut queue = vec![seed];
            while let Some(a) = queue.pop() {
                for e in LFace::new(s, a).edges() {
                    for &b in &by_edge[&e] {
                        if b != a {
                            let v = solve(&sign, a, e, b);
                            if set(&mut sign, b, v, &mut conflicts) {
                                queue.push(b);
                            }
                        }
                    }
                }
            }
        }
        for &t in &lay.order {
            let base = s.base(t);
            let mut added = Vec::new();
            for g in 0..4 {
                let sl = s.canon_face(t, g);
                let edges = LFace::new(s, sl).edges();
                if s.v.is_upper_face(base, g) {
                    for e in edges {
                        by_edge.entry(e).or_default().push(sl);
                    }
                    added.push(sl);
                } else {
                    for e in edges {
                        if let Some(v) = by_edge.get_mut(&e) {
                            v.retain(|&x| x != sl);
                        }
                    }
                }
            }
            for _ in 0..2 {
                for &f in &added {
                    for e in LFace::new(s, f).edges() {
                        for &b in &by_edge[&e] {
                            if b != f && sign.contains_key(&b) {
                                let v = solve(&sign, b, e, f);
                                set(&mut sign, f, v, &mut conflicts);
                            }
                        }
                    }
                }
            }
        }
        let root_lower = (0..4).find(|&g| !s.v.is_upper_face(s.base(0), g)).expect("lower face");
        let pin = s.canon_face(0, root_lower);
        let entering = sign.get(&pin).map(|&v| v ^ large(pin, LFace::new(s, pin).pointed(Which::Lower)));
        // exits through its pointed edge means the pin is reversed
        let flip = entering == Some(true);
        for (sl, v) in sign {
            let v = v ^ flip;
            let k = key(sl);
            match self.signs.get(&k) {
                Some(&w) if w != v => conflicts += 1,
                _ => {
                    self.signs.insert(k, v);
                }
            }
        }
        self.orientation_conflicts += conflicts;
    }

    /// Grows the continent around a cusp by covering every boundary face at it.
    fn grow_around(&mut self, x: CuspId) -> Result<()> {
        for w in [Which::Upper, Which::Lower] {
            let faces: Vec<Slot> = self
                .c
                .boundary(w)
                .iter()
                .copied()
                .filter(|&sl| LFace::new(&self.c.s, sl).corner_of(x).is_some())
                .collect();
            for (t, f) in faces {
                if self.c.side_of((t, f)).is_some() {
                    self.c.grow_along(t, &[f], self.cap)?;
                }
            }
        }
        Ok(())
    }

    fn edge_tips(&mut self, e: EdgeKey) -> Result<EdgeTips> {
        for _ in 0..GROW_ROUNDS {
            let (t, a, b) = self.home(e).ok_or(Error::EdgeNotInContinent)?;
            let f = (0..4).find(|&f| f != a && f != b).expect("face at edge");
            let slot = self.c.s.canon_face(t, f);
            self.layering()?;
            let lay = &self.layering.as_ref().expect("layering").1;
            let (k, _) = lay.face_span(&self.c.s, slot);
            let layer = lay.layer(&self.c.s, k);
            let mut out = [[[None; 2]; 2]; 2];
            let mut short = Vec::new();
            for (end, &x) in [e.0, e.1].iter().enumerate() {
                let y = if end == 0 { e.1 } else { e.0 };
                let faces: Vec<LFace> = layer
                    .iter()
                    .map(|&sl| LFace::new(&self.c.s, sl))
                    .filter(|lf| lf.corner_of(x).is_some())
                    .collect();
                let (order, closed) = fan_order(&faces, x)?;
                let m = order.len();
                let second = |j: usize| {
                    let lf = &faces[order[j]];
                    lf.cusps[(lf.corner_of(x).expect("corner") + 2) % 3]
                };
                // faces anticlockwise of the edge start at `first`
                let first = if let Some(j) = (0..m).find(|&j| second(j) == y) {
                    j + 1
                } else {
                    0
                };
                let seqs: [Vec<usize>; 2] = if closed {
                    [(0..m).map(|i| (first + i) % m).collect(), (1..=m).map(|i| (first + m - i) % m).collect()]
                } else {
                    [(first..m).collect(), (0..first).rev().collect()]
                };
                for (side, seq) in seqs.iter().enumerate() {
                    for (wi, w) in [Which::Upper, Which::Lower].into_iter().enumerate() {
                        let hit = seq.iter().map(|&j| &faces[order[j]]).find(|lf| {
                            let c = lf.corner_of(x).expect("corner");
                            lf.pointed_corner(w) == c
                        });
                        match hit {
                            Some(lf) => out[end][wi][side] = Some(track_cusp(&self.c, lf.slot, w)),
                            None => short.push(x),
                        }
                    }
                }
            }
            if short.is_empty() {
                let tips = out.map(|w| w.map(|s| s.map(|t| t.expect("tip"))));
                return Ok(EdgeTips { tips });
            }
            short.dedup();
            for x in short {
                self.grow_around(x)?;
            }
        }
        Err(Error::DepthExhausted("fans at the edge ends stay too short".into()))
    }

    /// Whether the lower leaves crossing `e` point towards the arc
    /// anticlockwise from the smaller end to the larger.
    fn lower_points_ccw(&mut self, e: EdgeKey) -> Result<Option<bool>> {
        let (t, a, b) = self.home(e).ok_or(Error::EdgeNotInContinent)?;
        let f = (0..4).find(|&f| f != a && f != b).expect("face at edge");
        let slot = self.c.s.canon_face(t, f);
        self.layering()?;
        let Some(&sign) = self.signs.get(&face_key(&self.c, slot)) else {
            return Ok(None);
        };
        let lf = LFace::new(&self.c.s, slot);
        let exits = sign ^ (lf.pointed(Which::Lower) == e);
        let z = lf.cusps[lf.corner_opposite(e).expect("edge of face")];
        let idx = CoastIndex::new(&self.c.coast());
        let z_ccw = idx.in_open_arc(e.0, e.1, z);
        Ok(Some(z_ccw != exits))
    }

    /// The rectangle of an edge, bounded by the singular leaves through the
    /// track-cusps nearest the edge in the fans at its two ends.
    pub fn edge_rectangle(&mut self, e: EdgeKey, depth: usize) -> Result<RectangleSignature> {
        if let Some(r) = self.edges.get(&e) {
            return Ok(r.clone());
        }
        let tips = self.edge_tips(e)?.tips;
        let (c, d) = e;
        // s/u at c, t/v at d; a anticlockwise of the edge, c clockwise
        let sa = self.leaf(tips[0][0][0]);
        let sc = self.leaf(tips[0][0][1]);
        let ua = self.leaf(tips[0][1][0]);
        let uc = self.leaf(tips[0][1][1]);
        let ta = self.leaf(tips[1][0][0]);
        let tc = self.leaf(tips[1][0][1]);
        let va = self.leaf(tips[1][1][0]);
        let vc = self.leaf(tips[1][1][1]);
        let end = |h: LeafHandle| IdealPoint::End(h.line);
        let (pc, pd) = (IdealPoint::Cusp(c), IdealPoint::Cusp(d));
        let pts = [pc, pd, end(sa), end(sc), end(ua), end(uc), end(ta), end(tc), end(va), end(vc)];
        let frame = self.frame(&pts, depth)?;
        let order = frame.sorted_from(pc, &pts);
        let red = [pc, end(sc), end(ta), end(uc), end(va), pd, end(tc), end(sa), end(vc), end(ua)];
        let blue = [pc, end(uc), end(va), end(sc), end(ta), pd, end(vc), end(ua), end(tc), end(sa)];
        let matches = |pat: &[IdealPoint; 10]| order.iter().zip(pat).all(|(&x, &y)| frame.same(x, y));
        let slope = if matches(&red) {
            Some(Colour::Red)
        } else if matches(&blue) {
            Some(Colour::Blue)
        } else {
            None
        };
        let mut ideal_corners = Vec::new();
        if let (Some(col), Some(plus_ccw)) = (slope, self.lower_points_ccw(e)?) {
            let corner = match (col, plus_ccw) {
                (Colour::Red, true) => Corner::SW,
                (Colour::Red, false) => Corner::NE,
                (Colour::Blue, true) => Corner::SE,
                (Colour::Blue, false) => Corner::NW,
            };
            ideal_corners = vec![(c, corner), (d, corner.opposite())];
        }
        let leaves = [("S", sa), ("S'", sc), ("U'", ua), ("U", uc), ("T", ta), ("T'", tc), ("V'", va), ("V", vc)]
            .iter()
            .map(|(n, h)| (n.to_string(), *h))
            .collect();
        let r = RectangleSignature {
            kind: RectKind::Edge,
            cusps: vec![c, d],
            leaves,
            upper: [arc(end(sc), end(ta)), arc(end(tc), end(sa))],
            lower: [arc(end(uc), end(va)), arc(end(vc), end(ua))],
            order,
            slope,
            ideal_corners,
            median: None,
            lower_agrees: None,
        };
        self.edges.insert(e, r.clone());
        Ok(r)
    }

    /// The rectangle of a face: the upper leaves of its upper-pointed edge
    /// against the lower leaves of its lower-pointed edge.
    pub fn face_rectangle(&mut self, slot: Slot, depth: usize) -> Result<RectangleSignature> {
        let key = face_key(&self.c, slot);
        if let Some(r) = self.faces.get(&key) {
            return Ok(r.clone());
        }
        let lf = LFace::new(&self.c.s, slot);
        let eu = lf.pointed(Which::Upper);
        let el = lf.pointed(Which::Lower);
        let ru = self.edge_rectangle(eu, depth)?;
        let rl = self.edge_rectangle(el, depth)?;
        let corner = [eu.0, eu.1].into_iter().find(|x| *x == el.0 || *x == el.1).expect("edges of a face meet");
        let mut cusps = vec![corner];
        cusps.extend(lf.cusps.iter().copied().filter(|&x| x != corner));
        let s = self.leaf(track_cusp(&self.c, lf.slot, Which::Upper));
        let u = self.leaf(track_cusp(&self.c, lf.slot, Which::Lower));
        let mut pts: Vec<IdealPoint> = ru.points();
        pts.extend(rl.points());
        let frame = self.frame(&pts, depth)?;
        let order = frame.sorted_from(IdealPoint::Cusp(corner), &pts);
        let mut leaves = Vec::new();
        for (n, h) in &ru.leaves {
            if matches!(n.as_str(), "S" | "S'" | "T" | "T'") {
                leaves.push((format!("{n}@{}-{}", eu.0, eu.1), *h));
            }
        }
        for (n, h) in &rl.leaves {
            if matches!(n.as_str(), "U" | "U'" | "V" | "V'") {
                leaves.push((format!("{n}@{}-{}", el.0, el.1), *h));
            }
        }
        let r = RectangleSignature {
            kind: RectKind::Face,
            cusps,
            leaves,
            upper: ru.upper,
            lower: rl.lower,
            order,
            slope: None,
            ideal_corners: Vec::new(),
            median: Some((s, u)),
            lower_agrees: None,
        };
        self.faces.insert(key, r.clone());
        Ok(r)
    }

    fn hull_of(&mut self, a: &RectangleSignature, b: &RectangleSignature, depth: usize) -> Result<(Strip, Strip, Frame)> {
        let mut pts = a.points();
        pts.extend(b.points());
        let frame = self.frame(&pts, depth)?;
        Ok((frame.strip_hull(&a.upper, &b.upper)?, frame.strip_hull(&a.lower, &b.lower)?, frame))
    }

    /// The rectangle of a tetrahedron, from its upper faces, checked against
    /// the one from its lower faces.
    pub fn tet_rectangle(&mut self, t: TetId, depth: usize) -> Result<RectangleSignature> {
        let base = self.c.s.base(t);
        let (mut up, mut low) = (Vec::new(), Vec::new());
        for g in 0..4 {
            let r = self.face_rectangle((t, g), depth)?;
            if self.c.s.v.is_upper_face(base, g) {
                up.push(r);
            } else {
                low.push(r);
            }
        }
        let (uu, ul, _) = self.hull_of(&up[0], &up[1], depth)?;
        let (lu, ll, _) = self.hull_of(&low[0], &low[1], depth)?;
        let cusps = self.c.s.cusps(t).to_vec();
        let mut pts: Vec<IdealPoint> = cusps.iter().map(|&c| IdealPoint::Cusp(c)).collect();
        for a in uu.iter().chain(&ul).chain(&lu).chain(&ll) {
            pts.push(a.start);
            pts.push(a.end);
        }
        let frame = self.frame(&pts, depth)?;
        let agrees = frame.strips_equal(&uu, &lu) && frame.strips_equal(&ul, &ll);
        let mut order = frame.sorted_from(pts[0], &pts);
        order.dedup_by(|a, b| frame.same(*a, *b));
        let mut leaves = Vec::new();
        for r in &up {
            for (n, h) in &r.leaves {
                if !leaves.iter().any(|(_, x): &(String, LeafHandle)| x.line == h.line) {
                    leaves.push((n.clone(), *h));
                }
            }
        }
        Ok(RectangleSignature {
            kind: RectKind::Tet,
            cusps,
            leaves,
            upper: uu,
            lower: ul,
            order,
            slope: None,
            ideal_corners: Vec::new(),
            median: None,
            lower_agrees: Some(agrees),
        })
    }

    pub fn frame_for(&mut self, rects: &[&RectangleSignature], depth: usize) -> Result<Frame> {
        let pts: Vec<IdealPoint> = rects.iter().flat_map(|r| r.points()).collect();
        self.frame(&pts, depth)
    }

    pub fn rect_contains(&mut self, inner: &RectangleSignature, outer: &RectangleSignature, depth: usize) -> Result<bool> {
        let f = self.frame_for(&[inner, outer], depth)?;
        Ok(f.contains(inner, outer))
    }

    pub fn spans(&mut self, a: &RectangleSignature, b: &RectangleSignature, axis: Axis, depth: usize) -> Result<bool> {
        let f = self.frame_for(&[a, b], depth)?;
        Ok(f.spans(a, b, axis))
    }

    /// Rebuilds the triangulation from the rectangles of the given lifted
    /// tetrahedra.
    pub fn reconstruct(&mut self, tets: &[TetId], depth: usize) -> Result<Reconstruction> {
        if tets.is_empty() {
            return Err(Error::InsufficientContinent);
        }
        let mut tet_rects = Vec::new();
        for &t in tets {
            tet_rects.push(self.tet_rectangle(t, depth)?);
        }
        let mut face_rects = Vec::new();
        let mut edge_rects = Vec::new();
        for &t in tets {
            let mut fs = Vec::new();
            for g in 0..4 {
                fs.push(self.face_rectangle((t, g), depth)?);
            }
            face_rects.push(fs);
            let mut es = Vec::new();
            for a in 0..4 {
                for b in a + 1..4 {
                    let e = self.c.s.edge_key(t, a, b);
                    es.push(((a, b), self.edge_rectangle(e, depth)?));
                }
            }
            edge_rects.push(es);
        }
        let mut all: Vec<&RectangleSignature> = tet_rects.iter().collect();
        all.extend(face_rects.iter().flatten());
        all.extend(edge_rects.iter().flatten().map(|x| &x.1));
        let frame = self.frame_for(&all, depth)?;

        // pair across faces by containment of the face rectangle
        let mut paired: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, fs) in face_rects.iter().enumerate() {
            for (g, fr) in fs.iter().enumerate() {
                let hits: Vec<usize> = (0..tets.len())
                    .filter(|&j| j != i && frame.contains(fr, &tet_rects[j]))
                    .collect();
                match hits.len() {
                    0 => {}
                    1 => {
                        paired.insert((i, g), hits[0]);
                    }
                    _ => return Err(Error::Internal("face rectangle inside several tetrahedron rectangles".into())),
                }
            }
        }
        // π-edges span the tetrahedron rectangle
        let mut pis = Vec::new();
        for (i, es) in edge_rects.iter().enumerate() {
            let spanning: Vec<(usize, usize)> = es
                .iter()
                .filter(|(_, r)| frame.spans(r, &tet_rects[i], Axis::SN) || frame.spans(r, &tet_rects[i], Axis::WE))
                .map(|x| x.0)
                .collect();
            if spanning.len() != 2 || pair_of(spanning[0].0, spanning[0].1) != pair_of(spanning[1].0, spanning[1].1) {
                return Err(Error::Internal(format!("tetrahedron {} has spanning edges {spanning:?}", tets[i])));
            }
            pis.push(pair_of(spanning[0].0, spanning[0].1));
        }

        // quotient by the deck group
        let s = &self.c.s;
        let mut label: BTreeMap<usize, usize> = BTreeMap::new();
        for &t in tets {
            let n = label.len();
            label.entry(s.base(t)).or_insert(n);
        }
        if label.len() != s.v.tet_count() {
            return Err(Error::InsufficientContinent);
        }
        let n = label.len();
        let mut gluings: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; n];
        let mut pi_pairs: Vec<Option<u8>> = vec![None; n];
        let mut rep: Vec<Option<usize>> = vec![None; n];
        for (i, &t) in tets.iter().enumerate() {
            let x = label[&s.base(t)];
            match pi_pairs[x] {
                None => pi_pairs[x] = Some(pis[i]),
                Some(p) if p != pis[i] => return Err(Error::Internal("lifts disagree on π-edges".into())),
                _ => {}
            }
            rep.get_mut(x).expect("label").get_or_insert(i);
            for g in 0..4 {
                let Some(&j) = paired.get(&(i, g)) else { continue };
                let (ct, cu) = (s.cusps(t), s.cusps(tets[j]));
                let mut img = [0u8; 4];
                for v in 0..4 {
                    if v != g {
                        img[v] = cu.iter().position(|&y| y == ct[v]).ok_or_else(|| {
                            Error::Internal("paired tetrahedra do not share a face".into())
                        })? as u8;
                    }
                }
                img[g] = (6 - img.iter().enumerate().filter(|&(v, _)| v != g).map(|(_, &y)| y as usize).sum::<usize>()) as u8;
                let perm = Perm4::new(img).ok_or_else(|| Error::Internal("bad vertex matching".into()))?;
                let gl = Gluing { tet: label[&s.base(tets[j])], perm };
                match gluings[x][g] {
                    None => gluings[x][g] = Some(gl),
                    Some(o) if o != gl => return Err(Error::Internal("lifts disagree on a gluing".into())),
                    _ => {}
                }
            }
        }
        if gluings.iter().any(|g| g.iter().any(|x| x.is_none())) {
            return Err(Error::InsufficientContinent);
        }
        let tri = Triangulation::new(gluings)?;
        let pi_pairs: Vec<u8> = pi_pairs.into_iter().map(|p| p.expect("every label has a lift")).collect();
        // colours read off the corner pattern
        let mut colours: Vec<Option<Colour>> = vec![None; tri.edge_count()];
        for (x, r) in rep.iter().enumerate() {
            let i = r.expect("representative");
            for ((a, b), er) in &edge_rects[i] {
                let col = er.slope.ok_or_else(|| Error::Internal("uncertified edge rectangle".into()))?;
                let cls = tri.edge_class(x, crate::perm::edge_index(*a, *b));
                match colours[cls] {
                    None => colours[cls] = Some(col),
                    Some(o) if o != col => return Err(Error::Internal("edge class gets two colours".into())),
                    _ => {}
                }
            }
        }
        let colours: Vec<Colour> = colours.into_iter().map(|c| c.expect("every edge class")).collect();

        let v = &s.v;
        let recovered = serialize_taut_isosig(&tri, &pi_pairs);
        let input = serialize_taut_isosig(&v.tri, &v.pi_pairs);
        let isomorphic = recovered == input;
        let mut relabelling = Vec::new();
        let mut colours_match = false;
        if isomorphic {
            let (_, _, lab_new) = canonical_labelling(&tri, Some(&pi_pairs));
            let (_, _, lab_in) = canonical_labelling(&v.tri, Some(&v.pi_pairs));
            let mut map = vec![(0usize, Perm4::IDENTITY); n];
            for (&(tn, mn), &(ti, mi)) in lab_new.iter().zip(&lab_in) {
                map[tn] = (ti, mi.inverse().compose(mn));
            }
            colours_match = (0..n).all(|x| {
                let (y, p) = map[x];
                (0..4).all(|a| {
                    (a + 1..4).all(|b| {
                        let mine = colours[tri.edge_class(x, crate::perm::edge_index(a, b))];
                        mine == v.colour_of(y, p.apply(a), p.apply(b))
                    })
                })
            });
            relabelling = map.iter().map(|&(y, p)| (y, p.0)).collect();
        }
        Ok(Reconstruction {
            signature: recovered,
            input,
            isomorphic,
            colours_match,
            relabelling,
            pi_pairs,
            colours,
            lifted: tets.len(),
            pairs: paired.len(),
            depth: frame.depth,
            tri,
        })
    }
}

/// Outcome of rebuilding a triangulation from rectangles.
#[derive(Clone, Debug, Serialize)]
pub struct Reconstruction {
    pub signature: String,
    pub input: String,
    pub isomorphic: bool,
    pub colours_match: bool,
    /// Reconstructed tetrahedron `i` maps to input tetrahedron
    /// `relabelling[i].0` with vertex map `relabelling[i].1`.
    pub relabelling: Vec<(usize, [u8; 4])>,
    pub pi_pairs: Vec<u8>,
    pub colours: Vec<Colour>,
    pub lifted: usize,
    pub pairs: usize,
    pub depth: usize,
    #[serde(skip)]
    pub tri: Triangulation,
}

/// Lifted tetrahedra reachable from the root by at most `radius` face
/// crossings, growing the continent to contain them.
pub fn grow_ball(c: &mut Continent, radius: usize, cap: usize) -> Result<Vec<TetId>> {
    let mut seen = BTreeSet::from([c.s.root()]);
    let mut frontier = vec![c.s.root()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &t in &frontier {
            for f in 0..4 {
                let u = c.grow_along(t, &[f], cap)?;
                if seen.insert(u) {
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    Ok(seen.into_iter().collect())
}

/// Edges of the given tetrahedra.
pub fn edges_of(c: &Continent, tets: &[TetId]) -> Vec<EdgeKey> {
    let mut out = BTreeSet::new();
    for &t in tets {
        for a in 0..4 {
            for b in a + 1..4 {
                out.insert(c.s.edge_key(t, a, b));
            }
        }
    }
    out.into_iter().collect()
}

pub fn edge_colour(c: &Continent, e: EdgeKey) -> Option<Colour> {
    let s = &c.s;
    (0..s.len()).find_map(|t| {
        (0..4).find_map(|a| (a + 1..4).find(|&b| s.edge_key(t, a, b) == e).map(|b| s.v.colour_of(s.base(t), a, b)))
    })
}
