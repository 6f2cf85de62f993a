//! Continents, landscapes, rivers and continental growth.

use crate::cover::{edge_key, CuspId, EdgeKey, Session, TetId};
use crate::error::{Error, Result};
use crate::structure::Veering;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

/// A lifted face, named by a tetrahedron of the continent and a face index.
pub type Slot = (TetId, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Which {
    Upper,
    Lower,
}

impl Which {
    pub fn other(self) -> Which {
        match self {
            Which::Upper => Which::Lower,
            Which::Lower => Which::Upper,
        }
    }
}

/// A face of a landscape with its corners anticlockwise from above.
#[derive(Clone, Debug)]
pub struct LFace {
    pub slot: Slot,
    pub verts: [usize; 3],
    pub cusps: [CuspId; 3],
    /// Corner opposite the edge the upper track-cusp points at.
    pub upper_pt: usize,
    pub lower_pt: usize,
}

impl LFace {
    pub fn new(s: &Session, (t, f): Slot) -> LFace {
        let v = &s.v;
        let b = s.base(t);
        let verts = v.face_ccw_from_above(b, f);
        let cusps = verts.map(|x| s.cusp(t, x));
        let pos = |x: usize| verts.iter().position(|&y| y == x).expect("face vertex");
        LFace {
            slot: (t, f),
            verts,
            cusps,
            upper_pt: pos(v.upper_cusp_vertex(b, f)),
            lower_pt: pos(v.lower_cusp_vertex(b, f)),
        }
    }

    pub fn corner_of(&self, c: CuspId) -> Option<usize> {
        self.cusps.iter().position(|&x| x == c)
    }

    /// The edge opposite corner `i`.
    pub fn edge(&self, i: usize) -> EdgeKey {
        edge_key(self.cusps[(i + 1) % 3], self.cusps[(i + 2) % 3])
    }

    pub fn edges(&self) -> [EdgeKey; 3] {
        [self.edge(0), self.edge(1), self.edge(2)]
    }

    pub fn pointed_corner(&self, w: Which) -> usize {
        match w {
            Which::Upper => self.upper_pt,
            Which::Lower => self.lower_pt,
        }
    }

    pub fn pointed(&self, w: Which) -> EdgeKey {
        self.edge(self.pointed_corner(w))
    }

    pub fn corner_opposite(&self, e: EdgeKey) -> Option<usize> {
        (0..3).find(|&i| self.edge(i) == e)
    }

    /// Model edge `(tet, a, b)` realising the edge opposite corner `i`.
    pub fn model_edge(&self, i: usize) -> (TetId, usize, usize) {
        (self.slot.0, self.verts[(i + 1) % 3], self.verts[(i + 2) % 3])
    }

    /// Corner holding the left edge when the flow enters across `e`.
    fn left_corner(&self, e: EdgeKey) -> usize {
        let k = self.corner_opposite(e).expect("edge of face");
        (k + 2) % 3
    }
}

/// Local switch type of an interior edge for one of the two tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeClass {
    Sink,
    FallLeft,
    FallRight,
    WatershedLeft,
    WatershedRight,
}

/// A finite triangulated surface made of lifted faces.
#[derive(Clone, Debug)]
pub struct Landscape {
    pub faces: Vec<LFace>,
    pub edges: BTreeMap<EdgeKey, Vec<usize>>,
    index: HashMap<Slot, usize>,
}

impl Landscape {
    pub fn new(s: &Session, slots: impl IntoIterator<Item = Slot>) -> Landscape {
        let mut faces = Vec::new();
        let mut edges: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
        let mut index = HashMap::new();
        for slot in slots {
            let lf = LFace::new(s, slot);
            let i = faces.len();
            for e in lf.edges() {
                edges.entry(e).or_default().push(i);
            }
            index.insert(slot, i);
            faces.push(lf);
        }
        Landscape { faces, edges, index }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    fn insert(&mut self, s: &Session, slot: Slot) {
        let lf = LFace::new(s, slot);
        let i = self.faces.len();
        for e in lf.edges() {
            self.edges.entry(e).or_default().push(i);
        }
        self.index.insert(slot, i);
        self.faces.push(lf);
    }

    fn remove(&mut self, slot: Slot) -> bool {
        let Some(i) = self.index.remove(&slot) else { return false };
        for e in self.faces[i].edges() {
            let v = self.edges.get_mut(&e).expect("edge of face");
            v.retain(|&x| x != i);
            if v.is_empty() {
                self.edges.remove(&e);
            }
        }
        let last = self.faces.len() - 1;
        self.faces.swap_remove(i);
        if i != last {
            let moved = self.faces[i].slot;
            self.index.insert(moved, i);
            for e in self.faces[i].edges() {
                for x in self.edges.get_mut(&e).expect("edge of face") {
                    if *x == last {
                        *x = i;
                    }
                }
            }
        }
        true
    }

    fn is_sink(&self, e: EdgeKey, w: Which) -> bool {
        self.edges
            .get(&e)
            .is_some_and(|fs| fs.len() == 2 && fs.iter().all(|&i| self.faces[i].pointed(w) == e))
    }

    fn sink_key(&self, e: EdgeKey) -> Slot {
        let fs = &self.edges[&e];
        self.faces[fs[0]].slot.min(self.faces[fs[1]].slot)
    }

    pub fn face_index(&self, slot: Slot) -> Option<usize> {
        self.index.get(&slot).copied()
    }

    pub fn contains_edge(&self, e: EdgeKey) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn is_coastal(&self, e: EdgeKey) -> bool {
        self.edges.get(&e).is_some_and(|v| v.len() == 1)
    }

    pub fn across(&self, fi: usize, e: EdgeKey) -> Option<usize> {
        self.edges.get(&e)?.iter().copied().find(|&g| g != fi)
    }

    pub fn cusps(&self) -> BTreeSet<CuspId> {
        self.faces.iter().flat_map(|f| f.cusps).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cusps().len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn coastal_edges(&self) -> BTreeSet<EdgeKey> {
        self.edges.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| *e).collect()
    }

    /// The boundary read anticlockwise from above, starting at its least cusp.
    pub fn boundary_cycle(&self) -> Result<Vec<CuspId>> {
        let mut succ: BTreeMap<CuspId, CuspId> = BTreeMap::new();
        for f in &self.faces {
            for i in 0..3 {
                let (a, b) = (f.cusps[i], f.cusps[(i + 1) % 3]);
                if self.is_coastal(edge_key(a, b)) && succ.insert(a, b).is_some() {
                    return Err(Error::Internal("landscape boundary is pinched".into()));
                }
            }
        }
        let Some((&start, _)) = succ.iter().next() else {
            return Ok(Vec::new());
        };
        let mut cycle = vec![start];
        let mut cur = succ[&start];
        while cur != start {
            cycle.push(cur);
            cur = *succ.get(&cur).ok_or_else(|| Error::Internal("landscape boundary is not closed".into()))?;
            if cycle.len() > succ.len() {
                return Err(Error::Internal("landscape boundary does not close".into()));
            }
        }
        if cycle.len() != succ.len() {
            return Err(Error::Internal("landscape boundary has several components".into()));
        }
        Ok(cycle)
    }

    /// Checks that the landscape is a disk.
    pub fn validate_disk(&self) -> Result<()> {
        if self.edges.values().any(|v| v.len() > 2) {
            return Err(Error::Internal("landscape edge meets three faces".into()));
        }
        if self.euler_characteristic() != 1 {
            return Err(Error::Internal(format!("landscape Euler characteristic {}", self.euler_characteristic())));
        }
        self.boundary_cycle()?;
        Ok(())
    }

    /// Switch type of an interior edge; `None` on the coast.
    pub fn classify(&self, e: EdgeKey, w: Which) -> Option<EdgeClass> {
        let fs = self.edges.get(&e)?;
        if fs.len() != 2 {
            return None;
        }
        let (a, b) = (&self.faces[fs[0]], &self.faces[fs[1]]);
        let (pa, pb) = (a.pointed(w) == e, b.pointed(w) == e);
        let left = |x: &LFace| x.pointed_corner(w) == x.left_corner(e);
        Some(match (pa, pb) {
            (true, true) => EdgeClass::Sink,
            (true, false) if left(b) => EdgeClass::FallLeft,
            (true, false) => EdgeClass::FallRight,
            (false, true) if left(a) => EdgeClass::FallLeft,
            (false, true) => EdgeClass::FallRight,
            (false, false) if left(a) => EdgeClass::WatershedLeft,
            (false, false) => EdgeClass::WatershedRight,
        })
    }

    /// For a watershed, whether the two outgoing flows turn the same way.
    pub fn watershed_turns_agree(&self, e: EdgeKey, w: Which) -> Option<bool> {
        let fs = self.edges.get(&e)?;
        if fs.len() != 2 {
            return None;
        }
        let (a, b) = (&self.faces[fs[0]], &self.faces[fs[1]]);
        if a.pointed(w) == e || b.pointed(w) == e {
            return None;
        }
        let left = |x: &LFace| x.pointed_corner(w) == x.left_corner(e);
        Some(left(a) == left(b))
    }

    /// Sinks in the order they are filled: by least adjacent face, then edge.
    pub fn sinks(&self, w: Which) -> Vec<EdgeKey> {
        let mut out: Vec<(Slot, EdgeKey)> = self
            .edges
            .iter()
            .filter(|(e, fs)| fs.len() == 2 && fs.iter().all(|&i| self.faces[i].pointed(w) == **e))
            .map(|(e, fs)| (self.faces[fs[0]].slot.min(self.faces[fs[1]].slot), *e))
            .collect();
        out.sort();
        out.into_iter().map(|(_, e)| e).collect()
    }

    /// Follows the flow from face `fi`, returning faces, falls, the mouth and
    /// whether the mouth is coastal.
    pub fn trace(&self, fi: usize, w: Which) -> (Vec<usize>, Vec<EdgeKey>, EdgeKey, bool) {
        let mut faces = vec![fi];
        let mut falls = Vec::new();
        let mut cur = fi;
        loop {
            let e = self.faces[cur].pointed(w);
            match self.across(cur, e) {
                None => return (faces, falls, e, true),
                Some(g) => {
                    if self.faces[g].pointed(w) == e {
                        return (faces, falls, e, false);
                    }
                    falls.push(e);
                    faces.push(g);
                    cur = g;
                    assert!(faces.len() <= self.faces.len(), "track flow revisits a face");
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MouthKind {
    Coastal,
    Sink,
}

#[derive(Clone, Debug, Serialize)]
pub struct Distributary {
    pub start: EdgeKey,
    pub faces: Vec<Slot>,
    pub mouth: EdgeKey,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fork {
    pub sink: EdgeKey,
    pub f0: Slot,
    pub distributaries: [Distributary; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct River {
    pub which: Which,
    pub source: Slot,
    pub faces: Vec<Slot>,
    pub falls: Vec<EdgeKey>,
    pub heights: Vec<usize>,
    pub mouth: EdgeKey,
    pub mouth_kind: MouthKind,
    pub fork: Option<Fork>,
}

/// Lexicographically ordered river complexity `(length, h1, h2, ...)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Complexity(pub Vec<usize>);

impl River {
    /// Number of triangles, including a fork if present.
    pub fn len(&self) -> usize {
        self.faces.len()
            + self
                .fork
                .as_ref()
                .map_or(0, |f| 1 + f.distributaries.iter().map(|d| d.faces.len()).sum::<usize>())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mouths(&self) -> Vec<EdgeKey> {
        match &self.fork {
            Some(f) => f.distributaries.iter().map(|d| d.mouth).collect(),
            None => vec![self.mouth],
        }
    }

    pub fn complexity(&self) -> Result<Complexity> {
        if self.fork.is_some() {
            return Err(Error::ForkedRiverHasNoComplexity);
        }
        let mut c = vec![self.faces.len()];
        c.extend(&self.heights);
        Ok(c.into())
    }
}

impl From<Vec<usize>> for Complexity {
    fn from(v: Vec<usize>) -> Self {
        Complexity(v)
    }
}

/// In-fill counts of one convexification, per side.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct InfillCount {
    pub upper: usize,
    pub lower: usize,
    pub upper_bound: usize,
    pub lower_bound: usize,
}

/// A layering of a continent: its lower landscape and the order in which
/// tetrahedra are stacked on it. Layer `k` lies above the first `k`.
#[derive(Clone, Debug)]
pub struct Layering {
    pub bottom: BTreeSet<Slot>,
    pub order: Vec<TetId>,
    position: HashMap<TetId, usize>,
}

impl Layering {
    /// Number of layers.
    pub fn len(&self) -> usize {
        self.order.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Calls `f(k, layer)` for every layer, bottom to top.
    pub fn for_each(&self, s: &Session, mut f: impl FnMut(usize, &BTreeSet<Slot>)) {
        let mut cur = self.bottom.clone();
        f(0, &cur);
        for (k, &t) in self.order.iter().enumerate() {
            step_layer(s, &mut cur, t);
            f(k + 1, &cur);
        }
    }

    pub fn layer(&self, s: &Session, k: usize) -> BTreeSet<Slot> {
        let mut cur = self.bottom.clone();
        for &t in &self.order[..k] {
            step_layer(s, &mut cur, t);
        }
        cur
    }

    /// Layers containing a face, as an inclusive range.
    pub fn face_span(&self, s: &Session, (t, f): Slot) -> (usize, usize) {
        let upper = s.v.is_upper_face(s.base(t), f);
        let (below, above) = match (upper, s.neighbour(t, f)) {
            (true, n) => (Some(t), n.map(|x| x.0)),
            (false, n) => (n.map(|x| x.0), Some(t)),
        };
        let first = below.map_or(0, |b| self.position[&b] + 1);
        let last = above.map_or(self.order.len(), |a| self.position[&a]);
        (first, last)
    }

    /// Layer index just above tetrahedron `t`.
    pub fn above(&self, t: TetId) -> usize {
        self.position[&t] + 1
    }
}

fn step_layer(s: &Session, cur: &mut BTreeSet<Slot>, t: TetId) {
    for g in 0..4 {
        if s.v.is_upper_face(s.base(t), g) {
            cur.insert(s.canon_face(t, g));
        } else {
            cur.remove(&s.canon_face(t, g));
        }
    }
}

/// A continent. Every tetrahedron developed in its session belongs to it.
#[derive(Clone, Debug)]
pub struct Continent {
    pub s: Session,
    upper: BTreeSet<Slot>,
    lower: BTreeSet<Slot>,
    coast: Vec<CuspId>,
    pub coastal_landfills: usize,
    pub infills: usize,
    lands: [Landscape; 2],
    /// Edges that may be sinks, per side.
    dirty: [BTreeSet<EdgeKey>; 2],
}

fn side(w: Which) -> usize {
    match w {
        Which::Upper => 0,
        Which::Lower => 1,
    }
}

impl Continent {
    pub fn initial(v: Arc<Veering>, base_tet: usize) -> Result<Continent> {
        let s = Session::new(v, base_tet)?;
        let s0 = &s;
        let empty = [Landscape::new(s0, []), Landscape::new(s0, [])];
        let mut c = Continent {
            s,
            upper: BTreeSet::new(),
            lower: BTreeSet::new(),
            coast: Vec::new(),
            coastal_landfills: 0,
            infills: 0,
            lands: empty,
            dirty: [BTreeSet::new(), BTreeSet::new()],
        };
        for f in 0..4 {
            if c.s.v.is_upper_face(base_tet, f) {
                c.upper.insert((0, f));
            } else {
                c.lower.insert((0, f));
            }
        }
        for w in [Which::Upper, Which::Lower] {
            c.lands[side(w)] = c.landscape(w);
            c.dirty[side(w)] = c.lands[side(w)].edges.keys().copied().collect();
        }
        c.coast = c.landscape(Which::Upper).boundary_cycle()?;
        Ok(c)
    }

    pub fn veering(&self) -> &Veering {
        &self.s.v
    }

    pub fn tet_count(&self) -> usize {
        self.s.len()
    }

    pub fn contains(&self, t: TetId) -> bool {
        t < self.s.len()
    }

    pub fn boundary(&self, w: Which) -> &BTreeSet<Slot> {
        match w {
            Which::Upper => &self.upper,
            Which::Lower => &self.lower,
        }
    }

    pub fn landscape(&self, w: Which) -> Landscape {
        Landscape::new(&self.s, self.boundary(w).iter().copied())
    }

    /// Coastal cusps, anticlockwise from above.
    pub fn coast(&self) -> Vec<CuspId> {
        self.coast.iter().map(|&c| self.s.canon_cusp(c)).collect()
    }

    pub fn cusps(&self) -> BTreeSet<CuspId> {
        (0..self.s.len()).flat_map(|t| self.s.cusps(t)).collect()
    }

    /// Which side's landscape holds `slot`, if any.
    pub fn side_of(&self, slot: Slot) -> Option<Which> {
        if self.upper.contains(&slot) {
            Some(Which::Upper)
        } else if self.lower.contains(&slot) {
            Some(Which::Lower)
        } else {
            None
        }
    }

    pub fn is_convex(&self) -> bool {
        [Which::Upper, Which::Lower]
            .into_iter()
            .all(|w| self.dirty[side(w)].iter().all(|&e| !self.lands[side(w)].is_sink(e, w)))
    }

    /// The first sink in filling order: by least adjacent face, then edge.
    fn first_sink(&mut self, w: Which) -> Option<EdgeKey> {
        let l = &self.lands[side(w)];
        let d = &mut self.dirty[side(w)];
        d.retain(|&e| l.is_sink(e, w));
        d.iter().map(|&e| (l.sink_key(e), e)).min().map(|x| x.1)
    }

    /// Attaches the tetrahedron whose π-edge on side `w` is `mouth`. Returns
    /// the new tetrahedron and whether the landfill was coastal.
    pub fn landfill(&mut self, w: Which, mouth: EdgeKey) -> Result<(TetId, bool)> {
        let l = &self.lands[side(w)];
        let fs = l.edges.get(&mouth).ok_or(Error::NotAMouth)?;
        if !fs.iter().all(|&i| l.faces[i].pointed(w) == mouth) {
            return Err(Error::NotAMouth);
        }
        let lf = l.faces[fs[0]].clone();
        let coastal = fs.len() == 1;
        let n = self.attach(w, lf.slot)?;
        let (a, b) = mouth;
        let key = match w {
            Which::Upper => {
                let [x, y] = self.s.v.bottom_edge(self.s.base(n));
                self.s.edge_key(n, x, y)
            }
            Which::Lower => {
                let [x, y] = self.s.v.top_edge(self.s.base(n));
                self.s.edge_key(n, x, y)
            }
        };
        if key != mouth {
            return Err(Error::Internal("landfill tetrahedron misses the mouth".into()));
        }
        if coastal {
            let g = self.s.link(lf.slot.0, lf.slot.1).expect("just attached").perm.apply(lf.slot.1);
            let new = self.s.cusp(n, g);
            if self.coast.iter().any(|&c| self.s.canon_cusp(c) == new) {
                return Err(Error::Internal("coastal landfill found no new cusp".into()));
            }
            let m = self.coast.len();
            let i = (0..m)
                .find(|&i| {
                    let (p, q) = (self.s.canon_cusp(self.coast[i]), self.s.canon_cusp(self.coast[(i + 1) % m]));
                    edge_key(p, q) == (a, b)
                })
                .ok_or_else(|| Error::Internal("mouth is not a coastal edge".into()))?;
            self.coast.insert(i + 1, new);
            self.coastal_landfills += 1;
        } else {
            self.infills += 1;
        }
        Ok((n, coastal))
    }

    fn attach(&mut self, w: Which, slot: Slot) -> Result<TetId> {
        if self.s.link(slot.0, slot.1).is_some() {
            return Err(Error::Internal("landscape face already covered".into()));
        }
        let n = self.s.attach(slot.0, slot.1)?;
        let nb = self.s.base(n);
        for g in 0..4 {
            match self.s.neighbour(n, g) {
                Some(other) => {
                    let removed = match w {
                        Which::Upper => self.upper.remove(&other),
                        Which::Lower => self.lower.remove(&other),
                    };
                    if !removed {
                        return Err(Error::Internal("landfill glued to a face off the landscape".into()));
                    }
                    let l = &mut self.lands[side(w)];
                    let old = l.faces[l.face_index(other).expect("boundary face")].edges();
                    l.remove(other);
                    self.dirty[side(w)].extend(old);
                }
                None => {
                    let x = if self.s.v.is_upper_face(nb, g) { Which::Upper } else { Which::Lower };
                    match x {
                        Which::Upper => self.upper.insert((n, g)),
                        Which::Lower => self.lower.insert((n, g)),
                    };
                    let l = &mut self.lands[side(x)];
                    l.insert(&self.s, (n, g));
                    self.dirty[side(x)].extend(l.faces[l.faces.len() - 1].edges());
                }
            }
        }
        Ok(n)
    }

    /// In-fills sinks above, then below, until neither track has a sink.
    pub fn convexify(&mut self) -> Result<InfillCount> {
        let mut out = InfillCount::default();
        for w in [Which::Upper, Which::Lower] {
            let n = self.boundary(w).len();
            let bound = n * n.saturating_sub(1) / 2;
            let mut count = 0;
            loop {
                let Some(e) = self.first_sink(w) else { break };
                self.landfill(w, e)?;
                count += 1;
                if count > bound {
                    return Err(Error::Internal("in-fill bound exceeded".into()));
                }
            }
            match w {
                Which::Upper => (out.upper, out.upper_bound) = (count, bound),
                Which::Lower => (out.lower, out.lower_bound) = (count, bound),
            }
        }
        Ok(out)
    }

    fn heights(&self, l: &Landscape, faces: &[usize], falls: &[EdgeKey]) -> Vec<usize> {
        falls
            .iter()
            .zip(faces)
            .map(|(&e, &fi)| {
                let lf = &l.faces[fi];
                let (t, a, b) = lf.model_edge(lf.corner_opposite(e).expect("fall on face"));
                let (count, _) = self.s.edge_star(t, a, b);
                self.s.edge_degree(t, a, b) - count
            })
            .collect()
    }

    fn river_in(&self, l: &Landscape, w: Which, fi: usize) -> River {
        let (faces, falls, mouth, coastal) = l.trace(fi, w);
        River {
            which: w,
            source: l.faces[fi].slot,
            heights: self.heights(l, &faces, &falls),
            faces: faces.iter().map(|&i| l.faces[i].slot).collect(),
            falls,
            mouth,
            mouth_kind: if coastal { MouthKind::Coastal } else { MouthKind::Sink },
            fork: None,
        }
    }

    /// The maximal river with source `slot` for the track on side `w`.
    pub fn maximal_river(&self, w: Which, slot: Slot) -> Result<River> {
        let l = &self.lands[side(w)];
        let fi = l.face_index(slot).ok_or(Error::FaceNotOnBoundary)?;
        Ok(self.river_in(l, w, fi))
    }

    /// The forked river: the maximal river plus, if it ends in a sink, the
    /// face beyond the sink and its two distributaries.
    pub fn forked_river(&self, w: Which, slot: Slot) -> Result<River> {
        let l = self.landscape(w);
        let fi = l.face_index(slot).ok_or(Error::FaceNotOnBoundary)?;
        let mut r = self.river_in(&l, w, fi);
        if r.mouth_kind == MouthKind::Coastal {
            return Ok(r);
        }
        let last = l.face_index(*r.faces.last().expect("nonempty")).expect("face");
        let f0 = l.across(last, r.mouth).expect("sink is interior");
        let k = l.faces[f0].corner_opposite(r.mouth).expect("sink on f0");
        let dist = |e: EdgeKey| -> Distributary {
            match l.across(f0, e) {
                Some(h) if l.faces[h].pointed(w) != e => {
                    let (faces, _, mouth, _) = l.trace(h, w);
                    Distributary { start: e, faces: faces.iter().map(|&i| l.faces[i].slot).collect(), mouth }
                }
                _ => Distributary { start: e, faces: Vec::new(), mouth: e },
            }
        };
        let e0 = l.faces[f0].edge((k + 1) % 3);
        let e1 = l.faces[f0].edge((k + 2) % 3);
        r.fork = Some(Fork { sink: r.mouth, f0: l.faces[f0].slot, distributaries: [dist(e0), dist(e1)] });
        Ok(r)
    }

    /// Coastal landfill at the mouth of the maximal river from `slot`, then
    /// convexification.
    pub fn channelise(&mut self, w: Which, slot: Slot) -> Result<InfillCount> {
        if self.side_of(slot) != Some(w) {
            return Err(Error::FaceNotOnBoundary);
        }
        if !self.is_convex() {
            return Err(Error::NotConvex);
        }
        let r = self.maximal_river(w, slot)?;
        if r.mouth_kind != MouthKind::Coastal {
            return Err(Error::NotConvex);
        }
        self.landfill(w, r.mouth)?;
        self.convexify()
    }

    /// Grows the continent until the face path `path` from `start` stays
    /// inside it, channelising at each face the path is blocked by. At most
    /// `cap` channelisations per crossed face. Returns the final tetrahedron.
    pub fn grow_along(&mut self, start: TetId, path: &[usize], cap: usize) -> Result<TetId> {
        if !self.contains(start) {
            return Err(Error::BadTetIndex(start));
        }
        let mut cur = start;
        for &f in path {
            if f > 3 {
                return Err(Error::InvalidGluing(format!("face index {f}")));
            }
            let mut rounds = 0;
            while self.s.link(cur, f).is_none() {
                if rounds == cap {
                    return Err(Error::DepthExhausted(format!(
                        "face {f} of lifted tetrahedron {cur} still uncovered after {cap} channelisations"
                    )));
                }
                let w = if self.s.v.is_upper_face(self.s.base(cur), f) { Which::Upper } else { Which::Lower };
                self.channelise(w, (cur, f))?;
                rounds += 1;
            }
            cur = self.s.link(cur, f).expect("covered").tet;
        }
        Ok(cur)
    }

    /// Spanning landscapes from the lower landscape up to the upper one,
    /// consecutive layers cobounding one tetrahedron. Among the tetrahedra
    /// ready to be stacked the least is taken first.
    pub fn extract_layering(&self) -> Result<Layering> {
        let s = &self.s;
        let v = &s.v;
        let n = s.len();
        let lower_faces = |t: TetId| (0..4).filter(move |&g| !v.is_upper_face(s.base(t), g));
        let upper_faces = |t: TetId| (0..4).filter(move |&g| v.is_upper_face(s.base(t), g));
        let mut cur: BTreeSet<Slot> = self.lower.clone();
        let ready = |cur: &BTreeSet<Slot>, t: TetId| lower_faces(t).all(|g| cur.contains(&s.canon_face(t, g)));
        let mut placed = vec![false; n];
        let mut queue: BTreeSet<TetId> = (0..n).filter(|&t| ready(&cur, t)).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(t) = queue.pop_first() {
            if placed[t] {
                continue;
            }
            placed[t] = true;
            step_layer(s, &mut cur, t);
            for g in upper_faces(t) {
                if let Some((u, _)) = s.neighbour(t, g) {
                    if !placed[u] && ready(&cur, u) {
                        queue.insert(u);
                    }
                }
            }
            order.push(t);
        }
        if placed.iter().any(|p| !p) {
            return Err(Error::Internal("continent is not layered".into()));
        }
        if cur != self.upper {
            return Err(Error::Internal("layering does not end at the upper landscape".into()));
        }
        let position = order.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        Ok(Layering { bottom: self.lower.clone(), order, position })
    }

    pub fn layer_landscape(&self, layer: &BTreeSet<Slot>) -> Landscape {
        Landscape::new(&self.s, layer.iter().copied())
    }

    /// Checks the boundary invariants of a continent.
    pub fn validate(&self) -> Result<()> {
        if self.s.cusp_merges() != 0 {
            return Err(Error::Internal("two developed cusps were identified late".into()));
        }
        let coast = rotate_to_min(&self.coast());
        let up = self.landscape(Which::Upper);
        let lo = self.landscape(Which::Lower);
        for l in [&up, &lo] {
            l.validate_disk()?;
            if l.boundary_cycle()? != coast {
                return Err(Error::Internal("landscape coast disagrees with the continent".into()));
            }
        }
        if up.coastal_edges() != lo.coastal_edges() {
            return Err(Error::Internal("landscapes meet away from the coast".into()));
        }
        let shared = up.edges.keys().filter(|e| lo.contains_edge(**e)).count();
        if shared != coast.len() {
            return Err(Error::Internal("landscapes share an interior edge".into()));
        }
        if self.cusps() != coast.iter().copied().collect() {
            return Err(Error::Internal("continent has a cusp off the coast".into()));
        }
        Ok(())
    }

    /// Edges of the continent joining the same pair of cusps as another edge,
    /// or joining a cusp to itself.
    pub fn parallel_edges(&self) -> Vec<EdgeKey> {
        let mut seen: BTreeMap<EdgeKey, usize> = BTreeMap::new();
        let mut bad = BTreeSet::new();
        for t in 0..self.s.len() {
            for (a, b) in crate::perm::EDGE_VERTS {
                let key = self.s.edge_key(t, a, b);
                let class = self.s.edge_class(t, a, b);
                if key.0 == key.1 {
                    bad.insert(key);
                }
                if let Some(&c) = seen.get(&key) {
                    if c != class {
                        bad.insert(key);
                    }
                } else {
                    seen.insert(key, class);
                }
            }
        }
        bad.into_iter().collect()
    }

    pub fn has_edge(&self, e: EdgeKey) -> bool {
        (0..self.s.len()).any(|t| crate::perm::EDGE_VERTS.iter().any(|&(a, b)| self.s.edge_key(t, a, b) == e))
    }

    /// Number of distinct lifted edges in the continent.
    pub fn edge_count(&self) -> usize {
        let mut keys = BTreeSet::new();
        for t in 0..self.s.len() {
            for (a, b) in crate::perm::EDGE_VERTS {
                keys.insert(self.s.edge_key(t, a, b));
            }
        }
        keys.len()
    }

    pub fn dump_json(&self) -> Value {
        let tets: Vec<Value> = (0..self.s.len())
            .map(|t| {
                let nb: Vec<Value> = (0..4)
                    .map(|f| match self.s.link(t, f) {
                        Some(l) => json!({"tet": l.tet, "face": l.perm.apply(f), "perm": l.perm.index()}),
                        None => Value::Null,
                    })
                    .collect();
                json!({"id": t, "base": self.s.base(t), "cusps": self.s.cusps(t), "neighbours": nb})
            })
            .collect();
        let faces = |w: Which| -> Vec<Value> {
            self.landscape(w)
                .faces
                .iter()
                .map(|f| json!({"tet": f.slot.0, "face": f.slot.1, "cusps": f.cusps}))
                .collect()
        };
        json!({
            "tets": tets,
            "upper": faces(Which::Upper),
            "lower": faces(Which::Lower),
            "coast": self.coast(),
        })
    }
}

/// Rotates a cycle so that its least element comes first.
pub fn rotate_to_min(c: &[CuspId]) -> Vec<CuspId> {
    let Some(i) = c.iter().enumerate().min_by_key(|(_, x)| **x).map(|(i, _)| i) else {
        return Vec::new();
    };
    c[i..].iter().chain(&c[..i]).copied().collect()
}
