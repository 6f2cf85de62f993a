//! The circular order on cusps of the universal cover, read off coasts of
//! continents.

use crate::continent::{rotate_to_min, Continent, Which};
use crate::cover::{CuspId, EdgeKey, TetId};
use crate::error::{Error, Result};
use crate::structure::Veering;
use serde::Serialize;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Default number of channelisations allowed per crossed face.
pub const DEFAULT_MAX_DEPTH: usize = 64;

/// Depth cap, overridable by `VEERKIT_MAX_DEPTH`.
pub fn max_depth_from_env() -> usize {
    std::env::var("VEERKIT_MAX_DEPTH")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&d| d > 0)
        .unwrap_or(DEFAULT_MAX_DEPTH)
}

/// Positions of cusps around a coast.
#[derive(Clone, Debug, Default)]
pub struct CoastIndex {
    pos: HashMap<CuspId, usize>,
    len: usize,
}

impl CoastIndex {
    pub fn new(coast: &[CuspId]) -> CoastIndex {
        CoastIndex { pos: coast.iter().enumerate().map(|(i, &c)| (c, i)).collect(), len: coast.len() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, c: CuspId) -> bool {
        self.pos.contains_key(&c)
    }

    /// +1 if `a, b, c` are anticlockwise, -1 if clockwise, 0 if not distinct.
    pub fn sign(&self, a: CuspId, b: CuspId, c: CuspId) -> i8 {
        if a == b || b == c || a == c {
            return 0;
        }
        let n = self.len;
        let (pa, pb, pc) = (self.pos[&a], self.pos[&b], self.pos[&c]);
        let db = (pb + n - pa) % n;
        let dc = (pc + n - pa) % n;
        if db < dc {
            1
        } else {
            -1
        }
    }

    /// Anticlockwise distance from `from` to `x`.
    pub fn offset(&self, from: CuspId, x: CuspId) -> usize {
        (self.pos[&x] + self.len - self.pos[&from]) % self.len
    }

    /// Whether `x` lies in the anticlockwise arc from `start` to `end`,
    /// endpoints included.
    pub fn in_arc(&self, start: CuspId, end: CuspId, x: CuspId) -> bool {
        x == start || x == end || self.sign(start, x, end) == 1
    }

    /// Whether `x` lies strictly inside the anticlockwise arc.
    pub fn in_open_arc(&self, start: CuspId, end: CuspId, x: CuspId) -> bool {
        x != start && x != end && self.sign(start, x, end) == 1
    }
}

/// The coast of a continent, anticlockwise from above, starting at the least
/// cusp. Both landscapes must read the same cycle.
pub fn coastal_order(c: &Continent) -> Result<Vec<CuspId>> {
    let up = c.landscape(Which::Upper).boundary_cycle()?;
    let lo = c.landscape(Which::Lower).boundary_cycle()?;
    if up != lo {
        return Err(Error::Internal("upper and lower coasts disagree".into()));
    }
    let stored = rotate_to_min(&c.coast());
    if stored != up {
        return Err(Error::Internal("stored coast disagrees with the landscapes".into()));
    }
    Ok(up)
}

/// A cusp of the cover named by a face path from the root and a vertex of
/// the tetrahedron the path ends in. The path is the breadth-first path to
/// the canonical lift of base tetrahedron `tet`, followed by `faces`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CuspName {
    pub tet: usize,
    pub vertex: usize,
    pub faces: Vec<usize>,
}

impl CuspName {
    pub fn new(tet: usize, vertex: usize, faces: Vec<usize>) -> CuspName {
        CuspName { tet, vertex, faces }
    }

    /// The translate by the deck transformation whose loop from the root is
    /// `gamma`, given the breadth-first paths of the triangulation.
    pub fn translate(&self, gamma: &[usize], bfs: &[Vec<usize>]) -> CuspName {
        let mut faces = gamma.to_vec();
        faces.extend(&bfs[self.tet]);
        faces.extend(&self.faces);
        CuspName { tet: 0, vertex: self.vertex, faces }
    }
}

impl fmt::Display for CuspName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}.v{}", self.tet, self.vertex)?;
        for g in &self.faces {
            write!(f, "/g{g}")?;
        }
        Ok(())
    }
}

impl FromStr for CuspName {
    type Err = Error;

    fn from_str(s: &str) -> Result<CuspName> {
        let bad = || Error::BadCuspName(s.to_string());
        let mut parts = s.split('/');
        let head = parts.next().ok_or_else(bad)?;
        let (t, v) = head.split_once('.').ok_or_else(bad)?;
        let tet = t.strip_prefix('t').and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let vertex: usize = v.strip_prefix('v').and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        if vertex > 3 {
            return Err(bad());
        }
        let faces = parts
            .map(|p| p.strip_prefix('g').and_then(|x| x.parse::<usize>().ok()).filter(|&f| f < 4).ok_or_else(bad))
            .collect::<Result<Vec<_>>>()?;
        Ok(CuspName { tet, vertex, faces })
    }
}

/// Breadth-first face paths from tetrahedron 0 to every tetrahedron, trying
/// faces in increasing order.
pub fn bfs_paths(v: &Veering) -> Vec<Vec<usize>> {
    let n = v.tet_count();
    let mut paths: Vec<Option<Vec<usize>>> = vec![None; n];
    if n == 0 {
        return Vec::new();
    }
    paths[0] = Some(Vec::new());
    let mut q = VecDeque::from([0]);
    while let Some(t) = q.pop_front() {
        for f in 0..4 {
            if let Some(g) = v.tri.gluing(t, f) {
                if paths[g.tet].is_none() {
                    let mut p = paths[t].clone().expect("visited");
                    p.push(f);
                    paths[g.tet] = Some(p);
                    q.push_back(g.tet);
                }
            }
        }
    }
    paths.into_iter().map(|p| p.unwrap_or_default()).collect()
}

/// Answers circular-order queries on named cusps by growing one continent.
#[derive(Clone, Debug)]
pub struct OrderOracle {
    pub c: Continent,
    pub cap: usize,
    bfs: Vec<Vec<usize>>,
    memo: HashMap<(CuspId, CuspId, CuspId), i8>,
    paths: HashMap<Vec<usize>, TetId>,
    index: CoastIndex,
    index_version: usize,
}

impl OrderOracle {
    pub fn new(v: Arc<Veering>, cap: usize) -> Result<OrderOracle> {
        let bfs = bfs_paths(&v);
        let c = Continent::initial(v, 0)?;
        let index = CoastIndex::new(&c.coast());
        let version = c.tet_count();
        Ok(OrderOracle { c, cap, bfs, memo: HashMap::new(), paths: HashMap::new(), index, index_version: version })
    }

    pub fn bfs(&self) -> &[Vec<usize>] {
        &self.bfs
    }

    /// The lifted tetrahedron at the end of a face path from the root.
    pub fn resolve_path(&mut self, path: &[usize]) -> Result<TetId> {
        if let Some(&t) = self.paths.get(path) {
            return Ok(t);
        }
        let t = self.c.grow_along(self.c.s.root(), path, self.cap)?;
        self.paths.insert(path.to_vec(), t);
        Ok(t)
    }

    pub fn full_path(&self, name: &CuspName) -> Result<Vec<usize>> {
        let head = self.bfs.get(name.tet).ok_or(Error::BadTetIndex(name.tet))?;
        Ok(head.iter().chain(&name.faces).copied().collect())
    }

    pub fn cusp(&mut self, name: &CuspName) -> Result<CuspId> {
        let path = self.full_path(name)?;
        let t = self.resolve_path(&path)?;
        Ok(self.c.s.cusp(t, name.vertex))
    }

    /// The current coast index, refreshed if the continent has grown.
    pub fn index(&mut self) -> &CoastIndex {
        if self.index_version != self.c.tet_count() {
            self.index = CoastIndex::new(&self.c.coast());
            self.index_version = self.c.tet_count();
        }
        &self.index
    }

    /// Order of three cusps already in the continent.
    pub fn sign(&mut self, a: CuspId, b: CuspId, c: CuspId) -> i8 {
        if let Some(&s) = self.memo.get(&(a, b, c)) {
            return s;
        }
        let s = self.index().sign(a, b, c);
        self.memo.insert((a, b, c), s);
        s
    }

    pub fn order(&mut self, a: &CuspName, b: &CuspName, c: &CuspName) -> Result<i8> {
        let (x, y, z) = (self.cusp(a)?, self.cusp(b)?, self.cusp(c)?);
        Ok(self.sign(x, y, z))
    }

    /// Memoised answers that disagree with the current continent.
    pub fn recheck_memo(&mut self) -> usize {
        let idx = CoastIndex::new(&self.c.coast());
        self.memo.iter().filter(|(&(a, b, c), &s)| idx.sign(a, b, c) != s).count()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CompatibilityReport {
    pub faces_checked: usize,
    pub failures: Vec<(TetId, usize)>,
}

impl CompatibilityReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that every face of every tetrahedron of the continent is ordered
/// anticlockwise from above by the coastal order.
pub fn check_compatibility(c: &Continent) -> CompatibilityReport {
    let idx = CoastIndex::new(&c.coast());
    let mut r = CompatibilityReport::default();
    for t in 0..c.tet_count() {
        for f in 0..4 {
            let vs = c.s.v.face_ccw_from_above(c.s.base(t), f);
            let [a, b, d] = vs.map(|x| c.s.cusp(t, x));
            r.faces_checked += 1;
            if idx.sign(a, b, d) != 1 {
                r.failures.push((t, f));
            }
        }
    }
    r
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DeckReport {
    pub gamma: Vec<usize>,
    pub triples_checked: usize,
    pub failures: usize,
}

impl DeckReport {
    pub fn passes(&self) -> bool {
        self.failures == 0
    }
}

/// Compares the order of sampled triples with that of their translates by
/// the deck transformation with loop `gamma`.
pub fn check_deck_invariance(
    o: &mut OrderOracle,
    gamma: &[usize],
    triples: &[(CuspName, CuspName, CuspName)],
) -> Result<DeckReport> {
    let end = o.resolve_path(gamma)?;
    if o.c.s.base(end) != 0 {
        return Err(Error::InvalidGluing("deck loop does not return to tetrahedron 0".into()));
    }
    let mut r = DeckReport { gamma: gamma.to_vec(), ..Default::default() };
    let bfs = o.bfs.clone();
    for (a, b, c) in triples {
        let s0 = o.order(a, b, c)?;
        let s1 = o.order(&a.translate(gamma, &bfs), &b.translate(gamma, &bfs), &c.translate(gamma, &bfs))?;
        r.triples_checked += 1;
        if s0 != s1 {
            r.failures += 1;
        }
    }
    Ok(r)
}

/// Closed face paths from tetrahedron 0 without immediate backtracking, in
/// order of length then lexicographically, whose lift does not close up.
pub fn deck_loops(o: &mut OrderOracle, count: usize, max_len: usize) -> Result<Vec<Vec<usize>>> {
    let v = o.c.s.v.clone();
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<usize>, usize, Option<usize>)> = vec![(Vec::new(), 0, None)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (p, t, back) in frontier {
            for f in 0..4 {
                if Some(f) == back {
                    continue;
                }
                let g = v.tri.gluing(t, f).ok_or_else(|| Error::InvalidGluing("unglued face".into()))?;
                let mut q = p.clone();
                q.push(f);
                if g.tet == 0 {
                    let end = o.resolve_path(&q)?;
                    if end != o.c.s.root() {
                        out.push(q.clone());
                        if out.len() == count {
                            return Ok(out);
                        }
                    }
                }
                next.push((q, g.tet, Some(g.perm.apply(f))));
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// The arc of the coast cut off by an edge, on the side of a reference cusp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoastalArc {
    pub edge: EdgeKey,
    /// Anticlockwise from `start` to `end`, endpoints included.
    pub start: CuspId,
    pub end: CuspId,
    pub cusps: Vec<CuspId>,
}

impl CoastalArc {
    pub fn contains(&self, idx: &CoastIndex, x: CuspId) -> bool {
        idx.in_arc(self.start, self.end, x)
    }

    /// `other` lies inside `self`.
    pub fn contains_arc(&self, idx: &CoastIndex, other: &CoastalArc) -> bool {
        let rel = |x: CuspId| idx.offset(self.start, x);
        let (a, b, e) = (rel(other.start), rel(other.end), rel(self.end));
        a <= b && b <= e
    }
}

/// The arc of the coast between the endpoints of `edge` containing `toward`.
pub fn coastal_arc(c: &Continent, edge: EdgeKey, toward: CuspId) -> Result<CoastalArc> {
    let coast = c.coast();
    let idx = CoastIndex::new(&coast);
    let (a, b) = edge;
    if !idx.contains(a) || !idx.contains(b) || !idx.contains(toward) || !c.has_edge(edge) {
        return Err(Error::EdgeNotInContinent);
    }
    if toward == a || toward == b {
        return Err(Error::EdgeNotInContinent);
    }
    let (start, end) = if idx.sign(a, toward, b) == 1 { (a, b) } else { (b, a) };
    Ok(arc_between(&coast, &idx, edge, start, end))
}

pub fn arc_between(coast: &[CuspId], idx: &CoastIndex, edge: EdgeKey, start: CuspId, end: CuspId) -> CoastalArc {
    let n = coast.len();
    let i0 = idx.pos[&start];
    let mut cusps = Vec::new();
    let mut i = i0;
    loop {
        cusps.push(coast[i]);
        if coast[i] == end {
            break;
        }
        i = (i + 1) % n;
    }
    CoastalArc { edge, start, end, cusps }
}
