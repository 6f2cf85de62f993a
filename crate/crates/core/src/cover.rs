//! Lazy development of the universal cover.
//!
//! Lifted tetrahedra are created only when a face is resolved. After every
//! new face link the session walks around each edge of that face; when the
//! chain of developed tetrahedra around an edge has as many members as the
//! edge has degree, the two free faces at its ends are linked as well.

use crate::error::{Error, Result};
use crate::perm::{edge_index, face_verts, Perm4};
use crate::structure::{EdgeWalk, Veering};
use crate::uf::UnionFind;
use std::sync::Arc;

pub type TetId = usize;
pub type CuspId = usize;
/// A lifted edge, named by its two cusps in increasing order.
pub type EdgeKey = (CuspId, CuspId);

pub fn edge_key(a: CuspId, b: CuspId) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Link {
    pub tet: TetId,
    pub perm: Perm4,
}

#[derive(Clone, Debug)]
pub struct LiftedTet {
    pub base: usize,
    pub neighbour: [Option<Link>; 4],
}

/// One development of the universal cover. Single-threaded and mutable.
#[derive(Clone, Debug)]
pub struct Session {
    pub v: Arc<Veering>,
    tets: Vec<LiftedTet>,
    vuf: UnionFind,
    euf: UnionFind,
    merges: usize,
}

impl Session {
    /// Starts a development whose root lifts base tetrahedron `root_base`.
    pub fn new(v: Arc<Veering>, root_base: usize) -> Result<Session> {
        if root_base >= v.tet_count() {
            return Err(Error::BadTetIndex(root_base));
        }
        if !v.tri.is_closed() {
            return Err(Error::InvalidGluing("triangulation has unglued faces".into()));
        }
        let mut s = Session { v, tets: Vec::new(), vuf: UnionFind::new(0), euf: UnionFind::new(0), merges: 0 };
        s.push_tet(root_base);
        Ok(s)
    }

    fn push_tet(&mut self, base: usize) -> TetId {
        let id = self.tets.len();
        self.tets.push(LiftedTet { base, neighbour: [None; 4] });
        self.vuf.grow(4);
        self.euf.grow(6);
        id
    }

    pub fn root(&self) -> TetId {
        0
    }

    pub fn len(&self) -> usize {
        self.tets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tets.is_empty()
    }

    pub fn base(&self, t: TetId) -> usize {
        self.tets[t].base
    }

    pub fn link(&self, t: TetId, f: usize) -> Option<Link> {
        self.tets[t].neighbour[f]
    }

    /// Neighbour across face `f` as `(tet, face)`, if already resolved.
    pub fn neighbour(&self, t: TetId, f: usize) -> Option<(TetId, usize)> {
        self.tets[t].neighbour[f].map(|l| (l.tet, l.perm.apply(f)))
    }

    /// Number of times two previously distinct cusp classes were merged.
    pub fn cusp_merges(&self) -> usize {
        self.merges
    }

    pub fn cusp(&self, t: TetId, v: usize) -> CuspId {
        self.vuf.find_const(4 * t + v)
    }

    /// Canonical form of a possibly stale cusp id.
    pub fn canon_cusp(&self, c: CuspId) -> CuspId {
        self.vuf.find_const(c)
    }

    pub fn cusps(&self, t: TetId) -> [CuspId; 4] {
        [self.cusp(t, 0), self.cusp(t, 1), self.cusp(t, 2), self.cusp(t, 3)]
    }

    pub fn edge_key(&self, t: TetId, a: usize, b: usize) -> EdgeKey {
        edge_key(self.cusp(t, a), self.cusp(t, b))
    }

    /// Class of model edge `{a, b}` of `t` under resolved identifications.
    pub fn edge_class(&self, t: TetId, a: usize, b: usize) -> usize {
        self.euf.find_const(6 * t + edge_index(a, b))
    }

    /// Degree in the triangulation of the base edge under `{a, b}` of `t`.
    pub fn edge_degree(&self, t: TetId, a: usize, b: usize) -> usize {
        let tri = &self.v.tri;
        tri.edge_degree(tri.edge_class(self.base(t), edge_index(a, b)))
    }

    /// Canonical slot for the face `(t, f)`: the smaller of its two slots.
    pub fn canon_face(&self, t: TetId, f: usize) -> (TetId, usize) {
        match self.neighbour(t, f) {
            Some(other) if other < (t, f) => other,
            _ => (t, f),
        }
    }

    /// Resolves face `f` of `t`, creating the neighbouring lifted tetrahedron
    /// if needed.
    pub fn attach(&mut self, t: TetId, f: usize) -> Result<TetId> {
        if let Some(l) = self.tets[t].neighbour[f] {
            return Ok(l.tet);
        }
        let g = self
            .v
            .tri
            .gluing(self.base(t), f)
            .ok_or_else(|| Error::InvalidGluing("unglued face".into()))?;
        let n = self.push_tet(g.tet);
        self.join(t, f, n, g.perm)?;
        Ok(n)
    }

    fn join(&mut self, t: TetId, f: usize, n: TetId, perm: Perm4) -> Result<()> {
        let mut work = Vec::new();
        self.join_one(t, f, n, perm, &mut work);
        while let Some((x, a, b)) = work.pop() {
            self.close_edge(x, a, b, &mut work)?;
        }
        Ok(())
    }

    fn join_one(&mut self, t: TetId, f: usize, n: TetId, perm: Perm4, work: &mut Vec<(TetId, usize, usize)>) {
        let f2 = perm.apply(f);
        debug_assert!(self.tets[t].neighbour[f].is_none() && self.tets[n].neighbour[f2].is_none());
        self.tets[t].neighbour[f] = Some(Link { tet: n, perm });
        self.tets[n].neighbour[f2] = Some(Link { tet: t, perm: perm.inverse() });
        let fv = face_verts(f);
        for &v in &fv {
            let a = self.vuf.find(4 * t + v);
            let b = self.vuf.find(4 * n + perm.apply(v));
            let newest = 4 * (self.tets.len() - 1);
            if a != b && a < newest && b < newest {
                self.merges += 1;
            }
            self.vuf.union(a, b);
        }
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, b) = (fv[i], fv[j]);
                self.euf.union(6 * t + edge_index(a, b), 6 * n + edge_index(perm.apply(a), perm.apply(b)));
                work.push((t, a, b));
            }
        }
    }

    fn close_edge(&mut self, t: TetId, a: usize, b: usize, work: &mut Vec<(TetId, usize, usize)>) -> Result<()> {
        let deg = self.edge_degree(t, a, b);
        let others: Vec<usize> = (0..4).filter(|&x| x != a && x != b).collect();
        let start = EdgeWalk { tet: t, a, b, c: others[0], d: others[1] };
        let mut fwd = start;
        let mut count = 1;
        loop {
            match self.step(fwd) {
                Some(n) => {
                    if n.tet == t {
                        return Ok(());
                    }
                    fwd = n;
                    count += 1;
                }
                None => break,
            }
            if count > deg {
                return Err(Error::Internal("edge cycle longer than its degree".into()));
            }
        }
        let mut bwd = EdgeWalk { tet: t, a, b, c: others[1], d: others[0] };
        while let Some(n) = self.step(bwd) {
            bwd = n;
            count += 1;
            if count > deg {
                return Err(Error::Internal("edge cycle longer than its degree".into()));
            }
        }
        if count < deg {
            return Ok(());
        }
        let g = self
            .v
            .tri
            .gluing(self.base(fwd.tet), fwd.c)
            .ok_or_else(|| Error::InvalidGluing("unglued face".into()))?;
        let p = g.perm;
        let consistent = g.tet == self.base(bwd.tet)
            && p.apply(fwd.a) == bwd.a
            && p.apply(fwd.b) == bwd.b
            && p.apply(fwd.c) == bwd.c
            && p.apply(fwd.d) == bwd.d;
        if !consistent {
            return Err(Error::Internal("edge closure disagrees with base gluing".into()));
        }
        self.join_one(fwd.tet, fwd.c, bwd.tet, p, work);
        Ok(())
    }

    /// Number of developed tetrahedra around model edge `{a, b}` of `t`, and
    /// whether they close up into a full cycle.
    pub fn edge_star(&self, t: TetId, a: usize, b: usize) -> (usize, bool) {
        let others: Vec<usize> = (0..4).filter(|&x| x != a && x != b).collect();
        let mut w = EdgeWalk { tet: t, a, b, c: others[0], d: others[1] };
        let mut count = 1;
        while let Some(n) = self.step(w) {
            if n.tet == t && n.a == a {
                return (count, true);
            }
            w = n;
            count += 1;
        }
        let mut w = EdgeWalk { tet: t, a, b, c: others[1], d: others[0] };
        while let Some(n) = self.step(w) {
            w = n;
            count += 1;
        }
        (count, false)
    }

    /// Developed tetrahedra around an edge as `(tet, a, b)` triples.
    pub fn edge_tets(&self, t: TetId, a: usize, b: usize) -> Vec<(TetId, usize, usize)> {
        let others: Vec<usize> = (0..4).filter(|&x| x != a && x != b).collect();
        let mut out = vec![(t, a, b)];
        let mut w = EdgeWalk { tet: t, a, b, c: others[0], d: others[1] };
        while let Some(n) = self.step(w) {
            if n.tet == t && n.a == a {
                return out;
            }
            out.push((n.tet, n.a, n.b));
            w = n;
        }
        let mut w = EdgeWalk { tet: t, a, b, c: others[1], d: others[0] };
        while let Some(n) = self.step(w) {
            out.push((n.tet, n.a, n.b));
            w = n;
        }
        out
    }

    pub fn step(&self, w: EdgeWalk) -> Option<EdgeWalk> {
        let l = self.tets[w.tet].neighbour[w.c]?;
        let s = l.perm;
        Some(EdgeWalk { tet: l.tet, a: s.apply(w.a), b: s.apply(w.b), c: s.apply(w.d), d: s.apply(w.c) })
    }
}
