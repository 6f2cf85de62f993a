//! Ideal triangulations given by face gluings.

use crate::error::{Error, Result};
use crate::perm::{edge_index, Perm4, EDGE_VERTS};
use crate::uf::UnionFind;
use serde::Serialize;

/// Face `f` of one tetrahedron glued to face `perm(f)` of `tet`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Gluing {
    pub tet: usize,
    pub perm: Perm4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    gluings: Vec<[Option<Gluing>; 4]>,
    edge_class: Vec<[usize; 6]>,
    vertex_class: Vec<[usize; 4]>,
    edge_members: Vec<Vec<(usize, usize)>>,
    vertex_members: Vec<Vec<(usize, usize)>>,
}

impl Triangulation {
    /// Builds a triangulation, checking that the gluings are mutually inverse.
    pub fn new(gluings: Vec<[Option<Gluing>; 4]>) -> Result<Self> {
        let n = gluings.len();
        for (t, faces) in gluings.iter().enumerate() {
            for (f, g) in faces.iter().enumerate() {
                let Some(g) = g else { continue };
                if g.tet >= n {
                    return Err(Error::InvalidGluing(format!("tet {t} face {f} glued to missing tet {}", g.tet)));
                }
                let f2 = g.perm.apply(f);
                let back = gluings[g.tet][f2].ok_or_else(|| {
                    Error::InvalidGluing(format!("tet {t} face {f} has no reverse gluing"))
                })?;
                if back.tet != t || back.perm != g.perm.inverse() {
                    return Err(Error::InvalidGluing(format!("tet {t} face {f} gluing is not an involution")));
                }
                if g.tet == t && f2 == f {
                    let fixes_face = (0..4).filter(|&v| v != f).all(|v| g.perm.apply(v) == v);
                    if fixes_face {
                        return Err(Error::InvalidGluing(format!("tet {t} face {f} glued to itself by the identity")));
                    }
                }
            }
        }
        let mut euf = UnionFind::new(6 * n);
        let mut vuf = UnionFind::new(4 * n);
        for (t, faces) in gluings.iter().enumerate() {
            for (f, g) in faces.iter().enumerate() {
                let Some(g) = g else { continue };
                for v in (0..4).filter(|&v| v != f) {
                    vuf.union(4 * t + v, 4 * g.tet + g.perm.apply(v));
                }
                for (a, b) in EDGE_VERTS {
                    if a == f || b == f {
                        continue;
                    }
                    let e1 = 6 * t + edge_index(a, b);
                    let e2 = 6 * g.tet + edge_index(g.perm.apply(a), g.perm.apply(b));
                    euf.union(e1, e2);
                }
            }
        }
        let (edge_class, edge_members) = number_classes(&mut euf, n, 6);
        let (vertex_class, vertex_members) = number_classes(&mut vuf, n, 4);
        Ok(Triangulation {
            gluings,
            edge_class: edge_class.into_iter().map(|v| v.try_into().unwrap()).collect(),
            vertex_class: vertex_class.into_iter().map(|v| v.try_into().unwrap()).collect(),
            edge_members,
            vertex_members,
        })
    }

    pub fn empty() -> Self {
        Triangulation::new(Vec::new()).expect("empty triangulation")
    }

    pub fn tet_count(&self) -> usize {
        self.gluings.len()
    }

    pub fn gluing(&self, tet: usize, face: usize) -> Option<Gluing> {
        self.gluings[tet][face]
    }

    pub fn gluings(&self) -> &[[Option<Gluing>; 4]] {
        &self.gluings
    }

    pub fn is_closed(&self) -> bool {
        self.gluings.iter().all(|fs| fs.iter().all(|g| g.is_some()))
    }

    pub fn edge_count(&self) -> usize {
        self.edge_members.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_members.len()
    }

    /// Edge class of model edge `e` of tetrahedron `t`.
    pub fn edge_class(&self, t: usize, e: usize) -> usize {
        self.edge_class[t][e]
    }

    pub fn vertex_class(&self, t: usize, v: usize) -> usize {
        self.vertex_class[t][v]
    }

    /// Model edges `(tet, edge)` in the class.
    pub fn edge_members(&self, class: usize) -> &[(usize, usize)] {
        &self.edge_members[class]
    }

    pub fn vertex_members(&self, class: usize) -> &[(usize, usize)] {
        &self.vertex_members[class]
    }

    /// Number of model edges in the class.
    pub fn edge_degree(&self, class: usize) -> usize {
        self.edge_members[class].len()
    }

    pub fn max_edge_degree(&self) -> usize {
        self.edge_members.iter().map(|m| m.len()).max().unwrap_or(0)
    }

    /// Relabels tetrahedra by `tet_map` and each tetrahedron's vertices by
    /// `vert_maps[t]` (old label to new label).
    pub fn relabel(&self, tet_map: &[usize], vert_maps: &[Perm4]) -> Result<Triangulation> {
        let n = self.tet_count();
        let mut out = vec![[None; 4]; n];
        for t in 0..n {
            for f in 0..4 {
                if let Some(g) = self.gluings[t][f] {
                    let nt = tet_map[t];
                    let nf = vert_maps[t].apply(f);
                    let perm = vert_maps[g.tet].compose(g.perm).compose(vert_maps[t].inverse());
                    out[nt][nf] = Some(Gluing { tet: tet_map[g.tet], perm });
                }
            }
        }
        Triangulation::new(out)
    }
}

fn number_classes(uf: &mut UnionFind, n: usize, k: usize) -> (Vec<Vec<usize>>, Vec<Vec<(usize, usize)>>) {
    let mut id = vec![usize::MAX; n * k];
    let mut members: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut class = vec![vec![0usize; k]; n];
    for t in 0..n {
        for i in 0..k {
            let r = uf.find(k * t + i);
            if id[r] == usize::MAX {
                id[r] = members.len();
                members.push(Vec::new());
            }
            class[t][i] = id[r];
            members[id[r]].push((t, i));
        }
    }
    (class, members)
}
