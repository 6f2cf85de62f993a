//! Taut, transverse taut and veering structures, and their local checks.

use crate::error::{Error, NotVeeringReason, Result};
use crate::isosig::{pair_edges, pair_of, parse_taut_isosig};
use crate::perm::{edge_index, face_verts, face_verts_outward, EDGE_VERTS};
use crate::tri::Triangulation;
use serde::Serialize;
use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum Colour {
    Red,
    Blue,
}

impl Colour {
    pub fn other(self) -> Colour {
        match self {
            Colour::Red => Colour::Blue,
            Colour::Blue => Colour::Red,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TetKind {
    ToggleRedTop,
    ToggleBlueTop,
    FanRed,
    FanBlue,
}

impl TetKind {
    pub fn is_toggle(self) -> bool {
        matches!(self, TetKind::ToggleRedTop | TetKind::ToggleBlueTop)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EdgeTaut {
    pub class: usize,
    pub degree: usize,
    pub pi_count: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VertexTaut {
    pub class: usize,
    pub corners: usize,
    /// Number of corners whose three angles sum to π.
    pub corners_summing_to_pi: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub enum TautViolation {
    Edge { class: usize, pi_count: usize },
    Vertex { class: usize },
    BadAngle { tet: usize },
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TautCertificate {
    pub edges: Vec<EdgeTaut>,
    pub vertices: Vec<VertexTaut>,
    pub violations: Vec<TautViolation>,
}

impl TautCertificate {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// True if model edge `e` of a tetrahedron with pair index `p` has angle π.
pub fn is_pi_edge(p: u8, e: usize) -> bool {
    let (a, b) = EDGE_VERTS[e];
    pair_of(a, b) == p
}

pub fn check_taut(tri: &Triangulation, pi_pairs: &[u8]) -> TautCertificate {
    let mut violations = Vec::new();
    if pi_pairs.len() != tri.tet_count() {
        violations.push(TautViolation::BadAngle { tet: pi_pairs.len().min(tri.tet_count()) });
        return TautCertificate { edges: Vec::new(), vertices: Vec::new(), violations };
    }
    for (t, &p) in pi_pairs.iter().enumerate() {
        if p > 2 {
            violations.push(TautViolation::BadAngle { tet: t });
        }
    }
    if !violations.is_empty() {
        return TautCertificate { edges: Vec::new(), vertices: Vec::new(), violations };
    }
    let mut edges = Vec::new();
    for class in 0..tri.edge_count() {
        let pi_count = tri
            .edge_members(class)
            .iter()
            .filter(|&&(t, e)| is_pi_edge(pi_pairs[t], e))
            .count();
        if pi_count != 2 {
            violations.push(TautViolation::Edge { class, pi_count });
        }
        edges.push(EdgeTaut { class, degree: tri.edge_degree(class), pi_count });
    }
    let mut vertices = Vec::new();
    for class in 0..tri.vertex_count() {
        let members = tri.vertex_members(class);
        let good = members
            .iter()
            .filter(|&&(t, v)| {
                let pis = (0..4)
                    .filter(|&w| w != v)
                    .filter(|&w| is_pi_edge(pi_pairs[t], edge_index(v, w)))
                    .count();
                pis == 1
            })
            .count();
        if good != members.len() {
            violations.push(TautViolation::Vertex { class });
        }
        vertices.push(VertexTaut { class, corners: members.len(), corners_summing_to_pi: good });
    }
    TautCertificate { edges, vertices, violations }
}

/// Index (0 or 1) of the pair in `pair_edges(p)` that contains vertex `v`.
fn pair_side(p: u8, v: usize) -> u8 {
    let [x, _] = pair_edges(p);
    if x.contains(&v) {
        0
    } else {
        1
    }
}

/// Per-tetrahedron polarity: `polarity[t]` indexes the pair of
/// `pair_edges(pi[t])` that is the top π-edge.
pub fn derive_coorientations(tri: &Triangulation, pi_pairs: &[u8]) -> Result<Vec<u8>> {
    let n = tri.tet_count();
    let mut pol = vec![u8::MAX; n];
    for root in 0..n {
        if pol[root] != u8::MAX {
            continue;
        }
        pol[root] = 1;
        let mut q = VecDeque::from([root]);
        while let Some(t) = q.pop_front() {
            for f in 0..4 {
                let Some(g) = tri.gluing(t, f) else { continue };
                let f2 = g.perm.apply(f);
                let a = pair_side(pi_pairs[t], f);
                let a2 = pair_side(pi_pairs[g.tet], f2);
                let want = pol[t] ^ 1 ^ a ^ a2;
                if pol[g.tet] == u8::MAX {
                    pol[g.tet] = want;
                    q.push_back(g.tet);
                } else if pol[g.tet] != want {
                    return Err(Error::NotTransverse { tet: g.tet });
                }
            }
        }
    }
    Ok(pol)
}

/// Orientation sign per tetrahedron, or `None` if non-orientable.
pub fn orientation(tri: &Triangulation) -> Option<Vec<i8>> {
    let n = tri.tet_count();
    let mut o = vec![0i8; n];
    for root in 0..n {
        if o[root] != 0 {
            continue;
        }
        o[root] = 1;
        let mut q = VecDeque::from([root]);
        while let Some(t) = q.pop_front() {
            for f in 0..4 {
                let Some(g) = tri.gluing(t, f) else { continue };
                let want = -o[t] * g.perm.sign() as i8;
                if o[g.tet] == 0 {
                    o[g.tet] = want;
                    q.push_back(g.tet);
                } else if o[g.tet] != want {
                    return None;
                }
            }
        }
    }
    Some(o)
}

/// Face vertices anticlockwise as seen from outside tetrahedron `t`.
pub fn outward_ccw(orient: i8, f: usize) -> [usize; 3] {
    let v = face_verts_outward(f);
    if orient > 0 {
        v
    } else {
        [v[0], v[2], v[1]]
    }
}

/// Colours forced on the equatorial model edges of one tetrahedron:
/// `(edge index, colour)` for the four equatorial edges.
pub fn forced_colours(p: u8, orient: i8) -> [(usize, Colour); 4] {
    let mut out = [(0usize, Colour::Red); 4];
    let mut k = 0;
    for f in 0..4 {
        let v = outward_ccw(orient, f);
        let es = [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])];
        let start = es
            .iter()
            .position(|&(a, b)| is_pi_edge(p, edge_index(a, b)))
            .expect("every face has one π-edge");
        let red = es[(start + 1) % 3];
        let blue = es[(start + 2) % 3];
        for (e, c) in [(edge_index(red.0, red.1), Colour::Red), (edge_index(blue.0, blue.1), Colour::Blue)] {
            if let Some(slot) = out[..k].iter().find(|x| x.0 == e) {
                debug_assert_eq!(slot.1, c, "local veering rule is self-consistent");
            } else {
                out[k] = (e, c);
                k += 1;
            }
        }
    }
    debug_assert_eq!(k, 4);
    out
}

pub fn derive_veering_colours(tri: &Triangulation, pi_pairs: &[u8], orient: &[i8]) -> Result<Vec<Colour>> {
    let mut colour: Vec<Option<Colour>> = vec![None; tri.edge_count()];
    for t in 0..tri.tet_count() {
        for (e, c) in forced_colours(pi_pairs[t], orient[t]) {
            let class = tri.edge_class(t, e);
            match colour[class] {
                None => colour[class] = Some(c),
                Some(c0) if c0 != c => {
                    return Err(Error::NotVeering(NotVeeringReason::Contradiction { edge: class }));
                }
                _ => {}
            }
        }
    }
    colour
        .iter()
        .enumerate()
        .map(|(i, c)| c.ok_or(Error::NotVeering(NotVeeringReason::UnconstrainedEdge { edge: i })))
        .collect()
}

/// A transverse veering triangulation with all derived local data.
#[derive(Clone, Debug)]
pub struct Veering {
    pub tri: Triangulation,
    pub pi_pairs: Vec<u8>,
    pub polarity: Vec<u8>,
    pub orient: Vec<i8>,
    pub colour: Vec<Colour>,
    top: Vec<[usize; 2]>,
    bottom: Vec<[usize; 2]>,
}

/// Results of running all structure checks on one signature.
#[derive(Clone, Debug, Serialize)]
pub struct StructureChecks {
    pub taut: bool,
    pub transverse: bool,
    pub veering: bool,
}

impl Veering {
    pub fn new(tri: Triangulation, pi_pairs: Vec<u8>) -> Result<Veering> {
        let cert = check_taut(&tri, &pi_pairs);
        if !cert.passes() {
            return Err(Error::NotTaut(format!("{:?}", cert.violations)));
        }
        let polarity = derive_coorientations(&tri, &pi_pairs)?;
        let orient = orientation(&tri).ok_or(Error::NotVeering(NotVeeringReason::NonOrientable))?;
        let colour = derive_veering_colours(&tri, &pi_pairs, &orient)?;
        Ok(Veering::assemble(tri, pi_pairs, polarity, orient, colour))
    }

    fn assemble(tri: Triangulation, pi_pairs: Vec<u8>, polarity: Vec<u8>, orient: Vec<i8>, colour: Vec<Colour>) -> Veering {
        let top = (0..tri.tet_count())
            .map(|t| pair_edges(pi_pairs[t])[polarity[t] as usize])
            .collect();
        let bottom = (0..tri.tet_count())
            .map(|t| pair_edges(pi_pairs[t])[1 - polarity[t] as usize])
            .collect();
        Veering { tri, pi_pairs, polarity, orient, colour, top, bottom }
    }

    pub fn from_sig(sig: &str) -> Result<Veering> {
        let (tri, pi) = parse_taut_isosig(sig)?;
        Veering::new(tri, pi)
    }

    pub fn tet_count(&self) -> usize {
        self.tri.tet_count()
    }

    /// The same triangulation with every co-orientation reversed.
    pub fn reversed(&self) -> Veering {
        let pol = self.polarity.iter().map(|p| 1 - p).collect();
        Veering::assemble(self.tri.clone(), self.pi_pairs.clone(), pol, self.orient.clone(), self.colour.clone())
    }

    /// The mirror image: orientation reversed, so every colour swaps.
    pub fn mirrored(&self) -> Veering {
        let o: Vec<i8> = self.orient.iter().map(|x| -x).collect();
        let c = self.colour.iter().map(|c| c.other()).collect();
        Veering::assemble(self.tri.clone(), self.pi_pairs.clone(), self.polarity.clone(), o, c)
    }

    pub fn top_edge(&self, t: usize) -> [usize; 2] {
        self.top[t]
    }

    pub fn bottom_edge(&self, t: usize) -> [usize; 2] {
        self.bottom[t]
    }

    /// Face `f` of `t` is an upper face (t lies below it).
    pub fn is_upper_face(&self, t: usize, f: usize) -> bool {
        self.bottom[t].contains(&f)
    }

    pub fn edge_colour(&self, t: usize, e: usize) -> Colour {
        self.colour[self.tri.edge_class(t, e)]
    }

    pub fn colour_of(&self, t: usize, a: usize, b: usize) -> Colour {
        self.edge_colour(t, edge_index(a, b))
    }

    /// Vertices of face `f` of `t`, anticlockwise as seen from above.
    pub fn face_ccw_from_above(&self, t: usize, f: usize) -> [usize; 3] {
        let v = outward_ccw(self.orient[t], f);
        if self.is_upper_face(t, f) {
            v
        } else {
            [v[0], v[2], v[1]]
        }
    }

    /// Local vertex of face `(t, f)` holding the upper track-cusp. The cusp
    /// points at the edge opposite it, the lower π-edge of the tetrahedron above.
    pub fn upper_cusp_vertex(&self, t: usize, f: usize) -> usize {
        let edge = if self.is_upper_face(t, f) {
            let g = self.tri.gluing(t, f).expect("closed triangulation");
            let inv = g.perm.inverse();
            let [a, b] = self.bottom[g.tet];
            [inv.apply(a), inv.apply(b)]
        } else {
            self.bottom[t]
        };
        third_vertex(f, edge)
    }

    /// Local vertex of face `(t, f)` holding the lower track-cusp; it points
    /// at the upper π-edge of the tetrahedron below.
    pub fn lower_cusp_vertex(&self, t: usize, f: usize) -> usize {
        let edge = if self.is_upper_face(t, f) {
            self.top[t]
        } else {
            let g = self.tri.gluing(t, f).expect("closed triangulation");
            let inv = g.perm.inverse();
            let [a, b] = self.top[g.tet];
            [inv.apply(a), inv.apply(b)]
        };
        third_vertex(f, edge)
    }

    pub fn kinds(&self) -> Vec<TetKind> {
        classify_tetrahedra(self)
    }

    pub fn max_edge_degree(&self) -> usize {
        self.tri.max_edge_degree()
    }
}

fn third_vertex(f: usize, edge: [usize; 2]) -> usize {
    let v = face_verts(f);
    *v.iter()
        .find(|x| !edge.contains(x))
        .expect("edge lies in face")
}

/// Runs the structure checks in order, stopping at the first failure.
pub fn run_checks(tri: &Triangulation, pi_pairs: &[u8]) -> (StructureChecks, Result<Veering>) {
    let mut checks = StructureChecks { taut: false, transverse: false, veering: false };
    let cert = check_taut(tri, pi_pairs);
    if !cert.passes() {
        return (checks, Err(Error::NotTaut(format!("{:?}", cert.violations))));
    }
    checks.taut = true;
    if let Err(e) = derive_coorientations(tri, pi_pairs) {
        return (checks, Err(e));
    }
    checks.transverse = true;
    match Veering::new(tri.clone(), pi_pairs.to_vec()) {
        Ok(v) => {
            checks.veering = true;
            (checks, Ok(v))
        }
        Err(e) => (checks, Err(e)),
    }
}

pub fn classify_tetrahedra(v: &Veering) -> Vec<TetKind> {
    (0..v.tet_count())
        .map(|t| {
            let reds = (0..6).filter(|&e| v.edge_colour(t, e) == Colour::Red).count();
            match reds {
                3 => {
                    let [a, b] = v.top_edge(t);
                    if v.colour_of(t, a, b) == Colour::Red {
                        TetKind::ToggleRedTop
                    } else {
                        TetKind::ToggleBlueTop
                    }
                }
                r if r > 3 => TetKind::FanRed,
                _ => TetKind::FanBlue,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EdgeNeighbourhood {
    pub edge: usize,
    pub colour: Colour,
    pub degree: usize,
    pub tets_above: usize,
    pub tets_below: usize,
    /// Tetrahedra strictly between the one below and the one above, bottom to top.
    pub sides: [Vec<usize>; 2],
    pub side_kinds: [Vec<TetKind>; 2],
    pub majority_faces: usize,
    pub one_above: bool,
    pub one_below: bool,
    pub both_sides: bool,
    pub stacks_ok: bool,
    pub four_majority: bool,
}

impl EdgeNeighbourhood {
    pub fn passes(&self) -> bool {
        self.one_above && self.one_below && self.both_sides && self.stacks_ok && self.four_majority
    }
}

fn stack_ok(colour: Colour, kinds: &[TetKind]) -> bool {
    let (fan_same, fan_other, first, last) = match colour {
        Colour::Blue => (TetKind::FanBlue, TetKind::FanRed, TetKind::ToggleRedTop, TetKind::ToggleBlueTop),
        Colour::Red => (TetKind::FanRed, TetKind::FanBlue, TetKind::ToggleBlueTop, TetKind::ToggleRedTop),
    };
    match kinds {
        [] => false,
        [k] => *k == fan_same,
        [a, mid @ .., b] => *a == first && *b == last && mid.iter().all(|k| *k == fan_other),
    }
}

fn face_majority(v: &Veering, t: usize, f: usize) -> Colour {
    let fv = face_verts(f);
    let reds = [(fv[0], fv[1]), (fv[1], fv[2]), (fv[0], fv[2])]
        .iter()
        .filter(|&&(a, b)| v.colour_of(t, a, b) == Colour::Red)
        .count();
    if reds >= 2 {
        Colour::Red
    } else {
        Colour::Blue
    }
}

/// A tetrahedron with an edge `{a, b}` and the two other vertices; the walk
/// around the edge leaves through face `c`.
#[derive(Clone, Copy, Debug)]
pub struct EdgeWalk {
    pub tet: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl EdgeWalk {
    pub fn step(self, tri: &Triangulation) -> Option<EdgeWalk> {
        let g = tri.gluing(self.tet, self.c)?;
        let s = g.perm;
        Some(EdgeWalk { tet: g.tet, a: s.apply(self.a), b: s.apply(self.b), c: s.apply(self.d), d: s.apply(self.c) })
    }
}

fn same_edge(e: [usize; 2], a: usize, b: usize) -> bool {
    (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a)
}

pub fn edge_neighbourhood_report(v: &Veering) -> Vec<EdgeNeighbourhood> {
    let tri = &v.tri;
    let kinds = classify_tetrahedra(v);
    (0..tri.edge_count())
        .map(|class| {
            let colour = v.colour[class];
            let members = tri.edge_members(class);
            let below: Vec<(usize, usize)> = members
                .iter()
                .copied()
                .filter(|&(t, e)| same_edge(v.top_edge(t), EDGE_VERTS[e].0, EDGE_VERTS[e].1))
                .collect();
            let above_n = members
                .iter()
                .filter(|&&(t, e)| same_edge(v.bottom_edge(t), EDGE_VERTS[e].0, EDGE_VERTS[e].1))
                .count();
            let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
            let mut majority = 0;
            let mut ok_walk = below.len() == 1 && above_n == 1;
            if ok_walk {
                let (t0, e0) = below[0];
                let (a, b) = EDGE_VERTS[e0];
                let o: Vec<usize> = (0..4).filter(|&x| x != a && x != b).collect();
                for (side, (c, d)) in [(o[0], o[1]), (o[1], o[0])].into_iter().enumerate() {
                    let mut w = EdgeWalk { tet: t0, a, b, c, d };
                    loop {
                        if face_majority(v, w.tet, w.c) == colour {
                            majority += 1;
                        }
                        match w.step(tri) {
                            Some(n) => w = n,
                            None => {
                                ok_walk = false;
                                break;
                            }
                        }
                        if same_edge(v.bottom_edge(w.tet), w.a, w.b) || sides[side].len() > members.len() {
                            break;
                        }
                        sides[side].push(w.tet);
                    }
                }
                if sides[0].len() + sides[1].len() + 2 != members.len() {
                    ok_walk = false;
                }
            }
            let side_kinds = [
                sides[0].iter().map(|&t| kinds[t]).collect::<Vec<_>>(),
                sides[1].iter().map(|&t| kinds[t]).collect::<Vec<_>>(),
            ];
            let both_sides = ok_walk && !sides[0].is_empty() && !sides[1].is_empty();
            let stacks_ok = ok_walk && stack_ok(colour, &side_kinds[0]) && stack_ok(colour, &side_kinds[1]);
            EdgeNeighbourhood {
                edge: class,
                colour,
                degree: tri.edge_degree(class),
                tets_above: above_n,
                tets_below: below.len(),
                sides,
                side_kinds,
                majority_faces: majority,
                one_above: above_n == 1,
                one_below: below.len() == 1,
                both_sides,
                stacks_ok,
                four_majority: majority == 4,
            }
        })
        .collect()
}
