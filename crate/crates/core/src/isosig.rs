//! Isomorphism signatures for 3-dimensional triangulations, with an
//! optional taut angle suffix.

use crate::error::{Error, Result};
use crate::perm::{Perm4, S4};
use crate::tri::{Gluing, Triangulation};

fn char_val(c: u8) -> Option<usize> {
    match c {
        b'a'..=b'z' => Some((c - b'a') as usize),
        b'A'..=b'Z' => Some((c - b'A') as usize + 26),
        b'0'..=b'9' => Some((c - b'0') as usize + 52),
        b'+' => Some(62),
        b'-' => Some(63),
        _ => None,
    }
}

fn val_char(v: usize) -> char {
    const ALPHABET: &[u8; 64] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-";
    ALPHABET[v] as char
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn next(&mut self) -> Result<usize> {
        let c = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| Error::MalformedSignature("unexpected end of signature".into()))?;
        self.pos += 1;
        char_val(c).ok_or_else(|| Error::MalformedSignature(format!("bad character {:?}", c as char)))
    }

    fn read_int(&mut self, n_chars: usize) -> Result<usize> {
        let mut out = 0usize;
        for i in 0..n_chars {
            out |= self.next()? << (6 * i);
        }
        Ok(out)
    }

    fn done(&self) -> bool {
        self.pos >= self.bytes.len()
    }
}

/// Decodes a plain isomorphism signature (no angle suffix).
pub fn decode_isosig(sig: &str) -> Result<Triangulation> {
    let mut r = Reader { bytes: sig.as_bytes(), pos: 0 };
    if r.done() {
        return Err(Error::MalformedSignature("empty signature".into()));
    }
    let mut all: Vec<[Option<Gluing>; 4]> = Vec::new();
    while !r.done() {
        let offset = all.len();
        let comp = decode_component(&mut r)?;
        for mut faces in comp {
            for g in faces.iter_mut().flatten() {
                g.tet += offset;
            }
            all.push(faces);
        }
    }
    Triangulation::new(all)
}

fn decode_component(r: &mut Reader) -> Result<Vec<[Option<Gluing>; 4]>> {
    let first = r.next()?;
    let (n, n_chars) = if first < 63 {
        (first, 1)
    } else {
        let n_chars = r.next()?;
        if n_chars == 0 {
            return Err(Error::MalformedSignature("zero-width simplex count".into()));
        }
        (r.read_int(n_chars)?, n_chars)
    };
    if n == 0 {
        return Ok(Vec::new());
    }
    let n_facets = 4 * n;
    let mut actions = Vec::new();
    let mut counted = 0usize;
    let mut n_joins = 0usize;
    while counted < n_facets {
        let mut val = r.next()?;
        for _ in 0..3 {
            let a = val & 3;
            val >>= 2;
            if counted == n_facets {
                if a != 0 {
                    return Err(Error::MalformedSignature("nonzero padding in facet actions".into()));
                }
                continue;
            }
            match a {
                0 => counted += 1,
                1 => counted += 2,
                2 => {
                    counted += 2;
                    n_joins += 1;
                }
                _ => return Err(Error::MalformedSignature("facet action 3".into())),
            }
            if counted > n_facets {
                return Err(Error::MalformedSignature("facet actions overrun".into()));
            }
            actions.push(a);
        }
    }
    let mut dests = Vec::with_capacity(n_joins);
    for _ in 0..n_joins {
        dests.push(r.read_int(n_chars)?);
    }
    let mut perms = Vec::with_capacity(n_joins);
    for _ in 0..n_joins {
        let idx = r.next()?;
        perms.push(Perm4::from_index(idx).ok_or_else(|| Error::MalformedSignature(format!("perm index {idx}")))?);
    }
    let mut glue: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; n];
    let mut next_unused = 1usize;
    let mut ai = 0usize;
    let mut ji = 0usize;
    for pos in 0..n {
        for j in 0..4 {
            if glue[pos][j].is_some() {
                continue;
            }
            let a = *actions
                .get(ai)
                .ok_or_else(|| Error::MalformedSignature("too few facet actions".into()))?;
            ai += 1;
            match a {
                0 => {}
                1 => {
                    if next_unused >= n {
                        return Err(Error::InvalidGluing("join to a simplex beyond the count".into()));
                    }
                    glue[pos][j] = Some(Gluing { tet: next_unused, perm: Perm4::IDENTITY });
                    glue[next_unused][j] = Some(Gluing { tet: pos, perm: Perm4::IDENTITY });
                    next_unused += 1;
                }
                _ => {
                    let dest = dests[ji];
                    let p = perms[ji];
                    ji += 1;
                    if dest >= next_unused {
                        return Err(Error::InvalidGluing("join to an unvisited simplex".into()));
                    }
                    let df = p.apply(j);
                    if glue[dest][df].is_some() || (dest == pos && df == j) {
                        return Err(Error::InvalidGluing("join to an occupied facet".into()));
                    }
                    glue[pos][j] = Some(Gluing { tet: dest, perm: p });
                    glue[dest][df] = Some(Gluing { tet: pos, perm: p.inverse() });
                }
            }
        }
    }
    if ai != actions.len() {
        return Err(Error::MalformedSignature("unused facet actions".into()));
    }
    if next_unused != n {
        return Err(Error::InvalidGluing("disconnected component".into()));
    }
    Ok(glue)
}

/// One candidate labelling: the signature and, for each new tetrahedron
/// index, the old index and vertex map (old label to new label).
struct Labelling {
    sig: String,
    order: Vec<usize>,
    maps: Vec<Perm4>,
}

fn encode_from(tri: &Triangulation, comp: &[usize], start: usize, p: Perm4) -> Labelling {
    let n = comp.len();
    let total = tri.tet_count();
    let mut image = vec![usize::MAX; total];
    let mut vmap = vec![Perm4::IDENTITY; total];
    let mut order = vec![start];
    image[start] = 0;
    vmap[start] = p;
    let mut actions = Vec::new();
    let mut dests = Vec::new();
    let mut perms = Vec::new();
    let mut si = 0;
    while si < order.len() {
        let src = order[si];
        for fimg in 0..4 {
            let fsrc = vmap[src].inverse().apply(fimg);
            match tri.gluing(src, fsrc) {
                None => actions.push(0u8),
                Some(g) => {
                    let dest = g.tet;
                    if image[dest] == usize::MAX {
                        image[dest] = order.len();
                        order.push(dest);
                        vmap[dest] = vmap[src].compose(g.perm.inverse());
                        actions.push(1);
                    } else {
                        let dfimg = vmap[dest].apply(g.perm.apply(fsrc));
                        if image[dest] < si || (image[dest] == si && dfimg < fimg) {
                            continue;
                        }
                        actions.push(2);
                        dests.push(image[dest]);
                        perms.push(vmap[dest].compose(g.perm).compose(vmap[src].inverse()));
                    }
                }
            }
        }
        si += 1;
    }
    debug_assert_eq!(order.len(), n);
    let mut s = String::new();
    let n_chars = if n < 63 {
        s.push(val_char(n));
        1
    } else {
        let mut k = 0;
        while (n >> (6 * k)) > 0 {
            k += 1;
        }
        s.push(val_char(63));
        s.push(val_char(k));
        for i in 0..k {
            s.push(val_char((n >> (6 * i)) & 63));
        }
        k
    };
    for chunk in actions.chunks(3) {
        let mut v = 0usize;
        for (i, &a) in chunk.iter().enumerate() {
            v |= (a as usize) << (2 * i);
        }
        s.push(val_char(v));
    }
    for &d in &dests {
        for i in 0..n_chars {
            s.push(val_char((d >> (6 * i)) & 63));
        }
    }
    for p in &perms {
        s.push(val_char(p.index()));
    }
    let maps = order.iter().map(|&t| vmap[t]).collect();
    Labelling { sig: s, order, maps }
}

fn components(tri: &Triangulation) -> Vec<Vec<usize>> {
    let n = tri.tet_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let t = comp[i];
            for f in 0..4 {
                if let Some(g) = tri.gluing(t, f) {
                    if !seen[g.tet] {
                        seen[g.tet] = true;
                        comp.push(g.tet);
                    }
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// All labellings of a connected component achieving the minimal signature.
fn minimal_labellings(tri: &Triangulation, comp: &[usize]) -> Vec<Labelling> {
    let mut best: Vec<Labelling> = Vec::new();
    for &start in comp {
        for p in S4 {
            let l = encode_from(tri, comp, start, p);
            match best.first() {
                None => best.push(l),
                Some(b) if l.sig < b.sig => {
                    best.clear();
                    best.push(l);
                }
                Some(b) if l.sig == b.sig => best.push(l),
                _ => {}
            }
        }
    }
    best
}

/// The canonical isomorphism signature.
pub fn encode_isosig(tri: &Triangulation) -> String {
    canonical_labelling(tri, None).0
}

/// Pair index of the opposite-edge pair containing edge `{a, b}`.
pub fn pair_of(a: usize, b: usize) -> u8 {
    let other = if a == 0 { b } else if b == 0 { a } else { 6 - a - b };
    (other - 1) as u8
}

/// The opposite-edge pairs selected by a pair index: the first contains 0.
pub fn pair_edges(p: u8) -> [[usize; 2]; 2] {
    match p {
        0 => [[0, 1], [2, 3]],
        1 => [[0, 2], [1, 3]],
        _ => [[0, 3], [1, 2]],
    }
}

fn transport_angle(p: u8, map: Perm4) -> u8 {
    let [a, b] = pair_edges(p)[0];
    pair_of(map.apply(a), map.apply(b))
}

/// Canonical signature plus, for each new tetrahedron, (old index, vertex map).
/// With angles, ties between automorphic labellings are broken by the
/// smallest transported angle string.
pub fn canonical_labelling(tri: &Triangulation, angles: Option<&[u8]>) -> (String, Option<String>, Vec<(usize, Perm4)>) {
    if tri.tet_count() == 0 {
        return ("a".into(), angles.map(|_| String::new()), Vec::new());
    }
    let mut parts: Vec<(String, String, Vec<(usize, Perm4)>)> = Vec::new();
    for comp in components(tri) {
        let cands = minimal_labellings(tri, &comp);
        let mut chosen: Option<(String, Vec<(usize, Perm4)>)> = None;
        for l in cands.iter() {
            let ang: String = match angles {
                Some(a) => l
                    .order
                    .iter()
                    .zip(&l.maps)
                    .map(|(&t, &m)| (b'0' + transport_angle(a[t], m)) as char)
                    .collect(),
                None => String::new(),
            };
            let better = match &chosen {
                None => true,
                Some((best, _)) => ang < *best,
            };
            if better {
                chosen = Some((ang, l.order.iter().copied().zip(l.maps.iter().copied()).collect()));
            }
        }
        let (ang, lab) = chosen.expect("non-empty component");
        parts.push((cands[0].sig.clone(), ang, lab));
    }
    parts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut sig = String::new();
    let mut ang = String::new();
    let mut lab = Vec::new();
    for (s, a, l) in parts {
        sig.push_str(&s);
        ang.push_str(&a);
        lab.extend(l);
    }
    (sig, angles.map(|_| ang), lab)
}

/// Parses `<isoSig>_<angles>`.
pub fn parse_taut_isosig(sig: &str) -> Result<(Triangulation, Vec<u8>)> {
    let (iso, ang) = sig
        .split_once('_')
        .ok_or_else(|| Error::MalformedSignature("missing '_' separator".into()))?;
    let tri = decode_isosig(iso)?;
    if ang.len() != tri.tet_count() {
        return Err(Error::AngleLengthMismatch { expected: tri.tet_count(), got: ang.len() });
    }
    let mut pis = Vec::with_capacity(ang.len());
    for c in ang.bytes() {
        match c {
            b'0'..=b'2' => pis.push(c - b'0'),
            _ => return Err(Error::MalformedSignature(format!("bad angle digit {:?}", c as char))),
        }
    }
    Ok((tri, pis))
}

/// Canonical `<isoSig>_<angles>` string.
pub fn serialize_taut_isosig(tri: &Triangulation, pi_pairs: &[u8]) -> String {
    let (sig, ang, _) = canonical_labelling(tri, Some(pi_pairs));
    format!("{}_{}", sig, ang.unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_values_roundtrip() {
        for v in 0..64 {
            assert_eq!(char_val(val_char(v) as u8), Some(v));
        }
    }

    #[test]
    fn pair_index_convention() {
        assert_eq!(pair_of(0, 1), 0);
        assert_eq!(pair_of(2, 3), 0);
        assert_eq!(pair_of(1, 3), 1);
        assert_eq!(pair_of(0, 3), 2);
        assert_eq!(pair_of(2, 1), 2);
    }

    #[test]
    fn empty_signature() {
        let t = decode_isosig("a").unwrap();
        assert_eq!(t.tet_count(), 0);
        assert_eq!(encode_isosig(&t), "a");
    }
}
