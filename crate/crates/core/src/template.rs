//! Small template graphs `G_i` whose homomorphism densities form the Hamiltonian.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};

/// Largest template accepted anywhere in the crate.
pub const MAX_TEMPLATE_VERTICES: usize = 8;
/// Largest cap for which the default family can be enumerated.
pub const MAX_FAMILY_CAP: usize = 6;

/// Shape classes with dedicated delta formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    Edge,
    /// Star with the given number of leaves (2 = two-star).
    Star(usize),
    Triangle,
    Cycle4,
    /// Path on four vertices.
    Path4,
    /// Triangle with a pendant edge.
    Paw,
    /// `K4` minus an edge.
    Diamond,
    Clique4,
    General,
}

#[derive(Clone)]
pub struct TemplateGraph {
    name: String,
    k: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u16>,
    degrees: Vec<usize>,
    pair_degrees: Vec<usize>,
    kind: TemplateKind,
    order: Vec<usize>,
    terms: OnceLock<Option<Vec<DeltaTerm>>>,
}

/// Largest edge count for which the inclusion-exclusion delta terms are built.
pub const MAX_TERM_EDGES: usize = 12;

/// One orbit of inclusion-exclusion terms for the edge-flip delta: template
/// vertices in `pins` map to `u` (false) or `v` (true); `weight` carries the
/// sign and the orbit size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaTerm {
    pub weight: i64,
    pub pins: Vec<(usize, bool)>,
}

impl fmt::Debug for TemplateGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(k={}, edges={:?})", self.name, self.k, self.edges)
    }
}

impl PartialEq for TemplateGraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.edges == other.edges
    }
}

impl TemplateGraph {
    /// Builds a template on vertices `0..k` from an edge list.
    pub fn from_edges(name: impl Into<String>, k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let name = name.into();
        if k == 0 || k > MAX_TEMPLATE_VERTICES {
            return Err(ErgmError::InvalidTemplate(format!(
                "{name}: vertex count {k} outside 1..={MAX_TEMPLATE_VERTICES}"
            )));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= k || b >= k {
                return Err(ErgmError::InvalidTemplate(format!("{name}: edge ({a},{b}) outside [{k}]")));
            }
            if a == b {
                return Err(ErgmError::InvalidTemplate(format!("{name}: self-loop at {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(ErgmError::InvalidTemplate(format!("{name}: duplicate edge ({a},{b})")));
            }
        }
        if set.is_empty() {
            return Err(ErgmError::InvalidTemplate(format!("{name}: no edges")));
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adj = vec![0u16; k];
        for &(a, b) in &edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        let degrees: Vec<usize> = adj.iter().map(|m| m.count_ones() as usize).collect();
        let pair_degrees = edges
            .iter()
            .map(|&(i, j)| (adj[i] & adj[j]).count_ones() as usize)
            .collect();
        let kind = classify(k, &edges, &degrees);
        let order = search_order(k, &adj);
        Ok(TemplateGraph { name, k, edges, adj, degrees, pair_degrees, kind, order, terms: OnceLock::new() })
    }

    pub fn edge() -> Self {
        Self::from_edges("edge", 2, &[(0, 1)]).expect("builtin")
    }

    pub fn triangle() -> Self {
        Self::from_edges("triangle", 3, &[(0, 1), (1, 2), (0, 2)]).expect("builtin")
    }

    pub fn two_star() -> Self {
        let mut t = Self::star(2).expect("builtin");
        t.name = "two_star".into();
        t
    }

    /// Star with `leaves` leaves around vertex 0.
    pub fn star(leaves: usize) -> Result<Self> {
        if leaves == 0 || leaves + 1 > MAX_TEMPLATE_VERTICES {
            return Err(ErgmError::InvalidTemplate(format!("k_star:{leaves} unsupported")));
        }
        let edges: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        Self::from_edges(format!("k_star:{leaves}"), leaves + 1, &edges)
    }

    pub fn cycle(len: usize) -> Result<Self> {
        if !(3..=MAX_TEMPLATE_VERTICES).contains(&len) {
            return Err(ErgmError::InvalidTemplate(format!("cycle:{len} unsupported")));
        }
        let edges: Vec<_> = (0..len).map(|i| (i, (i + 1) % len)).collect();
        Self::from_edges(format!("cycle:{len}"), len, &edges)
    }

    /// Parses `edge`, `two_star`, `triangle`, `k_star:K`, `cycle:K`, or an
    /// explicit edge list such as `0-1,1-2,2-0`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        match s {
            "edge" => return Ok(Self::edge()),
            "two_star" => return Ok(Self::two_star()),
            "triangle" => return Ok(Self::triangle()),
            _ => {}
        }
        let int = |v: &str| -> Result<usize> {
            v.trim()
                .parse()
                .map_err(|_| ErgmError::InvalidTemplate(format!("bad integer in `{spec}`")))
        };
        if let Some(rest) = s.strip_prefix("k_star:") {
            return Self::star(int(rest)?);
        }
        if let Some(rest) = s.strip_prefix("cycle:") {
            return Self::cycle(int(rest)?);
        }
        if s.contains('-') {
            let mut edges = Vec::new();
            for part in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()) {
                let (a, b) = part
                    .split_once('-')
                    .ok_or_else(|| ErgmError::InvalidTemplate(format!("bad edge `{part}`")))?;
                edges.push((int(a)?, int(b)?));
            }
            let k = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
            return Self::from_edges(s, k, &edges);
        }
        Err(ErgmError::InvalidTemplate(format!("unknown template `{spec}`")))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of template vertices.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// `d_ij` for each edge, aligned with [`TemplateGraph::edges`].
    pub fn pair_degrees(&self) -> &[usize] {
        &self.pair_degrees
    }

    /// Neighbour bitmask of template vertex `i`.
    pub fn adjacency(&self, i: usize) -> u16 {
        self.adj[i]
    }

    pub fn kind(&self) -> TemplateKind {
        self.kind
    }

    /// Vertex order in which every vertex after the first of its component has an
    /// earlier neighbour.
    pub fn search_order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = 1u16;
        let mut frontier = 1u16;
        while frontier != 0 {
            let mut next = 0u16;
            for i in 0..self.k {
                if frontier & (1 << i) != 0 {
                    next |= self.adj[i];
                }
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen.count_ones() as usize == self.k
    }

    /// All vertex permutations preserving the edge set.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..self.k).collect();
        permute(&mut perm, 0, &mut |p| {
            if self.edges.iter().all(|&(a, b)| self.adj[p[a]] & (1 << p[b]) != 0) {
                out.push(p.to_vec());
            }
        });
        out
    }

    /// Inclusion-exclusion terms for `hom(X^{+e}) - hom(X^{-e})`: for every
    /// nonempty edge set `S` and every 2-colouring of its vertices that sends
    /// each edge of `S` onto `{u, v}`, count homomorphisms into `X^{+e}` with
    /// those pins, signed by `(-1)^{|S|+1}`. Terms are merged by automorphism
    /// orbit; terms forcing a loop are dropped. `None` above [`MAX_TERM_EDGES`].
    pub fn delta_terms(&self) -> Option<&[DeltaTerm]> {
        self.terms.get_or_init(|| self.build_terms()).as_deref()
    }

    fn build_terms(&self) -> Option<Vec<DeltaTerm>> {
        let m = self.edges.len();
        if m > MAX_TERM_EDGES {
            return None;
        }
        let auts = self.automorphisms();
        // key: (pinned vertex mask, colour mask) after canonicalisation
        let mut orbits: BTreeMap<(u16, u16), (i64, u16, u16)> = BTreeMap::new();
        for subset in 1u32..(1 << m) {
            let mut verts = 0u16;
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    verts |= (1 << a) | (1 << b);
                }
            }
            let sign: i64 = if subset.count_ones() % 2 == 1 { 1 } else { -1 };
            // colourings of the pinned vertices; subsets of `verts` as colour-1 sets
            let mut colour = verts;
            loop {
                let proper_on_s = self.edges.iter().enumerate().all(|(i, &(a, b))| {
                    subset >> i & 1 == 0 || ((colour >> a) & 1) != ((colour >> b) & 1)
                });
                // any template edge inside the pinned set must be bichromatic
                let no_loop = self.edges.iter().all(|&(a, b)| {
                    verts & (1 << a) == 0 || verts & (1 << b) == 0 || ((colour >> a) & 1) != ((colour >> b) & 1)
                });
                if proper_on_s && no_loop {
                    let key = auts
                        .iter()
                        .map(|p| (map_mask(verts, p), map_mask(colour, p)))
                        .min()
                        .expect("identity automorphism");
                    let entry = orbits.entry(key).or_insert((0, verts, colour));
                    entry.0 += sign;
                }
                if colour == 0 {
                    break;
                }
                colour = (colour - 1) & verts;
            }
        }
        Some(
            orbits
                .into_values()
                .filter(|&(w, _, _)| w != 0)
                .map(|(weight, verts, colour)| DeltaTerm {
                    weight,
                    pins: (0..self.k).filter(|&i| verts >> i & 1 == 1).map(|i| (i, colour >> i & 1 == 1)).collect(),
                })
                .collect(),
        )
    }

    /// Isomorphism-invariant code: the lexicographically smallest pair bitmask
    /// over all relabellings. Exhaustive, so only for small `k`.
    pub fn canonical_code(&self) -> u64 {
        let mut perm: Vec<usize> = (0..self.k).collect();
        let mut best = u64::MAX;
        permute(&mut perm, 0, &mut |p| {
            let mut code = 0u64;
            for &(a, b) in &self.edges {
                let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                code |= 1 << (y * (y - 1) / 2 + x);
            }
            best = best.min(code);
        });
        best | ((self.k as u64) << 56)
    }
}

fn map_mask(mask: u16, p: &[usize]) -> u16 {
    let mut out = 0u16;
    for (i, &pi) in p.iter().enumerate() {
        if mask >> i & 1 == 1 {
            out |= 1 << pi;
        }
    }
    out
}

fn permute(p: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == p.len() {
        f(p);
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, f);
        p.swap(i, j);
    }
}

fn classify(k: usize, edges: &[(usize, usize)], degrees: &[usize]) -> TemplateKind {
    let m = edges.len();
    if degrees.contains(&0) {
        return TemplateKind::General;
    }
    match (k, m) {
        (2, 1) => TemplateKind::Edge,
        (3, 3) => TemplateKind::Triangle,
        (4, 4) if degrees.iter().all(|&d| d == 2) => TemplateKind::Cycle4,
        (4, 4) => TemplateKind::Paw,
        (4, 5) => TemplateKind::Diamond,
        (4, 6) => TemplateKind::Clique4,
        (4, 3) if degrees.iter().all(|&d| d <= 2) => TemplateKind::Path4,
        _ if k >= 3 && m == k - 1 && degrees.contains(&(k - 1)) => TemplateKind::Star(k - 1),
        _ => TemplateKind::General,
    }
}

fn search_order(k: usize, adj: &[u16]) -> Vec<usize> {
    let mut order = Vec::with_capacity(k);
    let mut placed = 0u16;
    while order.len() < k {
        // next component: start from its highest-degree vertex
        let start = (0..k)
            .filter(|&i| placed & (1 << i) == 0)
            .max_by_key(|&i| (adj[i].count_ones(), std::cmp::Reverse(i)))
            .expect("unplaced vertex");
        order.push(start);
        placed |= 1 << start;
        loop {
            // prefer the vertex with most placed neighbours (tighter candidate sets)
            let next = (0..k)
                .filter(|&i| placed & (1 << i) == 0 && adj[i] & placed != 0)
                .max_by_key(|&i| ((adj[i] & placed).count_ones(), std::cmp::Reverse(i)));
            match next {
                Some(i) => {
                    order.push(i);
                    placed |= 1 << i;
                }
                None => break,
            }
        }
    }
    order
}

/// Template list with a vertex cap `L`.
#[derive(Debug, Clone)]
pub struct TemplateFamily {
    templates: Vec<TemplateGraph>,
    cap: usize,
}

impl TemplateFamily {
    pub fn new(templates: Vec<TemplateGraph>, cap: usize) -> Result<Self> {
        for (i, t) in templates.iter().enumerate() {
            if t.k() > cap {
                return Err(ErgmError::InvalidTemplate(format!(
                    "{} has {} vertices, above the family cap {cap}",
                    t.name(),
                    t.k()
                )));
            }
            if templates[..i].iter().any(|s| s == t) {
                return Err(ErgmError::InvalidTemplate(format!("duplicate template {}", t.name())));
            }
        }
        Ok(TemplateFamily { templates, cap })
    }

    /// All connected simple graphs on at most `cap` vertices with at least two
    /// edges, one representative per isomorphism class.
    pub fn connected_up_to(cap: usize) -> Result<Self> {
        if cap > MAX_FAMILY_CAP {
            return Err(ErgmError::InvalidTemplate(format!(
                "family enumeration supports cap <= {MAX_FAMILY_CAP}, got {cap}"
            )));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for k in 3..=cap {
            let pairs: Vec<(usize, usize)> =
                (1..k).flat_map(|b| (0..b).map(move |a| (a, b))).collect();
            for mask in 1u64..(1 << pairs.len()) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let edges: Vec<_> =
                    pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
                let t = TemplateGraph::from_edges("", k, &edges)?;
                if !t.is_connected() {
                    continue;
                }
                let code = t.canonical_code();
                if seen.insert(code) {
                    let name = format!("g{k}_{:x}", code & ((1 << 56) - 1));
                    out.push(TemplateGraph { name, ..t });
                }
            }
        }
        Self::new(out, cap)
    }

    pub fn templates(&self) -> &[TemplateGraph] {
        &self.templates
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

/// Template as written in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TemplateSpec {
    Named(String),
    Edges {
        edges: Vec<[usize; 2]>,
        #[serde(default)]
        vertices: Option<usize>,
    },
}

impl TemplateSpec {
    pub fn build(&self) -> Result<TemplateGraph> {
        match self {
            TemplateSpec::Named(s) => TemplateGraph::parse(s),
            TemplateSpec::Edges { edges, vertices } => {
                let list: Vec<_> = edges.iter().map(|e| (e[0], e[1])).collect();
                let k = vertices.unwrap_or_else(|| list.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0));
                TemplateGraph::from_edges("custom", k, &list)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_and_kinds() {
        assert_eq!(TemplateGraph::edge().kind(), TemplateKind::Edge);
        assert_eq!(TemplateGraph::triangle().kind(), TemplateKind::Triangle);
        assert_eq!(TemplateGraph::two_star().kind(), TemplateKind::Star(2));
        assert_eq!(TemplateGraph::parse("k_star:4").unwrap().kind(), TemplateKind::Star(4));
        assert_eq!(TemplateGraph::parse("cycle:4").unwrap().kind(), TemplateKind::Cycle4);
        assert_eq!(TemplateGraph::parse("0-1,1-2,2-3").unwrap().kind(), TemplateKind::Path4);
        assert_eq!(TemplateGraph::parse("0-1,1-2,2-0,0-3").unwrap().kind(), TemplateKind::Paw);
        assert_eq!(TemplateGraph::parse("0-1,1-2,2-0,1-3,2-3").unwrap().kind(), TemplateKind::Diamond);
        assert_eq!(TemplateGraph::parse("0-1,0-2,0-3,1-2,1-3,2-3").unwrap().kind(), TemplateKind::Clique4);
        assert_eq!(TemplateGraph::parse("cycle:5").unwrap().kind(), TemplateKind::General);
        assert_eq!(TemplateGraph::parse("0-1, 1-2, 2-0").unwrap().kind(), TemplateKind::Triangle);
        assert!(TemplateGraph::parse("square").is_err());
        assert!(TemplateGraph::parse("0-0").is_err());
        assert!(TemplateGraph::parse("0-1,1-0").is_err());
    }

    #[test]
    fn degree_sum_and_pair_degrees() {
        let diamond = TemplateGraph::parse("0-1,0-2,1-2,1-3,2-3").unwrap();
        assert_eq!(diamond.degrees().iter().sum::<usize>(), 2 * diamond.edge_count());
        for (&(i, j), &d) in diamond.edges().iter().zip(diamond.pair_degrees()) {
            let brute = (0..4)
                .filter(|&l| l != i && l != j)
                .filter(|&l| diamond.edges().iter().any(|&(a, b)| (a, b) == (l.min(i), l.max(i))))
                .filter(|&l| diamond.edges().iter().any(|&(a, b)| (a, b) == (l.min(j), l.max(j))))
                .count();
            assert_eq!(d, brute);
        }
        assert_eq!(TemplateGraph::triangle().pair_degrees(), &[1, 1, 1]);
    }

    #[test]
    fn search_order_is_connected() {
        let p = TemplateGraph::parse("0-1,2-3,1-2,3-4").unwrap();
        let order = p.search_order();
        for (pos, &v) in order.iter().enumerate().skip(1) {
            assert!(order[..pos].iter().any(|&w| p.adjacency(v) & (1 << w) != 0));
        }
    }

    #[test]
    fn delta_terms_for_complete_graph_collapse() {
        let k4 = TemplateGraph::parse("0-1,0-2,0-3,1-2,1-3,2-3").unwrap();
        assert_eq!(k4.automorphisms().len(), 24);
        let terms = k4.delta_terms().unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].weight, 12);
        let tri = TemplateGraph::triangle();
        assert_eq!(tri.delta_terms().unwrap(), &[DeltaTerm { weight: 6, pins: vec![(0, false), (1, true)] }]);
    }

    #[test]
    fn default_family_sizes() {
        // connected graphs with >= 2 edges: 2 on 3 vertices, 6 on 4, 21 on 5
        assert_eq!(TemplateFamily::connected_up_to(3).unwrap().len(), 2);
        assert_eq!(TemplateFamily::connected_up_to(4).unwrap().len(), 8);
        assert_eq!(TemplateFamily::connected_up_to(5).unwrap().len(), 29);
        assert!(TemplateFamily::connected_up_to(7).is_err());
    }

    #[test]
    fn family_rejects_duplicates_and_oversize() {
        let t = TemplateGraph::triangle();
        assert!(TemplateFamily::new(vec![t.clone(), t.clone()], 4).is_err());
        assert!(TemplateFamily::new(vec![TemplateGraph::cycle(5).unwrap()], 4).is_err());
    }

    #[test]
    fn spec_from_toml() {
        #[derive(Deserialize)]
        struct W {
            t: Vec<TemplateSpec>,
        }
        let w: W = toml::from_str("t = [\"triangle\", { edges = [[0,1],[1,2]] }]").unwrap();
        assert_eq!(w.t[0].build().unwrap().kind(), TemplateKind::Triangle);
        assert_eq!(w.t[1].build().unwrap().kind(), TemplateKind::Star(2));
    }
}
