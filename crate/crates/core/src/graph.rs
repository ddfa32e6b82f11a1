//! Dense simple graphs on `n` labelled vertices.
//!
//! Adjacency is kept twice: as `n` bit rows (so codegree is a word-wise AND
//! plus popcount) and as a triangular bit array indexed by the linear edge
//! index `v(v-1)/2 + u` for `u < v` (the snapshot layout). Both are updated by
//! every mutation.

use rand::Rng;

use crate::error::{ErgmError, Result, SnapshotError};

/// Largest vertex count the snapshot header can describe.
pub const MAX_VERTICES: usize = 1 << 16;

const MAGIC: &[u8; 4] = b"ERGX";
const VERSION: u8 = 1;
const HEADER_LEN: usize = 9;

/// Number of unordered pairs on `n` vertices.
#[inline]
pub fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// An unordered vertex pair, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub u: u32,
    pub v: u32,
}

impl EdgeId {
    /// Builds the pair in canonical order. Fails on `a == b`.
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(ErgmError::SelfLoop(a));
        }
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Ok(EdgeId { u: u as u32, v: v as u32 })
    }

    #[inline]
    pub fn index(self) -> usize {
        let v = self.v as usize;
        v * (v - 1) / 2 + self.u as usize
    }

    /// Inverse of [`EdgeId::index`].
    #[inline]
    pub fn from_index(i: usize) -> Self {
        // v is the largest integer with v(v-1)/2 <= i.
        let mut v = ((1.0 + (1.0 + 8.0 * i as f64).sqrt()) / 2.0) as usize;
        while v * (v - 1) / 2 > i {
            v -= 1;
        }
        while (v + 1) * v / 2 <= i {
            v += 1;
        }
        let u = i - v * (v - 1) / 2;
        EdgeId { u: u as u32, v: v as u32 }
    }

    #[inline]
    pub fn endpoints(self) -> (usize, usize) {
        (self.u as usize, self.v as usize)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    linear: Vec<u64>,
    m: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("m", &self.m).finish()
    }
}

impl Graph {
    pub fn new_empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(ErgmError::EmptyGraph);
        }
        if n > MAX_VERTICES {
            return Err(ErgmError::TooLarge { what: "graph", n, max: MAX_VERTICES });
        }
        let words = n.div_ceil(64);
        Ok(Graph {
            n,
            words,
            rows: vec![0; n * words],
            linear: vec![0; num_pairs(n).div_ceil(64)],
            m: 0,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::new_empty(n)?;
        for v in 1..n {
            for u in 0..v {
                g.set_pair(u, v, true);
            }
        }
        Ok(g)
    }

    /// Erdős–Rényi `G(n, p)`: each pair independently present with probability `p`.
    /// Pairs are visited in linear-index order, one uniform draw each.
    pub fn sample_gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ErgmError::InvalidProbability(p));
        }
        let mut g = Self::new_empty(n)?;
        for v in 1..n {
            for u in 0..v {
                if rng.random::<f64>() < p {
                    g.set_pair(u, v, true);
                }
            }
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new_empty(n)?;
        for &(a, b) in edges {
            g.check_vertex(a)?;
            g.check_vertex(b)?;
            let e = EdgeId::new(a, b)?;
            g.set_edge(e, true);
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn num_pairs(&self) -> usize {
        num_pairs(self.n)
    }

    /// Words per adjacency row.
    #[inline]
    pub fn row_words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    pub fn check_vertex(&self, u: usize) -> Result<()> {
        if u >= self.n {
            Err(ErgmError::VertexOutOfRange { vertex: u, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Validates an edge against this graph's vertex count.
    pub fn edge(&self, a: usize, b: usize) -> Result<EdgeId> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        EdgeId::new(a, b)
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.rows[u * self.words + v / 64] >> (v % 64)) & 1 == 1
    }

    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        let (u, v) = e.endpoints();
        self.has_edge(u, v)
    }

    #[inline]
    fn set_pair(&mut self, u: usize, v: usize, present: bool) -> bool {
        let was = self.has_edge(u, v);
        if was == present {
            return false;
        }
        let w = self.words;
        self.rows[u * w + v / 64] ^= 1 << (v % 64);
        self.rows[v * w + u / 64] ^= 1 << (u % 64);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let i = b * (b - 1) / 2 + a;
        self.linear[i / 64] ^= 1 << (i % 64);
        if present {
            self.m += 1;
        } else {
            self.m -= 1;
        }
        true
    }

    /// Sets the bit at `e`; returns whether the graph changed.
    #[inline]
    pub fn set_edge(&mut self, e: EdgeId, present: bool) -> bool {
        let (u, v) = e.endpoints();
        self.set_pair(u, v, present)
    }

    /// Toggles the bit at `e`; returns the new value.
    #[inline]
    pub fn flip_edge(&mut self, e: EdgeId) -> bool {
        let now = !self.contains(e);
        self.set_edge(e, now);
        now
    }

    /// `X^{+e}` as a copy.
    pub fn with_edge(&self, e: EdgeId) -> Graph {
        let mut g = self.clone();
        g.set_edge(e, true);
        g
    }

    /// `X^{-e}` as a copy.
    pub fn without_edge(&self, e: EdgeId) -> Graph {
        let mut g = self.clone();
        g.set_edge(e, false);
        g
    }

    /// `X^{⊕e}` as a copy.
    pub fn with_edge_toggled(&self, e: EdgeId) -> Graph {
        let mut g = self.clone();
        g.flip_edge(e);
        g
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    /// Number of common neighbours of `u` and `v`.
    #[inline]
    pub fn codegree(&self, u: usize, v: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(u))
    }

    /// Present edges in linear-index order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        iter_bits(&self.linear).map(EdgeId::from_index)
    }

    /// True iff every edge of `self` is also an edge of `other` (`self ⪯ other`).
    pub fn dominated_by(&self, other: &Graph) -> Result<bool> {
        if self.n != other.n {
            return Err(ErgmError::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(self.linear.iter().zip(&other.linear).all(|(a, b)| a & !b == 0))
    }

    /// Number of pairs on which the two graphs disagree.
    pub fn hamming(&self, other: &Graph) -> Result<usize> {
        if self.n != other.n {
            return Err(ErgmError::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(self
            .linear
            .iter()
            .zip(&other.linear)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Edge bitmask in linear order; only meaningful for `n(n-1)/2 <= 64`.
    pub fn state_index(&self) -> u64 {
        self.linear.first().copied().unwrap_or(0)
    }

    /// Inverse of [`Graph::state_index`].
    pub fn from_state_index(n: usize, bits: u64) -> Result<Self> {
        let pairs = num_pairs(n);
        if pairs > 64 {
            return Err(ErgmError::TooLarge { what: "state index", n, max: 11 });
        }
        let mut g = Self::new_empty(n)?;
        for i in 0..pairs {
            if (bits >> i) & 1 == 1 {
                g.set_edge(EdgeId::from_index(i), true);
            }
        }
        Ok(g)
    }

    /// Copy of the graph with vertices relabelled by `perm` (vertex `u` becomes `perm[u]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(ErgmError::SizeMismatch { left: self.n, right: perm.len() });
        }
        let mut g = Graph::new_empty(self.n)?;
        for e in self.edges() {
            let (u, v) = e.endpoints();
            g.set_edge(EdgeId::new(perm[u], perm[v])?, true);
        }
        Ok(g)
    }

    /// Serialises to the `ERGX` v1 snapshot format.
    pub fn to_snapshot(&self) -> Vec<u8> {
        let payload = num_pairs(self.n).div_ceil(8);
        let mut out = Vec::with_capacity(HEADER_LEN + payload);
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        for i in 0..payload {
            out.push((self.linear[i / 8] >> (8 * (i % 8))) as u8);
        }
        out
    }

    pub fn from_snapshot(bytes: &[u8]) -> Result<Self, SnapshotError> {
        if bytes.len() < HEADER_LEN {
            return Err(SnapshotError::ShortHeader(bytes.len()));
        }
        let magic: [u8; 4] = bytes[0..4].try_into().expect("4 bytes");
        if &magic != MAGIC {
            return Err(SnapshotError::BadMagic(magic));
        }
        if bytes[4] != VERSION {
            return Err(SnapshotError::UnsupportedVersion(bytes[4]));
        }
        let n32 = u32::from_le_bytes(bytes[5..9].try_into().expect("4 bytes"));
        let n = n32 as usize;
        if n == 0 || n > MAX_VERTICES {
            return Err(SnapshotError::BadVertexCount(n32));
        }
        let pairs = num_pairs(n);
        let expected = pairs.div_ceil(8);
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != expected {
            return Err(SnapshotError::PayloadLength { expected, found: payload.len() });
        }
        if !pairs.is_multiple_of(8) {
            let last = payload[expected - 1];
            if last >> (pairs % 8) != 0 {
                return Err(SnapshotError::NonzeroPadding);
            }
        }
        let mut g = Graph::new_empty(n).map_err(|_| SnapshotError::BadVertexCount(n32))?;
        for (i, &byte) in payload.iter().enumerate() {
            let mut b = byte;
            while b != 0 {
                let bit = b.trailing_zeros() as usize;
                g.set_edge(EdgeId::from_index(8 * i + bit), true);
                b &= b - 1;
            }
        }
        Ok(g)
    }
}

/// Iterates the indices of set bits in a word slice.
pub fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}
