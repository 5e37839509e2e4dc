//! Hypergraphs built from codes, and searches for the configurations that a
//! valid code must avoid.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::code::CoveringCode;
use crate::subspace::{gaussian_binomial, SubspaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("edge {edge} refers to vertex {vertex}, but there are only {vertex_count} vertices")]
    InvalidVertex {
        edge: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("edge {edge} repeats edge {first}")]
    DuplicateEdge { edge: usize, first: usize },
    #[error("edge {0} is empty")]
    EmptyEdge(usize),
    #[error("{what}: {count} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        count: BigUint,
        cap: u64,
    },
    #[error("codeword dimension must be at least 2 for the hyperplane hypergraph")]
    Degenerate,
    #[error("invalid search length {0}")]
    BadLength(usize),
    #[error("malformed hypergraph text: {0}")]
    Parse(String),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
}

/// Vertices `0..vertex_count` and a list of distinct edges, each stored sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_count: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(vertex_count: usize, edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        let mut seen = std::collections::HashMap::new();
        let mut sorted = Vec::with_capacity(edges.len());
        for (i, mut e) in edges.into_iter().enumerate() {
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(HypergraphError::EmptyEdge(i));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= vertex_count) {
                return Err(HypergraphError::InvalidVertex {
                    edge: i,
                    vertex: v,
                    vertex_count,
                });
            }
            if let Some(&first) = seen.get(&e) {
                return Err(HypergraphError::DuplicateEdge { edge: i, first });
            }
            seen.insert(e.clone(), i);
            sorted.push(e);
        }
        Ok(Hypergraph {
            vertex_count,
            edges: sorted,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Common size of all edges, if uniform and nonempty.
    pub fn uniformity(&self) -> Option<usize> {
        let r = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == r).then_some(r)
    }

    /// Largest intersection between two distinct edges (0 with fewer than two).
    pub fn max_pairwise_intersection(&self) -> usize {
        let mut best = 0;
        for i in 0..self.edges.len() {
            for j in i + 1..self.edges.len() {
                best = best.max(intersection(&self.edges[i], &self.edges[j]).len());
            }
        }
        best
    }

    fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v].push(i);
            }
        }
        inc
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count, self.edges.len());
        for e in &self.edges {
            let parts: Vec<String> = e.iter().map(ToString::to_string).collect();
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, HypergraphError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let parse_line = |line: &str| -> Result<Vec<usize>, HypergraphError> {
            line.split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| HypergraphError::Parse(format!("not a number: {t:?}")))
                })
                .collect()
        };
        let header = lines
            .next()
            .ok_or_else(|| HypergraphError::Parse("empty input".into()))?;
        let [v, e] = parse_line(header)?[..] else {
            return Err(HypergraphError::Parse(format!("bad header {header:?}")));
        };
        let edges = lines.map(parse_line).collect::<Result<Vec<_>, _>>()?;
        if edges.len() != e {
            return Err(HypergraphError::Parse(format!(
                "header announces {e} edges, found {}",
                edges.len()
            )));
        }
        Hypergraph::new(v, edges)
    }
}

fn intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn subspace_hypergraph(code: &CoveringCode, d: usize, cap: u64) -> Result<Hypergraph, HypergraphError> {
    let spec = code.spec();
    let count = gaussian_binomial(spec.n, d, spec.q)?;
    let vertex_count = count
        .to_u64()
        .filter(|&c| c <= cap)
        .ok_or_else(|| HypergraphError::CapExceeded {
            what: "vertices",
            count: count.clone(),
            cap,
        })? as usize;
    let mut edges = Vec::with_capacity(code.len());
    for w in code.words() {
        let e = w
            .subspaces_of_dim(d)?
            .iter()
            .map(|s| s.enumeration_index().to_usize().expect("below cap"))
            .collect();
        edges.push(e);
    }
    Hypergraph::new(vertex_count, edges)
}

/// Vertices are the 1-subspaces of F_q^n; each codeword gives the edge of its
/// 1-subspaces. Vertex indices follow the enumeration order.
pub fn code_to_point_hypergraph(code: &CoveringCode, cap: u64) -> Result<Hypergraph, HypergraphError> {
    subspace_hypergraph(code, 1, cap)
}

/// Vertices are the (k−1)-subspaces of F_q^n; each codeword gives the edge of
/// its (k−1)-subspaces.
pub fn code_to_hyperplane_hypergraph(code: &CoveringCode, cap: u64) -> Result<Hypergraph, HypergraphError> {
    let k = code.spec().k;
    if k < 2 {
        return Err(HypergraphError::Degenerate);
    }
    subspace_hypergraph(code, k - 1, cap)
}

/// Bounds on the exponential searches below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_edges: usize,
    pub max_length: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_edges: 40,
            max_length: 4,
        }
    }
}

impl SearchLimits {
    fn check(&self, h: &Hypergraph, length: usize) -> Result<(), HypergraphError> {
        if h.edge_count() > self.max_edges {
            return Err(HypergraphError::CapExceeded {
                what: "edges",
                count: BigUint::from(h.edge_count()),
                cap: self.max_edges as u64,
            });
        }
        if length > self.max_length {
            return Err(HypergraphError::CapExceeded {
                what: "search length",
                count: BigUint::from(length),
                cap: self.max_length as u64,
            });
        }
        Ok(())
    }
}

/// Base vertices and edges of an embedded path or cycle. For a path of
/// length L, edge `i` contains base vertices `i` and `i+1`; for a cycle the
/// last edge wraps around to base vertex 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BergeWitness {
    pub base_vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl BergeWitness {
    /// Checks the embedding condition against `h`.
    pub fn is_valid_in(&self, h: &Hypergraph, cycle: bool) -> bool {
        let l = self.edges.len();
        let expected = if cycle { l } else { l + 1 };
        if self.base_vertices.len() != expected {
            return false;
        }
        let distinct_v: HashSet<_> = self.base_vertices.iter().collect();
        let distinct_e: HashSet<_> = self.edges.iter().collect();
        if distinct_v.len() != self.base_vertices.len() || distinct_e.len() != l {
            return false;
        }
        (0..l).all(|i| {
            let Some(e) = h.edges.get(self.edges[i]) else {
                return false;
            };
            let a = self.base_vertices[i];
            let b = self.base_vertices[(i + 1) % expected];
            e.binary_search(&a).is_ok() && e.binary_search(&b).is_ok()
        })
    }
}

impl fmt::Display for BergeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        write!(
            f,
            "base_vertices={} edges={}",
            join(&self.base_vertices),
            join(&self.edges)
        )
    }
}

struct BergeSearch<'a> {
    h: &'a Hypergraph,
    inc: Vec<Vec<usize>>,
    length: usize,
    cycle: bool,
    verts: Vec<usize>,
    edges: Vec<usize>,
}

impl BergeSearch<'_> {
    /// Extends from the last base vertex with edge number `edges.len()`.
    fn extend(&mut self) -> bool {
        let last = *self.verts.last().unwrap();
        let step = self.edges.len();
        let closing = self.cycle && step + 1 == self.length;
        for ei in 0..self.inc[last].len() {
            let e = self.inc[last][ei];
            if self.edges.contains(&e) {
                continue;
            }
            if closing {
                if self.h.edges[e].binary_search(&self.verts[0]).is_ok() {
                    self.edges.push(e);
                    return true;
                }
                continue;
            }
            self.edges.push(e);
            for vi in 0..self.h.edges[e].len() {
                let w = self.h.edges[e][vi];
                if self.verts.contains(&w) {
                    continue;
                }
                self.verts.push(w);
                if step + 1 == self.length || self.extend() {
                    return true;
                }
                self.verts.pop();
            }
            self.edges.pop();
        }
        false
    }

    fn run(&mut self) -> Option<BergeWitness> {
        for w in 0..self.h.vertex_count {
            if self.inc[w].is_empty() {
                continue;
            }
            self.verts.push(w);
            if self.extend() {
                return Some(BergeWitness {
                    base_vertices: self.verts.clone(),
                    edges: self.edges.clone(),
                });
            }
            self.verts.pop();
        }
        None
    }
}

fn berge(h: &Hypergraph, length: usize, cycle: bool, limits: SearchLimits) -> Result<Option<BergeWitness>, HypergraphError> {
    let min = if cycle { 3 } else { 1 };
    if length < min {
        return Err(HypergraphError::BadLength(length));
    }
    limits.check(h, length)?;
    let mut s = BergeSearch {
        h,
        inc: h.incidence(),
        length,
        cycle,
        verts: Vec::new(),
        edges: Vec::new(),
    };
    Ok(s.run())
}

/// Berge path with `length` edges. The witness returned is the least in the
/// lexicographic order of the sequence (w1, f1, w2, f2, …).
pub fn find_berge_path(h: &Hypergraph, length: usize, limits: SearchLimits) -> Result<Option<BergeWitness>, HypergraphError> {
    berge(h, length, false, limits)
}

/// Berge cycle with `length` ≥ 3 edges, least witness as for paths.
pub fn find_berge_cycle(h: &Hypergraph, length: usize, limits: SearchLimits) -> Result<Option<BergeWitness>, HypergraphError> {
    berge(h, length, true, limits)
}

/// Linear cycle of `length` ≥ 3 edges: cyclically consecutive edges meet in
/// exactly one vertex, all other pairs are disjoint, and the meeting
/// vertices are distinct. The witness lists the edges in cycle order and,
/// as base vertices, the vertex shared by edge `i` and edge `i+1`.
pub fn find_linear_cycle(h: &Hypergraph, length: usize, limits: SearchLimits) -> Result<Option<BergeWitness>, HypergraphError> {
    if length < 3 {
        return Err(HypergraphError::BadLength(length));
    }
    limits.check(h, length)?;
    let m = h.edge_count();
    let meet: Vec<Vec<Vec<usize>>> = (0..m)
        .map(|i| (0..m).map(|j| intersection(&h.edges[i], &h.edges[j])).collect())
        .collect();
    let mut seq = Vec::with_capacity(length);
    fn go(meet: &[Vec<Vec<usize>>], length: usize, seq: &mut Vec<usize>) -> bool {
        let m = meet.len();
        if seq.len() == length {
            let (first, last) = (seq[0], seq[length - 1]);
            if meet[last][first].len() != 1 {
                return false;
            }
            let shared: HashSet<usize> = (0..length)
                .map(|i| meet[seq[i]][seq[(i + 1) % length]][0])
                .collect();
            return shared.len() == length;
        }
        let last = *seq.last().unwrap();
        for e in 0..m {
            if seq.contains(&e) || meet[last][e].len() != 1 {
                continue;
            }
            // e must avoid every earlier edge except its predecessor and,
            // when it closes the cycle, the first edge
            let closes = seq.len() + 1 == length;
            let ok = seq[..seq.len() - 1].iter().enumerate().all(|(pos, &f)| {
                if closes && pos == 0 {
                    true
                } else {
                    meet[f][e].is_empty()
                }
            });
            if !ok {
                continue;
            }
            seq.push(e);
            if go(meet, length, seq) {
                return true;
            }
            seq.pop();
        }
        false
    }
    for start in 0..m {
        seq.push(start);
        if go(&meet, length, &mut seq) {
            let base_vertices = (0..length)
                .map(|i| meet[seq[(i + length - 1) % length]][seq[i]][0])
                .collect();
            return Ok(Some(BergeWitness {
                base_vertices,
                edges: seq,
            }));
        }
        seq.pop();
    }
    Ok(None)
}

/// Least triple of edges (by index) whose union has at most `3r − 3`
/// vertices.
pub fn check_63_configuration(h: &Hypergraph, r: usize) -> Option<[usize; 3]> {
    let bound = (3 * r).saturating_sub(3);
    let m = h.edge_count();
    for a in 0..m {
        for b in a + 1..m {
            let ab: HashSet<usize> = h.edges[a].iter().chain(&h.edges[b]).copied().collect();
            if ab.len() > bound {
                // adding an edge never shrinks the union
                continue;
            }
            for c in b + 1..m {
                let extra = h.edges[c].iter().filter(|v| !ab.contains(v)).count();
                if ab.len() + extra <= bound {
                    return Some([a, b, c]);
                }
            }
        }
    }
    None
}

/// Maximal independent set by repeatedly taking an undecided vertex of
/// least live degree (ties to the smaller index). A vertex is excluded as
/// soon as it is the last undecided member of an edge whose other members
/// are all taken; edges through excluded vertices stop counting.
pub fn greedy_independent_set(h: &Hypergraph) -> Vec<usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Open,
        In,
        Out,
    }
    let inc = h.incidence();
    let mut state = vec![State::Open; h.vertex_count];
    let mut edge_dead = vec![false; h.edge_count()];
    let mut degree: Vec<usize> = inc.iter().map(Vec::len).collect();
    let mut exclude = |u: usize, state: &mut Vec<State>, degree: &mut Vec<usize>| {
        if state[u] != State::Open {
            return;
        }
        state[u] = State::Out;
        for &e in &inc[u] {
            if !edge_dead[e] {
                edge_dead[e] = true;
                for &w in &h.edges[e] {
                    degree[w] -= 1;
                }
            }
        }
    };
    for e in h.edges.iter().filter(|e| e.len() == 1) {
        exclude(e[0], &mut state, &mut degree);
    }
    loop {
        let pick = (0..h.vertex_count)
            .filter(|&v| state[v] == State::Open)
            .min_by_key(|&v| (degree[v], v));
        let Some(v) = pick else { break };
        state[v] = State::In;
        for &e in &inc[v] {
            let open: Vec<usize> = h.edges[e]
                .iter()
                .copied()
                .filter(|&u| state[u] == State::Open)
                .collect();
            if open.len() == 1 && h.edges[e].iter().all(|&u| u == open[0] || state[u] == State::In) {
                exclude(open[0], &mut state, &mut degree);
            }
        }
    }
    (0..h.vertex_count).filter(|&v| state[v] == State::In).collect()
}
