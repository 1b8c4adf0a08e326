//! Finite reflexive graphs as a model of cohesion over sets.
//!
//! A set is a natural number `n` standing for `{0, .., n-1}`. The four
//! functors between sets and reflexive graphs are
//!
//! * `pi0`: connected components (left adjoint of `delta`),
//! * `delta`: the discrete graph, only loops,
//! * `gamma`: the vertex set,
//! * `nabla`: the codiscrete graph, every edge.
//!
//! Adjunctions are checked by brute force: both hom-sets are enumerated and
//! the canonical comparison map between them is verified to be a bijection.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Largest number of candidate vertex maps an enumeration may try.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RgphError {
    #[error("enumerating {count} vertex maps exceeds the limit of {ENUMERATION_LIMIT}")]
    TooLarge { count: u128 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A reflexive graph on vertices `0..n`. The edge set always contains every
/// loop `(v, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinRGph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl FinRGph {
    /// The graph with the given edges plus all loops. Panics on an edge
    /// endpoint out of range.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> FinRGph {
        let mut set: BTreeSet<(usize, usize)> = (0..n).map(|v| (v, v)).collect();
        for (u, v) in edges {
            assert!(
                u < n && v < n,
                "edge ({u}, {v}) outside a graph on {n} vertices"
            );
            set.insert((u, v));
        }
        FinRGph { n, edges: set }
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|v| self.has_edge(v, v))
    }

    /// Two vertices and one edge between them.
    pub fn walking_edge() -> FinRGph {
        FinRGph::new(2, [(0, 1)])
    }

    pub fn point() -> FinRGph {
        delta(1)
    }

    /// Disjoint union; the vertices of `other` come after those of `self`.
    pub fn disjoint_union(&self, other: &FinRGph) -> FinRGph {
        let k = self.n;
        FinRGph::new(
            self.n + other.n,
            self.edges
                .iter()
                .copied()
                .chain(other.edges.iter().map(|&(u, v)| (u + k, v + k))),
        )
    }

    /// Categorical product: vertex `(a, b)` is numbered `a * other.n + b`.
    pub fn product(&self, other: &FinRGph) -> FinRGph {
        let m = other.n;
        let mut edges = Vec::new();
        for &(a, a2) in &self.edges {
            for &(b, b2) in &other.edges {
                edges.push((a * m + b, a2 * m + b2));
            }
        }
        FinRGph::new(self.n * m, edges)
    }

    /// The text format: the vertex count on the first line, then one
    /// `u v` edge per line. Loops are implied; `#` starts a comment.
    pub fn parse(src: &str) -> Result<FinRGph, RgphError> {
        let mut lines = src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line, message: &str| RgphError::Parse {
            line,
            message: message.to_string(),
        };
        let (first, n) = lines.next().ok_or_else(|| err(1, "missing vertex count"))?;
        let n: usize = n
            .parse()
            .map_err(|_| err(first, "expected a vertex count"))?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let [u, v] = parts[..] else {
                return Err(err(line, "expected an edge `u v`"));
            };
            let u: usize = u
                .parse()
                .map_err(|_| err(line, "expected a vertex number"))?;
            let v: usize = v
                .parse()
                .map_err(|_| err(line, "expected a vertex number"))?;
            if u >= n || v >= n {
                return Err(err(line, "vertex out of range"));
            }
            edges.push((u, v));
        }
        Ok(FinRGph::new(n, edges))
    }
}

impl fmt::Display for FinRGph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let proper: Vec<String> = self
            .edges
            .iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| format!("{u}->{v}"))
            .collect();
        write!(f, "graph({}; {})", self.n, proper.join(", "))
    }
}

/// An edge-preserving vertex map.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphHom {
    pub map: Vec<usize>,
}

impl GraphHom {
    pub fn is_hom(&self, g: &FinRGph, h: &FinRGph) -> bool {
        self.map.len() == g.n
            && self.map.iter().all(|&v| v < h.n)
            && g.edges
                .iter()
                .all(|&(u, v)| h.has_edge(self.map[u], self.map[v]))
    }

    pub fn is_constant(&self) -> bool {
        self.map.windows(2).all(|w| w[0] == w[1])
    }

    /// `other` after `self`.
    pub fn then(&self, other: &GraphHom) -> GraphHom {
        GraphHom {
            map: self.map.iter().map(|&v| other.map[v]).collect(),
        }
    }
}

impl fmt::Display for GraphHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{i}->{v}"))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The discrete graph: only loops.
pub fn delta(n: usize) -> FinRGph {
    FinRGph::new(n, [])
}

/// The codiscrete graph: an edge between every ordered pair.
pub fn nabla(n: usize) -> FinRGph {
    FinRGph::new(n, (0..n).flat_map(|u| (0..n).map(move |v| (u, v))))
}

/// The underlying set of vertices.
pub fn gamma(g: &FinRGph) -> usize {
    g.n
}

/// Weakly connected component of each vertex, numbered in order of first
/// appearance.
pub fn components(g: &FinRGph) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..g.n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(u, v) in &g.edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label = vec![usize::MAX; g.n];
    let mut out = Vec::with_capacity(g.n);
    let mut next = 0;
    for v in 0..g.n {
        let r = find(&mut parent, v);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out.push(label[r]);
    }
    out
}

/// Number of weakly connected components.
pub fn pi0(g: &FinRGph) -> usize {
    components(g).into_iter().max().map_or(0, |m| m + 1)
}

/// The shape of a graph, `delta` after `pi0`.
pub fn shape(g: &FinRGph) -> FinRGph {
    delta(pi0(g))
}

/// `nabla` after `gamma`.
pub fn sharp(g: &FinRGph) -> FinRGph {
    nabla(gamma(g))
}

/// All functions `{0..from} -> {0..to}` in lexicographic order.
pub fn functions(from: usize, to: usize) -> Result<Vec<Vec<usize>>, RgphError> {
    let count = (to as u128).checked_pow(from as u32).unwrap_or(u128::MAX);
    if count > ENUMERATION_LIMIT {
        return Err(RgphError::TooLarge { count });
    }
    let mut out = Vec::with_capacity(count as usize);
    if from > 0 && to == 0 {
        return Ok(out);
    }
    let mut cur = vec![0; from];
    loop {
        out.push(cur.clone());
        let mut i = from;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < to {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Every graph homomorphism `g -> h`, lexicographically by vertex map.
pub fn enumerate_homs(g: &FinRGph, h: &FinRGph) -> Result<Vec<GraphHom>, RgphError> {
    Ok(functions(g.n, h.n)?
        .into_iter()
        .map(|map| GraphHom { map })
        .filter(|f| f.is_hom(g, h))
        .collect())
}

pub fn hom_count(g: &FinRGph, h: &FinRGph) -> Result<usize, RgphError> {
    enumerate_homs(g, h).map(|v| v.len())
}

/// Outcome of one named check, with a witness when it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn push(&mut self, name: String, outcome: Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(CheckResult {
            name,
            passed,
            detail,
        });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "{status} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Check that `to_fn` maps the homs in `homs` bijectively onto all
/// functions `{0..dom} -> {0..cod}`.
fn bijection(
    homs: &[GraphHom],
    dom: usize,
    cod: usize,
    to_fn: impl Fn(&GraphHom) -> Result<Vec<usize>, String>,
) -> Result<String, String> {
    let all = functions(dom, cod).map_err(|e| e.to_string())?;
    let mut image = BTreeSet::new();
    for h in homs {
        let f = to_fn(h)?;
        if !image.insert(f.clone()) {
            return Err(format!(
                "not injective: {h} and another hom both give {f:?}"
            ));
        }
    }
    if let Some(f) = all.iter().find(|f| !image.contains(*f)) {
        return Err(format!("not surjective: no hom gives {f:?}"));
    }
    Ok(format!("{} homs, {} functions", homs.len(), all.len()))
}

/// The three adjunctions `pi0 -| delta -| gamma -| nabla`, for every pair
/// of a set size in `sizes` and a graph in `graphs`.
pub fn check_adjunction_triple(sizes: &[usize], graphs: &[FinRGph]) -> Report {
    let mut report = Report::default();
    for &s in sizes {
        for g in graphs {
            let tag = |what: &str| format!("{what} S={s} G={g}");

            // Hom(delta S, G) = Set(S, gamma G): a hom restricts to its vertex map.
            let r = enumerate_homs(&delta(s), g)
                .map_err(|e| e.to_string())
                .and_then(|homs| bijection(&homs, s, gamma(g), |h| Ok(h.map.clone())));
            report.push(tag("delta -| gamma"), r);

            // Hom(G, nabla S) = Set(gamma G, S).
            let r = enumerate_homs(g, &nabla(s))
                .map_err(|e| e.to_string())
                .and_then(|homs| bijection(&homs, gamma(g), s, |h| Ok(h.map.clone())));
            report.push(tag("gamma -| nabla"), r);

            // Hom(G, delta S) = Set(pi0 G, S): a hom is constant on
            // components and factors through them.
            let comps = components(g);
            let k = pi0(g);
            let r = enumerate_homs(g, &delta(s))
                .map_err(|e| e.to_string())
                .and_then(|homs| {
                    bijection(&homs, k, s, |h| {
                        let mut f = vec![usize::MAX; k];
                        for (v, &c) in comps.iter().enumerate() {
                            if f[c] == usize::MAX {
                                f[c] = h.map[v];
                            } else if f[c] != h.map[v] {
                                return Err(format!("{h} is not constant on component {c}"));
                            }
                        }
                        Ok(f)
                    })
                });
            report.push(tag("pi0 -| delta"), r);
        }
    }
    report
}

/// Every reflexive graph on `n` vertices: one per subset of the
/// non-loop ordered pairs.
pub fn all_graphs(n: usize) -> Vec<FinRGph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            FinRGph::new(
                n,
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e),
            )
        })
        .collect()
}

/// The exhaustive suite: every graph with at most `max_vertices` vertices
/// against every set of size at most `max_set`.
pub fn adjunction_suite(max_vertices: usize, max_set: usize) -> Report {
    let sizes: Vec<usize> = (0..=max_set).collect();
    let mut report = Report::default();
    for n in 0..=max_vertices {
        let graphs = all_graphs(n);
        let r = check_adjunction_triple(&sizes, &graphs);
        let total = r.checks.len();
        match r.first_failure() {
            Some(c) => report.push(
                format!("{n} vertices"),
                Err(format!("{}: {}", c.name, c.detail)),
            ),
            None => report.push(
                format!("{n} vertices"),
                Ok(format!("{} graphs, {} checks", graphs.len(), total)),
            ),
        }
    }
    report
}

/// Strict bipointedness (`p0 != p1`) and weak connectedness, the latter as
/// "every hom into a discrete graph of a size in `sizes` is constant".
pub fn check_interval_axioms(g: &FinRGph, p0: usize, p1: usize, sizes: &[usize]) -> Report {
    let mut report = Report::default();
    let bip = if p0 >= g.n || p1 >= g.n {
        Err(format!("endpoints {p0}, {p1} are not vertices of {g}"))
    } else if p0 == p1 {
        Err(format!("both endpoints are vertex {p0}"))
    } else {
        Ok(format!("{p0} != {p1}"))
    };
    report.push("bipointed".to_string(), bip);
    for &n in sizes {
        let r = enumerate_homs(g, &delta(n))
            .map_err(|e| e.to_string())
            .and_then(|homs| match homs.iter().find(|h| !h.is_constant()) {
                Some(h) => Err(format!("non-constant hom {h}")),
                None => Ok(format!("all {} homs constant", homs.len())),
            });
        report.push(format!("connected into delta({n})"), r);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_and_nabla_shapes() {
        assert_eq!(delta(0).vertices(), 0);
        assert_eq!(delta(2).edges().len(), 2);
        assert_eq!(nabla(2).edges().len(), 4);
        assert_eq!(nabla(1), delta(1));
    }

    #[test]
    fn walking_edge_invariants() {
        let w = FinRGph::walking_edge();
        assert_eq!(gamma(&w), 2);
        assert_eq!(pi0(&w), 1);
        assert_eq!(hom_count(&w, &w).unwrap(), 3);
        assert_eq!(hom_count(&w, &delta(3)).unwrap(), 3);
    }

    #[test]
    fn pi0_of_discrete_graph() {
        for n in 0..5 {
            assert_eq!(pi0(&delta(n)), n);
        }
    }

    #[test]
    fn homs_from_the_point_are_vertices() {
        let g = FinRGph::new(3, [(0, 1), (2, 1)]);
        assert_eq!(hom_count(&FinRGph::point(), &g).unwrap(), gamma(&g));
    }

    #[test]
    fn oversized_enumeration_is_refused() {
        let big = delta(30);
        assert!(matches!(
            enumerate_homs(&big, &big),
            Err(RgphError::TooLarge { .. })
        ));
    }

    #[test]
    fn empty_set_has_no_maps_from_nonempty_graphs() {
        let r = check_adjunction_triple(&[0], &[FinRGph::walking_edge(), delta(0)]);
        assert!(r.passed(), "{r}");
        assert_eq!(hom_count(&FinRGph::walking_edge(), &delta(0)).unwrap(), 0);
        assert_eq!(hom_count(&delta(0), &delta(0)).unwrap(), 1);
    }

    #[test]
    fn interval_axioms() {
        let w = FinRGph::walking_edge();
        assert!(check_interval_axioms(&w, 0, 1, &[1, 2, 3]).passed());
        let d = check_interval_axioms(&delta(2), 0, 1, &[2]);
        assert!(d.checks[0].passed);
        assert!(!d.checks[1].passed);
        assert!(d.checks[1].detail.contains("[0->0, 1->1]"));
        assert!(!check_interval_axioms(&FinRGph::point(), 0, 0, &[2]).checks[0].passed);
    }

    #[test]
    fn parse_graph_file() {
        let g = FinRGph::parse("2\n0 1\n").unwrap();
        assert_eq!(g, FinRGph::walking_edge());
        assert!(matches!(
            FinRGph::parse("2\n0 5\n"),
            Err(RgphError::Parse { line: 2, .. })
        ));
        assert!(FinRGph::parse("").is_err());
    }

    #[test]
    fn graph_counts() {
        assert_eq!(all_graphs(0).len(), 1);
        assert_eq!(all_graphs(2).len(), 4);
        assert_eq!(all_graphs(3).len(), 64);
    }

    #[test]
    fn constructions_stay_reflexive() {
        let w = FinRGph::walking_edge();
        for g in [
            delta(3),
            nabla(3),
            w.product(&w),
            w.disjoint_union(&nabla(2)),
            shape(&w),
            sharp(&w),
        ] {
            assert!(g.is_reflexive());
        }
    }
}
