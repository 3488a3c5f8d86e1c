use std::collections::{BTreeMap, BTreeSet};

use super::term::{Iri, Literal, Term, Triple};

type Spo = BTreeMap<Iri, BTreeMap<Iri, BTreeSet<Term>>>;
type Pos = BTreeMap<Iri, BTreeMap<Term, BTreeSet<Iri>>>;
type Osp = BTreeMap<Term, BTreeMap<Iri, BTreeSet<Iri>>>;

/// One named graph with its three permutation indexes.
#[derive(Clone, Default)]
pub(crate) struct GraphIndex {
    spo: Spo,
    pos: Pos,
    osp: Osp,
    len: usize,
}

impl GraphIndex {
    fn insert(&mut self, t: Triple) -> bool {
        let added = self
            .spo
            .entry(t.subject.clone())
            .or_default()
            .entry(t.predicate.clone())
            .or_default()
            .insert(t.object.clone());
        if !added {
            return false;
        }
        self.pos
            .entry(t.predicate.clone())
            .or_default()
            .entry(t.object.clone())
            .or_default()
            .insert(t.subject.clone());
        self.osp
            .entry(t.object)
            .or_default()
            .entry(t.subject)
            .or_default()
            .insert(t.predicate);
        self.len += 1;
        true
    }

    fn remove(&mut self, t: &Triple) -> bool {
        fn drop_nested<A: Ord, B: Ord, C: Ord>(
            map: &mut BTreeMap<A, BTreeMap<B, BTreeSet<C>>>,
            a: &A,
            b: &B,
            c: &C,
        ) -> bool {
            let Some(inner) = map.get_mut(a) else { return false };
            let Some(set) = inner.get_mut(b) else { return false };
            let removed = set.remove(c);
            if set.is_empty() {
                inner.remove(b);
            }
            if inner.is_empty() {
                map.remove(a);
            }
            removed
        }
        if !drop_nested(&mut self.spo, &t.subject, &t.predicate, &t.object) {
            return false;
        }
        drop_nested(&mut self.pos, &t.predicate, &t.object, &t.subject);
        drop_nested(&mut self.osp, &t.object, &t.subject, &t.predicate);
        self.len -= 1;
        true
    }

    fn matching(
        &self,
        s: Option<&Iri>,
        p: Option<&Iri>,
        o: Option<&Term>,
        out: &mut Vec<Triple>,
    ) {
        let triple = |s: &Iri, p: &Iri, o: &Term| Triple::new(s.clone(), p.clone(), o.clone());
        match (s, p, o) {
            (Some(s), _, _) => {
                let Some(by_p) = self.spo.get(s) else { return };
                let preds: Box<dyn Iterator<Item = (&Iri, &BTreeSet<Term>)>> = match p {
                    Some(p) => Box::new(by_p.get_key_value(p).into_iter()),
                    None => Box::new(by_p.iter()),
                };
                for (pp, objects) in preds {
                    match o {
                        Some(o) => {
                            if objects.contains(o) {
                                out.push(triple(s, pp, o));
                            }
                        }
                        None => out.extend(objects.iter().map(|oo| triple(s, pp, oo))),
                    }
                }
            }
            (None, Some(p), _) => {
                let Some(by_o) = self.pos.get(p) else { return };
                let start = out.len();
                let objs: Box<dyn Iterator<Item = (&Term, &BTreeSet<Iri>)>> = match o {
                    Some(o) => Box::new(by_o.get_key_value(o).into_iter()),
                    None => Box::new(by_o.iter()),
                };
                for (oo, subjects) in objs {
                    out.extend(subjects.iter().map(|ss| triple(ss, p, oo)));
                }
                out[start..].sort_unstable();
            }
            (None, None, Some(o)) => {
                let Some(by_s) = self.osp.get(o) else { return };
                for (ss, preds) in by_s {
                    out.extend(preds.iter().map(|pp| triple(ss, pp, o)));
                }
            }
            (None, None, None) => {
                for (ss, by_p) in &self.spo {
                    for (pp, objects) in by_p {
                        out.extend(objects.iter().map(|oo| triple(ss, pp, oo)));
                    }
                }
            }
        }
    }
}

/// The full set of named graphs. Callers normally go through [`super::Store`],
/// which guards a dataset with a reader/writer lock.
#[derive(Clone, Default)]
pub struct Dataset {
    graphs: BTreeMap<Iri, GraphIndex>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        let non_empty = |d: &Dataset| {
            d.graphs
                .iter()
                .filter(|(_, g)| g.len > 0)
                .map(|(name, g)| (name.clone(), g.spo.clone()))
                .collect::<Vec<_>>()
        };
        non_empty(self) == non_empty(other)
    }
}

impl std::fmt::Debug for Dataset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map()
            .entries(self.graphs.iter().map(|(name, g)| (name, g.len)))
            .finish()
    }
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts triples into `graph`, returning how many were not already present.
    pub fn insert_triples(&mut self, graph: &Iri, triples: impl IntoIterator<Item = Triple>) -> usize {
        let index = self.graphs.entry(graph.clone()).or_default();
        triples.into_iter().filter(|t| index.insert(t.clone())).count()
    }

    pub fn insert(&mut self, graph: &Iri, triple: Triple) -> bool {
        self.graphs.entry(graph.clone()).or_default().insert(triple)
    }

    pub fn remove(&mut self, graph: &Iri, triple: &Triple) -> bool {
        self.graphs.get_mut(graph).is_some_and(|g| g.remove(triple))
    }

    /// Removes every triple in `graph` matching the pattern; returns the count.
    pub fn remove_matching(&mut self, graph: &Iri, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> usize {
        let doomed = self.query_pattern(Some(graph), s, p, o);
        doomed.iter().filter(|t| self.remove(graph, t)).count()
    }

    /// Triples matching all bound positions, in serialization order.
    ///
    /// Without a graph the union of all graphs is returned, with triples
    /// present in several graphs reported once.
    pub fn query_pattern(&self, graph: Option<&Iri>, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> Vec<Triple> {
        let mut out = Vec::new();
        match graph {
            Some(g) => {
                if let Some(index) = self.graphs.get(g) {
                    index.matching(s, p, o, &mut out);
                }
            }
            None => {
                for index in self.graphs.values() {
                    index.matching(s, p, o, &mut out);
                }
                if self.graphs.len() > 1 {
                    out.sort_unstable();
                    out.dedup();
                }
            }
        }
        out
    }

    pub fn contains(&self, graph: Option<&Iri>, triple: &Triple) -> bool {
        let in_graph = |g: &GraphIndex| {
            g.spo
                .get(&triple.subject)
                .and_then(|m| m.get(&triple.predicate))
                .is_some_and(|objs| objs.contains(&triple.object))
        };
        match graph {
            Some(name) => self.graphs.get(name).is_some_and(in_graph),
            None => self.graphs.values().any(in_graph),
        }
    }

    /// Objects of `(s, p, ?)` across the given graph (or all graphs), sorted and deduplicated.
    pub fn objects(&self, graph: Option<&Iri>, s: &Iri, p: &Iri) -> Vec<Term> {
        let mut out: Vec<Term> = self
            .selected(graph)
            .filter_map(|g| g.spo.get(s).and_then(|m| m.get(p)))
            .flat_map(|set| set.iter().cloned())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn object_iris(&self, graph: Option<&Iri>, s: &Iri, p: &Iri) -> Vec<Iri> {
        self.objects(graph, s, p)
            .into_iter()
            .filter_map(|t| match t {
                Term::Iri(iri) => Some(iri),
                Term::Literal(_) => None,
            })
            .collect()
    }

    pub fn object_literals(&self, graph: Option<&Iri>, s: &Iri, p: &Iri) -> Vec<Literal> {
        self.objects(graph, s, p)
            .into_iter()
            .filter_map(|t| match t {
                Term::Literal(l) => Some(l),
                Term::Iri(_) => None,
            })
            .collect()
    }

    /// Subjects of `(?, p, o)`, sorted and deduplicated.
    pub fn subjects(&self, graph: Option<&Iri>, p: &Iri, o: &Term) -> Vec<Iri> {
        let mut out: Vec<Iri> = self
            .selected(graph)
            .filter_map(|g| g.pos.get(p).and_then(|m| m.get(o)))
            .flat_map(|set| set.iter().cloned())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn graph_names(&self) -> Vec<Iri> {
        self.graphs
            .iter()
            .filter(|(_, g)| g.len > 0)
            .map(|(name, _)| name.clone())
            .collect()
    }

    pub fn graph_len(&self, graph: &Iri) -> usize {
        self.graphs.get(graph).map_or(0, |g| g.len)
    }

    pub fn len(&self) -> usize {
        self.graphs.values().map(|g| g.len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every (graph, triple) pair, sorted by graph then triple.
    pub fn quads(&self) -> impl Iterator<Item = (&Iri, Triple)> + '_ {
        self.graphs.iter().flat_map(|(name, g)| {
            let mut triples = Vec::with_capacity(g.len);
            g.matching(None, None, None, &mut triples);
            triples.into_iter().map(move |t| (name, t))
        })
    }

    fn selected<'a>(&'a self, graph: Option<&'a Iri>) -> Box<dyn Iterator<Item = &'a GraphIndex> + 'a> {
        match graph {
            Some(g) => Box::new(self.graphs.get(g).into_iter()),
            None => Box::new(self.graphs.values()),
        }
    }
}
