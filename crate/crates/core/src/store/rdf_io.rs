//! Conversion between text serializations and store terms.
//!
//! Parsing is delegated to `oxttl`; serialization is written here so the
//! output stays canonical (one statement per line, sorted by the caller).

use std::fmt::Write as _;

use oxttl::{NQuadsParser, NTriplesParser, TurtleParser};

use super::term::{Iri, Literal, Term, Triple};
use crate::error::{Error, Result};
use crate::ns::{rdf, xsd};

fn convert_named(node: oxrdf::NamedNode) -> Iri {
    // oxttl has already validated the IRI.
    Iri::known(node.as_str())
}

fn convert_subject(subject: oxrdf::NamedOrBlankNode, line: &str) -> Result<Iri> {
    match subject {
        oxrdf::NamedOrBlankNode::NamedNode(n) => Ok(convert_named(n)),
        oxrdf::NamedOrBlankNode::BlankNode(b) => Err(Error::load(format!(
            "{line}: blank node _:{} not supported, use IRIs",
            b.as_str()
        ))),
    }
}

fn convert_literal(literal: oxrdf::Literal) -> Result<Literal> {
    let (value, datatype, language) = literal.destruct();
    match (language, datatype) {
        (Some(language), _) => Literal::lang(value, &language),
        (None, Some(dt)) if dt.as_str() != xsd::STRING && dt.as_str() != rdf::LANG_STRING => {
            Literal::typed(value, convert_named(dt))
        }
        (None, _) => Literal::simple(value),
    }
}

fn convert_object(object: oxrdf::Term, line: &str) -> Result<Term> {
    match object {
        oxrdf::Term::NamedNode(n) => Ok(Term::Iri(convert_named(n))),
        oxrdf::Term::Literal(l) => convert_literal(l)
            .map(Term::Literal)
            .map_err(|e| Error::load(format!("{line}: {e}"))),
        oxrdf::Term::BlankNode(b) => Err(Error::load(format!(
            "{line}: blank node _:{} not supported, use IRIs",
            b.as_str()
        ))),
        #[allow(unreachable_patterns)]
        _ => Err(Error::load(format!("{line}: unsupported term"))),
    }
}

fn convert_triple(t: oxrdf::Triple, line: &str) -> Result<Triple> {
    Ok(Triple {
        subject: convert_subject(t.subject, line)?,
        predicate: convert_named(t.predicate),
        object: convert_object(t.object, line)?,
    })
}

/// Parses Turtle (which includes N-Triples) text.
pub fn parse_turtle(input: &[u8]) -> Result<Vec<Triple>> {
    TurtleParser::new()
        .for_slice(input)
        .map(|r| {
            let t = r.map_err(|e| Error::load(e.to_string()))?;
            convert_triple(t, "turtle")
        })
        .collect()
}

pub fn parse_ntriples(input: &[u8]) -> Result<Vec<Triple>> {
    NTriplesParser::new()
        .for_slice(input)
        .map(|r| {
            let t = r.map_err(|e| Error::load(e.to_string()))?;
            convert_triple(t, "n-triples")
        })
        .collect()
}

/// Parses N-Quads; every quad must be in a named graph.
pub fn parse_nquads(input: &[u8]) -> Result<Vec<(Iri, Triple)>> {
    NQuadsParser::new()
        .for_slice(input)
        .map(|r| {
            let q = r.map_err(|e| Error::load(e.to_string()))?;
            let graph = match q.graph_name {
                oxrdf::GraphName::NamedNode(n) => convert_named(n),
                _ => return Err(Error::load("quad outside a named graph")),
            };
            let triple = convert_triple(
                oxrdf::Triple::new(q.subject, q.predicate, q.object),
                "n-quads",
            )?;
            Ok((graph, triple))
        })
        .collect()
}

pub fn write_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = String::new();
    for t in triples {
        let _ = writeln!(out, "{t}");
    }
    out
}

pub fn write_nquads<'a>(quads: impl IntoIterator<Item = (&'a Iri, &'a Triple)>) -> String {
    let mut out = String::new();
    for (g, t) in quads {
        let _ = writeln!(out, "{} {} {} {} .", t.subject, t.predicate, t.object, g);
    }
    out
}
