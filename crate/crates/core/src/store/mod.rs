//! T-Box schema, A-Box triples, Turtle I/O and basic-graph-pattern queries.

mod graph;
mod lex;
mod query;
mod schema;
mod turtle;

pub use graph::{
    mint_instance_iri, AssertOutcome, Datatype, OntologyGraph, RdfTerm, RdfTriple, Rejected,
    StoreError, DEFAULT_BASE, RDF_NS, RDF_TYPE, XSD_NS,
};
pub use query::{execute_query, parse_query, PatternTerm, Query, QueryError, ResultTable, TriplePattern};
pub use schema::{load_schema, AttributeDef, OntologySchema, SchemaError, ValueType};
pub use turtle::{parse_turtle, serialize_turtle, write_turtle, TurtleDoc, TurtleError};

use std::collections::BTreeMap;

/// Prefix table used for queries and result rendering when none is given.
pub fn default_prefixes(base: &str) -> BTreeMap<String, String> {
    BTreeMap::from([
        (String::new(), base.to_string()),
        ("rdf".to_string(), RDF_NS.to_string()),
        ("xsd".to_string(), XSD_NS.to_string()),
    ])
}
