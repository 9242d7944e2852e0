//! Ontology-guided instance extraction from hotel descriptions.
//!
//! Text is split, tagged and parsed into shallow constituency trees, from
//! which subject/predicate/object triples are read. The passage theme and
//! its domain decide which class the instance belongs to; rule files pull
//! attribute values out of the text; the result is asserted into an RDF
//! graph that can be serialized as Turtle and queried with basic graph
//! patterns.

pub mod domain;
pub mod metrics;
pub mod patterns;
pub mod pipeline;
pub mod store;
pub mod textprep;
pub mod theme;
pub mod triplet;

/// How documents are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Across the rayon pool when the `parallel` feature is on.
    #[default]
    Parallel,
    Sequential,
}

/// Order-preserving map over `items`.
pub(crate) fn map_items<T, R, F>(items: &[T], mode: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}
