pub mod annotation;
pub mod assignment;
pub mod collection;
pub mod domain;
pub mod error;
pub mod feedback;
pub mod ns;
pub mod quality;
pub mod search;
pub mod store;
pub mod users;
pub mod vocabulary;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use store::{Dataset, Iri, Literal, Store, Term, Triple};
