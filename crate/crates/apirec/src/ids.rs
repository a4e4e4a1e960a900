//! Interned string identifiers for APIs, apps, and functional keywords.

use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdError {
    #[error("identifier is empty after trimming")]
    Empty,
}

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            /// Trims surrounding whitespace; rejects identifiers that end up empty.
            pub fn new(s: &str) -> Result<Self, IdError> {
                let trimmed = s.trim();
                if trimmed.is_empty() {
                    Err(IdError::Empty)
                } else {
                    Ok(Self(Arc::from(trimmed)))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", &*self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Identifier of a web API, unique within the catalog.
    ApiId
);
string_id!(
    /// Identifier of an app built from one or more APIs.
    AppId
);
string_id!(
    /// A functional tag. Compared by exact string equality after trimming;
    /// no stemming or case folding.
    Keyword
);
