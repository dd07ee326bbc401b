//! Identity and pair types shared by every channel.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pseudonymous participant identifier, stable across channels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct UserId(String);

impl UserId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::invalid("user id must be non-empty"));
        }
        Ok(UserId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for UserId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        UserId::new(value)
    }
}

impl From<UserId> for String {
    fn from(value: UserId) -> Self {
        value.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Integer seconds since the Unix epoch (UTC).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(try_from = "i64", into = "i64")]
pub struct Timestamp(i64);

impl Timestamp {
    pub fn new(seconds: i64) -> Result<Self> {
        if seconds < 0 {
            return Err(Error::invalid(format!("timestamp {seconds} is negative")));
        }
        Ok(Timestamp(seconds))
    }

    pub fn seconds(self) -> i64 {
        self.0
    }
}

impl TryFrom<i64> for Timestamp {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        Timestamp::new(value)
    }
}

impl From<Timestamp> for i64 {
    fn from(value: Timestamp) -> Self {
        value.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Unordered pair of distinct participants, stored with the
/// lexicographically smaller endpoint first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    a: UserId,
    b: UserId,
}

impl Edge {
    /// Returns `None` for self-loops.
    pub fn new(x: UserId, y: UserId) -> Option<Self> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Some(Edge { a: x, b: y }),
            std::cmp::Ordering::Greater => Some(Edge { a: y, b: x }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn a(&self) -> &UserId {
        &self.a
    }

    pub fn b(&self) -> &UserId {
        &self.b
    }

    pub fn endpoints(&self) -> (&UserId, &UserId) {
        (&self.a, &self.b)
    }

    pub fn contains(&self, user: &UserId) -> bool {
        &self.a == user || &self.b == user
    }

    pub fn is_canonical(&self) -> bool {
        self.a < self.b
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}--{}", self.a, self.b)
    }
}
