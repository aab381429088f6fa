//! Factor and sector labels. Factor order is (T, K, L), sector order is (1, 2).

use std::fmt;

use serde::{Deserialize, Serialize};

/// Land.
pub const T: usize = 0;
/// Capital.
pub const K: usize = 1;
/// Labor.
pub const L: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    T,
    K,
    L,
}

impl Factor {
    pub const ALL: [Factor; 3] = [Factor::T, Factor::K, Factor::L];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Factor> {
        Factor::ALL.get(i).copied()
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Factor::T => "T",
            Factor::K => "K",
            Factor::L => "L",
        };
        f.write_str(s)
    }
}

pub const SECTOR_LABELS: [&str; 2] = ["1", "2"];
