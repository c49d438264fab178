use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ComplexMatrix;

/// Which construction produced a [`DecouplerSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DecouplerKind {
    /// Sequential decoupler, including sets extended by user inclusion.
    Sd,
    /// One full SVD of each complementary channel.
    Svd,
    /// Block rows of the channel pseudo-inverse.
    Pinv,
}

impl DecouplerKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sd => "sd",
            Self::Svd => "svd",
            Self::Pinv => "pinv",
        }
    }
}

impl core::fmt::Display for DecouplerKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for DecouplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sd" => Ok(Self::Sd),
            "svd" => Ok(Self::Svd),
            "pinv" => Ok(Self::Pinv),
            _ => Err(Error::InvalidInput(format!("unknown decoupler `{s}`"))),
        }
    }
}

/// Per-user decoupling matrices `W_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecouplerSet {
    kind: DecouplerKind,
    row_orthonormal: bool,
    w: Vec<ComplexMatrix>,
}

impl DecouplerSet {
    pub fn new(kind: DecouplerKind, w: Vec<ComplexMatrix>, row_orthonormal: bool) -> Self {
        Self {
            kind,
            row_orthonormal,
            w,
        }
    }

    pub fn kind(&self) -> DecouplerKind {
        self.kind
    }

    /// Whether every `W_i` has orthonormal rows, so that white noise stays
    /// white after decoupling.
    pub fn is_row_orthonormal(&self) -> bool {
        self.row_orthonormal
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn get(&self, i: usize) -> &ComplexMatrix {
        &self.w[i]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.w
    }

    pub fn into_matrices(self) -> Vec<ComplexMatrix> {
        self.w
    }

    /// Replaces `W_i`, clearing the orthonormality flag unless `w` keeps it.
    pub fn replace(&mut self, i: usize, w: ComplexMatrix) {
        if self.row_orthonormal && w.row_orthonormality_error() > 1e-9 {
            self.row_orthonormal = false;
        }
        self.w[i] = w;
    }

    pub(crate) fn matrices_mut(&mut self) -> &mut Vec<ComplexMatrix> {
        &mut self.w
    }
}
