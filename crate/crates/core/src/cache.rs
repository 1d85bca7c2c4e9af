//! Versioned on-disk cache of a built gazetteer and its compiled model.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gazetteer::Gazetteer;
use crate::langmodel::CompiledModel;

pub const MAGIC: &[u8; 8] = b"TOPOCACH";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cannot access model cache {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} is not a model cache")]
    BadMagic(PathBuf),
    #[error("{path} has cache format {found}, expected {FORMAT_VERSION}; rebuild it")]
    Version { path: PathBuf, found: u32 },
    #[error("corrupt model cache {path}: {message}")]
    Corrupt { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub gazetteer: Gazetteer,
    pub model: CompiledModel,
}

impl ModelBundle {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        bincode::serialize_into(&mut out, self).expect("in-memory serialization cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self, CacheError> {
        let header = MAGIC.len() + 4;
        if bytes.len() < header || &bytes[..MAGIC.len()] != MAGIC {
            return Err(CacheError::BadMagic(path.to_path_buf()));
        }
        let found = u32::from_le_bytes(bytes[MAGIC.len()..header].try_into().expect("4 bytes"));
        if found != FORMAT_VERSION {
            return Err(CacheError::Version {
                path: path.to_path_buf(),
                found,
            });
        }
        bincode::deserialize(&bytes[header..]).map_err(|e| CacheError::Corrupt {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Writes to a sibling temp file and renames it into place.
    pub fn save(&self, path: &Path) -> Result<(), CacheError> {
        let io = |source| CacheError::Io {
            path: path.to_path_buf(),
            source,
        };
        let tmp = path.with_extension("tmp");
        let mut file = std::fs::File::create(&tmp).map_err(io)?;
        file.write_all(&self.to_bytes()).map_err(io)?;
        file.sync_all().map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, CacheError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|source| CacheError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        Self::from_bytes(&bytes, path)
    }
}
