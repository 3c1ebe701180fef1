//! Provenance stamped on every output file.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_digest: String, seed: u64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: config_digest,
            seed,
        }
    }

    /// Comment line for CSV outputs.
    pub fn csv_comment(&self) -> String {
        format!(
            "# {} {} config_sha256={} seed={}\n",
            self.tool, self.version, self.config_sha256, self.seed
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
