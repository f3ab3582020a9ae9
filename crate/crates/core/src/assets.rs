//! Locating the bundled FCIDUMP assets and their metadata sidecars.
//!
//! Resolution order: the `RBMDUCC_ASSET_ROOT` environment variable, then an
//! `assets/` directory under the current working directory, then the copy
//! shipped alongside the workspace (for tests run from a crate directory).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference energies and geometry notes shipped next to each FCIDUMP.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssetMetadata {
    pub name: String,
    pub basis: String,
    #[serde(default)]
    pub n_frozen_core: usize,
    pub n_active_spatial: usize,
    pub n_active_electrons: usize,
    pub ms2: i32,
    pub reference_energies_hartree: ReferenceEnergies,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceEnergies {
    pub hf: f64,
    pub mp2_correlation: f64,
    pub fci: f64,
}

/// Directory holding the `.fcidump` / `.json` pairs.
pub fn asset_root() -> Result<PathBuf> {
    if let Ok(root) = std::env::var("RBMDUCC_ASSET_ROOT") {
        let p = PathBuf::from(root);
        if p.is_dir() {
            return Ok(p);
        }
        return Err(Error::Resource(format!(
            "RBMDUCC_ASSET_ROOT={} is not a directory",
            p.display()
        )));
    }
    let cwd = PathBuf::from("assets");
    if cwd.is_dir() {
        return Ok(cwd);
    }
    let workspace = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets");
    if workspace.is_dir() {
        return Ok(workspace);
    }
    Err(Error::Resource(
        "no asset directory found; set RBMDUCC_ASSET_ROOT".into(),
    ))
}

/// Path to the FCIDUMP for a system id such as `bh_2.25`.
pub fn asset_path(id: &str) -> Result<PathBuf> {
    let p = asset_root()?.join(format!("{id}.fcidump"));
    if p.is_file() {
        Ok(p)
    } else {
        Err(Error::Resource(format!("no such asset: {id}")))
    }
}

/// Metadata sidecar for a system id.
pub fn asset_metadata(id: &str) -> Result<AssetMetadata> {
    let p = asset_root()?.join(format!("{id}.json"));
    if !p.is_file() {
        return Err(Error::Resource(format!("no metadata for asset: {id}")));
    }
    let text = std::fs::read_to_string(p)?;
    Ok(serde_json::from_str(&text)?)
}

/// All system ids with both an FCIDUMP and a metadata sidecar, sorted.
pub fn list_assets() -> Result<Vec<String>> {
    let root = asset_root()?;
    let mut ids = Vec::new();
    for entry in std::fs::read_dir(&root)? {
        let entry = entry?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("fcidump") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                if root.join(format!("{stem}.json")).is_file() {
                    ids.push(stem.to_string());
                }
            }
        }
    }
    ids.sort();
    Ok(ids)
}
