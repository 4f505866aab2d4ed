//! Instance files (JSON or TOML, chosen by extension) and fingerprints.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::Instance;

fn format_error(path: &Path, message: impl ToString) -> Error {
    Error::Format { path: path.display().to_string(), message: message.to_string() }
}

fn is_toml(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"))
}

/// Reads an instance and checks it as [`Instance::new`] would.
pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    let raw: Instance = if is_toml(path) {
        toml::from_str(&text).map_err(|e| format_error(path, e))?
    } else {
        serde_json::from_str(&text).map_err(|e| format_error(path, e))?
    };
    let checked =
        Instance::new(&raw.baselines(), &raw.delays(), raw.discount().clone()).map_err(|e| format_error(path, e))?;
    Ok(match raw.label() {
        Some(l) => checked.with_label(l),
        None => checked,
    })
}

pub fn save_instance(instance: &Instance, path: &Path) -> Result<()> {
    let text = if is_toml(path) {
        toml::to_string_pretty(instance).map_err(|e| format_error(path, e))?
    } else {
        serde_json::to_string_pretty(instance).map_err(|e| format_error(path, e))?
    };
    fs::write(path, text)?;
    Ok(())
}

/// SHA-256 of the instance's compact JSON form, as lowercase hex.
pub fn instance_hash(instance: &Instance) -> String {
    let json = serde_json::to_vec(instance).expect("instances serialize");
    let digest = Sha256::digest(&json);
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
