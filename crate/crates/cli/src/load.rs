use std::path::Path;

use dps_core::montecarlo::ExperimentConfig;

use crate::Failure;

pub fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| {
        let at = e
            .span()
            .map(|s| format!(":{}", 1 + text[..s.start.min(text.len())].matches('\n').count()))
            .unwrap_or_default();
        Failure::Config(format!("{}{at}: {}", path.display(), e.message()))
    })
}

/// 1-based line of `key` inside `[section]`, or of the header itself when the
/// key is absent. Top-level keys use the pseudo-section `preset`.
pub fn locate(text: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        let in_section = current == section || (section == "preset" && current.is_empty());
        if !in_section {
            continue;
        }
        let wanted = key.unwrap_or(if section == "preset" { "preset" } else { "" });
        if wanted.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(wanted) {
            if rest.trim_start().starts_with('=') {
                return Some(i + 1);
            }
        }
    }
    header
}
