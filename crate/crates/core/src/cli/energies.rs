//! Zero-field energy files: UTF-8, `#` comments, one `label,energy` per line.

use std::path::Path;

use crate::error::{Error, Result};
use crate::zeeman::DegeneracySpec;

/// Per-state energies for `labels`; unlisted states get 0.
pub fn parse_state_energies(text: &str, labels: &[String]) -> Result<Vec<f64>> {
    let mut energies = vec![0.0; labels.len()];
    let mut seen: Vec<Option<usize>> = vec![None; labels.len()];
    for (lineno, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
        if line.is_empty() {
            continue;
        }
        // labels contain commas, the energy never does
        let (label, value) = line
            .rsplit_once(',')
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected 'label,energy'")))?;
        let label = label.trim();
        let k = labels.iter().position(|l| l == label).ok_or_else(|| {
            Error::Parse(format!(
                "line {lineno}: unknown state label '{label}' (known: {})",
                labels.join(" ")
            ))
        })?;
        let energy: f64 = value
            .trim()
            .parse()
            .ok()
            .filter(|e: &f64| e.is_finite())
            .ok_or_else(|| Error::Parse(format!("line {lineno}: energy '{}' is not a number", value.trim())))?;
        if let Some(first) = seen[k] {
            return Err(Error::Parse(format!(
                "line {lineno}: duplicate label '{label}' (first given on line {first})"
            )));
        }
        seen[k] = Some(lineno);
        energies[k] = energy;
    }
    Ok(energies)
}

/// Degeneracy groups from an energies file: states with equal energy share
/// a group and unlisted states sit together at zero.
pub fn parse_energies_str(text: &str, labels: &[String]) -> Result<DegeneracySpec> {
    DegeneracySpec::from_state_energies(&parse_state_energies(text, labels)?)
}

pub fn parse_energies(path: &Path, labels: &[String]) -> Result<DegeneracySpec> {
    parse_energies_str(&read_energies(path)?, labels)
}

pub(crate) fn read_energies(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Argument(format!("cannot read energies file '{}': {e}", path.display())))
}
