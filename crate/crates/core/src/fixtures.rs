//! Worked-example tensors shipped with the crate.
//!
//! Exact inputs are stored as given; printed results are stored at the four
//! decimals they were published with. `manifest.json` records which is which.

use serde::Deserialize;

use crate::io::parse_tensor;
use crate::tensor::Tensor;

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        const SOURCES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../fixtures/", $name, ".json")))),*
        ];
    };
}

fixtures!(
    "ex31_A",
    "ex31_E1",
    "ex31_E2",
    "ex31_A1",
    "ex31_D1_E1",
    "ex31_D1_E2",
    "ex45_A",
    "ex45_B",
    "ex45_E",
    "ex45_D2",
    "ex45_A2",
    "ex46_A",
    "ex46_C",
    "ex46_E",
    "ex46_D2",
    "ex46_A2",
    "ex47_A",
    "ex47_B",
    "ex47_C",
    "ex47_E",
    "ex47_D2",
    "ex47_A2",
);

const MANIFEST: &str = include_str!("../fixtures/manifest.json");

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub file: String,
    /// Entries are published to four decimals rather than exact.
    pub rounded: bool,
    pub note: String,
}

#[derive(Debug, Deserialize)]
struct Manifest {
    fixtures: Vec<ManifestEntry>,
}

/// Names of all bundled fixtures.
pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

/// Loads a bundled fixture by name.
pub fn fixture(name: &str) -> Option<Tensor> {
    SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| parse_tensor(src).expect("bundled fixtures are valid"))
}

pub fn manifest() -> Vec<ManifestEntry> {
    serde_json::from_str::<Manifest>(MANIFEST)
        .expect("bundled manifest is valid")
        .fixtures
}
