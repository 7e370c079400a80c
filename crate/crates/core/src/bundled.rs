//! Scenario files shipped with the crate.

use crate::error::Result;
use crate::scenario::{parse_scenario, Scenario};

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../scenarios/", $name, ".json")))),*]
    };
}

/// `(name, JSON text)` of every bundled scenario.
pub const BUNDLED: &[(&str, &str)] = bundle![
    "scalar-smoke",
    "clark-degree8",
    "aronszajn-krein",
    "clark-correspondence",
    "disintegration",
    "model-space",
    "lemma7",
    "rank-two",
    "positivity",
    "simon-wolff",
    "rank-n",
];

pub fn bundled_text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn bundled(name: &str) -> Option<Result<Scenario>> {
    bundled_text(name).map(parse_scenario)
}
