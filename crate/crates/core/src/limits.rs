//! Soft size bounds, overridable through `NLOGIC_MAX_CARRIER`.

use std::env;

const DEFAULT_ALGEBRA: usize = 12;
const DEFAULT_STABLE_CARRIER: usize = 14;

fn override_value() -> Option<usize> {
    env::var("NLOGIC_MAX_CARRIER").ok()?.trim().parse().ok()
}

/// Largest algebra carrier accepted by the loader.
pub fn max_algebra() -> usize {
    override_value().unwrap_or(DEFAULT_ALGEBRA)
}

/// Largest carrier on which stable sets are enumerated.
pub fn max_stable_carrier() -> usize {
    override_value().unwrap_or(DEFAULT_STABLE_CARRIER)
}
