//! Shared fixtures for the criterion benchmarks.

use padic_dyn_core::{Analyzer, CubicMap, Padic, Prime};

pub fn reference_map() -> CubicMap {
    CubicMap::from_rational(Prime::new(5).unwrap(), 1, 5, 32).unwrap()
}

pub fn reference_analyzer() -> Analyzer {
    Analyzer::new(reference_map()).unwrap()
}

/// Deterministic unit-sphere values for arithmetic benchmarks.
pub fn operand_pairs(count: usize) -> Vec<(Padic, Padic)> {
    let p = Prime::new(5).unwrap();
    (0..count)
        .map(|i| {
            let x = Padic::from_rational(7 * i as i64 + 3, 11, p, 32).unwrap();
            let y = Padic::from_rational(13 * i as i64 + 1, 9, p, 32).unwrap();
            (x, y)
        })
        .collect()
}
