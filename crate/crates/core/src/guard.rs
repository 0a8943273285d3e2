//! Size guards.
//!
//! Everything in this crate is exhaustive, so inputs must stay desk-sized.
//! The guard bounds the morphism count of a site and the total element count
//! any single construction or enumeration may produce. `XI_LAB_GUARD`
//! overrides the element bound globally (the CLI reads it; library callers
//! pass guards explicitly).

use crate::error::{Error, Result};

pub const DEFAULT_MAX_MORPHISMS: usize = 64;
pub const DEFAULT_MAX_ELEMENTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuard {
    pub max_morphisms: usize,
    pub max_total_elements: usize,
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard {
            max_morphisms: DEFAULT_MAX_MORPHISMS,
            max_total_elements: DEFAULT_MAX_ELEMENTS,
        }
    }
}

impl SizeGuard {
    /// Default guard with the element bound overridden by `XI_LAB_GUARD`
    /// when that variable holds a positive integer.
    pub fn from_env() -> Self {
        let mut guard = SizeGuard::default();
        if let Ok(raw) = std::env::var("XI_LAB_GUARD") {
            if let Ok(n) = raw.trim().parse::<usize>() {
                if n > 0 {
                    guard.max_total_elements = n;
                }
            }
        }
        guard
    }

    pub fn check_morphisms(&self, count: usize) -> Result<()> {
        if count > self.max_morphisms {
            return Err(Error::SizeGuardExceeded {
                detail: format!(
                    "{count} morphisms exceeds the limit of {}",
                    self.max_morphisms
                ),
            });
        }
        Ok(())
    }

    pub fn check_elements(&self, count: usize, what: &str) -> Result<()> {
        if count > self.max_total_elements {
            return Err(Error::SizeGuardExceeded {
                detail: format!(
                    "{what} needs {count} elements, over the limit of {}",
                    self.max_total_elements
                ),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let g = SizeGuard::default();
        assert_eq!(g.max_morphisms, 64);
        assert_eq!(g.max_total_elements, 10_000);
    }

    #[test]
    fn morphism_limit_enforced() {
        let g = SizeGuard::default();
        assert!(g.check_morphisms(64).is_ok());
        assert!(matches!(
            g.check_morphisms(65),
            Err(Error::SizeGuardExceeded { .. })
        ));
    }

    #[test]
    fn element_limit_enforced() {
        let g = SizeGuard {
            max_morphisms: 64,
            max_total_elements: 10,
        };
        assert!(g.check_elements(10, "product").is_ok());
        assert!(matches!(
            g.check_elements(11, "product"),
            Err(Error::SizeGuardExceeded { .. })
        ));
    }
}
