//! Resource budgets for operations whose outputs can explode.
//!
//! Blowups here are doubly exponential (powersets of powersets, Ackermann
//! codes as towers), so every enumerating operation takes an explicit budget
//! and refuses oversized work instead of attempting it.

/// Caps for enumeration and codec work. `Default` gives the documented
/// session defaults; the CLI scales the enumeration caps via `--budget`.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Most children any constructed enumeration may have (2^16).
    pub max_children: usize,
    /// Powerset refuses inputs with more children than this.
    pub max_powerset_input: usize,
    /// Ackermann codes and decode magnitudes may use at most this many bits.
    pub max_code_bits: u64,
    /// Choice-product cardinality cap for dependent products.
    pub max_product: u64,
    /// Candidate cap for natural-transformation enumeration.
    pub max_enum: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_children: 1 << 16,
            max_powerset_input: 16,
            max_code_bits: 1 << 16,
            max_product: 1 << 16,
            max_enum: 1 << 20,
        }
    }
}

impl Budget {
    /// Budget with the enumeration caps set to `n` (CLI `--budget n`).
    pub fn with_cap(n: u64) -> Self {
        Budget {
            max_product: n,
            max_enum: n,
            ..Budget::default()
        }
    }
}
