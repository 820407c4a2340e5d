use serde::{Deserialize, Serialize};

/// Scalar field of a kernel and of its probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMode {
    /// Real kernel, real random measure, real probe coefficients.
    Real,
    /// Complex kernel with a rotationally invariant complex random measure; complex probes.
    Complex,
    /// Real part of a complex rotationally invariant integral. Probes are real, the
    /// scale functional carries the constant `c0` of the complex case.
    RealPart,
}

impl FieldMode {
    /// Whether probe coefficients must be real.
    pub fn real_probes(self) -> bool {
        !matches!(self, FieldMode::Complex)
    }

    /// Whether kernel values may carry an imaginary part.
    pub fn complex_values(self) -> bool {
        !matches!(self, FieldMode::Real)
    }
}
