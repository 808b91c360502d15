use serde::Serialize;

/// Outcome of a single named check: the worst residual observed and the
/// threshold it was held to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationRecord {
    /// Passes iff `max_residual <= tolerance`. A NaN residual never passes.
    pub fn new(name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn failed(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            max_residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
            note: Some(note.into()),
        }
    }
}

/// Maximum that propagates NaN, unlike `f64::max`.
pub fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

pub fn worst_of<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0, worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!VerificationRecord::new("x", f64::NAN, 1.0).pass);
        assert!(worst_of([1.0, f64::NAN, 2.0]).is_nan());
        assert_eq!(worst_of([1.0, 3.0, 2.0]), 3.0);
    }

    #[test]
    fn exact_zero_tolerance() {
        assert!(VerificationRecord::new("x", 0.0, 0.0).pass);
        assert!(!VerificationRecord::new("x", 1e-300, 0.0).pass);
    }
}
