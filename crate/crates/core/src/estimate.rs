use serde::Serialize;

/// Which formula produced an [`AsymptoticEstimate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    HarmonicSumMain,
    DerivativeMain,
    PartitionCount,
    LengthCount,
}

/// A main-term value with the scale of its error term.
///
/// The magnitude is kept as a logarithm so that counts far beyond the
/// binary64 range stay usable; `value` is infinite in that case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    pub value: f64,
    /// `ln |value|`.
    pub log_value: f64,
    pub sign: f64,
    /// Size of the error term (absolute for derivative main terms,
    /// relative for counts).
    pub error_scale: f64,
    pub provenance: Provenance,
}

impl AsymptoticEstimate {
    pub fn from_value(value: f64, error_scale: f64, provenance: Provenance) -> Self {
        AsymptoticEstimate {
            value,
            log_value: value.abs().ln(),
            sign: if value < 0.0 { -1.0 } else { 1.0 },
            error_scale,
            provenance,
        }
    }

    pub fn from_log(log_value: f64, error_scale: f64, provenance: Provenance) -> Self {
        AsymptoticEstimate {
            value: log_value.exp(),
            log_value,
            sign: 1.0,
            error_scale,
            provenance,
        }
    }
}
