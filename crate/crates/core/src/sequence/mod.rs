//! Excitation and detection cycle: field-ionization ramp, MCP arrival
//! trace and MCP calibration.

mod calibration;
mod detection;
mod ramp;

pub use calibration::{mcp_calibration, McpCalibration};
pub use detection::{
    detection_trace, Background, DetectionEvent, DetectionTimeline, Detector, Feature, Populations,
    RydbergPopulation, Species, Undetected,
};
pub use ramp::{field_ramp, ionization_threshold, FieldRamp, RiseConvention, BUTTERWORTH_DAMPING};
