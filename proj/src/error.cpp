#include "hism/error.hpp"

namespace hism {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::layout_overflow: return "LayoutOverflow";
    case ErrorCode::missing_telemetry: return "MissingTelemetry";
    case ErrorCode::empty_rect: return "EmptyRect";
    case ErrorCode::infeasible_schedule: return "InfeasibleSchedule";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::non_monotonic_time: return "NonMonotonicTime";
    case ErrorCode::insufficient_data: return "InsufficientData";
    case ErrorCode::grid_mismatch: return "GridMismatch";
    case ErrorCode::event_out_of_range: return "EventOutOfRange";
    case ErrorCode::unknown_element: return "UnknownElement";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::non_finite_activation: return "NonFiniteActivation";
    case ErrorCode::empty_sequence: return "EmptySequence";
    case ErrorCode::bad_magic: return "BadMagic";
    case ErrorCode::version_mismatch: return "VersionMismatch";
    case ErrorCode::class_imbalance: return "ClassImbalanceError";
    case ErrorCode::empty_dataset: return "EmptyDataset";
    case ErrorCode::missing_frames: return "MissingFrames";
  }
  return "Unknown";
}

}  // namespace hism
