#include "masspart/error.hpp"

namespace masspart {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CarrierMismatch: return "CarrierMismatch";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::OrthogonalLine: return "OrthogonalLine";
    case ErrorCode::VerticalNormalDegenerate: return "VerticalNormalDegenerate";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::MalformedSolution: return "MalformedSolution";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace masspart
