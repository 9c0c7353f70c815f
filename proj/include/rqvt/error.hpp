#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rqvt {

enum class ErrorCode {
  MissingHeaderField,
  DimsMismatch,
  UnsupportedElementType,
  IoFailure,
  NonPositiveTarget,
  GeometryMismatch,
  EmptyMask,
  NegativeMargin,
  EmptyLesion,
  NoFollowups,
  ZeroBaselineDiameter,
  EmptyRoi,
  NonPositiveBinWidth,
  DegenerateGeometry,
  UnknownKind,
  NoLungFound,
  EmptyLung,
  ZeroChord,
  SingleClassDataset,
  SingleClassLabels,
  WidthMismatch,
  FoldClassCollapse,
  CorruptModelFile,
  VersionMismatch,
  MissingTimepoint,
  EmptyMaskAfterResample,
  ManifestParse,
  ConfigError,
  TooSmall,
  SelfIntersection,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingHeaderField: return "MissingHeaderField";
    case ErrorCode::DimsMismatch: return "DimsMismatch";
    case ErrorCode::UnsupportedElementType: return "UnsupportedElementType";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::NonPositiveTarget: return "NonPositiveTarget";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::NegativeMargin: return "NegativeMargin";
    case ErrorCode::EmptyLesion: return "EmptyLesion";
    case ErrorCode::NoFollowups: return "NoFollowups";
    case ErrorCode::ZeroBaselineDiameter: return "ZeroBaselineDiameter";
    case ErrorCode::EmptyRoi: return "EmptyRoi";
    case ErrorCode::NonPositiveBinWidth: return "NonPositiveBinWidth";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::NoLungFound: return "NoLungFound";
    case ErrorCode::EmptyLung: return "EmptyLung";
    case ErrorCode::ZeroChord: return "ZeroChord";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::SingleClassLabels: return "SingleClassLabels";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::FoldClassCollapse: return "FoldClassCollapse";
    case ErrorCode::CorruptModelFile: return "CorruptModelFile";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::MissingTimepoint: return "MissingTimepoint";
    case ErrorCode::EmptyMaskAfterResample: return "EmptyMaskAfterResample";
    case ErrorCode::ManifestParse: return "ManifestParse";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::SelfIntersection: return "SelfIntersection";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this one exception type;
/// callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rqvt
