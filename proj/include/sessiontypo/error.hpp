#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sessiontypo {

/// Machine-readable failure categories shared by every module and the CLI.
enum class ErrorCode {
  IoError,
  MalformedScheme,
  MalformedSession,
  ColumnMismatch,
  NonBinaryMark,
  GapInIndices,
  MalformedAnnotation,
  EmptyIntersection,
  NoItems,
  EmptyLexicons,
  EmptyMatrix,
  NoQueries,
  NoEvents,
  RowCountMismatch,
  IdMismatch,
  MissingAnnotation,
  ParseError,
  NotEnoughData,
  ZeroVariance,
  NonFiniteInput,
  InvalidK,
  InvalidArgument,
  DegenerateCluster,
  EmptyCluster,
  LengthMismatch,
  InvalidSpec,
  MalformedReport,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MalformedScheme: return "MalformedScheme";
    case ErrorCode::MalformedSession: return "MalformedSession";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::NonBinaryMark: return "NonBinaryMark";
    case ErrorCode::GapInIndices: return "GapInIndices";
    case ErrorCode::MalformedAnnotation: return "MalformedAnnotation";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::NoItems: return "NoItems";
    case ErrorCode::EmptyLexicons: return "EmptyLexicons";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::NoQueries: return "NoQueries";
    case ErrorCode::NoEvents: return "NoEvents";
    case ErrorCode::RowCountMismatch: return "RowCountMismatch";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::MissingAnnotation: return "MissingAnnotation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotEnoughData: return "NotEnoughData";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateCluster: return "DegenerateCluster";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::MalformedReport: return "MalformedReport";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sessiontypo
