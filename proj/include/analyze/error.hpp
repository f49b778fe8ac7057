#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace analyze {

enum class ErrorCode {
  UnknownLevel,
  UnknownMember,
  UnknownDimension,
  UnknownMeasure,
  LevelOrderViolation,
  NoParentLevel,
  InvalidHierarchy,
  ParseError,
  UnknownMemberLabel,
  SchemaMismatch,
  InvalidQuery,
  UsabilityViolation,
  NoFilterAtom,
  AlreadyMostDetailed,
  DegradedStructure,
  ArityMismatch,
  SyntaxError,
  AmbiguousLevel,
  ConstraintViolation,
  DegenerateStats,
  InvalidSpec,
  Timeout,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownLevel: return "UnknownLevel";
    case ErrorCode::UnknownMember: return "UnknownMember";
    case ErrorCode::UnknownDimension: return "UnknownDimension";
    case ErrorCode::UnknownMeasure: return "UnknownMeasure";
    case ErrorCode::LevelOrderViolation: return "LevelOrderViolation";
    case ErrorCode::NoParentLevel: return "NoParentLevel";
    case ErrorCode::InvalidHierarchy: return "InvalidHierarchy";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownMemberLabel: return "UnknownMemberLabel";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::UsabilityViolation: return "UsabilityViolation";
    case ErrorCode::NoFilterAtom: return "NoFilterAtom";
    case ErrorCode::AlreadyMostDetailed: return "AlreadyMostDetailed";
    case ErrorCode::DegradedStructure: return "DegradedStructure";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::AmbiguousLevel: return "AmbiguousLevel";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::DegenerateStats: return "DegenerateStats";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every engine failure is an Error carrying a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures keep the byte offset and what the parser would have accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::size_t line, std::size_t column, std::string message,
              std::string expected)
      : Error(ErrorCode::SyntaxError, std::to_string(line) + ":" + std::to_string(column) + ": " +
                                          message + " (expected " + expected + ")"),
        offset_(offset),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

}  // namespace analyze
