#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace linlat {

enum class ErrorCode {
  DuplicateTask,
  EmptyActionSet,
  NoTasks,
  ForeignElement,
  UnknownName,
  NonUniqueNegation,
  NonUniqueExponential,
  NoConsistentStructure,
  InvalidDuality,
  NonFact,
  MissingNegation,
  Inconsistent,
  TooManySolutions,
  SearchTooLarge,
  NewTaskUnknown,
  UnknownVariant,
  StaleBatch,
  InvalidScenario,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateTask: return "DuplicateTask";
    case ErrorCode::EmptyActionSet: return "EmptyActionSet";
    case ErrorCode::NoTasks: return "NoTasks";
    case ErrorCode::ForeignElement: return "ForeignElement";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::NonUniqueNegation: return "NonUniqueNegation";
    case ErrorCode::NonUniqueExponential: return "NonUniqueExponential";
    case ErrorCode::NoConsistentStructure: return "NoConsistentStructure";
    case ErrorCode::InvalidDuality: return "InvalidDuality";
    case ErrorCode::NonFact: return "NonFact";
    case ErrorCode::MissingNegation: return "MissingNegation";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::TooManySolutions: return "TooManySolutions";
    case ErrorCode::SearchTooLarge: return "SearchTooLarge";
    case ErrorCode::NewTaskUnknown: return "NewTaskUnknown";
    case ErrorCode::UnknownVariant: return "UnknownVariant";
    case ErrorCode::StaleBatch: return "StaleBatch";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
  }
  return "Unknown";
}

/// A violation of a domain rule (bad lattice, inconsistent structure, ...).
/// The CLI maps these to exit status 1.
class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Malformed input documents and I/O failures (exit status 2).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string join_strings(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace linlat
