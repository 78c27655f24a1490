#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace semdrought {

/// Failure categories surfaced across the middleware. The names returned by
/// errc_name() are part of the external contract (HTTP bodies, replay
/// summaries), so existing spellings must not change.
enum class Errc {
  // core-model
  InvalidIri,
  BadLiteral,
  MissingField,
  Ambiguous,
  DuplicateCategory,
  // ingest
  ColumnCount,
  EmptyField,
  Malformed,
  MissingKey,
  WrongType,
  MissingElement,
  NonFinite,
  UnknownTerm,
  UnknownUnit,
  UnitMismatch,
  BadTimestamp,
  BadNumber,
  OutOfRange,
  MissingLocation,
  UnknownSensor,
  InvalidAlignment,
  // semantic-store
  ParseError,
  InvalidRule,
  // cep-engine
  SyntaxError,
  SemanticError,
  OutOfOrder,
  EmptyWindow,
  Degenerate,
  // ik-knowledge
  DuplicateId,
  InvalidWeight,
  InvalidIndicator,
  UnknownIndicator,
  OutOfSeason,
  BadConfidence,
  // forecast
  BadWeights,
  InsufficientBaseline,
  NoData,
  // service
  NotFound,
  InvalidConfig,
  UnknownRegion,
  DuplicateObservation,
  // shared
  PreconditionViolation,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::string subject = {});

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }
  /// The offending item (unknown term, missing key, config field...), may be empty.
  const std::string& subject() const noexcept { return subject_; }

 private:
  Errc code_;
  std::string subject_;
};

/// Parse failure with a 1-based source position.
class ParseFailure : public Error {
 public:
  ParseFailure(Errc code, std::size_t line, std::size_t column, std::string expectation);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& expectation() const noexcept { return expectation_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expectation_;
};

}  // namespace semdrought
