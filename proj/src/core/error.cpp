#include "semdrought/core/error.hpp"

namespace semdrought {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidIri: return "InvalidIri";
    case Errc::BadLiteral: return "BadLiteral";
    case Errc::MissingField: return "MissingField";
    case Errc::Ambiguous: return "Ambiguous";
    case Errc::DuplicateCategory: return "DuplicateCategory";
    case Errc::ColumnCount: return "ColumnCount";
    case Errc::EmptyField: return "EmptyField";
    case Errc::Malformed: return "Malformed";
    case Errc::MissingKey: return "MissingKey";
    case Errc::WrongType: return "WrongType";
    case Errc::MissingElement: return "MissingElement";
    case Errc::NonFinite: return "NonFinite";
    case Errc::UnknownTerm: return "UnknownTerm";
    case Errc::UnknownUnit: return "UnknownUnit";
    case Errc::UnitMismatch: return "UnitMismatch";
    case Errc::BadTimestamp: return "BadTimestamp";
    case Errc::BadNumber: return "BadNumber";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::MissingLocation: return "MissingLocation";
    case Errc::UnknownSensor: return "UnknownSensor";
    case Errc::InvalidAlignment: return "InvalidAlignment";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidRule: return "InvalidRule";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::SemanticError: return "SemanticError";
    case Errc::OutOfOrder: return "OutOfOrder";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::Degenerate: return "Degenerate";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::InvalidWeight: return "InvalidWeight";
    case Errc::InvalidIndicator: return "InvalidIndicator";
    case Errc::UnknownIndicator: return "UnknownIndicator";
    case Errc::OutOfSeason: return "OutOfSeason";
    case Errc::BadConfidence: return "BadConfidence";
    case Errc::BadWeights: return "BadWeights";
    case Errc::InsufficientBaseline: return "InsufficientBaseline";
    case Errc::NoData: return "NoData";
    case Errc::NotFound: return "NotFound";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnknownRegion: return "UnknownRegion";
    case Errc::DuplicateObservation: return "DuplicateObservation";
    case Errc::PreconditionViolation: return "PreconditionViolation";
  }
  return "Unknown";
}

Error::Error(Errc code, std::string message, std::string subject)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message),
      code_(code),
      subject_(std::move(subject)) {}

ParseFailure::ParseFailure(Errc code, std::size_t line, std::size_t column,
                           std::string expectation)
    : Error(code,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                expectation),
      line_(line),
      column_(column),
      expectation_(std::move(expectation)) {}

}  // namespace semdrought
