#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "semdrought/store/triple_store.hpp"

namespace semdrought::store {

/// `<iri>`, `_:label` or `"lexical"^^<datatype>` (with \\ \" \n \r \t escapes).
std::string to_ntriples(const Term& term);

/// One triple per line, lines sorted bytewise, each ending in '\n'. Equal
/// triple sets give byte-identical text. Inferred marks are not written.
std::string serialize(const TripleStore& store);

/// Reads the subset written by serialize(). Blank lines and '#' comment
/// lines are skipped. Errors: ParseFailure(ParseError) with line number.
TripleStore load(std::string_view text);

/// Writes to a sibling temporary file and renames it into place.
void write_atomically(const std::filesystem::path& path, std::string_view content);

}  // namespace semdrought::store
