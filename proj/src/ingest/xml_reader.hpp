#pragma once

// Tiny non-validating XML reader covering what observation payloads use:
// elements, attributes, text, the five predefined entities, numeric
// character references, comments, CDATA and the XML declaration.
// No namespaces, no DTDs.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace semdrought::ingest::xml {

struct Element {
  std::string name;
  std::map<std::string, std::string> attributes;
  std::string text;  // concatenated direct character data, entity-decoded
  std::vector<Element> children;

  const Element* child(std::string_view child_name) const {
    for (const auto& c : children)
      if (c.name == child_name) return &c;
    return nullptr;
  }
};

/// Throws Error(Malformed) on any syntax problem.
Element parse_document(std::string_view text);

}  // namespace semdrought::ingest::xml
