#pragma once

// Parsing, name resolution, type checking and canonical printing of `.ens`
// specification documents.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "statemon/ast.hpp"
#include "statemon/diagnostic.hpp"

namespace statemon {

struct ParseResult {
  std::optional<SpecDocument> document;  // engaged iff no error diagnostics
  std::vector<Diagnostic> diagnostics;
};

ParseResult parse_spec(std::string_view text, std::string source_name = "<input>");

enum class ValueType : std::uint8_t { Logical, Numeric };

/// A document whose references are all bound and whose expressions type-check.
struct ResolvedSpec {
  SpecDocument document;
  std::unordered_map<std::string, std::size_t> index;  // element name -> position
  std::vector<std::string> sensor_table;               // distinct bms ids, sorted
  std::vector<std::size_t> evaluation_order;           // rules/functions, dependencies first
  std::vector<Diagnostic> warnings;

  const ElementDef* find(std::string_view name) const;
  const ElementDef& element(std::size_t position) const { return document.elements[position]; }

  template <class T>
  const T* find_as(std::string_view name) const {
    const ElementDef* e = find(name);
    return e ? std::get_if<T>(e) : nullptr;
  }

  std::vector<const StateSpaceDef*> state_spaces() const;
};

struct ResolveResult {
  std::optional<ResolvedSpec> spec;
  std::vector<Diagnostic> diagnostics;  // errors and warnings
};

ResolveResult resolve_spec(SpecDocument doc);

/// parse_spec followed by resolve_spec; diagnostics of both stages.
ResolveResult load_spec(std::string_view text, std::string source_name = "<input>");

std::string pretty_print(const SpecDocument& doc);
std::string pretty_print(const Expr& expr);

/// Every bms id a rule or function binds, plus the x/y sensors of every
/// characteristic used through satisfies(...).
std::set<std::string> required_sensor_ids(const ResolvedSpec& spec);

bool is_reserved_word(std::string_view word);

}  // namespace statemon
