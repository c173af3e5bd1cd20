#include "statemon/diagnostic.hpp"

#include <algorithm>

namespace statemon {

std::string format_diagnostic(const Diagnostic& diag, std::string_view source_name) {
  std::string out(source_name);
  out += ':' + std::to_string(diag.loc.line) + ':' + std::to_string(diag.loc.column) + ": ";
  out += diag.severity == Severity::Error ? "error: " : "warning: ";
  out += diag.message;
  return out;
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace statemon
