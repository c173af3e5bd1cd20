#pragma once

#include <span>
#include <string>
#include <string_view>

namespace statemon {

struct SourceLoc {
  int line = 1;
  int column = 1;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceLoc loc;
};

/// Formats as `file:line:column: error: message`.
std::string format_diagnostic(const Diagnostic& diag, std::string_view source_name);

bool has_errors(std::span<const Diagnostic> diagnostics);

}  // namespace statemon
