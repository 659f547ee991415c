#pragma once
// Text -> IRModule. A successfully parsed module has also passed
// validate_module; syntactically well-formed but semantically invalid input
// is reported as a diagnostic.

#include <optional>
#include <string>
#include <string_view>

#include "sirkit/ir.hpp"

namespace sirkit {

struct ParseDiagnostic {
  int line = 0;  // 1-based; 0 when the error has no useful position
  int col = 0;
  std::string message;
};

struct ParseResult {
  std::optional<IRModule> module;
  ParseDiagnostic error;
  bool ok() const { return module.has_value(); }
};

ParseResult parse_module(std::string_view text);

}  // namespace sirkit
