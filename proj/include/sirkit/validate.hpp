#pragma once
// Module well-formedness: type rules, CFG shape, SSA dominance. A module that
// validates is exactly one the interpreter can execute without tripping over
// malformed structure.

#include <string>
#include <vector>

#include "sirkit/ir.hpp"

namespace sirkit {

struct Violation {
  std::string function;
  std::string block;
  int instr_index = -1;
  std::string rule;    // stable rule id, e.g. "missing-terminator"
  std::string detail;  // human-readable context

  std::string str() const;
};

std::vector<Violation> validate_module(const IRModule& m);

}  // namespace sirkit
