#pragma once
// Canonical text form for .sir modules. parse_module(print_module(m)) is
// structurally identical to m.

#include <string>

#include "sirkit/ir.hpp"

namespace sirkit {

std::string print_module(const IRModule& m);
std::string print_instruction(const Instruction& ins, Ty fn_return_type);

}  // namespace sirkit
