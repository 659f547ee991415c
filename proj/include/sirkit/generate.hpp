#pragma once
// Seeded random program and input generation. Generated programs always
// validate, never trap (divisors forced odd, addresses masked in-bounds), and
// terminate: control flow is a DAG of diamonds plus counted loops with
// constant trip counts.

#include "sirkit/ir.hpp"

namespace sirkit {

IRModule gen_random_program(uint64_t seed, uint64_t size_budget);

// Random arguments for a module's entry function (memory image left at the
// globals' declared initializers).
ProgramInput random_input_for(const Function& entry, uint64_t seed);

}  // namespace sirkit
