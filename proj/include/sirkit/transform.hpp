#pragma once
// The four instrumentation passes (Arith, Mem, MemDiv, Br) and their
// combinations. Passes insert validation/check/diversity/reporting
// instructions around Original-tagged instructions; anything already tagged
// by instrumentation is never targeted again.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sirkit/ir.hpp"

namespace sirkit {

struct BlockSizeCfg {
  bool dep = false;  // checks at dependency-chain ends
  uint64_t n = 1;    // used when !dep
  static BlockSizeCfg of(uint64_t v) { return {false, v}; }
  static BlockSizeCfg dep_mode() { return {true, 0}; }
  bool operator==(const BlockSizeCfg&) const = default;
};

struct InterleavingCfg {
  bool max = false;  // one group per block
  uint64_t n = 1;    // used when !max
  static InterleavingCfg of(uint64_t v) { return {false, v}; }
  static InterleavingCfg max_mode() { return {true, 0}; }
  bool operator==(const InterleavingCfg&) const = default;
};

struct PassConfig {
  std::vector<Pass> passes;
  InterleavingCfg interleaving;
  BlockSizeCfg block_size;

  bool has(Pass p) const;
};

// Empty when the config is usable; otherwise one message per problem.
std::vector<std::string> validate_config(const PassConfig& cfg, const IRModule& m);

struct CheckSite {
  uint64_t site = 0;            // id baked into the report_error instruction
  Pass pass = Pass::Arith;      // pass that inserted the check
  Opcode opcode = Opcode::Add;  // checked original's opcode
  std::string function;
  std::string block;            // block holding the original instruction
  int instr_index = -1;         // index of the original within that block
  int validation_ordinal = 1;   // 1-based; MemDiv load 1..2 / store 1..3; Br target 1..2
};

struct CheckSiteMap {
  std::vector<CheckSite> sites;
  const CheckSite* find(uint64_t site) const;
};

struct InstrumentationStats {
  std::map<std::string, uint64_t> originals_targeted;  // keyed by pass name
  uint64_t validations_inserted = 0;
  uint64_t checks_inserted = 0;
  uint64_t diversity_inserted = 0;
  uint64_t reporting_blocks_added = 0;
  uint64_t instructions_before = 0;
  uint64_t instructions_after = 0;

  double size_ratio() const {
    return instructions_before == 0
               ? 1.0
               : static_cast<double>(instructions_after) / static_cast<double>(instructions_before);
  }
};

struct InstrumentResult {
  IRModule module;
  CheckSiteMap map;
  InstrumentationStats stats;
};

// Applies cfg.passes in the fixed order Arith -> Mem/MemDiv -> Br. Passes the
// module has already been through are skipped (structural no-op). Throws
// std::invalid_argument on an unusable config.
InstrumentResult instrument(const IRModule& m, const PassConfig& cfg);

InstrumentResult instrument_arith(const IRModule& m, const PassConfig& cfg);
InstrumentResult instrument_mem(const IRModule& m, const PassConfig& cfg);
InstrumentResult instrument_memdiv(const IRModule& m, const PassConfig& cfg);
InstrumentResult instrument_br(const IRModule& m);
InstrumentResult instrument_combined(const IRModule& m, const PassConfig& cfg);

// Indices of targeted original instructions in b whose result is not consumed
// by a later targeted original in the same block (maximal elements of the
// intra-block def-use order restricted to the pass's targets).
std::vector<size_t> dep_chain_ends(const BasicBlock& b, Pass category);

// File-name suffix for a pass list, e.g. "Arith+MemDiv+Br".
std::string pass_suffix(const std::vector<Pass>& passes);

}  // namespace sirkit
