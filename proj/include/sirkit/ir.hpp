#pragma once
// Core data structures for the .sir dialect: a small, single-threaded,
// integer-only SSA IR over a flat byte-addressed memory. This is the
// substrate for the instrumentation passes and the micro-simulator.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sirkit {

enum class Ty : uint8_t { I1, I8, I32, I64, Ptr };

unsigned bit_width(Ty t);
uint64_t mask_to(Ty t, uint64_t v);
const char* ty_name(Ty t);
std::optional<Ty> ty_from_name(std::string_view s);
bool is_int_ty(Ty t);
bool is_mem_value_ty(Ty t);  // types load/store may move: i8, i32, i64

enum class Opcode : uint8_t {
  Add, Sub, Mul, Udiv, And, Or, Xor, Shl, Lshr,
  Trunc, Zext, Icmp, Select, Ptradd,
  Load, Store, Br, Condbr, Ret, Mfence, Clflush, ReportError,
};
inline constexpr int kNumOpcodes = 22;

const char* opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view s);
bool is_terminator(Opcode op);
bool opcode_has_result(Opcode op);
// The Arith pass target category: computational, side-effect-free ops.
bool is_arith_category(Opcode op);

struct Instruction;
// Type of the value an instruction defines (icmp -> i1, ptradd -> ptr,
// everything else -> its annotated type).
Ty instruction_result_type(const Instruction& ins);

enum class IcmpPred : uint8_t { Eq, Ne, Ult, Ule, Ugt, Uge, Slt, Sle, Sgt, Sge };
const char* pred_name(IcmpPred p);
std::optional<IcmpPred> pred_from_name(std::string_view s);

// Provenance of an instruction relative to instrumentation. Everything in a
// freshly parsed user program is Original; passes only ever target Original
// instructions.
enum class OriginTag : uint8_t { Original, Validation, Check, Diversity, Reporting };
const char* tag_suffix(OriginTag t);  // "", "!v", "!c", "!d", "!r"

struct Operand {
  enum class Kind : uint8_t { Value, Const, Global, Label };
  Kind kind = Kind::Const;
  std::string name;
  uint64_t imm = 0;

  static Operand value(std::string n) { return {Kind::Value, std::move(n), 0}; }
  static Operand constant(uint64_t v) { return {Kind::Const, {}, v}; }
  static Operand global(std::string n) { return {Kind::Global, std::move(n), 0}; }
  static Operand label(std::string n) { return {Kind::Label, std::move(n), 0}; }

  bool operator==(const Operand&) const = default;
};

struct Instruction {
  Opcode op = Opcode::Ret;
  Ty type = Ty::I64;   // result type; operand width for icmp/store/report_error
  Ty ty2 = Ty::I64;    // source type for trunc/zext
  IcmpPred pred = IcmpPred::Eq;
  std::string result;  // empty when the opcode defines no value
  std::vector<Operand> operands;
  OriginTag tag = OriginTag::Original;

  // Transient identity used while instrumenting (check-site bookkeeping
  // across block surgery). Not serialized, not part of structural equality.
  uint32_t uid = 0;

  bool same_shape(const Instruction& o) const {
    return op == o.op && type == o.type && ty2 == o.ty2 && pred == o.pred &&
           result == o.result && operands == o.operands && tag == o.tag;
  }
};

struct BasicBlock {
  std::string name;
  std::vector<Instruction> instructions;
};

struct Param {
  std::string name;
  Ty type = Ty::I64;
  bool operator==(const Param&) const = default;
};

struct Function {
  std::string name;
  std::vector<Param> params;
  Ty return_type = Ty::I64;
  std::vector<BasicBlock> blocks;

  const BasicBlock* find_block(std::string_view n) const;
};

struct Global {
  std::string name;
  uint64_t size = 0;
  std::vector<uint8_t> init;  // at most `size` bytes; the rest is zero
  bool instr_owned = false;   // inserted by instrumentation; excluded from
                              // final-memory comparisons
  bool operator==(const Global&) const = default;
};

enum class Pass : uint8_t { Arith, Mem, MemDiv, Br };
const char* pass_name(Pass p);          // "arith", "mem", "memdiv", "br"
const char* pass_display_name(Pass p);  // "Arith", "Mem", "MemDiv", "Br"
std::optional<Pass> pass_from_name(std::string_view s);

struct IRModule {
  std::string entry_function;
  std::vector<Global> globals;
  std::vector<Function> functions;
  // Passes already applied to this module, kept in canonical order. Re-applying
  // one is a structural no-op.
  std::vector<Pass> applied_passes;

  const Function* entry() const { return find_function(entry_function); }
  const Function* find_function(std::string_view n) const;
  const Global* find_global(std::string_view n) const;
  bool has_pass(Pass p) const;
  void add_pass(Pass p);
};

// Structural identity: everything except transient uids.
bool structurally_equal(const Instruction& a, const Instruction& b);
bool structurally_equal(const IRModule& a, const IRModule& b);

uint64_t count_instructions(const IRModule& m);

// One concrete execution request: entry-function arguments plus optional
// overrides of global initial bytes.
struct ProgramInput {
  uint64_t seed = 0;
  std::vector<std::pair<Ty, uint64_t>> args;
  std::vector<std::pair<std::string, std::vector<uint8_t>>> memory_image;
};

}  // namespace sirkit
