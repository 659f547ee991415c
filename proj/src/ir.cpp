#include "sirkit/ir.hpp"

#include <algorithm>
#include <array>

namespace sirkit {

unsigned bit_width(Ty t) {
  switch (t) {
    case Ty::I1: return 1;
    case Ty::I8: return 8;
    case Ty::I32: return 32;
    case Ty::I64: return 64;
    case Ty::Ptr: return 64;
  }
  return 64;
}

uint64_t mask_to(Ty t, uint64_t v) {
  unsigned w = bit_width(t);
  if (w >= 64) return v;
  return v & ((1ull << w) - 1);
}

const char* ty_name(Ty t) {
  switch (t) {
    case Ty::I1: return "i1";
    case Ty::I8: return "i8";
    case Ty::I32: return "i32";
    case Ty::I64: return "i64";
    case Ty::Ptr: return "ptr";
  }
  return "?";
}

std::optional<Ty> ty_from_name(std::string_view s) {
  if (s == "i1") return Ty::I1;
  if (s == "i8") return Ty::I8;
  if (s == "i32") return Ty::I32;
  if (s == "i64") return Ty::I64;
  if (s == "ptr") return Ty::Ptr;
  return std::nullopt;
}

bool is_int_ty(Ty t) { return t != Ty::Ptr; }

bool is_mem_value_ty(Ty t) { return t == Ty::I8 || t == Ty::I32 || t == Ty::I64; }

namespace {
constexpr std::array<const char*, kNumOpcodes> kOpcodeNames = {
    "add", "sub", "mul", "udiv", "and", "or", "xor", "shl", "lshr",
    "trunc", "zext", "icmp", "select", "ptradd",
    "load", "store", "br", "condbr", "ret", "mfence", "clflush", "report_error",
};
}  // namespace

const char* opcode_name(Opcode op) { return kOpcodeNames[static_cast<size_t>(op)]; }

std::optional<Opcode> opcode_from_name(std::string_view s) {
  for (size_t i = 0; i < kOpcodeNames.size(); ++i)
    if (s == kOpcodeNames[i]) return static_cast<Opcode>(i);
  return std::nullopt;
}

bool is_terminator(Opcode op) {
  return op == Opcode::Br || op == Opcode::Condbr || op == Opcode::Ret;
}

bool opcode_has_result(Opcode op) {
  switch (op) {
    case Opcode::Store:
    case Opcode::Br:
    case Opcode::Condbr:
    case Opcode::Ret:
    case Opcode::Mfence:
    case Opcode::Clflush:
    case Opcode::ReportError:
      return false;
    default:
      return true;
  }
}

bool is_arith_category(Opcode op) {
  switch (op) {
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Mul:
    case Opcode::Udiv:
    case Opcode::And:
    case Opcode::Or:
    case Opcode::Xor:
    case Opcode::Shl:
    case Opcode::Lshr:
    case Opcode::Trunc:
    case Opcode::Zext:
    case Opcode::Icmp:
    case Opcode::Select:
    case Opcode::Ptradd:
      return true;
    default:
      return false;
  }
}

Ty instruction_result_type(const Instruction& ins) {
  if (ins.op == Opcode::Icmp) return Ty::I1;
  if (ins.op == Opcode::Ptradd) return Ty::Ptr;
  return ins.type;
}

const char* pred_name(IcmpPred p) {
  switch (p) {
    case IcmpPred::Eq: return "eq";
    case IcmpPred::Ne: return "ne";
    case IcmpPred::Ult: return "ult";
    case IcmpPred::Ule: return "ule";
    case IcmpPred::Ugt: return "ugt";
    case IcmpPred::Uge: return "uge";
    case IcmpPred::Slt: return "slt";
    case IcmpPred::Sle: return "sle";
    case IcmpPred::Sgt: return "sgt";
    case IcmpPred::Sge: return "sge";
  }
  return "?";
}

std::optional<IcmpPred> pred_from_name(std::string_view s) {
  static constexpr std::array<const char*, 10> names = {
      "eq", "ne", "ult", "ule", "ugt", "uge", "slt", "sle", "sgt", "sge"};
  for (size_t i = 0; i < names.size(); ++i)
    if (s == names[i]) return static_cast<IcmpPred>(i);
  return std::nullopt;
}

const char* tag_suffix(OriginTag t) {
  switch (t) {
    case OriginTag::Original: return "";
    case OriginTag::Validation: return "!v";
    case OriginTag::Check: return "!c";
    case OriginTag::Diversity: return "!d";
    case OriginTag::Reporting: return "!r";
  }
  return "";
}

const BasicBlock* Function::find_block(std::string_view n) const {
  for (const auto& b : blocks)
    if (b.name == n) return &b;
  return nullptr;
}

const char* pass_name(Pass p) {
  switch (p) {
    case Pass::Arith: return "arith";
    case Pass::Mem: return "mem";
    case Pass::MemDiv: return "memdiv";
    case Pass::Br: return "br";
  }
  return "?";
}

const char* pass_display_name(Pass p) {
  switch (p) {
    case Pass::Arith: return "Arith";
    case Pass::Mem: return "Mem";
    case Pass::MemDiv: return "MemDiv";
    case Pass::Br: return "Br";
  }
  return "?";
}

std::optional<Pass> pass_from_name(std::string_view s) {
  if (s == "arith") return Pass::Arith;
  if (s == "mem") return Pass::Mem;
  if (s == "memdiv") return Pass::MemDiv;
  if (s == "br") return Pass::Br;
  return std::nullopt;
}

const Function* IRModule::find_function(std::string_view n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}

const Global* IRModule::find_global(std::string_view n) const {
  for (const auto& g : globals)
    if (g.name == n) return &g;
  return nullptr;
}

bool IRModule::has_pass(Pass p) const {
  return std::find(applied_passes.begin(), applied_passes.end(), p) != applied_passes.end();
}

void IRModule::add_pass(Pass p) {
  if (!has_pass(p)) {
    applied_passes.push_back(p);
    std::sort(applied_passes.begin(), applied_passes.end(),
              [](Pass a, Pass b) { return static_cast<int>(a) < static_cast<int>(b); });
  }
}

bool structurally_equal(const Instruction& a, const Instruction& b) {
  return a.same_shape(b);
}

bool structurally_equal(const IRModule& a, const IRModule& b) {
  if (a.entry_function != b.entry_function) return false;
  if (a.globals != b.globals) return false;
  if (a.applied_passes != b.applied_passes) return false;
  if (a.functions.size() != b.functions.size()) return false;
  for (size_t i = 0; i < a.functions.size(); ++i) {
    const Function& fa = a.functions[i];
    const Function& fb = b.functions[i];
    if (fa.name != fb.name || fa.params != fb.params || fa.return_type != fb.return_type)
      return false;
    if (fa.blocks.size() != fb.blocks.size()) return false;
    for (size_t j = 0; j < fa.blocks.size(); ++j) {
      const BasicBlock& ba = fa.blocks[j];
      const BasicBlock& bb = fb.blocks[j];
      if (ba.name != bb.name) return false;
      if (ba.instructions.size() != bb.instructions.size()) return false;
      for (size_t k = 0; k < ba.instructions.size(); ++k)
        if (!ba.instructions[k].same_shape(bb.instructions[k])) return false;
    }
  }
  return true;
}

uint64_t count_instructions(const IRModule& m) {
  uint64_t n = 0;
  for (const auto& f : m.functions)
    for (const auto& b : f.blocks) n += b.instructions.size();
  return n;
}

}  // namespace sirkit
