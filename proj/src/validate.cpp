#include "sirkit/validate.hpp"

#include <map>
#include <set>
#include <sstream>

namespace sirkit {

std::string Violation::str() const {
  std::ostringstream os;
  os << rule;
  if (!function.empty()) os << " in @" << function;
  if (!block.empty()) os << " at " << block;
  if (instr_index >= 0) os << "#" << instr_index;
  if (!detail.empty()) os << " (" << detail << ")";
  return os.str();
}

namespace {

class FunctionChecker {
 public:
  FunctionChecker(const IRModule& m, const Function& f, std::vector<Violation>& out)
      : module_(m), fn_(f), out_(out) {}

  void check() {
    index_blocks();
    check_defs();
    check_blocks();
    if (!structure_broken_) {
      compute_dominators();
      check_uses();
    }
  }

 private:
  void add(const std::string& block, int idx, std::string rule, std::string detail = {}) {
    out_.push_back({fn_.name, block, idx, std::move(rule), std::move(detail)});
  }

  void index_blocks() {
    for (size_t i = 0; i < fn_.blocks.size(); ++i) {
      const auto& b = fn_.blocks[i];
      if (block_index_.count(b.name)) {
        add(b.name, -1, "duplicate-block");
        structure_broken_ = true;
      }
      block_index_[b.name] = i;
    }
  }

  // Value definitions: params plus instruction results, each exactly once.
  void check_defs() {
    for (const auto& p : fn_.params) {
      if (!defs_.emplace(p.name, Def{kParamBlock, 0, p.type}).second)
        add("", -1, "duplicate-value", "param %" + p.name);
    }
    for (size_t bi = 0; bi < fn_.blocks.size(); ++bi) {
      const auto& b = fn_.blocks[bi];
      for (size_t ii = 0; ii < b.instructions.size(); ++ii) {
        const auto& ins = b.instructions[ii];
        bool needs_result = opcode_has_result(ins.op);
        if (!needs_result && !ins.result.empty())
          add(b.name, static_cast<int>(ii), "result-forbidden", opcode_name(ins.op));
        if (needs_result && ins.result.empty())
          add(b.name, static_cast<int>(ii), "result-missing", opcode_name(ins.op));
        if (!ins.result.empty()) {
          Ty rt = result_type(ins);
          if (!defs_.emplace(ins.result, Def{bi, ii, rt}).second) {
            add(b.name, static_cast<int>(ii), "duplicate-value", "%" + ins.result);
            structure_broken_ = true;
          }
        }
      }
    }
  }

  static Ty result_type(const Instruction& ins) {
    if (ins.op == Opcode::Icmp) return Ty::I1;
    if (ins.op == Opcode::Ptradd) return Ty::Ptr;
    return ins.type;
  }

  void check_blocks() {
    for (size_t bi = 0; bi < fn_.blocks.size(); ++bi) {
      const auto& b = fn_.blocks[bi];
      if (b.instructions.empty() || !is_terminator(b.instructions.back().op)) {
        add(b.name, -1, "missing-terminator");
        structure_broken_ = true;
      }
      for (size_t ii = 0; ii < b.instructions.size(); ++ii) {
        const auto& ins = b.instructions[ii];
        if (is_terminator(ins.op) && ii + 1 != b.instructions.size()) {
          add(b.name, static_cast<int>(ii), "terminator-not-last");
          structure_broken_ = true;
        }
        check_instruction(b, bi, ii, ins);
      }
    }
  }

  void expect_operands(const BasicBlock& b, size_t ii, const Instruction& ins, size_t n) {
    if (ins.operands.size() != n) {
      add(b.name, static_cast<int>(ii), "bad-operand-count",
          std::string(opcode_name(ins.op)) + " wants " + std::to_string(n));
      structure_broken_ = true;
    }
  }

  // Type of an operand where determinable without dominance (constants adopt
  // the expected type; globals are ptr).
  std::optional<Ty> operand_type(const Operand& o) const {
    switch (o.kind) {
      case Operand::Kind::Const: return std::nullopt;  // polymorphic
      case Operand::Kind::Global: return Ty::Ptr;
      case Operand::Kind::Label: return std::nullopt;
      case Operand::Kind::Value: {
        auto it = defs_.find(o.name);
        if (it == defs_.end()) return std::nullopt;
        return it->second.type;
      }
    }
    return std::nullopt;
  }

  void check_value_type(const BasicBlock& b, size_t ii, const Operand& o, Ty want) {
    if (o.kind == Operand::Kind::Const) {
      if (want != Ty::Ptr && mask_to(want, o.imm) != o.imm)
        add(b.name, static_cast<int>(ii), "constant-out-of-range",
            std::to_string(o.imm) + " does not fit " + ty_name(want));
      if (want == Ty::Ptr)
        add(b.name, static_cast<int>(ii), "type-mismatch", "integer constant used as ptr");
      return;
    }
    if (o.kind == Operand::Kind::Label) {
      add(b.name, static_cast<int>(ii), "type-mismatch", "label used as value");
      return;
    }
    auto t = operand_type(o);
    if (t && *t != want)
      add(b.name, static_cast<int>(ii), "type-mismatch",
          std::string(ty_name(*t)) + " where " + ty_name(want) + " expected");
  }

  void check_label(const BasicBlock& b, size_t ii, const Operand& o) {
    if (o.kind != Operand::Kind::Label) {
      add(b.name, static_cast<int>(ii), "type-mismatch", "expected block label");
      return;
    }
    if (!block_index_.count(o.name))
      add(b.name, static_cast<int>(ii), "unknown-target", o.name);
  }

  void check_instruction(const BasicBlock& b, size_t bi, size_t ii, const Instruction& ins) {
    (void)bi;
    int i = static_cast<int>(ii);
    switch (ins.op) {
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul:
      case Opcode::Udiv:
      case Opcode::And:
      case Opcode::Or:
      case Opcode::Xor:
      case Opcode::Shl:
      case Opcode::Lshr:
        expect_operands(b, ii, ins, 2);
        if (ins.type == Ty::Ptr) {
          add(b.name, i, "type-mismatch", "arithmetic on ptr");
          break;
        }
        if (ins.operands.size() == 2) {
          check_value_type(b, ii, ins.operands[0], ins.type);
          check_value_type(b, ii, ins.operands[1], ins.type);
        }
        if (ins.op == Opcode::Udiv && ins.operands.size() == 2 &&
            ins.operands[1].kind == Operand::Kind::Const && ins.operands[1].imm == 0)
          add(b.name, i, "udiv-const-zero");
        break;
      case Opcode::Icmp:
        expect_operands(b, ii, ins, 2);
        if (ins.operands.size() == 2) {
          check_value_type(b, ii, ins.operands[0], ins.type);
          check_value_type(b, ii, ins.operands[1], ins.type);
        }
        break;
      case Opcode::Select:
        expect_operands(b, ii, ins, 3);
        if (ins.operands.size() == 3) {
          check_value_type(b, ii, ins.operands[0], Ty::I1);
          check_value_type(b, ii, ins.operands[1], ins.type);
          check_value_type(b, ii, ins.operands[2], ins.type);
        }
        break;
      case Opcode::Trunc:
      case Opcode::Zext: {
        expect_operands(b, ii, ins, 1);
        if (!is_int_ty(ins.type) || !is_int_ty(ins.ty2)) {
          add(b.name, i, "type-mismatch", "trunc/zext on non-integer");
          break;
        }
        unsigned from = bit_width(ins.ty2), to = bit_width(ins.type);
        bool ok = ins.op == Opcode::Trunc ? to < from : to > from;
        if (!ok)
          add(b.name, i, "width-order",
              std::string(opcode_name(ins.op)) + " " + ty_name(ins.ty2) + " to " +
                  ty_name(ins.type));
        if (ins.operands.size() == 1) check_value_type(b, ii, ins.operands[0], ins.ty2);
        break;
      }
      case Opcode::Ptradd:
        expect_operands(b, ii, ins, 2);
        if (ins.operands.size() == 2) {
          check_value_type(b, ii, ins.operands[0], Ty::Ptr);
          check_value_type(b, ii, ins.operands[1], Ty::I64);
        }
        break;
      case Opcode::Load:
        expect_operands(b, ii, ins, 1);
        if (!is_mem_value_ty(ins.type))
          add(b.name, i, "type-mismatch", "load of non-memory type");
        if (ins.operands.size() == 1) check_value_type(b, ii, ins.operands[0], Ty::Ptr);
        break;
      case Opcode::Store:
        expect_operands(b, ii, ins, 2);
        if (!is_mem_value_ty(ins.type))
          add(b.name, i, "type-mismatch", "store of non-memory type");
        if (ins.operands.size() == 2) {
          check_value_type(b, ii, ins.operands[0], ins.type);
          check_value_type(b, ii, ins.operands[1], Ty::Ptr);
        }
        break;
      case Opcode::Br:
        expect_operands(b, ii, ins, 1);
        if (ins.operands.size() == 1) check_label(b, ii, ins.operands[0]);
        break;
      case Opcode::Condbr:
        expect_operands(b, ii, ins, 3);
        if (ins.operands.size() == 3) {
          check_value_type(b, ii, ins.operands[0], Ty::I1);
          check_label(b, ii, ins.operands[1]);
          check_label(b, ii, ins.operands[2]);
        }
        break;
      case Opcode::Ret:
        expect_operands(b, ii, ins, 1);
        if (ins.operands.size() == 1) check_value_type(b, ii, ins.operands[0], fn_.return_type);
        break;
      case Opcode::Mfence:
        expect_operands(b, ii, ins, 0);
        break;
      case Opcode::Clflush:
        expect_operands(b, ii, ins, 1);
        if (ins.operands.size() == 1) check_value_type(b, ii, ins.operands[0], Ty::Ptr);
        break;
      case Opcode::ReportError:
        expect_operands(b, ii, ins, 3);
        if (ins.operands.size() == 3) {
          if (ins.operands[0].kind != Operand::Kind::Const)
            add(b.name, i, "type-mismatch", "report_error site id must be a constant");
          if (ins.type == Ty::Ptr) {
            // Pointer comparisons are fine; both operands must then be ptrs.
            check_value_type(b, ii, ins.operands[1], Ty::Ptr);
            check_value_type(b, ii, ins.operands[2], Ty::Ptr);
          } else {
            check_value_type(b, ii, ins.operands[1], ins.type);
            check_value_type(b, ii, ins.operands[2], ins.type);
          }
        }
        break;
    }
  }

  void compute_dominators() {
    size_t n = fn_.blocks.size();
    std::vector<std::vector<size_t>> preds(n);
    for (size_t bi = 0; bi < n; ++bi) {
      const auto& term = fn_.blocks[bi].instructions.back();
      auto link = [&](const Operand& o) {
        auto it = block_index_.find(o.name);
        if (it != block_index_.end()) preds[it->second].push_back(bi);
      };
      if (term.op == Opcode::Br) {
        link(term.operands[0]);
      } else if (term.op == Opcode::Condbr) {
        link(term.operands[1]);
        link(term.operands[2]);
      }
    }
    // Iterative bitset dominator computation; block counts here are small.
    size_t words = (n + 63) / 64;
    dom_.assign(n, std::vector<uint64_t>(words, ~0ull));
    dom_[0].assign(words, 0);
    dom_[0][0] = 1;  // entry dominated only by itself
    bool changed = true;
    std::vector<uint64_t> tmp(words);
    while (changed) {
      changed = false;
      for (size_t bi = 1; bi < n; ++bi) {
        if (preds[bi].empty()) {
          // unreachable block: dominated by everything (vacuous), leave as-is
          continue;
        }
        tmp.assign(words, ~0ull);
        for (size_t p : preds[bi])
          for (size_t w = 0; w < words; ++w) tmp[w] &= dom_[p][w];
        tmp[bi / 64] |= 1ull << (bi % 64);
        if (tmp != dom_[bi]) {
          dom_[bi] = tmp;
          changed = true;
        }
      }
    }
    reachable_.assign(n, false);
    reachable_[0] = true;
    std::vector<size_t> work{0};
    std::vector<std::vector<size_t>> succs(n);
    for (size_t bi = 0; bi < n; ++bi)
      for (size_t pi = 0; pi < n; ++pi)
        for (size_t p : preds[pi])
          if (p == bi) succs[bi].push_back(pi);
    while (!work.empty()) {
      size_t b = work.back();
      work.pop_back();
      for (size_t s : succs[b])
        if (!reachable_[s]) {
          reachable_[s] = true;
          work.push_back(s);
        }
    }
  }

  bool dominates(size_t a, size_t b) const { return (dom_[b][a / 64] >> (a % 64)) & 1; }

  void check_uses() {
    for (size_t bi = 0; bi < fn_.blocks.size(); ++bi) {
      const auto& b = fn_.blocks[bi];
      for (size_t ii = 0; ii < b.instructions.size(); ++ii) {
        const auto& ins = b.instructions[ii];
        for (const auto& o : ins.operands) {
          if (o.kind == Operand::Kind::Global) {
            if (!module_.find_global(o.name))
              add(b.name, static_cast<int>(ii), "unknown-global", "@" + o.name);
            continue;
          }
          if (o.kind != Operand::Kind::Value) continue;
          auto it = defs_.find(o.name);
          if (it == defs_.end()) {
            add(b.name, static_cast<int>(ii), "undefined-value", "%" + o.name);
            continue;
          }
          const Def& d = it->second;
          if (d.block == kParamBlock) continue;  // params dominate everything
          bool ok;
          if (d.block == bi)
            ok = d.index < ii;
          else
            ok = reachable_[bi] ? dominates(d.block, bi) : true;
          if (!ok)
            add(b.name, static_cast<int>(ii), "dominance",
                "%" + o.name + " does not dominate its use");
        }
      }
    }
  }

  static constexpr size_t kParamBlock = ~size_t{0};
  struct Def {
    size_t block;
    size_t index;
    Ty type;
  };

  const IRModule& module_;
  const Function& fn_;
  std::vector<Violation>& out_;
  std::map<std::string, size_t> block_index_;
  std::map<std::string, Def> defs_;
  std::vector<std::vector<uint64_t>> dom_;
  std::vector<bool> reachable_;
  bool structure_broken_ = false;
};

}  // namespace

std::vector<Violation> validate_module(const IRModule& m) {
  std::vector<Violation> out;
  std::set<std::string> fn_names;
  for (const auto& f : m.functions)
    if (!fn_names.insert(f.name).second)
      out.push_back({f.name, "", -1, "duplicate-function", ""});
  std::set<std::string> gl_names;
  for (const auto& g : m.globals) {
    if (!gl_names.insert(g.name).second)
      out.push_back({"", "", -1, "duplicate-global", "@" + g.name});
    if (g.init.size() > g.size)
      out.push_back({"", "", -1, "global-init-too-long", "@" + g.name});
  }
  if (!m.find_function(m.entry_function))
    out.push_back({m.entry_function, "", -1, "unknown-entry", ""});
  for (const auto& f : m.functions) {
    if (f.blocks.empty()) {
      out.push_back({f.name, "", -1, "empty-function", ""});
      continue;
    }
    FunctionChecker(m, f, out).check();
  }
  return out;
}

}  // namespace sirkit
