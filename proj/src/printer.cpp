#include "sirkit/printer.hpp"

#include <sstream>

namespace sirkit {

namespace {

void print_operand(std::ostringstream& os, const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::Value: os << '%' << o.name; break;
    case Operand::Kind::Const: os << o.imm; break;
    case Operand::Kind::Global: os << '@' << o.name; break;
    case Operand::Kind::Label: os << o.name; break;
  }
}

void print_instr(std::ostringstream& os, const Instruction& ins) {
  auto opnd = [&](size_t i) { print_operand(os, ins.operands[i]); };
  if (!ins.result.empty()) os << '%' << ins.result << " = ";
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
      os << opcode_name(ins.op) << ' ' << ty_name(ins.type) << ' ';
      opnd(0); os << ", "; opnd(1);
      break;
    case Opcode::Icmp:
      os << "icmp " << pred_name(ins.pred) << ' ' << ty_name(ins.type) << ' ';
      opnd(0); os << ", "; opnd(1);
      break;
    case Opcode::Select:
      os << "select ";
      opnd(0); os << ", " << ty_name(ins.type) << ' ';
      opnd(1); os << ", "; opnd(2);
      break;
    case Opcode::Trunc:
    case Opcode::Zext:
      os << opcode_name(ins.op) << ' ' << ty_name(ins.ty2) << ' ';
      opnd(0); os << " to " << ty_name(ins.type);
      break;
    case Opcode::Ptradd:
      os << "ptradd ";
      opnd(0); os << ", "; opnd(1);
      break;
    case Opcode::Load:
      os << "load " << ty_name(ins.type) << ", ";
      opnd(0);
      break;
    case Opcode::Store:
      os << "store " << ty_name(ins.type) << ' ';
      opnd(0); os << ", "; opnd(1);
      break;
    case Opcode::Br:
      os << "br ";
      opnd(0);
      break;
    case Opcode::Condbr:
      os << "condbr ";
      opnd(0); os << ", "; opnd(1); os << ", "; opnd(2);
      break;
    case Opcode::Ret:
      os << "ret ";
      opnd(0);
      break;
    case Opcode::Mfence:
      os << "mfence";
      break;
    case Opcode::Clflush:
      os << "clflush ";
      opnd(0);
      break;
    case Opcode::ReportError:
      os << "report_error ";
      opnd(0); os << ", " << ty_name(ins.type) << ' ';
      opnd(1); os << ", "; opnd(2);
      break;
  }
  const char* suffix = tag_suffix(ins.tag);
  if (*suffix) os << ' ' << suffix;
}

}  // namespace

std::string print_instruction(const Instruction& ins, Ty) {
  std::ostringstream os;
  print_instr(os, ins);
  return os.str();
}

std::string print_module(const IRModule& m) {
  std::ostringstream os;
  os << "entry @" << m.entry_function << "\n";
  if (!m.applied_passes.empty()) {
    os << "passes ";
    for (size_t i = 0; i < m.applied_passes.size(); ++i) {
      if (i) os << ", ";
      os << pass_name(m.applied_passes[i]);
    }
    os << "\n";
  }
  for (const auto& g : m.globals) {
    os << "global @" << g.name << " : " << g.size;
    if (!g.init.empty()) {
      os << " = [";
      for (size_t i = 0; i < g.init.size(); ++i) {
        if (i) os << ", ";
        os << static_cast<unsigned>(g.init[i]);
      }
      os << "]";
    }
    if (g.instr_owned) os << " !instr";
    os << "\n";
  }
  for (const auto& f : m.functions) {
    os << "\nfn @" << f.name << "(";
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      os << '%' << f.params[i].name << ": " << ty_name(f.params[i].type);
    }
    os << ") -> " << ty_name(f.return_type) << " {\n";
    for (const auto& b : f.blocks) {
      os << b.name << ":\n";
      for (const auto& ins : b.instructions) {
        os << "  ";
        print_instr(os, ins);
        os << "\n";
      }
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace sirkit
