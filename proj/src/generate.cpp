#include "sirkit/generate.hpp"

#include <set>
#include <string>
#include <vector>

#include "sirkit/rng.hpp"

namespace sirkit {

namespace {

// Builder state for one generated function. Values are tracked per type in
// scoped pools so that anything handed out is guaranteed to dominate the
// current insertion point.
class ProgramBuilder {
 public:
  ProgramBuilder(uint64_t seed, uint64_t budget) : rng_(seed), budget_(budget) {}

  IRModule build() {
    IRModule m;
    m.entry_function = "main";

    Function f;
    f.name = "main";
    f.return_type = Ty::I64;
    f.params = {{"x", Ty::I64}, {"y", Ty::I64}};

    size_t n_globals = 4 + static_cast<size_t>(rng_.bounded(5));
    for (size_t i = 0; i < n_globals; ++i) {
      Global g;
      g.name = "g" + std::to_string(i);
      g.size = 64;
      size_t ninit = rng_.bounded(9);
      for (size_t j = 0; j < ninit * 8; ++j)
        g.init.push_back(static_cast<uint8_t>(rng_.next() & 0xff));
      m.globals.push_back(std::move(g));
    }
    globals_ = n_globals;

    fn_ = &f;
    push_scope();
    pool64_.back().push_back(Operand::value("x"));
    pool64_.back().push_back(Operand::value("y"));
    new_block("entry");

    if (budget_ <= 1) {
      emit_ret();
      m.functions.push_back(std::move(f));
      return m;
    }

    // Mandatory mix when the budget allows: at least one load, one store and
    // one conditional branch.
    if (budget_ >= 20) {
      emit_store(&m);
      emit_load(&m);
    }
    while (budget_ > 4) {
      uint64_t roll = rng_.bounded(100);
      if (roll < 55) {
        emit_arith();
      } else if (roll < 68) {
        if (!emit_load(&m)) emit_arith();
      } else if (roll < 80) {
        if (!emit_store(&m)) emit_arith();
      } else if (roll < 92 || loops_emitted_ >= 4) {
        emit_diamond(&m);
      } else {
        emit_loop(&m);
      }
    }
    emit_ret();
    m.functions.push_back(std::move(f));
    return m;
  }

 private:
  BasicBlock& cur() { return fn_->blocks.back(); }

  void new_block(std::string name) {
    fn_->blocks.push_back(BasicBlock{std::move(name), {}});
    block_globals_.clear();
  }

  std::string fresh_value() { return "v" + std::to_string(value_counter_++); }
  std::string fresh_block() { return "b" + std::to_string(block_counter_++); }

  void push_scope() {
    pool64_.emplace_back();
    pool1_.emplace_back();
  }

  void pop_scope() {
    pool64_.pop_back();
    pool1_.pop_back();
  }

  Operand any64() {
    size_t total = 0;
    for (auto& s : pool64_) total += s.size();
    if (total == 0 || rng_.bounded(8) == 0) return Operand::constant(rng_.next() >> rng_.bounded(40));
    uint64_t k = rng_.bounded(total);
    for (auto& s : pool64_) {
      if (k < s.size()) return s[k];
      k -= s.size();
    }
    return Operand::constant(1);
  }

  bool have_i1() {
    for (auto& s : pool1_)
      if (!s.empty()) return true;
    return false;
  }

  Operand any1() {
    size_t total = 0;
    for (auto& s : pool1_) total += s.size();
    uint64_t k = rng_.bounded(total);
    for (auto& s : pool1_) {
      if (k < s.size()) return s[k];
      k -= s.size();
    }
    return Operand::constant(1);
  }

  void push64(std::string name) { pool64_.back().push_back(Operand::value(std::move(name))); }
  void push1(std::string name) { pool1_.back().push_back(Operand::value(std::move(name))); }

  void emit(Instruction ins) {
    cur().instructions.push_back(std::move(ins));
    if (budget_ > 0) --budget_;
  }

  void emit_arith() {
    uint64_t roll = rng_.bounded(100);
    if (roll < 12) {  // compare
      Instruction ins;
      ins.op = Opcode::Icmp;
      ins.pred = static_cast<IcmpPred>(rng_.bounded(10));
      ins.type = Ty::I64;
      ins.result = fresh_value();
      ins.operands = {any64(), any64()};
      push1(ins.result);
      emit(std::move(ins));
      return;
    }
    if (roll < 20 && have_i1()) {  // select
      Instruction ins;
      ins.op = Opcode::Select;
      ins.type = Ty::I64;
      ins.result = fresh_value();
      ins.operands = {any1(), any64(), any64()};
      push64(ins.result);
      emit(std::move(ins));
      return;
    }
    if (roll < 28) {  // trunc then zext back: exercises width changes
      Instruction tr;
      tr.op = Opcode::Trunc;
      tr.ty2 = Ty::I64;
      tr.type = rng_.bounded(2) ? Ty::I32 : Ty::I8;
      tr.result = fresh_value();
      tr.operands = {any64()};
      std::string narrow = tr.result;
      Ty narrow_ty = tr.type;
      emit(std::move(tr));
      Instruction zx;
      zx.op = Opcode::Zext;
      zx.ty2 = narrow_ty;
      zx.type = Ty::I64;
      zx.result = fresh_value();
      zx.operands = {Operand::value(narrow)};
      push64(zx.result);
      emit(std::move(zx));
      return;
    }
    if (roll < 36) {  // division with a divisor forced odd (never traps)
      Instruction orr;
      orr.op = Opcode::Or;
      orr.type = Ty::I64;
      orr.result = fresh_value();
      orr.operands = {any64(), Operand::constant(1)};
      std::string divisor = orr.result;
      emit(std::move(orr));
      Instruction div;
      div.op = Opcode::Udiv;
      div.type = Ty::I64;
      div.result = fresh_value();
      div.operands = {any64(), Operand::value(divisor)};
      push64(div.result);
      emit(std::move(div));
      return;
    }
    static constexpr Opcode bin[] = {Opcode::Add, Opcode::Sub, Opcode::Mul,  Opcode::And,
                                     Opcode::Or,  Opcode::Xor, Opcode::Shl, Opcode::Lshr};
    Instruction ins;
    ins.op = bin[rng_.bounded(8)];
    ins.type = Ty::I64;
    ins.result = fresh_value();
    ins.operands = {any64(), any64()};
    push64(ins.result);
    emit(std::move(ins));
  }

  // Pick a data global not yet touched by a memory op in the current block.
  // One memory op per global per block keeps validation loads inserted by the
  // memory passes from observing unrelated same-address stores.
  int pick_block_global() {
    std::vector<int> avail;
    for (int i = 0; i < static_cast<int>(globals_); ++i)
      if (!block_globals_.count(i)) avail.push_back(i);
    if (avail.empty()) return -1;
    int g = avail[rng_.bounded(avail.size())];
    block_globals_.insert(g);
    return g;
  }

  // Address of an 8-aligned slot inside global g: either a constant offset or
  // a masked dynamic offset.
  Operand make_address(int g) {
    std::string gname = "g" + std::to_string(g);
    if (rng_.bounded(2) == 0) {
      uint64_t off = rng_.bounded(8) * 8;
      if (off == 0) return Operand::global(gname);
      Instruction pa;
      pa.op = Opcode::Ptradd;
      pa.type = Ty::Ptr;
      pa.result = fresh_value();
      pa.operands = {Operand::global(gname), Operand::constant(off)};
      std::string p = pa.result;
      emit(std::move(pa));
      return Operand::value(p);
    }
    Instruction msk;
    msk.op = Opcode::And;
    msk.type = Ty::I64;
    msk.result = fresh_value();
    msk.operands = {any64(), Operand::constant(7)};
    std::string slot = msk.result;
    emit(std::move(msk));
    Instruction shl;
    shl.op = Opcode::Shl;
    shl.type = Ty::I64;
    shl.result = fresh_value();
    shl.operands = {Operand::value(slot), Operand::constant(3)};
    std::string off = shl.result;
    emit(std::move(shl));
    Instruction pa;
    pa.op = Opcode::Ptradd;
    pa.type = Ty::Ptr;
    pa.result = fresh_value();
    pa.operands = {Operand::global("g" + std::to_string(g)), Operand::value(off)};
    std::string p = pa.result;
    emit(std::move(pa));
    return Operand::value(p);
  }

  bool emit_load(IRModule*) {
    int g = pick_block_global();
    if (g < 0) return false;
    Operand addr = make_address(g);
    Instruction ld;
    ld.op = Opcode::Load;
    ld.type = Ty::I64;
    ld.result = fresh_value();
    ld.operands = {addr};
    push64(ld.result);
    emit(std::move(ld));
    return true;
  }

  bool emit_store(IRModule*) {
    int g = pick_block_global();
    if (g < 0) return false;
    Operand addr = make_address(g);
    Instruction st;
    st.op = Opcode::Store;
    st.type = Ty::I64;
    st.operands = {any64(), addr};
    emit(std::move(st));
    return true;
  }

  void emit_diamond(IRModule* m) {
    if (!have_i1()) {
      Instruction ins;
      ins.op = Opcode::Icmp;
      ins.pred = IcmpPred::Ult;
      ins.type = Ty::I64;
      ins.result = fresh_value();
      ins.operands = {any64(), any64()};
      push1(ins.result);
      emit(std::move(ins));
    }
    std::string bt = fresh_block(), bf = fresh_block(), bj = fresh_block();
    Instruction cb;
    cb.op = Opcode::Condbr;
    cb.operands = {any1(), Operand::label(bt), Operand::label(bf)};
    emit(std::move(cb));

    for (const std::string* arm : {&bt, &bf}) {
      new_block(*arm);
      push_scope();
      uint64_t arm_len = 1 + rng_.bounded(4);
      for (uint64_t i = 0; i < arm_len && budget_ > 3; ++i) {
        if (rng_.bounded(4) == 0)
          emit_store(m);
        else
          emit_arith();
      }
      pop_scope();
      Instruction br;
      br.op = Opcode::Br;
      br.operands = {Operand::label(bj)};
      emit(std::move(br));
    }
    new_block(bj);
  }

  void emit_loop(IRModule* m) {
    ++loops_emitted_;
    std::string slot = "loop" + std::to_string(loops_emitted_);
    m->globals.push_back(Global{slot, 8, {}, false});
    uint64_t trip = 2 + rng_.bounded(15);  // constant trips, well under the 64 cap

    std::string head = fresh_block(), body = fresh_block(), exit = fresh_block();
    Instruction init;
    init.op = Opcode::Store;
    init.type = Ty::I64;
    init.operands = {Operand::constant(0), Operand::global(slot)};
    emit(std::move(init));
    Instruction br;
    br.op = Opcode::Br;
    br.operands = {Operand::label(head)};
    emit(std::move(br));

    new_block(head);
    std::string iv = fresh_value();
    Instruction ld;
    ld.op = Opcode::Load;
    ld.type = Ty::I64;
    ld.result = iv;
    ld.operands = {Operand::global(slot)};
    emit(std::move(ld));
    std::string cond = fresh_value();
    Instruction cmp;
    cmp.op = Opcode::Icmp;
    cmp.pred = IcmpPred::Ult;
    cmp.type = Ty::I64;
    cmp.result = cond;
    cmp.operands = {Operand::value(iv), Operand::constant(trip)};
    emit(std::move(cmp));
    Instruction cb;
    cb.op = Opcode::Condbr;
    cb.operands = {Operand::value(cond), Operand::label(body), Operand::label(exit)};
    emit(std::move(cb));

    new_block(body);
    push_scope();
    pool64_.back().push_back(Operand::value(iv));
    uint64_t body_len = 2 + rng_.bounded(8);
    for (uint64_t i = 0; i < body_len && budget_ > 6; ++i) {
      uint64_t roll = rng_.bounded(10);
      if (roll < 6)
        emit_arith();
      else if (roll < 8)
        emit_load(m);
      else
        emit_store(m);
    }
    pop_scope();
    std::string next = fresh_value();
    Instruction inc;
    inc.op = Opcode::Add;
    inc.type = Ty::I64;
    inc.result = next;
    inc.operands = {Operand::value(iv), Operand::constant(1)};
    emit(std::move(inc));
    Instruction st;
    st.op = Opcode::Store;
    st.type = Ty::I64;
    st.operands = {Operand::value(next), Operand::global(slot)};
    emit(std::move(st));
    Instruction back;
    back.op = Opcode::Br;
    back.operands = {Operand::label(head)};
    emit(std::move(back));

    new_block(exit);
  }

  void emit_ret() {
    Instruction ret;
    ret.op = Opcode::Ret;
    ret.operands = {any64()};
    cur().instructions.push_back(std::move(ret));
  }

  SplitMix64 rng_;
  uint64_t budget_;
  Function* fn_ = nullptr;
  size_t globals_ = 0;
  std::vector<std::vector<Operand>> pool64_;
  std::vector<std::vector<Operand>> pool1_;
  std::set<int> block_globals_;
  uint64_t value_counter_ = 0;
  uint64_t block_counter_ = 0;
  int loops_emitted_ = 0;
};

}  // namespace

IRModule gen_random_program(uint64_t seed, uint64_t size_budget) {
  ProgramBuilder b(derive_seed(seed, "program"), size_budget);
  return b.build();
}

ProgramInput random_input_for(const Function& entry, uint64_t seed) {
  ProgramInput in;
  in.seed = seed;
  SplitMix64 rng(derive_seed(seed, "input"));
  for (const auto& p : entry.params) in.args.emplace_back(p.type, mask_to(p.type, rng.next()));
  return in;
}

}  // namespace sirkit
