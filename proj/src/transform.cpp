#include "sirkit/transform.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sirkit/validate.hpp"

namespace sirkit {

bool PassConfig::has(Pass p) const {
  return std::find(passes.begin(), passes.end(), p) != passes.end();
}

const CheckSite* CheckSiteMap::find(uint64_t site) const {
  for (const auto& s : sites)
    if (s.site == site) return &s;
  return nullptr;
}

std::string pass_suffix(const std::vector<Pass>& passes) {
  std::vector<Pass> sorted = passes;
  std::sort(sorted.begin(), sorted.end(),
            [](Pass a, Pass b) { return static_cast<int>(a) < static_cast<int>(b); });
  std::string s;
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i) s += "+";
    s += pass_display_name(sorted[i]);
  }
  return s;
}

std::vector<std::string> validate_config(const PassConfig& cfg, const IRModule& m) {
  std::vector<std::string> errs;
  if (cfg.passes.empty()) errs.push_back("no passes selected");
  std::set<Pass> seen(cfg.passes.begin(), cfg.passes.end());
  bool mem = seen.count(Pass::Mem) || m.has_pass(Pass::Mem);
  bool memdiv = seen.count(Pass::MemDiv) || m.has_pass(Pass::MemDiv);
  if (mem && memdiv) errs.push_back("mem and memdiv are mutually exclusive");
  if (!cfg.interleaving.max && cfg.interleaving.n < 1)
    errs.push_back("interleaving must be >= 1 or max");
  if (!cfg.block_size.dep && cfg.block_size.n < 1)
    errs.push_back("block size must be >= 1 or dep");
  return errs;
}

namespace {

bool pass_targets(Pass p, const Instruction& ins) {
  if (ins.tag != OriginTag::Original) return false;
  switch (p) {
    case Pass::Arith: return is_arith_category(ins.op);
    case Pass::Mem:
    case Pass::MemDiv: return ins.op == Opcode::Load || ins.op == Opcode::Store;
    case Pass::Br:
      return ins.op == Opcode::Condbr && ins.operands.size() == 3 &&
             ins.operands[1].name != ins.operands[2].name;
  }
  return false;
}

bool uses_value(const Instruction& ins, const std::string& name) {
  for (const auto& o : ins.operands)
    if (o.kind == Operand::Kind::Value && o.name == name) return true;
  return false;
}

class NameAllocator {
 public:
  void scan_function(const Function& f) {
    values_.clear();
    blocks_.clear();
    for (const auto& p : f.params) values_.insert(p.name);
    for (const auto& b : f.blocks) {
      blocks_.insert(b.name);
      for (const auto& ins : b.instructions)
        if (!ins.result.empty()) values_.insert(ins.result);
    }
  }

  std::string value(const std::string& base) { return fresh(values_, base); }
  std::string block(const std::string& base) { return fresh(blocks_, base); }

 private:
  static std::string fresh(std::set<std::string>& used, const std::string& base) {
    if (used.insert(base).second) return base;
    for (int i = 1;; ++i) {
      std::string cand = base + "_" + std::to_string(i);
      if (used.insert(cand).second) return cand;
    }
  }

  std::set<std::string> values_;
  std::set<std::string> blocks_;
};

struct SiteRecord {
  uint64_t site;
  Pass pass;
  Opcode opcode;
  std::string function;
  uint32_t original_uid;
  int validation_ordinal;
};

class Engine {
 public:
  Engine(const IRModule& input, const PassConfig& cfg) : m_(input), cfg_(cfg) {
    stats_.instructions_before = count_instructions(m_);
    for (auto& f : m_.functions)
      for (auto& b : f.blocks)
        for (auto& ins : b.instructions) {
          ins.uid = next_uid_++;
          if (ins.op == Opcode::ReportError && !ins.operands.empty() &&
              ins.operands[0].kind == Operand::Kind::Const)
            next_site_ = std::max(next_site_, ins.operands[0].imm + 1);
        }
  }

  void apply(Pass p) {
    stats_.originals_targeted.emplace(pass_name(p), 0);
    if (p == Pass::Br)
      apply_br();
    else
      apply_linear(p);
    m_.add_pass(p);
  }

  InstrumentResult finish() {
    stats_.instructions_after = count_instructions(m_);
    InstrumentResult r;
    r.stats = stats_;
    // Resolve recorded original uids to their final coordinates.
    std::map<uint32_t, CheckSite> coords;
    for (const auto& f : m_.functions)
      for (const auto& b : f.blocks)
        for (size_t i = 0; i < b.instructions.size(); ++i) {
          CheckSite c;
          c.function = f.name;
          c.block = b.name;
          c.instr_index = static_cast<int>(i);
          coords[b.instructions[i].uid] = c;
        }
    for (const auto& s : sites_) {
      CheckSite c = coords.at(s.original_uid);
      c.site = s.site;
      c.pass = s.pass;
      c.opcode = s.opcode;
      c.validation_ordinal = s.validation_ordinal;
      r.map.sites.push_back(std::move(c));
    }
    r.module = std::move(m_);
    return r;
  }

 private:
  Instruction make(Opcode op, Ty ty, std::string result, std::vector<Operand> ops,
                   OriginTag tag) {
    Instruction ins;
    ins.op = op;
    ins.type = ty;
    ins.result = std::move(result);
    ins.operands = std::move(ops);
    ins.tag = tag;
    ins.uid = next_uid_++;
    return ins;
  }

  Instruction make_eq_check(Ty ty, std::string result, Operand lhs, Operand rhs) {
    Instruction ins = make(Opcode::Icmp, ty, std::move(result), {std::move(lhs), std::move(rhs)},
                           OriginTag::Check);
    ins.pred = IcmpPred::Eq;
    return ins;
  }

  // ---- Arith / Mem / MemDiv ----

  struct PendingTarget {
    Instruction snapshot;       // the original instruction as written
    size_t old_index;           // index in the pre-pass block (dep lookup)
    uint64_t ordinal;           // 1-based targeted ordinal within the block
    std::vector<std::pair<Operand, Operand>> check_pairs;  // (original, validation)
  };

  struct CheckRef {
    std::string value;  // i1 result of the eq check
    uint64_t site;
    Operand lhs, rhs;
    Ty ty;
  };

  void apply_linear(Pass p) {
    for (auto& f : m_.functions) {
      alloc_.scan_function(f);
      std::vector<BasicBlock> out_blocks;
      for (auto& b : f.blocks) process_block(p, f, b, out_blocks);
      f.blocks = std::move(out_blocks);
    }
  }

  void process_block(Pass p, Function& f, BasicBlock& b, std::vector<BasicBlock>& out_blocks) {
    std::set<size_t> dep_ends;
    if (cfg_.block_size.dep) {
      auto ends = dep_chain_ends(b, p);
      dep_ends.insert(ends.begin(), ends.end());
    }

    std::vector<Instruction> out;
    std::vector<PendingTarget> pending;
    std::vector<CheckRef> checks;
    std::map<std::string, std::string> dupmap;  // original value -> duplicate value
    uint64_t targeted = 0;

    auto due = [&](const PendingTarget& t) {
      return cfg_.block_size.dep ? dep_ends.count(t.old_index) > 0
                                 : t.ordinal % cfg_.block_size.n == 0;
    };

    auto flush = [&]() {
      for (auto& t : pending) emit_validations(p, t, dupmap, out);
      for (auto& t : pending) {
        if (!due(t)) continue;
        int ordinal = 1;
        for (auto& [lhs, rhs] : t.check_pairs) {
          uint64_t site = next_site_++;
          Ty ty = t.snapshot.op == Opcode::Store ? t.snapshot.type
                                                 : instruction_result_type(t.snapshot);
          std::string chk = alloc_.value("chk" + std::to_string(check_counter_++));
          out.push_back(make_eq_check(ty, chk, lhs, rhs));
          ++stats_.checks_inserted;
          checks.push_back({chk, site, lhs, rhs, ty});
          sites_.push_back({site, p, t.snapshot.op, f.name, t.snapshot.uid, ordinal});
          ++ordinal;
        }
      }
      pending.clear();
    };

    size_t n = b.instructions.size();
    for (size_t i = 0; i + 1 < n; ++i) {
      Instruction& ins = b.instructions[i];
      bool is_target = pass_targets(p, ins);
      out.push_back(ins);
      if (is_target) {
        ++targeted;
        ++stats_.originals_targeted[pass_name(p)];
        PendingTarget t;
        t.snapshot = ins;
        t.old_index = i;
        t.ordinal = targeted;
        pending.push_back(std::move(t));
        if (!cfg_.interleaving.max && pending.size() == cfg_.interleaving.n) flush();
      }
    }
    flush();

    Instruction terminator = b.instructions.back();
    if (checks.empty()) {
      out.push_back(std::move(terminator));
      out_blocks.push_back(BasicBlock{b.name, std::move(out)});
      return;
    }

    // AND-accumulate the block's checks and branch once; the reporting block
    // re-reports every failed pair and falls through to the original
    // terminator.
    std::string acc = checks[0].value;
    for (size_t k = 1; k < checks.size(); ++k) {
      std::string next = alloc_.value("acc" + std::to_string(acc_counter_++));
      out.push_back(make(Opcode::And, Ty::I1, next,
                         {Operand::value(acc), Operand::value(checks[k].value)},
                         OriginTag::Check));
      acc = next;
    }
    std::string cont_name = alloc_.block(b.name + ".cont");
    std::string err_name = alloc_.block(b.name + ".err");
    out.push_back(make(Opcode::Condbr, Ty::I64, "",
                       {Operand::value(acc), Operand::label(cont_name), Operand::label(err_name)},
                       OriginTag::Reporting));

    BasicBlock err{err_name, {}};
    for (const auto& c : checks) {
      err.instructions.push_back(make(Opcode::ReportError, c.ty, "",
                                      {Operand::constant(c.site), c.lhs, c.rhs},
                                      OriginTag::Reporting));
    }
    err.instructions.push_back(
        make(Opcode::Br, Ty::I64, "", {Operand::label(cont_name)}, OriginTag::Reporting));
    ++stats_.reporting_blocks_added;

    BasicBlock cont{cont_name, {std::move(terminator)}};
    out_blocks.push_back(BasicBlock{b.name, std::move(out)});
    out_blocks.push_back(std::move(err));
    out_blocks.push_back(std::move(cont));
  }

  void emit_validations(Pass p, PendingTarget& t, std::map<std::string, std::string>& dupmap,
                        std::vector<Instruction>& out) {
    const Instruction& orig = t.snapshot;
    switch (p) {
      case Pass::Arith: {
        Instruction dup = orig;
        dup.uid = next_uid_++;
        dup.tag = OriginTag::Validation;
        dup.result = alloc_.value(orig.result + ".v");
        for (auto& o : dup.operands) {
          if (o.kind != Operand::Kind::Value) continue;
          auto it = dupmap.find(o.name);
          if (it != dupmap.end()) o.name = it->second;
        }
        dupmap[orig.result] = dup.result;
        t.check_pairs.emplace_back(Operand::value(orig.result), Operand::value(dup.result));
        out.push_back(std::move(dup));
        ++stats_.validations_inserted;
        break;
      }
      case Pass::Mem: {
        Operand addr = orig.op == Opcode::Load ? orig.operands[0] : orig.operands[1];
        Operand checked =
            orig.op == Opcode::Load ? Operand::value(orig.result) : orig.operands[0];
        std::string v1 = alloc_.value(validation_base(orig) + ".v1");
        out.push_back(make(Opcode::Load, orig.type, v1, {addr}, OriginTag::Validation));
        ++stats_.validations_inserted;
        t.check_pairs.emplace_back(checked, Operand::value(v1));
        break;
      }
      case Pass::MemDiv: {
        Operand addr = orig.op == Opcode::Load ? orig.operands[0] : orig.operands[1];
        Operand checked =
            orig.op == Opcode::Load ? Operand::value(orig.result) : orig.operands[0];
        std::string base = validation_base(orig);
        if (orig.op == Opcode::Load) {
          std::string v1 = alloc_.value(base + ".v1");
          std::string v2 = alloc_.value(base + ".v2");
          out.push_back(make(Opcode::Load, orig.type, v1, {addr}, OriginTag::Validation));
          out.push_back(make(Opcode::Clflush, Ty::Ptr, "", {addr}, OriginTag::Diversity));
          out.push_back(make(Opcode::Load, orig.type, v2, {addr}, OriginTag::Validation));
          stats_.validations_inserted += 2;
          stats_.diversity_inserted += 1;
          t.check_pairs.emplace_back(checked, Operand::value(v1));
          t.check_pairs.emplace_back(checked, Operand::value(v2));
        } else {
          std::string v1 = alloc_.value(base + ".v1");
          std::string v2 = alloc_.value(base + ".v2");
          std::string v3 = alloc_.value(base + ".v3");
          out.push_back(make(Opcode::Load, orig.type, v1, {addr}, OriginTag::Validation));
          out.push_back(make(Opcode::Mfence, Ty::I64, "", {}, OriginTag::Diversity));
          out.push_back(make(Opcode::Load, orig.type, v2, {addr}, OriginTag::Validation));
          out.push_back(make(Opcode::Clflush, Ty::Ptr, "", {addr}, OriginTag::Diversity));
          out.push_back(make(Opcode::Load, orig.type, v3, {addr}, OriginTag::Validation));
          stats_.validations_inserted += 3;
          stats_.diversity_inserted += 2;
          t.check_pairs.emplace_back(checked, Operand::value(v1));
          t.check_pairs.emplace_back(checked, Operand::value(v2));
          t.check_pairs.emplace_back(checked, Operand::value(v3));
        }
        break;
      }
      case Pass::Br:
        break;  // handled by apply_br
    }
  }

  std::string validation_base(const Instruction& orig) {
    if (orig.op == Opcode::Load) return orig.result;
    return "sv" + std::to_string(store_counter_++);
  }

  // ---- Br ----

  void apply_br() {
    for (auto& f : m_.functions) {
      alloc_.scan_function(f);
      std::vector<std::pair<size_t, size_t>> targets;  // (block idx, instr idx)
      for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
        auto& ins = f.blocks[bi].instructions;
        for (size_t ii = 0; ii < ins.size(); ++ii)
          if (pass_targets(Pass::Br, ins[ii])) targets.emplace_back(bi, ii);
      }
      if (targets.empty()) continue;

      std::string slot = unique_global_name("__brslot." + f.name);
      m_.globals.push_back(Global{slot, 8, {}, true});

      // Per-label expected-target tokens: position in the block list, 1-based.
      std::map<std::string, uint64_t> token;
      for (size_t bi = 0; bi < f.blocks.size(); ++bi) token[f.blocks[bi].name] = bi + 1;

      std::vector<BasicBlock> trampolines;
      for (auto [bi, ii] : targets) {
        Instruction& cb = f.blocks[bi].instructions[ii];
        ++stats_.originals_targeted[pass_name(Pass::Br)];
        std::string t0 = cb.operands[1].name;
        std::string t1 = cb.operands[2].name;
        uint64_t id = br_counter_++;

        std::string tok = alloc_.value("brtok" + std::to_string(id));
        Instruction sel = make(Opcode::Select, Ty::I64, tok,
                               {cb.operands[0], Operand::constant(token.at(t0)),
                                Operand::constant(token.at(t1))},
                               OriginTag::Validation);
        Instruction st = make(Opcode::Store, Ty::I64, "",
                              {Operand::value(tok), Operand::global(slot)},
                              OriginTag::Validation);
        stats_.validations_inserted += 2;

        for (int j = 0; j < 2; ++j) {
          const std::string& tgt = j == 0 ? t0 : t1;
          std::string tram_name =
              alloc_.block(f.blocks[bi].name + ".br" + std::to_string(id) + "t" + std::to_string(j));
          std::string err_name = alloc_.block(tram_name + ".err");
          uint64_t site = next_site_++;
          std::string ld = alloc_.value("brld" + std::to_string(id) + "t" + std::to_string(j));
          std::string chk = alloc_.value("brchk" + std::to_string(id) + "t" + std::to_string(j));

          BasicBlock tram{tram_name, {}};
          tram.instructions.push_back(
              make(Opcode::Load, Ty::I64, ld, {Operand::global(slot)}, OriginTag::Validation));
          tram.instructions.push_back(
              make_eq_check(Ty::I64, chk, Operand::value(ld), Operand::constant(token.at(tgt))));
          tram.instructions.push_back(make(Opcode::Condbr, Ty::I64, "",
                                           {Operand::value(chk), Operand::label(tgt),
                                            Operand::label(err_name)},
                                           OriginTag::Reporting));
          BasicBlock err{err_name, {}};
          err.instructions.push_back(make(Opcode::ReportError, Ty::I64, "",
                                          {Operand::constant(site), Operand::value(ld),
                                           Operand::constant(token.at(tgt))},
                                          OriginTag::Reporting));
          err.instructions.push_back(
              make(Opcode::Br, Ty::I64, "", {Operand::label(tgt)}, OriginTag::Reporting));
          ++stats_.validations_inserted;  // the slot load
          ++stats_.checks_inserted;
          ++stats_.reporting_blocks_added;

          sites_.push_back({site, Pass::Br, Opcode::Condbr, f.name, cb.uid, j + 1});
          cb.operands[j + 1] = Operand::label(tram_name);
          trampolines.push_back(std::move(tram));
          trampolines.push_back(std::move(err));
        }

        auto& instrs = f.blocks[bi].instructions;
        instrs.insert(instrs.begin() + static_cast<long>(ii), {std::move(sel), std::move(st)});
      }
      for (auto& t : trampolines) f.blocks.push_back(std::move(t));
    }
  }

  std::string unique_global_name(std::string base) {
    auto taken = [&](const std::string& n) { return m_.find_global(n) != nullptr; };
    if (!taken(base)) return base;
    for (int i = 1;; ++i) {
      std::string cand = base + "_" + std::to_string(i);
      if (!taken(cand)) return cand;
    }
  }

  IRModule m_;
  PassConfig cfg_;
  InstrumentationStats stats_;
  std::vector<SiteRecord> sites_;
  NameAllocator alloc_;
  uint32_t next_uid_ = 1;
  uint64_t next_site_ = 0;
  uint64_t check_counter_ = 0;
  uint64_t acc_counter_ = 0;
  uint64_t store_counter_ = 0;
  uint64_t br_counter_ = 0;
};

std::vector<Pass> effective_passes(const IRModule& m, const PassConfig& cfg) {
  std::vector<Pass> order = {Pass::Arith, Pass::Mem, Pass::MemDiv, Pass::Br};
  std::vector<Pass> out;
  for (Pass p : order)
    if (cfg.has(p) && !m.has_pass(p)) out.push_back(p);
  return out;
}

void require_valid(const IRModule& m, const PassConfig& cfg) {
  auto cfg_errs = validate_config(cfg, m);
  if (!cfg_errs.empty()) {
    std::ostringstream os;
    os << "invalid pass config: ";
    for (size_t i = 0; i < cfg_errs.size(); ++i) {
      if (i) os << "; ";
      os << cfg_errs[i];
    }
    throw std::invalid_argument(os.str());
  }
  auto violations = validate_module(m);
  if (!violations.empty())
    throw std::invalid_argument("input module does not validate: " + violations.front().str());
}

}  // namespace

InstrumentResult instrument(const IRModule& m, const PassConfig& cfg) {
  require_valid(m, cfg);
  Engine e(m, cfg);
  for (Pass p : effective_passes(m, cfg)) e.apply(p);
  InstrumentResult r = e.finish();
  for (Pass p : cfg.passes) r.module.add_pass(p);
  return r;
}

namespace {
InstrumentResult single_pass(const IRModule& m, const PassConfig& cfg, Pass p) {
  if (!cfg.has(p))
    throw std::invalid_argument(std::string("config does not select pass ") + pass_name(p));
  PassConfig c = cfg;
  c.passes = {p};
  return instrument(m, c);
}
}  // namespace

InstrumentResult instrument_arith(const IRModule& m, const PassConfig& cfg) {
  return single_pass(m, cfg, Pass::Arith);
}

InstrumentResult instrument_mem(const IRModule& m, const PassConfig& cfg) {
  return single_pass(m, cfg, Pass::Mem);
}

InstrumentResult instrument_memdiv(const IRModule& m, const PassConfig& cfg) {
  if (cfg.has(Pass::Mem))
    throw std::invalid_argument("mem and memdiv are mutually exclusive");
  return single_pass(m, cfg, Pass::MemDiv);
}

InstrumentResult instrument_br(const IRModule& m) {
  PassConfig cfg;
  cfg.passes = {Pass::Br};
  return instrument(m, cfg);
}

InstrumentResult instrument_combined(const IRModule& m, const PassConfig& cfg) {
  if (cfg.passes.size() < 2)
    throw std::invalid_argument("combined instrumentation needs at least two passes");
  return instrument(m, cfg);
}

std::vector<size_t> dep_chain_ends(const BasicBlock& b, Pass category) {
  std::vector<size_t> targeted;
  for (size_t i = 0; i < b.instructions.size(); ++i)
    if (pass_targets(category, b.instructions[i])) targeted.push_back(i);
  std::vector<size_t> ends;
  for (size_t i : targeted) {
    const Instruction& ins = b.instructions[i];
    bool is_end = true;
    if (!ins.result.empty()) {
      for (size_t j : targeted) {
        if (j <= i) continue;
        if (uses_value(b.instructions[j], ins.result)) {
          is_end = false;
          break;
        }
      }
    }
    if (is_end) ends.push_back(i);
  }
  return ends;
}

}  // namespace sirkit
