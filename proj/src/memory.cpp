#include "sirkit/memory.hpp"

#include <stdexcept>

namespace sirkit {

const char* mem_level_name(MemLevel l) {
  switch (l) {
    case MemLevel::StoreBuffer: return "store_buffer";
    case MemLevel::L1: return "l1";
    case MemLevel::Main: return "main";
  }
  return "?";
}

MemoryHierarchy::MemoryHierarchy(uint64_t base, std::vector<uint8_t> image,
                                 MemoryHierarchyConfig cfg)
    : base_(base), main_(std::move(image)), cfg_(cfg), l1_(cfg.l1_sets) {}

uint8_t MemoryHierarchy::main_byte(uint64_t addr) const {
  return main_.at(addr - base_);
}

void MemoryHierarchy::set_main_byte(uint64_t addr, uint8_t v) {
  main_.at(addr - base_) = v;
}

void MemoryHierarchy::write_back(Line& line) {
  if (!line.valid || !line.dirty) return;
  for (size_t i = 0; i < cfg_.line_bytes; ++i) {
    uint64_t a = line.line_addr + i;
    if (a >= base_ && a - base_ < main_.size()) main_[a - base_] = line.bytes[i];
  }
  line.dirty = false;
}

MemoryHierarchy::Line& MemoryHierarchy::fill_line(uint64_t addr) {
  Line& line = l1_[set_of(addr)];
  uint64_t lb = line_base(addr);
  if (line.valid && line.line_addr == lb) return line;
  write_back(line);
  line.valid = true;
  line.dirty = false;
  line.line_addr = lb;
  line.bytes.assign(cfg_.line_bytes, 0);
  for (size_t i = 0; i < cfg_.line_bytes; ++i) {
    uint64_t a = lb + i;
    if (a >= base_ && a - base_ < main_.size()) line.bytes[i] = main_[a - base_];
  }
  return line;
}

MemoryHierarchy::ReadResult MemoryHierarchy::read(uint64_t addr, unsigned width,
                                                  const Corruptor& corrupt) {
  ReadResult r;
  uint64_t value = 0;
  // Per-byte source bookkeeping so corruption can be written back in place.
  // 0 = store buffer (index in src_idx), 1 = l1 hit, 2 = filled from main.
  std::vector<int> src(width, -1);
  std::vector<size_t> src_idx(width, 0);
  bool any_sb = false, any_l1 = false, any_main = false;

  for (unsigned i = 0; i < width; ++i) {
    uint64_t a = addr + i;
    uint8_t byte = 0;
    bool from_sb = false;
    for (size_t k = sb_.size(); k-- > 0;) {  // youngest first
      const SbEntry& e = sb_[k];
      if (a >= e.addr && a < e.addr + e.bytes.size()) {
        byte = e.bytes[a - e.addr];
        from_sb = true;
        src[i] = 0;
        src_idx[i] = k;
        break;
      }
    }
    if (!from_sb) {
      Line& line = l1_[set_of(a)];
      if (line.valid && line.line_addr == line_base(a)) {
        byte = line.bytes[a - line.line_addr];
        src[i] = 1;
        any_l1 = true;
      } else {
        Line& filled = fill_line(a);
        byte = filled.bytes[a - filled.line_addr];
        src[i] = 2;
        any_main = true;
      }
    } else {
      any_sb = true;
    }
    value |= static_cast<uint64_t>(byte) << (8 * i);
  }

  r.level = any_main ? MemLevel::Main : (any_l1 ? MemLevel::L1 : MemLevel::StoreBuffer);
  r.value = value;

  bool uniform = (any_sb ? 1 : 0) + (any_l1 ? 1 : 0) + (any_main ? 1 : 0) == 1;
  if (corrupt && uniform) {
    auto replacement = corrupt(r.level, addr, width, value);
    if (replacement) {
      r.value = *replacement;
      for (unsigned i = 0; i < width; ++i) {
        uint8_t byte = static_cast<uint8_t>(*replacement >> (8 * i));
        uint64_t a = addr + i;
        switch (src[i]) {
          case 0:
            sb_[src_idx[i]].bytes[a - sb_[src_idx[i]].addr] = byte;
            break;
          case 1:
          case 2: {
            Line& line = l1_[set_of(a)];
            line.bytes[a - line.line_addr] = byte;
            // A corrupted fill also leaves main wrong: the bytes moved.
            if (src[i] == 2) set_main_byte(a, byte);
            break;
          }
        }
      }
    }
  }
  return r;
}

void MemoryHierarchy::write(uint64_t addr, unsigned width, uint64_t value) {
  if (sb_.size() >= cfg_.sb_capacity) drain_oldest();
  SbEntry e;
  e.addr = addr;
  for (unsigned i = 0; i < width; ++i)
    e.bytes.push_back(static_cast<uint8_t>(value >> (8 * i)));
  sb_.push_back(std::move(e));
}

void MemoryHierarchy::drain_oldest() {
  SbEntry e = std::move(sb_.front());
  sb_.pop_front();
  for (size_t i = 0; i < e.bytes.size(); ++i) {
    uint64_t a = e.addr + i;
    Line& line = fill_line(a);
    line.bytes[a - line.line_addr] = e.bytes[i];
    line.dirty = true;
  }
}

void MemoryHierarchy::mfence() {
  while (!sb_.empty()) drain_oldest();
}

void MemoryHierarchy::clflush(uint64_t addr) {
  Line& line = l1_[set_of(addr)];
  if (line.valid && line.line_addr == line_base(addr)) {
    write_back(line);
    line.valid = false;
  }
}

void MemoryHierarchy::flatten() {
  mfence();
  for (auto& line : l1_) {
    write_back(line);
    line.valid = false;
  }
}

}  // namespace sirkit
