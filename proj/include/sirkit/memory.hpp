#pragma once
// Store-buffer / L1 / main-memory model. Loads resolve per byte: youngest
// matching store-buffer entry first, then the cache, then main memory (line
// fill). Fault hooks let the simulator corrupt resolved bytes in place at the
// level they came from, so corruption introduced at a level sticks there.

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

namespace sirkit {

enum class MemLevel : uint8_t { StoreBuffer, L1, Main };
const char* mem_level_name(MemLevel l);

struct MemoryHierarchyConfig {
  size_t sb_capacity = 8;
  size_t l1_sets = 64;       // direct-mapped
  size_t line_bytes = 64;
};

class MemoryHierarchy {
 public:
  // The hierarchy serves one contiguous address window [base, base+size).
  MemoryHierarchy(uint64_t base, std::vector<uint8_t> image, MemoryHierarchyConfig cfg = {});

  struct ReadResult {
    uint64_t value = 0;
    MemLevel level = MemLevel::Main;  // deepest level any byte resolved at
  };

  // Corruption hook: called once per load with the resolved value; returning
  // a new value rewrites the resolved bytes in place at `level`. Only applied
  // when all bytes of the access resolved at a single level.
  using Corruptor = std::function<std::optional<uint64_t>(MemLevel level, uint64_t addr,
                                                          unsigned width, uint64_t value)>;

  ReadResult read(uint64_t addr, unsigned width, const Corruptor& corrupt = nullptr);
  void write(uint64_t addr, unsigned width, uint64_t value);
  void mfence();                 // drain the store buffer into L1
  void clflush(uint64_t addr);   // write back + invalidate the line holding addr

  // Drain and write everything back; afterwards main memory holds the
  // coherent image.
  void flatten();
  const std::vector<uint8_t>& main_image() const { return main_; }

  size_t store_buffer_entries() const { return sb_.size(); }

 private:
  struct Line {
    bool valid = false;
    bool dirty = false;
    uint64_t line_addr = 0;  // aligned base address of the cached line
    std::vector<uint8_t> bytes;
  };
  struct SbEntry {
    uint64_t addr;
    std::vector<uint8_t> bytes;
  };

  size_t set_of(uint64_t addr) const { return (addr / cfg_.line_bytes) % cfg_.l1_sets; }
  uint64_t line_base(uint64_t addr) const { return addr - addr % cfg_.line_bytes; }

  uint8_t main_byte(uint64_t addr) const;
  void set_main_byte(uint64_t addr, uint8_t v);
  Line& fill_line(uint64_t addr);     // evicting fill from main
  void write_back(Line& line);
  void drain_oldest();

  uint64_t base_;
  std::vector<uint8_t> main_;
  MemoryHierarchyConfig cfg_;
  std::vector<Line> l1_;
  std::deque<SbEntry> sb_;
};

}  // namespace sirkit
