#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "cpk/common.hpp"

namespace cpk {

/// All randomness in a run flows from one root seed. Sub-streams are derived
/// by hashing a name into the root, so independent pipelines stay decoupled
/// no matter how many draws each one consumes.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t root) : root_(root) {}

  std::uint64_t root() const { return root_; }

  /// Named sub-stream, deterministic in (root, name).
  std::mt19937_64 stream(const std::string& name) const {
    std::uint64_t h = 1469598103934665603ULL ^ root_;
    for (unsigned char c : name) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    // splitmix64 finalizer to decorrelate nearby roots
    h += 0x9e3779b97f4a7c15ULL;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    h = h ^ (h >> 31);
    return std::mt19937_64(h);
  }

  std::mt19937_64 stream(const std::string& name, std::uint64_t index) const {
    return stream(name + "#" + std::to_string(index));
  }

 private:
  std::uint64_t root_;
};

}  // namespace cpk
