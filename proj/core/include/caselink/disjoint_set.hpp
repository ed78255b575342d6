#pragma once

#include <cstdint>
#include <vector>

namespace caselink {

/// Union-find over dense integer ids with path compression and union by rank.
class DisjointSet {
 public:
  explicit DisjointSet(std::uint32_t size = 0);

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(parent_.size()); }
  std::uint32_t find(std::uint32_t x);
  /// Returns true when x and y were in different sets.
  bool unite(std::uint32_t x, std::uint32_t y);
  bool same(std::uint32_t x, std::uint32_t y) { return find(x) == find(y); }
  std::uint32_t set_count() const noexcept { return sets_; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
  std::uint32_t sets_ = 0;
};

}  // namespace caselink
