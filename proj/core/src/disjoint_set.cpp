#include "caselink/disjoint_set.hpp"

#include <numeric>
#include <utility>

namespace caselink {

DisjointSet::DisjointSet(std::uint32_t size) : parent_(size), rank_(size, 0), sets_(size) {
  std::iota(parent_.begin(), parent_.end(), 0u);
}

std::uint32_t DisjointSet::find(std::uint32_t x) {
  auto root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) x = std::exchange(parent_[x], root);
  return root;
}

bool DisjointSet::unite(std::uint32_t x, std::uint32_t y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (rank_[x] < rank_[y]) std::swap(x, y);
  parent_[y] = x;
  if (rank_[x] == rank_[y]) ++rank_[x];
  --sets_;
  return true;
}

}  // namespace caselink
