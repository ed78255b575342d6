#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caselink/ledger.hpp"
#include "caselink/types.hpp"

namespace caselink {

/// Equal-output CoinJoin detector settings. A transaction is flagged when
///   - it spends from at least two distinct addresses,
///   - its most frequent output value v (among outputs >= min_value) occurs
///     f >= min_multiplicity times,
///   - it has at least f distinct input addresses, and
///   - it has at least f outputs.
/// Ties on multiplicity pick the larger value.
struct CoinJoinPolicy {
  bool enabled = true;
  std::uint32_t min_multiplicity = 2;
  Satoshi min_value = 546;
};

/// Accepts "default", "off" or "custom:<path>" where the file holds
/// key=value lines (enabled, min_multiplicity, min_value).
CoinJoinPolicy parse_coinjoin_policy(std::string_view flag);
CoinJoinPolicy load_coinjoin_policy(const std::filesystem::path& path);

struct CoinJoinVerdict {
  std::string tx_id;
  bool is_coinjoin = false;
  std::optional<Satoshi> matched_output_value;
  std::optional<std::uint32_t> participant_estimate;
};

CoinJoinVerdict classify(const Transaction& tx, const CoinJoinPolicy& policy = {});

/// One verdict per ledger transaction, index-aligned. `threads` > 1 splits the
/// work into contiguous chunks; the result does not depend on it.
std::vector<CoinJoinVerdict> classify_all(const Ledger& ledger, const CoinJoinPolicy& policy = {},
                                          unsigned threads = 1);

}  // namespace caselink
