#pragma once

#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "caselink/case_link.hpp"
#include "caselink/entity_partition.hpp"
#include "caselink/types.hpp"

namespace testing {

using Partition = std::set<std::set<std::string>>;
using Grouping = std::set<std::set<std::string>>;

std::filesystem::path fixture(const std::string& relative);

struct DeskFixture {
  std::vector<caselink::Transaction> transactions;
  std::vector<caselink::AttributionTag> tags;
  std::vector<caselink::FxRate> rates;
  std::vector<caselink::CaseRecord> cases;
};

/// The hand-checked twelve-transaction ledger under fixtures/desk.
DeskFixture load_desk();

caselink::Transaction tx(std::string id, caselink::Timestamp ts, std::vector<caselink::TxLeg> in,
                         std::vector<caselink::TxLeg> out);

caselink::CaseRecord make_case(int sequence, std::vector<std::string> perpetrators,
                               std::vector<std::string> victims = {}, std::string zone = "zone-a");

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

/// Random ledger with up to `max_txs` transactions over `max_addresses`
/// addresses named a000..; some transactions are coinbase.
std::vector<caselink::Transaction> random_ledger(std::mt19937_64& rng, std::size_t max_txs,
                                                 std::size_t max_addresses);

/// Connected components of the co-spend graph by depth-first search. Skips
/// coinbase transactions and any whose id is in `skip`.
Partition cospend_components(const std::vector<caselink::Transaction>& txs,
                             const std::set<std::string>& skip = {});

Partition partition_sets(const caselink::EntityPartition& partition);

/// Case ids per cluster.
Grouping grouping(const caselink::CaseClustering& clustering);

/// True when every group of `fine` lies inside one group of `coarse`.
bool refines(const Grouping& fine, const Grouping& coarse);

}  // namespace testing
