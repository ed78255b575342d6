#pragma once

#include <memory>
#include <vector>

#include "caselink/coinjoin.hpp"
#include "caselink/entity_graph.hpp"
#include "caselink/entity_partition.hpp"
#include "caselink/ledger.hpp"

namespace caselink {

/// Owns a ledger together with the verdicts, partition and graph derived from
/// it, so the internal references stay valid. Immutable once built.
class Analysis {
 public:
  static std::shared_ptr<const Analysis> build(std::vector<Transaction> transactions,
                                               std::vector<AttributionTag> tags, const CoinJoinPolicy& policy = {},
                                               GraphOptions graph_options = {}, unsigned threads = 1);

  const Ledger& ledger() const noexcept { return *ledger_; }
  const std::vector<CoinJoinVerdict>& verdicts() const noexcept { return verdicts_; }
  const EntityPartition& partition() const noexcept { return *partition_; }
  const EntityGraph& graph() const noexcept { return *graph_; }
  const std::vector<AttributionTag>& tags() const noexcept { return tags_; }

 private:
  Analysis() = default;

  std::unique_ptr<Ledger> ledger_;
  std::vector<CoinJoinVerdict> verdicts_;
  std::unique_ptr<EntityPartition> partition_;
  std::unique_ptr<EntityGraph> graph_;
  std::vector<AttributionTag> tags_;
};

}  // namespace caselink
