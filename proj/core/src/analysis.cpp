#include "caselink/analysis.hpp"

namespace caselink {

std::shared_ptr<const Analysis> Analysis::build(std::vector<Transaction> transactions,
                                                std::vector<AttributionTag> tags, const CoinJoinPolicy& policy,
                                                GraphOptions graph_options, unsigned threads) {
  std::shared_ptr<Analysis> a(new Analysis());
  a->ledger_ = std::make_unique<Ledger>(std::move(transactions));
  a->tags_ = std::move(tags);
  a->verdicts_ = classify_all(*a->ledger_, policy, threads);
  a->partition_ = std::make_unique<EntityPartition>(EntityPartition::build(*a->ledger_, a->verdicts_, threads));
  a->graph_ = std::make_unique<EntityGraph>(EntityGraph::build(*a->partition_, a->verdicts_, a->tags_, graph_options));
  return a;
}

}  // namespace caselink
