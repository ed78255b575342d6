#include "caselink/entity_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "caselink/csv.hpp"
#include "caselink/errors.hpp"

namespace caselink {

EntityGraph EntityGraph::build(const EntityPartition& partition, std::span<const CoinJoinVerdict> verdicts,
                               std::span<const AttributionTag> tags, GraphOptions options) {
  const auto& ledger = partition.ledger();
  if (verdicts.size() != ledger.size()) throw InvalidArgument("coinjoin verdicts do not cover the ledger");

  EntityGraph g;
  g.partition_ = &partition;
  g.options_ = options;

  std::map<std::pair<EntityId, EntityId>, EntityEdge> edges;
  for (std::size_t t = 0; t < ledger.size(); ++t) {
    const auto& tx = ledger.transaction(t);
    if (tx.is_coinbase() || verdicts[t].is_coinjoin) continue;
    const auto source = partition.entity_of(ledger.input_ids(t).front());
    const auto outs = ledger.output_ids(t);
    for (std::size_t k = 0; k < outs.size(); ++k) {
      const auto target = partition.entity_of(outs[k]);
      const auto value = tx.outputs[k].value;
      g.flows_.push_back(Flow{static_cast<std::uint32_t>(t), source, target, outs[k], value});
      auto [it, fresh] = edges.try_emplace({source, target});
      auto& e = it->second;
      if (fresh) {
        e = EntityEdge{source, target, 0, 0, tx.timestamp, tx.timestamp};
      }
      e.total_value += value;
      e.first_ts = std::min(e.first_ts, tx.timestamp);
      e.last_ts = std::max(e.last_ts, tx.timestamp);
    }
    // tx_count counts transactions, not legs
    std::set<EntityId> targets;
    for (const auto a : outs) targets.insert(partition.entity_of(a));
    for (const auto target : targets) ++edges[{source, target}].tx_count;
  }
  g.edges_.reserve(edges.size());
  for (auto& [key, e] : edges) g.edges_.push_back(e);

  g.meta_.resize(ledger.address_count());
  for (const auto e : partition.entities()) {
    auto& m = g.meta_[e.value];
    m.id = e;
    m.address_count = partition.member_count(e);
  }
  for (const auto& tag : tags) {
    const auto e = partition.find_entity(tag.address);
    if (!e) continue;
    auto& m = g.meta_[e->value];
    m.tags.insert(tag.category);
    if (tag.is_service || tag.category == TagCategory::exchange || tag.category == TagCategory::service) {
      m.service_tagged = true;
    }
  }
  for (const auto e : partition.entities()) {
    auto& m = g.meta_[e.value];
    m.is_service_like = m.service_tagged || m.address_count > options.service_size_threshold;
  }
  return g;
}

const EntityMeta& EntityGraph::meta(EntityId entity) const {
  if (!partition_ || !partition_->is_entity(entity)) {
    throw NotFound("unknown entity id " + std::to_string(entity.value));
  }
  return meta_[entity.value];
}

std::vector<std::pair<EntityId, EntityEdge>> EntityGraph::out_neighbors(EntityId entity, unsigned max_hops,
                                                                        bool include_self) const {
  meta(entity);  // validates
  std::vector<std::pair<EntityId, EntityEdge>> out;
  std::set<EntityId> seen{entity};
  std::deque<std::pair<EntityId, unsigned>> queue{{entity, 0}};
  while (!queue.empty()) {
    const auto [node, depth] = queue.front();
    queue.pop_front();
    if (depth >= max_hops) continue;
    auto it = std::lower_bound(edges_.begin(), edges_.end(), node,
                               [](const EntityEdge& e, EntityId key) { return e.source < key; });
    for (; it != edges_.end() && it->source == node; ++it) {
      if (it->is_self_edge()) {
        if (include_self && node == entity && depth == 0) out.emplace_back(node, *it);
        continue;
      }
      if (seen.insert(it->target).second) {
        out.emplace_back(it->target, *it);
        queue.emplace_back(it->target, depth + 1);
      }
    }
  }
  return out;
}

Inflow EntityGraph::inflow(const std::set<EntityId>& entities, bool exclude_service) const {
  Inflow result;
  if (entities.empty()) return result;
  const auto& ledger = partition_->ledger();
  for (const auto& f : flows_) {
    if (f.source == f.target || !entities.contains(f.target)) continue;
    if (exclude_service && meta_[f.target.value].is_service_like) continue;
    result.total += f.value;
    if (result.payments.empty() || result.payments.back().tx_index != f.tx_index) {
      result.payments.push_back({f.tx_index, ledger.transaction(f.tx_index).timestamp, 0});
    }
    result.payments.back().value += f.value;
  }
  return result;
}

void EntityGraph::write_dump(std::ostream& out) const {
  out << "source,target,total_value,tx_count,first_ts,last_ts\n";
  for (const auto& e : edges_) {
    out << csv::escape(partition_->representative(e.source)) << ','
        << csv::escape(partition_->representative(e.target)) << ',' << e.total_value << ',' << e.tx_count
        << ',' << e.first_ts << ',' << e.last_ts << '\n';
  }
}

}  // namespace caselink
