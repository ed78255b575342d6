#pragma once

#include <cstdint>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "caselink/coinjoin.hpp"
#include "caselink/entity_partition.hpp"
#include "caselink/types.hpp"

namespace caselink {

struct EntityEdge {
  EntityId source;
  EntityId target;
  Satoshi total_value = 0;
  std::uint32_t tx_count = 0;
  Timestamp first_ts = 0;
  Timestamp last_ts = 0;

  bool is_self_edge() const noexcept { return source == target; }
  friend bool operator==(const EntityEdge&, const EntityEdge&) = default;
};

struct EntityMeta {
  EntityId id;
  std::size_t address_count = 0;
  std::set<TagCategory> tags;
  bool service_tagged = false;
  bool is_service_like = false;
};

/// One output leg attributed from the spending entity to the receiving entity.
struct Flow {
  std::uint32_t tx_index = 0;
  EntityId source;
  EntityId target;
  AddressId address;
  Satoshi value = 0;
};

struct GraphOptions {
  /// Entities with more addresses than this are treated as services.
  std::size_t service_size_threshold = 10'000;
};

struct InflowPayment {
  std::uint32_t tx_index = 0;
  Timestamp timestamp = 0;
  Satoshi value = 0;
};

struct Inflow {
  Satoshi total = 0;
  std::vector<InflowPayment> payments;  // one per transaction, ledger order
};

/// Directed value-flow graph over entities.
///
/// Coinbase and CoinJoin-flagged transactions contribute no edges; fees are not
/// attributed. Self-edges (change) are stored but ignored by neighbour and
/// inflow queries unless asked for.
class EntityGraph {
 public:
  EntityGraph() = default;

  static EntityGraph build(const EntityPartition& partition, std::span<const CoinJoinVerdict> verdicts,
                           std::span<const AttributionTag> tags, GraphOptions options = {});

  const EntityPartition& partition() const { return *partition_; }
  const GraphOptions& options() const noexcept { return options_; }

  /// Sorted by (source, target).
  std::span<const EntityEdge> edges() const noexcept { return edges_; }
  std::span<const Flow> flows() const noexcept { return flows_; }

  /// Throws NotFound for ids that are not entities of the partition.
  const EntityMeta& meta(EntityId entity) const;
  bool is_service_like(EntityId entity) const { return meta(entity).is_service_like; }

  /// Entities reachable in at most `max_hops` outgoing steps, each paired with
  /// the edge that first reached it.
  std::vector<std::pair<EntityId, EntityEdge>> out_neighbors(EntityId entity, unsigned max_hops = 1,
                                                             bool include_self = false) const;

  /// Value paid into `entities` from outside themselves (self-edges excluded).
  /// With `exclude_service`, payments whose receiving entity is service-like are dropped.
  Inflow inflow(const std::set<EntityId>& entities, bool exclude_service) const;

  /// CSV source,target,total_value,tx_count,first_ts,last_ts (representatives).
  void write_dump(std::ostream& out) const;

 private:
  const EntityPartition* partition_ = nullptr;
  GraphOptions options_;
  std::vector<EntityEdge> edges_;
  std::vector<Flow> flows_;
  std::vector<EntityMeta> meta_;  // indexed by entity id; entries for non-entities unused
};

}  // namespace caselink
