#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caselink/entity_graph.hpp"
#include "caselink/entity_partition.hpp"
#include "caselink/types.hpp"

namespace caselink {

enum class LinkLevel { address, entity, collector };

std::string_view to_string(LinkLevel level) noexcept;
LinkLevel parse_link_level(std::string_view name);

struct LinkOptions {
  /// A collector links cases only once this many distinct perpetrator
  /// entities forward to it.
  unsigned min_collector_sources = 1;
};

enum class EvidenceKind { address, entity, collector };

/// A piece of linking evidence held by a case. Keys are address strings or
/// entity representatives.
struct Evidence {
  EvidenceKind kind = EvidenceKind::address;
  std::string key;

  std::string to_string() const;
  friend auto operator<=>(const Evidence&, const Evidence&) = default;
};

struct CaseCluster {
  std::vector<std::string> case_ids;  // ascending
  /// Evidence held by at least two member cases.
  std::vector<Evidence> shared_evidence;
  /// Payments into the members' non-service perpetrator entities; at address
  /// level only those received by the members' own perpetrator addresses.
  Satoshi inflow = 0;
  /// Some member's perpetrator address sits in a service-like entity.
  bool contains_service_evidence = false;

  std::size_t size() const noexcept { return case_ids.size(); }
};

/// Clusters are ordered by size descending, then smallest case id.
struct CaseClustering {
  LinkLevel level = LinkLevel::address;
  std::vector<CaseCluster> clusters;

  std::size_t case_count() const noexcept;
  std::size_t singleton_count() const noexcept;
  std::optional<std::size_t> cluster_of(std::string_view case_id) const;
};

struct CollectorInfo {
  EntityId collector;
  std::vector<EntityId> sources;  // distinct perpetrator entities, ascending
};

enum class NodeType { case_node, address, entity, collector };
enum class EdgeKind { annotation, membership, flow };

struct NetworkNode {
  std::string id;
  NodeType type = NodeType::case_node;
  std::string label;
};

struct NetworkEdge {
  std::string src;
  std::string dst;
  EdgeKind kind = EdgeKind::annotation;
};

/// Case network as drawn for investigators: cases, their perpetrator
/// addresses, entities that join several annotated addresses and collector
/// entities fed by several perpetrator entities.
struct CaseNetwork {
  LinkLevel level = LinkLevel::address;
  std::vector<NetworkNode> nodes;
  std::vector<NetworkEdge> edges;
};

/// Groups cases into case clusters. Only perpetrator addresses are evidence;
/// victim annotations never link cases.
///
/// Evidence is cumulative across levels, so every level coarsens the one
/// before it:
///   address   - the perpetrator addresses themselves
///   entity    - plus the entity of each address, unless it is service-like
///   collector - plus every non-service one-hop out-neighbour of a
///               perpetrator entity fed by >= min_collector_sources entities
///
/// Without a partition each address is its own entity; without a graph no
/// entity is service-like and there are no collectors. The referenced
/// partition and graph must outlive the linker.
class CaseLinker {
 public:
  explicit CaseLinker(std::vector<CaseRecord> cases, const EntityPartition* partition = nullptr,
                      const EntityGraph* graph = nullptr, LinkOptions options = {});

  std::span<const CaseRecord> cases() const noexcept { return cases_; }
  std::optional<std::size_t> index_of(std::string_view case_id) const;
  std::span<const Evidence> evidence(std::size_t case_index, LinkLevel level) const;
  std::span<const CollectorInfo> collectors() const noexcept { return collectors_; }

  CaseClustering link(LinkLevel level) const;
  CaseNetwork network(const CaseClustering& clustering) const;

 private:
  struct CaseEvidence {
    std::vector<Evidence> by_level[3];
    std::vector<EntityId> perpetrator_entities;  // known, non-service
    bool touches_service = false;
  };

  std::vector<CaseRecord> cases_;
  std::map<std::string, std::size_t, std::less<>> index_;
  const EntityPartition* partition_;
  const EntityGraph* graph_;
  LinkOptions options_;
  std::vector<CaseEvidence> evidence_;
  std::vector<CollectorInfo> collectors_;
};

CaseClustering link_by_address(std::span<const CaseRecord> cases);
CaseClustering link_by_entity(std::span<const CaseRecord> cases, const EntityPartition& partition,
                              const EntityGraph* graph = nullptr);
CaseClustering link_by_collector(std::span<const CaseRecord> cases, const EntityGraph& graph,
                                 LinkOptions options = {});

/// (total - singletons) / total; 0 for an empty clustering.
double linkage_rate(std::size_t total_cases, std::size_t singleton_cases) noexcept;
double linkage_rate(const CaseClustering& clustering) noexcept;

struct BreakdownRow {
  std::size_t cluster_size = 0;
  std::size_t cluster_count = 0;
  Satoshi inflow = 0;
  bool service_flag = false;
};

/// Histogram over cluster sizes, ascending.
std::vector<BreakdownRow> cluster_breakdown(const CaseClustering& clustering);

enum class NetworkFormat { dot, json };

NetworkFormat parse_network_format(std::string_view name);
std::string_view to_string(NodeType type) noexcept;
std::string_view to_string(EdgeKind kind) noexcept;
std::string_view fill_color(NodeType type) noexcept;

std::string export_network(const CaseNetwork& network, NetworkFormat format);

}  // namespace caselink
