#include "caselink/case_link.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "caselink/disjoint_set.hpp"
#include "caselink/errors.hpp"

namespace caselink {

std::string_view to_string(LinkLevel level) noexcept {
  switch (level) {
    case LinkLevel::address: return "address";
    case LinkLevel::entity: return "entity";
    case LinkLevel::collector: return "collector";
  }
  return "address";
}

LinkLevel parse_link_level(std::string_view name) {
  if (name == "address") return LinkLevel::address;
  if (name == "entity") return LinkLevel::entity;
  if (name == "collector") return LinkLevel::collector;
  throw InvalidArgument("unknown link level '" + std::string(name) + "'");
}

std::string Evidence::to_string() const {
  switch (kind) {
    case EvidenceKind::address: return "address:" + key;
    case EvidenceKind::entity: return "entity:" + key;
    case EvidenceKind::collector: return "collector:" + key;
  }
  return key;
}

std::size_t CaseClustering::case_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.size();
  return n;
}

std::size_t CaseClustering::singleton_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(clusters.begin(), clusters.end(), [](const auto& c) { return c.size() == 1; }));
}

std::optional<std::size_t> CaseClustering::cluster_of(std::string_view case_id) const {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& ids = clusters[i].case_ids;
    if (std::binary_search(ids.begin(), ids.end(), case_id)) return i;
  }
  return std::nullopt;
}

CaseLinker::CaseLinker(std::vector<CaseRecord> cases, const EntityPartition* partition,
                       const EntityGraph* graph, LinkOptions options)
    : cases_(std::move(cases)),
      partition_(partition ? partition : (graph ? &graph->partition() : nullptr)),
      graph_(graph),
      options_(options) {
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    const auto id = cases_[i].case_id.to_string();
    if (!index_.emplace(id, i).second) throw InvalidArgument("duplicate case id " + id);
  }

  evidence_.resize(cases_.size());
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    auto& ev = evidence_[i];
    std::set<Evidence> addr, entity;
    std::set<EntityId> perp_entities;
    for (const auto& a : cases_[i].perpetrator_addresses()) {
      addr.insert({EvidenceKind::address, a});
      const auto e = partition_ ? partition_->find_entity(a) : std::nullopt;
      if (!e) {
        entity.insert({EvidenceKind::entity, a});
        continue;
      }
      if (graph_ && graph_->is_service_like(*e)) {
        ev.touches_service = true;
        continue;
      }
      entity.insert({EvidenceKind::entity, partition_->representative(*e)});
      perp_entities.insert(*e);
    }
    ev.perpetrator_entities.assign(perp_entities.begin(), perp_entities.end());
    ev.by_level[0].assign(addr.begin(), addr.end());
    entity.insert(addr.begin(), addr.end());
    ev.by_level[1].assign(entity.begin(), entity.end());
  }

  // Collector candidates: non-service one-hop out-neighbours of perpetrator entities.
  std::map<EntityId, std::set<EntityId>> sources;
  std::map<EntityId, std::vector<EntityId>> targets_of;
  if (graph_) {
    std::set<EntityId> all_perp;
    for (const auto& ev : evidence_) all_perp.insert(ev.perpetrator_entities.begin(), ev.perpetrator_entities.end());
    for (const auto p : all_perp) {
      for (const auto& [target, edge] : graph_->out_neighbors(p, 1)) {
        if (graph_->is_service_like(target)) continue;
        sources[target].insert(p);
        targets_of[p].push_back(target);
      }
    }
  }
  std::set<EntityId> qualified;
  for (const auto& [c, srcs] : sources) {
    if (srcs.size() >= std::max(1u, options_.min_collector_sources)) {
      qualified.insert(c);
      collectors_.push_back({c, std::vector<EntityId>(srcs.begin(), srcs.end())});
    }
  }
  for (auto& ev : evidence_) {
    std::set<Evidence> all(ev.by_level[1].begin(), ev.by_level[1].end());
    for (const auto p : ev.perpetrator_entities) {
      const auto it = targets_of.find(p);
      if (it == targets_of.end()) continue;
      for (const auto c : it->second) {
        if (qualified.contains(c)) all.insert({EvidenceKind::collector, partition_->representative(c)});
      }
    }
    ev.by_level[2].assign(all.begin(), all.end());
  }
}

std::optional<std::size_t> CaseLinker::index_of(std::string_view case_id) const {
  const auto it = index_.find(case_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Evidence> CaseLinker::evidence(std::size_t case_index, LinkLevel level) const {
  return evidence_.at(case_index).by_level[static_cast<int>(level)];
}

CaseClustering CaseLinker::link(LinkLevel level) const {
  const auto lvl = static_cast<int>(level);
  const auto n = static_cast<std::uint32_t>(cases_.size());
  DisjointSet sets(n);
  std::map<Evidence, std::vector<std::uint32_t>> holders;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& e : evidence_[i].by_level[lvl]) {
      auto& h = holders[e];
      if (!h.empty()) sets.unite(h.front(), i);
      h.push_back(i);
    }
  }

  std::map<std::uint32_t, std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(i);

  std::map<std::uint32_t, std::set<Evidence>> shared;
  for (const auto& [e, h] : holders) {
    if (h.size() >= 2) shared[sets.find(h.front())].insert(e);
  }

  CaseClustering out;
  out.level = level;
  for (auto& [root, members] : groups) {
    CaseCluster c;
    std::set<EntityId> entities;
    std::set<AddressId> addresses;
    for (const auto m : members) {
      c.case_ids.push_back(cases_[m].case_id.to_string());
      const auto& ev = evidence_[m];
      entities.insert(ev.perpetrator_entities.begin(), ev.perpetrator_entities.end());
      if (level == LinkLevel::address && partition_) {
        for (const auto& a : cases_[m].perpetrator_addresses()) {
          if (const auto id = partition_->ledger().find_address(a)) addresses.insert(*id);
        }
      }
      c.contains_service_evidence = c.contains_service_evidence || ev.touches_service;
    }
    std::sort(c.case_ids.begin(), c.case_ids.end());
    if (const auto it = shared.find(root); it != shared.end()) {
      c.shared_evidence.assign(it->second.begin(), it->second.end());
    }
    if (graph_ && level == LinkLevel::address) {
      for (const auto& f : graph_->flows()) {
        if (f.source != f.target && addresses.contains(f.address) && entities.contains(f.target)) c.inflow += f.value;
      }
    } else if (graph_) {
      c.inflow = graph_->inflow(entities, true).total;
    }
    out.clusters.push_back(std::move(c));
  }
  std::sort(out.clusters.begin(), out.clusters.end(), [](const CaseCluster& a, const CaseCluster& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.case_ids.front() < b.case_ids.front();
  });
  return out;
}

CaseNetwork CaseLinker::network(const CaseClustering& clustering) const {
  CaseNetwork net;
  net.level = clustering.level;

  std::vector<std::size_t> shown;
  for (const auto& cluster : clustering.clusters) {
    for (const auto& id : cluster.case_ids) {
      const auto it = index_.find(id);
      if (it == index_.end()) throw NotFound("case " + id + " is not known to the linker");
      shown.push_back(it->second);
    }
  }
  std::sort(shown.begin(), shown.end(), [&](auto a, auto b) {
    return cases_[a].case_id.to_string() < cases_[b].case_id.to_string();
  });

  std::set<std::string> addresses;
  std::set<std::pair<std::string, std::string>> annotation_edges;
  for (const auto i : shown) {
    const auto id = cases_[i].case_id.to_string();
    net.nodes.push_back({"case:" + id, NodeType::case_node, id});
    for (const auto& a : cases_[i].perpetrator_addresses()) {
      addresses.insert(a);
      annotation_edges.emplace("case:" + id, "address:" + a);
    }
  }
  for (const auto& a : addresses) net.nodes.push_back({"address:" + a, NodeType::address, a});
  for (const auto& [s, d] : annotation_edges) net.edges.push_back({s, d, EdgeKind::annotation});

  if (clustering.level == LinkLevel::address || !partition_) return net;

  // entity -> annotated addresses
  std::map<EntityId, std::set<std::string>> entity_addresses;
  for (const auto& a : addresses) {
    const auto e = partition_->find_entity(a);
    if (!e || (graph_ && graph_->is_service_like(*e))) continue;
    entity_addresses[*e].insert(a);
  }
  std::set<EntityId> entity_nodes;
  for (const auto& [e, addrs] : entity_addresses) {
    if (addrs.size() >= 2) entity_nodes.insert(e);
  }

  std::vector<std::pair<EntityId, std::vector<EntityId>>> collector_nodes;
  if (clustering.level == LinkLevel::collector) {
    for (const auto& info : collectors_) {
      std::vector<EntityId> srcs;
      for (const auto s : info.sources) {
        if (entity_addresses.contains(s)) srcs.push_back(s);
      }
      if (srcs.size() >= 2) {
        entity_nodes.insert(srcs.begin(), srcs.end());
        collector_nodes.emplace_back(info.collector, std::move(srcs));
      }
    }
  }

  for (const auto e : entity_nodes) {
    const auto& rep = partition_->representative(e);
    net.nodes.push_back({"entity:" + rep, NodeType::entity, rep});
    for (const auto& a : entity_addresses[e]) net.edges.push_back({"address:" + a, "entity:" + rep, EdgeKind::membership});
  }
  for (const auto& [c, srcs] : collector_nodes) {
    const auto& rep = partition_->representative(c);
    net.nodes.push_back({"collector:" + rep, NodeType::collector, rep});
    for (const auto s : srcs) {
      net.edges.push_back({"entity:" + partition_->representative(s), "collector:" + rep, EdgeKind::flow});
    }
  }
  return net;
}

CaseClustering link_by_address(std::span<const CaseRecord> cases) {
  return CaseLinker({cases.begin(), cases.end()}).link(LinkLevel::address);
}

CaseClustering link_by_entity(std::span<const CaseRecord> cases, const EntityPartition& partition,
                              const EntityGraph* graph) {
  return CaseLinker({cases.begin(), cases.end()}, &partition, graph).link(LinkLevel::entity);
}

CaseClustering link_by_collector(std::span<const CaseRecord> cases, const EntityGraph& graph,
                                 LinkOptions options) {
  return CaseLinker({cases.begin(), cases.end()}, &graph.partition(), &graph, options)
      .link(LinkLevel::collector);
}

double linkage_rate(std::size_t total_cases, std::size_t singleton_cases) noexcept {
  if (total_cases == 0) return 0.0;
  return static_cast<double>(total_cases - singleton_cases) / static_cast<double>(total_cases);
}

double linkage_rate(const CaseClustering& clustering) noexcept {
  return linkage_rate(clustering.case_count(), clustering.singleton_count());
}

std::vector<BreakdownRow> cluster_breakdown(const CaseClustering& clustering) {
  std::map<std::size_t, BreakdownRow> rows;
  for (const auto& c : clustering.clusters) {
    auto& r = rows[c.size()];
    r.cluster_size = c.size();
    ++r.cluster_count;
    r.inflow += c.inflow;
    r.service_flag = r.service_flag || c.contains_service_evidence;
  }
  std::vector<BreakdownRow> out;
  for (auto& [size, r] : rows) out.push_back(r);
  return out;
}

}  // namespace caselink
