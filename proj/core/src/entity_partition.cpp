#include "caselink/entity_partition.hpp"

#include <algorithm>

#include "caselink/disjoint_set.hpp"
#include "caselink/errors.hpp"
#include "caselink/csv.hpp"
#include "parallel.hpp"

namespace caselink {

EntityPartition EntityPartition::build(const Ledger& ledger, std::span<const CoinJoinVerdict> verdicts,
                                       unsigned threads) {
  if (verdicts.size() != ledger.size()) {
    throw InvalidArgument("coinjoin verdicts do not cover the ledger");
  }
  const auto n_tx = ledger.size();
  const auto n_addr = static_cast<std::uint32_t>(ledger.address_count());

  // Edge extraction: link every input address to the first one.
  const auto chunks = detail::chunk_count(n_tx, threads);
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> edges(chunks);
  const auto chunk_size = detail::chunk_length(n_tx, threads);
  detail::parallel_chunks(n_tx, threads, [&](std::size_t begin, std::size_t end) {
    auto& out = edges[begin / chunk_size];
    for (auto t = begin; t < end; ++t) {
      if (verdicts[t].is_coinjoin || ledger.transaction(t).is_coinbase()) continue;
      const auto ins = ledger.input_ids(t);
      for (std::size_t i = 1; i < ins.size(); ++i) {
        if (ins[i] != ins[0]) out.emplace_back(ins[0].value, ins[i].value);
      }
    }
  });

  DisjointSet sets(n_addr);
  for (const auto& chunk : edges) {
    for (const auto& [a, b] : chunk) sets.unite(a, b);
  }

  EntityPartition p;
  p.ledger_ = &ledger;
  p.entity_of_.resize(n_addr);
  constexpr auto unset = UINT32_MAX;
  std::vector<std::uint32_t> root_rep(n_addr, unset);
  // ascending ids: first member seen is the smallest
  for (std::uint32_t a = 0; a < n_addr; ++a) {
    auto& rep = root_rep[sets.find(a)];
    if (rep == unset) {
      rep = a;
      p.entities_.push_back(EntityId{a});
    }
    p.entity_of_[a] = EntityId{rep};
  }
  p.member_offsets_.assign(n_addr + 1, 0);
  for (const auto e : p.entity_of_) ++p.member_offsets_[e.value + 1];
  for (std::uint32_t a = 0; a < n_addr; ++a) p.member_offsets_[a + 1] += p.member_offsets_[a];
  p.members_.resize(n_addr);
  auto cursor = p.member_offsets_;
  for (std::uint32_t a = 0; a < n_addr; ++a) p.members_[cursor[p.entity_of_[a].value]++] = AddressId{a};
  return p;
}

std::optional<EntityId> EntityPartition::find_entity(std::string_view address) const {
  if (!ledger_) return std::nullopt;
  const auto id = ledger_->find_address(address);
  if (!id) return std::nullopt;
  return entity_of_[id->value];
}

bool EntityPartition::is_entity(EntityId id) const noexcept {
  return id.value < entity_of_.size() && entity_of_[id.value] == id;
}

const std::string& EntityPartition::representative(EntityId entity) const {
  if (!is_entity(entity)) throw NotFound("unknown entity id " + std::to_string(entity.value));
  return ledger_->address(AddressId{entity.value});
}

std::string EntityPartition::representative_of(std::string_view address) const {
  const auto e = find_entity(address);
  return e ? representative(*e) : std::string(address);
}

std::size_t EntityPartition::member_count(EntityId entity) const {
  return members(entity).size();
}

std::span<const AddressId> EntityPartition::members(EntityId entity) const {
  if (!is_entity(entity)) throw NotFound("unknown entity id " + std::to_string(entity.value));
  const auto b = member_offsets_[entity.value];
  return std::span(members_).subspan(b, member_offsets_[entity.value + 1] - b);
}

void EntityPartition::write_dump(std::ostream& out) const {
  out << "address,entity_representative\n";
  for (std::uint32_t a = 0; a < entity_of_.size(); ++a) {
    out << csv::escape(ledger_->address(AddressId{a})) << ','
        << csv::escape(ledger_->address(AddressId{entity_of_[a].value})) << '\n';
  }
}

ExpansionResult expand(const std::set<std::string>& seeds, const EntityPartition& partition) {
  ExpansionResult r;
  r.seed_addresses = seeds;
  std::set<EntityId> touched;
  for (const auto& s : seeds) {
    if (const auto e = partition.find_entity(s)) {
      touched.insert(*e);
    } else {
      r.unknown_seeds.insert(s);
      r.expanded_addresses.insert(s);
      r.entities.insert(s);
    }
  }
  for (const auto e : touched) {
    r.entities.insert(partition.representative(e));
    for (const auto a : partition.members(e)) r.expanded_addresses.insert(partition.ledger().address(a));
  }
  return r;
}

}  // namespace caselink
