#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caselink/coinjoin.hpp"
#include "caselink/ledger.hpp"

namespace caselink {

/// An entity is named by its representative: the lexicographically smallest
/// member address. Because address ids follow lexicographic order, the id of
/// an entity is the id of that member.
struct EntityId {
  std::uint32_t value = 0;
  friend auto operator<=>(EntityId, EntityId) = default;
};

/// Address-to-entity partition from the multi-input heuristic: all input
/// addresses of a non-CoinJoin, non-coinbase transaction share an entity.
///
/// Holds a non-owning reference to the ledger it was built from.
class EntityPartition {
 public:
  EntityPartition() = default;

  /// `verdicts` must be index-aligned with the ledger. Edge extraction runs on
  /// `threads` workers; unions are applied by one writer in transaction order.
  static EntityPartition build(const Ledger& ledger, std::span<const CoinJoinVerdict> verdicts,
                               unsigned threads = 1);

  const Ledger& ledger() const { return *ledger_; }
  std::size_t address_count() const noexcept { return entity_of_.size(); }
  std::size_t entity_count() const noexcept { return entities_.size(); }
  /// All entities in ascending id (= representative) order.
  std::span<const EntityId> entities() const noexcept { return entities_; }

  EntityId entity_of(AddressId address) const { return entity_of_.at(address.value); }
  std::optional<EntityId> find_entity(std::string_view address) const;
  bool is_entity(EntityId id) const noexcept;

  const std::string& representative(EntityId entity) const;
  /// Representative of the address's entity, or the address itself when the
  /// ledger never mentions it (a singleton entity).
  std::string representative_of(std::string_view address) const;

  std::size_t member_count(EntityId entity) const;
  std::span<const AddressId> members(EntityId entity) const;

  /// CSV `address,entity_representative` sorted by address, with header.
  void write_dump(std::ostream& out) const;

 private:
  const Ledger* ledger_ = nullptr;
  std::vector<EntityId> entity_of_;
  std::vector<EntityId> entities_;
  std::vector<std::uint32_t> member_offsets_;  // indexed by address id of representative
  std::vector<AddressId> members_;
};

struct ExpansionResult {
  std::set<std::string> seed_addresses;
  std::set<std::string> expanded_addresses;
  /// Representatives of the touched entities.
  std::set<std::string> entities;
  /// Seeds the ledger never mentions; each forms its own singleton entity.
  std::set<std::string> unknown_seeds;
};

ExpansionResult expand(const std::set<std::string>& seeds, const EntityPartition& partition);

}  // namespace caselink
