#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caselink/types.hpp"

namespace caselink {

/// Dense id of an interned address. Ids follow lexicographic address order, so
/// comparing ids compares the address strings.
struct AddressId {
  std::uint32_t value = 0;
  friend auto operator<=>(AddressId, AddressId) = default;
};

/// Immutable transaction store with an address index. Built once by a single
/// writer, then safe for any number of concurrent readers.
///
/// The synthetic coinbase input is not interned.
class Ledger {
 public:
  Ledger() = default;
  /// Throws ParseError on a duplicate tx_id, an empty side or a non-positive value.
  explicit Ledger(std::vector<Transaction> transactions);

  std::span<const Transaction> transactions() const noexcept { return txs_; }
  const Transaction& transaction(std::size_t index) const { return txs_.at(index); }
  std::size_t size() const noexcept { return txs_.size(); }
  bool empty() const noexcept { return txs_.empty(); }

  std::optional<std::size_t> find_transaction(std::string_view tx_id) const;

  std::size_t address_count() const noexcept { return addresses_.size(); }
  std::optional<AddressId> find_address(std::string_view address) const;
  const std::string& address(AddressId id) const { return addresses_.at(id.value); }
  std::span<const std::string> addresses() const noexcept { return addresses_; }

  /// Indices of transactions mentioning the address on either side, ascending.
  std::span<const std::uint32_t> transactions_of(AddressId id) const;
  bool mentions(std::string_view address) const { return find_address(address).has_value(); }

  /// Interned input / output addresses of a transaction, in leg order.
  std::span<const AddressId> input_ids(std::size_t tx) const;
  std::span<const AddressId> output_ids(std::size_t tx) const;

 private:
  std::vector<Transaction> txs_;
  std::vector<std::string> addresses_;
  std::vector<std::uint32_t> tx_lookup_;  // tx indices sorted by tx_id

  // CSR layouts
  std::vector<std::uint32_t> addr_tx_offsets_;
  std::vector<std::uint32_t> addr_txs_;
  std::vector<std::uint32_t> in_offsets_;
  std::vector<AddressId> in_ids_;
  std::vector<std::uint32_t> out_offsets_;
  std::vector<AddressId> out_ids_;
};

}  // namespace caselink
