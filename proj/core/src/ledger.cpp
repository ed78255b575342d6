#include "caselink/ledger.hpp"

#include <algorithm>

#include "caselink/errors.hpp"

namespace caselink {

namespace {

void validate(const Transaction& tx, std::size_t index) {
  const auto where = index + 1;
  if (tx.tx_id.empty()) throw ParseError(where, "empty tx_id");
  if (tx.inputs.empty()) throw ParseError(where, "transaction " + tx.tx_id + " has no inputs");
  if (tx.outputs.empty()) throw ParseError(where, "transaction " + tx.tx_id + " has no outputs");
  for (const auto* side : {&tx.inputs, &tx.outputs}) {
    for (const auto& leg : *side) {
      if (leg.value <= 0) throw ParseError(where, "non-positive value in transaction " + tx.tx_id);
      if (leg.address.empty()) throw ParseError(where, "empty address in transaction " + tx.tx_id);
    }
  }
}

}  // namespace

Ledger::Ledger(std::vector<Transaction> transactions) : txs_(std::move(transactions)) {
  tx_lookup_.reserve(txs_.size());
  for (std::size_t i = 0; i < txs_.size(); ++i) {
    validate(txs_[i], i);
    tx_lookup_.push_back(static_cast<std::uint32_t>(i));
  }
  std::stable_sort(tx_lookup_.begin(), tx_lookup_.end(),
                   [this](auto a, auto b) { return txs_[a].tx_id < txs_[b].tx_id; });
  for (std::size_t i = 1; i < tx_lookup_.size(); ++i) {
    if (txs_[tx_lookup_[i]].tx_id == txs_[tx_lookup_[i - 1]].tx_id) {
      throw ParseError(tx_lookup_[i] + 1, "duplicate tx_id " + txs_[tx_lookup_[i]].tx_id);
    }
  }

  for (const auto& tx : txs_) {
    if (!tx.is_coinbase()) {
      for (const auto& leg : tx.inputs) addresses_.push_back(leg.address);
    }
    for (const auto& leg : tx.outputs) addresses_.push_back(leg.address);
  }
  std::sort(addresses_.begin(), addresses_.end());
  addresses_.erase(std::unique(addresses_.begin(), addresses_.end()), addresses_.end());

  auto intern = [this](const std::string& a) {
    const auto it = std::lower_bound(addresses_.begin(), addresses_.end(), a);
    return AddressId{static_cast<std::uint32_t>(it - addresses_.begin())};
  };

  in_offsets_.reserve(txs_.size() + 1);
  out_offsets_.reserve(txs_.size() + 1);
  in_offsets_.push_back(0);
  out_offsets_.push_back(0);
  std::vector<std::uint32_t> mention_count(addresses_.size(), 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> mentions;  // (address, tx)
  for (std::size_t t = 0; t < txs_.size(); ++t) {
    const auto& tx = txs_[t];
    if (!tx.is_coinbase()) {
      for (const auto& leg : tx.inputs) in_ids_.push_back(intern(leg.address));
    }
    for (const auto& leg : tx.outputs) out_ids_.push_back(intern(leg.address));
    const auto in_begin = in_offsets_.back();
    const auto out_begin = out_offsets_.back();
    in_offsets_.push_back(static_cast<std::uint32_t>(in_ids_.size()));
    out_offsets_.push_back(static_cast<std::uint32_t>(out_ids_.size()));
    for (auto i = in_begin; i < in_offsets_.back(); ++i) mentions.emplace_back(in_ids_[i].value, t);
    for (auto i = out_begin; i < out_offsets_.back(); ++i) mentions.emplace_back(out_ids_[i].value, t);
  }
  std::sort(mentions.begin(), mentions.end());
  mentions.erase(std::unique(mentions.begin(), mentions.end()), mentions.end());
  addr_tx_offsets_.assign(addresses_.size() + 1, 0);
  for (const auto& [a, t] : mentions) ++addr_tx_offsets_[a + 1];
  for (std::size_t a = 0; a < addresses_.size(); ++a) addr_tx_offsets_[a + 1] += addr_tx_offsets_[a];
  addr_txs_.reserve(mentions.size());
  for (const auto& [a, t] : mentions) addr_txs_.push_back(t);
}

std::optional<std::size_t> Ledger::find_transaction(std::string_view tx_id) const {
  const auto it = std::lower_bound(
      tx_lookup_.begin(), tx_lookup_.end(), tx_id,
      [this](std::uint32_t e, std::string_view key) { return txs_[e].tx_id < key; });
  if (it == tx_lookup_.end() || txs_[*it].tx_id != tx_id) return std::nullopt;
  return *it;
}

std::optional<AddressId> Ledger::find_address(std::string_view address) const {
  const auto it = std::lower_bound(addresses_.begin(), addresses_.end(), address);
  if (it == addresses_.end() || *it != address) return std::nullopt;
  return AddressId{static_cast<std::uint32_t>(it - addresses_.begin())};
}

std::span<const std::uint32_t> Ledger::transactions_of(AddressId id) const {
  if (id.value >= addresses_.size()) throw NotFound("address id out of range");
  return std::span(addr_txs_).subspan(addr_tx_offsets_[id.value],
                                      addr_tx_offsets_[id.value + 1] - addr_tx_offsets_[id.value]);
}

std::span<const AddressId> Ledger::input_ids(std::size_t tx) const {
  return std::span(in_ids_).subspan(in_offsets_.at(tx), in_offsets_.at(tx + 1) - in_offsets_[tx]);
}

std::span<const AddressId> Ledger::output_ids(std::size_t tx) const {
  return std::span(out_ids_).subspan(out_offsets_.at(tx), out_offsets_.at(tx + 1) - out_offsets_[tx]);
}

}  // namespace caselink
