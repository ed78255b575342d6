#include "caselink/coinjoin.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "caselink/errors.hpp"
#include "caselink/keyvalue.hpp"
#include "parallel.hpp"

namespace caselink {

CoinJoinPolicy load_coinjoin_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open coinjoin policy file " + path.string());
  const auto kv = parse_key_values(in);
  CoinJoinPolicy policy;
  for (const auto& [key, value] : kv) {
    if (key == "enabled") {
      policy.enabled = parse_bool_value(value);
    } else if (key == "min_multiplicity") {
      policy.min_multiplicity = static_cast<std::uint32_t>(parse_uint_value(value));
      if (policy.min_multiplicity < 2) throw InvalidArgument("min_multiplicity must be >= 2");
    } else if (key == "min_value") {
      policy.min_value = static_cast<Satoshi>(parse_uint_value(value));
    } else {
      throw InvalidArgument("unknown coinjoin policy key '" + key + "'");
    }
  }
  return policy;
}

CoinJoinPolicy parse_coinjoin_policy(std::string_view flag) {
  if (flag == "default") return {};
  if (flag == "off") return CoinJoinPolicy{.enabled = false};
  constexpr std::string_view prefix = "custom:";
  if (flag.starts_with(prefix)) return load_coinjoin_policy(std::string(flag.substr(prefix.size())));
  throw InvalidArgument("coinjoin policy must be default, off or custom:<path>");
}

CoinJoinVerdict classify(const Transaction& tx, const CoinJoinPolicy& policy) {
  CoinJoinVerdict verdict{tx.tx_id, false, std::nullopt, std::nullopt};
  if (!policy.enabled || tx.is_coinbase() || tx.inputs.size() < 2) return verdict;

  std::set<std::string_view> senders;
  for (const auto& leg : tx.inputs) senders.insert(leg.address);
  if (senders.size() < 2) return verdict;

  std::map<Satoshi, std::uint32_t> multiplicity;
  for (const auto& leg : tx.outputs) {
    if (leg.value >= policy.min_value) ++multiplicity[leg.value];
  }
  Satoshi best_value = 0;
  std::uint32_t best_count = 0;
  for (const auto& [value, count] : multiplicity) {
    if (count >= best_count) {  // ascending keys: ties resolve to the larger value
      best_value = value;
      best_count = count;
    }
  }
  const auto threshold = std::max<std::uint32_t>(2, policy.min_multiplicity);
  if (best_count < threshold || senders.size() < best_count || tx.outputs.size() < best_count) {
    return verdict;
  }
  verdict.is_coinjoin = true;
  verdict.matched_output_value = best_value;
  verdict.participant_estimate = best_count;
  return verdict;
}

std::vector<CoinJoinVerdict> classify_all(const Ledger& ledger, const CoinJoinPolicy& policy,
                                          unsigned threads) {
  const auto txs = ledger.transactions();
  std::vector<CoinJoinVerdict> verdicts(txs.size());
  const auto run = [&](std::size_t begin, std::size_t end) {
    for (auto i = begin; i < end; ++i) verdicts[i] = classify(txs[i], policy);
  };
  detail::parallel_chunks(txs.size(), threads, run);
  return verdicts;
}

}  // namespace caselink
