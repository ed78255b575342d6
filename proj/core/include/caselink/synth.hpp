#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "caselink/types.hpp"

namespace caselink::synth {

enum class ValueModel {
  sextortion_like,  // log-normal, capped below 1000 EUR
  fraud_like,       // log-normal with mode near 2000 EUR and ~1% above 100k EUR
  mixed,            // even campaigns sextortion_like, odd campaigns fraud_like
};

std::string_view to_string(ValueModel m) noexcept;
ValueModel parse_value_model(std::string_view name);

/// Per-campaign override of the global reuse / co-spend draws.
struct CampaignProfile {
  std::uint32_t cases = 1;
  double address_reuse_prob = 0.0;
  bool cospend = true;
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::uint32_t n_campaigns = 1;
  std::uint32_t cases_per_campaign = 1;
  double address_reuse_prob = 0.0;
  /// Chance that a campaign wallet sweeps all its addresses in one
  /// multi-input transaction instead of forwarding address by address.
  double wallet_cospend_prob = 1.0;
  /// Campaigns sharing one collector address.
  std::uint32_t collector_fanin = 1;
  ValueModel payment_value_model = ValueModel::sextortion_like;
  /// Chance that a case's perpetrator address is an exchange deposit address.
  double custodial_reuse_prob = 0.0;
  /// Chance per case of a CoinJoin involving its perpetrator address.
  double coinjoin_noise_prob = 0.0;
  /// When non-empty, replaces n_campaigns / cases_per_campaign and the
  /// per-campaign reuse and co-spend draws.
  std::vector<CampaignProfile> campaign_profiles;
  /// Collector -> laundering address hops (0-2).
  std::uint32_t laundering_hops = 0;
  Timestamp start_timestamp = 1'609'459'200;  // 2021-01-01
  std::uint32_t span_days = 900;
  std::string zone_id = "zone-by";

  /// Throws InvalidArgument.
  void validate() const;
};

/// Reads a flat key=value spec; unknown keys are errors.
ScenarioSpec parse_scenario_spec(std::istream& in);

struct TrueCollector {
  std::string address;
  std::set<std::string> source_wallets;
};

struct GroundTruth {
  std::map<std::string, std::string> address_wallet;
  std::map<std::string, std::uint32_t> case_campaign;
  std::vector<TrueCollector> collectors;
  /// Addresses that only occur in injected CoinJoin noise.
  std::set<std::string> noise_addresses;
};

struct Scenario {
  std::vector<Transaction> transactions;
  std::vector<AttributionTag> tags;
  std::vector<FxRate> rates;
  std::vector<CaseRecord> cases;
  GroundTruth truth;
};

inline constexpr std::string_view kRngName = "mt19937_64";

/// Deterministic for a fixed spec. Noise is drawn from its own stream, so a
/// noisy scenario is the noise-free one plus extra transactions.
Scenario generate(const ScenarioSpec& spec);

/// Writes transactions.jsonl, tags.csv, rates.csv, cases.csv,
/// ground_truth.json and meta.json into `dir` (created if missing).
void write_scenario(const Scenario& scenario, const ScenarioSpec& spec, const std::filesystem::path& dir);

}  // namespace caselink::synth
