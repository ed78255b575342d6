#include "caselink/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "caselink/errors.hpp"
#include "caselink/ingest.hpp"
#include "caselink/keyvalue.hpp"

namespace caselink::synth {

std::string_view to_string(ValueModel m) noexcept {
  switch (m) {
    case ValueModel::sextortion_like: return "sextortion_like";
    case ValueModel::fraud_like: return "fraud_like";
    case ValueModel::mixed: return "mixed";
  }
  return "sextortion_like";
}

ValueModel parse_value_model(std::string_view name) {
  if (name == "sextortion_like") return ValueModel::sextortion_like;
  if (name == "fraud_like") return ValueModel::fraud_like;
  if (name == "mixed") return ValueModel::mixed;
  throw InvalidArgument("unknown payment_value_model '" + std::string(name) + "'");
}

void ScenarioSpec::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(name) + " must be in [0,1]");
  };
  prob(address_reuse_prob, "address_reuse_prob");
  prob(wallet_cospend_prob, "wallet_cospend_prob");
  prob(custodial_reuse_prob, "custodial_reuse_prob");
  prob(coinjoin_noise_prob, "coinjoin_noise_prob");
  if (campaign_profiles.empty()) {
    if (n_campaigns < 1) throw InvalidArgument("n_campaigns must be >= 1");
    if (cases_per_campaign < 1) throw InvalidArgument("cases_per_campaign must be >= 1");
  }
  for (const auto& p : campaign_profiles) {
    if (p.cases < 1) throw InvalidArgument("campaign_profile cases must be >= 1");
    prob(p.address_reuse_prob, "campaign_profile reuse");
  }
  if (collector_fanin < 1) throw InvalidArgument("collector_fanin must be >= 1");
  if (laundering_hops > 2) throw InvalidArgument("laundering_hops must be <= 2");
  if (span_days < 1) throw InvalidArgument("span_days must be >= 1");
  if (zone_id.empty()) throw InvalidArgument("zone_id must not be empty");
}

namespace {

CampaignProfile parse_profile(std::string_view s) {
  // cases:reuse:cospend
  const auto a = s.find(':');
  const auto b = a == std::string_view::npos ? a : s.find(':', a + 1);
  if (b == std::string_view::npos) throw InvalidArgument("campaign_profile must be cases:reuse:cospend");
  CampaignProfile p;
  p.cases = static_cast<std::uint32_t>(parse_uint_value(s.substr(0, a)));
  p.address_reuse_prob = parse_double_value(s.substr(a + 1, b - a - 1));
  p.cospend = parse_bool_value(s.substr(b + 1));
  return p;
}

}  // namespace

ScenarioSpec parse_scenario_spec(std::istream& in) {
  ScenarioSpec spec;
  for (const auto& [key, value] : parse_key_values(in)) {
    if (key == "seed") spec.seed = parse_uint_value(value);
    else if (key == "n_campaigns") spec.n_campaigns = static_cast<std::uint32_t>(parse_uint_value(value));
    else if (key == "cases_per_campaign") spec.cases_per_campaign = static_cast<std::uint32_t>(parse_uint_value(value));
    else if (key == "address_reuse_prob") spec.address_reuse_prob = parse_double_value(value);
    else if (key == "wallet_cospend_prob") spec.wallet_cospend_prob = parse_double_value(value);
    else if (key == "collector_fanin") spec.collector_fanin = static_cast<std::uint32_t>(parse_uint_value(value));
    else if (key == "payment_value_model") spec.payment_value_model = parse_value_model(value);
    else if (key == "custodial_reuse_prob") spec.custodial_reuse_prob = parse_double_value(value);
    else if (key == "coinjoin_noise_prob") spec.coinjoin_noise_prob = parse_double_value(value);
    else if (key == "campaign_profile") spec.campaign_profiles.push_back(parse_profile(value));
    else if (key == "laundering_hops") spec.laundering_hops = static_cast<std::uint32_t>(parse_uint_value(value));
    else if (key == "start_timestamp") spec.start_timestamp = static_cast<Timestamp>(parse_uint_value(value));
    else if (key == "span_days") spec.span_days = static_cast<std::uint32_t>(parse_uint_value(value));
    else if (key == "zone_id") spec.zone_id = value;
    else throw InvalidArgument("unknown scenario key '" + key + "'");
  }
  spec.validate();
  return spec;
}

namespace {

/// Portable draws on top of mt19937_64, whose output sequence is fixed by the
/// standard (unlike the std:: distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t index(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

 private:
  std::mt19937_64 engine_;
};

constexpr Satoshi kFee = 500;
constexpr Satoshi kMixValue = 1'000'000;
constexpr std::uint64_t kNoiseStream = 0x9E3779B97F4A7C15ull;

std::string numbered(const char* prefix, std::uint64_t n, int width = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*llu", prefix, width, static_cast<unsigned long long>(n));
  return buf;
}

double draw_eur(Rng& rng, CaseCategory category) {
  if (category == CaseCategory::sextortion) {
    return std::clamp(rng.lognormal(std::log(400.0), 0.6), 20.0, 999.0);
  }
  // mode exp(mu - sigma^2) = 2000, P(X > 100000) = 1%
  return std::max(50.0, rng.lognormal(8.881, 1.1315));
}

struct Address {
  std::string name;
  Satoshi balance = 0;
};

struct Campaign {
  std::uint32_t index = 0;
  CaseCategory category = CaseCategory::sextortion;
  bool cospend = true;
  double reuse = 0.0;
  std::uint32_t cases = 0;
  std::vector<std::size_t> addresses;  // into the generator's perpetrator address table
  std::size_t collector = 0;
};

class Generator {
 public:
  explicit Generator(const ScenarioSpec& spec) : spec_(spec), rng_(spec.seed), noise_(spec.seed ^ kNoiseStream) {}

  Scenario run() {
    make_rates();
    make_campaigns();
    for (auto& c : campaigns_) make_cases(c);
    make_sweeps();
    make_exchange();
    make_laundering();
    make_noise();
    finish_truth();
    return std::move(out_);
  }

 private:
  const ScenarioSpec& spec_;
  Rng rng_;
  Rng noise_;
  Scenario out_;
  std::vector<Campaign> campaigns_;
  std::vector<Address> perp_;
  std::vector<std::size_t> perp_campaign_;
  std::vector<std::string> perp_wallet_;
  std::vector<Address> collectors_;
  std::vector<CaseCategory> collector_category_;
  std::vector<std::string> deposits_;
  std::map<std::string, Satoshi> deposit_balance_;
  std::vector<std::size_t> case_perp_;  // per case; SIZE_MAX when custodial
  std::uint64_t tx_seq_ = 0;
  std::uint64_t case_seq_ = 0;

  Timestamp sweep_time() const {
    return spec_.start_timestamp + static_cast<Timestamp>(spec_.span_days) * 86400 + 86400;
  }

  double rate_at(Timestamp ts) const {
    const auto day = (ts - spec_.start_timestamp) / 86400;
    return out_.rates.at(static_cast<std::size_t>(std::clamp<Timestamp>(day, 0, out_.rates.size() - 1))).eur_per_btc;
  }

  std::string next_tx_id() { return numbered("tx-", tx_seq_++, 7); }

  void make_rates() {
    const auto first = utc_day_of(spec_.start_timestamp);
    double rate = 30000.0;
    for (std::uint32_t d = 0; d < spec_.span_days + 30; ++d) {
      out_.rates.push_back({first + std::chrono::days{d}, std::round(rate * 100.0) / 100.0});
      rate *= std::exp(0.02 * rng_.normal());
    }
  }

  void make_campaigns() {
    const auto n = spec_.campaign_profiles.empty() ? spec_.n_campaigns
                                                   : static_cast<std::uint32_t>(spec_.campaign_profiles.size());
    std::map<CaseCategory, std::pair<std::size_t, std::uint32_t>> filling;  // category -> (collector, used)
    for (std::uint32_t i = 0; i < n; ++i) {
      Campaign c;
      c.index = i;
      switch (spec_.payment_value_model) {
        case ValueModel::sextortion_like: c.category = CaseCategory::sextortion; break;
        case ValueModel::fraud_like: c.category = CaseCategory::cyberfraud; break;
        case ValueModel::mixed: c.category = i % 2 == 0 ? CaseCategory::sextortion : CaseCategory::cyberfraud; break;
      }
      const double draw = rng_.uniform();
      if (spec_.campaign_profiles.empty()) {
        c.cospend = draw < spec_.wallet_cospend_prob;
        c.reuse = spec_.address_reuse_prob;
        c.cases = spec_.cases_per_campaign;
      } else {
        const auto& p = spec_.campaign_profiles[i];
        c.cospend = p.cospend;
        c.reuse = p.address_reuse_prob;
        c.cases = p.cases;
      }
      auto it = filling.find(c.category);
      if (it == filling.end() || it->second.second == spec_.collector_fanin) {
        collectors_.push_back({numbered("col-", collectors_.size(), 4), 0});
        collector_category_.push_back(c.category);
        it = filling.insert_or_assign(c.category, std::pair{collectors_.size() - 1, 0u}).first;
      }
      c.collector = it->second.first;
      ++it->second.second;
      campaigns_.push_back(std::move(c));
    }
  }

  FileNumber file_number(Timestamp ts) {
    FileNumber fn;
    fn.county = "BY";
    fn.station = numbered("", 1000 + rng_.index(9000), 4);
    fn.sequence = numbered("", 10000 + case_seq_, 6);
    const auto ymd = std::chrono::year_month_day{utc_day_of(ts)};
    fn.year = numbered("", static_cast<std::uint64_t>(static_cast<int>(ymd.year()) % 100), 2);
    fn.check = numbered("", rng_.index(10), 1);
    return fn;
  }

  void make_cases(Campaign& c) {
    for (std::uint32_t k = 0; k < c.cases; ++k) {
      const double u_custodial = rng_.uniform();
      const double u_reuse = rng_.uniform();
      const double u_pick = rng_.uniform();
      std::string perp_address;
      std::size_t perp_index = SIZE_MAX;
      if (u_custodial < spec_.custodial_reuse_prob) {
        perp_address = numbered("xdep-", deposits_.size());
        deposits_.push_back(perp_address);
        out_.truth.address_wallet[perp_address] = "exchange";
      } else if (k > 0 && !c.addresses.empty() && u_reuse < c.reuse) {
        perp_index = c.addresses[static_cast<std::size_t>(u_pick * static_cast<double>(c.addresses.size()))];
        perp_address = perp_[perp_index].name;
      } else {
        perp_index = perp_.size();
        perp_address = numbered("perp-", perp_.size());
        perp_.push_back({perp_address, 0});
        perp_campaign_.push_back(c.index);
        const auto wallet = c.cospend ? numbered("W", c.index) : numbered("W", c.index) + "." + perp_address;
        perp_wallet_.push_back(wallet);
        out_.truth.address_wallet[perp_address] = wallet;
        c.addresses.push_back(perp_index);
      }

      const auto victim = numbered("vic-", case_seq_);
      out_.truth.address_wallet[victim] = numbered("V", case_seq_);
      const auto payments = c.category == CaseCategory::cyberfraud ? 1 + rng_.index(3) : 1;
      Timestamp first_ts = 0;
      for (std::uint64_t p = 0; p < payments; ++p) {
        const auto ts = spec_.start_timestamp +
                        static_cast<Timestamp>(rng_.index(static_cast<std::uint64_t>(spec_.span_days) * 86400));
        if (p == 0) first_ts = ts;
        const double eur = draw_eur(rng_, c.category);
        const auto sat = std::max<Satoshi>(1000, std::llround(eur / rate_at(ts) * static_cast<double>(kSatoshiPerBtc)));
        out_.transactions.push_back(Transaction{next_tx_id(), ts, {{victim, sat + kFee}}, {{perp_address, sat}}});
        if (perp_index != SIZE_MAX) {
          perp_[perp_index].balance += sat;
        } else {
          deposit_balance_[perp_address] += sat;
        }
      }

      CaseRecord rec;
      rec.case_id = file_number(first_ts);
      rec.category = c.category;
      rec.zone_id = spec_.zone_id;
      rec.seed_addresses = {{perp_address, Role::perpetrator}, {victim, Role::victim}};
      out_.truth.case_campaign[rec.case_id.to_string()] = c.index;
      out_.cases.push_back(std::move(rec));
      case_perp_.push_back(perp_index);
      ++case_seq_;
    }
  }

  void make_sweeps() {
    auto ts = sweep_time();
    for (const auto& c : campaigns_) {
      if (c.addresses.empty()) continue;
      auto& collector = collectors_[c.collector];
      if (c.cospend && c.addresses.size() >= 2) {
        Transaction tx{next_tx_id(), ts++, {}, {}};
        Satoshi total = 0;
        for (const auto a : c.addresses) {
          tx.inputs.push_back({perp_[a].name, perp_[a].balance});
          total += perp_[a].balance;
        }
        tx.outputs.push_back({collector.name, total - kFee});
        collector.balance += total - kFee;
        out_.transactions.push_back(std::move(tx));
      } else {
        for (const auto a : c.addresses) {
          out_.transactions.push_back(Transaction{next_tx_id(), ts++, {{perp_[a].name, perp_[a].balance}},
                                                  {{collector.name, perp_[a].balance - kFee}}});
          collector.balance += perp_[a].balance - kFee;
        }
      }
    }
    for (std::size_t i = 0; i < collectors_.size(); ++i) {
      if (collectors_[i].balance == 0) continue;
      out_.truth.address_wallet[collectors_[i].name] = numbered("C", i);
      if (collector_category_[i] == CaseCategory::sextortion) {
        out_.tags.push_back({collectors_[i].name, "sextortion spam campaign", TagCategory::spam_campaign, false});
      }
    }
  }

  void make_exchange() {
    if (deposits_.empty()) return;
    const std::string hot = "xch-hot-0000";
    out_.transactions.push_back(
        Transaction{next_tx_id(), spec_.start_timestamp, {{std::string(kCoinbaseAddress), 625'000'000}}, {{hot, 625'000'000}}});
    // deposits are swept into the hot wallet, joining them in one entity
    Transaction sweep{next_tx_id(), sweep_time() + 7200, {{hot, 625'000'000}}, {}};
    Satoshi total = 625'000'000;
    for (const auto& d : deposits_) {
      const auto received = deposit_balance_.at(d);
      sweep.inputs.push_back({d, received});
      total += received;
    }
    sweep.outputs.push_back({hot, total - kFee});
    out_.transactions.push_back(std::move(sweep));
    out_.truth.address_wallet[hot] = "exchange";
    out_.tags.push_back({hot, "Example Exchange", TagCategory::exchange, true});
  }

  void make_laundering() {
    auto ts = sweep_time() + 3 * 3600;
    for (std::size_t i = 0; i < collectors_.size(); ++i) {
      auto from = collectors_[i].name;
      auto value = collectors_[i].balance;
      for (std::uint32_t hop = 0; hop < spec_.laundering_hops && value > kFee; ++hop) {
        const auto to = numbered("lnd-", i * 10 + hop);
        out_.transactions.push_back(Transaction{next_tx_id(), ts++, {{from, value}}, {{to, value - kFee}}});
        out_.truth.address_wallet[to] = numbered("L", i * 10 + hop);
        from = to;
        value -= kFee;
      }
    }
  }

  void make_noise() {
    // Always consume the noise stream the same way so probabilities only gate
    // injection.
    std::uint64_t seq = 0;
    for (std::size_t i = 0; i < case_perp_.size(); ++i) {
      const double u = noise_.uniform();
      const auto others = 1 + noise_.index(3);
      std::vector<std::size_t> picks;
      for (std::uint64_t k = 0; k < others; ++k) picks.push_back(static_cast<std::size_t>(noise_.index(case_perp_.size())));
      const auto ts = spec_.start_timestamp +
                      static_cast<Timestamp>(noise_.index(static_cast<std::uint64_t>(spec_.span_days) * 86400));
      std::vector<Satoshi> change;
      for (std::uint64_t k = 0; k <= others; ++k) change.push_back(10'000 + static_cast<Satoshi>(noise_.index(900'000)));

      if (!(u < spec_.coinjoin_noise_prob) || case_perp_[i] == SIZE_MAX) continue;
      std::vector<std::string> participants{perp_[case_perp_[i]].name};
      for (const auto j : picks) {
        if (case_perp_[j] == SIZE_MAX) continue;
        const auto& name = perp_[case_perp_[j]].name;
        if (std::find(participants.begin(), participants.end(), name) == participants.end()) participants.push_back(name);
      }
      if (participants.size() < 2) continue;

      Transaction tx{numbered("cj-", seq++, 5), ts, {}, {}};
      for (std::size_t k = 0; k < participants.size(); ++k) {
        tx.inputs.push_back({participants[k], kMixValue + change[k] + kFee});
        const auto mix_out = numbered("cjo-", i * 8 + k);
        const auto change_out = numbered("cjc-", i * 8 + k);
        tx.outputs.push_back({mix_out, kMixValue});
        tx.outputs.push_back({change_out, change[k]});
        out_.truth.noise_addresses.insert(mix_out);
        out_.truth.noise_addresses.insert(change_out);
        out_.truth.address_wallet[mix_out] = "N" + mix_out;
        out_.truth.address_wallet[change_out] = "N" + change_out;
      }
      out_.transactions.push_back(std::move(tx));
    }
  }

  void finish_truth() {
    for (std::size_t i = 0; i < collectors_.size(); ++i) {
      if (collectors_[i].balance == 0) continue;
      TrueCollector tc{collectors_[i].name, {}};
      for (const auto& c : campaigns_) {
        if (c.collector != i) continue;
        for (const auto a : c.addresses) tc.source_wallets.insert(perp_wallet_[a]);
      }
      out_.truth.collectors.push_back(std::move(tc));
    }
  }
};

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  return Generator(spec).run();
}

void write_scenario(const Scenario& scenario, const ScenarioSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("transactions.jsonl");
    write_transactions(f, scenario.transactions, TxFormat::jsonl);
  }
  {
    auto f = open("tags.csv");
    write_tags(f, scenario.tags);
  }
  {
    auto f = open("rates.csv");
    write_rates(f, scenario.rates);
  }
  {
    auto f = open("cases.csv");
    write_cases(f, scenario.cases);
  }
  {
    nlohmann::ordered_json truth;
    truth["address_wallet"] = scenario.truth.address_wallet;
    truth["case_campaign"] = scenario.truth.case_campaign;
    truth["collectors"] = nlohmann::ordered_json::array();
    for (const auto& c : scenario.truth.collectors) {
      truth["collectors"].push_back({{"address", c.address}, {"source_wallets", c.source_wallets}});
    }
    truth["noise_addresses"] = scenario.truth.noise_addresses;
    auto f = open("ground_truth.json");
    f << truth.dump(1) << '\n';
  }
  {
    nlohmann::ordered_json meta;
    meta["generator"] = "caselink-synth";
    meta["rng"] = kRngName;
    meta["seed"] = spec.seed;
    meta["payment_value_model"] = to_string(spec.payment_value_model);
    meta["transactions"] = scenario.transactions.size();
    meta["cases"] = scenario.cases.size();
    auto f = open("meta.json");
    f << meta.dump(1) << '\n';
  }
}

}  // namespace caselink::synth
