#include "caselink/flow_stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "caselink/errors.hpp"

namespace caselink {

FxTable::FxTable(std::vector<FxRate> rates) : rates_(std::move(rates)) {
  std::sort(rates_.begin(), rates_.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    if (!(rates_[i].eur_per_btc > 0)) throw InvalidArgument("exchange rates must be positive");
    if (i > 0 && rates_[i].date == rates_[i - 1].date) {
      throw InvalidArgument("duplicate exchange rate for " + format_iso_date(rates_[i].date));
    }
  }
}

double FxTable::eur_per_btc(Timestamp ts) const {
  const auto day = utc_day_of(ts);
  auto it = std::upper_bound(rates_.begin(), rates_.end(), day,
                             [](const auto& d, const FxRate& r) { return d < r.date; });
  if (it == rates_.begin()) throw NotFound("no exchange rate at or before " + format_iso_date(day));
  return std::prev(it)->eur_per_btc;
}

double FxTable::to_eur(Satoshi value, Timestamp ts) const {
  return static_cast<double>(value) * eur_per_btc(ts) / static_cast<double>(kSatoshiPerBtc);
}

std::string_view to_string(InflowScope scope) noexcept {
  return scope == InflowScope::seed ? "seed" : "expanded";
}

InflowSeries inflow_series(const EntityGraph& graph, const std::set<std::string>& seed_addresses,
                           InflowScope scope, const FxTable& rates, bool exclude_service) {
  const auto& partition = graph.partition();
  const auto& ledger = partition.ledger();

  std::set<std::uint32_t> seed_ids;
  std::set<EntityId> entities;
  for (const auto& a : seed_addresses) {
    if (const auto id = ledger.find_address(a)) {
      seed_ids.insert(id->value);
      entities.insert(partition.entity_of(*id));
    }
  }

  InflowSeries series;
  series.scope = scope;
  for (const auto& f : graph.flows()) {
    if (f.source == f.target) continue;
    const bool hit = scope == InflowScope::seed ? seed_ids.contains(f.address.value) : entities.contains(f.target);
    if (!hit) continue;
    if (exclude_service && graph.is_service_like(f.target)) continue;
    if (series.payments.empty() || series.payments.back().tx_index != f.tx_index) {
      series.payments.push_back({f.tx_index, ledger.transaction(f.tx_index).timestamp, 0});
    }
    series.payments.back().value += f.value;
  }
  std::stable_sort(series.payments.begin(), series.payments.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });

  double eur = 0.0;
  Satoshi sat = 0;
  for (const auto& p : series.payments) {
    eur += rates.to_eur(p.value, p.timestamp);
    sat += p.value;
    series.points.push_back({p.timestamp, eur, sat});
  }
  return series;
}

std::size_t PaymentDistribution::total() const noexcept {
  std::size_t n = 0;
  for (const auto c : counts) n += c;
  return n;
}

std::vector<double> default_bucket_edges() { return {1e1, 1e2, 1e3, 1e4, 1e5, 1e6}; }

PaymentDistribution value_distribution(std::span<const double> eur_values, std::span<const double> edges) {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw InvalidArgument("bucket edges must be strictly increasing");
  }
  PaymentDistribution d;
  d.edges.assign(edges.begin(), edges.end());
  d.counts.assign(edges.size() + 1, 0);
  for (const auto v : eur_values) {
    const auto bucket = std::upper_bound(edges.begin(), edges.end(), v) - edges.begin();
    ++d.counts[static_cast<std::size_t>(bucket)];
  }
  return d;
}

PaymentDistribution value_distribution(std::span<const InflowPayment> payments, const FxTable& rates,
                                       std::span<const double> edges) {
  std::vector<double> values;
  values.reserve(payments.size());
  for (const auto& p : payments) values.push_back(rates.to_eur(p.value, p.timestamp));
  return value_distribution(values, edges);
}

VictimEstimate victim_estimate(const std::set<std::string>& seed_addresses, const Ledger& ledger,
                               const std::set<std::string>& excluded) {
  VictimEstimate est;
  std::set<std::uint32_t> incoming;
  for (const auto& a : seed_addresses) {
    const auto id = ledger.find_address(a);
    if (!id) continue;
    for (const auto t : ledger.transactions_of(*id)) {
      const auto outs = ledger.output_ids(t);
      if (std::find(outs.begin(), outs.end(), *id) != outs.end()) incoming.insert(t);
    }
  }
  std::set<std::string_view> senders;
  for (const auto t : incoming) {
    const auto& tx = ledger.transaction(t);
    if (tx.is_coinbase()) continue;
    bool counted = false;
    for (const auto& leg : tx.inputs) {
      if (seed_addresses.contains(leg.address) || excluded.contains(leg.address)) continue;
      senders.insert(leg.address);
      counted = true;
    }
    if (counted) ++est.incoming_transactions;
  }
  est.unique_senders = senders.size();
  return est;
}

namespace {
std::string fmt_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, ptr);
}
}  // namespace

void write_series_csv(std::ostream& out, const InflowSeries& series) {
  out << "t,eur_cum,sat_cum\n";
  for (const auto& p : series.points) out << p.t << ',' << fmt_double(p.eur_cum) << ',' << p.sat_cum << '\n';
}

std::string series_json(const InflowSeries& series) {
  nlohmann::ordered_json doc;
  doc["scope"] = to_string(series.scope);
  doc["points"] = nlohmann::ordered_json::array();
  for (const auto& p : series.points) {
    // rounded to cents so the payload is stable across platforms
    doc["points"].push_back({{"t", p.t}, {"eur_cum", std::round(p.eur_cum * 100.0) / 100.0}, {"sat_cum", p.sat_cum}});
  }
  return doc.dump() + "\n";
}

void write_distribution_csv(std::ostream& out, const PaymentDistribution& dist) {
  out << "lower_eur,upper_eur,count\n";
  for (std::size_t i = 0; i < dist.counts.size(); ++i) {
    out << (i == 0 ? std::string() : fmt_double(dist.edges[i - 1])) << ','
        << (i < dist.edges.size() ? fmt_double(dist.edges[i]) : std::string()) << ',' << dist.counts[i] << '\n';
  }
}

}  // namespace caselink
