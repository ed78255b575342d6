#pragma once

#include <cstddef>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caselink/entity_graph.hpp"
#include "caselink/types.hpp"

namespace caselink {

/// Daily EUR/BTC rates. A day without a rate falls back to the nearest earlier
/// day. Days are UTC.
class FxTable {
 public:
  FxTable() = default;
  /// Throws InvalidArgument on duplicate days or non-positive rates.
  explicit FxTable(std::vector<FxRate> rates);

  bool empty() const noexcept { return rates_.empty(); }
  /// Throws NotFound when no rate exists at or before the day of `ts`.
  double eur_per_btc(Timestamp ts) const;
  double to_eur(Satoshi value, Timestamp ts) const;

 private:
  std::vector<FxRate> rates_;  // ascending by date
};

enum class InflowScope { seed, expanded };

std::string_view to_string(InflowScope scope) noexcept;

struct InflowPoint {
  Timestamp t = 0;
  double eur_cum = 0.0;
  Satoshi sat_cum = 0;
};

struct InflowSeries {
  InflowScope scope = InflowScope::seed;
  std::vector<InflowPoint> points;
  /// Per-transaction payments behind the points, same order.
  std::vector<InflowPayment> payments;
};

/// Cumulative payments into the seed addresses (seed scope) or into every
/// entity touched by a seed (expanded scope). Transfers within one entity do
/// not count; `exclude_service` drops payments received by service-like
/// entities.
InflowSeries inflow_series(const EntityGraph& graph, const std::set<std::string>& seed_addresses,
                           InflowScope scope, const FxTable& rates, bool exclude_service);

/// Interior bucket edges; bucket 0 holds values below edges[0], bucket i
/// values in [edges[i-1], edges[i]), the last bucket values >= edges.back().
struct PaymentDistribution {
  std::vector<double> edges;
  std::vector<std::size_t> counts;  // edges.size() + 1

  std::size_t total() const noexcept;
};

/// 10, 100, ..., 1e6 EUR.
std::vector<double> default_bucket_edges();

/// Throws InvalidArgument unless edges are strictly increasing.
PaymentDistribution value_distribution(std::span<const double> eur_values, std::span<const double> edges);
PaymentDistribution value_distribution(std::span<const InflowPayment> payments, const FxTable& rates,
                                       std::span<const double> edges);

struct VictimEstimate {
  /// Distinct sending addresses; a rough upper bound on the number of victims.
  std::size_t unique_senders = 0;
  std::size_t incoming_transactions = 0;
};

/// Counts distinct input addresses of transactions paying any seed address.
/// Addresses in `excluded` (seeds, expanded addresses) are not counted as
/// senders, and transactions sent only by them are not incoming.
VictimEstimate victim_estimate(const std::set<std::string>& seed_addresses, const Ledger& ledger,
                               const std::set<std::string>& excluded = {});

void write_series_csv(std::ostream& out, const InflowSeries& series);
/// {"scope": ..., "points": [{"t": .., "eur_cum": .., "sat_cum": ..}, ...]}
std::string series_json(const InflowSeries& series);
void write_distribution_csv(std::ostream& out, const PaymentDistribution& dist);

}  // namespace caselink
