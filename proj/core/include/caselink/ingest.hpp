#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "caselink/ledger.hpp"
#include "caselink/types.hpp"

namespace caselink {

enum class TxFormat { jsonl, csv };

TxFormat parse_tx_format(std::string_view name);

/// Parses a transaction export. Throws ParseError naming the offending line on
/// malformed input, a duplicate tx_id or a non-positive value.
///
/// jsonl: {"tx_id": str, "timestamp": int, "inputs": [[addr, sat], ...], "outputs": [...]}
/// csv:   header tx_id,timestamp,side,address,value with side in {in,out}; the
///        rows of one transaction are contiguous.
std::vector<Transaction> parse_transactions(std::istream& in, TxFormat format);

/// tags.csv: address,label,category,is_service
std::vector<AttributionTag> parse_tags(std::istream& in);

/// rates.csv: date,eur_per_btc
std::vector<FxRate> parse_rates(std::istream& in);

/// cases.csv: case_id,category,zone_id,address,role, one row per seed address.
/// Cases keep the order of their first row.
std::vector<CaseRecord> parse_cases(std::istream& in);

void write_transactions(std::ostream& out, std::span<const Transaction> txs, TxFormat format);
void write_tags(std::ostream& out, std::span<const AttributionTag> tags);
void write_rates(std::ostream& out, std::span<const FxRate> rates);
void write_cases(std::ostream& out, std::span<const CaseRecord> cases);

struct ActiveCases {
  std::vector<CaseRecord> active;
  /// Distinct perpetrator seed addresses with no on-chain appearance.
  std::size_t inactive_addresses = 0;
};

/// A case is active when at least one of its perpetrator addresses appears in
/// the ledger on either side of a transaction.
ActiveCases filter_active_cases(std::span<const CaseRecord> cases, const Ledger& ledger);

}  // namespace caselink
