#include "caselink/ingest.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "caselink/csv.hpp"
#include "caselink/errors.hpp"

namespace caselink {

using nlohmann::json;

TxFormat parse_tx_format(std::string_view name) {
  if (name == "jsonl") return TxFormat::jsonl;
  if (name == "csv") return TxFormat::csv;
  throw InvalidArgument("unknown transaction format '" + std::string(name) + "'");
}

namespace {

std::vector<TxLeg> parse_legs(const json& arr, std::size_t line, const char* side) {
  if (!arr.is_array()) throw ParseError(line, std::string(side) + " must be an array");
  std::vector<TxLeg> legs;
  legs.reserve(arr.size());
  for (const auto& leg : arr) {
    if (!leg.is_array() || leg.size() != 2 || !leg[0].is_string() || !leg[1].is_number_integer()) {
      throw ParseError(line, std::string(side) + " entries must be [address, satoshi]");
    }
    const auto value = leg[1].get<std::int64_t>();
    if (value <= 0 || (leg[1].is_number_unsigned() && leg[1].get<std::uint64_t>() > INT64_MAX)) {
      throw ParseError(line, "non-positive value");
    }
    legs.push_back({leg[0].get<std::string>(), value});
  }
  if (legs.empty()) throw ParseError(line, std::string(side) + " must not be empty");
  return legs;
}

template <typename T>
T parse_integer(std::string_view s, std::size_t line, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<Transaction> parse_jsonl(std::istream& in) {
  std::vector<Transaction> txs;
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(line, "record must be a JSON object");
    if (!j.contains("tx_id") || !j["tx_id"].is_string()) throw ParseError(line, "missing string tx_id");
    if (!j.contains("timestamp") || !j["timestamp"].is_number_integer()) {
      throw ParseError(line, "missing integer timestamp");
    }
    if (!j.contains("inputs") || !j.contains("outputs")) throw ParseError(line, "missing inputs/outputs");
    Transaction tx;
    tx.tx_id = j["tx_id"].get<std::string>();
    tx.timestamp = j["timestamp"].get<std::int64_t>();
    tx.inputs = parse_legs(j["inputs"], line, "inputs");
    tx.outputs = parse_legs(j["outputs"], line, "outputs");
    if (!seen.insert(tx.tx_id).second) throw ParseError(line, "duplicate tx_id " + tx.tx_id);
    txs.push_back(std::move(tx));
  }
  return txs;
}

std::vector<Transaction> parse_tx_csv(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"tx_id", "timestamp", "side", "address", "value"});
  std::vector<Transaction> txs;
  std::unordered_set<std::string> seen;
  std::size_t current_line = 0;
  while (auto rec = reader.next()) {
    if (rec->fields.size() != 5) throw ParseError(rec->line, "expected 5 fields");
    const auto& f = rec->fields;
    const auto ts = parse_integer<std::int64_t>(f[1], rec->line, "timestamp");
    const auto value = parse_integer<std::int64_t>(f[4], rec->line, "value");
    if (value <= 0) throw ParseError(rec->line, "non-positive value");
    if (f[3].empty()) throw ParseError(rec->line, "empty address");
    if (txs.empty() || txs.back().tx_id != f[0]) {
      if (!txs.empty() && (txs.back().inputs.empty() || txs.back().outputs.empty())) {
        throw ParseError(current_line, "transaction " + txs.back().tx_id + " lacks inputs or outputs");
      }
      if (!seen.insert(f[0]).second) throw ParseError(rec->line, "duplicate tx_id " + f[0]);
      txs.push_back(Transaction{f[0], ts, {}, {}});
      current_line = rec->line;
    } else if (txs.back().timestamp != ts) {
      throw ParseError(rec->line, "timestamp differs within transaction " + f[0]);
    }
    if (f[2] == "in") {
      txs.back().inputs.push_back({f[3], value});
    } else if (f[2] == "out") {
      txs.back().outputs.push_back({f[3], value});
    } else {
      throw ParseError(rec->line, "side must be 'in' or 'out'");
    }
  }
  if (!txs.empty() && (txs.back().inputs.empty() || txs.back().outputs.empty())) {
    throw ParseError(current_line, "transaction " + txs.back().tx_id + " lacks inputs or outputs");
  }
  return txs;
}

bool parse_bool(std::string_view s, std::size_t line) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError(line, "invalid boolean '" + std::string(s) + "'");
}

std::string format_rate(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<Transaction> parse_transactions(std::istream& in, TxFormat format) {
  return format == TxFormat::jsonl ? parse_jsonl(in) : parse_tx_csv(in);
}

std::vector<AttributionTag> parse_tags(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"address", "label", "category", "is_service"});
  std::vector<AttributionTag> tags;
  std::set<std::pair<std::string, std::string>> seen;
  while (auto rec = reader.next()) {
    if (rec->fields.size() != 4) throw ParseError(rec->line, "expected 4 fields");
    AttributionTag tag;
    tag.address = rec->fields[0];
    tag.label = rec->fields[1];
    try {
      tag.category = parse_tag_category(rec->fields[2]);
    } catch (const InvalidArgument& e) {
      throw ParseError(rec->line, e.what());
    }
    tag.is_service = parse_bool(rec->fields[3], rec->line);
    if (tag.address.empty()) throw ParseError(rec->line, "empty address");
    if (tag.category == TagCategory::exchange && !tag.is_service) {
      throw ParseError(rec->line, "exchange tags must have is_service=true");
    }
    if (!seen.emplace(tag.address, tag.label).second) {
      throw ParseError(rec->line, "duplicate (address, label) pair");
    }
    tags.push_back(std::move(tag));
  }
  return tags;
}

std::vector<FxRate> parse_rates(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"date", "eur_per_btc"});
  std::vector<FxRate> rates;
  std::set<std::chrono::sys_days> seen;
  while (auto rec = reader.next()) {
    if (rec->fields.size() != 2) throw ParseError(rec->line, "expected 2 fields");
    FxRate r;
    try {
      r.date = parse_iso_date(rec->fields[0]);
    } catch (const InvalidArgument& e) {
      throw ParseError(rec->line, e.what());
    }
    const auto& s = rec->fields[1];
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), r.eur_per_btc);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(r.eur_per_btc)) {
      throw ParseError(rec->line, "invalid rate '" + s + "'");
    }
    if (r.eur_per_btc <= 0) throw ParseError(rec->line, "rate must be positive");
    if (!seen.insert(r.date).second) throw ParseError(rec->line, "duplicate rate for " + rec->fields[0]);
    rates.push_back(r);
  }
  return rates;
}

std::vector<CaseRecord> parse_cases(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"case_id", "category", "zone_id", "address", "role"});
  std::vector<CaseRecord> cases;
  std::unordered_map<std::string, std::size_t> index;
  while (auto rec = reader.next()) {
    if (rec->fields.size() != 5) throw ParseError(rec->line, "expected 5 fields");
    const auto& f = rec->fields;
    CaseCategory category;
    Role role;
    FileNumber id;
    try {
      id = parse_file_number(f[0]);
      category = parse_case_category(f[1]);
      role = parse_role(f[4]);
    } catch (const ParseError& e) {
      throw ParseError(rec->line, e.reason());
    } catch (const InvalidArgument& e) {
      throw ParseError(rec->line, e.what());
    }
    if (f[3].empty()) throw ParseError(rec->line, "empty address");
    auto [it, fresh] = index.emplace(f[0], cases.size());
    if (fresh) {
      cases.push_back(CaseRecord{std::move(id), category, {}, f[2]});
    }
    auto& c = cases[it->second];
    if (c.category != category || c.zone_id != f[2]) {
      throw ParseError(rec->line, "case " + f[0] + " has inconsistent category or zone");
    }
    c.seed_addresses.push_back({f[3], role});
  }
  return cases;
}

void write_transactions(std::ostream& out, std::span<const Transaction> txs, TxFormat format) {
  if (format == TxFormat::jsonl) {
    for (const auto& tx : txs) {
      json j;
      j["tx_id"] = tx.tx_id;
      j["timestamp"] = tx.timestamp;
      j["inputs"] = json::array();
      j["outputs"] = json::array();
      for (const auto& l : tx.inputs) j["inputs"].push_back({l.address, l.value});
      for (const auto& l : tx.outputs) j["outputs"].push_back({l.address, l.value});
      out << j.dump() << '\n';
    }
    return;
  }
  out << "tx_id,timestamp,side,address,value\n";
  for (const auto& tx : txs) {
    for (const auto& l : tx.inputs) {
      out << csv::join({tx.tx_id, std::to_string(tx.timestamp), "in", l.address, std::to_string(l.value)})
          << '\n';
    }
    for (const auto& l : tx.outputs) {
      out << csv::join({tx.tx_id, std::to_string(tx.timestamp), "out", l.address, std::to_string(l.value)})
          << '\n';
    }
  }
}

void write_tags(std::ostream& out, std::span<const AttributionTag> tags) {
  out << "address,label,category,is_service\n";
  for (const auto& t : tags) {
    out << csv::join({t.address, t.label, std::string(to_string(t.category)), t.is_service ? "true" : "false"})
        << '\n';
  }
}

void write_rates(std::ostream& out, std::span<const FxRate> rates) {
  out << "date,eur_per_btc\n";
  for (const auto& r : rates) out << format_iso_date(r.date) << ',' << format_rate(r.eur_per_btc) << '\n';
}

void write_cases(std::ostream& out, std::span<const CaseRecord> cases) {
  out << "case_id,category,zone_id,address,role\n";
  for (const auto& c : cases) {
    for (const auto& s : c.seed_addresses) {
      out << csv::join({c.case_id.to_string(), std::string(to_string(c.category)), c.zone_id, s.address,
                        std::string(to_string(s.role))})
          << '\n';
    }
  }
}

ActiveCases filter_active_cases(std::span<const CaseRecord> cases, const Ledger& ledger) {
  ActiveCases result;
  std::set<std::string> inactive;
  for (const auto& c : cases) {
    bool active = false;
    for (const auto& addr : c.perpetrator_addresses()) {
      if (ledger.mentions(addr)) {
        active = true;
      } else {
        inactive.insert(addr);
      }
    }
    if (active) result.active.push_back(c);
  }
  result.inactive_addresses = inactive.size();
  return result;
}

}  // namespace caselink
