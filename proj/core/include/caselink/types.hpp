#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace caselink {

using Satoshi = std::int64_t;
/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Satoshi kSatoshiPerBtc = 100'000'000;
inline constexpr std::string_view kCoinbaseAddress = "COINBASE";

struct TxLeg {
  std::string address;
  Satoshi value = 0;

  friend bool operator==(const TxLeg&, const TxLeg&) = default;
};

struct Transaction {
  std::string tx_id;
  Timestamp timestamp = 0;
  std::vector<TxLeg> inputs;
  std::vector<TxLeg> outputs;

  bool is_coinbase() const noexcept {
    return inputs.size() == 1 && inputs.front().address == kCoinbaseAddress;
  }
  Satoshi input_total() const noexcept;
  Satoshi output_total() const noexcept;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

enum class TagCategory { exchange, service, spam_campaign, other };

struct AttributionTag {
  std::string address;
  std::string label;
  TagCategory category = TagCategory::other;
  bool is_service = false;
};

struct FxRate {
  std::chrono::sys_days date;
  double eur_per_btc = 0.0;
};

enum class CaseCategory { cyberfraud, sextortion };
enum class Role { victim, perpetrator };

/// Case file number of the shape CC####-######-YY/C, e.g. BY1234-010123-22/6.
/// Segments are kept as text so leading zeros survive a round trip.
struct FileNumber {
  std::string county;    // 2 letters
  std::string station;   // 4 digits
  std::string sequence;  // 6 digits
  std::string year;      // 2 digits
  std::string check;     // 1 digit, not verified

  std::string to_string() const;
  friend auto operator<=>(const FileNumber&, const FileNumber&) = default;
};

FileNumber parse_file_number(std::string_view text);

struct SeedAddress {
  std::string address;
  Role role = Role::perpetrator;

  friend bool operator==(const SeedAddress&, const SeedAddress&) = default;
};

struct CaseRecord {
  FileNumber case_id;
  CaseCategory category = CaseCategory::cyberfraud;
  std::vector<SeedAddress> seed_addresses;
  std::string zone_id;

  std::vector<std::string> perpetrator_addresses() const;
};

std::string_view to_string(TagCategory c) noexcept;
std::string_view to_string(CaseCategory c) noexcept;
std::string_view to_string(Role r) noexcept;

// These throw InvalidArgument on unknown names.
TagCategory parse_tag_category(std::string_view s);
CaseCategory parse_case_category(std::string_view s);
Role parse_role(std::string_view s);

/// YYYY-MM-DD
std::chrono::sys_days parse_iso_date(std::string_view s);
std::string format_iso_date(std::chrono::sys_days d);
std::chrono::sys_days utc_day_of(Timestamp ts) noexcept;

}  // namespace caselink
