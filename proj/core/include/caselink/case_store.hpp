#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "caselink/types.hpp"

struct sqlite3;

namespace caselink {

struct Zone {
  std::string zone_id;
  std::string name;
  /// Zones allowed to read this zone's cases. A zone always reads itself.
  std::set<std::string> readable_by;
};

struct Member {
  std::string zone_id;
  std::string member;
};

struct StoredCase {
  std::string case_id;
  std::string zone_id;
  CaseCategory category = CaseCategory::cyberfraud;
};

struct CaseAnnotation {
  std::string case_id;
  std::string address;
  Role role = Role::perpetrator;
  std::string author;
  Timestamp created_at = 0;
};

struct ExchangeRequest {
  std::int64_t id = 0;
  std::string address;
  std::string exchange;
  Timestamp requested_at = 0;
  std::string zone_id;
};

/// Persistence behind the case service. Implementations are internally
/// synchronized. Duplicate keys raise Conflict; missing zones or cases NotFound.
class CaseStore {
 public:
  virtual ~CaseStore() = default;

  virtual void create_zone(const Zone& zone) = 0;
  virtual std::optional<Zone> find_zone(std::string_view zone_id) const = 0;
  virtual std::vector<Zone> zones() const = 0;
  /// `reader` may read `target`.
  virtual void add_grant(std::string_view target, std::string_view reader) = 0;

  virtual void add_member(std::string_view token_hash, const Member& member) = 0;
  virtual std::optional<Member> find_member(std::string_view token_hash) const = 0;

  virtual void insert_case(const StoredCase& c) = 0;
  virtual std::optional<StoredCase> find_case(std::string_view case_id) const = 0;
  virtual std::vector<StoredCase> cases() const = 0;

  virtual void insert_annotation(const CaseAnnotation& a) = 0;
  virtual std::vector<CaseAnnotation> annotations(std::string_view case_id) const = 0;
  virtual std::vector<CaseAnnotation> all_annotations() const = 0;

  virtual ExchangeRequest append_request(const ExchangeRequest& r) = 0;
  virtual std::vector<ExchangeRequest> requests(std::string_view address) const = 0;

  /// "table.column" for every persisted column.
  virtual std::vector<std::string> schema_columns() const = 0;
};

/// Single-file SQLite store in WAL mode. ":memory:" gives a private in-memory
/// database.
class SqliteCaseStore final : public CaseStore {
 public:
  explicit SqliteCaseStore(const std::filesystem::path& path);
  ~SqliteCaseStore() override;
  SqliteCaseStore(const SqliteCaseStore&) = delete;
  SqliteCaseStore& operator=(const SqliteCaseStore&) = delete;

  void create_zone(const Zone& zone) override;
  std::optional<Zone> find_zone(std::string_view zone_id) const override;
  std::vector<Zone> zones() const override;
  void add_grant(std::string_view target, std::string_view reader) override;

  void add_member(std::string_view token_hash, const Member& member) override;
  std::optional<Member> find_member(std::string_view token_hash) const override;

  void insert_case(const StoredCase& c) override;
  std::optional<StoredCase> find_case(std::string_view case_id) const override;
  std::vector<StoredCase> cases() const override;

  void insert_annotation(const CaseAnnotation& a) override;
  std::vector<CaseAnnotation> annotations(std::string_view case_id) const override;
  std::vector<CaseAnnotation> all_annotations() const override;

  ExchangeRequest append_request(const ExchangeRequest& r) override;
  std::vector<ExchangeRequest> requests(std::string_view address) const override;

  std::vector<std::string> schema_columns() const override;

 private:
  sqlite3* db_ = nullptr;
  mutable std::mutex mutex_;

  std::set<std::string> grants_of(std::string_view target) const;
};

}  // namespace caselink
