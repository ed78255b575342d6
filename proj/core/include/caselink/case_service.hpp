#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "caselink/analysis.hpp"
#include "caselink/case_link.hpp"
#include "caselink/case_store.hpp"

namespace caselink {

struct Caller {
  std::string zone_id;
  std::string member;
};

struct CaseView {
  StoredCase record;
  std::vector<CaseAnnotation> annotations;
};

struct ClusterCard {
  std::vector<std::string> case_ids;  // readable members only
  /// Linked cases the caller may not read; reported as a count only.
  std::size_t anonymized_stubs = 0;
  std::vector<Evidence> shared_evidence;
  Satoshi inflow = 0;
  bool contains_service_evidence = false;
};

struct ClusterView {
  LinkLevel level = LinkLevel::address;
  std::uint64_t generation = 0;
  bool stale = false;
  std::vector<ClusterCard> clusters;
};

struct RequestEntry {
  ExchangeRequest request;
  /// Some other zone logged the same address.
  bool duplicate = false;
};

struct RequestLookup {
  std::vector<RequestEntry> entries;  // readable zones only
  bool any_other_zone_requested = false;
};

/// Case management service: zones, cases, role annotations, exchange-request
/// log and the case-cluster views computed from annotations.
///
/// Clustering runs over every zone's cases so cross-zone links are detected;
/// views then drop cases the caller may not read. Relinking replaces the
/// snapshot atomically; readers keep the last completed one.
class CaseService {
 public:
  using Clock = std::function<Timestamp()>;

  explicit CaseService(std::unique_ptr<CaseStore> store, std::shared_ptr<const Analysis> analysis = nullptr,
                       LinkOptions link_options = {}, Clock clock = {});
  ~CaseService();
  CaseService(const CaseService&) = delete;
  CaseService& operator=(const CaseService&) = delete;

  // administration
  /// Creates a zone and returns a bearer token for its first member.
  std::string create_zone(const Zone& zone, std::string_view first_member = "admin");
  std::string issue_token(std::string_view zone_id, std::string_view member);
  void grant_read(std::string_view target_zone, std::string_view reader_zone);

  /// Throws Unauthorized for unknown tokens.
  Caller authenticate(std::string_view token) const;

  bool can_read(std::string_view reader_zone, std::string_view target_zone) const;

  CaseView create_case(const Caller& caller, std::string_view file_number, std::string_view category);
  /// NotFound unless the caller may read the case.
  CaseView get_case(const Caller& caller, std::string_view case_id) const;
  std::vector<StoredCase> list_cases(const Caller& caller) const;

  /// Only the owning zone may annotate. Marks the clustering stale.
  CaseAnnotation annotate(const Caller& caller, std::string_view case_id, std::string_view address,
                          std::string_view role);

  /// Recomputes the clustering now, on the calling thread.
  void relink();
  /// Starts (or re-queues) a background relink.
  void request_relink();
  void wait_for_relink();
  bool stale() const;

  ClusterView list_case_clusters(const Caller& caller, LinkLevel level) const;
  CaseNetwork network(const Caller& caller, LinkLevel level) const;

  ExchangeRequest log_exchange_request(const Caller& caller, std::string_view address, std::string_view exchange);
  RequestLookup was_requested(const Caller& caller, std::string_view address) const;

  const CaseStore& store() const noexcept { return *store_; }

 private:
  struct Snapshot {
    std::uint64_t generation = 0;
    std::map<std::string, std::string, std::less<>> case_zone;
    std::unique_ptr<CaseLinker> linker;
    std::vector<CaseClustering> levels;  // indexed by LinkLevel
  };

  std::shared_ptr<const Snapshot> snapshot() const;
  std::set<std::string> readable_zones(std::string_view reader_zone) const;
  std::mutex& zone_mutex(std::string_view zone_id);
  void relink_worker();

  std::unique_ptr<CaseStore> store_;
  std::shared_ptr<const Analysis> analysis_;
  LinkOptions link_options_;
  Clock clock_;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::uint64_t annotation_version_ = 0;  // guarded by snapshot_mutex_
  std::uint64_t linked_version_ = 0;

  std::mutex zone_locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>, std::less<>> zone_locks_;

  std::mutex compute_mutex_;
  std::mutex relink_mutex_;
  std::condition_variable relink_cv_;
  bool relink_running_ = false;
  bool relink_again_ = false;
  std::jthread relink_thread_;
};

}  // namespace caselink
