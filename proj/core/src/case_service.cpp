#include "caselink/case_service.hpp"

#include <algorithm>
#include <chrono>

#include "caselink/digest.hpp"
#include "caselink/errors.hpp"

namespace caselink {

namespace {
Timestamp system_now() {
  using namespace std::chrono;
  return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}
}  // namespace

CaseService::CaseService(std::unique_ptr<CaseStore> store, std::shared_ptr<const Analysis> analysis,
                         LinkOptions link_options, Clock clock)
    : store_(std::move(store)),
      analysis_(std::move(analysis)),
      link_options_(link_options),
      clock_(clock ? std::move(clock) : Clock(system_now)) {
  if (!store_) throw InvalidArgument("case service needs a store");
  // Anything already persisted needs a first relink.
  annotation_version_ = store_->cases().empty() ? 0 : 1;
}

CaseService::~CaseService() {
  std::unique_lock lock(relink_mutex_);
  relink_cv_.wait(lock, [this] { return !relink_running_; });
}

std::string CaseService::create_zone(const Zone& zone, std::string_view first_member) {
  if (zone.zone_id.empty()) throw InvalidArgument("zone_id must not be empty");
  store_->create_zone(zone);
  return issue_token(zone.zone_id, first_member);
}

std::string CaseService::issue_token(std::string_view zone_id, std::string_view member) {
  if (!store_->find_zone(zone_id)) throw NotFound("unknown zone " + std::string(zone_id));
  auto token = random_token();
  store_->add_member(sha256_hex(token), Member{std::string(zone_id), std::string(member)});
  return token;
}

void CaseService::grant_read(std::string_view target_zone, std::string_view reader_zone) {
  if (!store_->find_zone(target_zone)) throw NotFound("unknown zone " + std::string(target_zone));
  if (!store_->find_zone(reader_zone)) throw NotFound("unknown zone " + std::string(reader_zone));
  store_->add_grant(target_zone, reader_zone);
}

Caller CaseService::authenticate(std::string_view token) const {
  if (token.empty()) throw Unauthorized("missing bearer token");
  const auto m = store_->find_member(sha256_hex(token));
  if (!m) throw Unauthorized("invalid bearer token");
  return Caller{m->zone_id, m->member};
}

bool CaseService::can_read(std::string_view reader_zone, std::string_view target_zone) const {
  if (reader_zone == target_zone) return true;
  const auto z = store_->find_zone(target_zone);
  return z && z->readable_by.contains(std::string(reader_zone));
}

std::set<std::string> CaseService::readable_zones(std::string_view reader_zone) const {
  std::set<std::string> out{std::string(reader_zone)};
  for (const auto& z : store_->zones()) {
    if (z.readable_by.contains(std::string(reader_zone))) out.insert(z.zone_id);
  }
  return out;
}

std::mutex& CaseService::zone_mutex(std::string_view zone_id) {
  std::scoped_lock lock(zone_locks_mutex_);
  auto it = zone_locks_.find(zone_id);
  if (it == zone_locks_.end()) {
    it = zone_locks_.emplace(std::string(zone_id), std::make_unique<std::mutex>()).first;
  }
  return *it->second;
}

CaseView CaseService::create_case(const Caller& caller, std::string_view file_number, std::string_view category) {
  const auto id = parse_file_number(file_number).to_string();
  StoredCase c{id, caller.zone_id, parse_case_category(category)};
  {
    std::scoped_lock lock(zone_mutex(caller.zone_id));
    if (store_->find_case(id)) throw Conflict("case " + id + " already exists");
    store_->insert_case(c);
  }
  {
    std::scoped_lock lock(snapshot_mutex_);
    ++annotation_version_;
  }
  return CaseView{std::move(c), {}};
}

CaseView CaseService::get_case(const Caller& caller, std::string_view case_id) const {
  auto c = store_->find_case(case_id);
  if (!c || !can_read(caller.zone_id, c->zone_id)) throw NotFound("case " + std::string(case_id) + " not found");
  return CaseView{std::move(*c), store_->annotations(case_id)};
}

std::vector<StoredCase> CaseService::list_cases(const Caller& caller) const {
  const auto readable = readable_zones(caller.zone_id);
  std::vector<StoredCase> out;
  for (auto& c : store_->cases()) {
    if (readable.contains(c.zone_id)) out.push_back(std::move(c));
  }
  return out;
}

CaseAnnotation CaseService::annotate(const Caller& caller, std::string_view case_id, std::string_view address,
                                     std::string_view role) {
  const auto parsed_role = parse_role(role);
  if (address.empty()) throw InvalidArgument("address must not be empty");
  const auto c = store_->find_case(case_id);
  if (!c || !can_read(caller.zone_id, c->zone_id)) throw NotFound("case " + std::string(case_id) + " not found");
  if (c->zone_id != caller.zone_id) throw Forbidden("case " + std::string(case_id) + " belongs to another zone");

  CaseAnnotation a{c->case_id, std::string(address), parsed_role, caller.member, clock_()};
  {
    std::scoped_lock lock(zone_mutex(caller.zone_id));
    try {
      store_->insert_annotation(a);
    } catch (const Conflict&) {
      throw Conflict("address " + a.address + " is already annotated on case " + a.case_id);
    }
  }
  std::scoped_lock lock(snapshot_mutex_);
  ++annotation_version_;
  return a;
}

void CaseService::relink() {
  std::scoped_lock compute(compute_mutex_);
  std::uint64_t version;
  std::uint64_t generation;
  {
    std::scoped_lock lock(snapshot_mutex_);
    version = annotation_version_;
    generation = snapshot_ ? snapshot_->generation + 1 : 1;
  }

  auto snap = std::make_shared<Snapshot>();
  snap->generation = generation;
  std::map<std::string, std::size_t> index;
  std::vector<CaseRecord> records;
  for (const auto& c : store_->cases()) {
    index.emplace(c.case_id, records.size());
    records.push_back(CaseRecord{parse_file_number(c.case_id), c.category, {}, c.zone_id});
    snap->case_zone.emplace(c.case_id, c.zone_id);
  }
  for (const auto& a : store_->all_annotations()) {
    if (const auto it = index.find(a.case_id); it != index.end()) {
      records[it->second].seed_addresses.push_back({a.address, a.role});
    }
  }
  const EntityPartition* partition = analysis_ ? &analysis_->partition() : nullptr;
  const EntityGraph* graph = analysis_ ? &analysis_->graph() : nullptr;
  snap->linker = std::make_unique<CaseLinker>(std::move(records), partition, graph, link_options_);
  for (const auto level : {LinkLevel::address, LinkLevel::entity, LinkLevel::collector}) {
    snap->levels.push_back(snap->linker->link(level));
  }

  std::scoped_lock lock(snapshot_mutex_);
  snapshot_ = std::move(snap);
  linked_version_ = version;
}

void CaseService::relink_worker() {
  for (;;) {
    relink();
    std::scoped_lock lock(relink_mutex_);
    if (relink_again_) {
      relink_again_ = false;
      continue;
    }
    relink_running_ = false;
    relink_cv_.notify_all();
    return;
  }
}

void CaseService::request_relink() {
  std::scoped_lock lock(relink_mutex_);
  if (relink_running_) {
    relink_again_ = true;
    return;
  }
  relink_running_ = true;
  if (relink_thread_.joinable()) relink_thread_.join();
  relink_thread_ = std::jthread([this] { relink_worker(); });
}

void CaseService::wait_for_relink() {
  std::unique_lock lock(relink_mutex_);
  relink_cv_.wait(lock, [this] { return !relink_running_; });
}

bool CaseService::stale() const {
  std::scoped_lock lock(snapshot_mutex_);
  return annotation_version_ != linked_version_;
}

std::shared_ptr<const CaseService::Snapshot> CaseService::snapshot() const {
  std::scoped_lock lock(snapshot_mutex_);
  return snapshot_;
}

ClusterView CaseService::list_case_clusters(const Caller& caller, LinkLevel level) const {
  ClusterView view;
  view.level = level;
  view.stale = stale();
  const auto snap = snapshot();
  if (!snap) return view;
  view.generation = snap->generation;

  const auto readable = readable_zones(caller.zone_id);
  const auto& clustering = snap->levels.at(static_cast<std::size_t>(level));
  for (const auto& cluster : clustering.clusters) {
    ClusterCard card;
    std::set<Evidence> visible_evidence;
    for (const auto& id : cluster.case_ids) {
      if (!readable.contains(snap->case_zone.find(id)->second)) {
        ++card.anonymized_stubs;
        continue;
      }
      card.case_ids.push_back(id);
      const auto idx = snap->linker->index_of(id);
      for (const auto& e : snap->linker->evidence(*idx, level)) visible_evidence.insert(e);
    }
    if (card.case_ids.empty()) continue;
    for (const auto& e : cluster.shared_evidence) {
      if (visible_evidence.contains(e)) card.shared_evidence.push_back(e);
    }
    card.inflow = cluster.inflow;
    card.contains_service_evidence = cluster.contains_service_evidence;
    view.clusters.push_back(std::move(card));
  }
  return view;
}

CaseNetwork CaseService::network(const Caller& caller, LinkLevel level) const {
  const auto snap = snapshot();
  if (!snap) return CaseNetwork{level, {}, {}};
  const auto readable = readable_zones(caller.zone_id);
  CaseClustering visible;
  visible.level = level;
  for (const auto& cluster : snap->levels.at(static_cast<std::size_t>(level)).clusters) {
    CaseCluster c;
    for (const auto& id : cluster.case_ids) {
      if (readable.contains(snap->case_zone.find(id)->second)) c.case_ids.push_back(id);
    }
    if (!c.case_ids.empty()) visible.clusters.push_back(std::move(c));
  }
  return snap->linker->network(visible);
}

ExchangeRequest CaseService::log_exchange_request(const Caller& caller, std::string_view address,
                                                  std::string_view exchange) {
  if (address.empty()) throw InvalidArgument("address must not be empty");
  if (exchange.empty()) throw InvalidArgument("exchange must not be empty");
  std::scoped_lock lock(zone_mutex(caller.zone_id));
  return store_->append_request(
      ExchangeRequest{0, std::string(address), std::string(exchange), clock_(), caller.zone_id});
}

RequestLookup CaseService::was_requested(const Caller& caller, std::string_view address) const {
  RequestLookup out;
  const auto all = store_->requests(address);
  const auto readable = readable_zones(caller.zone_id);
  for (const auto& r : all) {
    if (r.zone_id != caller.zone_id) out.any_other_zone_requested = true;
    if (!readable.contains(r.zone_id)) continue;
    const bool duplicate = std::any_of(all.begin(), all.end(), [&](const auto& o) { return o.zone_id != r.zone_id; });
    out.entries.push_back({r, duplicate});
  }
  return out;
}

}  // namespace caselink
