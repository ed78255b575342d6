#include "caselink/case_store.hpp"

#include <sqlite3.h>

#include "caselink/errors.hpp"

namespace caselink {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS zones (
  zone_id TEXT PRIMARY KEY,
  name    TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS zone_grants (
  zone_id        TEXT NOT NULL REFERENCES zones(zone_id),
  reader_zone_id TEXT NOT NULL REFERENCES zones(zone_id),
  PRIMARY KEY (zone_id, reader_zone_id)
);
CREATE TABLE IF NOT EXISTS members (
  token_hash TEXT PRIMARY KEY,
  zone_id    TEXT NOT NULL REFERENCES zones(zone_id),
  member     TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS cases (
  case_id  TEXT PRIMARY KEY,
  zone_id  TEXT NOT NULL REFERENCES zones(zone_id),
  category TEXT NOT NULL CHECK (category IN ('cyberfraud', 'sextortion'))
);
CREATE TABLE IF NOT EXISTS annotations (
  case_id    TEXT NOT NULL REFERENCES cases(case_id),
  address    TEXT NOT NULL,
  role       TEXT NOT NULL CHECK (role IN ('victim', 'perpetrator')),
  author     TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  PRIMARY KEY (case_id, address)
);
CREATE TABLE IF NOT EXISTS exchange_requests (
  id           INTEGER PRIMARY KEY AUTOINCREMENT,
  address      TEXT NOT NULL,
  exchange     TEXT NOT NULL,
  requested_at INTEGER NOT NULL,
  zone_id      TEXT NOT NULL REFERENCES zones(zone_id)
);
CREATE INDEX IF NOT EXISTS exchange_requests_by_address ON exchange_requests(address);
)sql";

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw std::runtime_error(std::string("sqlite prepare: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, std::string_view v) {
    sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& bind(int i, std::int64_t v) {
    sqlite3_bind_int64(stmt_, i, v);
    return *this;
  }

  /// True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    if ((rc & 0xff) == SQLITE_CONSTRAINT) throw Conflict(sqlite3_errmsg(db_));
    throw std::runtime_error(std::string("sqlite step: ") + sqlite3_errmsg(db_));
  }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw std::runtime_error("sqlite: " + msg);
  }
}

CaseAnnotation read_annotation(const Statement& s) {
  return {s.text(0), s.text(1), parse_role(s.text(2)), s.text(3), s.integer(4)};
}

}  // namespace

SqliteCaseStore::SqliteCaseStore(const std::filesystem::path& path) {
  if (sqlite3_open(path.string().c_str(), &db_) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw std::runtime_error("cannot open database " + path.string() + ": " + msg);
  }
  exec(db_, "PRAGMA journal_mode=WAL; PRAGMA foreign_keys=ON; PRAGMA synchronous=NORMAL;");
  exec(db_, kSchema);
}

SqliteCaseStore::~SqliteCaseStore() { sqlite3_close(db_); }

void SqliteCaseStore::create_zone(const Zone& zone) {
  std::scoped_lock lock(mutex_);
  exec(db_, "BEGIN IMMEDIATE");
  try {
    Statement s(db_, "INSERT INTO zones(zone_id, name) VALUES (?, ?)");
    s.bind(1, zone.zone_id).bind(2, zone.name).step();
    for (const auto& reader : zone.readable_by) {
      if (reader == zone.zone_id) continue;
      Statement g(db_, "INSERT OR IGNORE INTO zone_grants(zone_id, reader_zone_id) VALUES (?, ?)");
      g.bind(1, zone.zone_id).bind(2, reader);
      try {
        g.step();
      } catch (const Conflict&) {
        throw NotFound("unknown reader zone " + reader);
      }
    }
    exec(db_, "COMMIT");
  } catch (...) {
    exec(db_, "ROLLBACK");
    throw;
  }
}

std::set<std::string> SqliteCaseStore::grants_of(std::string_view target) const {
  Statement s(db_, "SELECT reader_zone_id FROM zone_grants WHERE zone_id = ? ORDER BY reader_zone_id");
  s.bind(1, target);
  std::set<std::string> out;
  while (s.step()) out.insert(s.text(0));
  return out;
}

std::optional<Zone> SqliteCaseStore::find_zone(std::string_view zone_id) const {
  std::scoped_lock lock(mutex_);
  Statement s(db_, "SELECT zone_id, name FROM zones WHERE zone_id = ?");
  s.bind(1, zone_id);
  if (!s.step()) return std::nullopt;
  return Zone{s.text(0), s.text(1), grants_of(zone_id)};
}

std::vector<Zone> SqliteCaseStore::zones() const {
  std::scoped_lock lock(mutex_);
  Statement s(db_, "SELECT zone_id, name FROM zones ORDER BY zone_id");
  std::vector<Zone> out;
  while (s.step()) out.push_back({s.text(0), s.text(1), {}});
  for (auto& z : out) z.readable_by = grants_of(z.zone_id);
  return out;
}

void SqliteCaseStore::add_grant(std::string_view target, std::string_view reader) {
  std::scoped_lock lock(mutex_);
  if (target == reader) return;
  Statement s(db_, "INSERT OR IGNORE INTO zone_grants(zone_id, reader_zone_id) VALUES (?, ?)");
  s.bind(1, target).bind(2, reader);
  try {
    s.step();
  } catch (const Conflict&) {
    throw NotFound("unknown zone in grant");
  }
}

void SqliteCaseStore::add_member(std::string_view token_hash, const Member& member) {
  std::scoped_lock lock(mutex_);
  Statement s(db_, "INSERT INTO members(token_hash, zone_id, member) VALUES (?, ?, ?)");
  s.bind(1, token_hash).bind(2, member.zone_id).bind(3, member.member).step();
}

std::optional<Member> SqliteCaseStore::find_member(std::string_view token_hash) const {
  std::scoped_lock lock(mutex_);
  Statement s(db_, "SELECT zone_id, member FROM members WHERE token_hash = ?");
  s.bind(1, token_hash);
  if (!s.step()) return std::nullopt;
  return Member{s.text(0), s.text(1)};
}

void SqliteCaseStore::insert_case(const StoredCase& c) {
  std::scoped_lock lock(mutex_);
  Statement s(db_, "INSERT INTO cases(case_id, zone_id, category) VALUES (?, ?, ?)");
  s.bind(1, c.case_id).bind(2, c.zone_id).bind(3, to_string(c.category)).step();
}

std::optional<StoredCase> SqliteCaseStore::find_case(std::string_view case_id) const {
  std::scoped_lock lock(mutex_);
  Statement s(db_, "SELECT case_id, zone_id, category FROM cases WHERE case_id = ?");
  s.bind(1, case_id);
  if (!s.step()) return std::nullopt;
  return StoredCase{s.text(0), s.text(1), parse_case_category(s.text(2))};
}

std::vector<StoredCase> SqliteCaseStore::cases() const {
  std::scoped_lock lock(mutex_);
  Statement s(db_, "SELECT case_id, zone_id, category FROM cases ORDER BY case_id");
  std::vector<StoredCase> out;
  while (s.step()) out.push_back({s.text(0), s.text(1), parse_case_category(s.text(2))});
  return out;
}

void SqliteCaseStore::insert_annotation(const CaseAnnotation& a) {
  std::scoped_lock lock(mutex_);
  Statement s(db_,
              "INSERT INTO annotations(case_id, address, role, author, created_at) VALUES (?, ?, ?, ?, ?)");
  s.bind(1, a.case_id).bind(2, a.address).bind(3, to_string(a.role)).bind(4, a.author).bind(5, a.created_at).step();
}

std::vector<CaseAnnotation> SqliteCaseStore::annotations(std::string_view case_id) const {
  std::scoped_lock lock(mutex_);
  Statement s(db_,
              "SELECT case_id, address, role, author, created_at FROM annotations WHERE case_id = ? "
              "ORDER BY created_at, address");
  s.bind(1, case_id);
  std::vector<CaseAnnotation> out;
  while (s.step()) out.push_back(read_annotation(s));
  return out;
}

std::vector<CaseAnnotation> SqliteCaseStore::all_annotations() const {
  std::scoped_lock lock(mutex_);
  Statement s(db_, "SELECT case_id, address, role, author, created_at FROM annotations ORDER BY case_id, address");
  std::vector<CaseAnnotation> out;
  while (s.step()) out.push_back(read_annotation(s));
  return out;
}

ExchangeRequest SqliteCaseStore::append_request(const ExchangeRequest& r) {
  std::scoped_lock lock(mutex_);
  Statement s(db_, "INSERT INTO exchange_requests(address, exchange, requested_at, zone_id) VALUES (?, ?, ?, ?)");
  s.bind(1, r.address).bind(2, r.exchange).bind(3, r.requested_at).bind(4, r.zone_id).step();
  auto stored = r;
  stored.id = sqlite3_last_insert_rowid(db_);
  return stored;
}

std::vector<ExchangeRequest> SqliteCaseStore::requests(std::string_view address) const {
  std::scoped_lock lock(mutex_);
  Statement s(db_,
              "SELECT id, address, exchange, requested_at, zone_id FROM exchange_requests WHERE address = ? "
              "ORDER BY id");
  s.bind(1, address);
  std::vector<ExchangeRequest> out;
  while (s.step()) out.push_back({s.integer(0), s.text(1), s.text(2), s.integer(3), s.text(4)});
  return out;
}

std::vector<std::string> SqliteCaseStore::schema_columns() const {
  std::scoped_lock lock(mutex_);
  Statement tables(db_, "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' ORDER BY name");
  std::vector<std::string> names;
  while (tables.step()) names.push_back(tables.text(0));
  std::vector<std::string> out;
  for (const auto& t : names) {
    Statement cols(db_, ("PRAGMA table_info(" + t + ")").c_str());
    while (cols.step()) out.push_back(t + "." + cols.text(1));
  }
  return out;
}

}  // namespace caselink
