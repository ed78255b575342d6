#include "support.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <sstream>

#include "caselink/ingest.hpp"
#include "caselink/ledger.hpp"

namespace testing {

using namespace caselink;
namespace fs = std::filesystem;

fs::path fixture(const std::string& relative) { return fs::path(CASELINK_FIXTURES) / relative; }

DeskFixture load_desk() {
  DeskFixture d;
  std::ifstream txs(fixture("desk/transactions.jsonl"));
  d.transactions = parse_transactions(txs, TxFormat::jsonl);
  std::ifstream tags(fixture("desk/tags.csv"));
  d.tags = parse_tags(tags);
  std::ifstream rates(fixture("desk/rates.csv"));
  d.rates = parse_rates(rates);
  std::ifstream cases(fixture("desk/cases.csv"));
  d.cases = parse_cases(cases);
  return d;
}

Transaction tx(std::string id, Timestamp ts, std::vector<TxLeg> in, std::vector<TxLeg> out) {
  return Transaction{std::move(id), ts, std::move(in), std::move(out)};
}

CaseRecord make_case(int sequence, std::vector<std::string> perpetrators, std::vector<std::string> victims,
                     std::string zone) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "BY1000-%06d-22/0", sequence);
  CaseRecord c;
  c.case_id = parse_file_number(buf);
  c.zone_id = std::move(zone);
  for (auto& a : perpetrators) c.seed_addresses.push_back({std::move(a), Role::perpetrator});
  for (auto& a : victims) c.seed_addresses.push_back({std::move(a), Role::victim});
  return c;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("caselink-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<Transaction> random_ledger(std::mt19937_64& rng, std::size_t max_txs, std::size_t max_addresses) {
  std::uniform_int_distribution<std::size_t> n_tx(1, max_txs);
  std::uniform_int_distribution<std::size_t> n_addr(2, max_addresses);
  const auto txs = n_tx(rng);
  const auto addrs = n_addr(rng);
  std::uniform_int_distribution<std::size_t> pick(0, addrs - 1);
  std::uniform_int_distribution<int> legs(1, 4);
  std::uniform_int_distribution<Satoshi> value(1, 5'000'000);
  std::bernoulli_distribution coinbase(0.05);

  auto name = [](std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "a%03zu", i);
    return std::string(buf);
  };

  std::vector<Transaction> out;
  for (std::size_t t = 0; t < txs; ++t) {
    Transaction x;
    x.tx_id = "r" + std::to_string(t);
    x.timestamp = 1'600'000'000 + static_cast<Timestamp>(t) * 600;
    if (coinbase(rng)) {
      x.inputs.push_back({std::string(kCoinbaseAddress), 625'000'000});
    } else {
      for (int i = legs(rng); i > 0; --i) x.inputs.push_back({name(pick(rng)), value(rng)});
    }
    for (int i = legs(rng); i > 0; --i) x.outputs.push_back({name(pick(rng)), value(rng)});
    out.push_back(std::move(x));
  }
  return out;
}

Partition cospend_components(const std::vector<Transaction>& txs, const std::set<std::string>& skip) {
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& t : txs) {
    if (t.is_coinbase()) {
      for (const auto& o : t.outputs) adj[o.address];
      continue;
    }
    for (const auto& i : t.inputs) adj[i.address];
    for (const auto& o : t.outputs) adj[o.address];
    if (skip.contains(t.tx_id)) continue;
    for (const auto& a : t.inputs) {
      for (const auto& b : t.inputs) {
        if (a.address != b.address) adj[a.address].insert(b.address);
      }
    }
  }
  Partition result;
  std::set<std::string> seen;
  for (const auto& [start, _] : adj) {
    if (seen.contains(start)) continue;
    std::set<std::string> component;
    std::vector<std::string> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      auto a = stack.back();
      stack.pop_back();
      component.insert(a);
      for (const auto& b : adj[a]) {
        if (seen.insert(b).second) stack.push_back(b);
      }
    }
    result.insert(std::move(component));
  }
  return result;
}

Partition partition_sets(const EntityPartition& partition) {
  Partition result;
  const auto& ledger = partition.ledger();
  for (const auto e : partition.entities()) {
    std::set<std::string> members;
    for (const auto a : partition.members(e)) members.insert(ledger.address(a));
    result.insert(std::move(members));
  }
  return result;
}

Grouping grouping(const CaseClustering& clustering) {
  Grouping g;
  for (const auto& c : clustering.clusters) g.insert({c.case_ids.begin(), c.case_ids.end()});
  return g;
}

bool refines(const Grouping& fine, const Grouping& coarse) {
  std::map<std::string, const std::set<std::string>*> owner;
  for (const auto& g : coarse) {
    for (const auto& id : g) owner[id] = &g;
  }
  for (const auto& g : fine) {
    const std::set<std::string>* home = nullptr;
    for (const auto& id : g) {
      const auto it = owner.find(id);
      if (it == owner.end()) return false;
      if (home && home != it->second) return false;
      home = it->second;
    }
  }
  return true;
}

}  // namespace testing
