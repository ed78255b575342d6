#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

#include <CLI11.hpp>

#include "caselink/analysis.hpp"
#include "caselink/case_service.hpp"
#include "caselink/case_store.hpp"
#include "caselink/digest.hpp"
#include "caselink/errors.hpp"
#include "caselink/http_api.hpp"
#include "caselink/ingest.hpp"
#include "caselink/pipeline.hpp"
#include "caselink/synth.hpp"

namespace fs = std::filesystem;
using namespace caselink;

namespace {

struct GlobalFlags {
  std::string config;
  unsigned threads = 0;
  std::string out_dir;
  std::string coinjoin_policy;
};

PipelineConfig load_config(const GlobalFlags& g) {
  if (g.config.empty()) throw InvalidArgument("--config is required");
  auto c = PipelineConfig::load(g.config);
  if (g.threads > 0) c.threads = g.threads;
  if (!g.out_dir.empty()) c.out_dir = g.out_dir;
  if (!g.coinjoin_policy.empty()) {
    parse_coinjoin_policy(g.coinjoin_policy);
    c.coinjoin_policy = g.coinjoin_policy;
  }
  return c;
}

int run_target(PipelineConfig config, PipelineTarget target) {
  const auto manifest = run_pipeline(config, target);
  std::cout << "wrote " << manifest.output_digests.size() << " outputs and manifest.json to "
            << config.out_dir.string() << '\n';
  return 0;
}

std::pair<std::string, int> split_host_port(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw InvalidArgument("--listen expects host:port");
  return {listen.substr(0, colon), std::stoi(listen.substr(colon + 1))};
}

int serve(const std::string& db, const std::string& listen, std::string admin_token, const GlobalFlags& g) {
  std::shared_ptr<const Analysis> analysis;
  if (!g.config.empty()) {
    const auto c = load_config(g);
    std::ifstream txs(c.transactions, std::ios::binary);
    if (!txs) throw NotFound("cannot open transactions file " + c.transactions.string());
    std::vector<AttributionTag> tags;
    if (!c.tags.empty()) {
      std::ifstream t(c.tags, std::ios::binary);
      if (!t) throw NotFound("cannot open tags file " + c.tags.string());
      tags = parse_tags(t);
    }
    GraphOptions go;
    go.service_size_threshold = c.service_size_threshold;
    analysis = Analysis::build(parse_transactions(txs, c.transactions_format), std::move(tags),
                               parse_coinjoin_policy(c.coinjoin_policy), go, c.threads);
    std::cerr << "loaded ledger: " << analysis->ledger().size() << " transactions\n";
  }
  if (admin_token.empty()) {
    if (const char* env = std::getenv("CASELINK_ADMIN_TOKEN")) admin_token = env;
  }
  if (admin_token.empty()) {
    admin_token = random_token();
    std::cerr << "admin token: " << admin_token << '\n';
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  CaseService service(std::make_unique<SqliteCaseStore>(db), analysis);
  service.relink();
  HttpApi api(service, admin_token);
  const auto [host, port] = split_host_port(listen);

  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    api.stop();
  });
  std::cerr << "listening on " << host << ':' << port << '\n';
  const bool ok = api.listen(host, port);
  if (waiter.joinable()) pthread_kill(waiter.native_handle(), SIGTERM);
  if (!ok) {
    std::cerr << "error: cannot listen on " << listen << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Case linkage for cryptoasset-related police cases"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config, "key=value run configuration")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "worker threads (overrides config; default 1)");
  app.add_option("--out-dir", g.out_dir, "output directory (overrides config; default out)");
  app.add_option("--coinjoin-policy", g.coinjoin_policy, "default | off | custom:<path>");
  app.footer(
      "Config keys and defaults:\n"
      "  transactions=<path>              required\n"
      "  transactions_format=jsonl|csv    jsonl\n"
      "  tags=<path>                      none\n"
      "  rates=<path>                     none (required when eur_outputs=true)\n"
      "  cases=<path>                     required\n"
      "  coinjoin_policy=...              default\n"
      "  service_size_threshold=<n>       10000\n"
      "  min_collector_sources=<n>        1\n"
      "  levels=address,entity,collector  all three\n"
      "  eur_outputs=true|false           true\n"
      "  exclude_service=true|false       true\n"
      "  distribution_edges=<list>        10,100,1000,10000,100000,1000000\n"
      "  threads=<n>                      1\n"
      "  out_dir=<path>                   out");

  auto* run = app.add_subcommand("run", "all stages, all outputs");
  auto* ingest = app.add_subcommand("ingest", "parse and validate inputs, write ingest.json");

  auto* link = app.add_subcommand("link", "cluster, build entity graph and link cases");
  std::string link_level;
  unsigned min_sources = 0;
  bool link_export = false;
  link->add_option("--level", link_level, "address | entity | collector (default all)");
  link->add_option("--min-collector-sources", min_sources, "overrides config");
  link->add_flag("--export", link_export, "also write network dumps");

  auto* stats = app.add_subcommand("stats", "inflow series, value distribution, victim estimate");

  auto* exp = app.add_subcommand("export", "write case networks as JSON and DOT");
  std::string export_level;
  exp->add_option("--level", export_level, "address | entity | collector (default all)");

  auto* gen = app.add_subcommand("gen", "generate a synthetic scenario with ground truth");
  std::string spec_path, gen_out;
  gen->add_option("--spec", spec_path, "key=value scenario spec")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "output directory")->required();

  auto* srv = app.add_subcommand("serve", "run the case service HTTP API");
  std::string db = "caselink.db", listen = "127.0.0.1:8080", admin_token;
  srv->add_option("--db", db, "SQLite database file");
  srv->add_option("--listen", listen, "host:port");
  srv->add_option("--admin-token", admin_token, "token for zone administration (or CASELINK_ADMIN_TOKEN)");

  auto* admin = app.add_subcommand("admin", "provision zones and tokens directly in the database");
  admin->require_subcommand(1);
  std::string admin_db = "caselink.db", zone_id, zone_name, member = "admin", reader;
  admin->add_option("--db", admin_db, "SQLite database file");
  auto* create_zone = admin->add_subcommand("create-zone", "create a zone and print its first token");
  create_zone->add_option("--zone", zone_id)->required();
  create_zone->add_option("--name", zone_name);
  create_zone->add_option("--member", member);
  auto* grant = admin->add_subcommand("grant", "let --reader read cases of --zone");
  grant->add_option("--zone", zone_id)->required();
  grant->add_option("--reader", reader)->required();
  auto* issue = admin->add_subcommand("issue-token", "print a new token for a zone member");
  issue->add_option("--zone", zone_id)->required();
  issue->add_option("--member", member)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_target(load_config(g), PipelineTarget::all);
    if (*ingest) return run_target(load_config(g), PipelineTarget::ingest);
    if (*link) {
      auto c = load_config(g);
      if (!link_level.empty()) c.levels = {parse_link_level(link_level)};
      if (min_sources > 0) c.min_collector_sources = min_sources;
      return run_target(c, link_export ? PipelineTarget::link_and_export : PipelineTarget::link);
    }
    if (*stats) return run_target(load_config(g), PipelineTarget::stats);
    if (*exp) {
      auto c = load_config(g);
      if (!export_level.empty()) c.levels = {parse_link_level(export_level)};
      return run_target(c, PipelineTarget::export_network);
    }
    if (*gen) {
      std::ifstream in(spec_path);
      const auto spec = synth::parse_scenario_spec(in);
      const auto scenario = synth::generate(spec);
      synth::write_scenario(scenario, spec, gen_out);
      std::cout << "wrote scenario to " << gen_out << '\n';
      return 0;
    }
    if (*srv) return serve(db, listen, admin_token, g);
    if (*admin) {
      CaseService service(std::make_unique<SqliteCaseStore>(admin_db));
      if (*create_zone) {
        std::cout << service.create_zone(Zone{zone_id, zone_name, {}}, member) << '\n';
      } else if (*grant) {
        service.grant_read(zone_id, reader);
      } else if (*issue) {
        std::cout << service.issue_token(zone_id, member) << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
