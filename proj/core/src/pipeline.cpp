#include "caselink/pipeline.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "caselink/digest.hpp"
#include "caselink/entity_graph.hpp"
#include "caselink/entity_partition.hpp"
#include "caselink/errors.hpp"
#include "caselink/flow_stats.hpp"
#include "caselink/keyvalue.hpp"
#include "caselink/ledger.hpp"

namespace caselink {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    auto item = s.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

fs::path resolve(const fs::path& base, std::string_view value) {
  fs::path p{std::string(value)};
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::ifstream open_input(const fs::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + std::string(what) + " file " + path.string());
  return in;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
    const auto path = dir_ / name;
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      fill(out);
      if (!out) throw std::runtime_error("write failed for " + path.string());
    }
    digests_[name] = sha256_file(path);
  }

  void write_text(const std::string& name, const std::string& text) {
    write(name, [&](std::ostream& out) { out << text; });
  }

  const std::map<std::string, std::string>& digests() const noexcept { return digests_; }
  const fs::path& path() const noexcept { return dir_; }

 private:
  fs::path dir_;
  std::map<std::string, std::string> digests_;
};

void write_clusters_csv(std::ostream& out, const CaseClustering& clustering) {
  out << "cluster,size,case_id,inflow_satoshi,contains_service_evidence\n";
  for (std::size_t i = 0; i < clustering.clusters.size(); ++i) {
    const auto& c = clustering.clusters[i];
    for (const auto& id : c.case_ids) {
      out << i << ',' << c.size() << ',' << id << ',' << c.inflow << ','
          << (c.contains_service_evidence ? "true" : "false") << '\n';
    }
  }
}

nlohmann::ordered_json linkage_json(const CaseClustering& clustering) {
  nlohmann::ordered_json j;
  j["cases"] = clustering.case_count();
  j["clusters"] = clustering.clusters.size();
  j["singletons"] = clustering.singleton_count();
  j["linkage_rate"] = linkage_rate(clustering);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : cluster_breakdown(clustering)) {
    rows.push_back({{"cluster_size", r.cluster_size},
                    {"cluster_count", r.cluster_count},
                    {"inflow_satoshi", r.inflow},
                    {"service_flag", r.service_flag}});
  }
  j["breakdown"] = std::move(rows);
  return j;
}

}  // namespace

std::string_view tool_version() noexcept { return CASELINK_VERSION; }

PipelineConfig PipelineConfig::parse(std::string_view text, const fs::path& base_dir) {
  std::istringstream in{std::string(text)};
  PipelineConfig c;
  for (const auto& [key, value] : parse_key_values(in)) {
    try {
      if (key == "transactions") {
        c.transactions = resolve(base_dir, value);
      } else if (key == "transactions_format") {
        c.transactions_format = parse_tx_format(value);
      } else if (key == "tags") {
        c.tags = resolve(base_dir, value);
      } else if (key == "rates") {
        c.rates = resolve(base_dir, value);
      } else if (key == "cases") {
        c.cases = resolve(base_dir, value);
      } else if (key == "coinjoin_policy") {
        constexpr std::string_view custom = "custom:";
        if (value.rfind(custom, 0) == 0) {
          c.coinjoin_policy = "custom:" + resolve(base_dir, value.substr(custom.size())).string();
        } else {
          c.coinjoin_policy = value;
        }
        parse_coinjoin_policy(c.coinjoin_policy);
      } else if (key == "service_size_threshold") {
        c.service_size_threshold = parse_uint_value(value);
      } else if (key == "min_collector_sources") {
        c.min_collector_sources = static_cast<unsigned>(parse_uint_value(value));
      } else if (key == "levels") {
        c.levels.clear();
        for (const auto& l : split_list(value)) c.levels.push_back(parse_link_level(l));
        if (c.levels.empty()) throw InvalidArgument("levels must not be empty");
      } else if (key == "eur_outputs") {
        c.eur_outputs = parse_bool_value(value);
      } else if (key == "exclude_service") {
        c.exclude_service = parse_bool_value(value);
      } else if (key == "distribution_edges") {
        c.distribution_edges.clear();
        for (const auto& e : split_list(value)) c.distribution_edges.push_back(parse_double_value(e));
      } else if (key == "threads") {
        c.threads = static_cast<unsigned>(parse_uint_value(value));
      } else if (key == "out_dir") {
        c.out_dir = resolve(base_dir, value);
      } else {
        throw InvalidArgument("unknown key");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(key + ": " + e.what());
    }
  }
  if (c.threads == 0) c.threads = 1;
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  auto in = open_input(path, "config");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.parent_path());
}

std::map<std::string, std::string> PipelineConfig::snapshot() const {
  std::string levels_text;
  for (auto l : levels) {
    if (!levels_text.empty()) levels_text += ',';
    levels_text += to_string(l);
  }
  std::string edges_text;
  for (double e : distribution_edges.empty() ? default_bucket_edges() : distribution_edges) {
    if (!edges_text.empty()) edges_text += ',';
    edges_text += format_double(e);
  }
  return {
      {"transactions", transactions.string()},
      {"transactions_format", transactions_format == TxFormat::jsonl ? "jsonl" : "csv"},
      {"tags", tags.string()},
      {"rates", rates.string()},
      {"cases", cases.string()},
      {"coinjoin_policy", coinjoin_policy},
      {"service_size_threshold", std::to_string(service_size_threshold)},
      {"min_collector_sources", std::to_string(min_collector_sources)},
      {"levels", levels_text},
      {"eur_outputs", eur_outputs ? "true" : "false"},
      {"exclude_service", exclude_service ? "true" : "false"},
      {"distribution_edges", edges_text},
      {"threads", std::to_string(threads)},
      {"out_dir", out_dir.string()},
  };
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool_version"] = tool_version;
  j["config"] = config;
  j["inputs"] = input_digests;
  j["outputs"] = output_digests;
  return j.dump(1) + "\n";
}

RunManifest run_pipeline(const PipelineConfig& config, PipelineTarget target) {
  RunManifest manifest;
  manifest.tool_version = std::string(tool_version());
  manifest.config = config.snapshot();

  const bool want_link = target == PipelineTarget::link || target == PipelineTarget::link_and_export ||
                         target == PipelineTarget::all;
  const bool want_stats = target == PipelineTarget::stats || target == PipelineTarget::all;
  const bool want_network = target == PipelineTarget::export_network ||
                            target == PipelineTarget::link_and_export || target == PipelineTarget::all;

  struct Inputs {
    std::unique_ptr<Ledger> ledger;
    std::vector<AttributionTag> tags;
    ActiveCases cases;
  };
  auto inputs = stage("ingest", [&] {
    if (config.transactions.empty()) throw InvalidArgument("config lacks 'transactions'");
    if (config.cases.empty()) throw InvalidArgument("config lacks 'cases'");
    Inputs result;
    {
      auto in = open_input(config.transactions, "transactions");
      result.ledger = std::make_unique<Ledger>(parse_transactions(in, config.transactions_format));
    }
    manifest.input_digests["transactions"] = sha256_file(config.transactions);
    if (!config.tags.empty()) {
      auto in = open_input(config.tags, "tags");
      result.tags = parse_tags(in);
      manifest.input_digests["tags"] = sha256_file(config.tags);
    }
    auto in = open_input(config.cases, "cases");
    const auto cases = parse_cases(in);
    manifest.input_digests["cases"] = sha256_file(config.cases);
    result.cases = filter_active_cases(cases, *result.ledger);
    return result;
  });
  const Ledger& ledger = *inputs.ledger;

  OutputDir out = stage("export", [&] { return OutputDir(config.out_dir); });

  const auto write_manifest = [&] {
    stage("export", [&] {
      manifest.output_digests = out.digests();
      std::ofstream f(out.path() / "manifest.json", std::ios::binary | std::ios::trunc);
      f << manifest.to_json();
      if (!f) throw std::runtime_error("cannot write manifest.json");
    });
    return manifest;
  };

  if (target == PipelineTarget::ingest) {
    stage("export", [&] {
      nlohmann::ordered_json j{{"transactions", ledger.size()},
                               {"addresses", ledger.address_count()},
                               {"tags", inputs.tags.size()},
                               {"active_cases", inputs.cases.active.size()},
                               {"inactive_addresses", inputs.cases.inactive_addresses}};
      out.write_text("ingest.json", j.dump(1) + "\n");
    });
    return write_manifest();
  }

  const auto verdicts = stage("coinjoin", [&] {
    return classify_all(ledger, parse_coinjoin_policy(config.coinjoin_policy), config.threads);
  });
  const auto partition = stage("cluster", [&] { return EntityPartition::build(ledger, verdicts, config.threads); });
  const auto graph = stage("graph", [&] {
    GraphOptions options;
    options.service_size_threshold = config.service_size_threshold;
    return EntityGraph::build(partition, verdicts, inputs.tags, options);
  });

  std::optional<CaseLinker> linker;
  std::vector<CaseClustering> clusterings;
  if (want_link || want_network) {
    stage("link", [&] {
      linker.emplace(inputs.cases.active, &partition, &graph, LinkOptions{config.min_collector_sources});
      for (auto level : config.levels) clusterings.push_back(linker->link(level));
    });
  }

  struct Stats {
    std::optional<InflowSeries> seed_series, expanded_series;
    std::optional<PaymentDistribution> distribution;
    VictimEstimate victims;
    Satoshi seed_inflow_satoshi = 0, expanded_inflow_satoshi = 0;
  };
  Stats stats;
  if (want_stats) {
    stats = stage("flow-stats", [&] {
      Stats s;
      std::set<std::string> seeds;
      for (const auto& c : inputs.cases.active) {
        for (const auto& a : c.perpetrator_addresses()) seeds.insert(a);
      }
      const auto expansion = expand(seeds, partition);
      s.victims = victim_estimate(seeds, ledger, expansion.expanded_addresses);
      if (config.eur_outputs) {
        if (config.rates.empty()) throw InvalidArgument("EUR outputs requested but config lacks 'rates'");
        auto in = open_input(config.rates, "rates");
        const FxTable fx(parse_rates(in));
        manifest.input_digests["rates"] = sha256_file(config.rates);
        s.seed_series = inflow_series(graph, seeds, InflowScope::seed, fx, config.exclude_service);
        s.expanded_series = inflow_series(graph, seeds, InflowScope::expanded, fx, config.exclude_service);
        const auto edges = config.distribution_edges.empty() ? default_bucket_edges() : config.distribution_edges;
        s.distribution = value_distribution(s.expanded_series->payments, fx, edges);
        for (const auto& p : s.seed_series->payments) s.seed_inflow_satoshi += p.value;
        for (const auto& p : s.expanded_series->payments) s.expanded_inflow_satoshi += p.value;
      }
      return s;
    });
  }

  stage("export", [&] {
    if (want_link) {
      out.write("partition.csv", [&](std::ostream& o) { partition.write_dump(o); });
      out.write("graph.csv", [&](std::ostream& o) { graph.write_dump(o); });
      nlohmann::ordered_json linkage;
      linkage["active_cases"] = inputs.cases.active.size();
      linkage["inactive_addresses"] = inputs.cases.inactive_addresses;
      linkage["coinjoin_transactions"] =
          std::count_if(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.is_coinjoin; });
      for (const auto& c : clusterings) {
        linkage["levels"][std::string(to_string(c.level))] = linkage_json(c);
        out.write("clusters_" + std::string(to_string(c.level)) + ".csv",
                  [&](std::ostream& o) { write_clusters_csv(o, c); });
      }
      out.write_text("linkage.json", linkage.dump(1) + "\n");
    }
    if (want_network) {
      for (const auto& c : clusterings) {
        const auto net = linker->network(c);
        const auto stem = "network_" + std::string(to_string(c.level));
        out.write_text(stem + ".json", export_network(net, NetworkFormat::json));
        out.write_text(stem + ".dot", export_network(net, NetworkFormat::dot));
      }
    }
    if (want_stats) {
      if (stats.seed_series) {
        out.write("inflow_seed.csv", [&](std::ostream& o) { write_series_csv(o, *stats.seed_series); });
        out.write_text("inflow_seed.json", series_json(*stats.seed_series));
        out.write("inflow_expanded.csv", [&](std::ostream& o) { write_series_csv(o, *stats.expanded_series); });
        out.write_text("inflow_expanded.json", series_json(*stats.expanded_series));
        out.write("distribution.csv", [&](std::ostream& o) { write_distribution_csv(o, *stats.distribution); });
      }
      nlohmann::ordered_json v{{"unique_senders", stats.victims.unique_senders},
                               {"incoming_transactions", stats.victims.incoming_transactions}};
      if (stats.seed_series) {
        v["seed_inflow_satoshi"] = stats.seed_inflow_satoshi;
        v["expanded_inflow_satoshi"] = stats.expanded_inflow_satoshi;
      }
      out.write_text("victims.json", v.dump(1) + "\n");
    }
  });
  return write_manifest();
}

RunManifest run_pipeline(const fs::path& config_path) {
  const auto config = stage("ingest", [&] { return PipelineConfig::load(config_path); });
  return run_pipeline(config);
}

}  // namespace caselink
