#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "caselink/case_link.hpp"
#include "caselink/coinjoin.hpp"
#include "caselink/ingest.hpp"

namespace caselink {

/// Flat key=value run configuration. Relative paths are resolved against the
/// directory of the config file.
///
///   transactions            ledger file (required)
///   transactions_format     jsonl | csv                        [jsonl]
///   tags                    attribution tags CSV               [none]
///   rates                   daily EUR/BTC rates CSV            [none]
///   cases                   case filings CSV (required)
///   coinjoin_policy         default | off | custom:<path>      [default]
///   service_size_threshold  addresses before an entity counts as a service [10000]
///   min_collector_sources   distinct perpetrator entities per collector    [1]
///   levels                  comma list of address,entity,collector         [all]
///   eur_outputs             write EUR inflow series and distribution       [true]
///   exclude_service         drop payments into service-like entities       [true]
///   distribution_edges      comma list of EUR bucket edges     [10,100,...,1e6]
///   threads                 worker threads                     [1]
///   out_dir                 output directory                   [out]
struct PipelineConfig {
  std::filesystem::path transactions;
  TxFormat transactions_format = TxFormat::jsonl;
  std::filesystem::path tags;
  std::filesystem::path rates;
  std::filesystem::path cases;
  std::string coinjoin_policy = "default";
  std::size_t service_size_threshold = 10000;
  unsigned min_collector_sources = 1;
  std::vector<LinkLevel> levels{LinkLevel::address, LinkLevel::entity, LinkLevel::collector};
  bool eur_outputs = true;
  bool exclude_service = true;
  std::vector<double> distribution_edges;
  unsigned threads = 1;
  std::filesystem::path out_dir = "out";

  /// Throws ParseError on unknown keys or bad values.
  static PipelineConfig parse(std::string_view text, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);

  /// Normalized key=value pairs, sorted by key.
  std::map<std::string, std::string> snapshot() const;
};

/// Which outputs a run writes. Stages always execute in the fixed order
/// ingest, coinjoin, cluster, graph, link, flow-stats, export, stopping after
/// the last stage the target needs.
enum class PipelineTarget { ingest, link, link_and_export, stats, export_network, all };

struct RunManifest {
  std::string tool_version;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> input_digests;   // input name -> sha256
  std::map<std::string, std::string> output_digests;  // file name -> sha256

  std::string to_json() const;
};

/// Runs the stages and writes outputs plus manifest.json into out_dir. Any
/// failure is rethrown as StageError naming the stage.
RunManifest run_pipeline(const PipelineConfig& config, PipelineTarget target = PipelineTarget::all);
RunManifest run_pipeline(const std::filesystem::path& config_path);

std::string_view tool_version() noexcept;

}  // namespace caselink
