#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "caselink/case_link.hpp"
#include "caselink/errors.hpp"

namespace caselink {

NetworkFormat parse_network_format(std::string_view name) {
  if (name == "dot") return NetworkFormat::dot;
  if (name == "json") return NetworkFormat::json;
  throw InvalidArgument("unknown network format '" + std::string(name) + "'");
}

std::string_view to_string(NodeType type) noexcept {
  switch (type) {
    case NodeType::case_node: return "case";
    case NodeType::address: return "address";
    case NodeType::entity: return "entity";
    case NodeType::collector: return "collector_entity";
  }
  return "case";
}

std::string_view to_string(EdgeKind kind) noexcept {
  switch (kind) {
    case EdgeKind::annotation: return "annotation";
    case EdgeKind::membership: return "membership";
    case EdgeKind::flow: return "flow";
  }
  return "annotation";
}

std::string_view fill_color(NodeType type) noexcept {
  switch (type) {
    case NodeType::case_node: return "#ccffcc";
    case NodeType::address: return "#ffe6cc";
    case NodeType::entity: return "#ccccff";
    case NodeType::collector: return "#ffcccc";
  }
  return "#ffffff";
}

namespace {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string to_dot(const CaseNetwork& net) {
  std::ostringstream out;
  out << "graph case_network {\n";
  if (!net.nodes.empty()) out << "  node [style=filled, shape=circle];\n";
  for (const auto& n : net.nodes) {
    out << "  " << dot_quote(n.id) << " [label=" << dot_quote(n.label) << ", type=" << to_string(n.type)
        << ", fillcolor=\"" << fill_color(n.type) << "\"];\n";
  }
  for (const auto& e : net.edges) {
    out << "  " << dot_quote(e.src) << " -- " << dot_quote(e.dst) << " [kind=" << to_string(e.kind) << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_json(const CaseNetwork& net) {
  nlohmann::ordered_json doc;
  doc["nodes"] = nlohmann::ordered_json::array();
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& n : net.nodes) {
    doc["nodes"].push_back({{"id", n.id}, {"type", to_string(n.type)}, {"label", n.label}});
  }
  for (const auto& e : net.edges) {
    doc["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"kind", to_string(e.kind)}});
  }
  return doc.dump(1) + "\n";
}

}  // namespace

std::string export_network(const CaseNetwork& network, NetworkFormat format) {
  switch (format) {
    case NetworkFormat::dot: return to_dot(network);
    case NetworkFormat::json: return to_json(network);
  }
  throw InvalidArgument("unknown network format");
}

}  // namespace caselink
