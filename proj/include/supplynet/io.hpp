#pragma once

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "supplynet/errors.hpp"
#include "supplynet/network.hpp"

namespace supplynet {

enum class NetworkFormat { kEdgeCsv, kNetworkJson, kIoTable };

inline std::string to_string(NetworkFormat f) {
  switch (f) {
    case NetworkFormat::kEdgeCsv: return "edge-csv";
    case NetworkFormat::kNetworkJson: return "network-json";
    case NetworkFormat::kIoTable: return "io-table-csv";
  }
  return "?";
}

/// A network read from disk together with what the reader learned about it.
struct NetworkFile {
  ProductionNetwork network;
  NetworkFormat format = NetworkFormat::kEdgeCsv;
  /// External node names by internal id; empty when ids are the names.
  std::vector<std::string> labels;
  std::size_t duplicate_edges = 0;
  std::string provenance;
};

// ---------------------------------------------------------------------------
// Number formatting

/// Shortest round-trip decimal representation, independent of locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Splits one CSV line. Fields may be double-quoted, in which case commas
/// inside are literal and "" stands for a quote; quotes are removed.
inline std::vector<std::string> split_commas(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  auto flush = [&] {
    out.push_back(was_quoted ? cur : std::string(trim(cur)));
    cur.clear();
    was_quoted = false;
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"' && trim(cur).empty()) {
      cur.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      flush();
    } else if (!(was_quoted && (c == ' ' || c == '\t' || c == '\r'))) {
      cur += c;
    }
  }
  flush();
  return out;
}

/// Quotes a CSV field when it contains a comma, quote or newline.
inline std::string quote_csv(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (!lines.empty() && lines.front().size() >= 3 &&
      lines.front().compare(0, 3, "\xEF\xBB\xBF") == 0) {
    lines.front().erase(0, 3);  // UTF-8 byte order mark
  }
  return lines;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  return in;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Edge CSV

/// Header "source,target", one supply relation per row. Node names are
/// arbitrary strings; ids follow first appearance. Blank lines are skipped.
inline NetworkFile parse_edge_csv(std::istream& in, unsigned suppliers = 1) {
  const auto lines = detail::read_lines(in);
  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw ParseError("missing header \"source,target\"", 1);
  {
    const auto head = detail::split_commas(lines[first]);
    if (head.size() != 2 || head[0] != "source" || head[1] != "target") {
      throw ParseError("expected header \"source,target\"", first + 1);
    }
  }
  NetworkFile file;
  file.format = NetworkFormat::kEdgeCsv;
  std::unordered_map<std::string, NodeId> ids;
  auto id_of = [&](const std::string& name) {
    auto [it, inserted] = ids.emplace(name, static_cast<NodeId>(file.labels.size()));
    if (inserted) file.labels.push_back(name);
    return it->second;
  };
  std::set<Edge> seen;
  std::vector<Edge> edges;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const auto fields = detail::split_commas(lines[i]);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("expected two non-empty fields", i + 1);
    }
    const std::string& src = fields[0];
    const std::string& dst = fields[1];
    if (src == dst) {
      throw ValidationError("self-loop on node " + src + " (line " + std::to_string(i + 1) + ")");
    }
    const Edge e{id_of(src), id_of(dst)};
    if (!seen.insert(e).second) {
      ++file.duplicate_edges;
      continue;
    }
    edges.push_back(e);
  }
  if (file.labels.empty()) throw ValidationError("edge list is empty");
  file.network = ProductionNetwork(file.labels.size(), std::move(edges), suppliers);
  return file;
}

inline NetworkFile parse_edge_csv(const std::string& path, unsigned suppliers = 1) {
  auto in = detail::open_input(path);
  auto f = parse_edge_csv(in, suppliers);
  f.provenance = path;
  return f;
}

inline void write_edge_csv(std::ostream& out, const ProductionNetwork& net,
                           const std::vector<std::string>& labels = {}) {
  auto name = [&](NodeId v) {
    return labels.empty() ? std::to_string(v + 1) : detail::quote_csv(labels[v]);
  };
  out << "source,target\n";
  for (const auto& e : net.edges()) out << name(e.from) << ',' << name(e.to) << '\n';
}

// ---------------------------------------------------------------------------
// Input-output table

/// Square matrix with a label row and a label column. Cell (row j, column i)
/// above `threshold` becomes the edge j -> i; the diagonal is ignored.
inline NetworkFile parse_io_table(std::istream& in, double threshold = 0.0, unsigned suppliers = 1) {
  const auto lines = detail::read_lines(in);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!detail::trim(lines[i]).empty()) rows.push_back(i);
  }
  if (rows.empty()) throw ParseError("empty input-output table", 1);
  const auto head = detail::split_commas(lines[rows[0]]);
  const std::size_t cols = head.size() - 1;
  if (cols == 0) throw ParseError("header has no column labels", rows[0] + 1);
  if (rows.size() - 1 != cols) {
    throw ParseError("input-output table is not square: " + std::to_string(rows.size() - 1) +
                         " rows, " + std::to_string(cols) + " columns",
                     rows[0] + 1);
  }
  NetworkFile file;
  file.format = NetworkFormat::kIoTable;
  for (std::size_t c = 1; c < head.size(); ++c) file.labels.push_back(head[c]);
  std::vector<Edge> edges;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t line_no = rows[r] + 1;
    const auto fields = detail::split_commas(lines[rows[r]]);
    if (fields.size() != cols + 1) {
      throw ParseError("row has " + std::to_string(fields.size() - 1) + " values, expected " +
                           std::to_string(cols),
                       line_no);
    }
    if (fields[0] != file.labels[r - 1]) {
      throw ParseError("row label \"" + fields[0] +
                           "\" does not match column label \"" + file.labels[r - 1] + "\"",
                       line_no);
    }
    for (std::size_t c = 1; c <= cols; ++c) {
      const auto v = parse_double(fields[c]);
      if (!v) throw ParseError("not a number: \"" + fields[c] + "\"", line_no);
      if (c == r) continue;
      if (*v > threshold) edges.push_back({static_cast<NodeId>(r - 1), static_cast<NodeId>(c - 1)});
    }
  }
  file.network = ProductionNetwork(cols, std::move(edges), suppliers);
  return file;
}

inline NetworkFile parse_io_table(const std::string& path, double threshold = 0.0,
                                  unsigned suppliers = 1) {
  auto in = detail::open_input(path);
  auto f = parse_io_table(in, threshold, suppliers);
  f.provenance = path;
  return f;
}

// ---------------------------------------------------------------------------
// Network JSON, schema 1:
//   {"schema": 1, "k": K, "n": n, "edges": [[j, i], ...], "tiers": [...],
//    "acyclic": bool, "labels": [...]}
// Node ids are 1-based; "tiers" and "labels" are optional arrays of length K.

inline nlohmann::ordered_json network_to_json(const ProductionNetwork& net,
                                              const std::vector<std::string>& labels = {}) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["k"] = net.node_count();
  j["n"] = net.suppliers();
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : net.edges()) edges.push_back({e.from + 1, e.to + 1});
  j["edges"] = std::move(edges);
  if (net.tiers()) j["tiers"] = *net.tiers();
  j["acyclic"] = net.acyclic();
  if (!labels.empty()) j["labels"] = labels;
  return j;
}

inline void write_network_json(std::ostream& out, const ProductionNetwork& net,
                               const std::vector<std::string>& labels = {}) {
  out << network_to_json(net, labels).dump(1) << '\n';
}

inline NetworkFile network_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) { throw ValidationError("network JSON: " + what); };
  if (!j.is_object()) fail("top level must be an object");
  if (!j.contains("schema") || j["schema"] != 1) fail("unsupported or missing schema (expected 1)");
  if (!j.contains("k") || !j["k"].is_number_integer() || j["k"].get<long long>() <= 0) {
    fail("\"k\" must be a positive integer");
  }
  const auto k = j["k"].get<std::size_t>();
  unsigned n = 1;
  if (j.contains("n")) {
    if (!j["n"].is_number_integer() || j["n"].get<long long>() <= 0) fail("\"n\" must be a positive integer");
    n = j["n"].get<unsigned>();
  }
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) fail("\"edges\" must be an array");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        fail("each edge must be a pair of integers");
      }
      const auto a = e[0].get<long long>();
      const auto b = e[1].get<long long>();
      if (a < 1 || b < 1 || a > static_cast<long long>(k) || b > static_cast<long long>(k)) {
        fail("edge endpoint out of range 1.." + std::to_string(k));
      }
      edges.push_back({static_cast<NodeId>(a - 1), static_cast<NodeId>(b - 1)});
    }
  }
  std::optional<std::vector<int>> tiers;
  if (j.contains("tiers") && !j["tiers"].is_null()) {
    if (!j["tiers"].is_array()) fail("\"tiers\" must be an array");
    tiers = j["tiers"].get<std::vector<int>>();
  }
  NetworkFile file;
  file.format = NetworkFormat::kNetworkJson;
  file.network = ProductionNetwork(k, std::move(edges), n, std::move(tiers));
  if (j.contains("acyclic") && j["acyclic"].is_boolean() && j["acyclic"].get<bool>() &&
      !file.network.acyclic()) {
    fail("marked acyclic but contains a cycle");
  }
  if (j.contains("labels")) {
    file.labels = j["labels"].get<std::vector<std::string>>();
    if (file.labels.size() != k) fail("\"labels\" must have k entries");
  }
  return file;
}

inline NetworkFile parse_network_json(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  try {
    return network_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("network JSON: ") + e.what());
  }
}

inline NetworkFile parse_network_json(const std::string& path) {
  auto in = detail::open_input(path);
  auto f = parse_network_json(in);
  f.provenance = path;
  return f;
}

/// Picks the reader from the extension and, for .csv, from the header row.
inline NetworkFile load_network(const std::string& path, std::optional<NetworkFormat> format = {},
                                double io_threshold = 0.0, unsigned suppliers = 1) {
  if (!format) {
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
      format = NetworkFormat::kNetworkJson;
    } else {
      auto in = detail::open_input(path);
      std::string head;
      while (std::getline(in, head) && detail::trim(head).empty()) {
      }
      if (head.rfind("\xEF\xBB\xBF", 0) == 0) head.erase(0, 3);
      const auto fields = detail::split_commas(head);
      format = (fields.size() == 2 && fields[0] == "source" && fields[1] == "target")
                   ? NetworkFormat::kEdgeCsv
                   : NetworkFormat::kIoTable;
    }
  }
  switch (*format) {
    case NetworkFormat::kEdgeCsv: return parse_edge_csv(path, suppliers);
    case NetworkFormat::kIoTable: return parse_io_table(path, io_threshold, suppliers);
    case NetworkFormat::kNetworkJson: {
      auto f = parse_network_json(path);
      if (suppliers != 1 && f.network.suppliers() != suppliers) {
        f.network = f.network.with_suppliers(suppliers);
      }
      return f;
    }
  }
  throw UsageError("unknown network format");
}

// ---------------------------------------------------------------------------
// CSV output

/// Minimal CSV row writer: header first, numbers via format_double.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header) : out_(out) {
    bool first = true;
    for (auto h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((write_field(fields, first)), ...);
    out_ << '\n';
  }

 private:
  template <class T>
  void write_field(const T& v, bool& first) {
    if (!first) out_ << ',';
    first = false;
    if constexpr (std::is_same_v<T, double> || std::is_same_v<T, float>) {
      out_ << format_double(static_cast<double>(v));
    } else if constexpr (std::is_same_v<T, bool>) {
      out_ << (v ? "true" : "false");
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
      if (v) out_ << format_double(*v);
    } else if constexpr (std::is_convertible_v<const T&, std::string_view>) {
      out_ << detail::quote_csv(std::string_view(v));
    } else {
      out_ << v;
    }
  }

  std::ostream& out_;
};

}  // namespace supplynet
