#include "snapgan/graph/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "snapgan/common/errors.hpp"

namespace snapgan::graph::io {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_int(std::string_view field, std::size_t line_no, const char* name) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail(line_no, std::string("invalid ") + name + " '" + std::string(field) + "'");
  }
  return value;
}

double parse_double(std::string_view field, std::size_t line_no, const char* name) {
  // strtod instead of from_chars<double> for libstdc++ 11 portability.
  const std::string copy(field);
  char* end = nullptr;
  const double value = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    fail(line_no, std::string("invalid ") + name + " '" + copy + "'");
  }
  return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

}  // namespace

std::vector<Edge> read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::string raw;
  std::size_t line_no = 0;
  std::optional<bool> timestamped;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3 && fields.size() != 4) {
      fail(line_no, "expected 3 or 4 tab-separated columns, got " + std::to_string(fields.size()));
    }
    const bool has_time = fields.size() == 4;
    if (timestamped && *timestamped != has_time) {
      fail(line_no, "timestamp column present on some edges but not others");
    }
    timestamped = has_time;
    Edge e;
    e.src = parse_int<VertexId>(fields[0], line_no, "src");
    e.dst = parse_int<VertexId>(fields[1], line_no, "dst");
    e.weight = parse_double(fields[2], line_no, "weight");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) fail(line_no, "weight must be finite and >= 0");
    if (has_time) e.timestamp = parse_int<std::int64_t>(fields[3], line_no, "timestamp");
    edges.push_back(e);
  }
  return edges;
}

std::vector<Edge> read_edge_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, std::span<const Edge> edges) {
  out << "# src\tdst\tweight\ttimestamp\n";
  for (const Edge& e : edges) {
    out << e.src << '\t' << e.dst << '\t' << e.weight;
    if (e.timestamp) out << '\t' << *e.timestamp;
    out << '\n';
  }
}

void write_edge_list(const std::filesystem::path& path, std::span<const Edge> edges) {
  auto out = open_out(path);
  write_edge_list(out, edges);
}

Tensor read_attributes(std::istream& in, bool has_header) {
  std::vector<double> data;
  std::size_t width = 0, rows = 0, line_no = 0;
  bool header_pending = has_header;
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split(line, ',');
    if (rows == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      fail(line_no, "expected " + std::to_string(width) + " attributes, got " +
                        std::to_string(fields.size()));
    }
    for (const auto f : fields) {
      const double v = parse_double(f, line_no, "attribute");
      if (!std::isfinite(v)) fail(line_no, "non-finite attribute");
      data.push_back(v);
    }
    ++rows;
  }
  return Tensor(ad::Shape{rows, width}, std::move(data));
}

Tensor read_attributes(const std::filesystem::path& path, bool has_header) {
  auto in = open_in(path);
  return read_attributes(in, has_header);
}

void write_attributes(std::ostream& out, const Tensor& attributes) {
  for (std::size_t r = 0; r < attributes.rows(); ++r) {
    for (std::size_t c = 0; c < attributes.cols(); ++c) {
      if (c) out << ',';
      out << attributes(r, c);
    }
    out << '\n';
  }
}

void write_attributes(const std::filesystem::path& path, const Tensor& attributes) {
  auto out = open_out(path);
  write_attributes(out, attributes);
}

std::vector<ManifestEntry> read_manifest(std::istream& in) {
  std::vector<ManifestEntry> entries;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    try {
      const json record = json::parse(raw);
      ManifestEntry entry;
      entry.id = record.at("id").get<SnapshotId>();
      entry.vertex_ids = record.at("vertex_ids").get<std::vector<VertexId>>();
      const json& label = record.at("label");
      if (!label.is_null()) {
        const int value = label.get<int>();
        if (value != 0 && value != 1) fail(line_no, "label must be 0, 1 or null");
        entry.label = static_cast<Label>(value);
      }
      if (record.contains("window")) {
        const auto bounds = record.at("window").get<std::vector<std::int64_t>>();
        if (bounds.size() != 2 || bounds[0] >= bounds[1]) fail(line_no, "window must be [start, end)");
        entry.window = TimeWindow{bounds[0], bounds[1]};
      }
      entries.push_back(std::move(entry));
    } catch (const json::exception& e) {
      fail(line_no, std::string("malformed manifest record: ") + e.what());
    }
  }
  return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_manifest(in);
}

void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries) {
  for (const auto& entry : entries) {
    json record;
    record["id"] = entry.id;
    record["vertex_ids"] = entry.vertex_ids;
    record["label"] = entry.label ? json(static_cast<int>(*entry.label)) : json(nullptr);
    if (entry.window) record["window"] = {entry.window->start, entry.window->end};
    out << record.dump() << '\n';
  }
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
  auto out = open_out(path);
  write_manifest(out, entries);
}

ManifestEntry manifest_entry(const Snapshot& snapshot) {
  return {snapshot.id, snapshot.vertices, snapshot.label, snapshot.window};
}

std::vector<Snapshot> materialize(const Graph& graph, std::span<const ManifestEntry> entries) {
  std::vector<Snapshot> snapshots;
  std::set<SnapshotId> seen;
  for (const auto& entry : entries) {
    if (!seen.insert(entry.id).second) {
      throw DataError("duplicate snapshot id " + std::to_string(entry.id));
    }
    if (entry.vertex_ids.empty()) {
      throw DataError("snapshot " + std::to_string(entry.id) + " has no vertices");
    }
    try {
      Snapshot s = entry.window ? window_snapshot(graph, entry.id, entry.vertex_ids, *entry.window)
                                : induced_snapshot(graph, entry.id, entry.vertex_ids);
      s.label = entry.label;
      snapshots.push_back(std::move(s));
    } catch (const std::invalid_argument& e) {
      throw DataError("snapshot " + std::to_string(entry.id) + ": " + e.what());
    }
  }
  return snapshots;
}

}  // namespace snapgan::graph::io
