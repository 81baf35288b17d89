#include <cstdio>
#include <fstream>

#include "minidiss/cli.hpp"

namespace minidiss::cli {

void Report::upper(const std::string& key, double value, double tolerance, double time) {
  const bool ok = value <= tolerance;
  add(key, {value, tolerance, ok, ok ? "ok" : "fail", time});
}

void Report::lower(const std::string& key, double value, double bound, double time) {
  const bool ok = value >= bound;
  add(key, {value, bound, ok, ok ? "ok" : "fail", time});
}

void Report::info(const std::string& key, double value) {
  add(key, {value, NAN, true, "ok", NAN});
}

void Report::add(const std::string& key, const CheckEntry& e) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = e;
      return;
    }
  entries_.emplace_back(key, e);
}

bool Report::all_pass() const { return first_failure().empty(); }

std::string Report::first_failure() const {
  for (const auto& [k, v] : entries_)
    if (!v.pass) return k;
  return {};
}

const CheckEntry& Report::at(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw std::out_of_range("report has no entry '" + key + "'");
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : entries_) {
    nlohmann::ordered_json e;
    e["value"] = std::isfinite(v.value) ? nlohmann::ordered_json(v.value) : nullptr;
    e["tolerance"] = std::isfinite(v.tolerance) ? nlohmann::ordered_json(v.tolerance) : nullptr;
    e["pass"] = v.pass;
    if (v.status == "insufficient_precision") e["status"] = v.status;
    if (std::isfinite(v.time)) e["t"] = v.time;
    j[k] = e;
  }
  return j;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw DimensionError("write_csv: header and column count differ");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t c = 0; c < header.size(); ++c)
    out << (c ? "," : "") << csv_field(header[c]);
  out << "\r\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << format_double(columns[c].at(r));
    out << "\r\n";
  }
}

}  // namespace minidiss::cli
