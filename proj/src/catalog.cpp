#include <charconv>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "lambdares/cli.hpp"

namespace lres {
namespace {

double parse_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InputError("malformed number '" + std::string(s) + "'");
  }
  return v;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("range '" + text + "' must be lo:hi");
  const double lo = parse_real(std::string_view(text).substr(0, colon));
  const double hi = parse_real(std::string_view(text).substr(colon + 1));
  if (!(lo < hi)) throw InputError("range '" + text + "' must satisfy lo < hi");
  return {lo, hi};
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string canonical_config(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["scatterer"] = nlohmann::ordered_json::parse(scatterer_to_json(c.scatterer));
  j["sheets"] = c.sheets;
  if (c.window) j["window"] = {c.window->first, c.window->second};
  if (c.arg_window) j["arg_window"] = {c.arg_window->first, c.arg_window->second};
  if (c.channels) j["channels"] = *c.channels;
  if (c.grid) j["grid"] = *c.grid;
  if (c.seed) j["seed"] = *c.seed;
  std::vector<std::string> pts;
  for (const auto& p : c.points) pts.push_back(to_string(p));
  if (!pts.empty()) j["points"] = pts;
  j["samples"] = c.samples;
  j["arg"] = c.arg;
  j["order"] = c.order;
  if (c.corrupt_parity) j["corrupt_parity"] = true;
  return j.dump();
}

std::string config_hash(const RunConfig& c) { return hex64(fnv1a(canonical_config(c))); }

std::vector<SearchWindow> search_windows(const RunConfig& c, double default_lo, double default_hi) {
  const double lo = c.window ? c.window->first : default_lo;
  const double hi = c.window ? c.window->second : default_hi;
  std::vector<int> sheets = c.sheets;
  if (sheets.empty() && c.arg_window) {
    sheets.push_back(static_cast<int>(std::floor(0.5 * (c.arg_window->first + c.arg_window->second) / kPi)));
  }
  if (sheets.empty()) throw InputError("at least one --sheet is required");
  std::vector<SearchWindow> out;
  for (const int m : sheets) {
    SearchWindow w = SearchWindow::sheet_band(m, lo, hi);
    if (c.arg_window) {
      w.arg_lo = c.arg_window->first;
      w.arg_hi = c.arg_window->second;
    }
    try {
      w.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    out.push_back(w);
  }
  return out;
}

std::string catalog_header(const RunConfig& c) {
  nlohmann::ordered_json run;
  run["command"] = c.command;
  run["config_hash"] = config_hash(c);
  run["scatterer"] = describe(c.scatterer);
  run["sheets"] = c.sheets;
  if (c.seed) run["seed"] = *c.seed;
  nlohmann::ordered_json j;
  j["run"] = run;
  return j.dump();
}

std::vector<ResonanceRecord> read_catalog(std::istream& in) {
  std::vector<ResonanceRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("{\"run\"", 0) == 0) continue;
    out.push_back(parse_json_line(line));
  }
  return out;
}

void write_catalog(std::ostream& out, const RunConfig& c, const std::vector<ResonanceRecord>& records) {
  out << catalog_header(c) << '\n';
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

}  // namespace lres
