#include "bmkt/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bmkt/errors.hpp"

namespace bmkt {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(std::size_t line) { return "config line " + std::to_string(line) + ": "; }

}  // namespace

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InputError(where(line_no) + "expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw InputError(where(line_no) + "empty key");
    if (key == "time_unit") {
      if (value.empty()) throw InputError(where(line_no) + "time_unit is empty");
      cfg.time_unit = value;
    } else if (key == "seed") {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw InputError(where(line_no) + "seed must be an unsigned integer");
      cfg.seed = v;
    } else if (key == "out_dir") {
      if (value.empty()) throw InputError(where(line_no) + "out_dir is empty");
      cfg.out_dir = value;
    } else if (key == "tolerance") {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size() || !(v > 0.0))
        throw InputError(where(line_no) + "tolerance must be a positive number");
      cfg.tolerance = v;
    } else if (key.rfind("preset.", 0) == 0 && key.size() > 7) {
      cfg.presets[key.substr(7)] = value;
    } else {
      throw InputError(where(line_no) + "unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::serialize() const {
  std::string out = fmt::format("time_unit={}\n", time_unit);
  if (seed) out += fmt::format("seed={}\n", *seed);
  out += fmt::format("out_dir={}\ntolerance={}\n", out_dir, tolerance);
  for (const auto& [k, v] : presets) out += fmt::format("preset.{}={}\n", k, v);
  return out;
}

}  // namespace bmkt
