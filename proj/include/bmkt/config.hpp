#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace bmkt {

/// Flat key=value run configuration. Recognized keys: time_unit, seed,
/// out_dir, tolerance; keys of the form preset.<name> hold model parameter
/// presets. Lines starting with '#' and blank lines are ignored.
struct RunConfig {
  std::string time_unit = "unit";
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  double tolerance = 1e-8;
  std::map<std::string, std::string> presets;

  bool operator==(const RunConfig&) const = default;

  /// Throws InputError with the line number on malformed input.
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);
  /// Canonical text: known keys in fixed order, then presets sorted by name.
  std::string serialize() const;
};

}  // namespace bmkt
