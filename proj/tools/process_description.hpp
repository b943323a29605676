#pragma once

// JSON process descriptions consumed by `polqpt simulate`. The schema is
// documented in processes/README.md.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "polqpt/process_map.hpp"

namespace polqpt::cli {

class DescriptionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct NoiseSettings {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

struct ProcessDescription {
    std::string kind;
    ProcessMap map;
    std::optional<NoiseSettings> noise;
    /// Dataset generator_kind tag for the simulated sample.
    std::string generator_kind;
    nlohmann::json source;
};

/// Throws DescriptionError. Syntax errors carry "line L, column C"; schema errors name
/// the offending field path, e.g. "plates[1].lambda".
[[nodiscard]] ProcessDescription parse_process_description(std::string_view text);

}  // namespace polqpt::cli
