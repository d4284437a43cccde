#ifndef LEOIOT_CONFIG_IO_HPP_
#define LEOIOT_CONFIG_IO_HPP_

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "leoiot/scenario.hpp"

namespace leoiot {

/// Thrown for unreadable files, unknown keys and unparsable values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config files are INI documents with sections [scenario], [traffic],
// [ground_ra], [space_ra] and [backhaul]. A missing [space_ra] or [backhaul]
// section means the component is absent. Keys left out keep their defaults.

ScenarioConfig read_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);

void write_config(std::ostream& out, const ScenarioConfig& config);
std::string to_ini(const ScenarioConfig& config);

/// Sets one key by dotted path, e.g. "ground_ra.max_attempts" = "10".
void apply_override(ScenarioConfig& config, const std::string& dotted_key, const std::string& value);
void apply_overrides(ScenarioConfig& config,
                     const std::vector<std::pair<std::string, std::string>>& overrides);

/// Stable 64-bit FNV-1a digest of the canonical INI form.
std::uint64_t config_hash(const ScenarioConfig& config);

} // namespace leoiot

#endif // LEOIOT_CONFIG_IO_HPP_
