#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "dirflow/system.hpp"

namespace dirflow {

/// Parses the system spec format documented in the README. Unknown fields
/// are rejected at every level.
SystemSpec spec_from_json(const nlohmann::json& j);
SystemSpec load_spec_file(const std::string& path);

nlohmann::json spec_to_json(const SystemSpec& spec);
void save_spec_file(const SystemSpec& spec, const std::string& path);

/// FNV-1a over the canonical serialized form; embedded in report manifests.
std::uint64_t spec_hash(const SystemSpec& spec);

}  // namespace dirflow
