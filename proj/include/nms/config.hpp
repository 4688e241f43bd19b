#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nms/session.hpp"

namespace nms::config {

// Resolves a JSON document into a validated ExperimentConfig. Only
// "strategy" is required; every other field has a default. Unknown keys,
// wrong types and out-of-range values throw Errc::ConfigError.
session::ExperimentConfig from_json(const nlohmann::json& doc);

// Fully resolved form; from_json(to_json(c)) reproduces c.
nlohmann::json to_json(const session::ExperimentConfig& cfg);

session::ExperimentConfig parse_config(const std::filesystem::path& path);

// Applies a dotted "section.key=value" override to a raw config document.
// The value is read as JSON when it parses, otherwise as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

// FNV-1a 64 over the canonical (key-sorted) dump of the resolved config.
std::string config_digest(const session::ExperimentConfig& cfg);

}  // namespace nms::config
