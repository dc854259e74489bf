#pragma once

#include <string>

#include <json.hpp>

namespace freqsec::cli {

// Loads a config file. JSON is parsed directly; files ending in .toml go
// through a small TOML-subset reader (tables, dotted tables, scalars,
// strings, booleans and flat arrays) that produces the same JSON tree.
nlohmann::json load_config(const std::string& path);

nlohmann::json toml_subset_to_json(const std::string& text);

// Lookup helpers that name the offending key on failure.
double require_number(const nlohmann::json& j, const std::string& key);
std::string require_string(const nlohmann::json& j, const std::string& key);
const nlohmann::json& require_object(const nlohmann::json& j, const std::string& key);

}  // namespace freqsec::cli
