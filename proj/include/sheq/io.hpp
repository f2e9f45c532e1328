#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "sheq/bounds.hpp"
#include "sheq/model.hpp"
#include "sheq/simulate.hpp"

namespace sheq::io {

inline constexpr int kSchemaVersion = 1;
using Json = nlohmann::ordered_json;

/// Canonical model JSON. Custom spectral kernels cannot be serialised.
Json to_json(const ModelSpec& m);
/// Strict parse: unknown fields and a wrong schema_version are rejected.
ModelSpec model_from_json(const Json& j);
ModelSpec load_model(const std::filesystem::path& p);

Json to_json(const LatticeSpec& s);
LatticeSpec lattice_from_json(const Json& j);

Json to_json(const BoundResult& b);
Json to_json(const LyapunovReport& r);

/// FNV-1a of the canonical model and lattice JSON, hex.
std::string config_hash(const ModelSpec& m, const LatticeSpec& s);

/// Shortest round-trip decimal, classic locale.
std::string num(double x);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace sheq::io
