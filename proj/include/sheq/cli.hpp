#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sheq/model.hpp"
#include "sheq/simulate.hpp"

namespace sheq::cli {

struct Sweep {
  std::string path;  ///< e.g. kernel.b, exponent.index, drift.mass_lambda
  std::vector<double> values;
};

struct RunConfig {
  std::string command;
  std::optional<std::filesystem::path> model_path;
  LatticeSpec lattice;
  std::optional<Sweep> sweep;
  std::filesystem::path out = ".";
  std::uint64_t seed = 1;
  std::vector<int> p{2};
  std::vector<double> betas;
  std::vector<double> r_grid;
};

/// Raised for malformed command lines and configs; exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "min:max:n" with log spacing.
std::vector<double> parse_log_grid(const std::string& spec);
/// "path=v1,v2,...".
Sweep parse_sweep(const std::string& spec);
/// The model with one parameter replaced; the path must exist in the schema.
ModelSpec apply_sweep(const ModelSpec& m, const std::string& path, double value);

int cmd_analyze(const RunConfig& c);
int cmd_bounds(const RunConfig& c);
int cmd_phase(const RunConfig& c);
int cmd_regularity(const RunConfig& c);
int cmd_simulate(const RunConfig& c);
int cmd_verify(const RunConfig& c);

/// Entry point of the sheq tool.
int run(int argc, char** argv);

}  // namespace sheq::cli
