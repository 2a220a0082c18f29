#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acmri/geometry.hpp"
#include "acmri/simulation.hpp"
#include "acmri/solver.hpp"

namespace acmri::tools {

inline constexpr const char* kOutputRootEnv = "ACMRI_OUTPUT_ROOT";

// Everything a subcommand may need. JSON keys mirror the field names.
struct Config {
  PhantomSpec phantom;
  CoilModel coil_model;
  std::string maps_path;  // CoilStack of sensitivities; overrides coil_model

  std::string scheme = "accel";  // accel | random
  int rate = 2;
  double scan_time = 0.58;
  int acs = 16;
  std::string mask_path;  // explicit mask JSON; overrides scheme
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;  // sweep seeds; defaults to {seed}
  double noise_sigma = 0.01;

  std::vector<std::string> methods{"ac", "zero_fill"};
  double alpha = 0.01;
  double beta = kDefaultBeta;
  int maps = 1;
  double threshold = 0.01;
  std::string tv_chain = "per_map";  // per_map | single_chain
  int max_iter = 500;

  std::vector<double> scan_times;             // compare / svd sweeps, random scheme
  std::vector<int> rates;                     // compare / svd sweeps, accel scheme
  std::vector<std::vector<int>> coil_subsets;  // svd sweep

  std::string input;  // directory written by `simulate`
  std::string kspace_path;
  std::string truth_path;
  std::vector<std::string> estimate_paths;

  int threads = 1;
  std::string out;

  std::vector<std::uint64_t> seed_list() const;
  TvChain chain() const;
  // Input file resolution: explicit path first, then `input`/<default_name>.
  std::optional<std::filesystem::path> resolve(const std::string& explicit_path,
                                               const std::string& default_name) const;
  void validate() const;
};

Config config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Config& c);

// --out, then the config's "out", then $ACMRI_OUTPUT_ROOT/<command>, then ./acmri_out/<command>.
std::filesystem::path output_dir(const Config& c, const std::string& command);

}  // namespace acmri::tools
