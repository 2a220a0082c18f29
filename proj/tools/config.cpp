#include "config.hpp"

#include <cstdlib>
#include <stdexcept>

#include "acmri/baselines.hpp"
#include "acmri/io.hpp"

namespace acmri::tools {

namespace {

template <typename T>
void take(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<T>();
}

const char* const kKnownKeys[] = {
    "phantom", "phantom_path", "coils", "maps_path", "scheme", "rate", "scan_time", "acs", "mask_path", "seed",
    "seeds", "noise_sigma", "methods", "alpha", "beta", "maps", "threshold", "tv_chain", "max_iter", "scan_times",
    "rates", "coil_subsets", "input", "kspace_path", "truth_path", "estimate_paths", "threads", "out"};

}  // namespace

std::vector<std::uint64_t> Config::seed_list() const {
  return seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds;
}

TvChain Config::chain() const {
  if (tv_chain == "per_map") return TvChain::per_map;
  if (tv_chain == "single_chain") return TvChain::single_chain;
  throw std::invalid_argument("tv_chain must be per_map or single_chain, got '" + tv_chain + "'");
}

std::optional<std::filesystem::path> Config::resolve(const std::string& explicit_path,
                                                     const std::string& default_name) const {
  if (!explicit_path.empty()) return std::filesystem::path(explicit_path);
  if (!input.empty()) {
    const auto p = std::filesystem::path(input) / default_name;
    if (std::filesystem::exists(p)) return p;
  }
  return std::nullopt;
}

void Config::validate() const {
  if (scheme != "accel" && scheme != "random") {
    throw std::invalid_argument("scheme must be accel or random, got '" + scheme + "'");
  }
  if (rate < 1) throw std::invalid_argument("rate must be >= 1");
  if (acs < 0) throw std::invalid_argument("acs must be >= 0");
  if (!(scan_time > 0.0) || scan_time > 1.0) throw std::invalid_argument("scan_time must lie in (0, 1]");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (maps < 1) throw std::invalid_argument("maps must be >= 1");
  if (!(threshold >= 0.0)) throw std::invalid_argument("threshold must be >= 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  chain();
  for (const auto& m : methods) {
    if (m != "ac") baseline_method_from_string(m);
  }
  for (const auto& p : {maps_path, mask_path, kspace_path, truth_path}) {
    if (!p.empty() && !std::filesystem::exists(p)) throw std::invalid_argument("no such file: " + p);
  }
  for (const auto& p : estimate_paths) {
    if (!std::filesystem::exists(p)) throw std::invalid_argument("no such file: " + p);
  }
  if (!input.empty() && !std::filesystem::is_directory(input)) {
    throw std::invalid_argument("input is not a directory: " + input);
  }
}

Config config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnownKeys), std::end(kKnownKeys), key) == std::end(kKnownKeys)) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  Config c;
  if (j.contains("phantom")) c.phantom = phantom_spec_from_json(j.at("phantom"));
  if (j.contains("phantom_path")) c.phantom = phantom_spec_from_json(read_json(j.at("phantom_path").get<std::string>()));
  if (j.contains("coils")) c.coil_model = coil_model_from_json(j.at("coils"));
  take(j, "maps_path", c.maps_path);
  take(j, "scheme", c.scheme);
  take(j, "rate", c.rate);
  take(j, "scan_time", c.scan_time);
  take(j, "acs", c.acs);
  take(j, "mask_path", c.mask_path);
  take(j, "seed", c.seed);
  take(j, "seeds", c.seeds);
  take(j, "noise_sigma", c.noise_sigma);
  take(j, "methods", c.methods);
  take(j, "alpha", c.alpha);
  take(j, "beta", c.beta);
  take(j, "maps", c.maps);
  take(j, "threshold", c.threshold);
  take(j, "tv_chain", c.tv_chain);
  take(j, "max_iter", c.max_iter);
  take(j, "scan_times", c.scan_times);
  take(j, "rates", c.rates);
  take(j, "coil_subsets", c.coil_subsets);
  take(j, "input", c.input);
  take(j, "kspace_path", c.kspace_path);
  take(j, "truth_path", c.truth_path);
  take(j, "estimate_paths", c.estimate_paths);
  take(j, "threads", c.threads);
  take(j, "out", c.out);
  return c;
}

nlohmann::json to_json(const Config& c) {
  return {{"phantom", to_json(c.phantom)},
          {"coils", to_json(c.coil_model)},
          {"maps_path", c.maps_path},
          {"scheme", c.scheme},
          {"rate", c.rate},
          {"scan_time", c.scan_time},
          {"acs", c.acs},
          {"mask_path", c.mask_path},
          {"seed", c.seed},
          {"seeds", c.seed_list()},
          {"noise_sigma", c.noise_sigma},
          {"methods", c.methods},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"maps", c.maps},
          {"threshold", c.threshold},
          {"tv_chain", c.tv_chain},
          {"max_iter", c.max_iter},
          {"scan_times", c.scan_times},
          {"rates", c.rates},
          {"coil_subsets", c.coil_subsets},
          {"input", c.input},
          {"kspace_path", c.kspace_path},
          {"truth_path", c.truth_path},
          {"estimate_paths", c.estimate_paths},
          {"threads", c.threads},
          {"out", c.out}};
}

std::filesystem::path output_dir(const Config& c, const std::string& command) {
  if (!c.out.empty()) return c.out;
  if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
    return std::filesystem::path(root) / command;
  }
  return std::filesystem::path("acmri_out") / command;
}

}  // namespace acmri::tools
