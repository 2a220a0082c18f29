// acmri: simulate, reconstruct, analyse and compare multi-coil data from the shell.
//
// Exit status: 0 success, 1 invalid arguments or config, 2 I/O or format
// error, 3 some requested work failed (other outputs are still written).

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acmri/baselines.hpp"
#include "acmri/io.hpp"
#include "acmri/metrics.hpp"
#include "acmri/operators.hpp"
#include "acmri/parallel.hpp"
#include "acmri/svd_analysis.hpp"
#include "config.hpp"
#include "plot.hpp"

namespace fs = std::filesystem;
using namespace acmri;
using namespace acmri::tools;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;
constexpr int kExitPartial = 3;

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> maps;
  std::optional<double> threshold;
  std::optional<std::string> scheme;
  std::optional<int> rate;
  std::optional<double> scan_time;
  std::optional<int> acs;
  std::optional<double> noise;
  std::optional<std::string> input;
  std::optional<std::string> mask;
  std::optional<std::string> truth;
  std::vector<std::string> methods;
  std::vector<std::string> estimates;
};

void add_shared_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "random seed (mask and noise)");
  cmd->add_option("--threads", o.threads, "worker budget")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", o.alpha, "regularization weight");
  cmd->add_option("--beta", o.beta, "TV smoothing parameter");
  cmd->add_option("--maps", o.maps, "sensitivity maps per coil (p)");
  cmd->add_option("--threshold", o.threshold, "singular-value threshold t");
  cmd->add_option("--scheme", o.scheme, "sampling scheme")->check(CLI::IsMember({"accel", "random"}));
  cmd->add_option("--rate", o.rate, "acceleration factor R");
  cmd->add_option("--scan-time", o.scan_time, "fraction of acquired lines (random scheme)");
  cmd->add_option("--acs", o.acs, "number of central calibration lines");
  cmd->add_option("--noise", o.noise, "k-space noise standard deviation");
  cmd->add_option("--input", o.input, "directory written by `simulate`");
  cmd->add_option("--mask", o.mask, "mask JSON file");
}

Config load_config(const Overrides& o) {
  Config c = o.config.empty() ? Config{} : config_from_json(read_json(o.config));
  if (o.out) c.out = *o.out;
  if (o.seed) {
    c.seed = *o.seed;
    c.seeds = {*o.seed};
  }
  if (o.threads) c.threads = *o.threads;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.beta) c.beta = *o.beta;
  if (o.maps) c.maps = *o.maps;
  if (o.threshold) c.threshold = *o.threshold;
  if (o.scheme) c.scheme = *o.scheme;
  if (o.rate) c.rate = *o.rate;
  if (o.scan_time) c.scan_time = *o.scan_time;
  if (o.acs) c.acs = *o.acs;
  if (o.noise) c.noise_sigma = *o.noise;
  if (o.input) c.input = *o.input;
  if (o.mask) c.mask_path = *o.mask;
  if (o.truth) c.truth_path = *o.truth;
  if (!o.methods.empty()) c.methods = o.methods;
  if (!o.estimates.empty()) c.estimate_paths = o.estimates;
  c.validate();
  return c;
}

std::uint64_t noise_seed(std::uint64_t seed) { return seed ^ 0x6a09e667f3bcc909ULL; }

CoilStack load_maps(const Config& c, const Grid& grid) {
  CoilStack maps;
  if (auto p = c.resolve(c.maps_path, "maps.stack")) {
    maps = read_coil_stack(*p);
  } else {
    maps = make_coil_maps(c.coil_model, grid);
  }
  if (maps.n() != grid.n() || maps.m() != grid.m()) {
    throw std::invalid_argument("sensitivity maps are " + std::to_string(maps.n()) + "x" + std::to_string(maps.m()) +
                                ", data grid is " + std::to_string(grid.n()) + "x" + std::to_string(grid.m()));
  }
  if (c.maps > maps.maps()) {
    throw std::invalid_argument("--maps " + std::to_string(c.maps) + " requested but the stack holds " +
                                std::to_string(maps.maps()) + " map(s) per coil");
  }
  return maps.select_maps(c.maps);
}

SamplingMask scheme_mask(const Config& c, int n, std::uint64_t seed) {
  if (c.scheme == "accel") return make_accelerated_mask(n, c.rate, c.acs);
  return make_random_mask(n, c.scan_time, c.acs, seed);
}

SamplingMask load_mask(const Config& c, int n) {
  if (auto p = c.resolve(c.mask_path, "mask.json")) return read_mask(*p);
  return scheme_mask(c, n, c.seed);
}

std::optional<CMatrix> load_truth(const Config& c) {
  if (auto p = c.resolve(c.truth_path, "phantom.stack")) return read_coil_stack(*p).at(0);
  return std::nullopt;
}

// Manifest: effective config plus produced files, echoed to stdout.
struct Manifest {
  std::string command;
  nlohmann::json config;
  nlohmann::json extra = nlohmann::json::object();
  std::vector<std::string> files;
  fs::path dir;

  fs::path add(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }

  void finish(int status) {
    nlohmann::json j{{"command", command}, {"version", "0.1.0"}, {"config", config}, {"outputs", files},
                     {"exit_status", status}};
    for (auto& [k, v] : extra.items()) j[k] = v;
    write_json(dir / "manifest.json", j);
    std::cout << j.dump(2) << "\n";
  }
};

Manifest start_manifest(const Config& c, const std::string& command) {
  Manifest m{command, to_json(c), nlohmann::json::object(), {}, output_dir(c, command)};
  fs::create_directories(m.dir);
  return m;
}

ReconResult run_method(const std::string& method, const CoilStack& kspace, const CoilStack& maps,
                       const SamplingMask& mask, const Config& c, int threads) {
  if (method == "ac") {
    SolverOptions opts;
    opts.max_iter = c.max_iter;
    opts.chain = c.chain();
    return reconstruct(prepare_g(kspace), maps, mask, TvParams{c.alpha, c.beta}, opts, threads);
  }
  BaselineSpec spec{baseline_method_from_string(method), c.alpha, c.beta};
  spec.max_iter = c.max_iter;
  return reconstruct_baseline(kspace, maps, mask, spec);
}

nlohmann::json diagnostics_json(const ReconResult& r) {
  nlohmann::json slices = nlohmann::json::object();
  for (const auto& s : r.slices) {
    slices[std::to_string(s.column)] = {{"iterations", s.iterations},
                                        {"objective", s.objective},
                                        {"converged", s.converged},
                                        {"status", to_string(s.status)}};
  }
  return {{"method", r.method}, {"status", to_string(r.status)}, {"failed_slices", r.failed_slices()},
          {"slices", slices}};
}

struct Scores {
  double epsilon;
  double ssim_mu;
};

// Both images are divided by the truth's maximum before scoring.
Scores score(const RMatrix& truth_mag, const RMatrix& estimate) {
  const double peak = truth_mag.maxCoeff();
  if (!(peak > 0.0)) throw std::invalid_argument("truth image is identically zero");
  const RMatrix t = truth_mag / peak;
  const RMatrix e = estimate / peak;
  const Roi roi = default_roi(t);
  return {rel_error(t, e, roi), ssim_mean(t, e, roi)};
}

std::string csv_field(double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); }

CMatrix as_complex(const RMatrix& m) { return m.cast<cplx>(); }

int cmd_simulate(const Config& c) {
  Manifest man = start_manifest(c, "simulate");
  const CMatrix truth = make_phantom(c.phantom);
  const Grid grid(static_cast<int>(truth.rows()), static_cast<int>(truth.cols()));
  const CoilStack maps = load_maps(c, grid);
  const SamplingMask mask = c.mask_path.empty() ? scheme_mask(c, grid.n(), c.seed) : read_mask(c.mask_path);
  const CoilStack kspace = simulate_kspace(truth, maps, mask, c.noise_sigma, noise_seed(c.seed));

  write_coil_stack(man.add("phantom.stack"), single_image_stack(truth));
  write_png(man.add("phantom.png"), truth.cwiseAbs(), truth.cwiseAbs().maxCoeff());
  write_coil_stack(man.add("maps.stack"), maps);
  write_mask(man.add("mask.json"), mask);
  write_coil_stack(man.add("kspace.stack"), kspace);
  man.extra["acquired_lines"] = mask.acquired_count();
  man.extra["scan_time"] = mask.scan_time();
  man.extra["noise_seed"] = noise_seed(c.seed);
  man.finish(0);
  return 0;
}

int cmd_reconstruct(const Config& c) {
  Manifest man = start_manifest(c, "reconstruct");
  std::optional<CMatrix> truth = load_truth(c);
  CoilStack kspace;
  SamplingMask mask = SamplingMask(std::vector<bool>{true}, 0);
  CoilStack maps;
  if (auto p = c.resolve(c.kspace_path, "kspace.stack")) {
    kspace = read_coil_stack(*p);
    maps = load_maps(c, kspace.grid());
    mask = load_mask(c, kspace.n());
  } else {
    // Nothing to ingest: simulate from the config, as `simulate` would.
    const CMatrix phantom = make_phantom(c.phantom);
    const Grid grid(static_cast<int>(phantom.rows()), static_cast<int>(phantom.cols()));
    maps = load_maps(c, grid);
    mask = load_mask(c, grid.n());
    kspace = simulate_kspace(phantom, maps, mask, c.noise_sigma, noise_seed(c.seed));
    if (!truth) truth = phantom;
  }
  if (mask.n() != kspace.n()) throw std::invalid_argument("mask length does not match k-space rows");

  const double display = truth ? truth->cwiseAbs().maxCoeff() : 0.0;
  std::ostringstream metrics;
  metrics << "method,scan_time,seed,epsilon,ssim_mu\n";
  int status = 0;
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& method : c.methods) {
    try {
      const ReconResult r = run_method(method, kspace, maps, mask, c, c.threads);
      write_coil_stack(man.add(method + ".stack"), single_image_stack(as_complex(r.magnitude)));
      write_png(man.add(method + ".png"), r.magnitude, display > 0.0 ? display : r.magnitude.maxCoeff());
      write_json(man.add(method + "_diagnostics.json"), diagnostics_json(r));
      summary[method] = {{"status", to_string(r.status)}, {"failed_slices", r.failed_slices().size()}};
      if (r.status == SolveStatus::numerical_failure) status = kExitPartial;
      if (truth) {
        const Scores s = score(truth->cwiseAbs(), r.magnitude);
        metrics << method << ',' << format_double(mask.scan_time()) << ',' << c.seed << ',' << csv_field(s.epsilon)
                << ',' << csv_field(s.ssim_mu) << '\n';
        summary[method]["epsilon"] = s.epsilon;
        summary[method]["ssim_mu"] = s.ssim_mu;
      }
    } catch (const std::exception& e) {
      std::cerr << "acmri reconstruct: method " << method << " failed: " << e.what() << "\n";
      summary[method] = {{"status", "error"}, {"error", e.what()}};
      status = kExitPartial;
    }
  }
  if (truth) write_file_atomic(man.add("metrics.csv"), metrics.str());
  man.extra["methods"] = summary;
  man.finish(status);
  return status;
}

std::string subset_label(const std::vector<int>& subset) {
  std::string s = "K" + std::to_string(subset.size());
  return s;
}

int cmd_svd(const Config& c) {
  Manifest man = start_manifest(c, "svd");
  int n = c.phantom.n, m = c.phantom.m;
  if (auto p = c.resolve(c.maps_path, "maps.stack")) {
    const CoilStack header = read_coil_stack(*p);
    n = header.n();
    m = header.m();
  }
  const Grid grid(n, m);
  const CoilStack maps = load_maps(c, grid);

  std::vector<int> all(static_cast<std::size_t>(maps.coils()));
  for (int j = 0; j < maps.coils(); ++j) all[static_cast<std::size_t>(j)] = j;
  const auto subsets = c.coil_subsets.empty() ? std::vector<std::vector<int>>{all} : c.coil_subsets;

  std::vector<SweepConfig> configs;
  auto push = [&](const std::string& tag, const SamplingMask& mask) {
    for (const auto& subset : subsets) configs.push_back({tag + "_" + subset_label(subset), mask, subset});
  };
  if (!c.rates.empty()) {
    for (int r : c.rates) push("R" + std::to_string(r), make_accelerated_mask(n, r, c.acs));
  } else if (c.scheme == "random" && !c.scan_times.empty()) {
    for (double st : c.scan_times)
      for (auto seed : c.seed_list())
        push("st" + format_double(st) + "_s" + std::to_string(seed), make_random_mask(n, st, c.acs, seed));
  } else if (c.scheme == "random") {
    for (auto seed : c.seed_list()) push("st" + format_double(c.scan_time) + "_s" + std::to_string(seed),
                                         make_random_mask(n, c.scan_time, c.acs, seed));
  } else {
    push(c.resolve(c.mask_path, "mask.json") ? "mask" : "R" + std::to_string(c.rate), load_mask(c, n));
  }

  SweepOptions opts;
  opts.threshold = c.threshold;
  opts.multi_map = c.maps > 1;
  opts.threads = c.threads;
  const auto rows = stability_sweep(configs, maps, opts);

  std::ostringstream summary;
  summary << "label,kappa,null_dim,t,scan_time\n";
  nlohmann::json argmin = nlohmann::json::object();
  for (const auto& row : rows) {
    summary << row.label << ',' << csv_field(row.kappa) << ',' << row.null_dim << ',' << format_double(row.threshold)
            << ',' << format_double(row.scan_time) << '\n';
    argmin[row.label] = row.null_dim_argmin;
    std::ostringstream sigma;
    sigma << "index,sigma\n";
    for (Eigen::Index i = 0; i < row.report.sigma.size(); ++i) {
      sigma << i << ',' << format_double(row.report.sigma(i)) << '\n';
    }
    write_file_atomic(man.add("sigma_" + row.label + ".csv"), sigma.str());
    const CMatrix& rsv = row.report.rsv_image;
    write_coil_stack(man.add("rsv_" + row.label + ".stack"), single_image_stack(rsv));
    const RMatrix rsv_mag = rsv.cwiseAbs();
    write_png(man.add("rsv_" + row.label + ".png"), rsv_mag, rsv_mag.maxCoeff() > 0 ? rsv_mag.maxCoeff() : 1.0);
  }
  write_file_atomic(man.add("summary.csv"), summary.str());
  man.extra["null_dim_argmin"] = argmin;
  man.finish(0);
  return 0;
}

int cmd_compare(const Config& c) {
  Manifest man = start_manifest(c, "compare");
  const CMatrix truth = make_phantom(c.phantom);
  const Grid grid(static_cast<int>(truth.rows()), static_cast<int>(truth.cols()));
  const CoilStack maps = load_maps(c, grid);
  const RMatrix truth_mag = truth.cwiseAbs();

  struct Point {
    double nominal;
    SamplingMask mask;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  if (c.scheme == "accel") {
    const auto rates = c.rates.empty() ? std::vector<int>{c.rate} : c.rates;
    for (int r : rates) {
      auto mask = make_accelerated_mask(grid.n(), r, c.acs);
      for (auto seed : c.seed_list()) points.push_back({mask.scan_time(), mask, seed});
    }
  } else {
    const auto times = c.scan_times.empty() ? std::vector<double>{c.scan_time} : c.scan_times;
    for (double st : times)
      for (auto seed : c.seed_list()) points.push_back({st, make_random_mask(grid.n(), st, c.acs, seed), seed});
  }

  struct Row {
    std::string method;
    double scan_time;
    std::uint64_t seed;
    double epsilon = std::nan("");
    double ssim_mu = std::nan("");
    std::string status;
  };
  std::vector<std::vector<Row>> rows(points.size());
  parallel_for(static_cast<int>(points.size()), c.threads, [&](int i) {
    const auto& pt = points[static_cast<std::size_t>(i)];
    const CoilStack kspace = simulate_kspace(truth, maps, pt.mask, c.noise_sigma, noise_seed(pt.seed));
    for (const auto& method : c.methods) {
      Row row{method, pt.nominal, pt.seed, std::nan(""), std::nan(""), ""};
      try {
        const ReconResult r = run_method(method, kspace, maps, pt.mask, c, 1);
        const Scores s = score(truth_mag, r.magnitude);
        row.epsilon = s.epsilon;
        row.ssim_mu = s.ssim_mu;
        row.status = r.status == SolveStatus::numerical_failure ? "partial" : "ok";
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
      rows[static_cast<std::size_t>(i)].push_back(std::move(row));
    }
  });

  int status = 0;
  std::ostringstream long_csv;
  long_csv << "method,scan_time,seed,epsilon,ssim_mu,status\n";
  // (method, scan_time) -> sums over successful seeds.
  std::map<std::pair<std::string, double>, std::array<double, 3>> agg;
  for (const auto& point_rows : rows) {
    for (const auto& r : point_rows) {
      std::string st = r.status;
      std::replace(st.begin(), st.end(), ',', ';');
      long_csv << r.method << ',' << format_double(r.scan_time) << ',' << r.seed << ',' << csv_field(r.epsilon) << ','
               << csv_field(r.ssim_mu) << ',' << st << '\n';
      if (r.status != "ok") status = kExitPartial;
      auto& a = agg[{r.method, r.scan_time}];
      if (std::isfinite(r.epsilon)) {
        a[0] += r.epsilon;
        a[1] += r.ssim_mu;
        a[2] += 1.0;
      }
    }
  }
  write_file_atomic(man.add("metrics_long.csv"), long_csv.str());

  std::ostringstream agg_csv;
  agg_csv << "method,scan_time,epsilon_mean,ssim_mu_mean,n\n";
  std::map<std::string, Series> eps_series, ssim_series;
  for (const auto& [key, a] : agg) {
    const double e = a[2] > 0 ? a[0] / a[2] : std::nan("");
    const double s = a[2] > 0 ? a[1] / a[2] : std::nan("");
    agg_csv << key.first << ',' << format_double(key.second) << ',' << csv_field(e) << ',' << csv_field(s) << ','
            << static_cast<int>(a[2]) << '\n';
    for (auto* series : {&eps_series, &ssim_series}) (*series)[key.first].label = key.first;
    eps_series[key.first].x.push_back(key.second);
    eps_series[key.first].y.push_back(e);
    ssim_series[key.first].x.push_back(key.second);
    ssim_series[key.first].y.push_back(s);
  }
  write_file_atomic(man.add("metrics_aggregate.csv"), agg_csv.str());

  // Plot series in the order the methods were requested.
  std::vector<Series> eps_list, ssim_list;
  nlohmann::json legend = nlohmann::json::object();
  for (const auto& method : c.methods) {
    if (!eps_series.count(method)) continue;
    const auto& color = plot_palette()[eps_list.size() % plot_palette().size()];
    legend[method] = {color[0], color[1], color[2]};
    eps_list.push_back(eps_series[method]);
    ssim_list.push_back(ssim_series[method]);
  }
  const auto er = line_plot(man.add("epsilon_vs_scan_time.png"), eps_list);
  const auto sr = line_plot(man.add("ssim_vs_scan_time.png"), ssim_list);
  man.extra["plots"] = {{"legend_rgb", legend},
                        {"epsilon_range", {er.x_min, er.x_max, er.y_min, er.y_max}},
                        {"ssim_range", {sr.x_min, sr.x_max, sr.y_min, sr.y_max}}};
  man.finish(status);
  return status;
}

int cmd_metrics(const Config& c) {
  Manifest man = start_manifest(c, "metrics");
  const auto truth_path = c.resolve(c.truth_path, "phantom.stack");
  if (!truth_path) throw std::invalid_argument("metrics needs --truth (or --input with phantom.stack)");
  if (c.estimate_paths.empty()) throw std::invalid_argument("metrics needs at least one --estimate");
  const CoilStack truth_stack = read_coil_stack(*truth_path);
  const RMatrix truth = sos_combine(truth_stack);

  std::ostringstream csv;
  csv << "method,scan_time,seed,epsilon,ssim_mu\n";
  std::string scan_time;
  if (auto p = c.resolve(c.mask_path, "mask.json")) scan_time = format_double(read_mask(*p).scan_time());
  nlohmann::json results = nlohmann::json::object();
  for (const auto& path : c.estimate_paths) {
    const CoilStack est = read_coil_stack(path);
    if (est.n() != truth_stack.n() || est.m() != truth_stack.m()) {
      throw std::invalid_argument(path + ": size does not match the truth image");
    }
    const Scores s = score(truth, sos_combine(est));
    const std::string label = fs::path(path).stem().string();
    csv << label << ',' << scan_time << ',' << c.seed << ',' << csv_field(s.epsilon) << ',' << csv_field(s.ssim_mu)
        << '\n';
    results[label] = {{"epsilon", s.epsilon}, {"ssim_mu", s.ssim_mu}};
  }
  write_file_atomic(man.add("metrics.csv"), csv.str());
  man.extra["metrics"] = results;
  man.finish(0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-coil MRI reconstruction and stability analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "acmri 0.1.0");

  Overrides o;
  auto* simulate = app.add_subcommand("simulate", "write phantom, maps, mask and k-space files");
  auto* recon = app.add_subcommand("reconstruct", "reconstruct images with the requested methods");
  auto* svd = app.add_subcommand("svd", "singular-value stability analysis");
  auto* compare = app.add_subcommand("compare", "sweep scan times x seeds x methods");
  auto* metrics = app.add_subcommand("metrics", "score estimates against a reference image");
  for (auto* cmd : {simulate, recon, svd, compare, metrics}) add_shared_flags(cmd, o);
  for (auto* cmd : {recon, compare}) {
    cmd->add_option("--methods", o.methods, "ac, zero_fill, tikhonov, tv2d")->delimiter(',');
  }
  recon->add_option("--truth", o.truth, "reference image for metrics (CoilStack)");
  metrics->add_option("--truth", o.truth, "reference image (CoilStack)");
  metrics->add_option("--estimate", o.estimates, "estimate image(s) (CoilStack)")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    const Config c = load_config(o);
    if (simulate->parsed()) return cmd_simulate(c);
    if (recon->parsed()) return cmd_reconstruct(c);
    if (svd->parsed()) return cmd_svd(c);
    if (compare->parsed()) return cmd_compare(c);
    return cmd_metrics(c);
  } catch (const std::invalid_argument& e) {
    std::cerr << "acmri: invalid argument: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::logic_error& e) {
    std::cerr << "acmri: invalid argument: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "acmri: bad config: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "acmri: " << e.what() << "\n";
    return kExitIo;
  }
}
