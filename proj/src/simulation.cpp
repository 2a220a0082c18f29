#include "acmri/simulation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "acmri/fourier.hpp"
#include "acmri/io.hpp"

namespace acmri {

bool Ellipse::contains(double x1, double x2) const {
  const double theta = angle_deg * kPi / 180.0;
  const double dx = x1 - center_x1;
  const double dy = x2 - center_x2;
  const double a = dx * std::cos(theta) + dy * std::sin(theta);
  const double b = -dx * std::sin(theta) + dy * std::cos(theta);
  return (a * a) / (axis_x1 * axis_x1) + (b * b) / (axis_x2 * axis_x2) <= 1.0;
}

std::vector<Ellipse> shepp_logan_ellipses() {
  // intensity, semi-axis x, semi-axis y, center x, center y, angle (deg) on [-1, 1]^2
  static constexpr double table[10][6] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},        {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},       {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},     {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},   {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  std::vector<Ellipse> out;
  for (const auto& row : table) {
    // Halve into the unit square; rows run top to bottom, so y flips.
    out.push_back(Ellipse{0.5 * row[3], -0.5 * row[4], 0.5 * row[1], 0.5 * row[2], -row[5], row[0]});
  }
  return out;
}

namespace {

void check_support(const Ellipse& e) {
  if (!std::isfinite(e.intensity)) {
    throw std::invalid_argument("phantom intensity must be finite");
  }
  if (!(e.axis_x1 > 0.0) || !(e.axis_x2 > 0.0)) {
    throw std::invalid_argument("phantom shape axes must be positive");
  }
  const double theta = e.angle_deg * kPi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double ext1 = std::sqrt(e.axis_x1 * e.axis_x1 * c * c + e.axis_x2 * e.axis_x2 * s * s);
  const double ext2 = std::sqrt(e.axis_x1 * e.axis_x1 * s * s + e.axis_x2 * e.axis_x2 * c * c);
  if (std::abs(e.center_x1) + ext1 >= 0.5 || std::abs(e.center_x2) + ext2 >= 0.5) {
    throw std::invalid_argument("phantom shape leaves the open unit square");
  }
}

}  // namespace

CMatrix make_phantom(const PhantomSpec& spec) {
  if (spec.kind == PhantomKind::file) {
    const CoilStack stack = read_coil_stack(spec.path);
    return stack.at(0);
  }
  const Grid grid(spec.n, spec.m);
  const std::vector<Ellipse> shapes =
      spec.kind == PhantomKind::shepp_logan ? shepp_logan_ellipses() : spec.shapes;
  for (const auto& e : shapes) check_support(e);

  CMatrix image = CMatrix::Zero(spec.n, spec.m);
  for (int col = 0; col < spec.m; ++col) {
    for (int row = 0; row < spec.n; ++row) {
      const double x1 = grid.u(col);
      const double x2 = grid.v(row);
      double value = 0.0;
      for (const auto& e : shapes) {
        if (e.contains(x1, x2)) value += e.intensity;
      }
      if (value != 0.0 && (spec.phase_x1 != 0.0 || spec.phase_x2 != 0.0)) {
        image(row, col) = std::polar(1.0, spec.phase_x1 * x1 + spec.phase_x2 * x2) * value;
      } else {
        image(row, col) = value;
      }
    }
  }
  return image;
}

CoilStack make_coil_maps(const CoilModel& model, const Grid& grid) {
  if (model.coils < 1) {
    throw std::invalid_argument("coil model needs at least one coil");
  }
  CoilStack maps(grid.n(), grid.m(), model.coils, 1, StackKind::sensitivity);
  if (model.uniform) {
    for (int j = 0; j < model.coils; ++j) maps.at(j).setOnes();
  } else {
    if (!(model.width > 0.0)) {
      throw std::invalid_argument("coil profile width must be positive");
    }
    for (int j = 0; j < model.coils; ++j) {
      const double theta = 2.0 * kPi * j / model.coils;
      const double c1 = model.ring_radius * std::cos(theta);
      const double c2 = model.ring_radius * std::sin(theta);
      CMatrix& s = maps.at(j);
      for (int col = 0; col < grid.m(); ++col) {
        for (int row = 0; row < grid.n(); ++row) {
          const double x1 = grid.u(col);
          const double x2 = grid.v(row);
          const double r2 = (x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2);
          const double phase = model.phase_slope * (std::cos(theta) * x1 + std::sin(theta) * x2);
          s(row, col) = std::polar(std::exp(-r2 / (2.0 * model.width * model.width)), phase);
        }
      }
    }
  }
  if (model.normalize && !model.uniform) {
    RMatrix energy = RMatrix::Zero(grid.n(), grid.m());
    for (int j = 0; j < model.coils; ++j) energy += maps.at(j).cwiseAbs2();
    const RMatrix inv = energy.cwiseSqrt().cwiseInverse();
    for (int j = 0; j < model.coils; ++j) maps.at(j) = maps.at(j).cwiseProduct(inv.cast<cplx>());
  }
  return maps;
}

CoilStack simulate_kspace(const CMatrix& image, const CoilStack& maps, const SamplingMask& mask,
                          double noise_sigma, std::uint64_t seed, KspaceScaling scaling) {
  if (image.rows() != maps.n() || image.cols() != maps.m() || mask.n() != maps.n()) {
    throw std::invalid_argument("image, maps and mask disagree on the grid");
  }
  if (!(noise_sigma >= 0.0)) {
    throw std::invalid_argument("noise sigma must be non-negative");
  }
  const double scale =
      scaling == KspaceScaling::unitary ? 1.0 : std::sqrt(static_cast<double>(maps.n()) * maps.m());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, noise_sigma / std::sqrt(2.0));

  CoilStack out(maps.n(), maps.m(), maps.coils(), 1, StackKind::kspace);
  for (int j = 0; j < maps.coils(); ++j) {
    CMatrix coil_image = CMatrix::Zero(maps.n(), maps.m());
    for (int q = 0; q < maps.maps(); ++q) coil_image += maps.at(j, q).cwiseProduct(image);
    CMatrix h = scale * fft2c(coil_image);
    for (int col = 0; col < maps.m(); ++col) {
      for (int row = 0; row < maps.n(); ++row) {
        if (!mask.acquired(row)) {
          h(row, col) = 0.0;
        } else if (noise_sigma > 0.0) {
          const double re = normal(rng);
          const double im = normal(rng);
          h(row, col) += cplx(re, im);
        }
      }
    }
    out.at(j) = std::move(h);
  }
  return out;
}

namespace {

PhantomKind phantom_kind_from_string(const std::string& name) {
  if (name == "shepp_logan") return PhantomKind::shepp_logan;
  if (name == "disks") return PhantomKind::disks;
  if (name == "file") return PhantomKind::file;
  throw std::invalid_argument("unsupported phantom kind '" + name + "'");
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::shepp_logan:
      return "shepp_logan";
    case PhantomKind::disks:
      return "disks";
    case PhantomKind::file:
      return "file";
  }
  return "shepp_logan";
}

}  // namespace

PhantomSpec phantom_spec_from_json(const nlohmann::json& j) {
  PhantomSpec spec;
  spec.kind = phantom_kind_from_string(j.value("kind", std::string("shepp_logan")));
  spec.n = j.value("n", spec.n);
  spec.m = j.value("m", spec.m);
  spec.path = j.value("path", std::string());
  if (j.contains("phase")) {
    spec.phase_x1 = j.at("phase").at(0).get<double>();
    spec.phase_x2 = j.at("phase").at(1).get<double>();
  }
  for (const auto& s : j.value("shapes", nlohmann::json::array())) {
    Ellipse e;
    e.center_x1 = s.at("center").at(0).get<double>();
    e.center_x2 = s.at("center").at(1).get<double>();
    if (s.contains("radius")) {
      e.axis_x1 = e.axis_x2 = s.at("radius").get<double>();
    } else {
      e.axis_x1 = s.at("axes").at(0).get<double>();
      e.axis_x2 = s.at("axes").at(1).get<double>();
    }
    e.angle_deg = s.value("angle", 0.0);
    e.intensity = s.value("intensity", 1.0);
    spec.shapes.push_back(e);
  }
  return spec;
}

nlohmann::json to_json(const PhantomSpec& spec) {
  nlohmann::json j{{"kind", to_string(spec.kind)}, {"n", spec.n}, {"m", spec.m},
                   {"phase", {spec.phase_x1, spec.phase_x2}}};
  if (!spec.path.empty()) j["path"] = spec.path;
  auto shapes = nlohmann::json::array();
  for (const auto& e : spec.shapes) {
    shapes.push_back({{"center", {e.center_x1, e.center_x2}},
                      {"axes", {e.axis_x1, e.axis_x2}},
                      {"angle", e.angle_deg},
                      {"intensity", e.intensity}});
  }
  j["shapes"] = shapes;
  return j;
}

CoilModel coil_model_from_json(const nlohmann::json& j) {
  CoilModel model;
  model.coils = j.value("coils", model.coils);
  model.ring_radius = j.value("ring_radius", model.ring_radius);
  model.width = j.value("width", model.width);
  model.phase_slope = j.value("phase_slope", model.phase_slope);
  model.uniform = j.value("uniform", model.uniform);
  model.normalize = j.value("normalize", model.normalize);
  return model;
}

nlohmann::json to_json(const CoilModel& model) {
  return {{"coils", model.coils},         {"ring_radius", model.ring_radius},
          {"width", model.width},         {"phase_slope", model.phase_slope},
          {"uniform", model.uniform},     {"normalize", model.normalize}};
}

}  // namespace acmri
