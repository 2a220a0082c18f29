#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acmri/coil_stack.hpp"
#include "acmri/geometry.hpp"
#include "acmri/types.hpp"

namespace acmri {

// Filled ellipse in image coordinates (x1 = column axis, x2 = row axis).
struct Ellipse {
  double center_x1 = 0.0;
  double center_x2 = 0.0;
  double axis_x1 = 0.0;
  double axis_x2 = 0.0;
  double angle_deg = 0.0;
  double intensity = 1.0;

  bool contains(double x1, double x2) const;
};

enum class PhantomKind { shepp_logan, disks, file };

struct PhantomSpec {
  PhantomKind kind = PhantomKind::shepp_logan;
  int n = 64;
  int m = 64;
  std::vector<Ellipse> shapes;  // disks kind; circles have equal axes
  double phase_x1 = 0.0;        // optional linear phase ramp (radians per unit length)
  double phase_x2 = 0.0;
  std::string path;             // file kind: CoilStack image, first coil used
};

// Modified (high-contrast) Shepp-Logan ellipses scaled into [-1/2, 1/2]^2.
std::vector<Ellipse> shepp_logan_ellipses();

CMatrix make_phantom(const PhantomSpec& spec);

struct CoilModel {
  int coils = 8;
  double ring_radius = 0.5;
  double width = 0.35;       // Gaussian sigma of each profile
  double phase_slope = 3.0;  // linear phase, radians per unit length along the coil direction
  bool uniform = false;      // s == 1 for every coil
  bool normalize = true;     // scale so sum_j |s_j|^2 == 1 pointwise
};

// Coil j sits at angle 2*pi*j/K on the ring; p = 1 map per coil.
CoilStack make_coil_maps(const CoilModel& model, const Grid& grid);

enum class KspaceScaling { unitary, unnormalized };

// h_j = centered 2-D DFT of s_j F, complex Gaussian noise with E|noise|^2 = sigma^2
// on acquired lines, missing lines exactly zero.
CoilStack simulate_kspace(const CMatrix& image, const CoilStack& maps, const SamplingMask& mask,
                          double noise_sigma, std::uint64_t seed,
                          KspaceScaling scaling = KspaceScaling::unitary);

PhantomSpec phantom_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PhantomSpec& spec);
CoilModel coil_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CoilModel& model);

}  // namespace acmri
