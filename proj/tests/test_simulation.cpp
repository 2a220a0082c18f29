#include <doctest.h>

#include <cmath>

#include "acmri/fourier.hpp"
#include "acmri/operators.hpp"
#include "acmri/simulation.hpp"

using namespace acmri;

TEST_CASE("disk phantoms") {
  PhantomSpec spec;
  spec.kind = PhantomKind::disks;
  spec.n = spec.m = 64;
  CHECK(make_phantom(spec).cwiseAbs().maxCoeff() == 0.0);

  spec.shapes.push_back(Ellipse{0.0, 0.0, 0.25, 0.25, 0.0, 1.0});
  const CMatrix img = make_phantom(spec);
  CHECK(img(32, 32) == cplx(1.0, 0.0));
  CHECK(img(1, 1) == cplx(0.0, 0.0));

  spec.shapes.push_back(Ellipse{0.4, 0.0, 0.2, 0.2, 0.0, 1.0});
  CHECK_THROWS_AS(make_phantom(spec), std::invalid_argument);
}

TEST_CASE("shepp-logan matches per-pixel ellipse membership") {
  PhantomSpec spec;
  spec.n = spec.m = 64;
  const CMatrix img = make_phantom(spec);
  const Grid grid(64, 64);
  // Independent evaluation straight from the [-1, 1]^2 parameter table.
  const double table[10][6] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},      {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},  {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},     {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},   {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0}, {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  int mismatches = 0;
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      const double X = 2.0 * grid.u(c);
      const double Y = -2.0 * grid.v(r);
      double value = 0.0;
      for (const auto& e : table) {
        const double phi = e[5] * kPi / 180.0;
        const double dx = X - e[3];
        const double dy = Y - e[4];
        const double a = dx * std::cos(phi) + dy * std::sin(phi);
        const double b = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((a * a) / (e[1] * e[1]) + (b * b) / (e[2] * e[2]) <= 1.0) value += e[0];
      }
      if (std::abs(img(r, c) - cplx(value, 0.0)) > 1e-12) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
  CHECK(img.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("phase ramp keeps magnitude") {
  PhantomSpec spec;
  spec.n = spec.m = 32;
  const CMatrix plain = make_phantom(spec);
  spec.phase_x1 = 2.0;
  spec.phase_x2 = -1.0;
  const CMatrix ramped = make_phantom(spec);
  CHECK(ramped.cwiseAbs().isApprox(plain.cwiseAbs()));
  CHECK(ramped.imag().cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("coil maps") {
  const Grid grid(32, 32);
  SUBCASE("uniform coil") {
    CoilModel model;
    model.coils = 1;
    model.uniform = true;
    const auto maps = make_coil_maps(model, grid);
    CHECK(maps.at(0) == CMatrix::Ones(32, 32));
  }
  SUBCASE("two coils are point reflections of each other") {
    CoilModel model;
    model.coils = 2;
    for (bool normalize : {false, true}) {
      model.normalize = normalize;
      const auto maps = make_coil_maps(model, grid);
      // v(i) = -v(n - 2 - i) on this grid, so reflect over the first n-1 samples.
      for (int r = 0; r < 31; ++r) {
        for (int c = 0; c < 31; ++c) {
          CHECK(std::abs(maps.at(1)(r, c) - maps.at(0)(30 - r, 30 - c)) < 1e-12);
        }
      }
    }
  }
  SUBCASE("combined sensitivity is positive over the phantom support") {
    PhantomSpec spec;
    spec.n = spec.m = 32;
    const CMatrix img = make_phantom(spec);
    for (int coils : {1, 3, 8}) {
      CoilModel model;
      model.coils = coils;
      model.normalize = false;
      const auto maps = make_coil_maps(model, grid);
      for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
          if (img(r, c) == cplx(0.0, 0.0)) continue;
          double energy = 0.0;
          for (int j = 0; j < coils; ++j) energy += std::norm(maps.at(j)(r, c));
          CHECK(energy > 0.0);
        }
      }
    }
  }
  SUBCASE("normalized maps have unit root-sum-of-squares") {
    CoilModel model;
    model.coils = 5;
    const auto maps = make_coil_maps(model, grid);
    RMatrix energy = RMatrix::Zero(32, 32);
    for (int j = 0; j < 5; ++j) energy += maps.at(j).cwiseAbs2();
    CHECK((energy.array() - 1.0).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("simulate_kspace") {
  const int n = 64;
  const Grid grid(n, n);
  PhantomSpec spec;
  spec.n = spec.m = n;
  spec.phase_x1 = 1.0;
  const CMatrix img = make_phantom(spec);
  CoilModel model;
  model.coils = 3;
  const auto maps = make_coil_maps(model, grid);

  SUBCASE("noiseless full data round-trips to coil images") {
    const auto full = make_accelerated_mask(n, 1, 0);
    const auto g = prepare_g(simulate_kspace(img, maps, full, 0.0, 0));
    for (int j = 0; j < 3; ++j) CHECK((g.at(j) - maps.at(j).cwiseProduct(img)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("Parseval under both scalings") {
    const auto full = make_accelerated_mask(n, 1, 0);
    const auto h = simulate_kspace(img, maps, full, 0.0, 0);
    const auto raw = simulate_kspace(img, maps, full, 0.0, 0, KspaceScaling::unnormalized);
    for (int j = 0; j < 3; ++j) {
      const double image_energy = maps.at(j).cwiseProduct(img).squaredNorm();
      CHECK(h.at(j).squaredNorm() == doctest::Approx(image_energy).epsilon(1e-12));
      CHECK(raw.at(j).squaredNorm() == doctest::Approx(n * n * image_energy).epsilon(1e-12));
    }
  }
  SUBCASE("missing rows are exactly zero and noise has the requested spread") {
    const auto mask = make_random_mask(n, 0.5, 8, 4);
    const auto h = simulate_kspace(CMatrix::Zero(n, n), maps, mask, 0.3, 11);
    double sum2 = 0.0;
    long count = 0;
    for (int j = 0; j < 3; ++j) {
      for (int row = 0; row < n; ++row) {
        if (!mask.acquired(row)) {
          CHECK(h.at(j).row(row).cwiseAbs().maxCoeff() == 0.0);
        } else {
          sum2 += h.at(j).row(row).squaredNorm();
          count += n;
        }
      }
    }
    REQUIRE(count >= 4096);
    CHECK(std::abs(std::sqrt(sum2 / count) - 0.3) < 0.05 * 0.3);
  }
  SUBCASE("deterministic per seed") {
    const auto mask = make_random_mask(n, 0.5, 8, 4);
    CHECK(simulate_kspace(img, maps, mask, 0.1, 5) == simulate_kspace(img, maps, mask, 0.1, 5));
    CHECK_FALSE(simulate_kspace(img, maps, mask, 0.1, 5) == simulate_kspace(img, maps, mask, 0.1, 6));
  }
}

TEST_CASE("phantom and coil settings round-trip through json") {
  const auto spec = phantom_spec_from_json(nlohmann::json::parse(
      R"({"kind":"disks","n":32,"m":48,"shapes":[{"center":[0.1,0.0],"radius":0.2,"intensity":0.5}]})"));
  CHECK(spec.kind == PhantomKind::disks);
  CHECK(spec.m == 48);
  REQUIRE(spec.shapes.size() == 1);
  CHECK(spec.shapes[0].axis_x2 == 0.2);
  const auto again = phantom_spec_from_json(to_json(spec));
  CHECK(make_phantom(again) == make_phantom(spec));
  CHECK_THROWS_AS(phantom_spec_from_json(nlohmann::json::parse(R"({"kind":"brain"})")), std::invalid_argument);

  const auto model = coil_model_from_json(nlohmann::json::parse(R"({"coils":4,"width":0.3})"));
  CHECK(model.coils == 4);
  CHECK(coil_model_from_json(to_json(model)).width == 0.3);
}
