#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "acmri/simulation.hpp"
#include "acmri/svd_analysis.hpp"
#include "oracles.hpp"

using namespace acmri;

TEST_CASE("identity blocks") {
  const std::vector<CMatrix> blocks(3, CMatrix::Identity(4, 4));
  const auto r = svd_blocks(blocks);
  CHECK(r.sigma.size() == 12);
  CHECK((r.sigma.array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(r.kappa == doctest::Approx(1.0));
  CHECK(r.null_dim == 0);
  CHECK(r.null_dim_argmin == 0);
  CHECK(r.threshold == 0.01);
}

TEST_CASE("pooled sigma equals dense SVD of the block-diagonal matrix") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 15);
    const int m = 1 + static_cast<int>(rng() % 4);
    std::vector<CMatrix> blocks;
    for (int i = 0; i < m; ++i) blocks.push_back(oracle::random_complex(2 * n, n, rng));
    const auto r = svd_blocks(blocks);
    const RVector dense = oracle::dense_block_diagonal_sigma(blocks);
    REQUIRE(dense.size() == r.sigma.size());
    CHECK((dense - r.sigma).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("report invariants and right singular vectors") {
  std::mt19937_64 rng(23);
  const int n = 10;
  const Grid grid(n, 4);
  auto flags = oracle::random_flags(n, rng);
  flags[n / 2] = true;
  const auto op = build_A_dft(flags, grid);
  CoilModel model;
  model.coils = 2;
  const auto maps = make_coil_maps(model, grid);
  const auto blocks = single_map_blocks(op, maps);
  const auto r = svd_blocks(blocks, 0.01, 2);
  for (Eigen::Index i = 1; i < r.sigma.size(); ++i) CHECK(r.sigma(i) <= r.sigma(i - 1));
  CHECK(r.kappa >= 1.0);
  CHECK(r.null_dim >= 0);
  CHECK(r.null_dim <= r.sigma.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const CVector v = r.rsv_image.col(static_cast<Eigen::Index>(i));
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((blocks[i] * v).norm() == doctest::Approx(r.block_sigma[i].minCoeff()).epsilon(1e-10));
    Eigen::Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    CHECK(v(peak).real() > 0.0);
    CHECK(v(peak).imag() == 0.0);
  }
}

TEST_CASE("single uniform coil: null dimension counts missing lines") {
  const int n = 16;
  const int m = 3;
  const Grid grid(n, m);
  const auto mask = make_accelerated_mask(n, 3, 4);
  CoilModel model;
  model.coils = 1;
  model.uniform = true;
  const auto maps = make_coil_maps(model, grid);
  const auto r = svd_blocks(single_map_blocks(build_A_dft(mask, grid), maps), 0.0);
  // At t = 0 count the exactly-zero ones via a tiny threshold; projections give 0 or 1.
  const auto near_zero = (r.sigma.array() < 1e-10).count();
  CHECK(near_zero == m * (n - mask.acquired_count()));
  CHECK(null_dimension(r.sigma, 0.01) == m * (n - mask.acquired_count()));
  CHECK(r.kappa > 1e12);
}

TEST_CASE("kappa equals one only for flat spectra") {
  RVector flat = RVector::Constant(5, 2.0);
  CHECK(condition_number(flat) == 1.0);
  RVector uneven(3);
  uneven << 3.0, 2.0, 1.0;
  CHECK(condition_number(uneven) == 3.0);
}

TEST_CASE("argmin form of the null dimension") {
  RVector s(5);
  s << 1.0, 0.5, 0.02, 0.009, 0.0;
  CHECK(null_dimension(s, 0.01) == 2);
  // |sigma_i - 0.01| is smallest at i = 4 (1-based) -> 5 - 4 = 1.
  CHECK(null_dimension_argmin(s, 0.01) == 1);
}

TEST_CASE("pseudoinverse") {
  SUBCASE("identity returns the data") {
    const std::vector<CMatrix> blocks(2, CMatrix::Identity(3, 3));
    CVector b(6);
    b << 1.0, 2.0, cplx(0, 3), 4.0, 5.0, 6.0;
    CHECK(pseudoinverse_apply(blocks, b).x.isApprox(b));
  }
  SUBCASE("scalar") {
    const std::vector<CMatrix> blocks{CMatrix::Constant(1, 1, 2.0)};
    const auto r = pseudoinverse_apply(blocks, CVector::Constant(1, 6.0));
    CHECK(r.x(0).real() == doctest::Approx(3.0));
  }
  SUBCASE("least squares against normal equations") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 5; ++t) {
      const std::vector<CMatrix> blocks{oracle::random_complex(8, 4, rng)};
      const CVector b = oracle::random_complex(8, 1, rng);
      const auto r = pseudoinverse_apply(blocks, b);
      const CVector ref = oracle::normal_equations_solve(blocks[0], b);
      CHECK(std::abs((blocks[0] * r.x - b).norm() - (blocks[0] * ref - b).norm()) < 1e-10);
      CHECK((r.x - ref).norm() < 1e-10);
    }
  }
  SUBCASE("truncation") {
    CMatrix d = CMatrix::Zero(3, 3);
    d.diagonal() << 4.0, 1.0, 1e-6;
    const std::vector<CMatrix> blocks{d};
    const CVector b = CVector::Ones(3);
    const auto kept = pseudoinverse_apply(blocks, b, Truncation{0.5, std::nullopt});
    CHECK(kept.retained == 2);
    CHECK(std::abs(kept.x(2)) == 0.0);
    const auto by_rank = pseudoinverse_apply(blocks, b, Truncation{std::nullopt, 1});
    CHECK(by_rank.retained == 1);
    const auto none = pseudoinverse_apply(blocks, b, Truncation{10.0, std::nullopt});
    CHECK(none.all_truncated);
    CHECK(none.x.isZero());
  }
  CHECK_THROWS_AS(pseudoinverse_apply(std::vector<CMatrix>{CMatrix::Identity(2, 2)}, CVector::Ones(3)),
                  std::invalid_argument);
}

TEST_CASE("svd_blocks errors and schedule independence") {
  CHECK_THROWS_AS(svd_blocks(std::vector<CMatrix>{}), std::invalid_argument);
  CHECK_THROWS_AS(svd_blocks(std::vector<CMatrix>{CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}),
                  std::invalid_argument);
  std::mt19937_64 rng(41);
  std::vector<CMatrix> blocks;
  for (int i = 0; i < 6; ++i) blocks.push_back(oracle::random_complex(6, 3, rng));
  const auto a = svd_blocks(blocks, 0.01, 1);
  const auto b = svd_blocks(blocks, 0.01, 4);
  CHECK(a.sigma == b.sigma);
  CHECK(a.rsv_image == b.rsv_image);
}

TEST_CASE("stability sweep") {
  SUBCASE("identity configuration") {
    const Grid grid(8, 3);
    CoilModel model;
    model.coils = 1;
    model.uniform = true;
    const auto maps = make_coil_maps(model, grid);
    const std::vector<SweepConfig> configs{{"full", make_accelerated_mask(8, 1, 0), {0}}};
    const auto rows = stability_sweep(configs, maps);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].kappa == doctest::Approx(1.0));
    CHECK(rows[0].null_dim == 0);
    CHECK(rows[0].scan_time == 1.0);
  }
  SUBCASE("null dimension shrinks as coils are added") {
    const int n = 32;
    const Grid grid(n, n);
    CoilModel model;
    model.coils = 8;
    const auto maps = make_coil_maps(model, grid);
    const std::vector<std::vector<int>> subsets{{0}, {0, 4}, {0, 2, 4, 6}, {0, 1, 2, 3, 4, 5, 6, 7}};
    for (int rate : {2, 3, 4}) {
      std::vector<SweepConfig> configs;
      for (const auto& s : subsets) configs.push_back({"K" + std::to_string(s.size()), make_accelerated_mask(n, rate, 8), s});
      const auto rows = stability_sweep(configs, maps);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].null_dim <= rows[i - 1].null_dim);
        CHECK(rows[i].kappa <= rows[i - 1].kappa);
      }
    }
  }
}

TEST_CASE("published defaults") {
  CHECK(kDefaultNullThreshold == 0.01);
  CHECK(SweepOptions{}.threshold == 0.01);
}
