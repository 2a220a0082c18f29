#include <doctest.h>

#include <random>

#include "acmri/fourier.hpp"
#include "acmri/operators.hpp"
#include "oracles.hpp"

using namespace acmri;

TEST_CASE("fft2c agrees with explicit sums and is unitary") {
  std::mt19937_64 rng(1);
  for (auto [n, m] : {std::pair{8, 8}, std::pair{7, 10}, std::pair{5, 3}}) {
    const CMatrix x = oracle::random_complex(n, m, rng);
    const CMatrix k = fft2c(x);
    CHECK((k - oracle::naive_dft2(x, false)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ifft2c(k) - x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(k.norm() == doctest::Approx(x.norm()).epsilon(1e-12));
  }
  const CMatrix W = dft_matrix(9);
  CHECK((W.adjoint() * W - CMatrix::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("kernel_eval trivial values") {
  CHECK(std::abs(kernel_eval(BandSet{}, 0.3)) == 0.0);
  const BandSet one({{0.0, 2.0}});
  CHECK(kernel_eval(one, 0.0).real() == doctest::Approx(2.0 / kPi));
  CHECK(kernel_eval(one, 0.0).imag() == 0.0);
}

TEST_CASE("kernel_eval matches quadrature of the band integral") {
  const BandSet band({{1.0, 0.5}});
  const cplx expected = oracle::band_integral({{1.0, 0.5}}, 0.7);
  CHECK(std::abs(kernel_eval(band, 0.7) - expected) < 1e-10);

  const BandSet two({{-20.0, 3.0}, {15.0, 7.5}});
  for (double x : {-0.9, -0.2, 0.0, 0.33, 1.0}) {
    CHECK(std::abs(kernel_eval(two, x) - oracle::band_integral({{-20.0, 3.0}, {15.0, 7.5}}, x)) < 1e-10);
  }
}

TEST_CASE("kernel is Hermitian for real centers") {
  const BandSet bands({{-5.0, 1.0}, {9.0, 2.0}});
  for (double x : {0.1, 0.27, 0.5}) {
    CHECK(std::abs(kernel_eval(bands, -x) - std::conj(kernel_eval(bands, x))) < 1e-15);
  }
}

TEST_CASE("analytic operator") {
  const Grid grid(16, 4);
  const auto identity = build_A_analytic(BandSet{}, grid);
  CHECK(identity.A.isApprox(CMatrix::Identity(16, 16)));

  const auto sym = build_A_analytic(BandSet({{0.0, 6.0}}), grid);
  CHECK(sym.A.imag().cwiseAbs().maxCoeff() < 1e-15);
  CHECK((sym.A - sym.A.transpose()).cwiseAbs().maxCoeff() < 1e-15);

  // Probe with delta functions against direct midpoint quadrature of (I - L).
  const std::vector<std::pair<double, double>> raw{{3.0, 2.0}, {20.0, 4.0}};
  const auto op = build_A_analytic(BandSet({{3.0, 2.0}, {20.0, 4.0}}), grid);
  for (int b = 0; b < 16; ++b) {
    for (int a = 0; a < 16; ++a) {
      const cplx quad = oracle::band_integral(raw, grid.v(a) - grid.v(b));
      const cplx expected = (a == b ? 1.0 : 0.0) - quad / 16.0;
      CHECK(std::abs(op.A(a, b) - expected) < 1e-12);
    }
  }
}

TEST_CASE("dft operator is an orthogonal projection") {
  const Grid grid(32, 4);
  CHECK(build_A_dft(std::vector<bool>(32, true), grid).A.isApprox(CMatrix::Identity(32, 32), 1e-13));
  CHECK(build_A_dft(std::vector<bool>(32, false), grid).A.cwiseAbs().maxCoeff() < 1e-15);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    auto flags = oracle::random_flags(32, rng);
    flags[0] = true;
    const auto op = build_A_dft(flags, grid);
    CHECK((op.A * op.A - op.A).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((op.A - op.A.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    const auto kept = std::count(flags.begin(), flags.end(), true);
    CHECK(op.A.trace().real() == doctest::Approx(static_cast<double>(kept)).epsilon(1e-12));
    CHECK(std::abs(op.A.trace().imag()) < 1e-12);
  }
  CHECK_THROWS_AS(build_A_dft(std::vector<bool>(31, true), grid), std::invalid_argument);
}

TEST_CASE("analytic and dft operators agree without missing data") {
  const Grid grid(12, 3);
  CHECK(build_A_analytic(BandSet{}, grid).A.isApprox(build_A_dft(std::vector<bool>(12, true), grid).A, 1e-13));
}

namespace {

CoilStack random_stack(int n, int m, int coils, int maps, StackKind kind, std::mt19937_64& rng) {
  CoilStack s(n, m, coils, maps, kind);
  for (int j = 0; j < coils; ++j)
    for (int q = 0; q < maps; ++q) s.at(j, q) = oracle::random_complex(n, m, rng);
  return s;
}

}  // namespace

TEST_CASE("prepare_g") {
  std::mt19937_64 rng(5);
  const int n = 16;
  const int m = 16;
  const CoilStack f = random_stack(n, m, 2, 1, StackKind::image, rng);

  SUBCASE("full data round trip") {
    CoilStack k(n, m, 2, 1, StackKind::kspace);
    for (int j = 0; j < 2; ++j) k.at(j) = fft2c(f.at(j));
    const auto g = prepare_g(k);
    for (int j = 0; j < 2; ++j) CHECK((g.at(j) - f.at(j)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("zero data") {
    const auto g = prepare_g(CoilStack(n, m, 2, 1, StackKind::kspace));
    CHECK(g.at(1).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("per-column identity against explicit-sum DFT") {
    auto flags = oracle::random_flags(n, rng);
    flags[n / 2] = true;
    CoilStack k(n, m, 2, 1, StackKind::kspace);
    for (int j = 0; j < 2; ++j) {
      k.at(j) = oracle::naive_dft2(f.at(j), false);
      for (int row = 0; row < n; ++row)
        if (!flags[static_cast<std::size_t>(row)]) k.at(j).row(row).setZero();
    }
    const auto g = prepare_g(k, Grid(n, m));
    const auto op = build_A_dft(flags, Grid(n, m));
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < m; ++i) {
        CHECK((g.at(j).col(i) - op.A * f.at(j).col(i)).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
  SUBCASE("linearity") {
    const CoilStack a = random_stack(n, m, 2, 1, StackKind::kspace, rng);
    const CoilStack b = random_stack(n, m, 2, 1, StackKind::kspace, rng);
    CoilStack sum(n, m, 2, 1, StackKind::kspace);
    const cplx w(0.3, -1.2);
    for (int j = 0; j < 2; ++j) sum.at(j) = a.at(j) + w * b.at(j);
    const auto ga = prepare_g(a);
    const auto gb = prepare_g(b);
    const auto gs = prepare_g(sum);
    for (int j = 0; j < 2; ++j) CHECK((gs.at(j) - ga.at(j) - w * gb.at(j)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(prepare_g(CoilStack(n, m, 1, 1, StackKind::kspace), Grid(n, m + 1)), std::invalid_argument);
}

TEST_CASE("assemble_slice structure") {
  std::mt19937_64 rng(9);
  const int n = 8;
  const int m = 5;
  const Grid grid(n, m);
  std::vector<bool> flags(n, true);
  flags[1] = flags[2] = false;
  const auto op = build_A_dft(flags, grid);

  SUBCASE("single uniform coil reduces to A and the g column") {
    CoilStack maps(n, m, 1, 1, StackKind::sensitivity);
    maps.at(0).setOnes();
    const CoilStack g = random_stack(n, m, 1, 1, StackKind::image, rng);
    const auto sys = assemble_slice(op, maps, g, 3);
    CHECK(sys.C.isApprox(op.A));
    CHECK(sys.b.isApprox(CVector(g.at(0).col(3))));
  }
  SUBCASE("two coils, one map: blocks are A S^(j)") {
    const CoilStack maps = random_stack(n, m, 2, 1, StackKind::sensitivity, rng);
    const CoilStack g = random_stack(n, m, 2, 1, StackKind::image, rng);
    const auto sys = assemble_slice(op, maps, g, 2);
    REQUIRE(sys.C.rows() == 2 * n);
    for (int j = 0; j < 2; ++j) {
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          CHECK(std::abs(sys.C(j * n + a, b) - op.A(a, b) * maps.at(j).col(2)(b)) < 1e-14);
        }
      }
    }
  }
  SUBCASE("two maps order columns map-major within each coil block") {
    const CoilStack maps = random_stack(n, m, 2, 2, StackKind::sensitivity, rng);
    const CoilStack g = random_stack(n, m, 2, 1, StackKind::image, rng);
    const auto sys = assemble_slice(op, maps, g, 4);
    REQUIRE(sys.C.cols() == 2 * n);
    for (int j = 0; j < 2; ++j)
      for (int q = 0; q < 2; ++q)
        CHECK(sys.C.block(j * n, q * n, n, n).isApprox(op.A * maps.at(j, q).col(4).asDiagonal().toDenseMatrix()));
  }
  SUBCASE("linear in the data") {
    const CoilStack maps = random_stack(n, m, 2, 1, StackKind::sensitivity, rng);
    const CoilStack g1 = random_stack(n, m, 2, 1, StackKind::image, rng);
    const CoilStack g2 = random_stack(n, m, 2, 1, StackKind::image, rng);
    CoilStack g3(n, m, 2, 1, StackKind::image);
    for (int j = 0; j < 2; ++j) g3.at(j) = 2.0 * g1.at(j) - g2.at(j);
    const auto s1 = assemble_slice(op, maps, g1, 0);
    const auto s2 = assemble_slice(op, maps, g2, 0);
    const auto s3 = assemble_slice(op, maps, g3, 0);
    CHECK(s3.b.isApprox(2.0 * s1.b - s2.b));
  }
  SUBCASE("errors") {
    const CoilStack maps = random_stack(n, m, 2, 1, StackKind::sensitivity, rng);
    const CoilStack g = random_stack(n, m, 2, 1, StackKind::image, rng);
    CHECK_THROWS_AS(assemble_slice(op, maps, g, m), std::out_of_range);
    CHECK_THROWS_AS(assemble_slice(op, maps, random_stack(n, m + 1, 2, 1, StackKind::image, rng), 0),
                    std::invalid_argument);
  }
}

TEST_CASE("realify") {
  SUBCASE("real matrix") {
    SliceSystem sys;
    sys.C = CMatrix::Random(3, 2).real().cast<cplx>();
    sys.b = CVector::Zero(3);
    const auto r = realify(sys);
    CHECK(r.M.topRightCorner(3, 2).isZero());
    CHECK(r.M.bottomLeftCorner(3, 2).isZero());
    CHECK(r.M.topLeftCorner(3, 2) == sys.C.real());
  }
  SUBCASE("pure imaginary identity") {
    SliceSystem sys;
    sys.C = cplx(0, 1) * CMatrix::Identity(2, 2);
    sys.b = CVector::Zero(2);
    RMatrix expected = RMatrix::Zero(4, 4);
    expected.topRightCorner(2, 2) = -RMatrix::Identity(2, 2);
    expected.bottomLeftCorner(2, 2) = RMatrix::Identity(2, 2);
    CHECK(realify(sys).M == expected);
  }
  SUBCASE("multiplication equivalence") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
      SliceSystem sys;
      sys.C = oracle::random_complex(7, 4, rng);
      sys.b = oracle::random_complex(7, 1, rng);
      const CVector x = oracle::random_complex(4, 1, rng);
      const auto r = realify(sys);
      CHECK((r.M * stack_complex(x) - stack_complex(sys.C * x)).cwiseAbs().maxCoeff() < 1e-13);
      CHECK(r.b == stack_complex(sys.b));
    }
  }
}
