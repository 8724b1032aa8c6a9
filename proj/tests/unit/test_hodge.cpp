#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace hdef;

namespace {

TorusPtr torus(int n, int N) { return std::make_shared<const Torus>(n, N); }

Eigen::MatrixXcd E12() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

HiggsPairConfig curvedConfig(TorusPtr T) {
  MetricModel m;
  m.kind = MetricModel::ExpDiag;
  m.matrix = Eigen::MatrixXcd::Identity(2, 2);
  m.matrix(0, 1) = cd(0.1, 0.2);
  m.rho = {realMode(*T, {1, 0}, cd(0.1, 0.04)) + realMode(*T, {0, 1}, cd(0.05, 0)),
           realMode(*T, {1, -1}, cd(-0.06, 0.02))};
  return makeConfig(T, 2, m, {E12()});
}

double rel(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

struct Curved {
  TorusPtr T = torus(1, 4);
  Dgla L{curvedConfig(T)};
  HodgeSystem H{L};
};

Curved& curved() {
  static Curved c;
  return c;
}

}  // namespace

TEST_SUITE("hodge") {

TEST_CASE("flat abelian Laplacian is diagonal with the dbar symbol") {
  auto T = torus(1, 4);
  Dgla L(makeConfig(T, 1, {}, {}));
  HodgeSystem H(L);
  CHECK(H.harmonicDim(0) == 2);
  CHECK(H.harmonicDim(1) == 3);
  CHECK(H.harmonicDim(2) == 1);
  CHECK(H.harmonicDim(3) == 0);
  // number of slots per frequency carrying |nu_k|^2 in each degree
  const int copies[3] = {2, 3, 1};
  for (int deg = 0; deg < 3; ++deg) {
    std::vector<double> ref;
    for (std::size_t i = 0; i < T->size(); ++i)
      for (int c = 0; c < copies[deg]; ++c) ref.push_back(std::norm(oracle::nuSymbol(T->freq(i), 1, 0)));
    std::sort(ref.begin(), ref.end());
    std::vector<double> got = H.spectrum(deg);
    REQUIRE(got.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-10 * (1 + ref[i]));
  }
}

TEST_CASE("Hodge decomposition and Green operator") {
  auto& c = curved();
  const HodgeSystem& H = c.H;
  CHECK(H.reliable());
  for (int deg = 0; deg <= 2; ++deg) {
    GradedElement x = c.L.random(deg, 4, 100 + deg);
    Eigen::VectorXcd v = H.toVector(x);
    CHECK(rel(H.harmonic(deg, v) + H.laplacian(deg, H.green(deg, v)), v) <= 1e-8);
    Eigen::VectorXcd g = H.green(deg, v);
    Eigen::VectorXcd parts = H.harmonic(deg, v);
    if (deg > 0) parts += H.d(deg - 1, H.dStar(deg, g));
    parts += H.dStar(deg + 1, H.d(deg, g));
    CHECK(rel(parts, v) <= 1e-8);
    CHECK(rel(H.green(deg + 1, H.d(deg, v)), H.d(deg, H.green(deg, v))) <= 1e-8);
    if (deg > 0) CHECK(rel(H.green(deg - 1, H.dStar(deg, v)), H.dStar(deg, H.green(deg, v))) <= 1e-8);
  }
}

TEST_CASE("adjoint, projector and orthogonality identities") {
  auto& c = curved();
  const HodgeSystem& H = c.H;
  for (int deg = 0; deg <= 2; ++deg) {
    Eigen::VectorXcd a = H.toVector(c.L.random(deg, 4, 200 + deg));
    Eigen::VectorXcd b = H.toVector(c.L.random(deg + 1, 4, 300 + deg));
    cd lhs = H.inner(deg + 1, H.d(deg, a), b), rhs = H.inner(deg, a, H.dStar(deg + 1, b));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
    Eigen::VectorXcd h = H.harmonic(deg, a);
    CHECK(rel(H.harmonic(deg, h), h) <= 1e-10);
    CHECK(H.harmonic(deg + 1, H.d(deg, a)).norm() <= 1e-10 * H.d(deg, a).norm());
    CHECK(H.d(deg, h).norm() <= 1e-10 * std::max(1.0, a.norm()));
    if (deg > 0) CHECK(H.dStar(deg, h).norm() <= 1e-10 * std::max(1.0, a.norm()));
    CHECK(H.green(deg, h).norm() <= 1e-10 * std::max(1.0, a.norm()));
    CHECK(H.dSquaredDefect(deg) <= 1e-10);
    CHECK(H.selfAdjointDefect(deg) <= 1e-10);
    CHECK(H.gap(deg) >= 1e4);
  }
}

TEST_CASE("harmonic basis is orthonormal and coordinates reconstruct") {
  auto& c = curved();
  const HodgeSystem& H = c.H;
  for (int deg = 0; deg <= 2; ++deg) {
    const auto& B = H.harmonicBasis(deg);
    REQUIRE(int(B.size()) == H.harmonicDim(deg));
    for (std::size_t i = 0; i < B.size(); ++i)
      for (std::size_t j = 0; j < B.size(); ++j)
        CHECK(std::abs(H.inner(B[i], B[j]) - cd(i == j ? 1.0 : 0.0)) < 1e-12);
    GradedElement x = c.L.random(deg, 2, 400 + deg);
    Eigen::VectorXcd co = H.harmonicCoordinates(x);
    GradedElement back = zeroElement(c.T, 2, deg);
    for (std::size_t i = 0; i < B.size(); ++i) back += co[Eigen::Index(i)] * B[i];
    CHECK((back - H.harmonic(x)).norm() <= 1e-10 * std::max(1.0, x.norm()));
    CHECK((H.fromVector(deg, H.toVector(x)) - x).norm() == 0);
  }
}

TEST_CASE("harmonic dimensions do not depend on the cutoff") {
  for (bool abelian : {true, false}) {
    std::vector<std::array<int, 4>> dims;
    for (int N : {4, 6, 8}) {
      auto T = torus(1, N);
      Dgla L(abelian ? makeConfig(T, 1, {}, {}) : makeConfig(T, 2, {}, {E12()}));
      HodgeSystem H(L);
      CHECK(H.reliable());
      dims.push_back({H.harmonicDim(0), H.harmonicDim(1), H.harmonicDim(2), H.harmonicDim(3)});
    }
    CHECK(dims[0] == dims[1]);
    CHECK(dims[1] == dims[2]);
    if (abelian) CHECK(dims[0][1] == 3);
  }
}

TEST_CASE("matrix cache round trip is exact") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "hdef-cache-test";
  fs::remove_all(dir);
  auto T = torus(1, 3);
  Dgla L(curvedConfig(T));
  HodgeOptions opts;
  opts.cacheDir = dir.string();
  opts.cacheKey = "curved-test";
  HodgeSystem a(L, opts);
  CHECK_FALSE(a.loadedFromCache());
  REQUIRE(fs::exists(a.cacheFile()));
  HodgeSystem b(L, opts);
  CHECK(b.loadedFromCache());
  for (int deg = 0; deg <= 3; ++deg) CHECK(a.spectrum(deg) == b.spectrum(deg));
  {
    std::fstream f(a.cacheFile(), std::ios::in | std::ios::out | std::ios::binary);
    f.write("garbage!", 8);
  }
  HodgeSystem c(L, opts);
  CHECK_FALSE(c.loadedFromCache());
  for (int deg = 0; deg <= 3; ++deg) CHECK(a.spectrum(deg) == c.spectrum(deg));
  fs::remove_all(dir);
}

}
