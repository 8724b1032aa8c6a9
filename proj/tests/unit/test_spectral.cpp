#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hdef;

namespace {

TorusPtr torus(int n, int N) { return std::make_shared<const Torus>(n, N); }

Coeffs randomField(TorusPtr T, int band, std::uint64_t seed) {
  return randomForm(T, {1, 1, {0u}}, band, seed).comp.at(0)[0];
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("derivative symbols match the differentiated exponential") {
  for (int n : {1, 2}) {
    auto T = torus(n, 3);
    for (std::size_t i = 0; i < T->size(); ++i)
      for (int j = 0; j < n; ++j) {
        CHECK(std::abs(T->mu(j)[i] - oracle::muSymbol(T->freq(i), n, j)) < 1e-13);
        CHECK(std::abs(T->nu(j)[i] - oracle::nuSymbol(T->freq(i), n, j)) < 1e-13);
      }
  }
  auto T = torus(1, 2);
  const int k[2] = {1, 1};
  Coeffs e = mode(*T, {1, 1});
  Coeffs de = dbarDeriv(*T, e, 0);
  const double pi = std::numbers::pi;
  CHECK(std::abs(de[T->index(k)] - cd(-pi, pi)) < 1e-14);
}

TEST_CASE("product equals the truncated convolution") {
  for (int n : {1, 2}) {
    auto T = torus(n, n == 1 ? 6 : 3);
    Coeffs f = randomField(T, T->N() / 3 + 1, 3), g = randomField(T, T->N() / 3 + 1, 4);
    Coeffs fg = multiply(*T, f, g);
    Coeffs ref = oracle::convolve(*T, f, g);
    CHECK(oracle::maxAbsDiff(fg, ref) < 1e-12 * ref.cwiseAbs().maxCoeff());
  }
  // full-band inputs: truncation still equals the box-restricted convolution
  auto T = torus(1, 4);
  Coeffs f = randomField(T, 4, 5), g = randomField(T, 4, 6);
  CHECK(oracle::maxAbsDiff(multiply(*T, f, g), oracle::convolve(*T, f, g)) < 1e-12);
}

TEST_CASE("grid transforms and point evaluation") {
  auto T = torus(2, 2);
  Coeffs f = randomField(T, 2, 7);
  const FftGrid& G = T->sampleGrid();
  Coeffs v = G.toGrid(f);
  CHECK(oracle::maxAbsDiff(G.fromGrid(v), f) < 1e-13);
  for (std::size_t p : {std::size_t(0), std::size_t(17), G.points() - 1}) {
    std::vector<double> x(4);
    for (int a = 0; a < 4; ++a) x[a] = G.coord(p, a);
    CHECK(std::abs(v[p] - oracle::pointValue(*T, f, x)) < 1e-12);
    CHECK(std::abs(evaluate(*T, f, x) - oracle::pointValue(*T, f, x)) < 1e-12);
  }
}

TEST_CASE("wedge signs") {
  CHECK(wedgeSign(0b01, 0b10) == 1);
  CHECK(wedgeSign(0b10, 0b01) == -1);
  CHECK(wedgeSign(0b01, 0b01) == 0);
  for (unsigned a = 0; a < 16; ++a)
    for (unsigned b = 0; b < 16; ++b) CHECK(wedgeSign(a, b) == oracle::shuffleSign(a, b, 2));
}

TEST_CASE("constant Higgs field squared is the matrix commutator") {
  auto T = torus(2, 1);
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Random(2, 2), D = Eigen::MatrixXcd::Random(2, 2);
  Form theta = constantMatrixForm(T, 0b01, C) + constantMatrixForm(T, 0b10, D);
  Form sq = wedge(theta, theta);
  Eigen::MatrixXcd ref = C * D - D * C;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(sq.comp.at(0b11)[i * 2 + j][T->zeroIndex()] - ref(i, j)) < 1e-14);
}

TEST_CASE("contraction of the basic vector form") {
  auto T = torus(1, 2);
  Form phi(T, 1, 1);
  phi.at(0b10)[0] = constantField(*T, 1.0);
  Form w = scalarForm(T, 0b01, constantField(*T, 1.0));
  Form c = contract(phi, w);
  CHECK(c.comp.size() == 1);
  CHECK(std::abs(c.comp.at(0b10)[0][T->zeroIndex()] - 1.0) < 1e-15);
}

TEST_CASE("differentials anticommute and square to zero") {
  auto T = torus(2, 3);
  Form w = randomForm(T, {2, 2, masksOfDegree(2, 1, false)}, 1, 9);
  CHECK(dbar(dbar(w)).norm() < 1e-12 * w.norm());
  CHECK(del(del(w)).norm() < 1e-12 * w.norm());
  CHECK((del(dbar(w)) + dbar(del(w))).norm() < 1e-12 * dbar(del(w)).norm());
}

TEST_CASE("interior products commute and the Cartan bracket formula holds") {
  auto T = torus(2, 3);
  for (int i = 0; i <= 1; ++i)
    for (int j = 0; j <= 1; ++j) {
      Form xi = randomForm(T, {2, 1, masksOfDegree(2, i, true)}, 1, 10 + i);
      Form eta = randomForm(T, {2, 1, masksOfDegree(2, j, true)}, 1, 20 + j);
      Form w = randomForm(T, {1, 1, masksOfDegree(2, 2, false)}, 1, 30);
      CHECK(checkContractionsCommute(xi, eta, w).relative() < 1e-10);
      CHECK(checkSchoutenCartan(xi, eta, w).relative() < 1e-10);
    }
}

TEST_CASE("vector field bracket against the coordinate formula") {
  auto T = torus(1, 3);
  Coeffs f = randomField(T, 1, 41), g = randomField(T, 1, 42);
  Form xi(T, 1, 1), eta(T, 1, 1);
  xi.at(0)[0] = f;
  eta.at(0)[0] = g;
  Form b = snBracket(xi, eta);
  auto d = [&](const Coeffs& c) {
    Coeffs out(c.size());
    for (std::size_t i = 0; i < T->size(); ++i) out[i] = oracle::muSymbol(T->freq(i), 1, 0) * c[i];
    return out;
  };
  Coeffs ref = oracle::convolve(*T, f, d(g)) - oracle::convolve(*T, g, d(f));
  CHECK(oracle::maxAbsDiff(b.comp.at(0)[0], ref) < 1e-12);
}

TEST_CASE("Sobolev norm of a single mode") {
  auto T = torus(1, 3);
  Form w = scalarForm(T, 0, mode(*T, {2, -1}));
  const double lap = 4 * std::numbers::pi * std::numbers::pi * 5;
  for (int k : {0, 1, 2})
    CHECK(std::abs(sobolevNorm(w, k) - std::pow(1 + lap, k / 2.0)) < 1e-10 * std::pow(1 + lap, k / 2.0));
}

TEST_CASE("random forms are band limited and reproducible") {
  auto T = torus(1, 6);
  Form a = randomForm(T, {2, 2, {1u, 2u}}, 2, 5), b = randomForm(T, {2, 2, {1u, 2u}}, 2, 5);
  CHECK((a - b).norm() == 0);
  CHECK(a.band() == 2);
  Form c = randomForm(T, {2, 2, {1u, 2u}}, 2, 6);
  CHECK((a - c).norm() > 0);
}

}
