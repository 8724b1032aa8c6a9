#include "oracles.hpp"

#include <doctest.h>

using namespace hdef;

namespace {

TorusPtr torus(int n, int N) { return std::make_shared<const Torus>(n, N); }

Eigen::MatrixXcd E(int i, int j) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(i, j) = 1;
  return m;
}

GradedElement endElement(TorusPtr T, unsigned mask, const Eigen::MatrixXcd& M, const Coeffs& f) {
  GradedElement x = zeroElement(T, 2, 1);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (M(i, j) != cd(0)) x.end.at(mask)[i * 2 + j] = M(i, j) * f;
  return x;
}

// theta = 0, K = I with directions E12 dzbar and E21 dz
struct FlatPair {
  TorusPtr T = torus(1, 3);
  Dgla L{makeConfig(T, 2, {}, {})};
  HodgeSystem H{L};
  KuranishiSeries S{H, 4,
                    {endElement(T, 0b10, E(0, 1), constantField(*T, 1.0)),
                     endElement(T, 0b01, E(1, 0), constantField(*T, 1.0))}};
};

long binomial(int a, int b) {
  long r = 1;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

}  // namespace

TEST_SUITE("kuranishi") {

TEST_CASE("monomial enumeration") {
  for (int m : {1, 2, 3, 5})
    for (int d : {0, 1, 2, 4}) {
      auto ms = monomialsOfDegree(m, d);
      CHECK(long(ms.size()) == binomial(m + d - 1, d));
      CHECK(std::is_sorted(ms.begin(), ms.end()));
      for (const auto& mu : ms) CHECK(totalDegree(mu) == d);
    }
  CHECK(evaluateMonomial({2, 1}, {cd(2), cd(0, 1)}) == cd(0, 4));
}

TEST_CASE("abelian series is linear and unobstructed") {
  auto T = torus(1, 4);
  Dgla L(makeConfig(T, 1, {}, {}));
  HodgeSystem H(L);
  KuranishiSeries S(H, 5);
  REQUIRE(S.parameters() == 3);
  for (const auto& [mu, e] : S.terms()) CHECK(totalDegree(mu) == 1);
  for (const auto& [mu, v] : S.obstruction()) CHECK(v.norm() == 0);
  for (const auto& eq : kuranishiEquations(S)) CHECK(eq.coefficients.empty());
  std::vector<cd> t = {cd(0.3, 0.1), cd(-0.2), cd(0, 0.05)};
  CHECK((S.evaluate(t) - S.firstOrder(t)).norm() == 0);
  FixedPointResult fp = S.fixedPoint(t);
  CHECK(fp.converged);
  CHECK(fp.iterations == 1);
  McReport mc = S.mcCheck(t);
  CHECK(mc.mcResidualNorm <= 1e-9);
  CHECK(mc.obstructionNorm <= 1e-9);
}

TEST_CASE("quadratic obstruction of the flat rank-two pair") {
  FlatPair p;
  const auto& S = p.S;
  REQUIRE(S.obstructionDim() > 0);
  oracle::ConstForm a{{0b10, E(0, 1)}}, b{{0b01, E(1, 0)}};
  oracle::ConstForm c = oracle::gradedCommutator(a, 1, b, 1, 1);
  // t1 t2 coefficient of [eps, eps] is 2 [eta_1, eta_2] = -2 (a^b + b^a)
  GradedElement ref{2, -2.0 * oracle::toForm(p.T, c), Form(p.T, 1, 1)};
  Eigen::MatrixXcd diag = -2.0 * c.at(0b11);
  CHECK((diag - 2.0 * (E(0, 1) * E(1, 0) - E(1, 0) * E(0, 1))).norm() < 1e-14);
  CHECK((p.H.harmonic(ref) - ref).norm() < 1e-12);
  Eigen::VectorXcd coords = p.H.harmonicCoordinates(ref);
  CHECK(coords.norm() > 1);
  auto it = S.obstruction().find({1, 1});
  REQUIRE(it != S.obstruction().end());
  CHECK((it->second - coords).norm() <= 1e-9);
  for (const auto& mu : monomialsOfDegree(2, 2)) {
    auto jt = S.obstruction().find(mu);
    if (mu != Monomial{1, 1} && jt != S.obstruction().end()) CHECK(jt->second.norm() <= 1e-12);
  }
  auto eqs = kuranishiEquations(S, 1e-12);
  for (const auto& eq : eqs)
    for (const auto& [mu, coef] : eq.coefficients) CHECK((mu[0] > 0 && mu[1] > 0));
}

TEST_CASE("MC residual follows the obstruction") {
  FlatPair p;
  const auto& S = p.S;
  for (auto t : {std::vector<cd>{0.01, 0}, std::vector<cd>{0, cd(0, 0.01)}}) {
    McReport mc = S.mcCheck(t);
    CHECK(mc.mcResidualNorm <= 1e-8);
    CHECK(mc.obstructionNorm <= 1e-8);
  }
  std::vector<cd> t = {0.01, 0.01};
  McReport mc = S.mcCheck(t);
  CHECK(mc.obstructionNorm > 0);
  CHECK(mc.mcResidualNorm > 0);
  CHECK(mc.mcResidualNorm / mc.obstructionNorm > 1e-2);
  CHECK(mc.mcResidualNorm / mc.obstructionNorm < 1e2);
  // where the obstruction is nonzero the residual is at least half its harmonic part
  CHECK(mc.mcResidualNorm >= 0.5 * mc.obstructionNorm * (1 - 1e-6));
  Eigen::VectorXcd h = p.H.harmonicCoordinates(p.L.mcResidual(S.evaluate(t)));
  CHECK((h + 0.5 * S.obstructionAt(t)).norm() <= 1e-6 * h.norm());
}

TEST_CASE("second-order term against the convolution bracket") {
  auto T = torus(1, 4);
  Dgla L(makeConfig(T, 2, {}, {E(0, 1)}));
  HodgeSystem H(L);
  GradedElement e1 = endElement(T, 0b10, E(1, 0), mode(*T, {0, 1}));
  GradedElement e2 = endElement(T, 0b01, E(0, 1), constantField(*T, 1.0));
  KuranishiSeries S(H, 3, {e1, e2});
  auto halfDStarG = [&](const Form& b) {
    GradedElement x{2, b, Form(T, 1, 1)};
    return cd(0.5) * H.dStar(H.green(x));
  };
  GradedElement ref11 = halfDStarG(2.0 * oracle::endBracket(e1.end, 1, e2.end, 1));
  GradedElement ref20 = halfDStarG(oracle::endBracket(e1.end, 1, e1.end, 1));
  REQUIRE(ref11.norm() > 1e-3);
  auto get = [&](const Monomial& mu) {
    auto it = S.terms().find(mu);
    return it == S.terms().end() ? zeroElement(T, 2, 1) : it->second;
  };
  CHECK((get({1, 1}) - ref11).norm() <= 1e-12 * ref11.norm());
  CHECK((get({2, 0}) - ref20).norm() <= 1e-12);
}

TEST_CASE("recursion, coclosedness and the fixed point on a curved bundle") {
  auto T = torus(1, 4);
  MetricModel m;
  m.kind = MetricModel::ExpDiag;
  m.matrix = Eigen::MatrixXcd::Identity(2, 2);
  m.rho = {realMode(*T, {1, 0}, cd(0.1, 0.03)), realMode(*T, {0, 1}, cd(-0.05, 0.02))};
  Dgla L(makeConfig(T, 2, m, {E(0, 1)}));
  HodgeSystem H(L);
  KuranishiSeries S(H, 5);
  for (int nu = 2; nu <= 5; ++nu) {
    CHECK(S.recursionResidual(nu) <= 1e-10);
    CHECK(S.dStarResidual(nu) <= 1e-10);
  }
  std::vector<cd> t(S.parameters());
  double norm = 0;
  for (int j = 0; j < S.parameters(); ++j) {
    t[j] = cd(j + 1.0, -0.5 * j);
    norm += std::norm(t[j]);
  }
  for (auto& c : t) c *= 0.01 / std::sqrt(norm);
  FixedPointResult fp = S.fixedPoint(t);
  CHECK(fp.converged);
  CHECK_FALSE(fp.diverged);
  CHECK(fp.contraction < 1);
  CHECK(fp.gap <= 1e-8);
  std::vector<cd> zero(S.parameters(), 0.0);
  CHECK(S.evaluate(zero).norm() == 0);
  double outside = 1;
  std::vector<cd> back = S.parametersOf(H.harmonic(S.evaluate(t)), &outside);
  for (int j = 0; j < S.parameters(); ++j) CHECK(std::abs(back[j] - t[j]) <= 1e-12);
  CHECK(outside <= 1e-12);
}

TEST_CASE("higher-order terms scale with the parameter") {
  auto T = torus(1, 3);
  Dgla L(makeConfig(T, 2, {}, {E(0, 1)}));
  HodgeSystem H(L);
  KuranishiSeries S(H, 4);
  std::vector<cd> t0(S.parameters());
  for (int j = 0; j < S.parameters(); ++j) t0[j] = cd(1.0 / (j + 1), 0.5);
  std::vector<double> s = {1e-1, 1e-2, 1e-3}, rem;
  for (double h : s) {
    std::vector<cd> t = t0;
    for (auto& c : t) c *= h;
    rem.push_back((S.evaluate(t) - S.firstOrder(t)).norm());
  }
  if (rem[0] > 1e-14) CHECK(oracle::logLogSlope(s, rem) >= 1.9);
  for (const auto& [mu, v] : S.obstruction()) CHECK(v.norm() <= 1e-12);
}

}
