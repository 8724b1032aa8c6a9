#include "hdef/suite.hpp"

namespace hdef {

void SuiteResult::add(const Check& c) {
  ++evaluations;
  auto it = worst.find(c.name);
  if (it == worst.end() || c.relative() > it->second.relative()) worst[c.name] = c;
}

double SuiteResult::worstRelative() const {
  double w = 0;
  for (const auto& [name, c] : worst) w = std::max(w, c.relative());
  return w;
}

Form randomEndForm(TorusPtr T, int rows, int cols, int d, int band, std::uint64_t seed) {
  const int n = T->n();
  return randomForm(T, {rows, cols, masksOfDegree(n, d, false)}, band, seed);
}

Form randomTxForm(TorusPtr T, int d, int band, std::uint64_t seed) {
  const int n = T->n();
  return randomForm(T, {n, 1, masksOfDegree(n, d, true)}, band, seed);
}

namespace {

// distinct seeds for every input so no two random inputs coincide
struct SeedStream {
  std::uint64_t base;
  std::uint64_t k = 0;
  std::uint64_t next() { return base * 1000003ULL + 7919ULL * ++k; }
};

Check renamed(Check c, const std::string& suffix) {
  c.name += suffix;
  return c;
}

}  // namespace

SuiteResult dglaAxiomSuite(const Dgla& L, int samples, int band, std::uint64_t seed) {
  SuiteResult res;
  SeedStream s{seed};
  const int top = 2;
  for (int k = 0; k < samples; ++k) {
    for (int i = 0; i <= top; ++i) res.add(checkDSquared(L, L.random(i, band, s.next())));
    for (int i = 0; i <= top; ++i)
      for (int j = 0; i + j <= top + 1 && j <= top; ++j) {
        auto x = L.random(i, band, s.next()), y = L.random(j, band, s.next());
        std::string tag = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        res.add(renamed(checkAntisymmetry(L, x, y), tag));
        res.add(renamed(checkLeibniz(L, x, y), tag));
      }
    for (int i = 0; i <= 1; ++i)
      for (int j = 0; j <= 1; ++j)
        for (int l = 0; l <= 1; ++l) {
          auto x = L.random(i, band, s.next()), y = L.random(j, band, s.next()),
               z = L.random(l, band, s.next());
          std::string tag = "(" + std::to_string(i) + "," + std::to_string(j) + "," +
                            std::to_string(l) + ")";
          res.add(renamed(checkJacobi(L, x, y, z), tag));
        }
  }
  return res;
}

SuiteResult cartanSuite(const Dgla& L, int samples, int band, std::uint64_t seed) {
  SuiteResult res;
  SeedStream s{seed};
  TorusPtr T = L.torus();
  const int n = T->n(), r = L.rank();
  const ChernData& ch = L.chernData();
  const int qmax = std::min(n, 1);
  res.add(checkBianchi(ch));
  for (int k = 0; k < samples; ++k) {
    for (int j = 0; j <= qmax; ++j)
      for (int q = 0; q <= qmax; ++q) {
        Form phi = randomTxForm(T, j, band, s.next()), psi = randomTxForm(T, q, band, s.next());
        std::string tag = "(" + std::to_string(j) + "," + std::to_string(q) + ")";
        for (int d = 1; d <= 2; ++d) {
          Form w = randomEndForm(T, 1, 1, d, band, s.next());
          res.add(renamed(checkContractionsCommute(phi, psi, w), tag));
          res.add(renamed(checkSchoutenCartan(phi, psi, w), tag));
          Form e = randomEndForm(T, r, 1, d, band, s.next());
          res.add(renamed(checkBracketContraction(ch, phi, psi, e), tag));
          Form A = randomEndForm(T, r, r, d, band, s.next());
          res.add(renamed(checkCompositionRule(ch, phi, psi, A), tag));
        }
        res.add(renamed(checkCurvatureContraction(ch, phi, psi), tag));
      }
    for (int j = 0; j <= qmax; ++j)
      for (int a = 0; a <= 1; ++a) {
        Form phi = randomTxForm(T, j, band, s.next());
        Form A = randomEndForm(T, r, r, a, band, s.next());
        Form B = randomEndForm(T, r, r, 1, band, s.next());
        std::string tag = "(" + std::to_string(j) + "," + std::to_string(a) + ")";
        res.add(renamed(checkAnticommLeibniz(ch, phi, A, B), tag));
        res.add(renamed(checkDbarAnticomm(ch, phi, A), tag));
      }
    res.add(checkStructureEquations(L, L.random(1, band, s.next())));
  }
  return res;
}

SuiteResult flatnessSuite(const Dgla& L, int samples, int band, std::uint64_t seed,
                          double amplitude) {
  SuiteResult res;
  SeedStream s{seed};
  auto probes = probeSections(L.torus(), L.rank(), 1);
  for (int k = 0; k < samples; ++k) {
    DeformedOperator D(L, L.random(1, band, s.next(), amplitude));
    Check worst{"dbar-squared", 0, 0};
    for (const Form& p : probes) {
      SquareResidual sq = dbarSquareResidual(D, p);
      Check c{"dbar-squared", sq.residual, sq.scale};
      if (c.relative() >= worst.relative()) worst = c;
    }
    res.add(worst);
  }
  return res;
}

}  // namespace hdef
