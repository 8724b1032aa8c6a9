#include "hdef/kuranishi.hpp"

#include <cmath>

namespace hdef {

int totalDegree(const Monomial& mu) {
  int s = 0;
  for (int e : mu) s += e;
  return s;
}

std::vector<Monomial> monomialsOfDegree(int m, int deg) {
  std::vector<Monomial> out;
  Monomial cur(m, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == m - 1) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (int e = left; e >= 0; --e) {
      cur[i] = e;
      rec(i + 1, left - e);
    }
  };
  if (m > 0) rec(0, deg);
  std::sort(out.begin(), out.end());
  return out;
}

cd evaluateMonomial(const Monomial& mu, const std::vector<cd>& t) {
  cd v = 1.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (int e = 0; e < mu[j]; ++e) v *= t[j];
  return v;
}

namespace {

bool dominated(const Monomial& a, const Monomial& mu) {
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (a[j] > mu[j]) return false;
  return true;
}

Monomial minus(const Monomial& a, const Monomial& b) {
  Monomial c(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) c[j] = a[j] - b[j];
  return c;
}

}  // namespace

KuranishiSeries::KuranishiSeries(const HodgeSystem& H, int maxOrder,
                                 std::vector<GradedElement> directions)
    : H_(H), maxOrder_(maxOrder), eta_(std::move(directions)) {
  if (maxOrder < 1) throw std::invalid_argument("kuranishi: maxOrder must be at least 1");
  if (eta_.empty()) eta_ = H.harmonicBasis(1);
  if (eta_.empty()) throw std::invalid_argument("kuranishi: H^1 is zero");
  const int m = parameters();
  Eigen::MatrixXcd gram(m, m);
  for (int j = 0; j < m; ++j) {
    if (eta_[j].deg != 1) throw std::invalid_argument("kuranishi: directions must have degree 1");
    for (int k = 0; k < m; ++k) gram(j, k) = H.inner(eta_[k], eta_[j]);
  }
  etaGramInv_ = gram.inverse();

  double scale = 0;
  for (int j = 0; j < m; ++j) {
    Monomial mu(m, 0);
    mu[j] = 1;
    terms_[mu] = eta_[j];
    scale = std::max(scale, eta_[j].norm());
  }
  // roundoff-level coefficients are dropped so exact cancellations stay exactly zero
  for (int nu = 2; nu <= maxOrder_ + 1; ++nu) {
    const double drop = 1e-13 * std::pow(std::max(scale, 1e-300), nu);
    std::map<Monomial, GradedElement> next;
    for (const Monomial& mu : monomialsOfDegree(m, nu)) {
      GradedElement b = bracketCoefficient(mu);
      if (b.norm() <= drop) continue;
      Eigen::VectorXcd c = H.harmonicCoordinates(b);
      if (c.size() > 0 && c.norm() > drop) obstruction_[mu] = c;
      if (nu > maxOrder_) continue;
      GradedElement e = halfDStarG(b);
      if (e.norm() > drop) next[mu] = std::move(e);
    }
    for (auto& [mu, e] : next) terms_[mu] = std::move(e);
  }
}

GradedElement KuranishiSeries::halfDStarG(const GradedElement& b) const {
  return 0.5 * H_.dStar(H_.green(b));
}

GradedElement KuranishiSeries::bracketCoefficient(const Monomial& mu) const {
  const Dgla& L = H_.dgla();
  GradedElement sum = L.zero(2);
  // [x,y] = [y,x] in degree 1, so each unordered pair is computed once
  for (const auto& [a, ea] : terms_) {
    if (!dominated(a, mu) || a == mu) continue;
    Monomial b = minus(mu, a);
    if (b < a) continue;
    auto it = terms_.find(b);
    if (it == terms_.end()) continue;
    GradedElement br = L.bracket(ea, it->second);
    sum += (a == b ? 1.0 : 2.0) * br;
  }
  return sum;
}

double KuranishiSeries::recursionResidual(int nu) const {
  double worst = 0;
  for (const Monomial& mu : monomialsOfDegree(parameters(), nu)) {
    auto it = terms_.find(mu);
    GradedElement expect = halfDStarG(bracketCoefficient(mu));
    GradedElement diff = it == terms_.end() ? expect : it->second - expect;
    double scale = std::max(1.0, expect.norm());
    worst = std::max(worst, diff.norm() / scale);
  }
  return worst;
}

double KuranishiSeries::dStarResidual(int nu) const {
  double worst = 0;
  for (const auto& [mu, e] : terms_)
    if (totalDegree(mu) == nu)
      worst = std::max(worst, H_.dStar(e).norm() / std::max(1.0, e.norm()));
  return worst;
}

GradedElement KuranishiSeries::firstOrder(const std::vector<cd>& t) const {
  GradedElement x = H_.dgla().zero(1);
  for (int j = 0; j < parameters(); ++j) x += t[j] * eta_[j];
  return x;
}

GradedElement KuranishiSeries::evaluate(const std::vector<cd>& t) const {
  if (int(t.size()) != parameters()) throw std::invalid_argument("kuranishi: wrong parameter count");
  GradedElement x = H_.dgla().zero(1);
  for (const auto& [mu, e] : terms_) x += evaluateMonomial(mu, t) * e;
  return x;
}

Eigen::VectorXcd KuranishiSeries::obstructionAt(const std::vector<cd>& t) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(obstructionDim());
  for (const auto& [mu, c] : obstruction_) v += evaluateMonomial(mu, t) * c;
  return v;
}

FixedPointResult KuranishiSeries::fixedPoint(const std::vector<cd>& t, int maxIter,
                                             double tol) const {
  const Dgla& L = H_.dgla();
  FixedPointResult res;
  const GradedElement e1 = firstOrder(t);
  res.x = e1;
  double first = -1, prev = -1;
  const double floor = 1e-13 * std::max(1.0, e1.norm());
  for (int it = 1; it <= maxIter; ++it) {
    GradedElement nx = e1 + halfDStarG(L.bracket(res.x, res.x));
    double step = (nx - res.x).norm();
    res.x = std::move(nx);
    res.iterations = it;
    if (!std::isfinite(step)) {
      res.diverged = true;
      break;
    }
    if (first < 0) first = step;
    if (prev > floor && step > floor) res.contraction = std::max(res.contraction, step / prev);
    if (step <= tol * std::max(1.0, res.x.norm()) || step <= floor) {
      res.converged = true;
      break;
    }
    if (step > 10 * first && step > floor) {
      res.diverged = true;
      break;
    }
    prev = step;
  }
  res.gap = (evaluate(t) - res.x).norm();
  return res;
}

McReport KuranishiSeries::mcCheck(const std::vector<cd>& t) const {
  const Dgla& L = H_.dgla();
  GradedElement e = evaluate(t);
  McReport r;
  r.mcResidualNorm = H_.norm(L.mcResidual(e));
  r.obstructionNorm = H_.norm(H_.harmonic(L.bracket(e, e)));
  return r;
}

std::vector<cd> KuranishiSeries::parametersOf(const GradedElement& h, double* outside) const {
  const int m = parameters();
  Eigen::VectorXcd c(m);
  for (int j = 0; j < m; ++j) c[j] = H_.inner(h, eta_[j]);
  Eigen::VectorXcd t = etaGramInv_ * c;
  std::vector<cd> out(t.data(), t.data() + m);
  if (outside) *outside = H_.norm(h - firstOrder(out));
  return out;
}

std::vector<PolynomialEquation> kuranishiEquations(const KuranishiSeries& s, double tol) {
  std::vector<PolynomialEquation> eqs(s.obstructionDim());
  for (int i = 0; i < s.obstructionDim(); ++i) {
    eqs[i].h2Index = i;
    for (const auto& [mu, c] : s.obstruction())
      if (std::abs(c[i]) > tol) eqs[i].coefficients[mu] = c[i];
  }
  return eqs;
}

}  // namespace hdef
