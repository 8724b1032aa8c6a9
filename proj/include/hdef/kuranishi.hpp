#pragma once

#include "hdef/hodge.hpp"

#include <map>
#include <vector>

namespace hdef {

using Monomial = std::vector<int>;  // exponent per parameter t_j

int totalDegree(const Monomial& mu);
// all exponent vectors of length m and total degree deg, in lexicographic order
std::vector<Monomial> monomialsOfDegree(int m, int deg);
cd evaluateMonomial(const Monomial& mu, const std::vector<cd>& t);

struct FixedPointResult {
  GradedElement x;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  double gap = 0;          // |series value - fixed point|
  double contraction = 0;  // largest ratio of successive step sizes seen
};

struct McReport {
  double mcResidualNorm = 0;
  double obstructionNorm = 0;
};

constexpr int kDefaultMaxOrder = 6;

// Order-by-order solution of eps = eps_1 + 1/2 d* G [eps, eps] with eps_1(t) = sum t_j eta_j.
class KuranishiSeries {
 public:
  // directions default to the harmonic basis of H^1
  KuranishiSeries(const HodgeSystem& H, int maxOrder, std::vector<GradedElement> directions = {});

  const HodgeSystem& hodge() const { return H_; }
  int parameters() const { return int(eta_.size()); }
  int maxOrder() const { return maxOrder_; }
  const std::vector<GradedElement>& directions() const { return eta_; }

  // nonzero coefficients only; missing monomials are zero
  const std::map<Monomial, GradedElement>& terms() const { return terms_; }
  // H^2 coordinates of the t^mu coefficient of H[eps, eps], total degree 2..maxOrder+1
  const std::map<Monomial, Eigen::VectorXcd>& obstruction() const { return obstruction_; }
  int obstructionDim() const { return H_.harmonicDim(2); }

  // coefficient of t^mu in [eps, eps] built from the stored terms
  GradedElement bracketCoefficient(const Monomial& mu) const;
  // |eps_mu - 1/2 d*G (bracket coefficient)| for every stored order-nu monomial
  double recursionResidual(int nu) const;
  double dStarResidual(int nu) const;

  GradedElement evaluate(const std::vector<cd>& t) const;
  GradedElement firstOrder(const std::vector<cd>& t) const;
  Eigen::VectorXcd obstructionAt(const std::vector<cd>& t) const;
  FixedPointResult fixedPoint(const std::vector<cd>& t, int maxIter = 200, double tol = 1e-15) const;
  McReport mcCheck(const std::vector<cd>& t) const;

  // t with eps_1(t) closest to the harmonic part of x, and the part left outside the span
  std::vector<cd> parametersOf(const GradedElement& harmonicPart, double* outside = nullptr) const;

 private:
  const HodgeSystem& H_;
  int maxOrder_;
  std::vector<GradedElement> eta_;
  Eigen::MatrixXcd etaGramInv_;
  std::map<Monomial, GradedElement> terms_;
  std::map<Monomial, Eigen::VectorXcd> obstruction_;

  GradedElement halfDStarG(const GradedElement& b) const;
};

// One polynomial per H^2 coordinate: monomial -> coefficient, zeros dropped below tol.
struct PolynomialEquation {
  int h2Index = 0;
  std::map<Monomial, cd> coefficients;
};
std::vector<PolynomialEquation> kuranishiEquations(const KuranishiSeries& s, double tol = 0);

}  // namespace hdef
