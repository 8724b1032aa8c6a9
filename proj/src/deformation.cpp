#include "hdef/deformation.hpp"

#include <Eigen/SVD>

#include <algorithm>

namespace hdef {

namespace {
double sgn(int p) { return (p % 2 == 0) ? 1.0 : -1.0; }
}  // namespace

DeformedOperator::DeformedOperator(const Dgla& L, GradedElement x) : L_(L), x_(std::move(x)) {
  if (x_.deg != 1) throw std::invalid_argument("deformed operator needs a degree-1 element");
  if (!bidegreePart(x_.end, 1, 1).isZero())
    throw std::invalid_argument("deformed operator: element has a (1,1) End part");
}

Form DeformedOperator::apply(const Form& s) const {
  Form out = dbar(s);
  out += anticommPkSection(x_.tx, s, L_.chernData());
  out += wedge(L_.config().theta + x_.end, s);
  return out;
}

Form DeformedOperator::discrepancy(const Form& s) const {
  Form out = apply(s);
  out -= dbar(s);
  out -= anticommPkSection(x_.tx, s, L_.chernData());
  out -= wedge(L_.config().theta, s);
  return out;
}

SquareResidual dbarSquareResidual(const DeformedOperator& D, const Form& s) {
  SquareResidual r;
  r.direct = D.apply(D.apply(s));
  GradedElement R = D.dgla().structureEquations(D.element());
  Form a = wedge(R.end, s);
  Form b = anticommPkSection(R.tx, s, D.dgla().chernData());
  r.predicted = a - b;
  r.residual = (r.direct - r.predicted).norm();
  r.scale = std::max({r.direct.norm(), a.norm(), b.norm()});
  return r;
}

std::vector<Form> probeSections(TorusPtr T, int r, int band) {
  std::vector<Form> out;
  for (std::size_t idx = 0; idx < T->size(); ++idx) {
    if (T->maxAbs(idx) > band) continue;
    for (int a = 0; a < r; ++a) {
      Form s(T, r, 1);
      s.at(0)[a][idx] = 1.0;
      out.push_back(std::move(s));
    }
  }
  return out;
}

double maxProbeSquare(const DeformedOperator& D, int band) {
  double m = 0;
  for (const Form& s : probeSections(D.dgla().torus(), D.dgla().rank(), band))
    m = std::max(m, D.apply(D.apply(s)).norm());
  return m;
}

Form lPhi(const Form& phi, const Form& alpha) {
  const int q = phi.degree();
  Form out = del(contract(phi, alpha));
  out -= sgn(q - 1) * contract(phi, del(alpha));
  return out;
}

double phiPointwiseNorm(const Form& phi) {
  if (phi.comp.empty()) return 0;
  const Torus& T = *phi.T;
  const int n = T.n();
  const FftGrid& G = T.sampleGrid();
  // column j holds the dzbar_j coefficients of the vector field
  std::vector<std::vector<Coeffs>> g(n, std::vector<Coeffs>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto* c = phi.find(1u << (n + j));
      g[i][j] = c ? G.toGrid((*c)[i]) : Coeffs::Zero(G.points());
    }
  double m = 0;
  Eigen::MatrixXcd M(n, n);
  for (std::size_t p = 0; p < G.points(); ++p) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = g[i][j][p];
    m = std::max(m, n == 1 ? std::abs(M(0, 0))
                           : Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues()(0));
  }
  return m;
}

double deformed10Residual(const Form& alpha, const Form& phi) {
  if (phiPointwiseNorm(phi) >= kPhiSmallness)
    throw std::invalid_argument("phi is too large for a deformed complex structure");
  Form res = bidegreePart(alpha, 0, 1) - contract(phi, bidegreePart(alpha, 1, 0));
  return res.norm();
}

double holomorphic1FormResidual(const Form& alpha, const Form& phi, double tol) {
  double d = deformed10Residual(alpha, phi);
  if (d > tol * std::max(1.0, alpha.norm()))
    throw std::invalid_argument("form is not of type (1,0) for the deformed structure");
  Form a10 = bidegreePart(alpha, 1, 0);
  return (dbar(a10) + lPhi(phi, a10)).norm();
}

Check checkDbarLeibniz(const DeformedOperator& D, const Form& alpha, const Form& s) {
  const int p = alpha.degree();
  const Form& phi = D.element().tx;
  Form lhs = D.apply(wedge(alpha, s));
  Form a = wedge(dbar(alpha) + lPhi(phi, alpha), s);
  Form b = wedge(alpha, D.apply(s));
  Form res = lhs - a - sgn(p) * b;
  return {"deformed-leibniz", res.norm(), std::max({lhs.norm(), a.norm(), b.norm()})};
}

Check checkLocality(const DeformedOperator& D, const Coeffs& f, const Form& s) {
  Form fs = wedge(scalarForm(s.T, 0, f), s);
  Form a = D.discrepancy(fs);
  Form b = wedge(scalarForm(s.T, 0, f), D.discrepancy(s));
  return {"locality", (a - b).norm(), std::max(a.norm(), b.norm())};
}

Check checkDeformedSquare(const Form& phi, const Form& alpha) {
  auto op = [&](const Form& w) { return dbar(w) + lPhi(phi, w); };
  Form lhs = op(op(alpha));
  Form R = dbar(phi) - 0.5 * snBracket(phi, phi);
  // same sign as the TX term of the Dbar^2 expansion
  Form rhs = -1.0 * lPhi(R, alpha);
  return {"deformed-square", (lhs - rhs).norm(), std::max(lhs.norm(), rhs.norm())};
}

}  // namespace hdef
