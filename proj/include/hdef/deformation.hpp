#pragma once

#include "hdef/dgla.hpp"

namespace hdef {

// Dbar s = dbar s + {dK, phi⌟} s + (A + theta + B) ^ s for a degree-1 element x = (A + B, phi).
class DeformedOperator {
 public:
  DeformedOperator(const Dgla& L, GradedElement x);

  Form apply(const Form& s) const;
  // apply minus dbar, {dK, phi⌟} and theta: what is left should be multiplication by A + B
  Form discrepancy(const Form& s) const;
  const GradedElement& element() const { return x_; }
  const Dgla& dgla() const { return L_; }

 private:
  const Dgla& L_;
  GradedElement x_;
};

struct SquareResidual {
  Form direct;     // Dbar(Dbar s)
  Form predicted;  // R_end ^ s - {dK, R_tx⌟} s with R the structure-equation left-hand sides
  double residual = 0, scale = 0;
};
SquareResidual dbarSquareResidual(const DeformedOperator& D, const Form& s);

// frame sections times exponentials with |k_i| <= band
std::vector<Form> probeSections(TorusPtr T, int r, int band = 1);
double maxProbeSquare(const DeformedOperator& D, int band = 1);

// [d, i_phi] = d(phi⌟ .) - (-1)^{q-1} phi⌟ d
Form lPhi(const Form& phi, const Form& alpha);

// max over the sample grid of the spectral norm of (phi^i_j)
double phiPointwiseNorm(const Form& phi);
constexpr double kPhiSmallness = 0.5;

double deformed10Residual(const Form& alpha, const Form& phi);
double holomorphic1FormResidual(const Form& alpha, const Form& phi, double tol = 1e-8);

Check checkDbarLeibniz(const DeformedOperator& D, const Form& alpha, const Form& s);
Check checkLocality(const DeformedOperator& D, const Coeffs& f, const Form& s);
// (dbar + l_phi)^2 alpha against -[d, i_R] alpha, R = dbar phi - 1/2 [phi,phi]
Check checkDeformedSquare(const Form& phi, const Form& alpha);

}  // namespace hdef
