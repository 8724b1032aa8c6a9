#pragma once

#include "hdef/kuranishi.hpp"

#include <string>
#include <vector>

namespace hdef {

// A gauge parameter gamma = (upsilon, xi) is a degree-0 GradedElement:
// end = upsilon (r x r function), tx = xi (vector field).

// sum upsilon^k / k! with spectral products, stopped once a term drops below tol
Form expEndo(const Form& upsilon, double tol = 1e-14, int maxTerms = 200);

// eta' with Dbar_{eta'} = exp(-upsilon) Dbar_eta exp(upsilon); phi is unchanged
GradedElement verticalGauge(const Dgla& L, const GradedElement& eta, const Form& upsilon);

// max over the sample grid of |d xi| + |dbar xi| (spectral norms of the n x n blocks)
double jacobianBound(const Form& xi);
constexpr double kMaxJacobian = 0.5;

// complex structure pulled back along f(z) = z + xi(z); throws if f is not safely a diffeomorphism
Form diffeoPullbackPhi(const Form& phi, const Form& xi);

// -xi⌟conn
Form transportFirstOrder(const Form& xi, const ChernData& ch);

// pullback of eta along f(z) = z + xi(z) with the bundle map exp(-xi⌟conn) exp(upsilon)
GradedElement fullGauge(const Dgla& L, const GradedElement& eta, const GradedElement& gamma);

struct GaugeFixOptions {
  int maxIter = 50;
  double damping = 1.0;
  double tol = 1e-8;
};

struct GaugeFixResult {
  GradedElement gamma, gauged;
  int iterations = 0;
  double residual = 0;  // |d* gauged|
  bool converged = false;
  std::vector<double> history;
};

// gamma <- gamma - damping * G d*(fullGauge(eta, gamma)), gamma_0 = -G d* eta
GaugeFixResult gaugeFix(const HodgeSystem& H, const GradedElement& eta, GaugeFixOptions opts = {});

struct MatchOptions {
  double matchTol = 1e-6;
  double mcTol = 1e-8;
  double obstructionTol = 1e-8;
  GaugeFixOptions gauge;
};

struct MatchResult {
  std::vector<cd> t;
  GaugeFixResult fix;
  double inputMcResidual = 0;
  double matchResidual = 0;   // |eta_gamma - eps(t)|
  double outsideSpan = 0;     // harmonic part not reached by the directions
  double obstructionNorm = 0;
  bool ok = false;
  std::string message;
};

MatchResult matchToKuranishi(const KuranishiSeries& S, const GradedElement& eta,
                             MatchOptions opts = {});

}  // namespace hdef
