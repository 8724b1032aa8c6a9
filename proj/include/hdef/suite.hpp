#pragma once

#include "hdef/deformation.hpp"

#include <map>
#include <string>

namespace hdef {

// Worst relative residual per identity over a batch of random band-limited inputs.
struct SuiteResult {
  std::map<std::string, Check> worst;
  int evaluations = 0;

  void add(const Check& c);
  double worstRelative() const;
  bool pass(double tol) const { return worstRelative() <= tol; }
};

// random homogeneous forms: End/E-valued of total degree d, or TX-valued of type (0,d)
Form randomEndForm(TorusPtr T, int rows, int cols, int d, int band, std::uint64_t seed);
Form randomTxForm(TorusPtr T, int d, int band, std::uint64_t seed);

// d^2 = 0, graded antisymmetry, graded Jacobi and Leibniz over all degree combinations up to 2
SuiteResult dglaAxiomSuite(const Dgla& L, int samples, int band, std::uint64_t seed);

// contraction and Cartan-type identities, Bianchi, structure equations
SuiteResult cartanSuite(const Dgla& L, int samples, int band, std::uint64_t seed);

// Dbar^2 on probe sections against the structure equations, for random degree-1 elements
SuiteResult flatnessSuite(const Dgla& L, int samples, int band, std::uint64_t seed,
                          double amplitude = 0.3);

}  // namespace hdef
