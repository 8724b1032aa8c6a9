#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdef {

using cd = std::complex<double>;
using Coeffs = Eigen::VectorXcd;

enum class Dealias { Plain, TwoThirds };

class FftGrid;

// Flat torus C^n / (Z^n + i Z^n), Fourier modes e_k with k in Z^{2n}, |k_i| <= N.
// Axis a < n is x_a, axis n+a is y_a.
class Torus {
 public:
  Torus(int n, int N, Dealias dealias = Dealias::Plain);
  ~Torus();
  Torus(const Torus&) = delete;
  Torus& operator=(const Torus&) = delete;

  int n() const { return n_; }
  int N() const { return N_; }
  int dims() const { return 2 * n_; }
  Dealias dealias() const { return dealias_; }
  int side() const { return 2 * N_ + 1; }
  std::size_t size() const { return size_; }

  const int* freq(std::size_t idx) const { return &freqs_[idx * dims()]; }
  // -1 when k lies outside the cutoff box
  long index(const int* k) const;
  std::size_t zeroIndex() const { return zero_; }
  int maxAbs(std::size_t idx) const;

  const std::vector<cd>& mu(int j) const { return mu_[j]; }   // symbol of d/dz_j
  const std::vector<cd>& nu(int j) const { return nu_[j]; }   // symbol of d/dzbar_j
  double lapSymbol(std::size_t idx) const { return lap_[idx]; }  // |2 pi k|^2

  // grid used for truncated products (exact for M >= 3N+1)
  FftGrid& productGrid() const { return *prod_; }
  // oversampled grid (4N+1 points per axis) for pointwise nonlinear work
  FftGrid& sampleGrid() const { return *sample_; }

  // truncation applied after every product
  bool keepAfterProduct(std::size_t idx) const { return keep_[idx] != 0; }

 private:
  int n_, N_;
  Dealias dealias_;
  std::size_t size_ = 0, zero_ = 0;
  std::vector<int> freqs_;
  std::vector<std::vector<cd>> mu_, nu_;
  std::vector<double> lap_;
  std::vector<char> keep_;
  std::unique_ptr<FftGrid> prod_, sample_;
};

using TorusPtr = std::shared_ptr<const Torus>;

class FftGrid {
 public:
  FftGrid(const Torus& T, int M);
  ~FftGrid();
  FftGrid(const FftGrid&) = delete;
  FftGrid& operator=(const FftGrid&) = delete;

  int M() const { return M_; }
  std::size_t points() const { return points_; }
  // coefficients -> values at x = j/M
  Coeffs toGrid(const Coeffs& c) const;
  // values -> coefficients inside the cutoff box (no dealias masking)
  Coeffs fromGrid(const Coeffs& v) const;
  // real coordinate of grid point p on axis a
  double coord(std::size_t p, int a) const;

 private:
  const Torus& T_;
  int M_;
  std::size_t points_;
  std::vector<std::size_t> map_;  // box index -> grid index
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
  cd* buf_ = nullptr;
};

// scalar fields
Coeffs zeroField(const Torus& T);
Coeffs constantField(const Torus& T, cd c);
Coeffs mode(const Torus& T, const std::vector<int>& k, cd c = 1.0);
bool isConstant(const Torus& T, const Coeffs& f);
int band(const Torus& T, const Coeffs& f);

Coeffs multiply(const Torus& T, const Coeffs& f, const Coeffs& g);
void applyDealias(const Torus& T, Coeffs& f);
Coeffs dDeriv(const Torus& T, const Coeffs& f, int j);
Coeffs dbarDeriv(const Torus& T, const Coeffs& f, int j);
cd evaluate(const Torus& T, const Coeffs& f, const std::vector<double>& x);

// Masks: bit a (a < n) is dz_{a+1}; bit n+a is dzbar_{a+1}.
// A component dz_I ^ dzbar_J is stored with increasing indices, dz's first.
inline int popcount(unsigned m) { return __builtin_popcount(m); }
unsigned holMask(int n);
inline int pdeg(unsigned m, int n) { return popcount(m & holMask(n)); }
inline int qdeg(unsigned m, int n) { return popcount(m >> n); }
// sign of dz_a ^ dz_b (as monomials) after reordering; 0 when they overlap
int wedgeSign(unsigned a, unsigned b);
std::vector<unsigned> masksOfBidegree(int n, int p, int q);
std::vector<unsigned> masksOfDegree(int n, int deg, bool tx);

// Matrix-valued differential form with channel shape rows x cols.
// Scalar forms are 1x1, End(E) forms r x r, E-valued forms r x 1,
// TX-valued (0,q) forms n x 1 (row a is the coefficient of d/dz_{a+1}).
struct Form {
  TorusPtr T;
  int rows = 1, cols = 1;
  std::map<unsigned, std::vector<Coeffs>> comp;

  Form() = default;
  Form(TorusPtr t, int r, int c) : T(std::move(t)), rows(r), cols(c) {}

  int channels() const { return rows * cols; }
  std::vector<Coeffs>& at(unsigned mask);
  const std::vector<Coeffs>* find(unsigned mask) const;
  Coeffs& entry(unsigned mask, int i, int j) { return at(mask)[i * cols + j]; }

  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);
  Form& operator*=(cd s);
  void prune();  // drop components that are identically zero
  bool isZero() const;
  double norm() const;  // l2 of all coefficients
  double normSq() const;
  int band() const;
  bool constantCoefficients() const;
  // max total degree present (-1 when empty)
  int degree() const;
};

Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator*(cd s, Form a);

Form scalarForm(TorusPtr T, unsigned mask, const Coeffs& f);
Form constantMatrixForm(TorusPtr T, unsigned mask, const Eigen::MatrixXcd& m);

// alpha ^ beta with pointwise matrix product of channels; a 1x1 operand scales.
Form wedge(const Form& a, const Form& b);
// graded commutator a^b - (-1)^{deg a deg b} b^a, computed per homogeneous piece
Form gradedCommutator(const Form& a, const Form& b);
Form dbar(const Form& w);
Form del(const Form& w);
// phi (TX-valued, n x 1, only dzbar masks) contracted into the first (1,0) slot:
// phi ⌟ w = sum_a phi^a ^ (iota_{d/dz_a} w)
Form contract(const Form& phi, const Form& w);
// componentwise holomorphic derivative of every coefficient (no form degree change)
Form coeffDeriv(const Form& w, int j);

double sobolevNorm(const Form& w, int k);

struct FormShape {
  int rows = 1, cols = 1;
  std::vector<unsigned> masks;
};
Form randomForm(TorusPtr T, const FormShape& shape, int band, std::uint64_t seed,
                double amplitude = 1.0);

}  // namespace hdef

namespace hdef {
// Schouten-Nijenhuis bracket on TX-valued (0,*) forms:
// [phi,psi]^c = phi^a ^ d_a psi^c - (-1)^{ij} psi^a ^ d_a phi^c
Form snBracket(const Form& phi, const Form& psi);

// components of bidegree (p,q)
Form bidegreePart(const Form& w, int p, int q);
}  // namespace hdef
