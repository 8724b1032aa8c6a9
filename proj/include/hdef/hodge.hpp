#pragma once

#include "hdef/dgla.hpp"

#include <Eigen/Cholesky>

#include <string>
#include <vector>

namespace hdef {

struct HodgeOptions {
  double kernelRel = 1e-8;  // eigenvalues below kernelRel * max are harmonic
  double gapRequired = 1e4;
  std::string cacheDir;     // empty: no cache
  std::string cacheKey;     // content description hashed into the cache file name
};

// Finite Hodge theory for the truncated complex L^0 -> ... -> L^3 (-> L^4 for the top Laplacian).
// Vectors of degree i are laid out frequency-major: index = freq * slots(i) + slot.
class HodgeSystem {
 public:
  static constexpr int kMaxDegree = 3;

  HodgeSystem(const Dgla& L, HodgeOptions opts = {});

  const Dgla& dgla() const { return L_; }
  int slots(int deg) const { return int(slots_[deg].size()); }
  long dim(int deg) const;
  int harmonicDim(int deg) const { return int(harmonicCount_[deg]); }
  double gap(int deg) const { return gap_[deg]; }
  double threshold(int deg) const { return threshold_[deg]; }
  bool reliable() const;
  std::size_t blockCount() const { return blocks_.size(); }
  bool loadedFromCache() const { return fromCache_; }
  const std::string& cacheFile() const { return cacheFile_; }

  Eigen::VectorXcd toVector(const GradedElement& x) const;
  GradedElement fromVector(int deg, const Eigen::VectorXcd& v) const;

  Eigen::VectorXcd d(int deg, const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd dStar(int deg, const Eigen::VectorXcd& v) const;  // L^deg -> L^{deg-1}
  Eigen::VectorXcd laplacian(int deg, const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd harmonic(int deg, const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd green(int deg, const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd gram(int deg, const Eigen::VectorXcd& v) const;
  cd inner(int deg, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const;  // (u, v)

  GradedElement d(const GradedElement& x) const { return apply(&HodgeSystem::d, x, x.deg + 1); }
  GradedElement dStar(const GradedElement& x) const {
    return apply(&HodgeSystem::dStar, x, x.deg - 1);
  }
  GradedElement laplacian(const GradedElement& x) const {
    return apply(&HodgeSystem::laplacian, x, x.deg);
  }
  GradedElement harmonic(const GradedElement& x) const {
    return apply(&HodgeSystem::harmonic, x, x.deg);
  }
  GradedElement green(const GradedElement& x) const { return apply(&HodgeSystem::green, x, x.deg); }
  cd inner(const GradedElement& u, const GradedElement& v) const {
    return inner(u.deg, toVector(u), toVector(v));
  }
  double norm(const GradedElement& x) const { return std::sqrt(std::max(0.0, inner(x, x).real())); }

  // M-orthonormal basis of the harmonic space, built by Gram-Schmidt of H e_j in coordinate order
  const std::vector<GradedElement>& harmonicBasis(int deg) const { return harmonicBasis_[deg]; }
  // coordinates of the harmonic part of x in harmonicBasis(deg)
  Eigen::VectorXcd harmonicCoordinates(const GradedElement& x) const;

  std::vector<double> spectrum(int deg) const;  // ascending
  // max over blocks of |D_{i+1} D_i| / (|D_{i+1}| |D_i|)
  double dSquaredDefect(int deg) const;
  // max over blocks of |M Delta - (M Delta)^*| / |M Delta|
  double selfAdjointDefect(int deg) const;
  double minEigenvalue(int deg) const;

 private:
  struct DegreeBlock {
    Eigen::MatrixXcd D;  // to degree +1
    Eigen::MatrixXcd M;
    Eigen::LLT<Eigen::MatrixXcd> Mchol;
    Eigen::VectorXd evals;
    Eigen::MatrixXcd V;  // M-orthonormal eigenvectors
    Eigen::MatrixXcd Vker, VposScaled, MVker, MVpos;  // cached factors for H and G
  };
  struct Block {
    std::vector<std::size_t> freqs;
    std::vector<DegreeBlock> deg;  // 0..kMaxDegree+1
  };
  struct Slot {
    bool tx;
    unsigned mask;
    int ch;
  };
  using Triplets = std::vector<std::tuple<long, long, cd>>;

  void assemble(std::vector<Triplets>& D, std::vector<Triplets>& M) const;
  bool loadCache(std::vector<Triplets>& D, std::vector<Triplets>& M);
  void saveCache(const std::vector<Triplets>& D, const std::vector<Triplets>& M) const;
  void buildBlocks(const std::vector<Triplets>& D, const std::vector<Triplets>& M);
  void solve();
  void buildHarmonicBasis();
  Eigen::VectorXcd local(int deg, const Block& b, const Eigen::VectorXcd& v) const;
  void scatter(int deg, const Block& b, const Eigen::VectorXcd& lv, Eigen::VectorXcd& out) const;
  GradedElement apply(Eigen::VectorXcd (HodgeSystem::*f)(int, const Eigen::VectorXcd&) const,
                      const GradedElement& x, int outDeg) const;
  Triplets combAssemble(int deg, int outDeg, const std::vector<int>& width,
                        const std::function<GradedElement(const GradedElement&)>& op) const;

  const Dgla& L_;
  HodgeOptions opts_;
  std::vector<std::vector<Slot>> slots_;  // 0..kMaxDegree+1
  std::vector<Block> blocks_;
  std::vector<long> blockOf_;             // frequency -> block
  std::vector<long> posInBlock_;          // frequency -> position inside its block
  double threshold_[kMaxDegree + 1] = {};
  double gap_[kMaxDegree + 1] = {};
  long harmonicCount_[kMaxDegree + 1] = {};
  std::vector<std::vector<GradedElement>> harmonicBasis_;
  bool fromCache_ = false;
  std::string cacheFile_;
};

std::uint64_t fnv1a(const std::string& s);

}  // namespace hdef
