#include "hdef/hodge.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hdef {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

constexpr char kMagic[8] = {'H', 'D', 'E', 'F', 'H', 'O', 'D', 'G'};
constexpr std::uint32_t kCacheVersion = 2;

long findRoot(std::vector<long>& parent, long a) {
  while (parent[a] != a) {
    parent[a] = parent[parent[a]];
    a = parent[a];
  }
  return a;
}

// coefficients this far below the largest one are product roundoff
constexpr double kRoundoff = 1e-14;

// largest |k_a| per axis carrying a coefficient above roundoff
std::vector<int> axisBands(const Form& f) {
  const Torus& T = *f.T;
  std::vector<int> b(T.dims(), 0);
  double top = 0;
  for (const auto& [m, ch] : f.comp)
    for (const auto& c : ch) top = std::max(top, c.cwiseAbs().maxCoeff());
  for (const auto& [m, ch] : f.comp)
    for (const auto& c : ch)
      for (Eigen::Index i = 0; i < c.size(); ++i)
        if (std::abs(c[i]) > kRoundoff * top)
          for (int a = 0; a < T.dims(); ++a) b[a] = std::max(b[a], std::abs(T.freq(i)[a]));
  return b;
}

std::vector<int> maxBands(std::initializer_list<std::vector<int>> bs) {
  std::vector<int> out(bs.begin()->size(), 0);
  for (const auto& b : bs)
    for (std::size_t a = 0; a < b.size(); ++a) out[a] = std::max(out[a], b[a]);
  return out;
}

}  // namespace

HodgeSystem::HodgeSystem(const Dgla& L, HodgeOptions opts) : L_(L), opts_(std::move(opts)) {
  const int n = L.torus()->n(), r = L.rank();
  slots_.resize(kMaxDegree + 2);
  for (int deg = 0; deg <= kMaxDegree + 1; ++deg) {
    for (unsigned m : masksOfDegree(n, deg, false))
      for (int c = 0; c < r * r; ++c) slots_[deg].push_back({false, m, c});
    for (unsigned m : masksOfDegree(n, deg, true))
      for (int c = 0; c < n; ++c) slots_[deg].push_back({true, m, c});
  }
  std::vector<Triplets> D, M;
  if (!opts_.cacheDir.empty()) {
    std::ostringstream name;
    name << "hodge-" << std::hex << fnv1a(opts_.cacheKey) << ".bin";
    cacheFile_ = (std::filesystem::path(opts_.cacheDir) / name.str()).string();
    fromCache_ = loadCache(D, M);
  }
  if (!fromCache_) {
    assemble(D, M);
    if (!cacheFile_.empty()) saveCache(D, M);
  }
  buildBlocks(D, M);
  solve();
  buildHarmonicBasis();
}

long HodgeSystem::dim(int deg) const {
  if (deg < 0 || deg > kMaxDegree + 1) return 0;
  return long(L_.torus()->size()) * slots(deg);
}

bool HodgeSystem::reliable() const {
  for (int deg = 0; deg <= kMaxDegree; ++deg)
    if (gap_[deg] < opts_.gapRequired) return false;
  return true;
}

Eigen::VectorXcd HodgeSystem::toVector(const GradedElement& x) const {
  const int deg = x.deg;
  const long S = long(L_.torus()->size());
  const int ns = slots(deg);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(S * ns);
  for (int s = 0; s < ns; ++s) {
    const Slot& sl = slots_[deg][s];
    const auto* c = (sl.tx ? x.tx : x.end).find(sl.mask);
    if (!c) continue;
    const Coeffs& f = (*c)[sl.ch];
    for (long k = 0; k < S; ++k) v[k * ns + s] = f[k];
  }
  return v;
}

GradedElement HodgeSystem::fromVector(int deg, const Eigen::VectorXcd& v) const {
  TorusPtr T = L_.torus();
  if (deg < 0) {
    GradedElement z = zeroElement(T, L_.rank(), 0);
    z.deg = deg;
    return z;
  }
  GradedElement x = zeroElement(T, L_.rank(), deg);
  const long S = long(T->size());
  const int ns = slots(deg);
  for (int s = 0; s < ns; ++s) {
    const Slot& sl = slots_[deg][s];
    Coeffs f(S);
    for (long k = 0; k < S; ++k) f[k] = v[k * ns + s];
    if (f.isZero(0)) continue;
    (sl.tx ? x.tx : x.end).at(sl.mask)[sl.ch] = f;
  }
  return x;
}

// ---------------------------------------------------------------- assembly

HodgeSystem::Triplets HodgeSystem::combAssemble(
    int deg, int outDeg, const std::vector<int>& width,
    const std::function<GradedElement(const GradedElement&)>& op) const {
  Triplets out;
  const Torus& T = *L_.torus();
  const int side = T.side(), N = T.N(), dims = T.dims();
  const int nsIn = slots(deg), nsOut = slots(outDeg);
  if (nsIn == 0 || nsOut == 0) return out;
  std::vector<int> P(dims);
  long colours = 1;
  for (int a = 0; a < dims; ++a) {
    P[a] = std::min(2 * width[a] + 1, side);
    colours *= P[a];
  }
  std::vector<int> kin(dims);
  for (int s = 0; s < nsIn; ++s) {
    const Slot& sl = slots_[deg][s];
    for (long col = 0; col < colours; ++col) {
      std::vector<int> c(dims);
      long rem = col;
      for (int a = dims - 1; a >= 0; --a) {
        c[a] = int(rem % P[a]);
        rem /= P[a];
      }
      GradedElement X = zeroElement(L_.torus(), L_.rank(), deg);
      Coeffs f = Coeffs::Zero(T.size());
      for (std::size_t idx = 0; idx < T.size(); ++idx) {
        bool in = true;
        for (int a = 0; a < dims && in; ++a) in = ((T.freq(idx)[a] + N) % P[a]) == c[a];
        if (in) f[idx] = 1.0;
      }
      if (f.isZero(0)) continue;
      (sl.tx ? X.tx : X.end).at(sl.mask)[sl.ch] = f;
      GradedElement Y = op(X);
      double top = 0;
      for (const Form* part : {&Y.end, &Y.tx})
        for (const auto& [m, chs] : part->comp)
          for (const auto& g : chs) top = std::max(top, g.cwiseAbs().maxCoeff());
      for (int so = 0; so < nsOut; ++so) {
        const Slot& slo = slots_[outDeg][so];
        const auto* yc = (slo.tx ? Y.tx : Y.end).find(slo.mask);
        if (!yc) continue;
        const Coeffs& g = (*yc)[slo.ch];
        for (std::size_t idx = 0; idx < T.size(); ++idx) {
          if (std::abs(g[idx]) <= kRoundoff * top) continue;
          bool ok = true;
          for (int a = 0; a < dims; ++a) {
            int base = T.freq(idx)[a] + N;
            int k;
            if (P[a] == side) {
              k = c[a];
            } else {
              int delta = ((c[a] - base % P[a]) % P[a] + P[a]) % P[a];
              if (delta > width[a]) delta -= P[a];
              k = base + delta;
            }
            if (k < 0 || k >= side) ok = false;
            kin[a] = k - N;
          }
          if (!ok) continue;
          long in = T.index(kin.data());
          out.emplace_back(long(idx) * nsOut + so, in * nsIn + s, g[idx]);
        }
      }
    }
  }
  return out;
}

void HodgeSystem::assemble(std::vector<Triplets>& D, std::vector<Triplets>& M) const {
  const ChernData& ch = L_.chernData();
  const auto wd = maxBands({axisBands(ch.conn), axisBands(ch.curv), axisBands(L_.config().theta)});
  auto wm = axisBands(ch.K);
  const auto wi = axisBands(ch.Kinv);
  for (std::size_t a = 0; a < wm.size(); ++a) wm[a] += wi[a];
  D.assign(kMaxDegree + 1, {});
  M.assign(kMaxDegree + 2, {});
  for (int deg = 0; deg <= kMaxDegree; ++deg)
    D[deg] = combAssemble(deg, deg + 1, wd, [&](const GradedElement& x) { return L_.d(x); });
  auto gramOp = [&](const GradedElement& x) {
    GradedElement y = x;
    y.end = wedge(ch.K, wedge(x.end, ch.Kinv));
    return y;
  };
  for (int deg = 0; deg <= kMaxDegree + 1; ++deg) M[deg] = combAssemble(deg, deg, wm, gramOp);
}

bool HodgeSystem::loadCache(std::vector<Triplets>& D, std::vector<Triplets>& M) {
  std::ifstream in(cacheFile_, std::ios::binary);
  if (!in) return false;
  char magic[8];
  std::uint32_t version;
  std::uint64_t keyLen;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&keyLen), sizeof keyLen);
  if (!in || std::memcmp(magic, kMagic, 8) != 0 || version != kCacheVersion || keyLen > (1u << 24))
    return false;
  std::string key(keyLen, '\0');
  in.read(key.data(), std::streamsize(keyLen));
  if (!in || key != opts_.cacheKey) return false;
  auto readSet = [&](std::vector<Triplets>& set, std::size_t count) {
    set.assign(count, {});
    for (auto& t : set) {
      std::uint64_t m;
      in.read(reinterpret_cast<char*>(&m), sizeof m);
      if (!in) return false;
      t.resize(m);
      for (auto& [row, col, v] : t) {
        std::int64_t rc[2];
        double re[2];
        in.read(reinterpret_cast<char*>(rc), sizeof rc);
        in.read(reinterpret_cast<char*>(re), sizeof re);
        row = rc[0];
        col = rc[1];
        v = cd(re[0], re[1]);
      }
    }
    return bool(in);
  };
  return readSet(D, kMaxDegree + 1) && readSet(M, kMaxDegree + 2);
}

void HodgeSystem::saveCache(const std::vector<Triplets>& D, const std::vector<Triplets>& M) const {
  std::filesystem::create_directories(opts_.cacheDir);
  std::string tmp = cacheFile_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    std::uint64_t keyLen = opts_.cacheKey.size();
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
    out.write(reinterpret_cast<const char*>(&keyLen), sizeof keyLen);
    out.write(opts_.cacheKey.data(), std::streamsize(keyLen));
    for (const auto* set : {&D, &M})
      for (const auto& t : *set) {
        std::uint64_t m = t.size();
        out.write(reinterpret_cast<const char*>(&m), sizeof m);
        for (const auto& [row, col, v] : t) {
          std::int64_t rc[2] = {row, col};
          double re[2] = {v.real(), v.imag()};
          out.write(reinterpret_cast<const char*>(rc), sizeof rc);
          out.write(reinterpret_cast<const char*>(re), sizeof re);
        }
      }
  }
  std::filesystem::rename(tmp, cacheFile_);
}

void HodgeSystem::buildBlocks(const std::vector<Triplets>& D, const std::vector<Triplets>& M) {
  const long S = long(L_.torus()->size());
  std::vector<long> parent(S);
  std::iota(parent.begin(), parent.end(), 0L);
  auto unite = [&](long a, long b) {
    a = findRoot(parent, a);
    b = findRoot(parent, b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (int deg = 0; deg <= kMaxDegree; ++deg)
    for (const auto& [row, col, v] : D[deg]) unite(row / slots(deg + 1), col / slots(deg));
  for (int deg = 0; deg <= kMaxDegree + 1; ++deg)
    for (const auto& [row, col, v] : M[deg]) unite(row / slots(deg), col / slots(deg));

  blockOf_.assign(S, -1);
  posInBlock_.assign(S, -1);
  std::vector<long> rootBlock(S, -1);
  for (long k = 0; k < S; ++k) {
    long root = findRoot(parent, k);
    if (rootBlock[root] < 0) {
      rootBlock[root] = long(blocks_.size());
      blocks_.emplace_back();
    }
    Block& b = blocks_[rootBlock[root]];
    blockOf_[k] = rootBlock[root];
    posInBlock_[k] = long(b.freqs.size());
    b.freqs.push_back(std::size_t(k));
  }
  for (Block& b : blocks_) {
    b.deg.resize(kMaxDegree + 2);
    const long nb = long(b.freqs.size());
    for (int deg = 0; deg <= kMaxDegree + 1; ++deg) {
      long ni = nb * slots(deg);
      b.deg[deg].M = Eigen::MatrixXcd::Zero(ni, ni);
      if (deg <= kMaxDegree) b.deg[deg].D = Eigen::MatrixXcd::Zero(nb * slots(deg + 1), ni);
    }
  }
  auto localIndex = [&](long global, int ns) {
    long k = global / ns;
    return posInBlock_[k] * ns + global % ns;
  };
  for (int deg = 0; deg <= kMaxDegree; ++deg)
    for (const auto& [row, col, v] : D[deg]) {
      Block& b = blocks_[blockOf_[row / slots(deg + 1)]];
      b.deg[deg].D(localIndex(row, slots(deg + 1)), localIndex(col, slots(deg))) += v;
    }
  for (int deg = 0; deg <= kMaxDegree + 1; ++deg)
    for (const auto& [row, col, v] : M[deg]) {
      Block& b = blocks_[blockOf_[row / slots(deg)]];
      b.deg[deg].M(localIndex(row, slots(deg)), localIndex(col, slots(deg))) += v;
    }
  for (Block& b : blocks_)
    for (auto& db : b.deg) {
      Eigen::MatrixXcd Ms = 0.5 * (db.M + db.M.adjoint());
      db.M = Ms;
      if (db.M.size()) {
        db.Mchol.compute(db.M);
        if (db.Mchol.info() != Eigen::Success)
          throw std::runtime_error("Gram matrix is not positive-definite");
      }
    }
}

void HodgeSystem::solve() {
  double maxEval[kMaxDegree + 1] = {};
  for (Block& b : blocks_) {
    for (int deg = 0; deg <= kMaxDegree; ++deg) {
      DegreeBlock& db = b.deg[deg];
      if (db.M.size() == 0) continue;
      Eigen::MatrixXcd A = db.D.adjoint() * b.deg[deg + 1].M * db.D;
      if (deg > 0) {
        const DegreeBlock& lo = b.deg[deg - 1];
        if (lo.M.size()) {
          Eigen::MatrixXcd X = db.M * lo.D;  // M_i D_{i-1}
          A += X * lo.Mchol.solve(X.adjoint());
        }
      }
      A = 0.5 * (A + A.adjoint()).eval();
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, db.M);
      if (es.info() != Eigen::Success) throw std::runtime_error("Laplacian eigensolve failed");
      db.evals = es.eigenvalues();
      db.V = es.eigenvectors();
      if (db.evals.size()) maxEval[deg] = std::max(maxEval[deg], db.evals.cwiseAbs().maxCoeff());
    }
  }
  for (int deg = 0; deg <= kMaxDegree; ++deg) {
    threshold_[deg] = opts_.kernelRel * maxEval[deg];
    double below = 0, above = std::numeric_limits<double>::infinity();
    long count = 0;
    for (Block& b : blocks_) {
      DegreeBlock& db = b.deg[deg];
      if (db.M.size() == 0) continue;
      std::vector<int> ker, pos;
      for (int j = 0; j < db.evals.size(); ++j) {
        double l = db.evals[j];
        if (l <= threshold_[deg]) {
          ker.push_back(j);
          below = std::max(below, std::abs(l));
        } else {
          pos.push_back(j);
          above = std::min(above, l);
        }
      }
      count += long(ker.size());
      db.Vker = db.V(Eigen::all, ker);
      db.VposScaled = db.V(Eigen::all, pos);
      db.MVker = db.M * db.Vker;
      db.MVpos = db.M * db.VposScaled;
      for (std::size_t j = 0; j < pos.size(); ++j) db.VposScaled.col(j) /= db.evals[pos[j]];
    }
    harmonicCount_[deg] = count;
    if (!std::isfinite(above) || below == 0)
      gap_[deg] = 1e300;
    else
      gap_[deg] = std::min(1e300, above / below);
  }
}

void HodgeSystem::buildHarmonicBasis() {
  harmonicBasis_.assign(kMaxDegree + 1, {});
  for (int deg = 0; deg <= kMaxDegree; ++deg) {
    for (const Block& b : blocks_) {
      const DegreeBlock& db = b.deg[deg];
      const long kdim = db.Vker.cols();
      if (kdim == 0) continue;
      std::vector<Eigen::VectorXcd> acc;
      for (long j = 0; j < db.M.rows() && long(acc.size()) < kdim; ++j) {
        Eigen::VectorXcd h = db.Vker * db.MVker.row(j).adjoint();
        for (const auto& a : acc) h -= a * (a.adjoint() * db.M * h)(0);
        double nrm = std::sqrt(std::max(0.0, (h.adjoint() * db.M * h)(0).real()));
        if (nrm <= 1e-6 * std::sqrt(db.M(j, j).real())) continue;
        acc.push_back(h / nrm);
      }
      for (const auto& a : acc) {
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(dim(deg));
        scatter(deg, b, a, g);
        harmonicBasis_[deg].push_back(fromVector(deg, g));
      }
    }
  }
}

// ---------------------------------------------------------------- application

Eigen::VectorXcd HodgeSystem::local(int deg, const Block& b, const Eigen::VectorXcd& v) const {
  const int ns = slots(deg);
  Eigen::VectorXcd lv(long(b.freqs.size()) * ns);
  for (std::size_t p = 0; p < b.freqs.size(); ++p)
    lv.segment(long(p) * ns, ns) = v.segment(long(b.freqs[p]) * ns, ns);
  return lv;
}

void HodgeSystem::scatter(int deg, const Block& b, const Eigen::VectorXcd& lv,
                          Eigen::VectorXcd& out) const {
  const int ns = slots(deg);
  for (std::size_t p = 0; p < b.freqs.size(); ++p)
    out.segment(long(b.freqs[p]) * ns, ns) = lv.segment(long(p) * ns, ns);
}

Eigen::VectorXcd HodgeSystem::d(int deg, const Eigen::VectorXcd& v) const {
  if (deg < 0 || deg > kMaxDegree) throw std::out_of_range("d: degree outside assembled range");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim(deg + 1));
  for (const Block& b : blocks_) {
    if (b.deg[deg].D.size() == 0) continue;
    scatter(deg + 1, b, b.deg[deg].D * local(deg, b, v), out);
  }
  return out;
}

Eigen::VectorXcd HodgeSystem::dStar(int deg, const Eigen::VectorXcd& v) const {
  if (deg <= 0) return Eigen::VectorXcd::Zero(0);
  if (deg > kMaxDegree + 1) throw std::out_of_range("d*: degree outside assembled range");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim(deg - 1));
  for (const Block& b : blocks_) {
    const DegreeBlock& lo = b.deg[deg - 1];
    if (lo.D.size() == 0) continue;
    Eigen::VectorXcd w = lo.D.adjoint() * (b.deg[deg].M * local(deg, b, v));
    scatter(deg - 1, b, lo.Mchol.solve(w), out);
  }
  return out;
}

Eigen::VectorXcd HodgeSystem::laplacian(int deg, const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = dStar(deg + 1, d(deg, v));
  if (deg > 0) out += d(deg - 1, dStar(deg, v));
  return out;
}

Eigen::VectorXcd HodgeSystem::harmonic(int deg, const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim(deg));
  for (const Block& b : blocks_) {
    const DegreeBlock& db = b.deg[deg];
    if (db.Vker.cols() == 0) continue;
    scatter(deg, b, db.Vker * (db.MVker.adjoint() * local(deg, b, v)), out);
  }
  return out;
}

Eigen::VectorXcd HodgeSystem::green(int deg, const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim(deg));
  for (const Block& b : blocks_) {
    const DegreeBlock& db = b.deg[deg];
    if (db.VposScaled.cols() == 0) continue;
    scatter(deg, b, db.VposScaled * (db.MVpos.adjoint() * local(deg, b, v)), out);
  }
  return out;
}

Eigen::VectorXcd HodgeSystem::gram(int deg, const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim(deg));
  for (const Block& b : blocks_) scatter(deg, b, b.deg[deg].M * local(deg, b, v), out);
  return out;
}

cd HodgeSystem::inner(int deg, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const {
  return v.dot(gram(deg, u));
}

GradedElement HodgeSystem::apply(
    Eigen::VectorXcd (HodgeSystem::*f)(int, const Eigen::VectorXcd&) const,
    const GradedElement& x, int outDeg) const {
  return fromVector(outDeg, (this->*f)(x.deg, toVector(x)));
}

Eigen::VectorXcd HodgeSystem::harmonicCoordinates(const GradedElement& x) const {
  const auto& B = harmonicBasis(x.deg);
  Eigen::VectorXcd v = toVector(x), c(long(B.size()));
  Eigen::VectorXcd Mv = gram(x.deg, v);
  for (std::size_t j = 0; j < B.size(); ++j) c[long(j)] = toVector(B[j]).dot(Mv);
  return c;
}

// ---------------------------------------------------------------- diagnostics

std::vector<double> HodgeSystem::spectrum(int deg) const {
  std::vector<double> out;
  for (const Block& b : blocks_)
    for (int j = 0; j < b.deg[deg].evals.size(); ++j) out.push_back(b.deg[deg].evals[j]);
  std::sort(out.begin(), out.end());
  return out;
}

double HodgeSystem::dSquaredDefect(int deg) const {
  double m = 0;
  for (const Block& b : blocks_) {
    const auto& D0 = b.deg[deg].D;
    const auto& D1 = b.deg[deg + 1].D;
    if (D0.size() == 0 || D1.size() == 0) continue;
    double s = D0.norm() * D1.norm();
    if (s > 0) m = std::max(m, (D1 * D0).norm() / s);
  }
  return m;
}

double HodgeSystem::selfAdjointDefect(int deg) const {
  double m = 0;
  for (const Block& b : blocks_) {
    const DegreeBlock& db = b.deg[deg];
    if (db.M.size() == 0) continue;
    long ni = db.M.rows();
    Eigen::MatrixXcd Lap = Eigen::MatrixXcd::Zero(ni, ni);
    Lap += db.Mchol.solve(db.D.adjoint() * b.deg[deg + 1].M * db.D);
    if (deg > 0 && b.deg[deg - 1].M.size()) {
      const DegreeBlock& lo = b.deg[deg - 1];
      Lap += lo.D * lo.Mchol.solve(lo.D.adjoint() * db.M);
    }
    Eigen::MatrixXcd A = db.M * Lap;
    double s = A.norm();
    if (s > 0) m = std::max(m, (A - A.adjoint()).norm() / s);
  }
  return m;
}

double HodgeSystem::minEigenvalue(int deg) const {
  double m = std::numeric_limits<double>::infinity();
  for (const Block& b : blocks_)
    if (b.deg[deg].evals.size()) m = std::min(m, b.deg[deg].evals.minCoeff());
  return m;
}

}  // namespace hdef
