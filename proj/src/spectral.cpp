#include "hdef/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>

namespace hdef {

namespace {
constexpr double kPi = std::numbers::pi;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}
}  // namespace

Torus::Torus(int n, int N, Dealias dealias) : n_(n), N_(N), dealias_(dealias) {
  if (n < 1 || N < 1) throw std::invalid_argument("torus needs n >= 1 and N >= 1");
  if (n > 3) throw std::invalid_argument("complex dimension above 3 is not supported");
  const int d = dims();
  size_ = ipow(side(), d);
  freqs_.resize(size_ * d);
  for (std::size_t idx = 0; idx < size_; ++idx) {
    std::size_t rem = idx;
    for (int a = d - 1; a >= 0; --a) {
      freqs_[idx * d + a] = int(rem % side()) - N_;
      rem /= side();
    }
  }
  std::vector<int> z(d, 0);
  zero_ = std::size_t(index(z.data()));

  mu_.assign(n_, std::vector<cd>(size_));
  nu_.assign(n_, std::vector<cd>(size_));
  lap_.assign(size_, 0.0);
  keep_.assign(size_, 1);
  const int cut = (2 * N_) / 3;
  for (std::size_t idx = 0; idx < size_; ++idx) {
    const int* k = freq(idx);
    double s = 0;
    for (int a = 0; a < d; ++a) s += double(k[a]) * k[a];
    lap_[idx] = 4 * kPi * kPi * s;
    for (int j = 0; j < n_; ++j) {
      mu_[j][idx] = cd(kPi * k[n_ + j], kPi * k[j]);
      nu_[j][idx] = cd(-kPi * k[n_ + j], kPi * k[j]);
    }
    if (dealias_ == Dealias::TwoThirds && maxAbs(idx) > cut) keep_[idx] = 0;
  }
  prod_ = std::make_unique<FftGrid>(*this, 3 * N_ + 1);
  sample_ = std::make_unique<FftGrid>(*this, 4 * N_ + 1);
}

Torus::~Torus() = default;

long Torus::index(const int* k) const {
  long idx = 0;
  for (int a = 0; a < dims(); ++a) {
    if (k[a] < -N_ || k[a] > N_) return -1;
    idx = idx * side() + (k[a] + N_);
  }
  return idx;
}

int Torus::maxAbs(std::size_t idx) const {
  int m = 0;
  const int* k = freq(idx);
  for (int a = 0; a < dims(); ++a) m = std::max(m, std::abs(k[a]));
  return m;
}

FftGrid::FftGrid(const Torus& T, int M) : T_(T), M_(M) {
  const int d = T.dims();
  points_ = ipow(M, d);
  map_.resize(T.size());
  for (std::size_t idx = 0; idx < T.size(); ++idx) {
    const int* k = T.freq(idx);
    std::size_t g = 0;
    for (int a = 0; a < d; ++a) g = g * M + std::size_t(((k[a] % M) + M) % M);
    map_[idx] = g;
  }
  buf_ = reinterpret_cast<cd*>(fftw_malloc(sizeof(fftw_complex) * points_));
  std::vector<int> shape(d, M);
  auto* b = reinterpret_cast<fftw_complex*>(buf_);
  fwd_ = fftw_plan_dft(d, shape.data(), b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft(d, shape.data(), b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftGrid::~FftGrid() {
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(buf_);
}

Coeffs FftGrid::toGrid(const Coeffs& c) const {
  std::fill(buf_, buf_ + points_, cd(0));
  for (std::size_t idx = 0; idx < map_.size(); ++idx) buf_[map_[idx]] = c[idx];
  fftw_execute(static_cast<fftw_plan>(bwd_));
  return Eigen::Map<Coeffs>(buf_, Eigen::Index(points_));
}

Coeffs FftGrid::fromGrid(const Coeffs& v) const {
  std::copy(v.data(), v.data() + points_, buf_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  Coeffs c(map_.size());
  const double s = 1.0 / double(points_);
  for (std::size_t idx = 0; idx < map_.size(); ++idx) c[idx] = buf_[map_[idx]] * s;
  return c;
}

double FftGrid::coord(std::size_t p, int a) const {
  const int d = T_.dims();
  std::size_t stride = ipow(M_, d - 1 - a);
  return double((p / stride) % M_) / M_;
}

Coeffs zeroField(const Torus& T) { return Coeffs::Zero(Eigen::Index(T.size())); }

Coeffs constantField(const Torus& T, cd c) {
  Coeffs f = zeroField(T);
  f[T.zeroIndex()] = c;
  return f;
}

Coeffs mode(const Torus& T, const std::vector<int>& k, cd c) {
  if (int(k.size()) != T.dims()) throw std::invalid_argument("frequency vector must have length 2n");
  long idx = T.index(k.data());
  if (idx < 0) throw std::out_of_range("frequency outside cutoff");
  Coeffs f = zeroField(T);
  f[idx] = c;
  return f;
}

bool isConstant(const Torus& T, const Coeffs& f) {
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (std::size_t(i) != T.zeroIndex() && f[i] != cd(0)) return false;
  return true;
}

int band(const Torus& T, const Coeffs& f) {
  int b = -1;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (f[i] != cd(0)) b = std::max(b, T.maxAbs(std::size_t(i)));
  return b;
}

void applyDealias(const Torus& T, Coeffs& f) {
  if (T.dealias() == Dealias::Plain) return;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (!T.keepAfterProduct(std::size_t(i))) f[i] = 0;
}

Coeffs multiply(const Torus& T, const Coeffs& f, const Coeffs& g) {
  Coeffs out;
  if (isConstant(T, f)) {
    out = f[T.zeroIndex()] * g;
  } else if (isConstant(T, g)) {
    out = g[T.zeroIndex()] * f;
  } else {
    const FftGrid& G = T.productGrid();
    Coeffs a = G.toGrid(f);
    a.array() *= G.toGrid(g).array();
    out = G.fromGrid(a);
  }
  applyDealias(T, out);
  return out;
}

Coeffs dDeriv(const Torus& T, const Coeffs& f, int j) {
  if (j < 0 || j >= T.n()) throw std::out_of_range("derivative axis out of range");
  Coeffs out(f.size());
  const auto& s = T.mu(j);
  for (Eigen::Index i = 0; i < f.size(); ++i) out[i] = s[i] * f[i];
  return out;
}

Coeffs dbarDeriv(const Torus& T, const Coeffs& f, int j) {
  if (j < 0 || j >= T.n()) throw std::out_of_range("derivative axis out of range");
  Coeffs out(f.size());
  const auto& s = T.nu(j);
  for (Eigen::Index i = 0; i < f.size(); ++i) out[i] = s[i] * f[i];
  return out;
}

cd evaluate(const Torus& T, const Coeffs& f, const std::vector<double>& x) {
  cd sum = 0;
  for (std::size_t idx = 0; idx < T.size(); ++idx) {
    if (f[idx] == cd(0)) continue;
    const int* k = T.freq(idx);
    double ph = 0;
    for (int a = 0; a < T.dims(); ++a) ph += k[a] * x[a];
    sum += f[idx] * std::polar(1.0, 2 * kPi * ph);
  }
  return sum;
}

unsigned holMask(int n) { return (1u << n) - 1u; }

int wedgeSign(unsigned a, unsigned b) {
  if (a & b) return 0;
  int swaps = 0;
  for (unsigned bb = b; bb; bb &= bb - 1) {
    int j = __builtin_ctz(bb);
    swaps += popcount(a >> (j + 1));
  }
  return (swaps & 1) ? -1 : 1;
}

std::vector<unsigned> masksOfBidegree(int n, int p, int q) {
  std::vector<unsigned> out;
  for (unsigned m = 0; m < (1u << (2 * n)); ++m)
    if (pdeg(m, n) == p && qdeg(m, n) == q) out.push_back(m);
  return out;
}

std::vector<unsigned> masksOfDegree(int n, int deg, bool tx) {
  std::vector<unsigned> out;
  for (unsigned m = 0; m < (1u << (2 * n)); ++m) {
    if (popcount(m) != deg) continue;
    if (tx && pdeg(m, n) != 0) continue;
    out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------- Form

std::vector<Coeffs>& Form::at(unsigned mask) {
  auto it = comp.find(mask);
  if (it == comp.end()) {
    it = comp.emplace(mask, std::vector<Coeffs>(channels(), zeroField(*T))).first;
  }
  return it->second;
}

const std::vector<Coeffs>* Form::find(unsigned mask) const {
  auto it = comp.find(mask);
  return it == comp.end() ? nullptr : &it->second;
}

Form& Form::operator+=(const Form& o) {
  if (!T) T = o.T;
  if (o.comp.empty()) return *this;
  if (comp.empty()) {
    rows = o.rows;
    cols = o.cols;
  }
  if (rows != o.rows || cols != o.cols) throw std::invalid_argument("form channel shapes differ");
  for (const auto& [m, ch] : o.comp) {
    auto& dst = at(m);
    for (int c = 0; c < channels(); ++c) dst[c] += ch[c];
  }
  return *this;
}

Form& Form::operator-=(const Form& o) {
  if (!T) T = o.T;
  if (o.comp.empty()) return *this;
  if (comp.empty()) {
    rows = o.rows;
    cols = o.cols;
  }
  if (rows != o.rows || cols != o.cols) throw std::invalid_argument("form channel shapes differ");
  for (const auto& [m, ch] : o.comp) {
    auto& dst = at(m);
    for (int c = 0; c < channels(); ++c) dst[c] -= ch[c];
  }
  return *this;
}

Form& Form::operator*=(cd s) {
  for (auto& [m, ch] : comp)
    for (auto& f : ch) f *= s;
  return *this;
}

Form operator+(Form a, const Form& b) { return a += b; }
Form operator-(Form a, const Form& b) { return a -= b; }
Form operator*(cd s, Form a) { return a *= s; }

void Form::prune() {
  for (auto it = comp.begin(); it != comp.end();) {
    bool zero = true;
    for (const auto& f : it->second)
      if (!f.isZero(0)) { zero = false; break; }
    it = zero ? comp.erase(it) : std::next(it);
  }
}

bool Form::isZero() const {
  for (const auto& [m, ch] : comp)
    for (const auto& f : ch)
      if (!f.isZero(0)) return false;
  return true;
}

double Form::normSq() const {
  double s = 0;
  for (const auto& [m, ch] : comp)
    for (const auto& f : ch) s += f.squaredNorm();
  return s;
}

double Form::norm() const { return std::sqrt(normSq()); }

int Form::band() const {
  int b = -1;
  for (const auto& [m, ch] : comp)
    for (const auto& f : ch) b = std::max(b, hdef::band(*T, f));
  return b;
}

bool Form::constantCoefficients() const { return band() <= 0; }

int Form::degree() const {
  int d = -1;
  for (const auto& [m, ch] : comp) d = std::max(d, popcount(m));
  return d;
}

Form scalarForm(TorusPtr T, unsigned mask, const Coeffs& f) {
  Form w(T, 1, 1);
  w.at(mask)[0] = f;
  return w;
}

Form constantMatrixForm(TorusPtr T, unsigned mask, const Eigen::MatrixXcd& m) {
  Form w(T, int(m.rows()), int(m.cols()));
  auto& ch = w.at(mask);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) ch[i * m.cols() + j] = constantField(*T, m(i, j));
  return w;
}

// ---------------------------------------------------------------- products

namespace {

struct Term {
  unsigned mask;
  int ch;
  cd coef;
  const Coeffs* L;
  const Coeffs* R;
};

// sum of coef * L.R per output slot, sharing forward transforms between terms
std::map<unsigned, std::vector<Coeffs>> runProducts(const Torus& T, int outChannels,
                                                    const std::vector<Term>& terms) {
  std::map<unsigned, std::vector<Coeffs>> spec;
  std::map<unsigned, std::vector<Coeffs>> grid;
  std::unordered_map<const Coeffs*, int> constCache;
  std::unordered_map<const Coeffs*, Coeffs> gridCache;
  const FftGrid& G = T.productGrid();
  auto isConst = [&](const Coeffs* f) {
    auto it = constCache.find(f);
    if (it != constCache.end()) return it->second == 1;
    bool c = isConstant(T, *f);
    constCache.emplace(f, c ? 1 : 0);
    return c;
  };
  auto gridOf = [&](const Coeffs* f) -> const Coeffs& {
    auto it = gridCache.find(f);
    if (it == gridCache.end()) it = gridCache.emplace(f, G.toGrid(*f)).first;
    return it->second;
  };
  auto slot = [&](std::map<unsigned, std::vector<Coeffs>>& m, unsigned mask, Eigen::Index len)
      -> std::vector<Coeffs>& {
    auto it = m.find(mask);
    if (it == m.end())
      it = m.emplace(mask, std::vector<Coeffs>(outChannels, Coeffs::Zero(len))).first;
    return it->second;
  };
  const Eigen::Index S = Eigen::Index(T.size());
  const Eigen::Index P = Eigen::Index(G.points());
  for (const Term& t : terms) {
    if (t.L->isZero(0) || t.R->isZero(0)) continue;
    if (isConst(t.L)) {
      slot(spec, t.mask, S)[t.ch] += (t.coef * (*t.L)[T.zeroIndex()]) * (*t.R);
    } else if (isConst(t.R)) {
      slot(spec, t.mask, S)[t.ch] += (t.coef * (*t.R)[T.zeroIndex()]) * (*t.L);
    } else {
      auto& dst = slot(grid, t.mask, P)[t.ch];
      dst.array() += t.coef * gridOf(t.L).array() * gridOf(t.R).array();
    }
  }
  for (auto& [mask, chs] : grid) {
    auto& dst = slot(spec, mask, S);
    for (int c = 0; c < outChannels; ++c)
      if (!chs[c].isZero(0)) dst[c] += G.fromGrid(chs[c]);
  }
  for (auto& [mask, chs] : spec)
    for (auto& f : chs) applyDealias(T, f);
  return spec;
}

void wedgeTerms(const Form& a, const Form& b, cd scale, bool swapOrder, int outCols,
                std::vector<Term>& terms) {
  // when swapOrder the product is b ^ a, still indexing channels of (a, b)
  const Form& L = swapOrder ? b : a;
  const Form& R = swapOrder ? a : b;
  for (const auto& [ml, cl] : L.comp) {
    for (const auto& [mr, cr] : R.comp) {
      int s = wedgeSign(ml, mr);
      if (s == 0) continue;
      unsigned m = ml | mr;
      cd c = scale * double(s);
      if (L.channels() == 1) {
        for (int k = 0; k < R.channels(); ++k) terms.push_back({m, k, c, &cl[0], &cr[k]});
      } else if (R.channels() == 1) {
        for (int k = 0; k < L.channels(); ++k) terms.push_back({m, k, c, &cl[k], &cr[0]});
      } else {
        for (int i = 0; i < L.rows; ++i)
          for (int j = 0; j < R.cols; ++j)
            for (int k = 0; k < L.cols; ++k)
              terms.push_back({m, i * outCols + j, c, &cl[i * L.cols + k], &cr[k * R.cols + j]});
      }
    }
  }
}

void productShape(const Form& a, const Form& b, int& rows, int& cols) {
  if (a.channels() == 1) { rows = b.rows; cols = b.cols; return; }
  if (b.channels() == 1) { rows = a.rows; cols = a.cols; return; }
  if (a.cols != b.rows) throw std::invalid_argument("wedge: channel shapes incompatible");
  rows = a.rows;
  cols = b.cols;
}

std::map<int, Form> homogeneousPieces(const Form& w) {
  std::map<int, Form> out;
  for (const auto& [m, ch] : w.comp) {
    auto it = out.find(popcount(m));
    if (it == out.end()) it = out.emplace(popcount(m), Form(w.T, w.rows, w.cols)).first;
    it->second.comp[m] = ch;
  }
  return out;
}

TorusPtr torusOf(const Form& a, const Form& b) { return a.T ? a.T : b.T; }

}  // namespace

Form wedge(const Form& a, const Form& b) {
  int rows, cols;
  productShape(a, b, rows, cols);
  Form out(torusOf(a, b), rows, cols);
  if (a.comp.empty() || b.comp.empty()) return out;
  std::vector<Term> terms;
  wedgeTerms(a, b, 1.0, false, cols, terms);
  out.comp = runProducts(*out.T, rows * cols, terms);
  return out;
}

Form gradedCommutator(const Form& a, const Form& b) {
  int rows, cols;
  productShape(a, b, rows, cols);
  int r2, c2;
  productShape(b, a, r2, c2);
  if (r2 != rows || c2 != cols) throw std::invalid_argument("commutator: shapes incompatible");
  Form out(torusOf(a, b), rows, cols);
  if (a.comp.empty() || b.comp.empty()) return out;
  std::vector<Term> terms;
  auto pa = homogeneousPieces(a);
  auto pb = homogeneousPieces(b);
  for (const auto& [da, fa] : pa)
    for (const auto& [db, fb] : pb) {
      wedgeTerms(fa, fb, 1.0, false, cols, terms);
      wedgeTerms(fa, fb, ((da * db) % 2) ? 1.0 : -1.0, true, cols, terms);
    }
  // terms reference pieces that live until here
  out.comp = runProducts(*out.T, rows * cols, terms);
  return out;
}

Form dbar(const Form& w) {
  Form out(w.T, w.rows, w.cols);
  const Torus& T = *w.T;
  const int n = T.n();
  for (const auto& [m, ch] : w.comp) {
    for (int j = 0; j < n; ++j) {
      unsigned bit = 1u << (n + j);
      int s = wedgeSign(bit, m);
      if (s == 0) continue;
      auto& dst = out.at(m | bit);
      for (int c = 0; c < w.channels(); ++c) dst[c] += double(s) * dbarDeriv(T, ch[c], j);
    }
  }
  return out;
}

Form del(const Form& w) {
  Form out(w.T, w.rows, w.cols);
  const Torus& T = *w.T;
  const int n = T.n();
  for (const auto& [m, ch] : w.comp) {
    for (int j = 0; j < n; ++j) {
      unsigned bit = 1u << j;
      int s = wedgeSign(bit, m);
      if (s == 0) continue;
      auto& dst = out.at(m | bit);
      for (int c = 0; c < w.channels(); ++c) dst[c] += double(s) * dDeriv(T, ch[c], j);
    }
  }
  return out;
}

Form contract(const Form& phi, const Form& w) {
  Form out(torusOf(phi, w), w.rows, w.cols);
  if (phi.comp.empty() || w.comp.empty()) return out;
  const int n = out.T->n();
  if (phi.rows != n || phi.cols != 1) throw std::invalid_argument("contract: phi must be TX-valued");
  std::vector<Term> terms;
  for (const auto& [J, pc] : phi.comp) {
    if (pdeg(J, n) != 0) throw std::invalid_argument("contract: phi must be a (0,q) form");
    for (int a = 0; a < n; ++a) {
      for (const auto& [m, wc] : w.comp) {
        unsigned bit = 1u << a;
        if (!(m & bit)) continue;
        int s1 = (popcount(m & (bit - 1)) & 1) ? -1 : 1;
        unsigned rest = m & ~bit;
        int s2 = wedgeSign(J, rest);
        if (s2 == 0) continue;
        for (int c = 0; c < w.channels(); ++c)
          terms.push_back({J | rest, c, double(s1 * s2), &pc[a], &wc[c]});
      }
    }
  }
  out.comp = runProducts(*out.T, w.channels(), terms);
  return out;
}

Form coeffDeriv(const Form& w, int j) {
  Form out(w.T, w.rows, w.cols);
  for (const auto& [m, ch] : w.comp) {
    auto& dst = out.at(m);
    for (int c = 0; c < w.channels(); ++c) dst[c] = dDeriv(*w.T, ch[c], j);
  }
  return out;
}

double sobolevNorm(const Form& w, int k) {
  if (!w.T) return 0.0;
  const Torus& T = *w.T;
  double s = 0;
  for (const auto& [m, ch] : w.comp)
    for (const auto& f : ch)
      for (std::size_t idx = 0; idx < T.size(); ++idx) {
        double a = std::norm(f[idx]);
        if (a == 0) continue;
        s += std::pow(1.0 + T.lapSymbol(idx), k) * a;
      }
  return std::sqrt(s);
}

Form randomForm(TorusPtr T, const FormShape& shape, int bandLimit, std::uint64_t seed,
                double amplitude) {
  if (bandLimit > T->N()) throw std::invalid_argument("band exceeds cutoff");
  Form w(T, shape.rows, shape.cols);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const double s = amplitude / std::sqrt(2.0);
  for (unsigned m : shape.masks) {
    auto& ch = w.at(m);
    for (auto& f : ch)
      for (std::size_t idx = 0; idx < T->size(); ++idx) {
        if (T->maxAbs(idx) > bandLimit) continue;
        double re = g(rng), im = g(rng);
        f[idx] = s * cd(re, im);
      }
  }
  return w;
}

}  // namespace hdef

namespace hdef {

Form snBracket(const Form& phi, const Form& psi) {
  TorusPtr T = phi.T ? phi.T : psi.T;
  const int n = T->n();
  Form out(T, n, 1);
  if (phi.comp.empty() || psi.comp.empty()) return out;
  const int i = phi.degree(), j = psi.degree();
  const double sgn = ((i * j) % 2) ? 1.0 : -1.0;
  std::vector<Form> dpsi, dphi;
  for (int a = 0; a < n; ++a) {
    dpsi.push_back(coeffDeriv(psi, a));
    dphi.push_back(coeffDeriv(phi, a));
  }
  std::vector<Term> terms;
  auto add = [&](const Form& X, const std::vector<Form>& dY, double c) {
    for (const auto& [mx, cx] : X.comp)
      for (int a = 0; a < n; ++a)
        for (const auto& [my, cy] : dY[a].comp) {
          int s = wedgeSign(mx, my);
          if (s == 0) continue;
          for (int ch = 0; ch < n; ++ch) terms.push_back({mx | my, ch, c * s, &cx[a], &cy[ch]});
        }
  };
  add(phi, dpsi, 1.0);
  add(psi, dphi, sgn);
  out.comp = runProducts(*T, n, terms);
  return out;
}

Form bidegreePart(const Form& w, int p, int q) {
  Form out(w.T, w.rows, w.cols);
  const int n = w.T ? w.T->n() : 0;
  for (const auto& [m, ch] : w.comp)
    if (pdeg(m, n) == p && qdeg(m, n) == q) out.comp[m] = ch;
  return out;
}

}  // namespace hdef
