#include "hdef/gauge.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace hdef {

namespace {

using Mat = Eigen::MatrixXcd;

Form identityEnd(TorusPtr T, int r) {
  return constantMatrixForm(std::move(T), 0u, Mat::Identity(r, r));
}

// values of every channel of one component on the sample grid
std::vector<Coeffs> gridChannels(const Form& f, unsigned mask, int channels) {
  const FftGrid& G = f.T->sampleGrid();
  std::vector<Coeffs> out(channels, Coeffs::Zero(G.points()));
  if (const auto* c = f.find(mask))
    for (int k = 0; k < channels; ++k) out[k] = G.toGrid((*c)[k]);
  return out;
}

Mat pointMatrix(const std::vector<Coeffs>& ch, std::size_t p, int rows, int cols) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = ch[i * cols + j][p];
  return m;
}

// Direct evaluation of many coefficient vectors at scattered points.
class ScatteredEval {
 public:
  explicit ScatteredEval(const Torus& T) : T_(T) {}

  // returns the column index of the first channel
  int add(const Coeffs& c) {
    cols_.push_back(c);
    return int(cols_.size()) - 1;
  }
  void finalize() {
    C_.resize(long(T_.size()), long(cols_.size()));
    for (std::size_t j = 0; j < cols_.size(); ++j) C_.col(long(j)) = cols_[j];
    cols_.clear();
  }
  Eigen::RowVectorXcd at(const std::vector<double>& x) const {
    const int D = T_.dims(), N = T_.N();
    std::vector<std::vector<cd>> pw(D, std::vector<cd>(2 * N + 1));
    for (int a = 0; a < D; ++a) {
      cd base = std::exp(cd(0, 2 * std::numbers::pi * x[a]));
      cd inv = 1.0 / base;
      pw[a][N] = 1.0;
      for (int k = 1; k <= N; ++k) {
        pw[a][N + k] = pw[a][N + k - 1] * base;
        pw[a][N - k] = pw[a][N - k + 1] * inv;
      }
    }
    Eigen::RowVectorXcd b(long(T_.size()));
    for (std::size_t idx = 0; idx < T_.size(); ++idx) {
      const int* k = T_.freq(idx);
      cd v = 1.0;
      for (int a = 0; a < D; ++a) v *= pw[a][N + k[a]];
      b[long(idx)] = v;
    }
    return b * C_;
  }

 private:
  const Torus& T_;
  std::vector<Coeffs> cols_;
  Mat C_;
};

struct ScatteredForm {
  int first = 0, rows = 1, cols = 1;
  Mat at(const Eigen::RowVectorXcd& v) const {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = v[first + i * cols + j];
    return m;
  }
};

ScatteredForm addComponent(ScatteredEval& ev, const Form& f, unsigned mask, int rows, int cols) {
  ScatteredForm s{-1, rows, cols};
  const auto* c = f.find(mask);
  for (int k = 0; k < rows * cols; ++k) {
    int j = ev.add(c ? (*c)[k] : zeroField(*f.T));
    if (s.first < 0) s.first = j;
  }
  return s;
}

// pointwise data of f(z) = z + xi(z)
struct Flow {
  std::vector<Coeffs> xi;              // n channels
  std::vector<std::vector<Coeffs>> d;  // d[k][i] = d_k xi^i
  std::vector<std::vector<Coeffs>> db; // db[k][i] = dbar_k xi^i

  Mat jh(std::size_t p, int n) const {
    Mat J = Mat::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) J(i, k) += d[k][i][p];
    return J;
  }
  Mat jb(std::size_t p, int n) const {
    Mat J(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) J(i, k) = db[k][i][p];
    return J;
  }
  std::vector<double> target(const FftGrid& G, std::size_t p, int n) const {
    std::vector<double> x(2 * n);
    for (int a = 0; a < n; ++a) {
      x[a] = G.coord(p, a) + xi[a][p].real();
      x[n + a] = G.coord(p, n + a) + xi[a][p].imag();
    }
    return x;
  }
};

Flow makeFlow(const Form& xi) {
  const Torus& T = *xi.T;
  const int n = T.n();
  const FftGrid& G = T.sampleGrid();
  Flow f;
  f.d.assign(n, {});
  f.db.assign(n, {});
  const auto* c = xi.find(0u);
  for (int i = 0; i < n; ++i) {
    Coeffs xc = c ? (*c)[i] : zeroField(T);
    f.xi.push_back(G.toGrid(xc));
    for (int k = 0; k < n; ++k) {
      f.d[k].push_back(G.toGrid(dDeriv(T, xc, k)));
      f.db[k].push_back(G.toGrid(dbarDeriv(T, xc, k)));
    }
  }
  return f;
}

void checkDiffeo(const Form& xi) {
  double j = jacobianBound(xi);
  if (!(j < kMaxJacobian))
    throw std::invalid_argument("xi is too large: z + xi(z) is not a safe diffeomorphism on the grid");
}

// pulled-back components of a 1-form with dz_i coefficients a[i] and dzbar_i coefficients b[i]
void pullback(const std::vector<Mat>& a, const std::vector<Mat>& b, const Mat& Jh, const Mat& Jb,
              std::vector<Mat>& hol, std::vector<Mat>& bar) {
  const int n = int(a.size());
  for (int k = 0; k < n; ++k) {
    hol[k].setZero(a[0].rows(), a[0].cols());
    bar[k].setZero(a[0].rows(), a[0].cols());
    for (int i = 0; i < n; ++i) {
      hol[k] += a[i] * Jh(i, k) + b[i] * std::conj(Jb(i, k));
      bar[k] += a[i] * Jb(i, k) + b[i] * std::conj(Jh(i, k));
    }
  }
}

Form fromGridChannels(TorusPtr T, unsigned mask, int rows, int cols,
                      const std::vector<Coeffs>& values) {
  Form f(T, rows, cols);
  auto& c = f.at(mask);
  for (int k = 0; k < rows * cols; ++k) c[k] = T->sampleGrid().fromGrid(values[k]);
  return f;
}

}  // namespace

Form expEndo(const Form& upsilon, double tol, int maxTerms) {
  const int r = upsilon.rows;
  Form sum = identityEnd(upsilon.T, r);
  Form term = sum;
  for (int k = 1; k <= maxTerms; ++k) {
    term = (1.0 / k) * wedge(term, upsilon);
    if (term.comp.empty()) break;
    sum += term;
    if (term.norm() < tol) break;
  }
  sum.prune();
  return sum;
}

GradedElement verticalGauge(const Dgla& L, const GradedElement& eta, const Form& upsilon) {
  if (eta.deg != 1) throw std::invalid_argument("vertical gauge needs a degree-1 element");
  if (upsilon.comp.empty()) return eta;
  const ChernData& ch = L.chernData();
  const Form& theta = L.config().theta;
  Form g = expEndo(upsilon), gi = expEndo(-1.0 * upsilon);
  GradedElement out = eta;
  out.end = wedge(wedge(gi, theta + eta.end), g);
  out.end -= theta;
  out.end += wedge(gi, dbar(g));
  out.end += wedge(gi, anticommPk(eta.tx, g, ch));
  out.end.prune();
  return out;
}

double jacobianBound(const Form& xi) {
  if (xi.comp.empty()) return 0;
  const int n = xi.T->n();
  Flow f = makeFlow(xi);
  double worst = 0;
  for (std::size_t p = 0; p < xi.T->sampleGrid().points(); ++p) {
    Mat A = f.jh(p, n) - Mat::Identity(n, n), B = f.jb(p, n);
    double a = Eigen::JacobiSVD<Mat>(A).singularValues()(0);
    double b = Eigen::JacobiSVD<Mat>(B).singularValues()(0);
    worst = std::max(worst, a + b);
  }
  return worst;
}

Form diffeoPullbackPhi(const Form& phi, const Form& xi) {
  if (xi.comp.empty()) return phi;
  checkDiffeo(xi);
  TorusPtr T = xi.T;
  const int n = T->n();
  const FftGrid& G = T->sampleGrid();
  Flow f = makeFlow(xi);
  ScatteredEval ev(*T);
  std::vector<ScatteredForm> ph;
  for (int j = 0; j < n; ++j) ph.push_back(addComponent(ev, phi.comp.empty() ? Form(T, n, 1) : phi, 1u << (n + j), n, 1));
  ev.finalize();
  std::vector<std::vector<Coeffs>> out(n, std::vector<Coeffs>(n, Coeffs::Zero(G.points())));
  for (std::size_t p = 0; p < G.points(); ++p) {
    Eigen::RowVectorXcd v = ev.at(f.target(G, p, n));
    Mat phiW(n, n);
    for (int j = 0; j < n; ++j) phiW.col(j) = ph[j].at(v);
    Mat Jh = f.jh(p, n), Jb = f.jb(p, n);
    Mat P = Jh + phiW * Jb.conjugate(), Q = Jb + phiW * Jh.conjugate();
    Mat res = P.partialPivLu().solve(Q);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) out[j][i][p] = res(i, j);
  }
  Form r(T, n, 1);
  for (int j = 0; j < n; ++j) r += fromGridChannels(T, 1u << (n + j), n, 1, out[j]);
  r.prune();
  return r;
}

Form transportFirstOrder(const Form& xi, const ChernData& ch) {
  if (xi.comp.empty() || ch.conn.comp.empty()) return Form(ch.K.T, ch.K.rows, ch.K.cols);
  return -1.0 * contract(xi, ch.conn);
}

GradedElement fullGauge(const Dgla& L, const GradedElement& eta, const GradedElement& gamma) {
  if (eta.deg != 1 || gamma.deg != 0) throw std::invalid_argument("full gauge: wrong degrees");
  if (gamma.tx.isZero()) return verticalGauge(L, eta, gamma.end);
  const Form& xi = gamma.tx;
  checkDiffeo(xi);
  TorusPtr T = L.torus();
  const int n = T->n(), r = L.rank();
  const FftGrid& G = T->sampleGrid();
  const ChernData& ch = L.chernData();
  const Form& theta = L.config().theta;
  const Form conn = ch.conn.comp.empty() ? Form(T, r, r) : ch.conn;

  Form Phi = wedge(expEndo(transportFirstOrder(xi, ch)),
                   gamma.end.comp.empty() ? identityEnd(T, r) : expEndo(gamma.end));
  if (Phi.comp.empty()) Phi = identityEnd(T, r);
  Flow f = makeFlow(xi);
  auto phiGrid = gridChannels(Phi, 0u, r * r);
  std::vector<std::vector<Coeffs>> dPhi(n), dbPhi(n), connZ(n), thetaZ(n);
  for (int k = 0; k < n; ++k) {
    dPhi[k] = gridChannels(coeffDeriv(Phi, k), 0u, r * r);
    Form db = dbar(Phi);
    dbPhi[k] = gridChannels(db, 1u << (n + k), r * r);
    connZ[k] = gridChannels(conn, 1u << k, r * r);
    thetaZ[k] = gridChannels(theta, 1u << k, r * r);
  }

  ScatteredEval ev(*T);
  Form tx = eta.tx.comp.empty() ? Form(T, n, 1) : eta.tx;
  Form higgs = theta + eta.end;
  std::vector<ScatteredForm> connW, aW, higgsW, phiW;
  for (int i = 0; i < n; ++i) {
    connW.push_back(addComponent(ev, conn, 1u << i, r, r));
    aW.push_back(addComponent(ev, eta.end, 1u << (n + i), r, r));
    higgsW.push_back(addComponent(ev, higgs, 1u << i, r, r));
    phiW.push_back(addComponent(ev, tx, 1u << (n + i), n, 1));
  }
  ev.finalize();

  const std::size_t P = G.points();
  auto zeros = [&](int c) { return std::vector<Coeffs>(c, Coeffs::Zero(P)); };
  std::vector<std::vector<Coeffs>> outA(n, zeros(r * r)), outB(n, zeros(r * r)), outPhi(n, zeros(n));
  std::vector<Mat> a(n), b(n), hol(n), bar(n);
  for (std::size_t p = 0; p < P; ++p) {
    Eigen::RowVectorXcd v = ev.at(f.target(G, p, n));
    Mat Jh = f.jh(p, n), Jb = f.jb(p, n);
    Mat ph(n, n);
    for (int j = 0; j < n; ++j) ph.col(j) = phiW[j].at(v);
    Mat Pm = Jh + ph * Jb.conjugate(), Qm = Jb + ph * Jh.conjugate();
    Mat phNew = Pm.partialPivLu().solve(Qm);

    Mat Ph = pointMatrix(phiGrid, p, r, r);
    Mat Phinv = Ph.inverse();

    // connection part: conn + A at f(z), gauged by Phi
    for (int i = 0; i < n; ++i) {
      a[i] = connW[i].at(v);
      b[i] = aW[i].at(v);
    }
    pullback(a, b, Jh, Jb, hol, bar);
    std::vector<Mat> wHol(n), wBar(n);
    for (int k = 0; k < n; ++k) {
      wHol[k] = Phinv * hol[k] * Ph + Phinv * pointMatrix(dPhi[k], p, r, r);
      wBar[k] = Phinv * bar[k] * Ph + Phinv * pointMatrix(dbPhi[k], p, r, r);
    }
    for (int j = 0; j < n; ++j) {
      Mat Aj = wBar[j];
      for (int i = 0; i < n; ++i) Aj -= phNew(i, j) * (wHol[i] - pointMatrix(connZ[i], p, r, r));
      for (int c = 0; c < r * r; ++c) outA[j][c][p] = Aj(c / r, c % r);
    }

    // Higgs field as a 1-form of the deformed structure: Theta + phi⌟Theta
    for (int i = 0; i < n; ++i) a[i] = higgsW[i].at(v);
    for (int j = 0; j < n; ++j) {
      b[j] = Mat::Zero(r, r);
      for (int i = 0; i < n; ++i) b[j] += ph(i, j) * a[i];
    }
    pullback(a, b, Jh, Jb, hol, bar);
    for (int k = 0; k < n; ++k) {
      Mat Bk = Phinv * hol[k] * Ph - pointMatrix(thetaZ[k], p, r, r);
      for (int c = 0; c < r * r; ++c) outB[k][c][p] = Bk(c / r, c % r);
    }
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) outPhi[j][i][p] = phNew(i, j);
  }

  GradedElement out = L.zero(1);
  for (int k = 0; k < n; ++k) {
    out.end += fromGridChannels(T, 1u << k, r, r, outB[k]);
    out.end += fromGridChannels(T, 1u << (n + k), r, r, outA[k]);
    out.tx += fromGridChannels(T, 1u << (n + k), n, 1, outPhi[k]);
  }
  out.end.prune();
  out.tx.prune();
  return out;
}

GaugeFixResult gaugeFix(const HodgeSystem& H, const GradedElement& eta, GaugeFixOptions opts) {
  const Dgla& L = H.dgla();
  GaugeFixResult res;
  res.gamma = -1.0 * H.green(H.dStar(eta));
  for (int it = 0; it <= opts.maxIter; ++it) {
    res.gauged = fullGauge(L, eta, res.gamma);
    GradedElement ds = H.dStar(res.gauged);
    res.residual = H.norm(ds);
    res.history.push_back(res.residual);
    res.iterations = it;
    if (!std::isfinite(res.residual)) break;
    if (res.residual <= opts.tol) {
      res.converged = true;
      break;
    }
    if (it == opts.maxIter) break;
    res.gamma -= opts.damping * H.green(ds);
  }
  return res;
}

MatchResult matchToKuranishi(const KuranishiSeries& S, const GradedElement& eta, MatchOptions opts) {
  const HodgeSystem& H = S.hodge();
  const Dgla& L = H.dgla();
  MatchResult res;
  res.inputMcResidual = H.norm(L.mcResidual(eta));
  res.fix = gaugeFix(H, eta, opts.gauge);
  res.t = S.parametersOf(H.harmonic(res.fix.gauged), &res.outsideSpan);
  res.matchResidual = H.norm(res.fix.gauged - S.evaluate(res.t));
  res.obstructionNorm = S.obstructionAt(res.t).norm();
  std::vector<std::string> why;
  if (res.inputMcResidual > opts.mcTol) why.push_back("input is not a Maurer-Cartan element");
  if (!res.fix.converged) why.push_back("gauge fixing did not converge");
  if (res.matchResidual > opts.matchTol) why.push_back("gauge-fixed element differs from eps(t)");
  if (res.obstructionNorm > opts.obstructionTol) why.push_back("t is not on the Kuranishi space");
  res.ok = why.empty();
  for (std::size_t i = 0; i < why.size(); ++i) res.message += (i ? "; " : "") + why[i];
  if (res.ok) res.message = "matched";
  return res;
}

}  // namespace hdef
