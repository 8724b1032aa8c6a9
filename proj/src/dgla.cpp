#include "hdef/dgla.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hdef {

namespace {
double sgn(int p) { return (p % 2 == 0) ? 1.0 : -1.0; }

double maxNorm(std::initializer_list<double> xs) {
  double m = 0;
  for (double x : xs) m = std::max(m, x);
  return m;
}
}  // namespace

std::string Convention::describe() const {
  std::string s = bracket == BracketVariant::PhiActsOnB ? "bracket:phi-acts-on-B" : "bracket:psi-acts-on-A";
  s += curvature == CurvatureSign::Alternating ? ",curvature:(-1)^p" : ",curvature:-1";
  return s;
}

std::vector<Convention> allConventions() {
  std::vector<Convention> out;
  for (auto b : {BracketVariant::PhiActsOnB, BracketVariant::PsiActsOnA})
    for (auto c : {CurvatureSign::Alternating, CurvatureSign::ConstantMinus}) out.push_back({b, c});
  return out;
}

// ---------------------------------------------------------------- config

Coeffs realMode(const Torus& T, const std::vector<int>& k, cd c) {
  std::vector<int> mk(k.size());
  for (std::size_t a = 0; a < k.size(); ++a) mk[a] = -k[a];
  Coeffs f = mode(T, k, c);
  f += mode(T, mk, std::conj(c));
  return f;
}

HiggsPairConfig makeConfig(TorusPtr T, int r, MetricModel metric,
                           const std::vector<Eigen::MatrixXcd>& thetaMatrices) {
  HiggsPairConfig cfg;
  cfg.T = T;
  cfg.r = r;
  cfg.metric = std::move(metric);
  cfg.theta = Form(T, r, r);
  for (std::size_t a = 0; a < thetaMatrices.size(); ++a) {
    if (thetaMatrices[a].isZero(0)) continue;
    if (thetaMatrices[a].rows() != r || thetaMatrices[a].cols() != r)
      throw std::invalid_argument("theta matrix has wrong size");
    cfg.theta += constantMatrixForm(T, 1u << a, thetaMatrices[a]);
  }
  return cfg;
}

Form HiggsPairConfig::K() const { return chern(*this).K; }

namespace {

struct GridMetric {
  std::vector<Coeffs> K, Kinv;                // r*r channels, grid values
  double minEig = 1e300, maxCond = 0, herm = 0;
};

void scanPoints(const HiggsPairConfig& cfg, GridMetric& gm) {
  const int r = cfg.r;
  const Eigen::Index P = gm.K[0].size();
  gm.Kinv.assign(r * r, Coeffs::Zero(P));
  Eigen::MatrixXcd M(r, r);
  for (Eigen::Index p = 0; p < P; ++p) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) M(i, j) = gm.K[i * r + j][p];
    gm.herm = std::max(gm.herm, (M - M.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()),
                                                        Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    gm.minEig = std::min(gm.minEig, lo);
    gm.maxCond = std::max(gm.maxCond, lo > 0 ? hi / lo : 1e300);
    Eigen::MatrixXcd Mi = M.inverse();
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) gm.Kinv[i * r + j][p] = Mi(i, j);
  }
}

Form gridToForm(const Torus& T, TorusPtr Tp, const std::vector<Coeffs>& g, int r) {
  Form w(Tp, r, r);
  auto& ch = w.at(0);
  for (int c = 0; c < r * r; ++c) ch[c] = T.sampleGrid().fromGrid(g[c]);
  return w;
}

constexpr double kMaxCondition = 1e10;

}  // namespace

ChernData chern(const HiggsPairConfig& cfg) {
  TorusPtr T = cfg.T;
  const int n = T->n(), r = cfg.r;
  ChernData ch;
  ch.conn = Form(T, r, r);
  ch.curv = Form(T, r, r);
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(r, r);
  switch (cfg.metric.kind) {
    case MetricModel::Identity:
      ch.K = constantMatrixForm(T, 0, I);
      ch.Kinv = ch.K;
      return ch;
    case MetricModel::Constant: {
      const Eigen::MatrixXcd& K = cfg.metric.matrix;
      if (K.rows() != r || K.cols() != r) throw std::invalid_argument("metric matrix has wrong size");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (K + K.adjoint()));
      double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
      if ((K - K.adjoint()).cwiseAbs().maxCoeff() > 1e-12 || lo <= 0 || hi / lo > kMaxCondition)
        throw std::invalid_argument("metric is not Hermitian positive-definite");
      ch.K = constantMatrixForm(T, 0, K);
      ch.Kinv = constantMatrixForm(T, 0, K.inverse());
      ch.minEigenvalue = lo;
      ch.maxCondition = hi / lo;
      return ch;
    }
    default:
      break;
  }

  const FftGrid& G = T->sampleGrid();
  GridMetric gm;
  if (cfg.metric.kind == MetricModel::Modes) {
    const auto* k0 = cfg.metric.modes.find(0);
    if (!k0 || cfg.metric.modes.rows != r) throw std::invalid_argument("metric modes missing");
    for (int c = 0; c < r * r; ++c) gm.K.push_back(G.toGrid((*k0)[c]));
    scanPoints(cfg, gm);
    if (gm.herm > 1e-10 || gm.minEig <= 0 || gm.maxCond > kMaxCondition)
      throw std::invalid_argument("metric is not Hermitian positive-definite on the grid");
    std::vector<std::vector<Coeffs>> dK(n);
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < r * r; ++c) dK[j].push_back(G.toGrid(dDeriv(*T, (*k0)[c], j)));
    for (int j = 0; j < n; ++j) {
      auto& dst = ch.conn.at(1u << j);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
          Coeffs acc = Coeffs::Zero(G.points());
          for (int c = 0; c < r; ++c)
            acc.array() += gm.Kinv[a * r + c].array() * dK[j][c * r + b].array();
          dst[a * r + b] = G.fromGrid(acc);
        }
    }
    ch.K = cfg.metric.modes;
    ch.Kinv = gridToForm(*T, T, gm.Kinv, r);
  } else {
    // K = C^* diag(exp rho) C, conn = C^{-1} diag(d rho) C exactly
    const Eigen::MatrixXcd& C = cfg.metric.matrix.size() ? cfg.metric.matrix : I;
    if (int(cfg.metric.rho.size()) != r || C.rows() != r || C.cols() != r)
      throw std::invalid_argument("exp-diagonal metric needs r potentials and an r x r frame");
    Eigen::MatrixXcd Ci = C.inverse();
    std::vector<Coeffs> rhoGrid;
    for (const auto& rho : cfg.metric.rho) {
      for (std::size_t idx = 0; idx < T->size(); ++idx) {
        std::vector<int> mk(T->dims());
        for (int a = 0; a < T->dims(); ++a) mk[a] = -T->freq(idx)[a];
        if (std::abs(rho[idx] - std::conj(rho[T->index(mk.data())])) > 1e-12)
          throw std::invalid_argument("metric potential is not real");
      }
      rhoGrid.push_back(G.toGrid(rho));
    }
    gm.K.assign(r * r, Coeffs::Zero(G.points()));
    for (int a = 0; a < r; ++a) {
      Eigen::ArrayXcd e = rhoGrid[a].real().array().exp().cast<cd>();
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
          gm.K[i * r + j].array() += std::conj(C(a, i)) * C(a, j) * e;
    }
    scanPoints(cfg, gm);
    if (gm.minEig <= 0 || gm.maxCond > kMaxCondition)
      throw std::invalid_argument("metric is too ill-conditioned on the grid");
    for (int j = 0; j < n; ++j) {
      auto& dst = ch.conn.at(1u << j);
      for (int a = 0; a < r; ++a) {
        Coeffs d = dDeriv(*T, cfg.metric.rho[a], j);
        if (d.isZero(0)) continue;
        for (int i = 0; i < r; ++i)
          for (int k = 0; k < r; ++k) {
            cd w = Ci(i, a) * C(a, k);
            if (w != cd(0)) dst[i * r + k] += w * d;
          }
      }
    }
    ch.K = gridToForm(*T, T, gm.K, r);
    ch.Kinv = gridToForm(*T, T, gm.Kinv, r);
  }
  ch.conn.prune();
  ch.curv = dbar(ch.conn);
  ch.curv.prune();
  ch.minEigenvalue = gm.minEig;
  ch.maxCondition = gm.maxCond;
  return ch;
}

// ---------------------------------------------------------------- graded elements

GradedElement& GradedElement::operator+=(const GradedElement& o) {
  end += o.end;
  tx += o.tx;
  return *this;
}
GradedElement& GradedElement::operator-=(const GradedElement& o) {
  end -= o.end;
  tx -= o.tx;
  return *this;
}
GradedElement& GradedElement::operator*=(cd s) {
  end *= s;
  tx *= s;
  return *this;
}
double GradedElement::normSq() const { return end.normSq() + tx.normSq(); }
double GradedElement::norm() const { return std::sqrt(normSq()); }
bool GradedElement::isZero() const { return end.isZero() && tx.isZero(); }
GradedElement operator+(GradedElement a, const GradedElement& b) { return a += b; }
GradedElement operator-(GradedElement a, const GradedElement& b) { return a -= b; }
GradedElement operator*(cd s, GradedElement a) { return a *= s; }

double sobolevNorm(const GradedElement& x, int k) {
  double a = sobolevNorm(x.end, k), b = sobolevNorm(x.tx, k);
  return std::sqrt(a * a + b * b);
}

GradedElement zeroElement(TorusPtr T, int r, int deg) {
  GradedElement x;
  x.deg = deg;
  x.end = Form(T, r, r);
  x.tx = Form(T, T->n(), 1);
  return x;
}

GradedElement randomElement(TorusPtr T, int r, int deg, int band, std::uint64_t seed,
                            double amplitude) {
  GradedElement x = zeroElement(T, r, deg);
  const int n = T->n();
  x.end = randomForm(T, {r, r, masksOfDegree(n, deg, false)}, band, seed, amplitude);
  x.tx = randomForm(T, {n, 1, masksOfDegree(n, deg, true)}, band,
                    seed ^ 0x9e3779b97f4a7c15ULL, amplitude);
  return x;
}

// ---------------------------------------------------------------- operators

Form pkEnd(const Form& A, const ChernData& ch) { return del(A) + gradedCommutator(ch.conn, A); }

Form pkSection(const Form& s, const ChernData& ch) { return del(s) + wedge(ch.conn, s); }

Form anticommPk(const Form& phi, const Form& A, const ChernData& ch) {
  if (phi.comp.empty() || A.comp.empty()) return Form(A.T ? A.T : phi.T, A.rows, A.cols);
  const int i = phi.degree();
  Form out = pkEnd(contract(phi, A), ch);
  out += sgn(i) * contract(phi, pkEnd(A, ch));
  return out;
}

Form anticommPkSection(const Form& phi, const Form& s, const ChernData& ch) {
  if (phi.comp.empty() || s.comp.empty()) return Form(s.T ? s.T : phi.T, s.rows, s.cols);
  const int i = phi.degree();
  Form out = pkSection(contract(phi, s), ch);
  out += sgn(i) * contract(phi, pkSection(s, ch));
  return out;
}

Form lieBracketEnd(const Form& A, const Form& B) { return gradedCommutator(A, B); }

Dgla::Dgla(HiggsPairConfig cfg, Convention conv) : cfg_(std::move(cfg)), conv_(conv) {
  ch_ = chern(cfg_);
}

Dgla::Dgla(HiggsPairConfig cfg, ChernData ch, Convention conv)
    : cfg_(std::move(cfg)), ch_(std::move(ch)), conv_(conv) {}

Form Dgla::curvatureCoupling(const Form& phi, int p) const {
  double s = conv_.curvature == CurvatureSign::Alternating ? sgn(p) : -1.0;
  return s * contract(phi, ch_.curv);
}

namespace {
// the four pieces whose sum is d(x), End parts only; the TX part is dbar(phi)
std::vector<Form> dEndTerms(const Dgla& L, const GradedElement& x) {
  const ChernData& ch = L.chernData();
  return {dbar(x.end), gradedCommutator(L.config().theta, x.end), L.curvatureCoupling(x.tx, x.deg),
          anticommPk(x.tx, L.config().theta, ch)};
}
}  // namespace

GradedElement Dgla::d(const GradedElement& x) const {
  GradedElement y = zero(x.deg + 1);
  for (const Form& t : dEndTerms(*this, x)) y.end += t;
  y.tx = dbar(x.tx);
  y.end.prune();
  y.tx.prune();
  return y;
}

GradedElement Dgla::bracket(const GradedElement& x, const GradedElement& y) const {
  const int i = x.deg, j = y.deg;
  GradedElement z = zero(i + j);
  const Form& A = x.end;
  const Form& B = y.end;
  if (conv_.bracket == BracketVariant::PhiActsOnB) {
    z.end += sgn(i) * anticommPk(x.tx, B, ch_);
    z.end -= sgn((i + 1) * j) * anticommPk(y.tx, A, ch_);
  } else {
    z.end += sgn(i) * anticommPk(y.tx, A, ch_);
    z.end -= sgn((i + 1) * j) * anticommPk(x.tx, B, ch_);
  }
  z.end -= gradedCommutator(A, B);
  z.tx = snBracket(x.tx, y.tx);
  z.end.prune();
  z.tx.prune();
  return z;
}

GradedElement Dgla::mcResidual(const GradedElement& x) const {
  return d(x) - 0.5 * bracket(x, x);
}

GradedElement Dgla::structureEquations(const GradedElement& x) const {
  if (x.deg != 1) throw std::invalid_argument("structure equations need a degree-1 element");
  const Form& theta = cfg_.theta;
  const Form& AB = x.end;
  const Form& phi = x.tx;
  GradedElement z = zero(2);
  z.end = dbar(AB);
  z.end -= contract(phi, ch_.curv);
  z.end += gradedCommutator(theta, AB);
  z.end += anticommPk(phi, theta, ch_);
  z.end += anticommPk(phi, AB, ch_);
  z.end += 0.5 * gradedCommutator(AB, AB);
  z.tx = dbar(phi) - 0.5 * snBracket(phi, phi);
  return z;
}

// ---------------------------------------------------------------- validation

HiggsValidation validateHiggs(const HiggsPairConfig& cfg, double tol) {
  HiggsValidation v;
  v.dbarTheta = dbar(cfg.theta).norm();
  v.thetaWedgeTheta = wedge(cfg.theta, cfg.theta).norm();
  std::ostringstream msg;
  try {
    ChernData ch = chern(cfg);
    v.minEigenvalue = ch.minEigenvalue;
    v.maxCondition = ch.maxCondition;
  } catch (const std::exception& e) {
    msg << e.what() << "; ";
    v.minEigenvalue = 0;
    v.maxCondition = std::numeric_limits<double>::infinity();
  }
  if (cfg.metric.kind == MetricModel::Modes) {
    const Torus& T = *cfg.T;
    const int r = cfg.r;
    GridMetric gm;
    if (const auto* k0 = cfg.metric.modes.find(0)) {
      for (int c = 0; c < r * r; ++c) gm.K.push_back(T.sampleGrid().toGrid((*k0)[c]));
      scanPoints(cfg, gm);
      v.hermitianDefect = gm.herm;
    }
  } else if (cfg.metric.kind == MetricModel::Constant) {
    v.hermitianDefect = (cfg.metric.matrix - cfg.metric.matrix.adjoint()).cwiseAbs().maxCoeff();
  }
  if (v.dbarTheta > tol) msg << "theta is not holomorphic; ";
  if (v.thetaWedgeTheta > tol) msg << "theta^theta does not vanish; ";
  if (v.hermitianDefect > tol) msg << "metric is not Hermitian; ";
  if (!(v.minEigenvalue > 0)) msg << "metric is not positive-definite; ";
  v.message = msg.str();
  v.pass = v.message.empty();
  return v;
}

// ---------------------------------------------------------------- identity checks

Check checkDSquared(const Dgla& L, const GradedElement& x) {
  GradedElement y = L.d(x);
  GradedElement z = L.d(y);
  Check c{"d^2=0", z.norm(), 0};
  for (const Form& t : dEndTerms(L, y)) c.scale = std::max(c.scale, t.norm());
  c.scale = std::max({c.scale, dbar(y.tx).norm(), y.norm()});
  return c;
}

Check checkAntisymmetry(const Dgla& L, const GradedElement& x, const GradedElement& y) {
  GradedElement a = L.bracket(x, y), b = L.bracket(y, x);
  GradedElement res = a + sgn(x.deg * y.deg) * b;
  return {"antisymmetry", res.norm(), maxNorm({a.norm(), b.norm()})};
}

Check checkJacobi(const Dgla& L, const GradedElement& x, const GradedElement& y,
                  const GradedElement& z) {
  GradedElement a = L.bracket(x, L.bracket(y, z));
  GradedElement b = L.bracket(L.bracket(x, y), z);
  GradedElement c = L.bracket(y, L.bracket(x, z));
  GradedElement res = a - b - sgn(x.deg * y.deg) * c;
  return {"jacobi", res.norm(), maxNorm({a.norm(), b.norm(), c.norm()})};
}

Check checkLeibniz(const Dgla& L, const GradedElement& x, const GradedElement& y) {
  GradedElement a = L.d(L.bracket(x, y));
  GradedElement b = L.bracket(L.d(x), y);
  GradedElement c = L.bracket(x, L.d(y));
  GradedElement res = a - b - sgn(x.deg) * c;
  return {"leibniz", res.norm(), maxNorm({a.norm(), b.norm(), c.norm()})};
}

Check checkStructureEquations(const Dgla& L, const GradedElement& x) {
  GradedElement a = L.mcResidual(x), b = L.structureEquations(x);
  return {"structure-equations", (a - b).norm(), maxNorm({a.norm(), b.norm()})};
}

Check checkBianchi(const ChernData& ch) {
  Form a = dbar(ch.curv);
  Form d1 = del(ch.curv), d2 = gradedCommutator(ch.conn, ch.curv);
  Form b = d1 + d2;
  return {"bianchi", a.norm() + b.norm(), maxNorm({d1.norm(), d2.norm(), ch.curv.norm()})};
}

namespace {
// i_xi has operator degree q-1 for xi of form degree q
int contractDegree(const Form& xi) { return xi.degree() - 1; }
}  // namespace

Check checkContractionsCommute(const Form& xi, const Form& eta, const Form& w) {
  Form a = contract(xi, contract(eta, w));
  Form b = contract(eta, contract(xi, w));
  Form res = a - sgn(contractDegree(xi) * contractDegree(eta)) * b;
  return {"[i_xi,i_eta]=0", res.norm(), maxNorm({a.norm(), b.norm()})};
}

Check checkSchoutenCartan(const Form& xi, const Form& eta, const Form& w) {
  const int q = eta.degree();
  // [d, i_eta] = d i_eta + (-1)^q i_eta d, operator degree q
  auto D = [&](const Form& v) { return del(contract(eta, v)) + sgn(q) * contract(eta, del(v)); };
  Form lhs = contract(snBracket(xi, eta), w);
  Form t1 = contract(xi, D(w));
  Form t2 = D(contract(xi, w));
  Form res = lhs - t1 + sgn(contractDegree(xi) * q) * t2;
  return {"i_[xi,eta]=[i_xi,[d,i_eta]]", res.norm(), maxNorm({lhs.norm(), t1.norm(), t2.norm()})};
}

Check checkBracketContraction(const ChernData& ch, const Form& phi, const Form& psi,
                              const Form& w, FourthTermSign sign) {
  const int j = phi.degree(), k = psi.degree();
  Form lhs = contract(snBracket(phi, psi), w);
  Form t1 = contract(phi, pkSection(contract(psi, w), ch));
  Form t2 = pkSection(contract(psi, contract(phi, w)), ch);
  Form t3 = contract(psi, pkSection(contract(phi, w), ch));
  Form t4 = contract(psi, contract(phi, pkSection(w, ch)));
  const int e4 = sign == FourthTermSign::Derived ? j * k + j : j * k + k;
  Form res = lhs - t1 + sgn(j * k + k) * t2 + sgn(j * k) * t3 + sgn(e4) * t4;
  return {"bracket-contraction", res.norm(),
          maxNorm({lhs.norm(), t1.norm(), t2.norm(), t3.norm(), t4.norm()})};
}

Check checkCompositionRule(const ChernData& ch, const Form& phi, const Form& psi,
                           const Form& A) {
  const int j = phi.degree(), k = psi.degree();
  Form lhs = anticommPk(snBracket(phi, psi), A, ch);
  Form a = anticommPk(phi, anticommPk(psi, A, ch), ch);
  Form b = anticommPk(psi, anticommPk(phi, A, ch), ch);
  Form res = lhs - a + sgn(j * k) * b;
  return {"composition-rule", res.norm(), maxNorm({lhs.norm(), a.norm(), b.norm()})};
}

Check checkCurvatureContraction(const ChernData& ch, const Form& phi, const Form& psi) {
  const int i = phi.degree(), j = psi.degree();
  Form lhs = contract(snBracket(phi, psi), ch.curv);
  Form a = anticommPk(phi, contract(psi, ch.curv), ch);
  Form b = anticommPk(psi, contract(phi, ch.curv), ch);
  Form res = lhs - sgn(i) * a + sgn(i * j + j) * b;
  return {"curvature-contraction", res.norm(), maxNorm({lhs.norm(), a.norm(), b.norm()})};
}

Check checkAnticommLeibniz(const ChernData& ch, const Form& phi, const Form& A,
                           const Form& B) {
  const int k = phi.degree(), i = A.degree();
  Form lhs = anticommPk(phi, gradedCommutator(A, B), ch);
  Form a = gradedCommutator(anticommPk(phi, A, ch), B);
  Form b = gradedCommutator(A, anticommPk(phi, B, ch));
  Form res = lhs - a - sgn(i * k) * b;
  return {"anticommutator-leibniz", res.norm(), maxNorm({lhs.norm(), a.norm(), b.norm()})};
}

Check checkDbarAnticomm(const ChernData& ch, const Form& phi, const Form& A) {
  const int j = phi.degree();
  Form lhs = dbar(anticommPk(phi, A, ch));
  Form a = anticommPk(phi, dbar(A), ch);
  Form b = anticommPk(dbar(phi), A, ch);
  Form c = gradedCommutator(contract(phi, ch.curv), A);
  Form res = lhs - sgn(j) * a + b + c;
  return {"dbar-anticommutator", res.norm(), maxNorm({lhs.norm(), a.norm(), b.norm(), c.norm()})};
}

// ---------------------------------------------------------------- convention resolver

ConventionReport checkConventions(int samples, std::uint64_t seed) {
  auto T = std::make_shared<Torus>(1, 6);
  const int r = 2;
  MetricModel m;
  m.kind = MetricModel::ExpDiag;
  m.matrix = Eigen::MatrixXcd(2, 2);
  m.matrix << 1.0, cd(0.3, 0.2), cd(-0.1, 0.1), 0.8;
  m.rho = {realMode(*T, {1, 0}, cd(0.15, 0.05)) + realMode(*T, {0, 1}, cd(-0.1, 0.0)),
           realMode(*T, {1, -1}, cd(0.0, 0.12))};
  Eigen::MatrixXcd th = Eigen::MatrixXcd::Zero(2, 2);
  th(0, 1) = cd(0.7, -0.2);
  HiggsPairConfig cfg = makeConfig(T, r, m, {th});
  ChernData ch = chern(cfg);

  ConventionReport rep;
  for (const Convention& conv : allConventions()) {
    Dgla L(cfg, ch, conv);
    double worst = 0;
    auto note = [&](const Check& c) { worst = std::max(worst, c.relative()); };
    for (int s = 0; s < samples; ++s) {
      std::uint64_t sd = seed + 101 * s;
      GradedElement x0 = L.random(0, 1, sd + 1), y0 = L.random(0, 1, sd + 2);
      GradedElement x1 = L.random(1, 1, sd + 3), y1 = L.random(1, 1, sd + 4),
                    z1 = L.random(1, 1, sd + 5);
      note(checkDSquared(L, x0));
      note(checkDSquared(L, x1));
      note(checkAntisymmetry(L, x1, y1));
      note(checkAntisymmetry(L, x0, y1));
      note(checkJacobi(L, x1, y1, z1));
      note(checkJacobi(L, x0, y1, z1));
      note(checkLeibniz(L, x1, y1));
      note(checkLeibniz(L, x0, y1));
      note(checkLeibniz(L, x0, y0));
      note(checkStructureEquations(L, x1));
    }
    rep.candidates.emplace_back(conv, worst);
    if (worst <= 1e-10) rep.passing.push_back(conv);
  }
  return rep;
}

}  // namespace hdef
