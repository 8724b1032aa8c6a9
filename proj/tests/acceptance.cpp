#include "hdef/app.hpp"
#include "hdef/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

using namespace hdef;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

TorusPtr torus(int n, int N) { return std::make_shared<const Torus>(n, N); }

Eigen::MatrixXcd E(int i, int j) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(i, j) = 1;
  return m;
}

json loadConfig(const std::string& name) {
  std::ifstream in(std::string(HDEF_CONFIG_DIR) + "/" + name);
  return json::parse(in);
}

const std::vector<std::string> kShipped = {"abelian.json",  "rank2_flat.json", "rank2_nilpotent.json",
                                           "curved.json",   "one_mode.json",   "surface.json"};

HiggsPairConfig curvedLine(TorusPtr T) {
  MetricModel m;
  m.kind = MetricModel::ExpDiag;
  m.matrix = Eigen::MatrixXcd::Identity(2, 2);
  m.matrix(0, 1) = cd(0.2, 0.1);
  m.rho = {realMode(*T, {1, 0}, cd(0.12, 0.03)) + realMode(*T, {0, 1}, cd(0.05, 0)),
           realMode(*T, {1, -1}, cd(-0.08, 0.05))};
  return makeConfig(T, 2, m, {E(0, 1)});
}

HiggsPairConfig surfaceConstant(TorusPtr T) {
  MetricModel m;
  m.kind = MetricModel::Constant;
  m.matrix = Eigen::MatrixXcd::Identity(2, 2);
  m.matrix(0, 1) = cd(0.3, 0.2);
  m.matrix(1, 0) = cd(0.3, -0.2);
  m.matrix(1, 1) = 1.5;
  return makeConfig(T, 2, m, {E(0, 1), 0.5 * E(0, 1)});
}

double tnorm(const std::vector<cd>& t) {
  double s = 0;
  for (auto c : t) s += std::norm(c);
  return std::sqrt(s);
}

double logLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// graded commutator of constant matrix forms on C^1, sign table written out by hand
using ConstForm = std::map<unsigned, Eigen::MatrixXcd>;
ConstForm constWedge(const ConstForm& a, const ConstForm& b) {
  auto sign = [](unsigned x, unsigned y) {
    if (x & y) return 0;
    return (x == 0b10 && y == 0b01) ? -1 : 1;
  };
  ConstForm out;
  for (const auto& [ma, A] : a)
    for (const auto& [mb, B] : b) {
      int s = sign(ma, mb);
      if (!s) continue;
      Eigen::MatrixXcd p = double(s) * A * B;
      if (out.count(ma | mb))
        out[ma | mb] += p;
      else
        out[ma | mb] = p;
    }
  return out;
}

// [x, y] for constant degree-1 End elements with K = I: -(x^y + y^x)
GradedElement constBracket(TorusPtr T, const GradedElement& x, const GradedElement& y) {
  auto toConst = [&](const GradedElement& g) {
    ConstForm c;
    for (const auto& [m, ch] : g.end.comp) {
      Eigen::MatrixXcd M(2, 2);
      for (int i = 0; i < 4; ++i) M(i / 2, i % 2) = ch[i][T->zeroIndex()];
      c[m] = M;
    }
    return c;
  };
  ConstForm a = toConst(x), b = toConst(y);
  ConstForm s = constWedge(a, b);
  for (const auto& [m, M] : constWedge(b, a)) {
    if (s.count(m))
      s[m] += M;
    else
      s[m] = M;
  }
  GradedElement out = zeroElement(T, 2, 2);
  for (const auto& [m, M] : s)
    for (int i = 0; i < 4; ++i) out.end.at(m)[i][T->zeroIndex()] = -M(i / 2, i % 2);
  return out;
}

// with K = I the contraction terms of the bracket vanish on constants, leaving -(x^y + y^x)
bool constantCoefficients(const GradedElement& g) { return g.end.band() <= 0 && g.tx.band() <= 0; }

// ------------------------------------------------------------------ criteria

Outcome axioms() {
  Outcome o;
  double worst = 0;
  int evals = 0;
  {
    auto T = torus(1, 6);
    Dgla L(curvedLine(T));
    SuiteResult r = dglaAxiomSuite(L, 20, 2, 101);
    worst = std::max(worst, r.worstRelative());
    evals += r.evaluations;
    for (const auto& [name, c] : r.worst) o.require(c.relative() <= 1e-10, "n=1 " + name);
  }
  {
    auto T = torus(2, 3);
    Dgla L(surfaceConstant(T));
    SuiteResult r = dglaAxiomSuite(L, 20, 1, 102);
    worst = std::max(worst, r.worstRelative());
    evals += r.evaluations;
    for (const auto& [name, c] : r.worst) o.require(c.relative() <= 1e-10, "n=2 " + name);
  }
  o.detail << "worst relative residual " << worst << " over " << evals << " evaluations";
  return o;
}

Outcome cartan() {
  Outcome o;
  double worst = 0;
  int evals = 0;
  {
    auto T = torus(1, 6);
    Dgla L(curvedLine(T));
    o.require(L.chernData().curv.norm() > 1e-3, "curvature present");
    SuiteResult r = cartanSuite(L, 20, 2, 201);
    worst = std::max(worst, r.worstRelative());
    evals += r.evaluations;
    for (const auto& [name, c] : r.worst) o.require(c.relative() <= 1e-10, "n=1 " + name);
  }
  {
    auto T = torus(2, 3);
    Dgla L(surfaceConstant(T));
    SuiteResult r = cartanSuite(L, 20, 1, 202);
    worst = std::max(worst, r.worstRelative());
    evals += r.evaluations;
    for (const auto& [name, c] : r.worst) o.require(c.relative() <= 1e-10, "n=2 " + name);
  }
  o.detail << "worst relative residual " << worst << " over " << evals << " evaluations";
  return o;
}

Outcome flatness() {
  Outcome o;
  auto T = torus(1, 6);
  Dgla L(curvedLine(T));
  SuiteResult r = flatnessSuite(L, 12, 2, 301);
  o.require(r.evaluations >= 10, "sample count");
  o.require(r.worstRelative() <= 1e-10, "structure-equation action");

  double worstProbe = 0;
  int mcElements = 0;
  for (bool curved : {false, true}) {
    // full-band MC elements: products truncate at the cutoff, so curved data needs N = 8
    auto T2 = torus(1, curved ? 8 : 4);
    Dgla L2(curved ? curvedLine(T2) : makeConfig(T2, 2, {}, {E(0, 1)}));
    HodgeSystem H(L2);
    KuranishiSeries S(H, 5);
    for (int k = 0; k < 4; ++k) {
      std::vector<cd> t(S.parameters(), 0.0);
      for (int j = 0; j < S.parameters(); ++j) t[j] = 0.01 * std::polar(1.0, 0.7 * (j + 3 * k)) / (j + 1.0);
      FixedPointResult fp = S.fixedPoint(t);
      if (L2.mcResidual(fp.x).norm() > 1e-10) continue;
      ++mcElements;
      worstProbe = std::max(worstProbe, maxProbeSquare(DeformedOperator(L2, fp.x)));
    }
  }
  o.require(mcElements >= 4, "Maurer-Cartan elements found");
  o.require(worstProbe <= 1e-9, "probe norm on Maurer-Cartan elements");
  o.detail << "Dbar^2 vs structure equations " << r.worstRelative() << " on " << r.evaluations
           << " elements; max probe |Dbar^2 s| " << worstProbe << " on " << mcElements
           << " Maurer-Cartan elements";
  return o;
}

Outcome hodgeSuite() {
  Outcome o;
  double decomp = 0, comm = 0, adj = 0, minGap = INFINITY;
  for (const auto& name : kShipped) {
    RunConfig c = parseConfig(loadConfig(name));
    auto T = std::make_shared<const Torus>(c.n, c.N, c.dealias);
    Dgla L(buildHiggsConfig(c, T));
    HodgeSystem H(L);
    for (int deg = 0; deg <= 2; ++deg) {
      for (int s = 0; s < 3; ++s) {
        GradedElement x = L.random(deg, 1, 400 + 10 * deg + s);
        GradedElement y = L.random(deg + 1, 1, 500 + 10 * deg + s);
        Eigen::VectorXcd v = H.toVector(x), w = H.toVector(y);
        Eigen::VectorXcd back = H.harmonic(deg, v) + H.laplacian(deg, H.green(deg, v));
        decomp = std::max(decomp, (back - v).norm() / v.norm());
        Eigen::VectorXcd gd = H.green(deg + 1, H.d(deg, v)), dg = H.d(deg, H.green(deg, v));
        comm = std::max(comm, (gd - dg).norm() / std::max({gd.norm(), dg.norm(), 1e-300}));
        cd l = H.inner(deg + 1, H.d(deg, v), w), r = H.inner(deg, v, H.dStar(deg + 1, w));
        adj = std::max(adj, std::abs(l - r) / std::max({std::abs(l), std::abs(r), 1e-300}));
      }
      minGap = std::min(minGap, H.gap(deg));
    }
    o.require(H.reliable(), name + " gap");
  }
  o.require(decomp <= 1e-8, "x = Hx + Delta G x");
  o.require(comm <= 1e-8, "Gd = dG");
  o.require(adj <= 1e-10, "adjoint");
  o.require(minGap >= 1e4, "eigenvalue gap");
  o.detail << "decomposition " << decomp << ", Gd-dG " << comm << ", adjoint " << adj
           << ", smallest gap " << minGap << " over " << kShipped.size() << " configs";
  return o;
}

Outcome dimensions() {
  Outcome o;
  // flat abelian oracle: every slot carries |nu_k|^2, so the kernel is the k = 0 block
  auto T0 = torus(1, 4);
  int oracleH1 = 0;
  for (std::size_t i = 0; i < T0->size(); ++i) {
    const int* k = T0->freq(i);
    if (k[0] == 0 && k[1] == 0) oracleH1 += 3;  // End dz, End dzbar, TX dzbar
  }
  std::ostringstream dims;
  auto family = [&](const std::string& label, auto make) {
    std::vector<std::array<int, 4>> seen;
    for (int N : {4, 6, 8}) {
      auto T = torus(1, N);
      Dgla L(make(T));
      HodgeSystem H(L);
      o.require(H.reliable(), label + " gap at N=" + std::to_string(N));
      seen.push_back({H.harmonicDim(0), H.harmonicDim(1), H.harmonicDim(2), H.harmonicDim(3)});
    }
    o.require(seen[0] == seen[1] && seen[1] == seen[2], label + " stable");
    dims << label << " (" << seen[0][0] << "," << seen[0][1] << "," << seen[0][2] << ","
         << seen[0][3] << ") ";
    return seen[0];
  };
  auto ab = family("abelian", [](TorusPtr T) { return makeConfig(T, 1, {}, {}); });
  o.require(ab[1] == 3 && oracleH1 == 3, "abelian dim H1 = 3");
  family("nilpotent", [](TorusPtr T) { return makeConfig(T, 2, {}, {E(0, 1)}); });
  family("curved", [](TorusPtr T) {
    MetricModel m;
    m.kind = MetricModel::ExpDiag;
    m.matrix = Eigen::MatrixXcd::Identity(2, 2);
    m.rho = {realMode(*T, {1, 0}, cd(0.12, 0.03)), realMode(*T, {1, 0}, cd(-0.08, 0.05))};
    return makeConfig(T, 2, m, {E(0, 1)});
  });
  o.detail << "oracle dim H1 " << oracleH1 << "; dims for N in {4,6,8}: " << dims.str();
  return o;
}

Outcome kuranishi() {
  Outcome o;
  double rec = 0;
  {
    auto T = torus(1, 4);
    Dgla L(curvedLine(T));
    HodgeSystem H(L);
    KuranishiSeries S(H, 5);
    for (int nu = 2; nu <= 5; ++nu) rec = std::max(rec, S.recursionResidual(nu));
  }
  o.require(rec <= 1e-10, "recursion consistency");

  bool abelianOk = true;
  {
    auto T = torus(1, 4);
    Dgla L(makeConfig(T, 1, {}, {}));
    HodgeSystem H(L);
    KuranishiSeries S(H, 5);
    for (const auto& [mu, e] : S.terms()) abelianOk &= (mu.size() && std::accumulate(mu.begin(), mu.end(), 0) == 1);
    for (const auto& [mu, v] : S.obstruction()) abelianOk &= v.norm() == 0;
    std::vector<cd> t = {0.01, cd(0, 0.005), -0.002};
    abelianOk &= (S.evaluate(t) - S.firstOrder(t)).norm() == 0;
  }
  o.require(abelianOk, "abelian series");

  // quadratic obstruction against the hand-expanded bracket, flat pair and nilpotent theta
  double quad = 0, axes = 0;
  double flatCoef = 0;
  for (const char* name : {"rank2_flat.json", "rank2_nilpotent.json"}) {
    RunConfig c = parseConfig(loadConfig(name));
    auto T = std::make_shared<const Torus>(c.n, c.N, c.dealias);
    Dgla L(buildHiggsConfig(c, T));
    HodgeSystem H(L);
    std::vector<GradedElement> dirs;
    for (const auto& d : c.directions) {
      GradedElement g = zeroElement(T, c.r, 1);
      for (const auto& [mask, M] : d.end)
        for (int i = 0; i < 4; ++i) g.end.at(mask)[i][T->zeroIndex()] = M(i / 2, i % 2);
      dirs.push_back(g);
    }
    KuranishiSeries S(H, 4, dirs);
    const int m = S.parameters();
    bool allConstant = true;
    for (const auto& e : S.directions()) allConstant &= constantCoefficients(e);
    o.require(allConstant, std::string(name) + " constant directions");
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        GradedElement br = constBracket(T, S.directions()[a], S.directions()[b]);
        if (a != b) br *= 2.0;
        Eigen::VectorXcd ref = H.harmonicCoordinates(br);
        Monomial mu(m, 0);
        ++mu[a];
        ++mu[b];
        auto it = S.obstruction().find(mu);
        Eigen::VectorXcd got = it == S.obstruction().end() ? Eigen::VectorXcd::Zero(ref.size()) : it->second;
        quad = std::max(quad, (got - ref).norm());
        if (std::string(name) == "rank2_flat.json") flatCoef = std::max(flatCoef, ref.norm());
      }
    if (std::string(name) == "rank2_flat.json") {
      for (auto t : {std::vector<cd>{0.01, 0}, std::vector<cd>{0, 0.01}, std::vector<cd>{cd(0, -0.01), 0}}) {
        McReport r = S.mcCheck(t);
        axes = std::max({axes, r.mcResidualNorm, r.obstructionNorm});
      }
    }
  }
  o.require(flatCoef > 1, "flat pair has a nonzero quadratic obstruction");
  o.require(quad <= 1e-9, "quadratic obstruction");
  o.require(axes <= 1e-8, "MC on the axes");
  o.detail << "recursion " << rec << " (orders 2..5); abelian " << (abelianOk ? "linear" : "NONLINEAR")
           << "; quadratic obstruction mismatch " << quad << "; MC on axes " << axes;
  return o;
}

Outcome gaugeExpansion() {
  Outcome o;
  auto T = torus(1, 4);
  Dgla L(curvedLine(T));
  std::vector<double> ts = {1e-1, 1e-2, 1e-3};
  double worst = INFINITY;
  const int pairs = 6;
  for (int p = 0; p < pairs; ++p) {
    GradedElement eta = L.random(1, 1, 700 + p, 0.3), gam = L.random(0, 1, 800 + p);
    gam *= 2.0 / jacobianBound(gam.tx);  // f stays a diffeomorphism down from t = 0.1
    std::vector<double> rem;
    for (double t : ts) {
      GradedElement out = fullGauge(L, cd(t) * eta, cd(t) * gam);
      rem.push_back((out - cd(t) * eta - cd(t) * L.d(gam)).norm());
    }
    worst = std::min(worst, logLogSlope(ts, rem));
  }
  o.require(worst >= 1.9, "remainder slope");
  o.detail << "smallest log-log remainder slope " << worst << " over " << pairs << " pairs";
  return o;
}

Outcome roundTrip() {
  Outcome o;
  double worstT = 0, worstMatch = 0;
  int trials = 0;
  for (bool curved : {false, true}) {
    auto T = torus(1, 4);
    Dgla L(curved ? curvedLine(T) : makeConfig(T, 2, {}, {E(0, 1)}));
    HodgeSystem H(L);
    KuranishiSeries S(H, 4);
    for (int k = 0; k < 3; ++k) {
      std::vector<cd> t0(S.parameters(), 0.0);
      for (int j = 0; j < S.parameters(); ++j) t0[j] = 0.008 * std::polar(1.0, 1.3 * j + k) / (1.0 + j);
      if (S.obstructionAt(t0).norm() > 1e-8) continue;  // t0 must lie on the Kuranishi space
      GradedElement eps = S.fixedPoint(t0).x;
      GradedElement gam = L.random(0, 1, 900 + 10 * k + curved, 1e-3);
      gam -= H.harmonic(gam);
      MatchResult m = matchToKuranishi(S, fullGauge(L, eps, gam));
      std::vector<cd> dt(t0.size());
      for (std::size_t j = 0; j < t0.size(); ++j) dt[j] = m.t[j] - t0[j];
      double err = tnorm(dt), bound = 1e-6 * tnorm(t0) + 1e-9;
      worstT = std::max(worstT, err / bound);
      worstMatch = std::max(worstMatch, m.matchResidual);
      o.require(m.ok, m.message);
      o.require(err <= bound, "t recovery");
      ++trials;
    }
  }
  o.require(trials >= 5, "trial count");
  o.require(worstMatch <= 1e-6, "matching residual");
  o.detail << trials << " round trips; worst |t - t0| / bound " << worstT << ", worst matching residual "
           << worstMatch;
  return o;
}

json stripTimings(json r) {
  r.erase("timings");
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  int compared = 0;
  for (const auto& name : kShipped) {
    json cfg = loadConfig(name);
    std::vector<std::string> cmds = {"validate", "kuranishi", "mc-check"};
    if (name == "rank2_nilpotent.json") cmds = commands();
    for (const auto& cmd : cmds) {
      RunOutput a = runCommand(cmd, cfg), b = runCommand(cmd, cfg);
      bool same = stripTimings(a.report).dump() == stripTimings(b.report).dump() &&
                  a.obstructionCsv == b.obstructionCsv && a.spectrumCsv == b.spectrumCsv;
      o.require(same, name + " " + cmd);
      ++compared;
    }
  }
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "hdef-determinism";
  fs::remove_all(base);
  std::string cfgPath = std::string(HDEF_CONFIG_DIR) + "/rank2_nilpotent.json";
  for (const char* cmd : {"hodge", "kuranishi", "match"}) {
    std::vector<fs::path> outs = {base / (std::string(cmd) + "-a"), base / (std::string(cmd) + "-b")};
    for (const auto& out : outs) {
      std::string line = std::string(HDEF_CLI) + " " + cmd + " --config " + cfgPath + " --out " +
                         out.string() + " --seed 5 > /dev/null";
      o.require(std::system(line.c_str()) == 0, std::string("cli ") + cmd);
    }
    json ra = json::parse(slurp(outs[0] / "report.json")), rb = json::parse(slurp(outs[1] / "report.json"));
    o.require(stripTimings(ra) == stripTimings(rb), std::string("cli report ") + cmd);
    for (const char* csv : {"obstruction.csv", "spectrum.csv"})
      if (fs::exists(outs[0] / csv)) o.require(slurp(outs[0] / csv) == slurp(outs[1] / csv), csv);
    ++compared;
  }
  fs::remove_all(base);
  o.detail << compared << " command/config pairs reproduced exactly (timings excluded)";
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"DGLA axioms", axioms},
      {"Cartan identities", cartan},
      {"flatness equivalence", flatness},
      {"Hodge suite", hodgeSuite},
      {"harmonic dimensions", dimensions},
      {"Kuranishi solver", kuranishi},
      {"gauge expansion", gaugeExpansion},
      {"gauge fixing round trip", roundTrip},
      {"determinism", determinism},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
  if (pick.empty())
    for (int i = 1; i <= int(all.size()); ++i) pick.push_back(i);
  bool ok = true;
  for (int k : pick) {
    if (k < 1 || k > int(all.size())) {
      std::cerr << "no criterion " << k << "\n";
      return 2;
    }
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = all[k - 1].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", k, all[k - 1].title,
                out.detail.str().c_str(), secs);
    std::fflush(stdout);
    ok &= out.pass;
  }
  return ok ? 0 : 1;
}
