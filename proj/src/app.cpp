#include "hdef/app.hpp"

#include "hdef/suite.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

namespace hdef {

using nlohmann::json;

namespace {

cd parseComplex(const json& v) {
  if (v.is_number()) return cd(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2) return cd(v[0].get<double>(), v[1].get<double>());
  throw ConfigError("complex numbers are written as [re, im]");
}

json complexJson(cd z) { return json::array({z.real(), z.imag()}); }

Eigen::MatrixXcd parseMatrix(const json& v, int rows, int cols, const std::string& what) {
  if (!v.is_array() || int(v.size()) != rows)
    throw ConfigError(what + ": expected " + std::to_string(rows) + " rows");
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!v[i].is_array() || int(v[i].size()) != cols)
      throw ConfigError(what + ": expected " + std::to_string(cols) + " columns");
    for (int j = 0; j < cols; ++j) m(i, j) = parseComplex(v[i][j]);
  }
  return m;
}

json matrixJson(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complexJson(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

std::vector<int> parseFrequency(const json& v, int n) {
  auto k = v.get<std::vector<int>>();
  if (int(k.size()) != 2 * n) throw ConfigError("frequencies have length 2n");
  return k;
}

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json checkJson(const SuiteResult& s) {
  json j = json::object();
  for (const auto& [name, c] : s.worst)
    j[name] = {{"relative", c.relative()}, {"residual", c.residual}, {"scale", c.scale}};
  return j;
}

double norm2(const std::vector<cd>& t) {
  double s = 0;
  for (cd z : t) s += std::norm(z);
  return std::sqrt(s);
}

json vecJson(const std::vector<cd>& t) {
  json a = json::array();
  for (cd z : t) a.push_back(complexJson(z));
  return a;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"validate", "identities", "hodge",    "kuranishi",
                                             "mc-check", "gauge-fix",  "match"};
  return c;
}

RunConfig parseConfig(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
    throw ConfigError("schema_version must be " + std::to_string(kSchemaVersion));
  RunConfig c;
  const json& g = j.at("geometry");
  c.n = g.at("n").get<int>();
  c.N = g.at("N").get<int>();
  if (c.n < 1 || c.n > 3) throw ConfigError("geometry.n must be 1, 2 or 3");
  if (c.N < 1) throw ConfigError("geometry.N must be positive");
  std::string dl = g.value("dealias", "plain");
  if (dl == "plain") c.dealias = Dealias::Plain;
  else if (dl == "two_thirds") c.dealias = Dealias::TwoThirds;
  else throw ConfigError("geometry.dealias is plain or two_thirds");

  const json& b = j.at("bundle");
  c.r = b.at("r").get<int>();
  if (c.r < 1) throw ConfigError("bundle.r must be positive");
  const json& m = b.value("metric", json{{"kind", "identity"}});
  c.metricKind = m.at("kind").get<std::string>();
  if (c.metricKind == "constant") {
    c.metricMatrix = parseMatrix(m.at("matrix"), c.r, c.r, "metric.matrix");
  } else if (c.metricKind == "modes") {
    for (const json& e : m.at("modes"))
      c.metricModes.push_back({parseFrequency(e.at("k"), c.n),
                               parseMatrix(e.at("matrix"), c.r, c.r, "metric mode"), 0.0});
  } else if (c.metricKind == "exp_diag") {
    c.metricMatrix = m.contains("frame") ? parseMatrix(m.at("frame"), c.r, c.r, "metric.frame")
                                         : Eigen::MatrixXcd::Identity(c.r, c.r);
    const json& rho = m.at("rho");
    if (int(rho.size()) != c.r) throw ConfigError("metric.rho needs one entry per frame vector");
    for (const json& list : rho) {
      std::vector<ModeSpec> modes;
      for (const json& e : list)
        modes.push_back({parseFrequency(e.at("k"), c.n), {}, parseComplex(e.at("c"))});
      c.rho.push_back(modes);
    }
  } else if (c.metricKind != "identity") {
    throw ConfigError("metric.kind is identity, constant, modes or exp_diag");
  }
  if (b.contains("theta")) {
    const json& th = b.at("theta");
    if (int(th.size()) != c.n) throw ConfigError("bundle.theta needs n matrices");
    for (const json& t : th) c.theta.push_back(parseMatrix(t, c.r, c.r, "theta"));
  } else {
    c.theta.assign(c.n, Eigen::MatrixXcd::Zero(c.r, c.r));
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    c.tol.identity = t.value("identity", c.tol.identity);
    c.tol.kernel = t.value("kernel", c.tol.kernel);
    c.tol.gap = t.value("gap", c.tol.gap);
    c.tol.hodge = t.value("hodge", c.tol.hodge);
    c.tol.adjoint = t.value("adjoint", c.tol.adjoint);
    c.tol.matching = t.value("matching", c.tol.matching);
    c.tol.mc = t.value("mc", c.tol.mc);
  }
  if (j.contains("identities")) {
    c.samples = j.at("identities").value("samples", c.samples);
    c.band = j.at("identities").value("band", c.band);
  }
  if (c.band < 0 || c.band > c.N) throw ConfigError("identities.band must lie in [0, N]");
  if (j.contains("kuranishi")) {
    const json& k = j.at("kuranishi");
    c.maxOrder = k.value("max_order", c.maxOrder);
    if (c.maxOrder < 1 || c.maxOrder > 8) throw ConfigError("kuranishi.max_order must lie in [1, 8]");
    if (k.contains("points"))
      for (const json& p : k.at("points")) {
        std::vector<cd> t;
        for (const json& z : p) t.push_back(parseComplex(z));
        c.points.push_back(t);
      }
    if (k.contains("directions"))
      for (const json& d : k.at("directions")) {
        DirectionSpec ds;
        for (const json& e : d.value("end", json::array()))
          ds.end.emplace_back(e.at("mask").get<unsigned>(),
                              parseMatrix(e.at("matrix"), c.r, c.r, "direction matrix"));
        for (const json& e : d.value("tx", json::array())) {
          Eigen::VectorXcd v(c.n);
          const json& a = e.at("vector");
          if (int(a.size()) != c.n) throw ConfigError("direction vector needs n entries");
          for (int i = 0; i < c.n; ++i) v[i] = parseComplex(a[i]);
          ds.tx.emplace_back(e.at("mask").get<unsigned>(), v);
        }
        c.directions.push_back(ds);
      }
  }
  if (j.contains("gauge")) {
    const json& g2 = j.at("gauge");
    c.gaugeMaxIter = g2.value("max_iter", c.gaugeMaxIter);
    c.gaugeDamping = g2.value("damping", c.gaugeDamping);
    c.gaugeAmplitude = g2.value("amplitude", c.gaugeAmplitude);
    c.gaugePoint = g2.value("point", c.gaugePoint);
  }
  c.cacheDir = j.value("cache_dir", std::string());
  c.seed = j.value("seed", std::uint64_t(1));
  return c;
}

std::vector<GradedElement> buildDirections(const RunConfig& c, const Dgla& L) {
  std::vector<GradedElement> dirs;
  for (const DirectionSpec& d : c.directions) {
    GradedElement e = L.zero(1);
    for (const auto& [mask, m] : d.end) e.end += constantMatrixForm(L.torus(), mask, m);
    for (const auto& [mask, v] : d.tx) e.tx += constantMatrixForm(L.torus(), mask, v);
    dirs.push_back(e);
  }
  return dirs;
}

HiggsPairConfig buildHiggsConfig(const RunConfig& c, TorusPtr T) {
  MetricModel mm;
  if (c.metricKind == "constant") {
    mm.kind = MetricModel::Constant;
    mm.matrix = c.metricMatrix;
  } else if (c.metricKind == "modes") {
    mm.kind = MetricModel::Modes;
    mm.modes = Form(T, c.r, c.r);
    auto& comp = mm.modes.at(0u);
    for (const ModeSpec& s : c.metricModes) {
      long idx = T->index(s.k.data());
      if (idx < 0) throw ConfigError("metric mode outside the frequency box");
      for (int a = 0; a < c.r; ++a)
        for (int b = 0; b < c.r; ++b) comp[a * c.r + b][idx] += s.matrix(a, b);
    }
  } else if (c.metricKind == "exp_diag") {
    mm.kind = MetricModel::ExpDiag;
    mm.matrix = c.metricMatrix;
    for (const auto& list : c.rho) {
      Coeffs f = zeroField(*T);
      for (const ModeSpec& s : list) {
        if (T->index(s.k.data()) < 0) throw ConfigError("rho mode outside the frequency box");
        f += realMode(*T, s.k, s.value);
      }
      mm.rho.push_back(f);
    }
  }
  return makeConfig(T, c.r, mm, c.theta);
}

namespace {

struct Context {
  RunConfig cfg;
  json input;
  json report;
  json timings = json::object();
  RunOutput out;
  TorusPtr T;
  std::unique_ptr<Dgla> L;
  std::unique_ptr<HodgeSystem> H;
  std::unique_ptr<KuranishiSeries> S;
  bool ok = true;

  void fail(const std::string& why) {
    ok = false;
    report["failures"].push_back(why);
  }

  json tolerancesJson() const {
    const Tolerances& t = cfg.tol;
    return {{"identity", t.identity}, {"kernel", t.kernel},     {"gap", t.gap},
            {"hodge", t.hodge},       {"adjoint", t.adjoint},   {"matching", t.matching},
            {"mc", t.mc}};
  }

  void buildHodge() {
    if (H) return;
    auto t0 = std::chrono::steady_clock::now();
    HodgeOptions opts;
    opts.kernelRel = cfg.tol.kernel;
    opts.gapRequired = cfg.tol.gap;
    opts.cacheDir = cfg.cacheDir;
    opts.cacheKey = input.at("geometry").dump() + input.at("bundle").dump() +
                    L->convention().describe();
    H = std::make_unique<HodgeSystem>(*L, opts);
    timings["hodge"] = seconds(t0);
    json dims = json::object();
    for (int d = 0; d <= HodgeSystem::kMaxDegree; ++d)
      dims["dimH" + std::to_string(d)] = H->harmonicDim(d);
    report["dimensions"] = dims;
  }

  void buildSeries() {
    if (S) return;
    buildHodge();
    auto t0 = std::chrono::steady_clock::now();
    S = std::make_unique<KuranishiSeries>(*H, cfg.maxOrder, buildDirections(cfg, *L));
    timings["kuranishi"] = seconds(t0);
  }

  std::vector<std::vector<cd>> points() const {
    if (!cfg.points.empty()) {
      for (const auto& p : cfg.points)
        if (int(p.size()) != S->parameters())
          throw ConfigError("kuranishi.points must have " + std::to_string(S->parameters()) +
                            " coordinates");
      return cfg.points;
    }
    std::vector<cd> t(S->parameters(), 0.0);
    t[0] = 0.01;
    return {t};
  }
};

void runValidate(Context&) {}

void runIdentities(Context& c) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult a = dglaAxiomSuite(*c.L, c.cfg.samples, c.cfg.band, c.cfg.seed);
  SuiteResult b = cartanSuite(*c.L, c.cfg.samples, c.cfg.band, c.cfg.seed + 1);
  SuiteResult f = flatnessSuite(*c.L, c.cfg.samples, c.cfg.band, c.cfg.seed + 2);
  c.timings["identities"] = seconds(t0);
  c.report["identities"] = {{"dgla", checkJson(a)}, {"cartan", checkJson(b)}, {"flatness", checkJson(f)}};
  double worst = std::max({a.worstRelative(), b.worstRelative(), f.worstRelative()});
  c.report["worst_relative_residual"] = worst;
  c.report["evaluations"] = a.evaluations + b.evaluations + f.evaluations;
  if (worst > c.cfg.tol.identity) c.fail("identity residual above tolerance");

  t0 = std::chrono::steady_clock::now();
  ConventionReport cr = checkConventions();
  c.timings["resolver"] = seconds(t0);
  json cand = json::array();
  for (const auto& [conv, w] : cr.candidates)
    cand.push_back({{"convention", conv.describe()}, {"worst_relative", w}});
  c.report["convention_resolver"] = {{"candidates", cand}, {"passing", cr.passing.size()}};
  if (cr.passing.size() != 1 || !(cr.passing[0] == c.L->convention()))
    c.fail("the sign-convention resolver does not single out the convention in use");
}

void runHodge(Context& c) {
  c.buildHodge();
  const HodgeSystem& H = *c.H;
  json deg = json::array();
  std::ostringstream csv;
  csv << "degree,index,eigenvalue\n";
  for (int d = 0; d <= HodgeSystem::kMaxDegree; ++d) {
    json e = {{"degree", d},
              {"dim", H.dim(d)},
              {"harmonic_dim", H.harmonicDim(d)},
              {"gap", H.gap(d)},
              {"threshold", H.threshold(d)},
              {"self_adjoint_defect", H.selfAdjointDefect(d)},
              {"min_eigenvalue", H.minEigenvalue(d)}};
    if (d < HodgeSystem::kMaxDegree) e["d_squared_defect"] = H.dSquaredDefect(d);
    deg.push_back(e);
    auto sp = H.spectrum(d);
    for (std::size_t i = 0; i < sp.size(); ++i) csv << d << ',' << i << ',' << fmt(sp[i]) << '\n';
  }
  c.out.spectrumCsv = csv.str();
  c.report["degrees"] = deg;
  c.report["reliable"] = H.reliable();
  c.report["cache"] = {{"file", H.cacheFile()}, {"loaded", H.loadedFromCache()}};
  if (!H.reliable()) c.fail("eigenvalue gap below the required ratio");

  const Dgla& L = *c.L;
  json res = json::array();
  double worstRec = 0, worstGd = 0, worstAdj = 0;
  for (int d = 0; d <= 2; ++d) {
    Eigen::VectorXcd v = H.toVector(L.random(d, c.cfg.band, c.cfg.seed * 31 + d));
    Eigen::VectorXcd w = H.toVector(L.random(d + 1, c.cfg.band, c.cfg.seed * 37 + d));
    Eigen::VectorXcd rec = H.harmonic(d, v) + H.laplacian(d, H.green(d, v));
    double r1 = (rec - v).norm() / std::max(v.norm(), 1e-300);
    Eigen::VectorXcd dv = H.d(d, v);
    double r2 = (H.green(d + 1, dv) - H.d(d, H.green(d, v))).norm() / std::max(v.norm(), 1e-300);
    cd a = H.inner(d + 1, dv, w), b = H.inner(d, v, H.dStar(d + 1, w));
    double scale = std::sqrt(H.inner(d + 1, dv, dv).real() * H.inner(d + 1, w, w).real());
    double r3 = std::abs(a - b) / std::max(scale, 1e-300);
    res.push_back({{"degree", d}, {"reconstruction", r1}, {"green_commutes_with_d", r2}, {"adjoint", r3}});
    worstRec = std::max(worstRec, r1);
    worstGd = std::max(worstGd, r2);
    worstAdj = std::max(worstAdj, r3);
  }
  c.report["decomposition"] = res;
  if (worstRec > c.cfg.tol.hodge) c.fail("x != Hx + Delta G x");
  if (worstGd > c.cfg.tol.hodge) c.fail("G does not commute with d");
  if (worstAdj > c.cfg.tol.adjoint) c.fail("d* is not the adjoint of d");
}

json equationsJson(const KuranishiSeries& S) {
  json eqs = json::array();
  for (const PolynomialEquation& e : kuranishiEquations(S)) {
    json terms = json::array();
    for (const auto& [mu, coef] : e.coefficients)
      terms.push_back({{"exponents", mu}, {"coefficient", complexJson(coef)}});
    eqs.push_back({{"h2_index", e.h2Index}, {"terms", terms}});
  }
  return eqs;
}

void runKuranishi(Context& c) {
  c.buildSeries();
  const KuranishiSeries& S = *c.S;
  json orders = json::array();
  for (int nu = 1; nu <= S.maxOrder(); ++nu) {
    int count = 0;
    for (const auto& [mu, e] : S.terms()) count += totalDegree(mu) == nu;
    json o = {{"order", nu}, {"nonzero_terms", count}};
    if (nu >= 2) {
      double rr = S.recursionResidual(nu);
      o["recursion_residual"] = rr;
      o["dstar_residual"] = S.dStarResidual(nu);
      if (rr > c.cfg.tol.identity) c.fail("recursion residual above tolerance at order " + std::to_string(nu));
    }
    orders.push_back(o);
  }
  c.report["series"] = {{"parameters", S.parameters()}, {"max_order", S.maxOrder()}, {"orders", orders}};
  c.report["obstruction_dim"] = S.obstructionDim();
  c.report["equations"] = equationsJson(S);

  std::ostringstream csv;
  for (int j = 0; j < S.parameters(); ++j) csv << 'e' << (j + 1) << ',';
  csv << "h2_index,re,im\n";
  for (int nu = 2; nu <= S.maxOrder() + 1; ++nu)
    for (const Monomial& mu : monomialsOfDegree(S.parameters(), nu))
      for (int i = 0; i < S.obstructionDim(); ++i) {
        auto it = S.obstruction().find(mu);
        cd v = it == S.obstruction().end() ? cd(0) : it->second[i];
        for (int e : mu) csv << e << ',';
        csv << i << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
      }
  c.out.obstructionCsv = csv.str();

  json evals = json::array();
  for (const auto& t : c.points()) {
    FixedPointResult fp = S.fixedPoint(t);
    evals.push_back({{"t", vecJson(t)},
                     {"fixed_point_gap", fp.gap},
                     {"iterations", fp.iterations},
                     {"converged", fp.converged},
                     {"diverged", fp.diverged},
                     {"contraction_factor", fp.contraction}});
    if (fp.diverged || !fp.converged) c.fail("fixed-point iteration did not converge: |t| too large");
  }
  c.report["evaluations"] = evals;
}

void runMcCheck(Context& c) {
  c.buildSeries();
  const KuranishiSeries& S = *c.S;
  json pts = json::array();
  for (const auto& t : c.points()) {
    McReport m = S.mcCheck(t);
    double poly = S.obstructionAt(t).norm();
    bool onS = m.obstructionNorm <= c.cfg.tol.mc;
    pts.push_back({{"t", vecJson(t)},
                   {"mc_residual", m.mcResidualNorm},
                   {"obstruction", m.obstructionNorm},
                   {"obstruction_polynomial", poly},
                   {"on_kuranishi_space", onS}});
    if (onS && m.mcResidualNorm > c.cfg.tol.mc)
      c.fail("obstruction vanishes but the Maurer-Cartan residual does not");
    if (m.mcResidualNorm < 0.5 * m.obstructionNorm * (1 - 1e-9))
      c.fail("Maurer-Cartan residual below half the harmonic component");
  }
  c.report["points"] = pts;
}

// the element handled by gauge-fix and match: a Kuranishi point moved by a random gauge
std::pair<GradedElement, std::vector<cd>> gaugedPoint(Context& c) {
  c.buildSeries();
  auto pts = c.points();
  if (c.cfg.gaugePoint < 0 || c.cfg.gaugePoint >= int(pts.size()))
    throw ConfigError("gauge.point does not name an evaluation point");
  std::vector<cd> t0 = pts[c.cfg.gaugePoint];
  GradedElement gamma = c.L->random(0, c.cfg.band, c.cfg.seed * 1009 + 17, c.cfg.gaugeAmplitude);
  gamma -= c.H->harmonic(gamma);
  GradedElement eta = fullGauge(*c.L, c.S->evaluate(t0), gamma);
  c.report["gauge_parameter_norm"] = c.H->norm(gamma);
  c.report["t0"] = vecJson(t0);
  c.report["input_mc_residual"] = c.H->norm(c.L->mcResidual(eta));
  return {eta, t0};
}

GaugeFixOptions gaugeOptions(const Context& c) {
  GaugeFixOptions o;
  o.maxIter = c.cfg.gaugeMaxIter;
  o.damping = c.cfg.gaugeDamping;
  o.tol = c.cfg.tol.mc;
  return o;
}

void runGaugeFix(Context& c) {
  auto [eta, t0] = gaugedPoint(c);
  auto t1 = std::chrono::steady_clock::now();
  GaugeFixResult r = gaugeFix(*c.H, eta, gaugeOptions(c));
  c.timings["gauge_fix"] = seconds(t1);
  c.report["gauge_fix"] = {{"iterations", r.iterations},
                           {"residual", r.residual},
                           {"converged", r.converged},
                           {"history", r.history},
                           {"gamma_norm", c.H->norm(r.gamma)},
                           {"gamma_harmonic_part", c.H->norm(c.H->harmonic(r.gamma))}};
  if (!r.converged) c.fail("gauge fixing did not converge");
}

void runMatch(Context& c) {
  auto [eta, t0] = gaugedPoint(c);
  MatchOptions mo;
  mo.matchTol = c.cfg.tol.matching;
  mo.mcTol = c.cfg.tol.mc;
  mo.obstructionTol = c.cfg.tol.mc;
  mo.gauge = gaugeOptions(c);
  auto t1 = std::chrono::steady_clock::now();
  MatchResult m = matchToKuranishi(*c.S, eta, mo);
  c.timings["match"] = seconds(t1);
  std::vector<cd> diff(t0.size());
  for (std::size_t j = 0; j < t0.size(); ++j) diff[j] = m.t[j] - t0[j];
  double err = norm2(diff), bound = c.cfg.tol.matching * norm2(t0) + 1e-9;
  c.report["match"] = {{"t", vecJson(m.t)},
                       {"t_error", err},
                       {"t_error_bound", bound},
                       {"match_residual", m.matchResidual},
                       {"outside_span", m.outsideSpan},
                       {"obstruction", m.obstructionNorm},
                       {"gauge_iterations", m.fix.iterations},
                       {"gauge_residual", m.fix.residual},
                       {"message", m.message}};
  if (!m.ok) c.fail("match failed: " + m.message);
  if (err > bound) c.fail("recovered parameters differ from the original point");
}

}  // namespace

RunOutput runCommand(const std::string& command, const json& config,
                     std::optional<std::uint64_t> seed) {
  Context c;
  auto t0 = std::chrono::steady_clock::now();
  c.report["command"] = command;
  c.report["schema_version"] = kSchemaVersion;
  c.report["failures"] = json::array();
  auto finish = [&](int code) {
    c.timings["total"] = seconds(t0);
    c.report["timings"] = c.timings;
    c.report["exit_code"] = code;
    c.report["status"] = code == kOk ? "pass" : "fail";
    c.out.report = c.report;
    c.out.exitCode = code;
    return c.out;
  };
  const auto& cmds = commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) {
    c.report["error"] = "unknown command " + command;
    return finish(kParseError);
  }
  try {
    c.cfg = parseConfig(config);
    if (seed) c.cfg.seed = *seed;
  } catch (const std::exception& e) {
    c.report["error"] = std::string("config: ") + e.what();
    return finish(kParseError);
  }
  c.input = config;
  c.report["config"] = config;
  c.report["seed"] = c.cfg.seed;
  c.report["tolerances"] = c.tolerancesJson();
  Convention conv;
  c.report["convention"] = {
      {"description", conv.describe()},
      {"differential", "d = dbar + [theta, .] + curvature coupling + {dK, phi⌟}theta"},
      {"maurer_cartan", "d a - 1/2 [a, a] = 0"}};
  try {
    c.T = std::make_shared<Torus>(c.cfg.n, c.cfg.N, c.cfg.dealias);
    HiggsPairConfig hp = buildHiggsConfig(c.cfg, c.T);
    HiggsValidation v = validateHiggs(hp);
    c.report["validation"] = {{"dbar_theta", v.dbarTheta},
                              {"theta_wedge_theta", v.thetaWedgeTheta},
                              {"hermitian_defect", v.hermitianDefect},
                              {"min_eigenvalue", v.minEigenvalue},
                              {"max_condition", v.maxCondition},
                              {"pass", v.pass},
                              {"message", v.message}};
    if (!v.pass) {
      c.report["error"] = "validation: " + v.message;
      return finish(kValidationError);
    }
    c.L = std::make_unique<Dgla>(hp, conv);
  } catch (const ConfigError& e) {
    c.report["error"] = std::string("config: ") + e.what();
    return finish(kParseError);
  } catch (const std::exception& e) {
    c.report["error"] = std::string("validation: ") + e.what();
    return finish(kValidationError);
  }
  try {
    if (command == "validate") runValidate(c);
    else if (command == "identities") runIdentities(c);
    else if (command == "hodge") runHodge(c);
    else if (command == "kuranishi") runKuranishi(c);
    else if (command == "mc-check") runMcCheck(c);
    else if (command == "gauge-fix") runGaugeFix(c);
    else if (command == "match") runMatch(c);
  } catch (const ConfigError& e) {
    c.report["error"] = std::string("config: ") + e.what();
    return finish(kParseError);
  } catch (const std::exception& e) {
    c.report["error"] = std::string("numerical: ") + e.what();
    return finish(kNumericalError);
  }
  return finish(c.ok ? kOk : kNumericalError);
}

}  // namespace hdef
