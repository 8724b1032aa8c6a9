#include "hdef/app.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using nlohmann::json;

namespace {

json toJson(const py::object& cfg) {
  if (py::isinstance<py::str>(cfg)) return json::parse(cfg.cast<std::string>());
  auto dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(cfg).cast<std::string>());
}

py::object fromJson(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

// A parsed configuration with lazily built Hodge system and Kuranishi series.
class Session {
 public:
  explicit Session(const py::object& cfg) : input_(toJson(cfg)), cfg_(hdef::parseConfig(input_)) {
    T_ = std::make_shared<hdef::Torus>(cfg_.n, cfg_.N, cfg_.dealias);
    hp_ = hdef::buildHiggsConfig(cfg_, T_);
    L_ = std::make_unique<hdef::Dgla>(hp_);
  }

  py::dict validation() const {
    hdef::HiggsValidation v = hdef::validateHiggs(hp_);
    py::dict d;
    d["pass"] = v.pass;
    d["dbar_theta"] = v.dbarTheta;
    d["theta_wedge_theta"] = v.thetaWedgeTheta;
    d["hermitian_defect"] = v.hermitianDefect;
    d["message"] = v.message;
    return d;
  }

  std::vector<int> harmonicDimensions() {
    auto& H = hodge();
    std::vector<int> out;
    for (int d = 0; d <= hdef::HodgeSystem::kMaxDegree; ++d) out.push_back(H.harmonicDim(d));
    return out;
  }
  std::vector<double> spectrum(int deg) { return hodge().spectrum(deg); }
  double gap(int deg) { return hodge().gap(deg); }

  int solveKuranishi(int maxOrder) {
    S_ = std::make_unique<hdef::KuranishiSeries>(hodge(), maxOrder, hdef::buildDirections(cfg_, *L_));
    return S_->parameters();
  }

  py::dict obstruction() const {
    py::dict d;
    for (const auto& [mu, c] : series().obstruction()) {
      std::vector<std::complex<double>> v(c.data(), c.data() + c.size());
      d[py::tuple(py::cast(mu))] = v;
    }
    return d;
  }

  py::dict mcCheck(const std::vector<std::complex<double>>& t) const {
    hdef::McReport m = series().mcCheck(t);
    py::dict d;
    d["mc_residual"] = m.mcResidualNorm;
    d["obstruction"] = m.obstructionNorm;
    return d;
  }

  py::dict fixedPoint(const std::vector<std::complex<double>>& t) const {
    hdef::FixedPointResult r = series().fixedPoint(t);
    py::dict d;
    d["gap"] = r.gap;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["contraction"] = r.contraction;
    return d;
  }

  py::dict roundTrip(const std::vector<std::complex<double>>& t0, double amplitude, std::uint64_t seed) {
    const auto& S = series();
    auto& H = hodge();
    hdef::GradedElement gamma = L_->random(0, 1, seed, amplitude);
    gamma -= H.harmonic(gamma);
    hdef::GradedElement eta = hdef::fullGauge(*L_, S.evaluate(t0), gamma);
    hdef::MatchResult m = hdef::matchToKuranishi(S, eta);
    py::dict d;
    d["t"] = m.t;
    d["ok"] = m.ok;
    d["match_residual"] = m.matchResidual;
    d["gauge_iterations"] = m.fix.iterations;
    d["message"] = m.message;
    return d;
  }

 private:
  json input_;
  hdef::RunConfig cfg_;
  hdef::TorusPtr T_;
  hdef::HiggsPairConfig hp_;
  std::unique_ptr<hdef::Dgla> L_;
  std::unique_ptr<hdef::HodgeSystem> H_;
  std::unique_ptr<hdef::KuranishiSeries> S_;

  hdef::HodgeSystem& hodge() {
    if (!H_) {
      hdef::HodgeOptions o;
      o.kernelRel = cfg_.tol.kernel;
      o.gapRequired = cfg_.tol.gap;
      H_ = std::make_unique<hdef::HodgeSystem>(*L_, o);
    }
    return *H_;
  }
  const hdef::KuranishiSeries& series() const {
    if (!S_) throw std::runtime_error("call solve_kuranishi first");
    return *S_;
  }
};

}  // namespace

PYBIND11_MODULE(_hdef, m) {
  m.doc() = "Deformations of holomorphic Higgs pairs on flat tori";

  m.def("commands", &hdef::commands);
  m.def(
      "run",
      [](const std::string& command, const py::object& cfg, std::optional<std::uint64_t> seed) {
        json j;
        try {
          j = toJson(cfg);
        } catch (const json::exception& e) {
          throw py::value_error(std::string("config is not valid JSON: ") + e.what());
        }
        hdef::RunOutput out;
        {
          py::gil_scoped_release release;
          out = hdef::runCommand(command, j, seed);
        }
        py::dict d;
        d["exit_code"] = out.exitCode;
        d["report"] = fromJson(out.report);
        d["obstruction_csv"] = out.obstructionCsv;
        d["spectrum_csv"] = out.spectrumCsv;
        return d;
      },
      py::arg("command"), py::arg("config"), py::arg("seed") = py::none());

  m.def(
      "check_conventions",
      [](int samples, std::uint64_t seed) {
        hdef::ConventionReport r = hdef::checkConventions(samples, seed);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& [c, w] : r.candidates) out.emplace_back(c.describe(), w);
        return out;
      },
      py::arg("samples") = 2, py::arg("seed") = 11);

  py::class_<Session>(m, "Session")
      .def(py::init<const py::object&>(), py::arg("config"))
      .def("validation", &Session::validation)
      .def("harmonic_dimensions", &Session::harmonicDimensions)
      .def("spectrum", &Session::spectrum, py::arg("degree"))
      .def("gap", &Session::gap, py::arg("degree"))
      .def("solve_kuranishi", &Session::solveKuranishi, py::arg("max_order") = 4)
      .def("obstruction", &Session::obstruction)
      .def("mc_check", &Session::mcCheck, py::arg("t"))
      .def("fixed_point", &Session::fixedPoint, py::arg("t"))
      .def("round_trip", &Session::roundTrip, py::arg("t0"), py::arg("amplitude") = 1e-3,
           py::arg("seed") = 1);
}
