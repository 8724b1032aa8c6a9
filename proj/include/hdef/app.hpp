#pragma once

#include "hdef/gauge.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdef {

constexpr int kSchemaVersion = 1;

enum ExitCode { kOk = 0, kParseError = 2, kValidationError = 3, kNumericalError = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double identity = 1e-10;
  double kernel = 1e-8;
  double gap = 1e4;
  double hodge = 1e-8;
  double adjoint = 1e-10;
  double matching = 1e-6;
  double mc = 1e-8;
};

struct ModeSpec {
  std::vector<int> k;
  Eigen::MatrixXcd matrix;  // mode coefficient (metric modes)
  cd value = 0;             // scalar coefficient (exp-diagonal exponents)
};

struct DirectionSpec {
  std::vector<std::pair<unsigned, Eigen::MatrixXcd>> end;  // constant End components
  std::vector<std::pair<unsigned, Eigen::VectorXcd>> tx;   // constant vector-field components
};

struct RunConfig {
  int n = 1, N = 4;
  Dealias dealias = Dealias::Plain;
  int r = 1;
  std::string metricKind = "identity";  // identity | constant | modes | exp_diag
  Eigen::MatrixXcd metricMatrix;
  std::vector<ModeSpec> metricModes;
  std::vector<std::vector<ModeSpec>> rho;
  std::vector<Eigen::MatrixXcd> theta;
  Tolerances tol;
  int samples = 4;
  int band = 1;
  int maxOrder = 4;
  std::vector<std::vector<cd>> points;
  std::vector<DirectionSpec> directions;
  int gaugeMaxIter = 50;
  double gaugeDamping = 1.0;
  double gaugeAmplitude = 1e-3;
  int gaugePoint = 0;
  std::string cacheDir;
  std::uint64_t seed = 1;
};

// throws ConfigError (or nlohmann exceptions) on malformed input
RunConfig parseConfig(const nlohmann::json& j);
HiggsPairConfig buildHiggsConfig(const RunConfig& c, TorusPtr T);
// explicit Kuranishi directions; empty selects the harmonic basis
std::vector<GradedElement> buildDirections(const RunConfig& c, const Dgla& L);

struct RunOutput {
  int exitCode = kOk;
  nlohmann::json report;  // includes "timings"; everything else is deterministic
  std::string obstructionCsv, spectrumCsv;
};

const std::vector<std::string>& commands();
RunOutput runCommand(const std::string& command, const nlohmann::json& config,
                     std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace hdef
