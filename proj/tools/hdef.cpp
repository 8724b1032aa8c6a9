#include "hdef/app.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

void writeFile(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deformations of holomorphic Higgs pairs on flat tori"};
  std::string command, configPath, outDir = ".";
  std::uint64_t seed = 0;
  app.add_option("command", command, "validate | identities | hodge | kuranishi | mc-check | gauge-fix | match")
      ->required()
      ->check(CLI::IsMember(hdef::commands()));
  app.add_option("--config", configPath, "JSON run configuration")->required();
  app.add_option("--out", outDir, "output directory");
  auto* seedOpt = app.add_option("--seed", seed, "overrides the seed in the config");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hdef::kParseError;
  }

  nlohmann::json cfg;
  {
    std::ifstream f(configPath);
    if (!f) {
      std::cerr << "cannot read " << configPath << "\n";
      return hdef::kParseError;
    }
    try {
      f >> cfg;
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "config parse error: " << e.what() << "\n";
      return hdef::kParseError;
    }
  }

  std::optional<std::uint64_t> s;
  if (*seedOpt) s = seed;
  hdef::RunOutput out = hdef::runCommand(command, cfg, s);

  try {
    fs::create_directories(outDir);
    writeFile(fs::path(outDir) / "report.json", out.report.dump(2) + "\n");
    if (!out.obstructionCsv.empty()) writeFile(fs::path(outDir) / "obstruction.csv", out.obstructionCsv);
    if (!out.spectrumCsv.empty()) writeFile(fs::path(outDir) / "spectrum.csv", out.spectrumCsv);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return hdef::kNumericalError;
  }

  std::cout << command << ": " << out.report.value("status", "fail");
  if (out.report.contains("error")) std::cout << " (" << out.report["error"].get<std::string>() << ")";
  for (const auto& f : out.report["failures"]) std::cout << "\n  " << f.get<std::string>();
  std::cout << "\n";
  return out.exitCode;
}
