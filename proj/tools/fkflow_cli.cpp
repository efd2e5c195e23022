// Experiment runner: loads a JSON config, executes it through the fkflow C
// API, writes the CSV/JSON artifacts, and exits 0 only when every check in
// the report passed.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fkflow/fkflow.h"

namespace {

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto secs = time_point_cast<seconds>(now);
  const auto ms = duration_cast<milliseconds>(now - secs).count();
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d%02d%02dT%02d%02d%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

int fail(const std::string& message) {
  std::cerr << "fkflow: " << message << "\n";
  const char* detail = fk_last_error();
  if (detail && *detail) std::cerr << "  " << detail << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fkflow experiment runner"};
  std::string config_path;
  std::string output_dir_flag;
  unsigned long long seed = 0;
  bool seed_set = false;
  app.add_option("config", config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--output-dir", output_dir_flag, "directory for CSV/JSON outputs");
  app.add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
    seed_set = true;
  });
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path);
  if (!in) return fail("cannot read " + config_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string config_json = buffer.str();

  fk_run_options options{};
  options.has_seed = seed_set ? 1 : 0;
  options.seed = seed;

  fk_result* result = nullptr;
  if (fk_experiment_run(config_json.c_str(), &options, &result) != FK_OK)
    return fail("experiment failed");

  const char* summary = nullptr;
  fk_result_summary(result, &summary);
  std::cout << summary;

  const char* config_dir = nullptr;
  fk_result_output_dir(result, &config_dir);
  std::filesystem::path out_dir =
      !output_dir_flag.empty() ? output_dir_flag
                               : (config_dir && *config_dir ? config_dir : ".");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    fk_result_free(result);
    return fail("cannot create output directory " + out_dir.string());
  }

  // The timestamp lives in the filename only; payloads stay byte-stable for
  // a fixed config and seed.
  const std::string stamp = utc_timestamp();
  std::string experiment = "experiment";
  {
    // Artifact names are prefixed "<experiment>-<timestamp>-"; recover the
    // experiment name from the report artifact-free route: parse cheaply.
    const auto pos = config_json.find("\"experiment\"");
    if (pos != std::string::npos) {
      const auto colon = config_json.find(':', pos);
      const auto open = config_json.find('"', colon);
      const auto close = config_json.find('"', open + 1);
      if (open != std::string::npos && close != std::string::npos)
        experiment = config_json.substr(open + 1, close - open - 1);
    }
  }

  size_t count = 0;
  fk_result_artifact_count(result, &count);
  for (size_t i = 0; i < count; ++i) {
    const char* name = nullptr;
    const char* content = nullptr;
    if (fk_result_artifact(result, i, &name, &content) != FK_OK) continue;
    const std::filesystem::path path = out_dir / (experiment + "-" + stamp + "-" + name);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      fk_result_free(result);
      return fail("cannot write " + path.string());
    }
    out << content;
    std::cout << "wrote " << path.string() << "\n";
  }

  int passed = 0;
  fk_result_passed(result, &passed);
  fk_result_free(result);
  return passed ? 0 : 1;
}
