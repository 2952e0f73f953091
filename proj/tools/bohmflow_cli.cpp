// bohmflow command line: run, sweep, validate, presets.
//
// Exit codes: 0 complete success, 1 run or sweep finished incomplete,
// 2 invalid input.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "bohmflow/presets.hpp"
#include "bohmflow/runner.hpp"
#include "bohmflow/scenario.hpp"

namespace fs = std::filesystem;
using namespace bohmflow;

namespace {

// A file argument may also name a preset.
json load_doc(const std::string& arg) {
  if (!fs::is_regular_file(arg)) {
    for (const auto& p : preset_names())
      if (arg == p || arg.rfind("mueller-brown-p0-", 0) == 0) return preset(arg);
  }
  return load_json_file(arg);
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size()) throw ValidationError("values", "'" + tok + "' is not a number");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohmian trajectory and wavepacket simulations"};
  app.require_subcommand(1);
  std::string out_root;
  bool quiet = false;
  app.add_option("--out", out_root, "Output root (default $BOHMFLOW_OUTPUT_ROOT or .)");
  app.add_flag("-q,--quiet", quiet, "No progress messages");

  std::string file;
  auto* run = app.add_subcommand("run", "Run a scenario file or preset name");
  run->add_option("file", file)->required();

  std::string param, values_text;
  unsigned jobs = 1;
  auto* sw = app.add_subcommand("sweep", "Run a scenario for each value of one parameter");
  sw->add_option("file", file)->required();
  sw->add_option("--param", param, "Dotted path of a numeric field, e.g. initial_state.p0")->required();
  sw->add_option("--values", values_text, "Comma-separated values")->required();
  sw->add_option("--jobs", jobs, "Concurrent points")->check(CLI::PositiveNumber);

  auto* val = app.add_subcommand("validate", "Check a scenario without running it");
  val->add_option("file", file)->required();

  auto* pre = app.add_subcommand("presets", "Built-in scenarios");
  pre->require_subcommand(1);
  pre->add_subcommand("list", "Print preset names");
  std::string preset_name;
  auto* emit = pre->add_subcommand("emit", "Print a preset scenario as JSON");
  emit->add_option("name", preset_name)->required();

  CLI11_PARSE(app, argc, argv);

  RunOptions opt;
  if (!out_root.empty()) opt.output_root = out_root;
  if (!quiet) opt.log = &std::cerr;

  try {
    if (*run) {
      const Scenario s = parse_scenario(load_doc(file));
      const RunResult r = run_scenario(s, opt);
      std::cout << (r.output_dir / "manifest.json").string() << '\n';
      if (!r.complete) {
        std::cerr << "run incomplete: " << r.error << '\n';
        return 1;
      }
      return 0;
    }
    if (*sw) {
      const auto values = parse_values(values_text);
      const SweepResult r = sweep(load_doc(file), param, values, opt, jobs);
      std::cout << r.summary_csv.string() << '\n';
      for (std::size_t i = 0; i < r.runs.size(); ++i)
        if (!r.runs[i].complete) std::cerr << param << '=' << values[i] << " failed: " << r.runs[i].error << '\n';
      return r.all_complete ? 0 : 1;
    }
    if (*val) {
      validate_scenario(parse_scenario(load_doc(file)));
      std::cout << "ok\n";
      return 0;
    }
    if (*pre) {
      if (*emit) {
        std::cout << preset(preset_name).dump(2) << '\n';
      } else {
        for (const auto& n : preset_names()) std::cout << n << '\n';
      }
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
