#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fewphoton/scenario.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int exit_code(fewphoton::ErrorKind kind) {
  using fewphoton::ErrorKind;
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::SchemaError:
      return kExitSchema;
    case ErrorKind::IoError:
      return kExitIo;
    default:
      return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-photon transport on Bose-Hubbard graphs"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "evaluate a scenario and write the sweep");
  std::string scenario_path;
  std::string out_path;
  std::string format = "csv";
  int threads = 1;
  bool no_markov = false;
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_path, "output file (default: stdout)");
  run->add_option("--format", format, "csv or gnuplot")
      ->check(CLI::IsMember({"csv", "gnuplot"}));
  run->add_option("--threads", threads, "worker threads, 0 = all cores")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--no-markov-check", no_markov, "do not flag Markov violations");

  app.add_subcommand("list-presets", "print preset geometries and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  if (app.got_subcommand("list-presets")) {
    std::cout << fewphoton::list_presets();
    return 0;
  }

  try {
    const auto scenario = fewphoton::load_scenario(scenario_path);
    fewphoton::RunOptions options;
    options.threads = threads;
    options.markov_check = !no_markov;
    options.log = &std::cerr;
    const auto sweep = fewphoton::run(scenario, options);
    const auto fmt = format == "gnuplot" ? fewphoton::OutputFormat::Gnuplot
                                         : fewphoton::OutputFormat::Csv;
    if (out_path.empty()) {
      fewphoton::write_output(std::cout, fmt, scenario, sweep);
      std::cout.flush();
      if (!std::cout) throw fewphoton::Error(fewphoton::ErrorKind::IoError, "stdout");
    } else {
      std::ofstream os(out_path, std::ios::binary);
      if (!os) throw fewphoton::Error(fewphoton::ErrorKind::IoError, "cannot write '" + out_path + "'");
      fewphoton::write_output(os, fmt, scenario, sweep);
      os.close();
      if (!os) throw fewphoton::Error(fewphoton::ErrorKind::IoError, "cannot write '" + out_path + "'");
    }
  } catch (const fewphoton::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 0;
}
