#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fewphoton/coupling.hpp"
#include "fewphoton/lattice.hpp"
#include "fewphoton/scattering.hpp"

namespace fewphoton {

struct Range {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 1;

  /// min + (max - min) * k / (count - 1); a single point is `min`.
  std::vector<double> points() const;
};

struct SweepSpec {
  Range delta;
  std::optional<Range> tau;
  bool relative_to_mean_epsilon = true;
};

/// A validated run description: graph, channels, grid and detectors.
struct Scenario {
  std::string preset;  // empty for inline graphs
  Graph graph;
  ChannelSet channels;
  SweepSpec sweep;
  std::string in;
  std::string out;
  std::optional<std::string> out2;
  double flux = 1.0;

  /// Carrier that delta is measured from.
  double carrier_base() const {
    return sweep.relative_to_mean_epsilon ? graph.mean_epsilon() : channels.omega_ref();
  }
};

/// Throws ParseError (with line and column) or SchemaError (with the JSON
/// pointer of the offending field).
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);  // IoError if unreadable

struct PresetModel {
  Graph graph;
  ChannelSet channels;
};

using PresetParams = std::map<std::string, double>;

/// Standard geometries with their default parameters; unknown names or
/// parameters raise SchemaError.
PresetModel make_preset(std::string_view name, const PresetParams& params = {});
std::vector<std::string> preset_names();
std::string list_presets();

struct RunOptions {
  int threads = 1;
  bool markov_check = true;
  FinalizeOptions finalize;
  std::ostream* log = nullptr;  // receives Markov and node warnings
};

ScatteringModel build_model(const Scenario& scenario, const FinalizeOptions& options = {});
CorrelationSweep run(const Scenario& scenario, const RunOptions& options = {});

enum class OutputFormat { Csv, Gnuplot };

/// One row per (delta, tau): delta,tau,g1,g2,t_abs2,flags,in,out,out2.
void write_csv(std::ostream& os, const Scenario& scenario, const CorrelationSweep& sweep);
/// Whitespace-separated, '#' header, blank line between delta blocks.
void write_gnuplot(std::ostream& os, const Scenario& scenario, const CorrelationSweep& sweep);
void write_output(std::ostream& os, OutputFormat format, const Scenario& scenario,
                  const CorrelationSweep& sweep);

}  // namespace fewphoton
