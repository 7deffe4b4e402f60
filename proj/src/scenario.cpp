#include "fewphoton/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fewphoton {

using nlohmann::json;

std::vector<double> Range::points() const {
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(min);
    return out;
  }
  const double n = static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(k + 1 == count ? max : min + (max - min) * (static_cast<double>(k) / n));
  }
  return out;
}

namespace {

// JSON value plus its pointer, for schema diagnostics.
class Node {
 public:
  Node(const json& value, std::string pointer) : value_(value), pointer_(std::move(pointer)) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::SchemaError, (pointer_.empty() ? "/" : pointer_) + ": " + message);
  }

  const json& value() const { return value_; }
  const std::string& pointer() const { return pointer_; }

  bool has(const char* key) const { return value_.contains(key); }

  Node at(const char* key) const {
    if (!value_.is_object()) fail("expected an object");
    auto it = value_.find(key);
    if (it == value_.end()) fail(std::string("missing required field '") + key + "'");
    return Node(*it, pointer_ + "/" + key);
  }

  std::optional<Node> find(const char* key) const {
    if (!value_.is_object()) fail("expected an object");
    auto it = value_.find(key);
    if (it == value_.end()) return std::nullopt;
    return Node(*it, pointer_ + "/" + key);
  }

  std::vector<Node> items() const {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t k = 0; k < value_.size(); ++k) {
      out.emplace_back(value_[k], pointer_ + "/" + std::to_string(k));
    }
    return out;
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [key, _] : value_.items()) {
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; });
      if (!known) fail("unknown field '" + key + "'");
    }
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::size_t index() const {
    if (!value_.is_number_integer() || value_.get<long long>() < 0) {
      fail("expected a non-negative integer");
    }
    return value_.get<std::size_t>();
  }

  int integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<int>();
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  bool boolean() const {
    if (!value_.is_boolean()) fail("expected a boolean");
    return value_.get<bool>();
  }

 private:
  const json& value_;
  std::string pointer_;
};

Range parse_range(const Node& node, bool allow_negative) {
  const auto items = node.items();
  if (items.size() != 3) node.fail("expected [min, max, count]");
  Range r{items[0].number(), items[1].number(), items[2].index()};
  if (r.count == 0) items[2].fail("count must be positive");
  if (r.count > 1 && !(r.max > r.min)) node.fail("max must exceed min");
  if (r.count == 1 && r.max != r.min) node.fail("a single point needs min == max");
  if (!allow_negative && r.min < 0.0) items[0].fail("delays must be non-negative");
  return r;
}

// Preset tables: name -> parameter defaults, in the order they are listed.
struct PresetInfo {
  const char* name;
  const char* summary;
  std::vector<std::pair<const char*, double>> defaults;
};

const std::vector<PresetInfo>& preset_table() {
  static const std::vector<PresetInfo> table = {
      {"kerr", "single Kerr site, ports p1 and p2 on site 0",
       {{"epsilon", 0.0}, {"U", 10.0}, {"gamma", 1.0}}},
      {"dimer-parallel", "two sites, p1 on site 0 and p2 on site 1",
       {{"epsilon", 0.0}, {"U", 10.0}, {"t", 1.0}, {"gamma", 1.0}}},
      {"dimer-perpendicular", "two sites, p1 and p2 both on site 0, site 1 side-coupled",
       {{"epsilon", 0.0}, {"U", 10.0}, {"t", 1.0}, {"gamma", 1.0}}},
      {"dimer-quasilocal", "two sites, p1 and p2 each touch both sites with phase phi",
       {{"epsilon", 0.0}, {"U", 10.0}, {"t", 1.0}, {"gamma", 1.0}, {"phi", 0.0}, {"omega_ref", 0.0}}},
      {"chain", "open chain, p1 on the first and p2 on the last site",
       {{"sites", 10.0}, {"epsilon", 0.0}, {"U", 10.0}, {"t", 1.0}, {"gamma", 1.0}, {"decay", 0.0}}},
      {"ring", "closed ring, p1 on in_site and p2 on out_site",
       {{"sites", 6.0}, {"epsilon", 0.0}, {"U", 10.0}, {"t", 1.0}, {"gamma", 1.0}, {"in_site", 0.0},
        {"out_site", 2.0}, {"decay", 0.0}}},
      {"plane", "square lattice with row phases, p1 and p2 on the corners of row 0",
       {{"width", 8.0}, {"height", 8.0}, {"epsilon", 0.0}, {"U", 10.0}, {"t", 1.0},
        {"phi", 2.0 * kPi / 5.0}, {"gamma", 1.0}, {"decay", 0.01}}},
  };
  return table;
}

const PresetInfo& preset_info(std::string_view name) {
  for (const auto& info : preset_table()) {
    if (name == info.name) return info;
  }
  throw Error(ErrorKind::SchemaError, "unknown preset '" + std::string(name) + "'");
}

class Params {
 public:
  Params(const PresetInfo& info, const PresetParams& given) {
    for (const auto& [k, v] : info.defaults) values_[k] = v;
    for (const auto& [k, v] : given) {
      if (!values_.count(k)) {
        throw Error(ErrorKind::SchemaError,
                    "preset '" + std::string(info.name) + "' has no parameter '" + k + "'");
      }
      if (!std::isfinite(v)) throw Error(ErrorKind::SchemaError, "parameter '" + k + "' is not finite");
      values_[k] = v;
    }
  }

  double operator[](const std::string& key) const { return values_.at(key); }

  std::size_t count(const std::string& key) const {
    const double v = values_.at(key);
    if (v < 0.0 || v != std::floor(v)) {
      throw Error(ErrorKind::SchemaError, "parameter '" + key + "' must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  }

 private:
  std::map<std::string, double> values_;
};

std::vector<Channel> two_ports() { return {{"p1", ChannelRole::Port}, {"p2", ChannelRole::Port}}; }

void add_decay(std::vector<Channel>& channels, std::vector<CouplingPoint>& points,
               std::size_t num_sites, double rate) {
  if (rate == 0.0) return;
  for (std::size_t s = 0; s < num_sites; ++s) {
    points.push_back({.channel = channels.size(), .site = s, .gamma = rate});
    channels.push_back({"decay" + std::to_string(s), ChannelRole::Decay});
  }
}

PresetModel local_two_port(Graph graph, std::size_t site_in, std::size_t site_out, double gamma,
                           double decay) {
  auto channels = two_ports();
  std::vector<CouplingPoint> points = {{.channel = 0, .site = site_in, .gamma = gamma},
                                       {.channel = 1, .site = site_out, .gamma = gamma}};
  add_decay(channels, points, graph.num_sites(), decay);
  ChannelSet cs(std::move(channels), std::move(points));
  return {std::move(graph), std::move(cs)};
}

PresetParams params_from_json(const Node& node) {
  PresetParams out;
  for (const auto& [key, value] : node.value().items()) {
    if (key == "name") continue;
    out[key] = Node(value, node.pointer() + "/" + key).number();
  }
  return out;
}

Graph parse_graph(const Node& node) {
  node.allow({"sites", "links"});
  std::vector<Site> sites;
  for (const auto& s : node.at("sites").items()) {
    s.allow({"epsilon", "U"});
    sites.push_back({s.at("epsilon").number(), s.at("U").number()});
  }
  if (sites.empty()) node.at("sites").fail("a graph needs at least one site");
  std::vector<Link> links;
  if (auto ln = node.find("links")) {
    for (const auto& l : ln->items()) {
      l.allow({"i", "j", "t_re", "t_im"});
      const double re = l.at("t_re").number();
      const double im = l.has("t_im") ? l.at("t_im").number() : 0.0;
      links.push_back({l.at("i").index(), l.at("j").index(), Complex(re, im)});
      if (links.back().i >= sites.size() || links.back().j >= sites.size()) {
        l.fail("site index out of range");
      }
    }
  }
  try {
    return Graph(std::move(sites), std::move(links));
  } catch (const Error& e) {
    node.fail(e.what());
  }
}

CouplingMode parse_mode(const Node& node) {
  const auto s = node.string();
  if (s == "local") return CouplingMode::Local;
  if (s == "quasilocal-positions") return CouplingMode::QuasiLocalPositions;
  if (s == "quasilocal-phases") return CouplingMode::QuasiLocalPhases;
  node.fail("unknown mode '" + s + "'");
}

ChannelSet parse_channels(const Node& node, std::size_t num_sites) {
  node.allow({"mode", "omega_ref", "ports", "decay"});
  const auto mode = node.has("mode") ? parse_mode(node.at("mode")) : CouplingMode::Local;
  const double omega_ref = node.has("omega_ref") ? node.at("omega_ref").number() : 0.0;

  std::vector<Channel> channels;
  std::vector<CouplingPoint> points;
  std::set<std::string> ids;
  const auto ports = node.at("ports").items();
  if (ports.empty()) node.at("ports").fail("at least one port is required");
  for (const auto& port : ports) {
    port.allow({"id", "couplings"});
    const auto id = port.at("id").string();
    if (!ids.insert(id).second) port.at("id").fail("duplicate channel id '" + id + "'");
    const auto couplings = port.at("couplings").items();
    if (couplings.empty()) port.at("couplings").fail("a port needs at least one coupling");
    if (mode == CouplingMode::Local && couplings.size() != 1) {
      port.at("couplings").fail("local mode allows exactly one coupling per port");
    }
    for (const auto& c : couplings) {
      c.allow({"site", "gamma", "g_phase", "x", "phi", "order"});
      CouplingPoint p;
      p.channel = channels.size();
      p.site = c.at("site").index();
      if (p.site >= num_sites) c.at("site").fail("site index out of range");
      p.gamma = c.at("gamma").number();
      if (p.gamma < 0.0) c.at("gamma").fail("rate must be non-negative");
      if (c.has("g_phase")) p.g_phase = c.at("g_phase").number();
      if (c.has("x") && c.has("phi")) c.fail("'x' and 'phi' are mutually exclusive");
      if (mode == CouplingMode::Local && (c.has("x") || c.has("phi") || c.has("order"))) {
        c.fail("local mode takes no 'x', 'phi' or 'order'");
      }
      if (mode == CouplingMode::QuasiLocalPositions) {
        if (c.has("phi")) c.fail("'phi' is not allowed in quasilocal-positions mode");
        if (c.has("order")) c.fail("'order' is not allowed in quasilocal-positions mode");
        p.x = c.at("x").number();
      }
      if (mode == CouplingMode::QuasiLocalPhases) {
        if (c.has("x")) c.fail("'x' is not allowed in quasilocal-phases mode");
        p.phi = c.at("phi").number();
        if (c.has("order")) p.order = c.at("order").integer();
      }
      points.push_back(p);
    }
    channels.push_back({id, ChannelRole::Port});
  }
  if (auto decay = node.find("decay")) {
    for (const auto& d : decay->items()) {
      d.allow({"site", "gamma"});
      CouplingPoint p;
      p.channel = channels.size();
      p.site = d.at("site").index();
      if (p.site >= num_sites) d.at("site").fail("site index out of range");
      p.gamma = d.at("gamma").number();
      if (p.gamma < 0.0) d.at("gamma").fail("rate must be non-negative");
      if (mode == CouplingMode::QuasiLocalPositions) p.x = 0.0;
      if (mode == CouplingMode::QuasiLocalPhases) p.phi = 0.0;
      std::string id = "decay" + std::to_string(channels.size() - ports.size());
      if (!ids.insert(id).second) d.fail("decay id '" + id + "' clashes with a port id");
      points.push_back(p);
      channels.push_back({id, ChannelRole::Decay});
    }
  }
  try {
    return ChannelSet(std::move(channels), std::move(points), mode, omega_ref);
  } catch (const Error& e) {
    node.fail(e.what());
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& info : preset_table()) out.emplace_back(info.name);
  return out;
}

std::string list_presets() {
  std::ostringstream os;
  for (const auto& info : preset_table()) {
    os << info.name << "\n  " << info.summary << "\n ";
    for (const auto& [key, value] : info.defaults) os << ' ' << key << '=' << format_number(value);
    os << '\n';
  }
  return os.str();
}

PresetModel make_preset(std::string_view name, const PresetParams& given) {
  const auto& info = preset_info(name);
  const Params p(info, given);
  try {
    if (name == "kerr") {
      return local_two_port(preset_kerr(p["epsilon"], p["U"]), 0, 0, p["gamma"], 0.0);
    }
    if (name == "dimer-parallel" || name == "dimer-perpendicular") {
      Graph g = preset_chain(2, p["epsilon"], p["U"], p["t"]);
      return local_two_port(std::move(g), 0, name == "dimer-parallel" ? 1 : 0, p["gamma"], 0.0);
    }
    if (name == "dimer-quasilocal") {
      // Channel 1 meets site 0 then site 1, channel 2 meets site 1 then site 0;
      // the phases reproduce Sigma = -2i gamma (M + e^{i phi} b†_1 b_0 + h.c.).
      const double phi = p["phi"];
      const double gamma = p["gamma"];
      std::vector<CouplingPoint> points = {
          {.channel = 0, .site = 0, .gamma = gamma, .phi = 0.0, .order = 0},
          {.channel = 0, .site = 1, .gamma = gamma, .phi = phi, .order = 1},
          {.channel = 1, .site = 1, .gamma = gamma, .phi = 0.0, .order = 0},
          {.channel = 1, .site = 0, .gamma = gamma, .phi = 2.0 * kPi - phi, .order = 1},
      };
      ChannelSet cs(two_ports(), std::move(points), CouplingMode::QuasiLocalPhases, p["omega_ref"]);
      return {preset_chain(2, p["epsilon"], p["U"], p["t"]), std::move(cs)};
    }
    if (name == "chain") {
      const auto n = p.count("sites");
      return local_two_port(preset_chain(n, p["epsilon"], p["U"], p["t"]), 0, n == 0 ? 0 : n - 1,
                            p["gamma"], p["decay"]);
    }
    if (name == "ring") {
      return local_two_port(preset_ring(p.count("sites"), p["epsilon"], p["U"], p["t"]),
                            p.count("in_site"), p.count("out_site"), p["gamma"], p["decay"]);
    }
    // plane
    const auto w = p.count("width");
    const auto h = p.count("height");
    Graph g = preset_square_flux(w, h, p["epsilon"], p["U"], p["t"], p["phi"]);
    return local_two_port(std::move(g), plane_site(w, 0, 0), plane_site(w, 0, w == 0 ? 0 : w - 1),
                          p["gamma"], p["decay"]);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SchemaError) throw;
    throw Error(ErrorKind::SchemaError, "preset '" + std::string(name) + "': " + e.what());
  }
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::to_string(column) + ": " + e.what());
  }

  const Node root(doc, "");
  root.allow({"preset", "graph", "channels", "sweep", "ports", "flux"});
  if (root.has("preset") == root.has("graph")) root.fail("exactly one of 'preset' or 'graph' is required");

  std::string preset;
  std::optional<PresetModel> built;
  std::optional<Graph> graph;
  if (auto pn = root.find("preset")) {
    if (!pn->value().is_object()) pn->fail("expected an object");
    preset = pn->at("name").string();
    try {
      built = make_preset(preset, params_from_json(*pn));
    } catch (const Error& e) {
      pn->fail(e.what());
    }
    graph = built->graph;
  } else {
    graph = parse_graph(root.at("graph"));
  }

  const Node channels_node = root.at("channels");
  std::optional<ChannelSet> channels;
  if (channels_node.value().is_string()) {
    if (channels_node.string() != "preset") channels_node.fail("expected an object or \"preset\"");
    if (!built) channels_node.fail("\"preset\" channels need a preset graph");
    channels = built->channels;
  } else {
    channels = parse_channels(channels_node, graph->num_sites());
  }

  const Node sweep_node = root.at("sweep");
  sweep_node.allow({"delta", "tau", "delta_relative_to_mean_epsilon"});
  SweepSpec sweep;
  sweep.delta = parse_range(sweep_node.at("delta"), true);
  if (auto tau = sweep_node.find("tau")) sweep.tau = parse_range(*tau, false);
  if (auto rel = sweep_node.find("delta_relative_to_mean_epsilon")) {
    sweep.relative_to_mean_epsilon = rel->boolean();
  }

  const Node ports = root.at("ports");
  ports.allow({"in", "out", "out2"});
  auto port_id = [&](const Node& n) {
    const auto id = n.string();
    const auto c = channels->find(id);
    if (!c) n.fail("unknown channel '" + id + "'");
    if (channels->channels()[*c].role != ChannelRole::Port) n.fail("'" + id + "' is a decay channel");
    return id;
  };
  const auto in = port_id(ports.at("in"));
  const auto out = port_id(ports.at("out"));
  std::optional<std::string> out2;
  if (auto o2 = ports.find("out2")) out2 = port_id(*o2);

  double flux = 1.0;
  if (auto f = root.find("flux")) {
    flux = f->number();
    if (flux < 0.0) f->fail("flux must be non-negative");
  }

  return Scenario{preset, std::move(*graph), std::move(*channels), sweep, in, out, out2, flux};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  if (is.bad()) throw Error(ErrorKind::IoError, "cannot read '" + path + "'");
  return parse_scenario(buf.str());
}

ScatteringModel build_model(const Scenario& scenario, const FinalizeOptions& options) {
  return finalize(scenario.graph, scenario.channels, options);
}

CorrelationSweep run(const Scenario& scenario, const RunOptions& options) {
  const auto model = build_model(scenario, options.finalize);
  const auto& cs = model.channels();
  SweepPorts ports{cs.require(scenario.in), cs.require(scenario.out), std::nullopt};
  if (scenario.out2) ports.out2 = cs.require(*scenario.out2);

  SweepOptions so;
  so.carrier_base = scenario.carrier_base();
  so.threads = options.threads;
  so.markov_check = options.markov_check;

  auto result = sweep(model, ports, scenario.sweep.delta.points(),
                      scenario.sweep.tau ? scenario.sweep.tau->points() : std::vector<double>{},
                      scenario.flux, so);

  if (options.log) {
    auto& log = *options.log;
    if (options.markov_check && result.markov.evaluated && !result.markov.pass) {
      log << "warning: Markov conditions violated (max D = " << result.markov.worst_D
          << ", max |lambda - M omega| dx = " << result.markov.worst_lambda_dx << ")\n";
    }
    if (result.fallback_used) {
      log << "warning: defective spectrum, direct resolvent path used\n";
    }
    std::size_t nodes = 0, failures = 0;
    for (auto f : result.flags) {
      nodes += (f & kFlagTransmissionNode) ? 1 : 0;
      failures += (f & kFlagNumericalError) ? 1 : 0;
    }
    if (nodes) {
      log << "warning: " << nodes
          << " points sit on a transmission node; their g2 is the divergent raw ratio\n";
    }
    if (failures) log << "warning: " << failures << " points failed numerically\n";
  }
  return result;
}

void write_csv(std::ostream& os, const Scenario& scenario, const CorrelationSweep& sweep) {
  os << "delta,tau,g1,g2,t_abs2,flags,in,out,out2\n";
  const auto out2 = scenario.out2.value_or("");
  for (std::size_t d = 0; d < sweep.deltas.size(); ++d) {
    for (std::size_t t = 0; t < sweep.taus.size(); ++t) {
      os << format_number(sweep.deltas[d]) << ',' << format_number(sweep.taus[t]) << ','
         << format_number(sweep.g1[d]) << ',' << format_number(sweep.g2_at(d, t)) << ','
         << format_number(sweep.transmission[d]) << ',' << flag_string(sweep.flags_at(d, t)) << ','
         << scenario.in << ',' << scenario.out << ',' << out2 << '\n';
    }
  }
}

void write_gnuplot(std::ostream& os, const Scenario& scenario, const CorrelationSweep& sweep) {
  os << "# delta tau g1 g2 t_abs2 flags in out out2\n";
  const auto out2 = scenario.out2.value_or("-");
  for (std::size_t d = 0; d < sweep.deltas.size(); ++d) {
    if (d > 0) os << '\n';
    for (std::size_t t = 0; t < sweep.taus.size(); ++t) {
      const auto flags = flag_string(sweep.flags_at(d, t));
      os << format_number(sweep.deltas[d]) << ' ' << format_number(sweep.taus[t]) << ' '
         << format_number(sweep.g1[d]) << ' ' << format_number(sweep.g2_at(d, t)) << ' '
         << format_number(sweep.transmission[d]) << ' ' << (flags.empty() ? "-" : flags) << ' '
         << scenario.in << ' ' << scenario.out << ' ' << out2 << '\n';
    }
  }
}

void write_output(std::ostream& os, OutputFormat format, const Scenario& scenario,
                  const CorrelationSweep& sweep) {
  if (format == OutputFormat::Gnuplot) {
    write_gnuplot(os, scenario, sweep);
  } else {
    write_csv(os, scenario, sweep);
  }
}

}  // namespace fewphoton
