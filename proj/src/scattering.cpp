#include "fewphoton/scattering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace fewphoton {

namespace {

constexpr Complex kMinusTwoPiI{0.0, -2.0 * kPi};

std::shared_ptr<SectorData> build_sectors(const Graph& graph, const ChannelSet& channels,
                                          double omega0, bool spectral) {
  auto s = std::make_shared<SectorData>();
  s->omega0 = omega0;
  for (int m = 0; m <= kMaxPhotons; ++m) {
    s->bases.emplace_back(graph.num_sites(), m);
    auto h = hamiltonian_sector(graph, s->bases.back());
    h.data += self_energy(channels, s->bases.back(), omega0).data;
    s->heff.push_back(std::move(h.data));
    s->eig.emplace_back();
    s->fallback_reason.emplace_back();
    if (!spectral) continue;
    try {
      s->eig.back() = biorth_eig(s->heff.back(), m);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DefectiveMatrix) throw;
      s->fallback_reason.back() = e.what();
    }
  }

  const auto nc = channels.num_channels();
  s->lower1.resize(nc);
  s->lower2.resize(nc);
  s->rhat.resize(nc);
  s->uhat.resize(nc);
  s->bhat.resize(nc);
  s->chat.resize(nc);
  for (std::size_t c : channels.ports()) {
    s->lower1[c] = collective_operator(channels, c, s->bases[1], s->bases[0], omega0).data.row(0);
    s->lower2[c] = collective_operator(channels, c, s->bases[2], s->bases[1], omega0).data;
    if (!s->spectral()) continue;
    const auto& e1 = *s->eig[1];
    const auto& e2 = *s->eig[2];
    s->rhat[c] = s->lower1[c] * e1.right;
    s->uhat[c] = e1.left * s->raise1(c);
    s->bhat[c] = e1.left * s->lower2[c] * e2.right;
    s->chat[c] = e2.left * s->lower2[c].adjoint() * e1.right;
  }
  return s;
}

void require_port(const ScatteringModel& model, std::size_t channel) {
  const auto& cs = model.channels();
  if (channel >= cs.num_channels() || cs.channels()[channel].role != ChannelRole::Port) {
    throw Error(ErrorKind::UnknownChannel, "channel " + std::to_string(channel) + " is not a port");
  }
}

// Resolvent and propagator on one sector, through the eigensystem or dense
// solves depending on the requested path.
class Route {
 public:
  Route(const SectorData& s, SolvePath path) : s_(s), path_(path) {}

  bool spectral(int m) const {
    if (path_ == SolvePath::Direct) return false;
    if (s_.eig[m]) return true;
    if (path_ == SolvePath::Spectral) {
      throw Error(ErrorKind::DefectiveMatrix,
                  "no eigensystem for sector " + std::to_string(m) + ": " + s_.fallback_reason[m]);
    }
    return false;
  }

  Vector resolve(int m, Complex energy, const Vector& v) const {
    if (spectral(m)) return apply_resolvent(*s_.eig[m], energy, v);
    return solve_resolvent(s_.heff[m], energy, v);
  }

  Vector propagate(int m, double tau, double omega0, const Vector& v) const {
    if (tau == 0.0) return v;
    if (spectral(m)) return apply_propagator(*s_.eig[m], tau, omega0, v);
    return direct_propagator(SectorMatrix{m, m, s_.heff[m]}, tau, omega0).data * v;
  }

 private:
  const SectorData& s_;
  SolvePath path_;
};

Complex contract(const RowVector& r, const Vector& v) { return (r * v).value(); }

// Ratio of the summed magnitudes of the eigen-sum terms in s1[c][in] to the
// magnitude of the result.
double cancellation(const SectorData& s, double omega0, std::size_t in, std::size_t c) {
  const auto& e = *s.eig[1];
  const Vector y = divide_by_gaps(e.left * s.raise1(in), e.lambdas, omega0);
  const RowVector r = s.lower1[c] * e.right;
  double scale = c == in ? 1.0 : 0.0;
  Complex amp = 0.0;
  for (Eigen::Index l = 0; l < y.size(); ++l) {
    scale += 2.0 * kPi * std::abs(r(l) * y(l));
    amp += r(l) * y(l);
  }
  const double result = std::abs((c == in ? 1.0 : 0.0) + kMinusTwoPiI * amp);
  return result > 0.0 ? scale / result : std::numeric_limits<double>::infinity();
}

// g2 divides by s_a s_b, so an eigen-sum that cancels down to a small
// transmission loses about eps * kappa_a * kappa_b relative accuracy. Auto
// routes such carriers through dense solves.
SolvePath g2_path(const SectorData& s, SolvePath path, double omega0, std::size_t in,
                  std::size_t a, std::size_t b) {
  if (path != SolvePath::Auto || !s.eig[1]) return path;
  try {
    const double loss = std::numeric_limits<double>::epsilon() * cancellation(s, omega0, in, a) *
                        cancellation(s, omega0, in, b);
    return loss > kCancellationLimit ? SolvePath::Direct : path;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::PoleHit) throw;
    return SolvePath::Direct;
  }
}

// Shared intermediate states for one input port at one carrier:
// single = G1(w0) b~†_in |0>, pair_b = b~_b G2(2 w0) b~†_in single.
struct Chain {
  Vector single;
  Vector pair;
};

Chain make_chain(const SectorData& s, const Route& route, double omega0, std::size_t in,
                 std::size_t b) {
  Chain chain;
  chain.single = route.resolve(1, omega0, s.raise1(in));
  const Vector two = route.resolve(2, 2.0 * omega0, s.lower2[in].adjoint() * chain.single);
  chain.pair = s.lower2[b] * two;
  return chain;
}

G2Value g2_from_chain(const SectorData& s, const Route& route, const Chain& chain, double omega0,
                      std::size_t in, std::size_t a, std::size_t b, double tau) {
  const Complex amp_a = contract(s.lower1[a], chain.single);
  const Complex amp_b = contract(s.lower1[b], chain.single);
  const Complex s_a = (a == in ? 1.0 : 0.0) + kMinusTwoPiI * amp_a;
  const Complex s_b = (b == in ? 1.0 : 0.0) + kMinusTwoPiI * amp_b;
  const Vector connected = chain.pair - chain.single * amp_b;
  const Complex corr = 4.0 * kPi * kPi * contract(s.lower1[a], route.propagate(1, tau, omega0, connected));

  G2Value out;
  out.node = std::abs(s_a) <= kNodeThreshold || std::abs(s_b) <= kNodeThreshold;
  if (out.node) {
    out.value = std::norm(corr) / std::norm(s_a * s_b);
  } else {
    out.value = std::norm(1.0 - corr / (s_a * s_b));
  }
  return out;
}

const SectorData& spectral_sectors(const SectorData& s) {
  if (!s.spectral()) {
    throw Error(ErrorKind::DefectiveMatrix,
                "eigen-sum formula needs spectral sectors: " + s.fallback_reason[1] +
                    s.fallback_reason[2]);
  }
  return s;
}

// Unsymmetrised principal-value element from explicit eigen-sums.
Complex t2_spectral(const SectorData& s, std::size_t o1, std::size_t o2, std::size_t i1,
                    std::size_t i2, double e1p, double e2p, double e1, double e2) {
  const auto& l1 = s.eig[1]->lambdas;
  const auto& l2 = s.eig[2]->lambdas;
  const Complex total = e1 + e2;

  const Vector left = divide_by_gaps(s.rhat[o1].transpose(), l1, e1p);
  const Vector right = divide_by_gaps(s.uhat[i1], l1, e1);

  const Vector mid = divide_by_gaps(s.chat[i2] * right, l2, total);
  const Complex first = (left.transpose() * (s.bhat[o2] * mid)).value();

  Complex second = 0.0;
  for (Eigen::Index lp = 0; lp < l1.size(); ++lp) {
    const Complex outer = left(lp) * s.uhat[i2](lp);
    for (Eigen::Index l = 0; l < l1.size(); ++l) {
      const Complex weight = outer * s.rhat[o2](l) * right(l);
      const Complex den = (e2p - l1(l)) * (e2 - l1(lp));
      if (std::abs(den) <= kPoleDistance) {
        // dark single-photon states carry no weight on their own pole
        if (std::abs(weight) <= kPoleDistance * kPoleDistance) continue;
        throw Error(ErrorKind::PoleHit, "energy on eigenvalue");
      }
      second += weight * (total - l1(lp) - l1(l)) / den;
    }
  }
  return first - 0.5 * second;
}

// Same element in operator form; the second term is split by partial
// fractions using e1p + e2p = e1 + e2.
Complex t2_operator(const SectorData& s, const Route& route, std::size_t o1, std::size_t o2,
                    std::size_t i1, std::size_t i2, double e1p, double e2p, double e1, double e2) {
  const Complex total = e1 + e2;
  const Vector in1 = route.resolve(1, e1, s.raise1(i1));
  const Vector two = route.resolve(2, total, s.lower2[i2].adjoint() * in1);
  const Vector back = route.resolve(1, e1p, s.lower2[o2] * two);
  const Complex first = contract(s.lower1[o1], back);

  const Vector in2_e2 = route.resolve(1, e2, s.raise1(i2));
  const Vector in1_e2p = route.resolve(1, e2p, in1);
  const Vector in2_e1p = route.resolve(1, e1p, in2_e2);
  const Complex second = contract(s.lower1[o1], in2_e2) * contract(s.lower1[o2], in1_e2p) +
                         contract(s.lower1[o1], in2_e1p) * contract(s.lower1[o2], in1);
  return first - 0.5 * second;
}

void check_grid(const std::vector<double>& grid, const char* name) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) {
      throw Error(ErrorKind::NonFiniteParameter, std::string(name) + " grid");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw Error(ErrorKind::InvalidParameter, std::string(name) + " grid is not strictly increasing");
    }
  }
}

}  // namespace

ScatteringModel::ScatteringModel(Graph graph, ChannelSet channels, FinalizeOptions options)
    : graph_(std::move(graph)), channels_(std::move(channels)), options_(options) {
  channels_.check_sites(graph_.num_sites());
  reference_ = build_sectors(graph_, channels_, channels_.omega_ref(), options_.spectral);

  if (channels_.mode() == CouplingMode::Local) return;
  bool complete = true;
  std::vector<Vector> eigenvalues(kMaxPhotons + 1);
  for (int m = 0; m <= kMaxPhotons; ++m) {
    if (!reference_->eig[m]) {
      complete = false;
      break;
    }
    eigenvalues[m] = reference_->eig[m]->lambdas;
  }
  markov_ = complete ? markov_check(channels_, eigenvalues) : markov_check(graph_, channels_);
}

std::array<std::size_t, 3> ScatteringModel::dims() const {
  return {reference_->bases[0].dim(), reference_->bases[1].dim(), reference_->bases[2].dim()};
}

std::shared_ptr<const SectorData> ScatteringModel::sectors(double omega0) const {
  if (!std::isfinite(omega0)) throw Error(ErrorKind::NonFiniteParameter, "omega0");
  if (!carrier_dependent() || omega0 == reference_->omega0) return reference_;
  return build_sectors(graph_, channels_, omega0, options_.spectral);
}

ScatteringModel finalize(Graph graph, ChannelSet channels, FinalizeOptions options) {
  return ScatteringModel(std::move(graph), std::move(channels), options);
}

Matrix s1_matrix(const ScatteringModel& model, double omega0, SolvePath path) {
  const auto sp = model.sectors(omega0);
  const Route route(*sp, path);
  const auto ports = model.ports();
  const auto np = static_cast<Eigen::Index>(ports.size());
  Matrix s = Matrix::Identity(np, np);
  for (Eigen::Index i = 0; i < np; ++i) {
    const Vector single = route.resolve(1, omega0, sp->raise1(ports[i]));
    for (Eigen::Index o = 0; o < np; ++o) {
      s(o, i) += kMinusTwoPiI * contract(sp->lower1[ports[o]], single);
    }
  }
  return s;
}

Complex a1(const ScatteringModel& model, std::size_t in, std::size_t out, double omega0,
           double tau, SolvePath path) {
  require_port(model, in);
  require_port(model, out);
  if (!(tau >= 0.0)) throw Error(ErrorKind::NegativeDelay, "tau = " + std::to_string(tau));
  const auto sp = model.sectors(omega0);
  const Route route(*sp, path);
  const Vector single = route.resolve(1, omega0, sp->raise1(in));
  return kMinusTwoPiI * contract(sp->lower1[out], route.propagate(1, tau, omega0, single));
}

Complex a2(const ScatteringModel& model, std::size_t in, std::size_t out, double omega0,
           double tau, SolvePath path) {
  require_port(model, in);
  require_port(model, out);
  if (!(tau >= 0.0)) throw Error(ErrorKind::NegativeDelay, "tau = " + std::to_string(tau));
  const auto sp = model.sectors(omega0);
  const Route route(*sp, path);
  const Chain chain = make_chain(*sp, route, omega0, in, out);
  return kMinusTwoPiI * kMinusTwoPiI *
         contract(sp->lower1[out], route.propagate(1, tau, omega0, chain.pair));
}

double g1(const ScatteringModel& model, std::size_t in, std::size_t out, double omega0,
          double flux, SolvePath path) {
  require_port(model, in);
  require_port(model, out);
  if (!std::isfinite(flux) || flux < 0.0) throw Error(ErrorKind::InvalidParameter, "flux");
  const auto sp = model.sectors(omega0);
  const Route route(*sp, path);
  const Vector single = route.resolve(1, omega0, sp->raise1(in));
  const Complex s = (in == out ? 1.0 : 0.0) + kMinusTwoPiI * contract(sp->lower1[out], single);
  return flux * std::norm(s);
}

double g2_cross(const ScatteringModel& model, std::size_t in, std::size_t out, double omega0,
                double tau, SolvePath path) {
  require_port(model, in);
  require_port(model, out);
  if (in == out) throw Error(ErrorKind::InvalidParameter, "g2_cross needs distinct ports");
  if (!(tau >= 0.0)) throw Error(ErrorKind::NegativeDelay, "tau = " + std::to_string(tau));
  const auto sp = model.sectors(omega0);
  const Route route(*sp, g2_path(*sp, path, omega0, in, out, out));
  const Chain chain = make_chain(*sp, route, omega0, in, out);
  const RowVector& r = sp->lower1[out];

  const Complex a1_0 = kMinusTwoPiI * contract(r, chain.single);
  if (std::abs(a1_0) <= kNodeThreshold) {
    throw Error(ErrorKind::TransmissionNode, "|A1(0)| = " + std::to_string(std::abs(a1_0)));
  }
  const Complex a1_t = kMinusTwoPiI * contract(r, route.propagate(1, tau, omega0, chain.single));
  const Complex a2_t =
      kMinusTwoPiI * kMinusTwoPiI * contract(r, route.propagate(1, tau, omega0, chain.pair));
  return std::norm(1.0 - a1_t / a1_0 + a2_t / (a1_0 * a1_0));
}

double g2_general(const ScatteringModel& model, std::size_t in, std::size_t a, std::size_t b,
                  double omega0, double tau) {
  require_port(model, in);
  require_port(model, a);
  require_port(model, b);
  if (!(tau >= 0.0)) throw Error(ErrorKind::NegativeDelay, "tau = " + std::to_string(tau));
  const auto sp = model.sectors(omega0);
  const SectorData& s = spectral_sectors(*sp);
  const auto& l1 = s.eig[1]->lambdas;
  const auto& l2 = s.eig[2]->lambdas;

  const Vector x = divide_by_gaps(s.uhat[in], l1, omega0);
  const Vector z = divide_by_gaps(s.chat[in] * x, l2, 2.0 * omega0);
  const Complex amp_a = (s.rhat[a] * x).value();
  const Complex amp_b = (s.rhat[b] * x).value();
  const Vector bracket = s.bhat[b] * z - x * amp_b;

  Complex sum = 0.0;
  for (Eigen::Index l = 0; l < l1.size(); ++l) {
    sum += std::exp(kI * (omega0 - l1(l)) * tau) * s.rhat[a](l) * bracket(l);
  }

  const Complex s_a = (a == in ? 1.0 : 0.0) + kMinusTwoPiI * amp_a;
  const Complex s_b = (b == in ? 1.0 : 0.0) + kMinusTwoPiI * amp_b;
  if (std::abs(s_a) <= kNodeThreshold || std::abs(s_b) <= kNodeThreshold) {
    throw Error(ErrorKind::TransmissionNode, "single-photon amplitude vanishes");
  }
  return std::norm(1.0 - 4.0 * kPi * kPi * sum / (s_a * s_b));
}

G2Value g2_value(const ScatteringModel& model, std::size_t in, std::size_t a, std::size_t b,
                 double omega0, double tau, SolvePath path) {
  require_port(model, in);
  require_port(model, a);
  require_port(model, b);
  if (!(tau >= 0.0)) throw Error(ErrorKind::NegativeDelay, "tau = " + std::to_string(tau));
  const auto sp = model.sectors(omega0);
  const Route route(*sp, g2_path(*sp, path, omega0, in, a, b));
  return g2_from_chain(*sp, route, make_chain(*sp, route, omega0, in, b), omega0, in, a, b, tau);
}

T2Tensor t2_principal(const ScatteringModel& model, double e1p, double e2p, double e1, double e2,
                      SolvePath path) {
  for (double e : {e1p, e2p, e1, e2}) {
    if (!std::isfinite(e)) throw Error(ErrorKind::NonFiniteParameter, "t2 energy");
  }
  const double scale = std::max({1.0, std::abs(e1p) + std::abs(e2p), std::abs(e1) + std::abs(e2)});
  if (std::abs((e1p + e2p) - (e1 + e2)) > 1e-12 * scale) {
    throw Error(ErrorKind::OffShell, "e1' + e2' != e1 + e2");
  }

  const auto sp = model.sectors(0.5 * (e1 + e2));
  const Route route(*sp, path);
  const bool spectral = path != SolvePath::Direct && sp->spectral();
  if (path == SolvePath::Spectral) spectral_sectors(*sp);

  const auto ports = model.ports();
  const auto np = ports.size();
  auto element = [&](std::size_t o1, std::size_t o2, std::size_t i1, std::size_t i2, double f1p,
                     double f2p, double f1, double f2) {
    return spectral ? t2_spectral(*sp, o1, o2, i1, i2, f1p, f2p, f1, f2)
                    : t2_operator(*sp, route, o1, o2, i1, i2, f1p, f2p, f1, f2);
  };

  T2Tensor t(np);
  for (std::size_t o1 = 0; o1 < np; ++o1) {
    for (std::size_t o2 = 0; o2 < np; ++o2) {
      for (std::size_t i1 = 0; i1 < np; ++i1) {
        for (std::size_t i2 = 0; i2 < np; ++i2) {
          const auto p1p = ports[o1], p2p = ports[o2], p1 = ports[i1], p2 = ports[i2];
          t(o1, o2, i1, i2) = 0.25 * (element(p1p, p2p, p1, p2, e1p, e2p, e1, e2) +
                                      element(p2p, p1p, p1, p2, e2p, e1p, e1, e2) +
                                      element(p1p, p2p, p2, p1, e1p, e2p, e2, e1) +
                                      element(p2p, p1p, p2, p1, e2p, e1p, e2, e1));
        }
      }
    }
  }
  return t;
}

std::string flag_string(std::uint32_t flags) {
  static constexpr std::pair<std::uint32_t, const char*> kNames[] = {
      {kFlagTransmissionNode, "transmission_node"},
      {kFlagMarkovWarn, "markov_warn"},
      {kFlagDefectiveFallback, "defective_fallback"},
      {kFlagNumericalError, "numerical_error"},
  };
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if (!(flags & bit)) continue;
    if (!out.empty()) out += ';';
    out += name;
  }
  return out;
}

CorrelationSweep sweep(const ScatteringModel& model, const SweepPorts& ports,
                       std::vector<double> deltas, std::vector<double> taus, double flux,
                       const SweepOptions& options) {
  require_port(model, ports.in);
  require_port(model, ports.out);
  if (ports.out2) require_port(model, *ports.out2);
  if (deltas.empty()) throw Error(ErrorKind::InvalidSize, "empty delta grid");
  if (taus.empty()) taus.push_back(0.0);
  check_grid(deltas, "delta");
  check_grid(taus, "tau");
  if (taus.front() < 0.0) throw Error(ErrorKind::NegativeDelay, "tau grid has negative entries");
  if (!std::isfinite(flux) || flux < 0.0) throw Error(ErrorKind::InvalidParameter, "flux");

  CorrelationSweep out;
  out.carrier_base = options.carrier_base.value_or(model.omega_ref());
  if (!std::isfinite(out.carrier_base)) throw Error(ErrorKind::NonFiniteParameter, "carrier base");
  out.deltas = std::move(deltas);
  out.taus = std::move(taus);
  out.flux = flux;
  out.ports = ports;
  out.markov = model.markov();

  const std::size_t nd = out.deltas.size();
  const std::size_t nt = out.taus.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.s1.assign(nd, Complex(nan, nan));
  out.transmission.assign(nd, nan);
  out.g1.assign(nd, nan);
  out.g2.assign(nd * nt, nan);
  out.flags.assign(nd * nt, 0u);
  std::vector<char> fallback(nd, 0);

  std::uint32_t base_flags = 0;
  if (options.markov_check && out.markov.evaluated && !out.markov.pass) base_flags |= kFlagMarkovWarn;

  const std::size_t a = ports.out;
  const std::size_t b = ports.out2.value_or(ports.out);

  auto evaluate = [&](std::size_t d) {
    std::uint32_t* flags = &out.flags[d * nt];
    std::fill(flags, flags + nt, base_flags);
    try {
      const double omega0 = out.carrier_base + out.deltas[d];
      const auto sp = model.sectors(omega0);
      if (!sp->fallback_reason[1].empty() || !sp->fallback_reason[2].empty()) {
        fallback[d] = 1;
        for (std::size_t k = 0; k < nt; ++k) flags[k] |= kFlagDefectiveFallback;
      }
      const Route route(*sp, g2_path(*sp, options.path, omega0, ports.in, a, b));
      const Chain chain = make_chain(*sp, route, omega0, ports.in, b);
      const Complex s = (a == ports.in ? 1.0 : 0.0) + kMinusTwoPiI * contract(sp->lower1[a], chain.single);
      out.s1[d] = s;
      out.transmission[d] = std::norm(s);
      out.g1[d] = flux * std::norm(s);
      for (std::size_t k = 0; k < nt; ++k) {
        try {
          const auto g = g2_from_chain(*sp, route, chain, omega0, ports.in, a, b, out.taus[k]);
          out.g2[d * nt + k] = g.value;
          if (g.node) flags[k] |= kFlagTransmissionNode;
        } catch (const Error&) {
          flags[k] |= kFlagNumericalError;
        }
      }
    } catch (const Error&) {
      for (std::size_t k = 0; k < nt; ++k) flags[k] |= kFlagNumericalError;
    }
  };

  std::size_t workers = options.threads > 0 ? static_cast<std::size_t>(options.threads)
                                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, nd);
  if (workers <= 1) {
    for (std::size_t d = 0; d < nd; ++d) evaluate(d);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t d = next++; d < nd; d = next++) evaluate(d);
      });
    }
    for (auto& th : pool) th.join();
  }
  out.fallback_used = std::any_of(fallback.begin(), fallback.end(), [](char f) { return f != 0; });
  return out;
}

}  // namespace fewphoton
