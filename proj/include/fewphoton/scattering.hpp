#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fewphoton/coupling.hpp"
#include "fewphoton/fock.hpp"
#include "fewphoton/lattice.hpp"
#include "fewphoton/spectral.hpp"
#include "fewphoton/types.hpp"

namespace fewphoton {

/// Which linear-algebra route an observable takes. `Auto` uses the cached
/// eigensystems when they exist and direct solves otherwise; for g2 it also
/// switches to direct solves when the single-photon eigen-sums cancel too
/// strongly (see kCancellationLimit).
enum class SolvePath { Auto, Spectral, Direct };

/// Largest tolerated eps * kappa_a * kappa_b, where kappa is the cancellation
/// factor of the eigen-sum for s1[detector][in].
inline constexpr double kCancellationLimit = 1e-11;

/// Everything the observables need for one carrier frequency: sector bases,
/// effective Hamiltonians, eigensystems and the channel vertices.
struct SectorData {
  double omega0 = 0.0;
  std::vector<SectorBasis> bases;                 // M = 0, 1, 2
  std::vector<Matrix> heff;                       // H_eff^(M)
  std::vector<std::optional<Eigensystem>> eig;    // nullopt: direct fallback
  std::vector<std::string> fallback_reason;

  std::vector<RowVector> lower1;  // <0| b~_sigma, 1 x d1, per channel
  std::vector<Matrix> lower2;     // b~_sigma restricted to 2 -> 1, d1 x d2

  // Vertices in eigen-coordinates, filled for ports when sectors 1 and 2
  // are spectral: rhat = <0|b~|1,l>, uhat = <bar{1,l}|b~†|0>,
  // bhat = <bar{1,l'}|b~|2,l2>, chat = <bar{2,l2}|b~†|1,l1>.
  std::vector<RowVector> rhat;
  std::vector<Vector> uhat;
  std::vector<Matrix> bhat;
  std::vector<Matrix> chat;

  bool spectral() const noexcept { return eig[1].has_value() && eig[2].has_value(); }
  Vector raise1(std::size_t channel) const { return lower1[channel].adjoint(); }
};

struct FinalizeOptions {
  bool spectral = true;  // false skips eigendecompositions entirely
};

/// Immutable bundle of graph, channels and cached sector data. In
/// quasilocal-positions mode the vertices depend on the carrier, so
/// `sectors(omega0)` rebuilds them for every other carrier.
class ScatteringModel {
 public:
  ScatteringModel(Graph graph, ChannelSet channels, FinalizeOptions options = {});

  const Graph& graph() const noexcept { return graph_; }
  const ChannelSet& channels() const noexcept { return channels_; }
  double omega_ref() const noexcept { return channels_.omega_ref(); }
  std::array<std::size_t, 3> dims() const;
  std::vector<std::size_t> ports() const { return channels_.ports(); }

  bool carrier_dependent() const noexcept {
    return channels_.mode() == CouplingMode::QuasiLocalPositions;
  }
  std::shared_ptr<const SectorData> sectors(double omega0) const;
  const SectorData& reference() const noexcept { return *reference_; }

  bool fallback(int photons) const { return !reference_->eig.at(photons).has_value(); }
  const MarkovReport& markov() const noexcept { return markov_; }

 private:
  Graph graph_;
  ChannelSet channels_;
  FinalizeOptions options_;
  std::shared_ptr<const SectorData> reference_;
  MarkovReport markov_;
};

ScatteringModel finalize(Graph graph, ChannelSet channels, FinalizeOptions options = {});

/// Port-to-port single-photon amplitudes s[out][in] at carrier omega0, rows
/// and columns in `model.ports()` order.
Matrix s1_matrix(const ScatteringModel& model, double omega0, SolvePath path = SolvePath::Auto);

// Amplitudes are normalised as A1 = -2 pi i <0|b~_out e^{i(w0-H)tau} G1 b~†_in|0>
// and A2 = (-2 pi i)^2 <...>, so A1(0) is the transmission amplitude s1[out][in].
Complex a1(const ScatteringModel& model, std::size_t in, std::size_t out, double omega0,
           double tau, SolvePath path = SolvePath::Auto);
Complex a2(const ScatteringModel& model, std::size_t in, std::size_t out, double omega0,
           double tau, SolvePath path = SolvePath::Auto);

double g1(const ScatteringModel& model, std::size_t in, std::size_t out, double omega0,
          double flux = 1.0, SolvePath path = SolvePath::Auto);

inline constexpr double kNodeThreshold = 1e-13;

/// |1 - A1(tau)/A1(0) + A2(tau)/A1(0)^2|^2 for in != out. Throws
/// TransmissionNode when |A1(0)| <= 1e-13.
double g2_cross(const ScatteringModel& model, std::size_t in, std::size_t out, double omega0,
                double tau, SolvePath path = SolvePath::Auto);

/// Second-order coherence for input `in`, detector `a` at the delayed
/// time and detector `b`, from explicit sums over eigenstates. Covers
/// reflection and mixed detectors; needs spectral sectors.
double g2_general(const ScatteringModel& model, std::size_t in, std::size_t a, std::size_t b,
                  double omega0, double tau);

struct G2Value {
  double value = 0.0;
  bool node = false;  // value is the raw, divergent ratio
};

/// Operator-form g2 for any detector pair; never throws on nodes.
G2Value g2_value(const ScatteringModel& model, std::size_t in, std::size_t a, std::size_t b,
                 double omega0, double tau, SolvePath path = SolvePath::Auto);

/// Symmetrised principal-value two-photon T-matrix over ports, indexed
/// (out1, out2, in1, in2) in `model.ports()` order. Arguments are absolute
/// photon energies and must satisfy e1p + e2p = e1 + e2.
class T2Tensor {
 public:
  explicit T2Tensor(std::size_t num_ports)
      : n_(num_ports), data_(num_ports * num_ports * num_ports * num_ports) {}

  std::size_t num_ports() const noexcept { return n_; }
  Complex& operator()(std::size_t o1, std::size_t o2, std::size_t i1, std::size_t i2) {
    return data_[((o1 * n_ + o2) * n_ + i1) * n_ + i2];
  }
  Complex operator()(std::size_t o1, std::size_t o2, std::size_t i1, std::size_t i2) const {
    return data_[((o1 * n_ + o2) * n_ + i1) * n_ + i2];
  }

 private:
  std::size_t n_;
  std::vector<Complex> data_;
};

T2Tensor t2_principal(const ScatteringModel& model, double e1p, double e2p, double e1, double e2,
                      SolvePath path = SolvePath::Auto);

enum SweepFlag : std::uint32_t {
  kFlagTransmissionNode = 1u << 0,
  kFlagMarkovWarn = 1u << 1,
  kFlagDefectiveFallback = 1u << 2,
  kFlagNumericalError = 1u << 3,
};

std::string flag_string(std::uint32_t flags);

struct SweepPorts {
  std::size_t in = 0;
  std::size_t out = 1;
  std::optional<std::size_t> out2;
};

struct SweepOptions {
  std::optional<double> carrier_base;  // omega0 = base + delta; default omega_ref
  int threads = 1;
  bool markov_check = true;
  SolvePath path = SolvePath::Auto;
};

struct CorrelationSweep {
  std::vector<double> deltas;
  std::vector<double> taus;
  double carrier_base = 0.0;
  double flux = 1.0;
  SweepPorts ports;

  std::vector<Complex> s1;            // s1[out][in], per delta
  std::vector<double> transmission;   // |s1|^2, per delta
  std::vector<double> g1;             // per delta
  std::vector<double> g2;             // row-major (delta, tau)
  std::vector<std::uint32_t> flags;   // row-major (delta, tau)

  MarkovReport markov;
  bool fallback_used = false;

  double g2_at(std::size_t d, std::size_t t) const { return g2[d * taus.size() + t]; }
  std::uint32_t flags_at(std::size_t d, std::size_t t) const { return flags[d * taus.size() + t]; }
};

/// Evaluates transmissions, g1 and g2 on a (delta, tau) grid. Grids must be
/// strictly increasing, taus non-negative; an empty tau grid means {0}.
/// Per-point numerical failures are recorded as flags. Output is identical
/// for every thread count.
CorrelationSweep sweep(const ScatteringModel& model, const SweepPorts& ports,
                       std::vector<double> deltas, std::vector<double> taus, double flux = 1.0,
                       const SweepOptions& options = {});

}  // namespace fewphoton
