// Acceptance suite: one PASS/FAIL line per criterion.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fewphoton/coupling.hpp"
#include "fewphoton/fock.hpp"
#include "fewphoton/reference.hpp"
#include "fewphoton/scattering.hpp"
#include "fewphoton/scenario.hpp"
#include "fewphoton/spectral.hpp"

using namespace fewphoton;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

const std::string kScenarios = FEWPHOTON_SCENARIO_DIR;

Scenario scenario(const std::string& file) { return load_scenario(kScenarios + "/" + file); }

SweepPorts ports_of(const Scenario& s) {
  SweepPorts p{s.channels.require(s.in), s.channels.require(s.out), {}};
  if (s.out2) p.out2 = s.channels.require(*s.out2);
  return p;
}

std::vector<double> taus_of(const Scenario& s) {
  return s.sweep.tau ? s.sweep.tau->points() : std::vector<double>{};
}

Graph with_interaction(const Graph& g, double U) {
  std::vector<Site> sites(g.sites().begin(), g.sites().end());
  for (auto& site : sites) site.U = U;
  return Graph(std::move(sites), std::vector<Link>(g.links().begin(), g.links().end()));
}

// Scenario with the 8x8 plane replaced by a 4x4 plane of the same
// parameters, for criteria whose budget excludes the full plane.
Scenario reduced_plane() {
  Scenario s = scenario("plane8x8.json");
  auto small = make_preset("plane", {{"width", 4}, {"height", 4}, {"U", s.graph.sites()[0].U}});
  s.graph = std::move(small.graph);
  s.channels = std::move(small.channels);
  return s;
}

std::vector<Scenario> corpus(bool full_plane) {
  std::vector<Scenario> out;
  for (const char* f : {"kerr_U0.2.json", "kerr_U1.json", "kerr_U10.json", "dimer_parallel.json",
                        "dimer_perpendicular.json", "dimer_quasilocal.json", "chain10_t1.json",
                        "chain10_t10_decay.json", "ring6.json"}) {
    out.push_back(scenario(f));
  }
  out.push_back(full_plane ? scenario("plane8x8.json") : reduced_plane());
  return out;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

bool local_min(const std::vector<double>& v, std::size_t i) {
  return i > 0 && i + 1 < v.size() && v[i] < v[i - 1] && v[i] <= v[i + 1];
}

Outcome ac1() {
  Outcome o;
  const auto deltas = Range{-20.0, 20.0, 201}.points();
  double worst_g1 = 0.0, worst_g2 = 0.0;
  for (double U : {0.0, 0.2, 1.0, 10.0}) {
    auto p = make_preset("kerr", {{"U", U}, {"gamma", 1.0}});
    const auto m = finalize(p.graph, p.channels);
    const auto sw = sweep(m, {0, 1, {}}, deltas, {0.0});
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      worst_g1 = std::max(worst_g1, rel_err(sw.g1[d], reference::kerr_g1_closed(deltas[d], 1.0)));
      worst_g2 = std::max(worst_g2, rel_err(sw.g2_at(d, 0), reference::kerr_g2_closed(deltas[d], U, 1.0, 0.0)));
    }
  }
  auto p = make_preset("kerr", {{"U", 10.0}});
  const auto m = finalize(p.graph, p.channels);
  const double peak = g2_cross(m, 0, 1, 5.0, 0.0), centre = g2_cross(m, 0, 1, 0.0, 0.0);
  o.require(worst_g1 < 1e-10, fmt("g1 rel err %.2e", worst_g1));
  o.require(worst_g2 < 1e-10, fmt("g2 rel err %.2e", worst_g2));
  o.require(rel_err(peak, 7.25) < 1e-10, fmt("g2(5) = %.15g", peak));
  o.require(rel_err(centre, 4.0 / 29.0) < 1e-10, fmt("g2(0) = %.15g", centre));
  if (o.pass) {
    o.detail = fmt("max rel err g1 %.1e, g2 %.1e; g2(U/2) = %.12g", worst_g1, worst_g2, peak);
  }
  return o;
}

Outcome ac2() {
  Outcome o;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> rd(-5.0, 5.0), ru(0.0, 10.0), rt(0.2, 3.0);
  double worst_a1 = 0.0, worst_a2 = 0.0, worst_e = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double delta = rd(rng), U = ru(rng), t = rt(rng);
    auto p = make_preset("dimer-parallel", {{"U", U}, {"t", t}, {"gamma", 1.0}});
    const auto m = finalize(p.graph, p.channels);
    worst_a1 = std::max(worst_a1, rel_err(a1(m, 0, 1, delta, 0.0), reference::dimer_a1_closed(delta, t, 1.0)));
    worst_a2 = std::max(worst_a2, rel_err(a2(m, 0, 1, delta, 0.0), reference::dimer_a2_closed(delta, U, t, 1.0)));

    const double eps = 0.5 * rd(rng);
    const Graph g = preset_chain(2, eps, U, t);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian_sector(g, SectorBasis(2, 2)).data);
    const auto e = reference::dimer_two_photon_energies(eps, U, t);
    std::vector<double> closed(e.begin(), e.end());
    std::sort(closed.begin(), closed.end());
    for (int l = 0; l < 3; ++l) worst_e = std::max(worst_e, std::abs(es.eigenvalues()(l) - closed[l]));
  }
  o.require(worst_a1 < 1e-10, fmt("A1 rel err %.2e", worst_a1));
  o.require(worst_a2 < 1e-10, fmt("A2 rel err %.2e", worst_a2));
  o.require(worst_e < 1e-12, fmt("two-photon energies err %.2e", worst_e));
  if (o.pass) o.detail = fmt("A1 %.1e, A2 %.1e, energies %.1e", worst_a1, worst_a2, worst_e);
  return o;
}

Outcome ac3() {
  Outcome o;
  const double gamma = 1.0, t = 1.0, eps = 0.3;
  double worst = 0.0;
  for (double phi : {0.0, kPi / 10.0, 0.9, kPi / 2.0}) {
    const auto p = make_preset("dimer-quasilocal", {{"gamma", gamma}, {"phi", phi}, {"t", t}, {"epsilon", eps}});
    for (int m = 1; m <= 2; ++m) {
      const SectorBasis basis(2, m), lower(2, m - 1);
      const auto d = static_cast<Eigen::Index>(basis.dim());
      const Matrix hop10 = creation_block(1, lower, basis).data * annihilation_block(0, basis, lower).data;
      const Matrix hop01 = creation_block(0, lower, basis).data * annihilation_block(1, basis, lower).data;
      const Matrix displayed = Complex(0.0, -2.0 * gamma) *
                               (double(m) * Matrix::Identity(d, d) + std::polar(1.0, phi) * hop10 +
                                std::polar(1.0, -phi) * hop01);
      worst = std::max(worst, (self_energy(p.channels, basis).data - displayed).cwiseAbs().maxCoeff());
    }
  }
  const auto p = make_preset("dimer-quasilocal", {{"gamma", gamma}, {"phi", 0.0}, {"t", t}, {"epsilon", eps}});
  const auto eig = biorth_eig(effective_hamiltonian(p.graph, p.channels, 1));
  std::vector<Complex> lambdas(eig.lambdas.begin(), eig.lambdas.end());
  std::sort(lambdas.begin(), lambdas.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  const double err_minus = std::abs(lambdas[0] - Complex(eps - t, 0.0));
  const double err_plus = std::abs(lambdas[1] - Complex(eps + t, -4.0 * gamma));
  o.require(worst < 1e-14, fmt("self-energy deviation %.2e", worst));
  o.require(err_minus < 1e-12 && err_plus < 1e-12, fmt("eigenvalue errors %.2e %.2e", err_minus, err_plus));
  o.require(std::abs(lambdas[0].imag()) < 1e-12, fmt("|Im lambda-| = %.2e", std::abs(lambdas[0].imag())));
  if (o.pass) {
    o.detail = fmt("self-energy %.1e, eigenvalues %.1e, |Im lambda-| %.1e", worst,
                   std::max(err_minus, err_plus), std::abs(lambdas[0].imag()));
  }
  return o;
}

Outcome ac4() {
  Outcome o;
  double worst = 0.0;
  std::size_t points = 0, nodes = 0;
  for (auto s : corpus(false)) {
    s.graph = with_interaction(s.graph, 0.0);
    const auto m = finalize(s.graph, s.channels);
    SweepOptions options;
    options.carrier_base = s.carrier_base();
    const auto sw = sweep(m, ports_of(s), s.sweep.delta.points(), taus_of(s), s.flux, options);
    for (std::size_t k = 0; k < sw.g2.size(); ++k) {
      // g2 is 0/0 on an exact transmission zero
      if (sw.flags[k] & kFlagTransmissionNode) {
        ++nodes;
        continue;
      }
      ++points;
      worst = std::max(worst, std::abs(sw.g2[k] - 1.0));
    }
  }
  o.require(worst < 1e-8, fmt("max |g2 - 1| = %.2e", worst));
  if (o.pass) {
    o.detail = fmt("max |g2 - 1| = %.1e over %.0f points (%.0f node points skipped; plane 4x4)", worst,
                   double(points), double(nodes));
  }
  return o;
}

Outcome ac5() {
  Outcome o;
  double unitarity = 0.0, top_singular = 0.0;
  std::size_t lossless = 0, lossy = 0;
  for (const auto& s : corpus(true)) {
    const bool has_decay = s.channels.ports().size() < s.channels.num_channels();
    const auto m = finalize(s.graph, s.channels, {.spectral = false});
    for (double delta : s.sweep.delta.points()) {
      const Matrix sm = s1_matrix(m, s.carrier_base() + delta, SolvePath::Direct);
      if (has_decay) {
        Eigen::JacobiSVD<Matrix> svd(sm);
        top_singular = std::max(top_singular, svd.singularValues()(0));
        ++lossy;
      } else {
        const auto n = sm.rows();
        unitarity = std::max(unitarity, (sm.adjoint() * sm - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
        ++lossless;
      }
    }
  }
  o.require(unitarity < 1e-9, fmt("|S'S - 1| = %.2e", unitarity));
  o.require(top_singular <= 1.0 + 1e-9, fmt("largest singular value %.15g", top_singular));
  if (o.pass) {
    o.detail = fmt("|S'S - 1| %.1e over %.0f lossless points, max singular value %.12f", unitarity,
                   double(lossless), top_singular) +
               fmt(" over %.0f lossy points", double(lossy));
  }
  return o;
}

// The eigendecomposition path as shipped: spectral sums where an eigensystem
// exists, direct solves on defective sectors and on carriers where the
// eigen-sums cancel too strongly for g2.
Outcome ac6() {
  Outcome o;
  double amp = 0.0, g2 = 0.0, biorth = 0.0, complete = 0.0;
  std::size_t sectors = 0, fallbacks = 0, points = 0, guarded = 0;
  for (const auto& s : corpus(false)) {
    const auto m = finalize(s.graph, s.channels);
    for (int photons = 0; photons <= 2; ++photons) {
      ++sectors;
      if (m.fallback(photons)) {
        ++fallbacks;
        continue;
      }
      biorth = std::max(biorth, biorth_residual(*m.reference().eig[photons]));
      complete = std::max(complete, completeness_residual(*m.reference().eig[photons]));
    }
    const auto p = ports_of(s);
    const std::size_t b = p.out2.value_or(p.out);
    std::vector<double> taus = taus_of(s);
    if (taus.empty()) taus = {0.0, 0.7};
    const auto deltas = s.sweep.delta.points();
    for (std::size_t d = 0; d < deltas.size(); d += 4) {
      const double w = s.carrier_base() + deltas[d];
      const bool spectral = m.sectors(w)->spectral();
      for (double tau : taus) {
        amp = std::max(amp, std::abs(a1(m, p.in, p.out, w, tau) - a1(m, p.in, p.out, w, tau, SolvePath::Direct)));
        amp = std::max(amp, std::abs(a2(m, p.in, p.out, w, tau) - a2(m, p.in, p.out, w, tau, SolvePath::Direct)));
        const auto gs = g2_value(m, p.in, p.out, b, w, tau);
        const auto gd = g2_value(m, p.in, p.out, b, w, tau, SolvePath::Direct);
        if (gs.node || gd.node) continue;
        ++points;
        if (spectral && g2_value(m, p.in, p.out, b, w, tau, SolvePath::Spectral).value != gs.value) ++guarded;
        g2 = std::max(g2, rel_err(gs.value, gd.value));
      }
    }
  }
  o.require(amp < 1e-8, fmt("amplitude difference %.2e", amp));
  o.require(g2 < 1e-8, fmt("g2 relative difference %.2e", g2));
  o.require(biorth < 1e-10, fmt("bi-orthonormality residual %.2e", biorth));
  o.require(complete < 1e-10, fmt("completeness residual %.2e", complete));
  if (o.pass) {
    o.detail = fmt("amplitudes %.1e, g2 rel %.1e, residuals %.1e", amp, g2, std::max(biorth, complete)) +
               fmt("; %.0f of %.0f sectors defective (direct fallback), ", double(fallbacks), double(sectors)) +
               fmt("%.0f of %.0f g2 points on dense solves by cancellation guard (plane 4x4)", double(guarded),
                   double(points));
  }
  return o;
}

Outcome ac7() {
  Outcome o;
  double worst = 0.0;
  const double eps = 0.3, U = 2.5;
  for (std::size_t n : {2u, 4u, 6u, 8u, 10u}) {
    const Graph g = preset_chain(n, eps, U, 1.1);
    const Matrix h = hamiltonian_sector(g, SectorBasis(n, 2)).data;
    const Vector v = reference::doublon_splinter(n);
    worst = std::max(worst, (h * v - (2.0 * eps + U) * v).norm());
  }
  o.require(worst < 1e-12, fmt("residual %.2e", worst));
  if (o.pass) o.detail = fmt("max residual %.1e", worst);
  return o;
}

Outcome ac8() {
  Outcome o;
  std::string notes;
  // (a) three transmission zeros of the ring
  {
    const auto s = scenario("ring6.json");
    const auto m = finalize(s.graph, s.channels);
    const auto p = ports_of(s);
    std::vector<double> t;
    for (double delta : s.sweep.delta.points()) {
      t.push_back(std::norm(s1_matrix(m, s.carrier_base() + delta)(p.out, p.in)));
    }
    std::size_t dips = 0;
    for (std::size_t i = 0; i < t.size(); ++i) dips += local_min(t, i) && t[i] < 1e-4;
    o.require(dips == 3, fmt("ring: %.0f transmission zeros", double(dips)));
    notes += fmt("ring zeros %.0f", double(dips));
  }
  // (b) chain anti-bunching near 2 delta = U
  for (double U : {4.0, 10.0}) {
    auto p = make_preset("chain", {{"sites", 10}, {"t", 1.0}, {"gamma", 1.0}, {"U", U}});
    const auto m = finalize(p.graph, p.channels);
    const auto deltas = Range{-3.0, U / 2.0 + 1.0, 1601}.points();
    const auto sw = sweep(m, {0, 1, {}}, deltas, {0.0});
    double best = INFINITY, where = NAN, nearest = NAN;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      if (!local_min(sw.g2, i) || !(sw.g2[i] < 1.0)) continue;
      const double two = 2.0 * deltas[i];
      if (!(std::abs(two - U) >= std::abs(nearest - U))) nearest = two;
      if (std::abs(two - U) < 1.0 && sw.g2[i] < best) {
        best = sw.g2[i];
        where = two;
      }
    }
    const bool found = std::isfinite(best);
    o.require(found, fmt("chain U=%g: no g2 minimum within |2delta - U| < 1 (nearest at 2delta=%.3f)", U, nearest));
    if (found) notes += fmt("; chain U=%g min g2 %.2g at 2delta=%.3f", U, best, where);
  }
  // (c) perpendicular dimer node with bunching next to it
  {
    const auto s = scenario("dimer_perpendicular.json");
    const auto sw = run(s);
    const auto& d = sw.deltas;
    const auto zero = std::find(d.begin(), d.end(), 0.0);
    bool ok = zero != d.end() && zero != d.begin() && zero + 1 != d.end();
    if (ok) {
      const auto i = static_cast<std::size_t>(zero - d.begin());
      ok = (sw.flags_at(i, 0) & kFlagTransmissionNode) && sw.g2_at(i - 1, 0) > 1.0 && sw.g2_at(i + 1, 0) > 1.0;
      notes += fmt("; dimer node g2 neighbours %.3g %.3g", sw.g2_at(i - 1, 0), sw.g2_at(i + 1, 0));
    }
    o.require(ok, "perpendicular dimer: node flag or adjacent bunching missing");
  }
  o.detail = o.pass ? notes : o.detail + " [" + notes + "]";
  return o;
}

Outcome ac9() {
  Outcome o;
  const auto s = scenario("plane8x8.json");
  const auto sw = run(s);
  o.require(sw.deltas.size() == 201, "grid size");
  o.require(!sw.fallback_used, "eigendecomposition fell back to direct solves");

  // low-energy edge band: lowest contiguous run of states mostly on the boundary
  const auto w = static_cast<std::size_t>(8), h = static_cast<std::size_t>(8);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.graph.one_body_matrix());
  std::vector<double> edge;
  bool started = false;
  for (Eigen::Index l = 0; l < es.eigenvalues().size(); ++l) {
    double weight = 0.0;
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        if (r == 0 || c == 0 || r + 1 == h || c + 1 == w) {
          weight += std::norm(es.eigenvectors()(static_cast<Eigen::Index>(plane_site(w, r, c)), l));
        }
      }
    }
    if (weight > 0.6) {
      started = true;
      edge.push_back(es.eigenvalues()(l));
    } else if (started) {
      break;
    }
  }
  o.require(edge.size() >= 2, "no edge band found");
  if (edge.size() >= 2) {
    const double lo = edge.front() - s.carrier_base(), hi = edge.back() - s.carrier_base();
    const double q = 0.25 * (hi - lo);
    std::vector<double> g2(sw.g2.begin(), sw.g2.end());
    double best = INFINITY, where = NAN;
    for (std::size_t i = 0; i < g2.size(); ++i) {
      if (local_min(g2, i) && g2[i] < 1.0 && sw.deltas[i] > lo + q && sw.deltas[i] < hi - q && g2[i] < best) {
        best = g2[i];
        where = sw.deltas[i];
      }
    }
    o.require(std::isfinite(best), "no anti-bunching dip in the middle of the edge band");
    o.detail = fmt("edge band [%.2f, %.2f], dip g2 %.2g", lo, hi, best) + fmt(" at delta %.2f", where);
  }
  return o;
}

Outcome ac10() {
  Outcome o;
  std::size_t compared = 0;
  for (const char* f : {"kerr_U10.json", "chain10_t10_decay.json", "ring6.json", "dimer_quasilocal.json"}) {
    const auto s = scenario(f);
    std::string first;
    for (int threads : {1, 1, 2, 4}) {
      std::ostringstream csv;
      write_csv(csv, s, run(s, {.threads = threads}));
      if (first.empty()) {
        first = csv.str();
      } else {
        o.require(csv.str() == first, std::string(f) + fmt(" differs at %.0f threads", threads));
        ++compared;
      }
    }
  }
  if (o.pass) o.detail = fmt("%.0f repeated or threaded runs byte-identical", double(compared));
  return o;
}

}  // namespace

// Optional arguments select criteria by name, e.g. `acceptance AC4 AC6`.
int main(int argc, char** argv) {
  const std::vector<std::string> only(argv + 1, argv + argc);
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", 1.0, ac1},   {"AC2", 1.0, ac2},  {"AC3", 1.0, ac3}, {"AC4", 30.0, ac4},
      {"AC5", 30.0, ac5},  {"AC6", 60.0, ac6}, {"AC7", 5.0, ac7}, {"AC8", 60.0, ac8},
      {"AC9", 600.0, ac9}, {"AC10", 600.0, ac10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds >= c.budget_s) o.require(false, fmt("runtime %.1f s over budget %.0f s", seconds, c.budget_s));
    failures += !o.pass;
    std::printf("%s %s (%.2f s) %s\n", c.name, o.pass ? "PASS" : "FAIL", seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
