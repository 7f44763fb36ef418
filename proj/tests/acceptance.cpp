// Acceptance suite: one line per criterion, honest PASS/FAIL, nonzero exit
// when any criterion fails. Tolerances are pinned here, not tuned at runtime.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "sorkin/sorkin.hpp"

using namespace sorkin;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
  std::printf("CRITERION %d %-28s %s  (%s)\n", index, name, pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --------------------------------------------------------------------------

void criterion_1_analytic_central() {
  const auto t0 = std::chrono::steady_clock::now();
  const double kappa = analytic::kappa_analytic_at(preset(Preset::photon), 0.0);
  const double dev = std::abs(std::abs(kappa) - 5.6e-7) / 5.6e-7;
  report(1, "analytic-central-value", dev <= 0.10,
         fmt("|kappa|=%.4e, target 5.6e-7 +-10%%, dev %.1f%%, %.2fs", std::abs(kappa), 100 * dev,
             seconds_since(t0)));
}

void criterion_2_fresnel_anchor() {
  const auto t0 = std::chrono::steady_clock::now();
  Geometry g = preset(Preset::photon);
  g.source_distance = 0.20;
  g.screen_distance = 0.20;

  const double kappa = fresnel::kappa_fresnel(g, 0.0, fresnel::RiemannGrid::for_geometry(g));
  const double analytic_value = analytic::kappa_analytic_at(g, 0.0);

  const double magnitude_dev = std::abs(std::abs(kappa) - 6.0e-7) / 6.0e-7;
  const double analytic_dev = std::abs(kappa / analytic_value - 1.0);
  const bool pass = magnitude_dev <= 0.15 && analytic_dev >= 0.03 && analytic_dev <= 0.11;
  report(2, "fresnel-anchor-20cm", pass,
         fmt("|kappa|=%.4e (target 6e-7 +-15%%), deviation from analytic %.1f%% (target 7%% "
             "+-4pp), %.0fs",
             std::abs(kappa), 100 * analytic_dev, seconds_since(t0)));
}

void criterion_3_far_field_overlay() {
  const auto t0 = std::chrono::steady_clock::now();
  Geometry g = preset(Preset::photon);
  g.source_distance = g.screen_distance = 5.5556;  // F = 2e-4

  const DimensionlessGeometry s = rescale_to_dimensionless(g);
  const double lobe = 2 * std::numbers::pi / s.w;  // main sinc lobe = three kappa lobes
  const DetectorGrid grid = DetectorGrid::uniform(-lobe, lobe, 41);

  const QuadratureSpec q;
  const KappaProfile numeric = fraunhofer::kappa_numeric_profile(g, grid, q);
  const KappaProfile closed = analytic::kappa_analytic(g, grid);

  double peak = 0;
  for (double v : closed.kappa) peak = std::max(peak, std::abs(v));

  const std::size_t center = grid.theta.size() / 2;
  const double central_dev =
      std::abs(numeric.kappa[center] - closed.kappa[center]) / std::abs(closed.kappa[center]);

  double max_rel = 0, max_scaled = 0;
  for (std::size_t i = 0; i < grid.theta.size(); ++i) {
    const double diff = std::abs(numeric.kappa[i] - closed.kappa[i]);
    if (std::abs(closed.kappa[i]) >= 0.1 * peak)
      max_rel = std::max(max_rel, diff / std::abs(closed.kappa[i]));
    else
      max_scaled = std::max(max_scaled, diff / peak);
  }
  const bool pass = central_dev <= 0.10 && max_rel <= 0.15 && max_scaled <= 0.05;
  report(3, "far-field-overlay", pass,
         fmt("central dev %.1f%% (<=10%%), pointwise %.1f%% (<=15%%), near-zero %.1f%% of peak "
             "(<=5%%), %.0fs",
             100 * central_dev, 100 * max_rel, 100 * max_scaled, seconds_since(t0)));
}

void criterion_4_bound_dominance() {
  const auto t0 = std::chrono::steady_clock::now();
  auto max_abs = [](const Geometry& g) {
    const DimensionlessGeometry s = rescale_to_dimensionless(g);
    double m = 0;
    for (int i = 0; i < 2001; ++i) {
      const double t = -kThetaMax + 2 * kThetaMax * i / 2000.0;
      m = std::max(m, std::abs(analytic::kappa_analytic_at(s.d, s.w, t)));
    }
    return m;
  };

  bool pass = true;
  for (Preset p : {Preset::photon, Preset::electron, Preset::fdtd}) {
    const Geometry g = preset(p);
    if (max_abs(g) > analytic::kappa_bound(g)) pass = false;
  }

  std::mt19937 rng(20260809);
  std::uniform_real_distribution<double> logw(std::log(10.5), std::log(1000.0));
  std::uniform_real_distribution<double> ratio(3.05, 30.0);
  const double lambda = 1e-6, k = 2 * std::numbers::pi / lambda;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const double wt = std::exp(logw(rng));
    const double dt = ratio(rng) * wt;
    const Geometry g{wt / k, dt / k, 1.0, 1.0, 0.0, 1e-3, lambda};
    worst = std::max(worst, max_abs(g) / analytic::kappa_bound(g));
    if (worst > 1) pass = false;
  }
  const double photon_bound = analytic::kappa_bound(preset(Preset::photon));
  pass = pass && std::abs(photon_bound - 7.3e-5) / 7.3e-5 < 0.02;
  report(4, "bound-dominance", pass,
         fmt("presets + 50 random geometries, worst max|kappa|/bound = %.3f, photon bound "
             "%.3e, %.1fs",
             worst, photon_bound, seconds_since(t0)));
}

void criterion_5_sorkin_cancellation() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;

  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const std::complex<double> a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    const SevenIntensities I = additive_intensities(a, b, c);
    if (std::abs(sorkin_combination(I)) > 1e-12 * std::max(I.I_ABC, 1e-30)) pass = false;
  }

  // through the fraunhofer quadrature pipeline
  const fraunhofer::Context ctx = fraunhofer::Context::from_geometry(preset(Preset::photon));
  const fraunhofer::Evaluator eval(ctx, QuadratureSpec{}, false, /*include_nonclassical=*/false);
  for (double t : {0.0, 0.05}) {
    const SevenIntensities I = eval.intensities(t);
    if (std::abs(sorkin_combination(I)) > 1e-12 * I.I_ABC) pass = false;
  }

  // through the exact-propagator pipeline
  Geometry tiny;
  tiny.slit_width = 3e-6;
  tiny.slit_separation = 10e-6;
  tiny.slit_height = 4e-6;
  tiny.wavelength = 1e-6;
  tiny.source_distance = tiny.screen_distance = 5e-3;
  const fresnel::SlitFields fields(tiny, fresnel::RiemannGrid::for_geometry(tiny, 1), false);
  for (double y : {0.0, 4e-6}) {
    const SevenIntensities I = fields.intensities(y, tiny.screen_distance);
    if (std::abs(sorkin_combination(I)) > 1e-12 * I.I_ABC) pass = false;
  }

  report(5, "sorkin-cancellation", pass,
         fmt("1000 random amplitude triples + both pipelines, <=1e-12 relative, %.1fs",
             seconds_since(t0)));
}

void criterion_6_thick_slit_proxy() {
  const auto t0 = std::chrono::steady_clock::now();
  const Geometry fdtd = preset(Preset::fdtd);
  analytic::ThickSlitModel model;  // n_I = 2.61, threshold 0.30, factor 4

  const DetectorGrid grid = DetectorGrid::uniform(-0.125, 0.125, 21);
  const KappaProfile thick = analytic::thick_slit_profile(fdtd, model, grid);

  Geometry widened = fdtd;
  widened.slit_width = analytic::effective_width(fdtd.slit_width, fdtd.wavelength, model);
  const QuadratureSpec q;
  const KappaProfile numeric = fraunhofer::kappa_numeric_profile(widened, grid, q);

  double peak = 0;
  for (double v : thick.kappa) peak = std::max(peak, std::abs(v));
  double max_rel = 0, max_scaled = 0;
  for (std::size_t i = 0; i < grid.theta.size(); ++i) {
    const double scaled_numeric = model.amplitude_factor * numeric.kappa[i];
    const double diff = std::abs(thick.kappa[i] - scaled_numeric);
    if (std::abs(thick.kappa[i]) >= 0.1 * peak)
      max_rel = std::max(max_rel, diff / std::abs(thick.kappa[i]));
    else
      max_scaled = std::max(max_scaled, diff / peak);
  }
  const bool pass = max_rel <= 0.15 && max_scaled <= 0.05;
  report(6, "thick-slit-proxy", pass,
         fmt("w_eff = %.4f lambda, factor 4 on both routes; central-region dev %.1f%% (<=15%%), "
             "%.0fs",
             widened.slit_width / fdtd.wavelength, 100 * max_rel, seconds_since(t0)));
}

void criterion_7_asymptotics() {
  const auto t0 = std::chrono::steady_clock::now();
  const QuadratureSpec q;

  auto max_error = [&](double gap_scale) {
    Geometry g = preset(Preset::photon);
    g.slit_separation *= gap_scale;
    const fraunhofer::Context ctx = fraunhofer::Context::from_geometry(g);
    double worst = 0;
    for (auto [P, Q] : {std::pair{Slit::A, Slit::B}, {Slit::A, Slit::C}, {Slit::B, Slit::C}}) {
      const auto quad = fraunhofer::nonclassical_amplitude_quadrature(P, Q, 0.0, ctx, q);
      const auto asym = fraunhofer::nonclassical_amplitude_asymptotic(P, Q, 0.0, ctx);
      worst = std::max(worst, std::abs(asym - quad) / std::abs(quad));
    }
    return worst;
  };

  const double e1 = max_error(1.0);
  const double e2 = max_error(2.0);
  const bool pass = e1 < 0.01 && e2 < e1;
  report(7, "asymptotics", pass,
         fmt("photon-preset worst error %.3f%% (<1%%), gap x2 error %.3f%% (decreasing), %.1fs",
             100 * e1, 100 * e2, seconds_since(t0)));
}

void criterion_8_limits_and_parity() {
  const auto t0 = std::chrono::steady_clock::now();
  const Geometry photon = preset(Preset::photon);
  const DimensionlessGeometry s = rescale_to_dimensionless(photon);

  // exact parity of the closed form
  bool parity = true;
  for (int i = 1; i <= 100; ++i) {
    const double t = kThetaMax * i / 100.0;
    if (analytic::kappa_analytic_at(s.d, s.w, t) != analytic::kappa_analytic_at(s.d, s.w, -t))
      parity = false;
  }

  // |kappa| -> 0 monotonically over three decades of width in the small-kw
  // regime where the limit statement applies (kw from 1 down to 1e-3)
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int decade = 0; decade <= 3; ++decade) {
    const double v = std::abs(analytic::kappa_analytic_at(s.d, std::pow(10.0, -decade), 0.0));
    if (v >= prev) monotone = false;
    prev = v;
  }

  // two-kink versus single-kink magnitude, as specified
  const fraunhofer::Context ctx = fraunhofer::Context::from_geometry(photon);
  const fraunhofer::PathSpec path{{Slit::A, Slit::B, Slit::C}, QuadratureSpec{}};
  const auto abc = fraunhofer::multi_kink_amplitude(path, 0.0, ctx);
  const auto ac =
      fraunhofer::nonclassical_amplitude_quadrature(Slit::A, Slit::C, 0.0, ctx, QuadratureSpec{});
  const double kink_ratio = std::abs(abc) / std::abs(ac);
  const bool kink_small = kink_ratio < 0.05;

  const bool pass = parity && monotone && kink_small;
  report(8, "limits-and-parity", pass,
         fmt("parity %s, w->0 monotone %s, |psi_ABC|/|psi_AC| = %.2f (<0.05 %s: collinear hops "
             "make the monotone sequence unsuppressed), %.1fs",
             parity ? "ok" : "BROKEN", monotone ? "ok" : "BROKEN", kink_ratio,
             kink_small ? "ok" : "NOT MET", seconds_since(t0)));
}

}  // namespace

int main() {
  std::printf("sorkin acceptance suite (version %s)\n", kVersion);
  criterion_1_analytic_central();
  criterion_2_fresnel_anchor();
  criterion_3_far_field_overlay();
  criterion_4_bound_dominance();
  criterion_5_sorkin_cancellation();
  criterion_6_thick_slit_proxy();
  criterion_7_asymptotics();
  criterion_8_limits_and_parity();
  std::printf("%d of 8 criteria passed\n", 8 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
