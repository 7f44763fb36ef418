#pragma once
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sorkin/geometry.hpp"

namespace sorkin {

/// Resolution and convergence controls for the oscillatory integrals.
struct QuadratureSpec {
  int samples_per_oscillation = 24;  ///< nodes per 2 pi of local phase (>= 8)
  long max_panels = 1 << 20;         ///< panel-doubling budget per 1D integral
  double tolerance = 1e-4;           ///< relative change accepted when doubling

  void check() const {
    if (samples_per_oscillation < 8)
      throw ValidationError("samples_per_oscillation", "must be >= 8");
    if (!(tolerance > 0)) throw ValidationError("tolerance", "must be > 0");
    if (max_panels < 1) throw ValidationError("max_panels", "must be >= 1");
  }
};

/// Raised when panel doubling fails to reach the requested tolerance within
/// the panel budget. Carries the relative error that was achieved.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved relative error " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};

/// Computes the n-point rule by Newton iteration on the Legendre recurrence
/// and caches it. Thread safe.
inline const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.x.resize(static_cast<std::size_t>(n));
  rule.w.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[static_cast<std::size_t>(i)] = -x;
    rule.x[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[static_cast<std::size_t>(n - 1 - i)] = rule.w[static_cast<std::size_t>(i)];
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

inline constexpr int kPanelOrder = 16;

/// A panel-quadrature result together with the integrand's L1 mass, which
/// sets the meaningful accuracy scale when the value itself cancels to
/// near zero.
struct PanelSum {
  std::complex<double> value{0.0, 0.0};
  double l1 = 0;

  double scale() const { return std::max(std::abs(value), 1e-3 * l1); }
};

/// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <class F>
PanelSum integrate_panels_with_norm(F&& f, double a, double b, long panels,
                                    int order = kPanelOrder) {
  const GaussRule& rule = gauss_legendre(order);
  const double hp = (b - a) / static_cast<double>(panels);
  PanelSum total;
  for (long p = 0; p < panels; ++p) {
    const double lo = a + hp * static_cast<double>(p);
    const double mid = lo + 0.5 * hp;
    std::complex<double> acc = 0;
    double acc_l1 = 0;
    for (int i = 0; i < order; ++i) {
      const std::complex<double> fx = f(mid + 0.5 * hp * rule.x[static_cast<std::size_t>(i)]);
      acc += rule.w[static_cast<std::size_t>(i)] * fx;
      acc_l1 += rule.w[static_cast<std::size_t>(i)] * std::abs(fx);
    }
    total.value += acc * (0.5 * hp);
    total.l1 += acc_l1 * (0.5 * hp);
  }
  return total;
}

template <class F>
std::complex<double> integrate_panels(F&& f, double a, double b, long panels,
                                      int order = kPanelOrder) {
  return integrate_panels_with_norm(f, a, b, panels, order).value;
}

/// Initial panel count so that each 16-node panel spans at most
/// (16 / samples_per_oscillation) oscillations of the fastest local phase.
inline long panels_for_phase(double phase_span, const QuadratureSpec& q) {
  const double per_panel = 2.0 * std::numbers::pi * kPanelOrder / q.samples_per_oscillation;
  const double need = std::abs(phase_span) / per_panel;
  long p = 1;
  while (static_cast<double>(p) < need && p < q.max_panels) p *= 2;
  return p;
}

/// Integrates an oscillatory integrand with panel doubling until the result
/// changes by less than q.tolerance, starting from a density set by
/// `phase_span` (total phase traversed over [a, b]). The change is judged
/// relative to the result's magnitude or, for cancellation-dominated
/// integrals, to a fraction of the integrand's L1 mass.
template <class F>
std::complex<double> integrate_oscillatory(F&& f, double a, double b, double phase_span,
                                           const QuadratureSpec& q) {
  q.check();
  long panels = panels_for_phase(phase_span, q);
  PanelSum prev = integrate_panels_with_norm(f, a, b, panels);
  while (true) {
    const PanelSum next = integrate_panels_with_norm(f, a, b, panels * 2);
    const double err = std::abs(next.value - prev.value) / std::max(next.scale(), 1e-300);
    if (err <= q.tolerance) return next.value;
    if (panels > q.max_panels / 2)
      throw ConvergenceError("quadrature did not converge within the panel budget", err);
    panels *= 2;
    prev = next;
  }
}

}  // namespace sorkin
