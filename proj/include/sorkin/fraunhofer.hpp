#pragma once
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "sorkin/geometry.hpp"
#include "sorkin/kappa.hpp"
#include "sorkin/quadrature.hpp"
#include "sorkin/reduce.hpp"

namespace sorkin::fraunhofer {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Obliquity correction applied once per kink (two ~90 degree bends).
inline constexpr double kInclinationFactor = 0.25;

/// Slit-gap threshold (dimensionless) below which the integration-by-parts
/// asymptotics becomes suspect.
inline constexpr double kAsymptoticGapMin = 10.0;

struct Extent {
  double lo = 0, hi = 0;
  double width() const { return hi - lo; }
};

/// Dimensionless evaluation context: k-rescaled geometry, slit y-extents and
/// the global prefactor gamma = e^{ik(L+D)} / (L D).
///
/// All integrals run in the k-rescaled convention (lengths multiplied by k,
/// k itself set to 1); gamma is common to every amplitude and cancels in
/// kappa, but is carried so amplitudes are individually meaningful.
struct Context {
  DimensionlessGeometry geom;
  Complex gamma{1.0, 0.0};

  Extent extent(Slit s) const {
    switch (s) {
      case Slit::A: return {geom.d - geom.w / 2, geom.d + geom.w / 2};
      case Slit::B: return {-geom.w / 2, geom.w / 2};
      case Slit::C: return {-geom.d - geom.w / 2, -geom.d + geom.w / 2};
    }
    throw ValidationError("slit", "unknown slit label");
  }

  static Context from_geometry(const Geometry& g) {
    Context ctx;
    ctx.geom = rescale_to_dimensionless(g);
    // |gamma| = 1/(L D) in physical units; the phase uses rescaled lengths.
    ctx.gamma = std::polar(1.0 / (g.source_distance * g.screen_distance),
                           std::fmod(ctx.geom.L + ctx.geom.D, 2.0 * kPi));
    return ctx;
  }
};

/// (1/(2 pi i))^x on the principal branch; x = 2 + m/2 for an m-kink path.
inline Complex stationary_phase_prefactor(double x) {
  return std::polar(std::pow(2.0 * kPi, -x), -kPi / 2.0 * x);
}

inline void require_theta(double theta) {
  if (std::abs(theta) > kThetaMax)
    throw ValidationError("theta", "|theta| exceeds the 0.2 rad domain clamp");
}

// ---------------------------------------------------------------------------
// Classical (straight-path) slit amplitudes
// ---------------------------------------------------------------------------

/// psi_P = -gamma/(4 pi^2) Int_P exp(i phi(y)) dy with
///   phi = -y theta                                  (far-field form)
///   phi = y^2/(2L) + (theta D - y)^2/(2D)           (keep_quadratic)
/// The quadratic form retains the Fresnel-number sensitivity; the far-field
/// form makes the shift identities psi_A = e^{-i d theta} psi_B exact.
inline Complex classical_amplitude(Slit s, double theta, const Context& ctx,
                                   const QuadratureSpec& q, bool keep_quadratic = false) {
  require_theta(theta);
  const Extent e = ctx.extent(s);
  const double L = ctx.geom.L, D = ctx.geom.D;
  const double yD = theta * D;

  double span = std::abs(theta) * e.width();
  if (keep_quadratic) {
    const double ym = std::max(std::abs(e.lo), std::abs(e.hi));
    span += ym * e.width() / L + (ym + std::abs(yD)) * e.width() / D;
  }

  auto integrand = [&](double y) {
    const double phase = keep_quadratic ? y * y / (2 * L) + (yD - y) * (yD - y) / (2 * D)
                                        : -y * theta;
    return std::polar(1.0, phase);
  };
  const Complex integral = integrate_oscillatory(integrand, e.lo, e.hi, span, q);
  return -ctx.gamma / (4 * kPi * kPi) * integral;
}

// ---------------------------------------------------------------------------
// Single-kink (non-classical) amplitudes
// ---------------------------------------------------------------------------

/// Cached evaluator for psi_{P,Q}: the source -> P -> Q -> detector amplitude
///
///   psi_{P,Q} = (1/4) gamma i^{3/2} (2 pi)^{-5/2}
///               Int_P dy1 Int_Q dy2 |y2-y1|^{-1/2} e^{i|y2-y1| - i y2 theta}
///
/// The inner (y1) integral is theta independent, so it is evaluated once on
/// the outer nodes and reused for every detector angle. keep_quadratic adds
/// the finite-distance phases y1^2/(2L) and (theta D - y2)^2/(2D) so the
/// kinks stay consistent with quadratic classical amplitudes.
class KinkAmplitude {
public:
  KinkAmplitude(Slit P, Slit Q, const Context& ctx, const QuadratureSpec& q,
                bool keep_quadratic = false)
      : ctx_(ctx), quad_(keep_quadratic) {
    if (P == Q) throw ValidationError("slit_sequence", "kink endpoints must differ");
    q.check();
    src_ = ctx.extent(P);
    dst_ = ctx.extent(Q);
    prefactor_ = ctx.gamma * stationary_phase_prefactor(2.5) * kInclinationFactor;

    const double span_in = inner_phase_span();
    const double span_out = dst_.width() * (1.0 + kThetaMax) + outer_quadratic_span();
    long p_in = panels_for_phase(span_in, q);
    long p_out = panels_for_phase(span_out, q);

    build(p_in, p_out);
    Complex prev = value_at(0.0);
    while (true) {
      build(p_in * 2, p_out * 2);
      const Complex next = value_at(0.0);
      const double scale = std::max(std::abs(next), 1e-3 * std::abs(prefactor_) * l1_);
      const double err = std::abs(next - prev) / std::max(scale, 1e-300);
      if (err <= q.tolerance) return;
      if (p_in > q.max_panels / 2 || p_out > q.max_panels / 2)
        throw ConvergenceError("kink amplitude did not converge within the panel budget", err);
      p_in *= 2;
      p_out *= 2;
      prev = next;
    }
  }

  Complex at(double theta) const {
    require_theta(theta);
    return value_at(theta);
  }

private:
  double inner_phase_span() const {
    double span = src_.width();  // hop phase |y2-y1| advances at unit rate
    if (quad_) {
      const double ym = std::max(std::abs(src_.lo), std::abs(src_.hi));
      span += ym * src_.width() / ctx_.geom.L;
    }
    return span;
  }

  double outer_quadratic_span() const {
    if (!quad_) return 0.0;
    const double ym = std::max(std::abs(dst_.lo), std::abs(dst_.hi));
    return (ym + kThetaMax * ctx_.geom.D) * dst_.width() / ctx_.geom.D;
  }

  void build(long panels_in, long panels_out) {
    const GaussRule& rule = gauss_legendre(kPanelOrder);
    const std::size_t n_out = static_cast<std::size_t>(panels_out) * kPanelOrder;
    y2_.resize(n_out);
    w2_.resize(n_out);
    inner_.resize(n_out);

    const double hp = dst_.width() / static_cast<double>(panels_out);
    for (long p = 0; p < panels_out; ++p) {
      const double mid = dst_.lo + hp * (static_cast<double>(p) + 0.5);
      for (int i = 0; i < kPanelOrder; ++i) {
        const std::size_t idx = static_cast<std::size_t>(p) * kPanelOrder + static_cast<std::size_t>(i);
        y2_[idx] = mid + 0.5 * hp * rule.x[static_cast<std::size_t>(i)];
        w2_[idx] = 0.5 * hp * rule.w[static_cast<std::size_t>(i)];
      }
    }
    const double L = ctx_.geom.L;
    l1_ = 0;
    for (std::size_t j = 0; j < n_out; ++j) {
      const double y2 = y2_[j];
      inner_[j] = integrate_panels(
          [&](double y1) {
            const double s = std::abs(y2 - y1);
            const double phase = quad_ ? s + y1 * y1 / (2 * L) : s;
            return std::polar(1.0 / std::sqrt(s), phase);
          },
          src_.lo, src_.hi, panels_in);
      l1_ += w2_[j] * std::abs(inner_[j]);
    }
  }

  Complex value_at(double theta) const {
    const double D = ctx_.geom.D;
    const double yD = theta * D;
    const Complex sum = pairwise_sum<Complex>(y2_.size(), [&](std::size_t j) {
      const double y2 = y2_[j];
      const double phase = quad_ ? (yD - y2) * (yD - y2) / (2 * D) : -y2 * theta;
      return w2_[j] * inner_[j] * std::polar(1.0, phase);
    });
    return prefactor_ * sum;
  }

  Context ctx_;
  bool quad_;
  Extent src_, dst_;
  Complex prefactor_;
  double l1_ = 0;
  std::vector<double> y2_, w2_;
  std::vector<Complex> inner_;
};

/// One-shot psi_{P,Q}; builds the cache and evaluates at a single angle.
inline Complex nonclassical_amplitude_quadrature(Slit P, Slit Q, double theta, const Context& ctx,
                                                 const QuadratureSpec& q,
                                                 bool keep_quadratic = false) {
  return KinkAmplitude(P, Q, ctx, q, keep_quadratic).at(theta);
}

/// True when the slit gap is too small to trust the boundary-term asymptotics.
inline bool asymptotic_gap_marginal(const Context& ctx) {
  return ctx.geom.d - ctx.geom.w < kAsymptoticGapMin;
}

/// Leading integration-by-parts approximation of psi_{P,Q}: the eight
/// boundary terms at the four corners of the integration rectangle, with the
/// Heaviside selection of the |y2 - y1| branch.
inline Complex nonclassical_amplitude_asymptotic(Slit P, Slit Q, double theta,
                                                 const Context& ctx) {
  require_theta(theta);
  if (P == Q) throw ValidationError("slit_sequence", "kink endpoints must differ");
  const Extent src = ctx.extent(P);
  const Extent dst = ctx.extent(Q);

  // bracket(c, y2): the boundary term of the inner integral at y1 = c,
  // evaluated at outer position y2 (branch chosen by the sign of y2 - c).
  auto bracket = [&](double c, double y2) {
    const double s = std::abs(y2 - c);
    return std::polar(1.0 / std::sqrt(s), s - y2 * theta);
  };
  const Complex integral = (bracket(src.hi, dst.hi) - bracket(src.hi, dst.lo)) -
                           (bracket(src.lo, dst.hi) - bracket(src.lo, dst.lo));
  return ctx.gamma * stationary_phase_prefactor(2.5) * kInclinationFactor * integral;
}

// ---------------------------------------------------------------------------
// Multi-kink paths
// ---------------------------------------------------------------------------

/// An ordered slit sequence: 1 slit = classical, 2 = single kink, 3 = double
/// kink. Consecutive slits must differ.
struct PathSpec {
  std::vector<Slit> slits;
  QuadratureSpec quadrature;

  void check() const {
    if (slits.empty() || slits.size() > 3)
      throw ValidationError("slit_sequence", "path must visit 1 to 3 slits");
    for (std::size_t i = 1; i < slits.size(); ++i)
      if (slits[i] == slits[i - 1])
        throw ValidationError("slit_sequence", "consecutive slits must be distinct");
    quadrature.check();
  }
};

namespace detail {

/// Triple integral for a two-kink path S1 -> S2 -> S3 at fixed panel counts.
/// The two inner integrals are theta independent in y2 only through their
/// hop phases; they are evaluated per outer node.
inline PanelSum two_kink_value(const Extent& e1, const Extent& e2, const Extent& e3, double theta,
                               long panels_inner, long panels_outer) {
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  const double hp = e2.width() / static_cast<double>(panels_outer);
  std::vector<Complex> outer_terms;
  outer_terms.reserve(static_cast<std::size_t>(panels_outer) * kPanelOrder);
  double l1 = 0;
  for (long p = 0; p < panels_outer; ++p) {
    const double mid = e2.lo + hp * (static_cast<double>(p) + 0.5);
    for (int i = 0; i < kPanelOrder; ++i) {
      const double y2 = mid + 0.5 * hp * rule.x[static_cast<std::size_t>(i)];
      const double w2 = 0.5 * hp * rule.w[static_cast<std::size_t>(i)];
      const Complex first = integrate_panels(
          [&](double y1) {
            const double s = std::abs(y2 - y1);
            return std::polar(1.0 / std::sqrt(s), s);
          },
          e1.lo, e1.hi, panels_inner);
      const Complex last = integrate_panels(
          [&](double y3) {
            const double s = std::abs(y3 - y2);
            return std::polar(1.0 / std::sqrt(s), s - y3 * theta);
          },
          e3.lo, e3.hi, panels_inner);
      outer_terms.push_back(w2 * first * last);
      l1 += std::abs(outer_terms.back());
    }
  }
  return {pairwise_sum<Complex>(outer_terms.size(), [&](std::size_t j) { return outer_terms[j]; }),
          l1};
}

}  // namespace detail

/// Amplitude of a two-kink path (triple-integral generalization of the
/// single-kink form): hop factors |y2-y1|^{-1/2} |y3-y2|^{-1/2}, phase
/// e^{i(|y2-y1| + |y3-y2|) - i y3 theta}, one extra stationary-phase factor
/// (1/(2 pi i))^{1/2} and one extra 1/4 inclination factor for the added hop.
///
/// Note the structural caveat: for a monotone sequence (A,B,C) the two hop
/// phases are collinear (|y2-y1| + |y3-y2| = |y3-y1|), the middle integral is
/// not oscillatory, and the "correction" is of the same order as psi_{A,C}
/// itself: it reconstructs straight-through propagation via the composition
/// rule rather than adding an independent path class. Non-monotone sequences
/// are genuinely suppressed.
inline Complex multi_kink_amplitude(const PathSpec& path, double theta, const Context& ctx) {
  path.check();
  require_theta(theta);
  if (path.slits.size() != 3)
    throw ValidationError("slit_sequence", "multi_kink_amplitude needs a 3-slit path");
  const Extent e1 = ctx.extent(path.slits[0]);
  const Extent e2 = ctx.extent(path.slits[1]);
  const Extent e3 = ctx.extent(path.slits[2]);
  const QuadratureSpec& q = path.quadrature;

  const Complex pref = ctx.gamma * stationary_phase_prefactor(3.0) *
                       (kInclinationFactor * kInclinationFactor);

  long p_in = panels_for_phase(std::max(e1.width(), e3.width()) * (1.0 + kThetaMax), q);
  long p_out = panels_for_phase(e2.width() * (2.0 + kThetaMax), q);
  PanelSum prev = detail::two_kink_value(e1, e2, e3, theta, p_in, p_out);
  while (true) {
    const PanelSum next = detail::two_kink_value(e1, e2, e3, theta, p_in * 2, p_out * 2);
    const double err = std::abs(next.value - prev.value) / std::max(next.scale(), 1e-300);
    if (err <= q.tolerance) return pref * next.value;
    if (p_in > q.max_panels / 2 || p_out > q.max_panels / 2)
      throw ConvergenceError("two-kink amplitude did not converge within the panel budget", err);
    p_in *= 2;
    p_out *= 2;
    prev = next;
  }
}

/// Dispatch on path length: classical, single kink, or double kink.
inline Complex path_amplitude(const PathSpec& path, double theta, const Context& ctx) {
  path.check();
  switch (path.slits.size()) {
    case 1: return classical_amplitude(path.slits[0], theta, ctx, path.quadrature);
    case 2:
      return nonclassical_amplitude_quadrature(path.slits[0], path.slits[1], theta, ctx,
                                               path.quadrature);
    default: return multi_kink_amplitude(path, theta, ctx);
  }
}

// ---------------------------------------------------------------------------
// Sorkin combination
// ---------------------------------------------------------------------------

enum class EpsilonMode { full, first_order };

inline constexpr std::array<std::pair<Slit, Slit>, 6> kOrderedPairs = {{
    {Slit::A, Slit::B},
    {Slit::A, Slit::C},
    {Slit::B, Slit::A},
    {Slit::B, Slit::C},
    {Slit::C, Slit::A},
    {Slit::C, Slit::B},
}};

/// Shared evaluation state for a geometry: classical amplitudes on demand and
/// the six theta-independent kink caches. Immutable once built; safe to use
/// from a parallel map over detector angles.
class Evaluator {
public:
  Evaluator(const Context& ctx, const QuadratureSpec& q, bool keep_quadratic = false,
            bool include_nonclassical = true)
      : ctx_(ctx), q_(q), quad_(keep_quadratic), nonclassical_(include_nonclassical) {
    q.check();
    if (nonclassical_)
      for (std::size_t i = 0; i < kOrderedPairs.size(); ++i)
        kinks_[i].emplace(kOrderedPairs[i].first, kOrderedPairs[i].second, ctx_, q_, quad_);
  }

  Complex classical(Slit s, double theta) const {
    return classical_amplitude(s, theta, ctx_, q_, quad_);
  }

  Complex kink(Slit P, Slit Q, double theta) const {
    if (!nonclassical_) return {0.0, 0.0};
    for (std::size_t i = 0; i < kOrderedPairs.size(); ++i)
      if (kOrderedPairs[i].first == P && kOrderedPairs[i].second == Q)
        return kinks_[i]->at(theta);
    throw ValidationError("slit_sequence", "kink endpoints must differ");
  }

  /// Intensity of one open-slit configuration: |sum of classical amplitudes
  /// plus the configuration's single-kink amplitudes|^2.
  double configuration_intensity(const SlitSet& s, double theta) const {
    Complex total = 0;
    for (Slit p : s.slits()) total += classical(p, theta);
    if (nonclassical_)
      for (Slit p : s.slits())
        for (Slit r : s.slits())
          if (p != r) total += kink(p, r, theta);
    return std::norm(total);
  }

  SevenIntensities intensities(double theta) const {
    return {configuration_intensity(SlitSet{Slit::A, Slit::B, Slit::C}, theta),
            configuration_intensity(SlitSet{Slit::A, Slit::B}, theta),
            configuration_intensity(SlitSet{Slit::B, Slit::C}, theta),
            configuration_intensity(SlitSet{Slit::C, Slit::A}, theta),
            configuration_intensity(SlitSet{Slit::A}, theta),
            configuration_intensity(SlitSet{Slit::B}, theta),
            configuration_intensity(SlitSet{Slit::C}, theta)};
  }

  double epsilon(double theta, EpsilonMode mode) const {
    if (mode == EpsilonMode::full) return sorkin_combination(intensities(theta));
    const Complex a = classical(Slit::A, theta);
    const Complex b = classical(Slit::B, theta);
    const Complex c = classical(Slit::C, theta);
    const Complex sum = std::conj(a) * (kink(Slit::B, Slit::C, theta) + kink(Slit::C, Slit::B, theta)) +
                        std::conj(b) * (kink(Slit::A, Slit::C, theta) + kink(Slit::C, Slit::A, theta)) +
                        std::conj(c) * (kink(Slit::A, Slit::B, theta) + kink(Slit::B, Slit::A, theta));
    return 2.0 * sum.real();
  }

  /// Central-maximum normalization: I_ABC at theta = 0 (the symmetric
  /// geometry puts the maximum there).
  double delta() const {
    return configuration_intensity(SlitSet{Slit::A, Slit::B, Slit::C}, 0.0);
  }

  double kappa(double theta, EpsilonMode mode) const { return epsilon(theta, mode) / delta(); }

  /// Largest single-kink magnitude at an angle; bounds the second-order terms
  /// dropped by the first_order mode.
  double max_kink_magnitude(double theta) const {
    double m = 0;
    for (auto [p, r] : kOrderedPairs) m = std::max(m, std::abs(kink(p, r, theta)));
    return m;
  }

  const Context& context() const { return ctx_; }

private:
  Context ctx_;
  QuadratureSpec q_;
  bool quad_, nonclassical_;
  std::array<std::optional<KinkAmplitude>, 6> kinks_;
};

/// epsilon(theta) per the seven-configuration combination (full) or the
/// first-order cross-term form.
inline double sorkin_epsilon(double theta, const Context& ctx, const QuadratureSpec& q,
                             EpsilonMode mode, bool include_nonclassical = true,
                             bool keep_quadratic = false) {
  return Evaluator(ctx, q, keep_quadratic, include_nonclassical).epsilon(theta, mode);
}

/// kappa(theta) = epsilon(theta) / I_ABC(0) over a detector grid.
///
/// keep_quadratic (default on) retains the finite-distance quadratic phases,
/// which is what makes the profile sensitive to the Fresnel number; with it
/// off the result is the pure far-field limit, independent of L and D.
inline KappaProfile kappa_numeric_profile(const Geometry& g, const DetectorGrid& grid,
                                          const QuadratureSpec& q,
                                          EpsilonMode mode = EpsilonMode::full,
                                          bool keep_quadratic = true) {
  const CheckedGeometry checked = validate_geometry(g);
  const Context ctx = Context::from_geometry(g);
  const Evaluator eval(ctx, q, keep_quadratic);
  const double delta = eval.delta();

  KappaProfile out;
  out.abscissa = grid.theta;
  out.kappa.resize(grid.theta.size());
  out.method = Method::fraunhofer;
  out.geometry = g;
  out.quadrature = q;
  parallel_for(grid.theta.size(), [&](std::size_t i) {
    out.kappa[i] = eval.epsilon(grid.theta[i], mode) / delta;
  });

  out.notes.emplace_back(mode == EpsilonMode::full ? "mode: full" : "mode: first-order");
  out.notes.emplace_back(keep_quadratic ? "phases: quadratic" : "phases: far-field");
  for (Warning w : checked.warnings) out.notes.emplace_back(warning_name(w));
  if (asymptotic_gap_marginal(ctx))
    out.notes.emplace_back(std::string(warning_name(Warning::asymptotic_gap_small)));
  return out;
}

}  // namespace sorkin::fraunhofer
