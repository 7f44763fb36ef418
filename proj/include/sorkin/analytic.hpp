#pragma once
#include <cmath>
#include <numbers>
#include <string>

#include "sorkin/geometry.hpp"
#include "sorkin/kappa.hpp"
#include "sorkin/reduce.hpp"

namespace sorkin::analytic {

inline constexpr double kPi = std::numbers::pi;

/// The closed-form envelope f(d, w, theta): the bracketed three-term sum minus
/// the four square-root-weighted corrections. Inputs are k-rescaled
/// (dimensionless) lengths.
///
/// Each correction term carries 1/cos(w theta / 2); the removable blow-up at
/// its zeros cancels against sin(w theta) in the kappa prefactor, so use
/// kappa_analytic for full-domain evaluation and keep f_envelope to small
/// w*theta.
inline double f_envelope(double d, double w, double theta) {
  if (!(d > w) || !(w > 0))
    throw ValidationError("slit_separation", "needs d > w > 0 (dimensionless)");
  if (std::abs(theta) > kThetaMax)
    throw ValidationError("theta", "|theta| exceeds the 0.2 rad domain clamp");

  const double bracket = 2 * std::cos(2 * d * theta) * std::cos(d - kPi / 4) +
                         std::numbers::sqrt2 * std::cos(d * theta) * std::cos(2 * d - kPi / 4) +
                         2 * std::cos(d * theta) * std::cos(d - kPi / 4);
  const double c = std::cos(w * theta / 2);
  const double t2 = 2 * std::sqrt(d / (d - w)) * std::cos((d - w) * theta / 2) / c *
                    std::cos(3 * d * theta / 2) * std::cos(d - w - kPi / 4);
  const double t3 = 2 * std::sqrt(d / (d + w)) * std::cos((d + w) * theta / 2) / c *
                    std::cos(3 * d * theta / 2) * std::cos(d + w - kPi / 4);
  const double t4 = std::sqrt(d / (2 * d - w)) * std::cos((2 * d - w) * theta / 2) / c *
                    std::cos(2 * d - w - kPi / 4);
  const double t5 = std::sqrt(d / (2 * d + w)) * std::cos((2 * d + w) * theta / 2) / c *
                    std::cos(2 * d + w - kPi / 4);
  return bracket - t2 - t3 - t4 - t5;
}

/// kappa(theta) in dimensionless variables:
///   kappa = [1 / (9 sqrt(2 pi d))] * [sin(w theta) / (w^2 theta)] * f(d, w, theta)
///
/// Evaluated with sin(w theta)/cos(w theta/2) combined to 2 sin(w theta/2) so
/// the correction terms stay finite where cos(w theta/2) vanishes, and with
/// the removable theta = 0 singularity taken by its limit.
inline double kappa_analytic_at(double d, double w, double theta) {
  if (!(d > w) || !(w > 0))
    throw ValidationError("slit_separation", "needs d > w > 0 (dimensionless)");
  if (std::abs(theta) > kThetaMax)
    throw ValidationError("theta", "|theta| exceeds the 0.2 rad domain clamp");

  // sinc-type factors; both tend to 1/w at theta = 0
  const double S = theta == 0 ? 1.0 / w : std::sin(w * theta) / (w * w * theta);
  const double T = theta == 0 ? 1.0 / w : 2 * std::sin(w * theta / 2) / (w * w * theta);

  const double bracket = 2 * std::cos(2 * d * theta) * std::cos(d - kPi / 4) +
                         std::numbers::sqrt2 * std::cos(d * theta) * std::cos(2 * d - kPi / 4) +
                         2 * std::cos(d * theta) * std::cos(d - kPi / 4);
  const double corrections =
      2 * std::sqrt(d / (d - w)) * std::cos((d - w) * theta / 2) * std::cos(3 * d * theta / 2) *
          std::cos(d - w - kPi / 4) +
      2 * std::sqrt(d / (d + w)) * std::cos((d + w) * theta / 2) * std::cos(3 * d * theta / 2) *
          std::cos(d + w - kPi / 4) +
      std::sqrt(d / (2 * d - w)) * std::cos((2 * d - w) * theta / 2) * std::cos(2 * d - w - kPi / 4) +
      std::sqrt(d / (2 * d + w)) * std::cos((2 * d + w) * theta / 2) * std::cos(2 * d + w - kPi / 4);

  return (S * bracket - T * corrections) / (9 * std::sqrt(2 * kPi * d));
}

inline double kappa_analytic_at(const Geometry& g, double theta) {
  const DimensionlessGeometry s = rescale_to_dimensionless(g);
  return kappa_analytic_at(s.d, s.w, theta);
}

/// Closed-form kappa over a detector grid.
inline KappaProfile kappa_analytic(const Geometry& g, const DetectorGrid& grid) {
  const CheckedGeometry checked = validate_geometry(g);
  const DimensionlessGeometry s = rescale_to_dimensionless(g);

  KappaProfile out;
  out.abscissa = grid.theta;
  out.kappa.resize(grid.theta.size());
  out.method = Method::analytic;
  out.geometry = g;
  parallel_for(grid.theta.size(),
               [&](std::size_t i) { out.kappa[i] = kappa_analytic_at(s.d, s.w, grid.theta[i]); });

  for (Warning w : checked.warnings) out.notes.emplace_back(warning_name(w));
  if (fresnel_number(g) > kFraunhoferMarginalF)
    out.notes.emplace_back(std::string(warning_name(Warning::fraunhofer_marginal)) +
                           ": Fresnel number " + std::to_string(fresnel_number(g)));
  return out;
}

/// |kappa_max| ~ 0.03 lambda^{3/2} / (d^{1/2} w); a strict upper bound on the
/// closed form in the kw >> 1, d >> w regime.
inline double kappa_bound(const Geometry& g) {
  return 0.03 * std::pow(g.wavelength, 1.5) / (std::sqrt(g.slit_separation) * g.slit_width);
}

// ---------------------------------------------------------------------------
// Thick-slit adjustment
// ---------------------------------------------------------------------------

/// Lossy-material model for the effective-width adjustment. The wave decays
/// by exp(-2 pi n_I x / lambda) at depth x inside the slit wall.
struct ThickSlitModel {
  double refractive_index_imag = 2.61;  ///< n_I for steel
  double refractive_index_real = 2.29;  ///< n_R, recorded but unused
  double attenuation_threshold = 0.30;  ///< transmission treated as "open"
  double amplitude_factor = 4.0;        ///< kink doubling across two slit faces

  void check() const {
    if (!(refractive_index_imag > 0))
      throw ValidationError("refractive_index_imag", "must be > 0");
    if (!(attenuation_threshold > 0 && attenuation_threshold < 1))
      throw ValidationError("attenuation_threshold", "must lie in (0, 1)");
    if (!(amplitude_factor > 0)) throw ValidationError("amplitude_factor", "must be > 0");
  }
};

/// Solves exp(-2 pi n_I x / lambda) = threshold for the penetration depth x
/// and widens the slit by 2x on the two walls: w_eff = w + 2x.
inline double effective_width(double w, double lambda, const ThickSlitModel& model) {
  model.check();
  const double x = -lambda * std::log(model.attenuation_threshold) /
                   (2 * kPi * model.refractive_index_imag);
  return w + 2 * x;
}

/// Thin-slit closed form adjusted for slit-plane thickness: kappa is the
/// analytic profile at the effective width, scaled by the amplitude factor
/// (in-phase kinks on the entry and exit faces).
inline KappaProfile thick_slit_profile(const Geometry& g, const ThickSlitModel& model,
                                       const DetectorGrid& grid) {
  model.check();
  validate_geometry(g);
  const double w_eff = effective_width(g.slit_width, g.wavelength, model);

  Geometry adjusted = g;
  adjusted.slit_width = w_eff;
  KappaProfile out = kappa_analytic(adjusted, grid);
  for (double& v : out.kappa) v *= model.amplitude_factor;

  out.geometry = g;  // profile is *about* the original geometry
  out.notes.emplace_back("thick-slit: w -> w_eff = " + std::to_string(w_eff) +
                         " m (n_I = " + std::to_string(model.refractive_index_imag) +
                         ", threshold = " + std::to_string(model.attenuation_threshold) + ")");
  out.notes.emplace_back("thick-slit: amplitude factor " +
                         std::to_string(model.amplitude_factor));
  if (g.thickness > 10 * g.wavelength)
    out.notes.emplace_back(std::string(warning_name(Warning::thickness_large)));
  return out;
}

}  // namespace sorkin::analytic
