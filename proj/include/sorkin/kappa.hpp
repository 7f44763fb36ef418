#pragma once
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sorkin/geometry.hpp"
#include "sorkin/quadrature.hpp"

namespace sorkin {

enum class Method { analytic, fraunhofer, fresnel };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::fraunhofer: return "fraunhofer";
    case Method::fresnel: return "fresnel";
  }
  return "unknown";
}

inline Method method_from_name(std::string_view name) {
  if (name == "analytic") return Method::analytic;
  if (name == "fraunhofer") return Method::fraunhofer;
  if (name == "fresnel") return Method::fresnel;
  throw ValidationError("method", "unknown method '" + std::string(name) + "'");
}

/// A sampled kappa curve (versus theta, or versus D for scans) with the
/// provenance needed to reproduce it.
struct KappaProfile {
  std::vector<double> abscissa;
  std::vector<double> kappa;
  Method method = Method::analytic;
  Geometry geometry;
  std::optional<QuadratureSpec> quadrature;
  std::vector<std::string> notes;  ///< regime warnings, substitutions, flags
};

/// The seven intensities entering the Sorkin combination.
struct SevenIntensities {
  double I_ABC = 0, I_AB = 0, I_BC = 0, I_CA = 0, I_A = 0, I_B = 0, I_C = 0;
};

/// epsilon = I_ABC - (I_AB + I_BC + I_CA) + (I_A + I_B + I_C).
/// Zero (to rounding) whenever the intensities are built additively from
/// per-slit amplitudes; non-classical path terms make it non-zero.
inline double sorkin_combination(const SevenIntensities& I) {
  return I.I_ABC - (I.I_AB + I.I_BC + I.I_CA) + (I.I_A + I.I_B + I.I_C);
}

/// Intensities built purely additively from per-slit amplitudes: each
/// configuration's wave is the sum of its open slits' amplitudes.
inline SevenIntensities additive_intensities(std::complex<double> a, std::complex<double> b,
                                             std::complex<double> c) {
  auto I = [](std::complex<double> z) { return std::norm(z); };
  return {I(a + b + c), I(a + b), I(b + c), I(c + a), I(a), I(b), I(c)};
}

}  // namespace sorkin
