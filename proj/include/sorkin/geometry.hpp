#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sorkin {

/// Raised when an input violates a hard invariant. Carries the name of the
/// offending field so callers (and the CLI) can point at it.
class ValidationError : public std::invalid_argument {
public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Slit/apparatus parameter set. All lengths in meters.
///
/// Slit y-extents are A: [d-w/2, d+w/2], B: [-w/2, w/2], C: [-d-w/2, -d+w/2]
/// with d the centre-to-centre separation and w the width.
struct Geometry {
  double slit_width = 0;       ///< w
  double slit_separation = 0;  ///< d, centre to centre
  double source_distance = 0;  ///< L, source to slit plane
  double screen_distance = 0;  ///< D, slit plane to detector
  double thickness = 0;        ///< t, slit-plane thickness (>= 0)
  double slit_height = 0;      ///< h, extent along z (used by the fresnel module)
  double wavelength = 0;       ///< lambda

  double wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }
};

/// Regime warnings attached by validate_geometry and the kappa evaluators.
enum class Warning : std::uint8_t {
  wavelength_not_small,      // lambda >= w: the kw >> 1 bound regime fails
  beyond_far_field,          // Fresnel number too large for any Fraunhofer claim
  fraunhofer_marginal,       // Fresnel number > 1e-3: expect >10% analytic error
  asymptotic_gap_small,      // k(d-w) < 10: integration-by-parts expansion suspect
  thickness_large,           // t > 10 lambda: thin-slit phase argument fails
  paraxial_suspect           // detector distance too small for paraxial trust
};

std::string_view warning_name(Warning w);

inline std::string_view warning_name(Warning w) {
  switch (w) {
    case Warning::wavelength_not_small: return "wavelength-not-small";
    case Warning::beyond_far_field: return "beyond-far-field";
    case Warning::fraunhofer_marginal: return "fraunhofer-marginal";
    case Warning::asymptotic_gap_small: return "asymptotic-gap-small";
    case Warning::thickness_large: return "thickness-large";
    case Warning::paraxial_suspect: return "paraxial-suspect";
  }
  return "unknown";
}

/// A geometry that passed the hard invariants, plus any regime warnings.
struct CheckedGeometry {
  Geometry geometry;
  std::vector<Warning> warnings;

  bool has(Warning w) const {
    for (Warning x : warnings)
      if (x == w) return true;
    return false;
  }
};

/// Fresnel number F = w^2 / (lambda D). Small values indicate far field.
inline double fresnel_number(const Geometry& g) {
  return g.slit_width * g.slit_width / (g.wavelength * g.screen_distance);
}

/// Far-field threshold used by the analytic module's accuracy warning:
/// F <~ 1e-3 keeps the closed-form error below ~10%.
inline constexpr double kFraunhoferMarginalF = 1e-3;
/// Validation threshold beyond which the Fraunhofer picture is not even
/// approximately applicable. Deliberately looser than the accuracy warning.
inline constexpr double kBeyondFarFieldF = 5e-2;

/// Checks the hard invariants and attaches regime warnings.
///
/// Hard failures (throw ValidationError): any non-positive length (t may be
/// zero), or slit overlap d <= w. Warnings: lambda >= w, Fresnel number
/// beyond the far-field validation threshold.
inline CheckedGeometry validate_geometry(const Geometry& g) {
  auto positive = [](double v, const char* field) {
    if (!(v > 0) || !std::isfinite(v))
      throw ValidationError(field, "must be strictly positive");
  };
  positive(g.slit_width, "slit_width");
  positive(g.slit_separation, "slit_separation");
  positive(g.source_distance, "source_distance");
  positive(g.screen_distance, "screen_distance");
  positive(g.slit_height, "slit_height");
  positive(g.wavelength, "wavelength");
  if (!(g.thickness >= 0) || !std::isfinite(g.thickness))
    throw ValidationError("thickness", "must be >= 0");
  if (!(g.slit_separation > g.slit_width))
    throw ValidationError("slit_separation", "slits overlap: d must exceed w");

  CheckedGeometry out{g, {}};
  if (g.wavelength >= g.slit_width)
    out.warnings.push_back(Warning::wavelength_not_small);
  if (fresnel_number(g) > kBeyondFarFieldF)
    out.warnings.push_back(Warning::beyond_far_field);
  return out;
}

/// Geometry with every length multiplied by k = 2 pi / lambda.
/// This is the convention of the closed-form kappa expression and of all
/// Fraunhofer-regime integrals.
struct DimensionlessGeometry {
  double w = 0, d = 0, L = 0, D = 0, t = 0, h = 0;
};

inline DimensionlessGeometry rescale_to_dimensionless(const Geometry& g) {
  const double k = g.wavenumber();
  return {k * g.slit_width, k * g.slit_separation, k * g.source_distance,
          k * g.screen_distance, k * g.thickness, k * g.slit_height};
}

/// Inverse of rescale_to_dimensionless for the given wavelength.
inline Geometry rescale_to_physical(const DimensionlessGeometry& s, double wavelength) {
  const double k = 2.0 * std::numbers::pi / wavelength;
  return {s.w / k, s.d / k, s.L / k, s.D / k, s.t / k, s.h / k, wavelength};
}

// ---------------------------------------------------------------------------
// Slit configurations
// ---------------------------------------------------------------------------

enum class Slit : std::uint8_t { A = 0, B = 1, C = 2 };

inline char slit_label(Slit s) { return s == Slit::A ? 'A' : (s == Slit::B ? 'B' : 'C'); }

/// Non-empty subset of {A, B, C}: which slits are open in a configuration.
class SlitSet {
public:
  explicit SlitSet(std::initializer_list<Slit> slits) {
    for (Slit s : slits) bits_ |= bit(s);
    if (bits_ == 0) throw ValidationError("open_slits", "configuration must be non-empty");
  }

  /// Parses labels such as "AB" or "abc". Duplicates and unknown labels reject.
  static SlitSet parse(std::string_view labels) {
    SlitSet out;
    for (char c : labels) {
      Slit s;
      switch (c) {
        case 'A': case 'a': s = Slit::A; break;
        case 'B': case 'b': s = Slit::B; break;
        case 'C': case 'c': s = Slit::C; break;
        default: throw ValidationError("open_slits", std::string("unknown slit label '") + c + "'");
      }
      if (out.bits_ & bit(s))
        throw ValidationError("open_slits", std::string("slit '") + c + "' listed twice");
      out.bits_ |= bit(s);
    }
    if (out.bits_ == 0) throw ValidationError("open_slits", "configuration must be non-empty");
    return out;
  }

  bool contains(Slit s) const { return bits_ & bit(s); }
  int count() const { return (bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }

  std::vector<Slit> slits() const {
    std::vector<Slit> v;
    for (Slit s : {Slit::A, Slit::B, Slit::C})
      if (contains(s)) v.push_back(s);
    return v;
  }

private:
  SlitSet() = default;
  static std::uint8_t bit(Slit s) { return static_cast<std::uint8_t>(1u << static_cast<int>(s)); }
  std::uint8_t bits_ = 0;
};

// ---------------------------------------------------------------------------
// Detector grid
// ---------------------------------------------------------------------------

/// Angular domain clamp. The closed form assumes theta << 1; 0.2 rad keeps the
/// neglected remainder small while covering the +-3 degree plots.
inline constexpr double kThetaMax = 0.2;

/// Ordered detector positions theta = y_D / D (dimensionless).
struct DetectorGrid {
  std::vector<double> theta;
  bool degrees_io = true;  ///< whether external I/O renders theta in degrees

  /// Uniform grid of `count` points over [lo, hi] (radians).
  /// count == 1 places the single point at lo (lo must equal hi).
  /// A symmetric range (lo == -hi) is built by mirroring, so theta_i is the
  /// exact bitwise negation of theta_{n-1-i}.
  static DetectorGrid uniform(double lo, double hi, int count, bool degrees_io = true) {
    if (count < 1) throw ValidationError("positions", "grid needs at least one point");
    if (!(lo <= hi)) throw ValidationError("positions", "range must be increasing");
    if (count == 1 && lo != hi)
      throw ValidationError("positions", "a single-point grid needs lo == hi");
    std::vector<double> t(static_cast<std::size_t>(count));
    if (count > 1 && lo == -hi) {
      for (int j = count - 1; 2 * j > count - 1; --j) {
        const double v = hi * static_cast<double>(2 * j - (count - 1)) / (count - 1);
        t[static_cast<std::size_t>(j)] = v;
        t[static_cast<std::size_t>(count - 1 - j)] = -v;
      }
      if (count % 2 == 1) t[static_cast<std::size_t>(count / 2)] = 0.0;
    } else {
      for (int i = 0; i < count; ++i)
        t[static_cast<std::size_t>(i)] =
            count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    }
    return DetectorGrid::of(std::move(t), degrees_io);
  }

  static DetectorGrid uniform_degrees(double lo_deg, double hi_deg, int count) {
    constexpr double rad = std::numbers::pi / 180.0;
    return uniform(lo_deg * rad, hi_deg * rad, count, true);
  }

  /// Wraps an explicit list; enforces strict ordering and the theta clamp.
  static DetectorGrid of(std::vector<double> t, bool degrees_io = true) {
    if (t.empty()) throw ValidationError("positions", "grid needs at least one point");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (std::abs(t[i]) > kThetaMax)
        throw ValidationError("positions", "|theta| exceeds the 0.2 rad domain clamp");
      if (i > 0 && !(t[i] > t[i - 1]))
        throw ValidationError("positions", "positions must be strictly increasing");
    }
    return DetectorGrid{std::move(t), degrees_io};
  }
};

// ---------------------------------------------------------------------------
// Experiment presets
// ---------------------------------------------------------------------------

enum class Preset { photon, electron, fdtd };

/// Published parameter sets.
///   photon   — 30 um slits, 100 um pitch, 810 nm, L = D = 18.1 cm
///   electron — 62 nm slits, 272 nm pitch, 50 pm, L = 30.5 cm, D = 24 cm
///   fdtd     — w = lambda, d = 3 lambda, t = 4 lambda, far field (L = D = 1e4 lambda)
///
/// `fdtd_scale` sets lambda for the fdtd preset (the case is scale free).
inline Geometry preset(Preset p, double fdtd_scale = 1.0) {
  switch (p) {
    case Preset::photon:
      return Geometry{30e-6, 100e-6, 0.181, 0.181, 0.0, 300e-6, 810e-9};
    case Preset::electron:
      // Slit height is not part of the published set; 4 um is representative
      // of nanofabricated slits and is irrelevant to the far-field modules.
      return Geometry{62e-9, 272e-9, 0.305, 0.24, 0.0, 4e-6, 50e-12};
    case Preset::fdtd: {
      const double lam = fdtd_scale;
      if (!(lam > 0)) throw ValidationError("wavelength", "fdtd scale must be positive");
      return Geometry{lam, 3 * lam, 1e4 * lam, 1e4 * lam, 4 * lam, 100 * lam, lam};
    }
  }
  throw ValidationError("preset", "unknown preset");
}

inline Geometry preset(std::string_view name, double fdtd_scale = 1.0) {
  if (name == "photon") return preset(Preset::photon);
  if (name == "electron") return preset(Preset::electron);
  if (name == "fdtd") return preset(Preset::fdtd, fdtd_scale);
  throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace sorkin
