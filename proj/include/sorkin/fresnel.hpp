#pragma once
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sorkin/fft.hpp"
#include "sorkin/fraunhofer.hpp"
#include "sorkin/geometry.hpp"
#include "sorkin/kappa.hpp"
#include "sorkin/reduce.hpp"

namespace sorkin::fresnel {

using Complex = std::complex<double>;

enum class Plane { source, slit, detector };

/// A point of the propagation problem. x is the longitudinal station
/// (source at -L, slit plane at 0, detector plane at +D); y, z transverse.
struct AperturePoint {
  Plane plane = Plane::slit;
  double x = 0, y = 0, z = 0;

  static AperturePoint source(double L) { return {Plane::source, -L, 0, 0}; }
  static AperturePoint slit(double y, double z) { return {Plane::slit, 0, y, z}; }
  static AperturePoint detector(double D, double y, double z = 0) {
    return {Plane::detector, D, y, z};
  }
};

/// Free Helmholtz propagator K(r1, r2) = (k / 2 pi i) e^{ik|r1-r2|} / |r1-r2|
/// with the full 3D Euclidean distance. Normalized by the composition rule.
inline Complex exact_propagator(const AperturePoint& r1, const AperturePoint& r2, double k) {
  const double dx = r1.x - r2.x, dy = r1.y - r2.y, dz = r1.z - r2.z;
  const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (!(r > 0)) throw ValidationError("points", "propagator endpoints must be distinct");
  // k/(2 pi i) = -i k/(2 pi)
  return Complex(0.0, -k / (2 * std::numbers::pi)) * std::polar(1.0 / r, k * r);
}

inline Complex propagator_kernel(double distance, double k) {
  return Complex(0.0, -k / (2 * std::numbers::pi)) * std::polar(1.0 / distance, k * distance);
}

// ---------------------------------------------------------------------------
// Aperture discretization
// ---------------------------------------------------------------------------

/// Midpoint-rule resolution per slit: n_y cells across the width, n_z across
/// the height. Cells must satisfy the lambda/4 diagonal rule.
struct RiemannGrid {
  int n_y = 0;
  int n_z = 0;

  double dy(const Geometry& g) const { return g.slit_width / n_y; }
  double dz(const Geometry& g) const { return g.slit_height / n_z; }

  double cell_diagonal(const Geometry& g) const {
    return std::hypot(dy(g), dz(g));
  }

  void check(const Geometry& g) const {
    if (n_y < 16) throw ValidationError("n_y", "grid needs at least 16 cells per slit width");
    if (n_z < 16) throw ValidationError("n_z", "grid needs at least 16 cells per slit height");
    if (cell_diagonal(g) > g.wavelength / 4)
      throw ValidationError("grid", "cell diagonal exceeds lambda/4");
  }

  /// Smallest compliant grid scaled by the integer `refine` (default 2x: the
  /// lambda/4 minimum leaves a several-percent phase-sampling bias in the
  /// kink sums; one refinement brings the change-under-refinement below 2%).
  static RiemannGrid for_geometry(const Geometry& g, int refine = 2) {
    if (refine < 1) throw ValidationError("refine", "must be >= 1");
    const double cell = g.wavelength / (4 * std::numbers::sqrt2);
    RiemannGrid grid;
    grid.n_y = refine * std::max(16, static_cast<int>(std::ceil(g.slit_width / cell)));
    grid.n_z = refine * std::max(16, static_cast<int>(std::ceil(g.slit_height / cell)));
    return grid;
  }

  RiemannGrid refined(int factor = 2) const { return {n_y * factor, n_z * factor}; }
};

// ---------------------------------------------------------------------------
// Cached slit-plane fields
// ---------------------------------------------------------------------------

/// Detector-independent state of the exact-propagator path sum for one
/// geometry and grid: the source-illumination field a(p) = K(source -> p) on
/// every slit cell, and for each ordered slit pair (P, Q) the hop field
/// S_PQ(q) = sum_p a(p) K(p -> q), evaluated by FFT convolution over the
/// shared cell lattice (identical to the direct Riemann double sum up to
/// rounding). Amplitudes for any detector point are then cheap dot products.
class SlitFields {
public:
  SlitFields(const Geometry& g, const RiemannGrid& grid, bool include_nonclassical = true)
      : g_(validate_geometry(g).geometry),
        grid_(grid),
        nonclassical_(include_nonclassical),
        k_(g.wavenumber()) {
    grid_.check(g_);
    dy_ = grid_.dy(g_);
    dz_ = grid_.dz(g_);
    const std::size_t ny = static_cast<std::size_t>(grid_.n_y);
    const std::size_t nz = static_cast<std::size_t>(grid_.n_z);

    for (int s = 0; s < 3; ++s) y0_[static_cast<std::size_t>(s)] = slit_low(static_cast<Slit>(s)) + 0.5 * dy_;
    z0_ = -g_.slit_height / 2 + 0.5 * dz_;

    // source illumination per slit
    const double L = g_.source_distance;
    for (int s = 0; s < 3; ++s) {
      auto& field = a_[static_cast<std::size_t>(s)];
      field.resize(ny * nz);
      for (std::size_t i = 0; i < ny; ++i) {
        const double y = y0_[static_cast<std::size_t>(s)] + static_cast<double>(i) * dy_;
        for (std::size_t j = 0; j < nz; ++j) {
          const double z = z0_ + static_cast<double>(j) * dz_;
          field[i * nz + j] = propagator_kernel(std::sqrt(L * L + y * y + z * z), k_);
        }
      }
    }

    if (nonclassical_) build_hop_fields();
  }

  const Geometry& geometry() const { return g_; }
  const RiemannGrid& grid() const { return grid_; }

  /// K(q -> detector) over a slit's cells.
  std::vector<Complex> detector_field(Slit s, double y_D, double D) const {
    const std::size_t ny = static_cast<std::size_t>(grid_.n_y);
    const std::size_t nz = static_cast<std::size_t>(grid_.n_z);
    std::vector<Complex> b(ny * nz);
    for (std::size_t i = 0; i < ny; ++i) {
      const double y = y0_[static_cast<std::size_t>(s)] + static_cast<double>(i) * dy_;
      for (std::size_t j = 0; j < nz; ++j) {
        const double z = z0_ + static_cast<double>(j) * dz_;
        b[i * nz + j] = propagator_kernel(
            std::sqrt(D * D + (y_D - y) * (y_D - y) + z * z), k_);
      }
    }
    return b;
  }

  /// Straight-path amplitude through one slit.
  Complex classical_amplitude(Slit s, const std::vector<Complex>& b) const {
    const auto& a = a_[static_cast<std::size_t>(s)];
    return dy_ * dz_ *
           pairwise_sum<Complex>(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
  }

  /// Single-kink amplitude source -> P -> Q -> detector (b is Q's detector
  /// field). Carries the hop propagator's own k/(2 pi i) normalization inside
  /// S_PQ plus the 1/4 inclination factor.
  Complex kink_amplitude(Slit P, Slit Q, const std::vector<Complex>& bQ) const {
    const auto& S = S_[pair_index(P, Q)];
    const double dA = dy_ * dz_;
    return fraunhofer::kInclinationFactor * dA * dA *
           pairwise_sum<Complex>(S.size(), [&](std::size_t i) { return S[i] * bQ[i]; });
  }

  /// The seven configuration intensities at one detector point.
  SevenIntensities intensities(double y_D, double D) const {
    std::array<std::vector<Complex>, 3> b;
    std::array<Complex, 3> psi;
    for (int s = 0; s < 3; ++s) {
      b[static_cast<std::size_t>(s)] = detector_field(static_cast<Slit>(s), y_D, D);
      psi[static_cast<std::size_t>(s)] =
          classical_amplitude(static_cast<Slit>(s), b[static_cast<std::size_t>(s)]);
    }
    std::array<Complex, 6> T{};
    if (nonclassical_)
      for (std::size_t i = 0; i < fraunhofer::kOrderedPairs.size(); ++i) {
        const auto [P, Q] = fraunhofer::kOrderedPairs[i];
        T[i] = kink_amplitude(P, Q, b[static_cast<std::size_t>(static_cast<int>(Q))]);
      }

    auto intensity = [&](std::initializer_list<Slit> open) {
      Complex total = 0;
      for (Slit p : open) total += psi[static_cast<std::size_t>(static_cast<int>(p))];
      if (nonclassical_)
        for (std::size_t i = 0; i < fraunhofer::kOrderedPairs.size(); ++i) {
          const auto [P, Q] = fraunhofer::kOrderedPairs[i];
          bool hasP = false, hasQ = false;
          for (Slit p : open) {
            hasP |= (p == P);
            hasQ |= (p == Q);
          }
          if (hasP && hasQ) total += T[i];
        }
      return std::norm(total);
    };
    return {intensity({Slit::A, Slit::B, Slit::C}),
            intensity({Slit::A, Slit::B}),
            intensity({Slit::B, Slit::C}),
            intensity({Slit::C, Slit::A}),
            intensity({Slit::A}),
            intensity({Slit::B}),
            intensity({Slit::C})};
  }

  double configuration_intensity(const SlitSet& open, double y_D, double D) const {
    std::array<std::vector<Complex>, 3> b;
    Complex total = 0;
    for (Slit p : open.slits()) {
      b[static_cast<std::size_t>(static_cast<int>(p))] = detector_field(p, y_D, D);
      total += classical_amplitude(p, b[static_cast<std::size_t>(static_cast<int>(p))]);
    }
    if (nonclassical_)
      for (Slit p : open.slits())
        for (Slit q : open.slits())
          if (p != q)
            total += kink_amplitude(p, q, b[static_cast<std::size_t>(static_cast<int>(q))]);
    return std::norm(total);
  }

  double epsilon(double y_D, double D) const { return sorkin_combination(intensities(y_D, D)); }

  /// kappa = epsilon(y_D) / I_ABC(y_D = 0), both at screen distance D.
  double kappa(double y_D, double D) const {
    const double delta = intensities(0.0, D).I_ABC;
    return epsilon(y_D, D) / delta;
  }

private:
  double slit_low(Slit s) const {
    switch (s) {
      case Slit::A: return g_.slit_separation - g_.slit_width / 2;
      case Slit::B: return -g_.slit_width / 2;
      case Slit::C: return -g_.slit_separation - g_.slit_width / 2;
    }
    throw ValidationError("slit", "unknown slit label");
  }

  static std::size_t pair_index(Slit P, Slit Q) {
    for (std::size_t i = 0; i < fraunhofer::kOrderedPairs.size(); ++i)
      if (fraunhofer::kOrderedPairs[i].first == P && fraunhofer::kOrderedPairs[i].second == Q)
        return i;
    throw ValidationError("slit_sequence", "kink endpoints must differ");
  }

  /// Hop fields by zero-padded FFT convolution. The cell lattices of all
  /// slits share (dy, dz), so K(p -> q) depends on the index offset only and
  /// S_PQ is a discrete 2D convolution.
  void build_hop_fields() {
    const std::size_t ny = static_cast<std::size_t>(grid_.n_y);
    const std::size_t nz = static_cast<std::size_t>(grid_.n_z);
    const std::size_t My = next_fft_size(2 * ny - 1);
    const std::size_t Mz = next_fft_size(2 * nz - 1);

    std::vector<Complex> work, kernelspec, scratch;
    const std::array<std::pair<Slit, Slit>, 3> unordered = {{
        {Slit::A, Slit::B}, {Slit::A, Slit::C}, {Slit::B, Slit::C}}};

    for (const auto& [P, Q] : unordered) {
      for (int dir = 0; dir < 2; ++dir) {
        const Slit src = dir == 0 ? P : Q;
        const Slit dst = dir == 0 ? Q : P;
        const double c = y0_[static_cast<std::size_t>(static_cast<int>(dst))] -
                         y0_[static_cast<std::size_t>(static_cast<int>(src))];

        kernelspec.assign(My * Mz, Complex{});
        for (std::size_t t = 0; t < 2 * ny - 1; ++t) {
          const double ddy = c + (static_cast<double>(t) - static_cast<double>(ny - 1)) * dy_;
          for (std::size_t tz = 0; tz < 2 * nz - 1; ++tz) {
            const double ddz = (static_cast<double>(tz) - static_cast<double>(nz - 1)) * dz_;
            kernelspec[t * Mz + tz] = propagator_kernel(std::hypot(ddy, ddz), k_);
          }
        }
        fft2d(kernelspec, My, Mz, false, scratch);

        work.assign(My * Mz, Complex{});
        const auto& a = a_[static_cast<std::size_t>(static_cast<int>(src))];
        for (std::size_t i = 0; i < ny; ++i)
          std::copy(a.begin() + static_cast<std::ptrdiff_t>(i * nz),
                    a.begin() + static_cast<std::ptrdiff_t>((i + 1) * nz),
                    work.begin() + static_cast<std::ptrdiff_t>(i * Mz));
        fft2d(work, My, Mz, false, scratch);
        for (std::size_t i = 0; i < My * Mz; ++i) work[i] *= kernelspec[i];
        fft2d(work, My, Mz, true, scratch);

        auto& S = S_[pair_index(src, dst)];
        S.resize(ny * nz);
        for (std::size_t i = 0; i < ny; ++i)
          for (std::size_t j = 0; j < nz; ++j)
            S[i * nz + j] = work[(i + ny - 1) * Mz + (j + nz - 1)];
      }
    }
    std::vector<Complex>().swap(work);
    std::vector<Complex>().swap(kernelspec);
    std::vector<Complex>().swap(scratch);
  }

  Geometry g_;
  RiemannGrid grid_;
  bool nonclassical_;
  double k_ = 0, dy_ = 0, dz_ = 0, z0_ = 0;
  std::array<double, 3> y0_{};
  std::array<std::vector<Complex>, 3> a_;
  std::array<std::vector<Complex>, 6> S_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Intensity of one configuration at a detector point (one-shot; builds the
/// slit fields). detector must lie on the detector plane.
inline double configuration_intensity(const SlitSet& open, const AperturePoint& detector,
                                      const Geometry& g, const RiemannGrid& grid,
                                      bool include_nonclassical = true) {
  if (detector.plane != Plane::detector)
    throw ValidationError("detector", "point must lie on the detector plane");
  SlitFields fields(g, grid, include_nonclassical);
  return fields.configuration_intensity(open, detector.y, detector.x);
}

/// kappa at one detector height, exact propagators throughout.
inline double kappa_fresnel(const Geometry& g, double detector_y, const RiemannGrid& grid) {
  SlitFields fields(g, grid);
  return fields.kappa(detector_y, g.screen_distance);
}

/// Relative change of kappa under one 2x grid refinement; reports the
/// convergence quality of a grid choice.
inline double kappa_refinement_change(const Geometry& g, double detector_y,
                                      const RiemannGrid& grid) {
  const double coarse = kappa_fresnel(g, detector_y, grid);
  const double fine = kappa_fresnel(g, detector_y, grid.refined());
  return std::abs(fine - coarse) / std::abs(fine);
}

/// Detector-distance threshold below which the paraxial trust flag is set.
inline double paraxial_suspect_distance(const Geometry& g) {
  return 10.0 * std::max(g.slit_separation, g.slit_height);
}

/// |kappa|(D) at the central maximum. The slit fields depend on L only, so
/// the scan reuses them across all distances.
inline KappaProfile kappa_central_vs_D(const Geometry& g, std::span<const double> D_values,
                                       const RiemannGrid& grid) {
  if (D_values.empty()) throw ValidationError("D_values", "scan needs at least one distance");
  for (std::size_t i = 0; i < D_values.size(); ++i) {
    if (!(D_values[i] > 0)) throw ValidationError("D_values", "distances must be positive");
    if (i > 0 && !(D_values[i] > D_values[i - 1]))
      throw ValidationError("D_values", "distances must be strictly increasing");
  }
  SlitFields fields(g, grid);

  KappaProfile out;
  out.abscissa.assign(D_values.begin(), D_values.end());
  out.kappa.resize(D_values.size());
  out.method = Method::fresnel;
  out.geometry = g;
  parallel_for(D_values.size(), [&](std::size_t i) {
    const SevenIntensities I = fields.intensities(0.0, D_values[i]);
    out.kappa[i] = std::abs(sorkin_combination(I) / I.I_ABC);
  });

  const double suspect_below = paraxial_suspect_distance(g);
  if (!D_values.empty() && D_values.front() < suspect_below)
    out.notes.emplace_back(std::string(warning_name(Warning::paraxial_suspect)) + ": D < " +
                           std::to_string(suspect_below) + " m");
  out.notes.emplace_back("grid: " + std::to_string(grid.n_y) + " x " + std::to_string(grid.n_z) +
                         " cells per slit");
  return out;
}

}  // namespace sorkin::fresnel
