#pragma once

// Convolution kernels: the normalized Gaussian J(x) = sqrt(s/pi) exp(-s x^2),
// its truncation radius, and its periodization over images x - rL.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "nlwave/basis.hpp"
#include "nlwave/errors.hpp"

namespace nlwave {

enum class KernelFamily { gaussian };

/// Image-sum tolerance used to pick the default wrap radius.
inline constexpr double kWrapTolerance = 1e-14;

class KernelSpec {
public:
  /// Unit-scale Gaussian.
  KernelSpec() = default;

  /// sqrt(s/pi) exp(-s x^2).
  static KernelSpec gaussian(double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw std::invalid_argument("KernelSpec: scale must be positive and finite");
    }
    KernelSpec spec;
    spec.scale_ = scale;
    return spec;
  }

  /// Gaussian density of standard deviation delta, i.e. s = 1 / (2 delta^2).
  static KernelSpec gaussian_width(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      throw std::invalid_argument("KernelSpec: width must be positive and finite");
    }
    return gaussian(1.0 / (2.0 * delta * delta));
  }

  /// Periodic copy summing images over r = -R..R. Without an explicit radius
  /// the smallest R >= 1 with 2 J(R L - L/2) < kWrapTolerance is used.
  KernelSpec periodized(double period, std::optional<int> wrap_radius = std::nullopt) const {
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw std::invalid_argument("KernelSpec: period must be positive and finite");
    }
    if (wrap_radius && *wrap_radius < 0) {
      throw std::invalid_argument("KernelSpec: wrap radius must be nonnegative");
    }
    KernelSpec spec = *this;
    spec.periodic_ = true;
    spec.period_ = period;
    spec.wrap_radius_ = wrap_radius ? *wrap_radius : default_wrap_radius(period);
    return spec;
  }

  KernelFamily family() const noexcept { return KernelFamily::gaussian; }
  double scale() const noexcept { return scale_; }
  /// Standard deviation delta = 1 / sqrt(2 s).
  double width() const noexcept { return 1.0 / std::sqrt(2.0 * scale_); }
  bool periodic() const noexcept { return periodic_; }
  double period() const noexcept { return period_; }
  int wrap_radius() const noexcept { return wrap_radius_; }

  double peak() const noexcept { return std::sqrt(scale_ / std::numbers::pi); }

  /// The unperiodized kernel.
  double free_space(double x) const noexcept {
    return std::sqrt(scale_ / std::numbers::pi) * std::exp(-scale_ * (x * x));
  }

  double operator()(double x) const noexcept {
    if (!periodic_) {
      return free_space(x);
    }
    // minimum image, then symmetric pairs so that J(-x) == J(x)
    const double xr = x - period_ * std::round(x / period_);
    double sum = free_space(xr);
    for (int r = 1; r <= wrap_radius_; ++r) {
      sum += free_space(xr - r * period_) + free_space(xr + r * period_);
    }
    return sum;
  }

  int default_wrap_radius(double period) const {
    int R = 1;
    while (2.0 * free_space(R * period - 0.5 * period) >= kWrapTolerance) {
      ++R;
      if (R > 1'000'000) {
        throw NonConvergence("KernelSpec: wrap radius search did not terminate");
      }
    }
    return R;
  }

private:
  double scale_ = 1.0;
  bool periodic_ = false;
  double period_ = 0.0;
  int wrap_radius_ = 0;
};

inline double kernel_eval(const KernelSpec& spec, double x) { return spec(x); }

/// Radius A at which the Gaussian density of width delta equals eps:
/// A = sqrt(-2 delta^2 log(delta eps sqrt(2 pi))).
inline double truncation_radius(double delta, double eps) {
  if (!(delta > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("truncation_radius: delta and eps must be positive");
  }
  const double q = delta * eps * std::sqrt(2.0 * std::numbers::pi);
  // q == 1 is the peak itself; allow a few ulps of slack for that boundary case
  if (q > 1.0 + 8.0 * std::numeric_limits<double>::epsilon()) {
    throw NoTruncation("truncation_radius: kernel never reaches eps = " + std::to_string(eps));
  }
  const double lg = std::log(q);
  if (lg >= 0.0) {
    return 0.0;
  }
  return std::sqrt(-2.0 * delta * delta * lg);
}

/// Quadrature value of the integral of J(x - y) over y in [lo, hi]; `rule`
/// is carried affinely onto [lo, hi].
inline double kernel_mass(const KernelSpec& spec, double x, double lo, double hi,
                          const QuadratureRule& rule) {
  if (lo == hi) {
    return 0.0;
  }
  const QuadratureRule mapped = rule.mapped_to({lo, hi});
  double sum = 0.0;
  for (std::size_t m = 0; m < mapped.size(); ++m) {
    sum += mapped.weights[m] * spec(x - mapped.nodes[m]);
  }
  return sum;
}

/// Isotropic Gaussian (s/pi) exp(-s (x^2 + y^2)) on the unit torus.
///
/// The kernel factors as J(x) J(y) with the 1D kernel of the same scale, and
/// so does its image sum, so the torus kernel is the product of two
/// periodized 1D kernels.
class KernelSpec2D {
public:
  static KernelSpec2D isotropic_gaussian(double scale, std::optional<int> wrap_radius = std::nullopt) {
    return KernelSpec2D(KernelSpec::gaussian(scale).periodized(1.0, wrap_radius));
  }

  const KernelSpec& axis() const noexcept { return axis_; }
  double scale() const noexcept { return axis_.scale(); }

  double operator()(double dx, double dy) const noexcept { return axis_(dx) * axis_(dy); }

private:
  explicit KernelSpec2D(KernelSpec axis) : axis_(axis) {}

  KernelSpec axis_;
};

} // namespace nlwave
