#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace quantest {

class CdfTable;

/// A normalized cell density lambda(y) on the real line together with its
/// CDF and inverse CDF. Closed-form members come from optimal_density();
/// anything else is normalized and inverted numerically.
class IntervalDensity {
 public:
  struct ClosedForm {
    std::function<double(double)> cdf;
    std::function<double(double)> quantile;
  };

  /// `shape` need not be normalized. `center` and `width` only guide the
  /// numeric grid; `breakpoints` are kinks, zeros or integrable
  /// singularities of `shape`.
  static IntervalDensity numeric(std::function<double(double)> shape, double lo, double hi,
                                 std::vector<double> breakpoints = {}, double center = 0.0,
                                 double width = 1.0);
  /// Uses the given closed forms for the CDF and quantile; `normalizer` is
  /// the integral of `shape`.
  static IntervalDensity closed(std::function<double(double)> shape, double normalizer,
                                ClosedForm forms, double lo, double hi,
                                std::vector<double> breakpoints = {}, double center = 0.0,
                                double width = 1.0);
  static IntervalDensity uniform(double lo, double hi);

  double operator()(double y) const { return shape_(local(y)) / normalizer(); }
  double unnormalized(double y) const { return shape_(local(y)); }
  double normalizer() const noexcept { return normalizer_ * scale_; }
  double cdf(double y) const;
  double quantile(double p) const;

  bool has_closed_form() const noexcept { return static_cast<bool>(forms_.cdf); }
  double lower() const noexcept { return global(lo_); }
  double upper() const noexcept { return global(hi_); }
  double center() const noexcept { return global(center_); }
  double width() const noexcept { return width_ * scale_; }
  std::vector<double> breakpoints() const;

  /// Density of loc + scale * Y for Y with this density. Everything stays
  /// tabulated in the original coordinate, so singular points near a large
  /// `loc` keep full resolution.
  IntervalDensity affine(double loc, double scale) const;

  /// The same density with the closed forms dropped, so CDF and quantile go
  /// through quadrature and a monotone interpolation table.
  IntervalDensity as_numeric() const;

 private:
  IntervalDensity() = default;
  double local(double y) const noexcept { return (y - loc_) / scale_; }
  double global(double z) const noexcept { return loc_ + scale_ * z; }

  std::function<double(double)> shape_;
  double normalizer_ = 1.0;
  ClosedForm forms_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double center_ = 0.0;
  double width_ = 1.0;
  std::vector<double> breakpoints_;
  std::shared_ptr<const CdfTable> table_;
  double loc_ = 0.0;
  double scale_ = 1.0;
};

/// Cumulative integral of a nonnegative function tabulated on an adaptive
/// grid. Lookups polish the table value with quadrature over the last
/// partial segment.
class CdfTable {
 public:
  CdfTable(std::function<double(double)> shape, double lo, double hi, std::vector<double> breakpoints,
           double center, double width, double max_segment_mass = 1.0 / 1024.0);

  double total() const noexcept { return total_; }
  double cdf(double y) const;
  double quantile(double p) const;
  std::size_t nodes() const noexcept { return t_.size(); }

 private:
  double partial(std::size_t j, double y) const;  // integral from t_[j] to y
  double guess(std::size_t j, double p) const;

  std::function<double(double)> shape_;
  double lo_;
  double hi_;
  double width_;
  std::vector<double> t_;   // nodes
  std::vector<double> F_;   // normalized cumulative mass at the nodes
  std::vector<double> f_;   // normalized density at the nodes
  double total_ = 0.0;
};

}  // namespace quantest
