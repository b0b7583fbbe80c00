#include "quantest/interval_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quantest/error.hpp"
#include "quantest/quadrature.hpp"

namespace quantest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxNodes = 50000;

QuadratureOptions scaled_options(double total) {
  QuadratureOptions o;
  o.abs_tol = 1e-16 * total;
  o.rel_tol = 1e-13;
  return o;
}

// Compensated running sum.
struct Neumaier {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace

CdfTable::CdfTable(std::function<double(double)> shape, double lo, double hi,
                   std::vector<double> breakpoints, double center, double width,
                   double max_segment_mass)
    : shape_(std::move(shape)), lo_(lo), hi_(hi), width_(width) {
  if (!(lo < hi)) throw DomainError("CdfTable: empty support");
  if (!(width > 0.0)) throw DomainError("CdfTable: width must be positive");
  if (!(max_segment_mass > 0.0 && max_segment_mass < 1.0)) {
    throw DomainError("CdfTable: max_segment_mass must lie in (0, 1)");
  }

  std::vector<double> nodes;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    for (int k = 0; k <= 64; ++k) nodes.push_back(lo + (hi - lo) * k / 64.0);
  } else {
    for (int k = -64; k <= 64; ++k) nodes.push_back(center + width * k / 8.0);
    for (double r = 8.0 * 1.3; r < 1e6; r *= 1.3) {
      nodes.push_back(center - width * r);
      nodes.push_back(center + width * r);
    }
    if (std::isfinite(lo)) nodes.push_back(lo);
    if (std::isfinite(hi)) nodes.push_back(hi);
  }
  nodes.insert(nodes.end(), breakpoints.begin(), breakpoints.end());
  std::erase_if(nodes, [&](double t) { return !(t >= lo && t <= hi) || !std::isfinite(t); });
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.size() < 2) throw NumericalError("CdfTable: support too narrow for the grid");

  const QuadratureResult whole = integrate(shape_, lo, hi, breakpoints);
  total_ = whole.value;
  if (!(total_ > 0.0) || !std::isfinite(total_)) {
    throw NumericalError("CdfTable: density does not have a positive finite integral");
  }
  const QuadratureOptions opts = scaled_options(total_);

  // Tails beyond the outermost nodes.
  auto left_tail = [&](double t0) { return std::isinf(lo) ? integrate(shape_, lo, t0, opts).value : 0.0; };
  auto right_tail = [&](double tn) { return std::isinf(hi) ? integrate(shape_, tn, hi, opts).value : 0.0; };
  double left = left_tail(nodes.front());
  for (int grow = 0; left > max_segment_mass * total_ && grow < 200; ++grow) {
    nodes.insert(nodes.begin(), center - 4.0 * (center - nodes.front()));
    left = left_tail(nodes.front());
  }
  double right = right_tail(nodes.back());
  for (int grow = 0; right > max_segment_mass * total_ && grow < 200; ++grow) {
    nodes.push_back(center + 4.0 * (nodes.back() - center));
    right = right_tail(nodes.back());
  }

  std::vector<double> mass(nodes.size() - 1);
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    mass[j] = integrate(shape_, nodes[j], nodes[j + 1], opts).value;
  }
  // Bisect heavy segments until every segment carries a small share.
  bool split = true;
  while (split) {
    split = false;
    std::vector<double> t2{nodes.front()};
    std::vector<double> m2;
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
      const double mid = 0.5 * (nodes[j] + nodes[j + 1]);
      if (mass[j] > max_segment_mass * total_ && mid > nodes[j] && mid < nodes[j + 1] &&
          nodes.size() + m2.size() < kMaxNodes) {
        m2.push_back(integrate(shape_, nodes[j], mid, opts).value);
        m2.push_back(integrate(shape_, mid, nodes[j + 1], opts).value);
        t2.push_back(mid);
        split = true;
      } else {
        m2.push_back(mass[j]);
      }
      t2.push_back(nodes[j + 1]);
    }
    nodes = std::move(t2);
    mass = std::move(m2);
  }

  Neumaier acc;
  acc.add(left);
  for (double m : mass) acc.add(m);
  acc.add(right);
  total_ = acc.value();

  t_ = std::move(nodes);
  F_.resize(t_.size());
  f_.resize(t_.size());
  Neumaier run;
  run.add(left);
  F_[0] = run.value() / total_;
  for (std::size_t j = 0; j + 1 < t_.size(); ++j) {
    if (mass[j] < 0.0) throw NumericalError("CdfTable: negative segment mass; density is not nonnegative");
    run.add(mass[j]);
    F_[j + 1] = run.value() / total_;
  }
  for (std::size_t j = 0; j < t_.size(); ++j) {
    if (j > 0 && F_[j] < F_[j - 1]) {
      throw NumericalError("CdfTable: tabulated CDF is not monotone; refine the grid");
    }
    f_[j] = shape_(t_[j]) / total_;
  }
}

double CdfTable::partial(std::size_t j, double y) const {
  return integrate(shape_, t_[j], y, scaled_options(total_)).value / total_;
}

double CdfTable::cdf(double y) const {
  if (y <= lo_) return 0.0;
  if (y >= hi_) return 1.0;
  const QuadratureOptions opts = scaled_options(total_);
  if (y < t_.front()) return integrate(shape_, lo_, y, opts).value / total_;
  if (y >= t_.back()) return 1.0 - integrate(shape_, y, hi_, opts).value / total_;
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), y) - t_.begin()) - 1;
  return F_[j] + partial(j, y);
}

// Monotone cubic Hermite guess for the inverse on segment j; node slopes
// dy/dF = 1/f are clipped to [0, 3 * secant] so the cubic stays monotone.
double CdfTable::guess(std::size_t j, double p) const {
  const double h = F_[j + 1] - F_[j];
  const double dy = t_[j + 1] - t_[j];
  const double s = dy / h;
  auto clip = [&](double f) {
    if (!(f > 0.0) || !std::isfinite(1.0 / f)) return f > 0.0 ? 0.0 : 3.0 * s;
    return std::clamp(1.0 / f, 0.0, 3.0 * s);
  };
  const double d0 = std::isinf(f_[j]) ? 0.0 : clip(f_[j]);
  const double d1 = std::isinf(f_[j + 1]) ? 0.0 : clip(f_[j + 1]);
  const double u = (p - F_[j]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  return h00 * t_[j] + h10 * h * d0 + h01 * t_[j + 1] + h11 * h * d1;
}

double CdfTable::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0, 1]");
  if (p == 0.0) return lo_;
  if (p == 1.0) return hi_;

  double a;
  double b;
  double x;
  std::function<double(double)> residual;
  if (p < F_.front() || p > F_.back()) {
    // Unbounded tail: expand a bracket, then fall through to the solver.
    if (p < F_.front()) {
      b = t_.front();
      a = b - width_;
      while (cdf(a) > p) {
        b = a;
        a = b - 2.0 * (t_.front() - a + width_);
        if (!std::isfinite(a)) throw NumericalError("quantile: tail bracket overflow");
      }
    } else {
      a = t_.back();
      b = a + width_;
      while (cdf(b) < p) {
        a = b;
        b = a + 2.0 * (b - t_.back() + width_);
        if (!std::isfinite(b)) throw NumericalError("quantile: tail bracket overflow");
      }
    }
    x = 0.5 * (a + b);
    residual = [this, p](double y) { return cdf(y) - p; };
  } else {
    std::size_t j = static_cast<std::size_t>(std::upper_bound(F_.begin(), F_.end(), p) - F_.begin());
    j = std::clamp<std::size_t>(j, 1, t_.size() - 1) - 1;
    if (F_[j + 1] == F_[j]) return t_[j];
    if (p == F_[j]) return t_[j];
    a = t_[j];
    b = t_[j + 1];
    x = std::clamp(guess(j, p), a, b);
    residual = [this, j, p](double y) { return F_[j] + partial(j, y) - p; };
  }

  for (int it = 0; it < 200; ++it) {
    const double r = residual(x);
    if (std::abs(r) <= 2e-16) return x;
    if (r > 0.0) {
      b = x;
    } else {
      a = x;
    }
    const double slope = shape_(x) / total_;
    double next = slope > 0.0 && std::isfinite(slope) ? x - r / slope : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) <= 1e-15 * std::max(std::abs(x), width_)) return next;
    x = next;
  }
  throw NoConvergence("quantile: numeric inversion did not converge");
}

IntervalDensity IntervalDensity::numeric(std::function<double(double)> shape, double lo, double hi,
                                         std::vector<double> breakpoints, double center, double width) {
  IntervalDensity d;
  d.table_ = std::make_shared<const CdfTable>(shape, lo, hi, breakpoints, center, width);
  d.shape_ = std::move(shape);
  d.normalizer_ = d.table_->total();
  d.lo_ = lo;
  d.hi_ = hi;
  d.center_ = center;
  d.width_ = width;
  d.breakpoints_ = std::move(breakpoints);
  return d;
}

IntervalDensity IntervalDensity::closed(std::function<double(double)> shape, double normalizer,
                                        ClosedForm forms, double lo, double hi,
                                        std::vector<double> breakpoints, double center, double width) {
  if (!(normalizer > 0.0)) throw DomainError("IntervalDensity: normalizer must be positive");
  if (!forms.cdf || !forms.quantile) throw DomainError("IntervalDensity: closed form needs cdf and quantile");
  IntervalDensity d;
  d.shape_ = std::move(shape);
  d.normalizer_ = normalizer;
  d.forms_ = std::move(forms);
  d.lo_ = lo;
  d.hi_ = hi;
  d.center_ = center;
  d.width_ = width;
  d.breakpoints_ = std::move(breakpoints);
  return d;
}

IntervalDensity IntervalDensity::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("uniform density needs a finite interval lo < hi");
  }
  const double w = hi - lo;
  auto shape = [lo, hi](double y) { return y >= lo && y <= hi ? 1.0 : 0.0; };
  ClosedForm forms{[lo, w](double y) { return std::clamp((y - lo) / w, 0.0, 1.0); },
                   [lo, w](double p) { return lo + std::clamp(p, 0.0, 1.0) * w; }};
  return closed(shape, w, std::move(forms), lo, hi, {}, 0.5 * (lo + hi), w);
}

double IntervalDensity::cdf(double y) const {
  const double z = local(y);
  if (forms_.cdf) return forms_.cdf(z);
  return table_->cdf(z);
}

double IntervalDensity::quantile(double p) const {
  return global(forms_.quantile ? forms_.quantile(p) : table_->quantile(p));
}

std::vector<double> IntervalDensity::breakpoints() const {
  std::vector<double> out;
  out.reserve(breakpoints_.size());
  for (double t : breakpoints_) out.push_back(global(t));
  return out;
}

IntervalDensity IntervalDensity::affine(double loc, double scale) const {
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(loc)) {
    throw DomainError("IntervalDensity::affine: need finite loc and positive finite scale");
  }
  IntervalDensity d = *this;
  d.loc_ = loc + scale * loc_;
  d.scale_ = scale * scale_;
  return d;
}

IntervalDensity IntervalDensity::as_numeric() const {
  IntervalDensity d = numeric(shape_, lo_, hi_, breakpoints_, center_, width_);
  d.loc_ = loc_;
  d.scale_ = scale_;
  return d;
}

}  // namespace quantest
