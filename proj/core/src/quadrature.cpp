#include "quantest/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "quantest/error.hpp"

namespace quantest {
namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod(const F& f, double lo, double hi) {
  // On very short segments a node can round onto an endpoint, where an
  // integrable singularity may sit; such nodes are dropped.
  auto g = [&](double x) { return x > lo && x < hi ? f(x) : 0.0; };
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = g(center);
  double kronrod = fc * kKronrod[7];
  double gauss = fc * kGauss[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double sum = g(center - dx) + g(center + dx);
    kronrod += kKronrod[j] * sum;
    if (j % 2 == 1) gauss += kGauss[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

template <class F>
QuadratureResult adaptive(const F& g, double lo, double hi, const QuadratureOptions& opts) {
  std::priority_queue<Segment> heap;
  std::vector<Segment> done;
  Segment first = gauss_kronrod(g, lo, hi);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  std::size_t count = 1;
  while (!heap.empty()) {
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) break;
    if (count >= opts.max_intervals) break;
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Cannot split further in double precision.
      heap.pop();
      done.push_back(worst);
      continue;
    }
    heap.pop();
    const Segment left = gauss_kronrod(g, worst.lo, mid);
    const Segment right = gauss_kronrod(g, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum from scratch; the running totals accumulate cancellation noise.
  QuadratureResult result;
  std::vector<Segment> all = std::move(done);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
  for (const Segment& s : all) {
    result.value += s.value;
    result.abs_error += s.error;
  }
  result.intervals = all.size();
  result.converged = result.abs_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(result.value));
  if (!std::isfinite(result.value)) {
    throw NumericalError("integrate: integrand produced a non-finite value");
  }
  return result;
}

QuadratureResult combine(const QuadratureResult& x, const QuadratureResult& y) {
  return {x.value + y.value, x.abs_error + y.abs_error, x.intervals + y.intervals,
          x.converged && y.converged};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integrate: NaN bound");
  if (a == b) return {0.0, 0.0, 0, true};
  if (a > b) {
    QuadratureResult r = integrate(f, b, a, opts);
    r.value = -r.value;
    return r;
  }
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (lo_inf && hi_inf) {
    return combine(integrate(f, a, 0.0, opts), integrate(f, 0.0, b, opts));
  }
  // Unbounded pieces use x = m / u on (0, 1], which resolves tails out to
  // the overflow threshold; points that map to infinity contribute nothing
  // for an integrable f.
  if (hi_inf) {
    const double m = std::max(a, 0.0) + 1.0;
    auto g = [&](double u) {
      const double x = m / u;
      return std::isfinite(x) ? f(x) * m / (u * u) : 0.0;
    };
    return combine(adaptive(f, a, m, opts), adaptive(g, 0.0, 1.0, opts));
  }
  if (lo_inf) {
    const double m = std::min(b, 0.0) - 1.0;
    auto g = [&](double u) {
      const double x = m / u;
      return std::isfinite(x) ? f(x) * -m / (u * u) : 0.0;
    };
    return combine(adaptive(g, 0.0, 1.0, opts), adaptive(f, m, b, opts));
  }
  return adaptive(f, a, b, opts);
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureOptions& opts) {
  if (a > b) {
    QuadratureResult r = integrate(f, b, a, breakpoints, opts);
    r.value = -r.value;
    return r;
  }
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  QuadratureResult total{0.0, 0.0, 0, true};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total = combine(total, integrate(f, cuts[i], cuts[i + 1], opts));
  }
  return total;
}

}  // namespace quantest
