#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "quantest/design.hpp"
#include "quantest/error.hpp"

namespace quantest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

// Per-point quantities on the threshold grid, so that a cell's FI term is a
// handful of flops.
struct Grid {
  std::vector<double> y;
  std::vector<double> edge;  // f or z f at y
  std::vector<double> cdf;
  std::vector<double> sf;
  double mu;
};

Grid make_grid(const Distribution& d, ParamKind kind, double from, double step, std::size_t count) {
  Grid g;
  g.mu = d.mu();
  g.y.resize(count);
  g.edge.resize(count);
  g.cdf.resize(count);
  g.sf.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double y = d.mu() + d.delta() * (from + step * static_cast<double>(k));
    const double f = d.pdf(y);
    g.y[k] = y;
    g.edge[k] = kind == ParamKind::Location ? f : (y - d.mu()) / d.delta() * f;
    g.cdf[k] = d.cdf(y);
    g.sf[k] = d.survival(y);
  }
  return g;
}

double cell_term(double dp, double p) { return p > 0.0 ? dp * dp / p : 0.0; }

double inner(const Grid& g, std::size_t a, std::size_t b) {
  double p;
  if (g.y[a] >= g.mu) {
    p = g.sf[a] - g.sf[b];
  } else if (g.y[b] <= g.mu) {
    p = g.cdf[b] - g.cdf[a];
  } else {
    p = 1.0 - g.cdf[a] - g.sf[b];
  }
  return cell_term(g.edge[a] - g.edge[b], std::max(p, 0.0));
}
double left_open(const Grid& g, std::size_t b) { return cell_term(-g.edge[b], g.cdf[b]); }
double right_open(const Grid& g, std::size_t a) { return cell_term(g.edge[a], g.sf[a]); }

// Best `m` increasing grid indices, first cell either (-inf, y_i) or
// [y_origin, y_i) when `origin` is set. Returns the indices and the sum of
// cell terms including the final unbounded cell.
std::pair<std::vector<std::size_t>, double> dynamic_program(const Grid& g, std::size_t m,
                                                            bool has_origin, std::size_t origin) {
  const std::size_t n = g.y.size();
  const std::size_t first = has_origin ? origin + 1 : 0;
  auto head = [&](std::size_t j) { return has_origin ? inner(g, origin, j) : left_open(g, j); };
  if (m == 0) {
    return {{}, has_origin ? right_open(g, origin) : 0.0};
  }
  std::vector<double> value(n, -kInf);
  std::vector<std::vector<std::size_t>> from(m, std::vector<std::size_t>(n, 0));
  for (std::size_t j = first; j < n; ++j) value[j] = head(j);
  for (std::size_t level = 1; level < m; ++level) {
    std::vector<double> next(n, -kInf);
    for (std::size_t j = first + level; j < n; ++j) {
      double best = -kInf;
      std::size_t arg = 0;
      for (std::size_t i = first + level - 1; i < j; ++i) {
        const double v = value[i] + inner(g, i, j);
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      next[j] = best;
      from[level][j] = arg;
    }
    value = std::move(next);
  }
  double best = -kInf;
  std::size_t arg = 0;
  for (std::size_t j = first + m - 1; j < n; ++j) {
    const double v = value[j] + right_open(g, j);
    if (v > best) {
      best = v;
      arg = j;
    }
  }
  std::vector<std::size_t> idx(m);
  idx[m - 1] = arg;
  for (std::size_t level = m - 1; level > 0; --level) idx[level - 1] = from[level][idx[level]];
  return {idx, best};
}

template <class F>
double golden_max(const F& f, double a, double b, double tol, double& best_x) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  if (fc >= fd) {
    best_x = c;
    return fc;
  }
  best_x = d;
  return fd;
}

// Coordinate ascent on free parameters x (sorted, > lower_bound); `build`
// turns them into a quantizer.
template <class Build>
SearchResult polish(std::vector<double> x, const Build& build, const DesignSpec& spec, double lower_bound,
                    double step, double tol) {
  auto fi_of = [&](const std::vector<double>& v) -> double {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > (i == 0 ? lower_bound : v[i - 1]))) return -kInf;
    }
    return quantized_fi(build(v), spec.dist, spec.kind);
  };
  double current = fi_of(x);
  for (int sweep = 0; sweep < 200; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double lo_limit = i == 0 ? lower_bound : x[i - 1];
      const double hi_limit = i + 1 < x.size() ? x[i + 1] : kInf;
      double half = 2.0 * step;
      for (int expand = 0; expand < 60; ++expand) {
        double a = std::max(x[i] - half, lo_limit);
        double b = std::min(x[i] + half, hi_limit);
        // Stay strictly inside the neighbours.
        const double gap = 1e-12 * std::max(1.0, std::abs(x[i]));
        a = std::max(a, lo_limit + gap);
        b = std::min(b, hi_limit - gap);
        if (!(b > a)) break;
        std::vector<double> trial = x;
        auto f = [&](double t) {
          trial[i] = t;
          return fi_of(trial);
        };
        double xt = x[i];
        const double ft = golden_max(f, a, b, tol, xt);
        if (ft > current) {
          moved = std::max(moved, std::abs(xt - x[i]));
          x[i] = xt;
          current = ft;
        }
        const bool at_edge = (b - x[i] < 2.0 * tol && b < hi_limit - gap) ||
                             (x[i] - a < 2.0 * tol && a > lo_limit + gap);
        if (!at_edge) break;
        half *= 2.0;
      }
    }
    if (moved < tol) break;
  }
  return {build(x), current};
}

}  // namespace

SearchResult exhaustive_optimal_thresholds(const DesignSpec& spec, bool symmetric, const SearchOptions& opts) {
  spec.validate();
  if (spec.n_bits > 3) throw DomainError("exhaustive search is limited to at most 3 bits");
  if (!(opts.grid_step > 0.0) || !(opts.grid_half_width > opts.grid_step)) {
    throw DomainError("exhaustive search: invalid grid");
  }
  if (spec.kind == ParamKind::Scale && spec.n_bits == 1) symmetric = false;

  const Distribution& d = spec.dist;
  const double mu = d.mu();
  const double delta = d.delta();
  const std::size_t n = spec.intervals();
  const double tol = opts.refine_tol * delta;
  const double step = opts.grid_step * delta;
  const auto half_points = static_cast<std::size_t>(std::llround(opts.grid_half_width / opts.grid_step));

  if (symmetric) {
    // Right half: origin at mu plus n/2 - 1 free thresholds; FI doubles.
    const Grid g = make_grid(d, spec.kind, 0.0, opts.grid_step, half_points + 1);
    const auto [idx, half_fi] = dynamic_program(g, n / 2 - 1, true, 0);
    std::vector<double> x;
    for (std::size_t k : idx) x.push_back(g.y[k]);
    auto build = [mu](const std::vector<double>& v) {
      std::vector<double> t;
      t.reserve(2 * v.size() + 1);
      for (auto it = v.rbegin(); it != v.rend(); ++it) t.push_back(2.0 * mu - *it);
      t.push_back(mu);
      t.insert(t.end(), v.begin(), v.end());
      return Quantizer(std::move(t));
    };
    if (x.empty()) {
      Quantizer q({mu});
      return {q, quantized_fi(q, d, spec.kind)};
    }
    (void)half_fi;
    return polish(x, build, spec, mu, step, tol);
  }

  const Grid g = make_grid(d, spec.kind, -opts.grid_half_width, opts.grid_step, 2 * half_points + 1);
  const auto [idx, fi] = dynamic_program(g, n - 1, false, 0);
  (void)fi;
  std::vector<double> x;
  for (std::size_t k : idx) x.push_back(g.y[k]);
  auto build = [](const std::vector<double>& v) { return Quantizer(v); };
  return polish(x, build, spec, -kInf, step, tol);
}

SearchResult optimal_uniform_quantizer(const DesignSpec& spec) {
  spec.validate();
  const Distribution& d = spec.dist;
  const std::size_t n = spec.intervals();
  if (spec.kind == ParamKind::Scale && spec.n_bits == 1) return exhaustive_optimal_thresholds(spec, false);
  if (n == 2) {
    Quantizer q({d.mu()});
    return {q, quantized_fi(q, d, spec.kind)};
  }
  auto build = [&](double step) {
    std::vector<double> t(n - 1);
    const double half = static_cast<double>(n / 2);
    for (std::size_t j = 1; j < n; ++j) t[j - 1] = d.mu() + (static_cast<double>(j) - half) * step;
    t[n / 2 - 1] = d.mu();
    return Quantizer(std::move(t));
  };
  auto fi_of = [&](double step) { return quantized_fi(build(step), d, spec.kind); };

  constexpr int kScan = 2000;
  double step_max = 16.0 * d.delta() / static_cast<double>(n);
  int arg = 0;
  for (int grow = 0; grow < 30; ++grow) {
    double best = -kInf;
    for (int k = 1; k <= kScan; ++k) {
      const double v = fi_of(step_max * k / kScan);
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    if (arg < kScan) break;
    step_max *= 2.0;
  }
  const double h = step_max / kScan;
  double x = h * arg;
  golden_max(fi_of, h * (arg - 1) + 1e-3 * h, h * (arg + 1), 1e-12 * d.delta(), x);
  Quantizer q = build(x);
  return {q, quantized_fi(q, d, spec.kind)};
}

}  // namespace quantest
