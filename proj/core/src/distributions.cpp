#include "quantest/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quantest/error.hpp"
#include "quantest/specfun.hpp"

namespace quantest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

double sign_of(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream split_stream(std::uint64_t root, std::uint64_t index) {
  const std::uint64_t a = splitmix64(root);
  const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32)};
  return RandomStream(seq);
}

Distribution::Distribution() : Distribution(Family{FamilyTag::GGD, 2.0}, 0.0, 1.0) {}

Distribution::Distribution(Family family, double mu, double delta)
    : family_(family), mu_(mu), delta_(delta) {
  if (!(family.beta > 0.0) || !std::isfinite(family.beta)) {
    throw DomainError("distribution shape beta must be positive and finite");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("distribution scale delta must be positive and finite");
  }
  if (!std::isfinite(mu)) throw DomainError("distribution location mu must be finite");
  const double b = family.beta;
  if (family.tag == FamilyTag::GGD) {
    log_norm_ = std::log(b / 2.0) - log_gamma_fn(1.0 / b);
  } else {
    log_norm_ = -0.5 * std::log(b) - std::log(beta_fn(b / 2.0, 0.5));
  }
}

Distribution Distribution::ggd(double beta, double mu, double delta) {
  return {Family{FamilyTag::GGD, beta}, mu, delta};
}

Distribution Distribution::student(double beta, double mu, double delta) {
  return {Family{FamilyTag::STD, beta}, mu, delta};
}

bool Distribution::operator==(const Distribution& other) const noexcept {
  return family_.tag == other.family_.tag && family_.beta == other.family_.beta &&
         mu_ == other.mu_ && delta_ == other.delta_;
}

double Distribution::standard_pdf(double z) const {
  if (std::isinf(z)) return 0.0;
  const double b = family_.beta;
  if (family_.tag == FamilyTag::GGD) {
    const double a = std::abs(z);
    const double p = b == 2.0 ? a * a : (b == 1.0 ? a : std::pow(a, b));
    return std::exp(log_norm_ - p);
  }
  if (b == 1.0) return 1.0 / (kPi * (1.0 + z * z));
  return std::exp(log_norm_ - 0.5 * (b + 1.0) * std::log1p(z * z / b));
}

double Distribution::pdf(double y) const { return standard_pdf((y - mu_) / delta_) / delta_; }

double Distribution::log_pdf(double y) const {
  const double z = (y - mu_) / delta_;
  const double b = family_.beta;
  if (family_.tag == FamilyTag::GGD) return log_norm_ - std::pow(std::abs(z), b) - std::log(delta_);
  return log_norm_ - 0.5 * (b + 1.0) * std::log1p(z * z / b) - std::log(delta_);
}

// Left-tail mass F(z) for z <= 0; everything else follows by symmetry.
double Distribution::standard_cdf(double z) const {
  if (z > 0.0) return 1.0 - standard_survival(z);
  if (z == -kInf) return 0.0;
  const double b = family_.beta;
  const double a = -z;
  if (family_.tag == FamilyTag::GGD) {
    if (b == 2.0) return 0.5 * erfc(a);
    if (b == 1.0) return 0.5 * std::exp(-a);
    return 0.5 * detail::regularized_upper_gamma(1.0 / b, std::pow(a, b));
  }
  if (b == 1.0) {
    // atan(1/a)/pi keeps relative accuracy for large a.
    return a == 0.0 ? 0.5 : std::atan(1.0 / a) / kPi;
  }
  const double x = b / (b + a * a);
  if (x > 0.5) {
    return 0.5 - 0.5 * detail::regularized_incomplete_beta(a * a / (b + a * a), 0.5, b / 2.0);
  }
  return 0.5 * detail::regularized_incomplete_beta(x, b / 2.0, 0.5);
}

double Distribution::standard_survival(double z) const {
  if (z < 0.0) return 1.0 - standard_cdf(z);
  return standard_cdf(-z);
}

double Distribution::cdf(double y) const {
  if (y == kInf) return 1.0;
  if (y == -kInf) return 0.0;
  return standard_cdf((y - mu_) / delta_);
}

double Distribution::survival(double y) const {
  if (y == kInf) return 0.0;
  if (y == -kInf) return 1.0;
  return standard_survival((y - mu_) / delta_);
}

double Distribution::upper_quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("upper_quantile: q must lie in [0, 1]");
  if (q == 0.0) return kInf;
  if (q == 1.0) return -kInf;
  if (q > 0.5) return 2.0 * mu_ - upper_quantile(1.0 - q);
  if (q == 0.5) return mu_;
  const double b = family_.beta;
  const Accuracy acc{1e-300, 1e-14, 300};
  double z = 0.0;
  if (family_.tag == FamilyTag::GGD) {
    if (b == 1.0) {
      z = -std::log(2.0 * q);
    } else {
      z = std::pow(detail::inverse_regularized_gamma(1.0 / b, 2.0 * q, true, acc), 1.0 / b);
    }
  } else if (b == 1.0) {
    z = 1.0 / std::tan(kPi * q);
  } else if (2.0 * q <= 0.5) {
    const double x = detail::inverse_regularized_beta(2.0 * q, b / 2.0, 0.5, acc);
    z = std::sqrt(b * (1.0 - x) / x);
  } else {
    const double w = detail::inverse_regularized_beta(1.0 - 2.0 * q, 0.5, b / 2.0, acc);
    z = std::sqrt(b * w / (1.0 - w));
  }
  return mu_ + delta_ * z;
}

double Distribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0, 1]");
  return 2.0 * mu_ - upper_quantile(p);
}

double Distribution::score(ParamKind kind, double y) const {
  const double z = (y - mu_) / delta_;
  const double b = family_.beta;
  if (family_.tag == FamilyTag::GGD) {
    const double a = std::abs(z);
    if (kind == ParamKind::Location) {
      if (z == 0.0 && b <= 1.0) {
        throw DomainError("GGD location score is undefined at y = mu for beta <= 1");
      }
      return b * sign_of(z) * std::pow(a, b - 1.0) / delta_;
    }
    return (-1.0 + b * std::pow(a, b)) / delta_;
  }
  if (kind == ParamKind::Location) return (b + 1.0) * z / (delta_ * (b + z * z));
  return (-1.0 + (b + 1.0) * z * z / (b + z * z)) / delta_;
}

double Distribution::score_y_derivative(ParamKind kind, double y) const {
  const double z = (y - mu_) / delta_;
  const double b = family_.beta;
  const double d2 = delta_ * delta_;
  if (family_.tag == FamilyTag::GGD) {
    const double a = std::abs(z);
    if (kind == ParamKind::Location) {
      if (b <= 1.0) {
        throw DomainError("the derivative of the GGD location score does not exist for beta <= 1");
      }
      if (z == 0.0) {
        if (b < 2.0) throw DomainError("GGD location score derivative is unbounded at y = mu");
        return b == 2.0 ? 2.0 / d2 : 0.0;
      }
      return b * (b - 1.0) * std::pow(a, b - 2.0) / d2;
    }
    if (z == 0.0) {
      if (b <= 1.0) throw DomainError("GGD scale score derivative is undefined at y = mu for beta <= 1");
      return 0.0;
    }
    return b * b * sign_of(z) * std::pow(a, b - 1.0) / d2;
  }
  const double s = b + z * z;
  if (kind == ParamKind::Location) return (b + 1.0) * (b - z * z) / (d2 * s * s);
  return 2.0 * b * (b + 1.0) * z / (d2 * s * s);
}

double Distribution::continuous_fi(ParamKind kind) const {
  const double b = family_.beta;
  const double d2 = delta_ * delta_;
  if (family_.tag == FamilyTag::GGD) {
    if (kind == ParamKind::Location) {
      if (b <= 1.0) {
        throw DomainError("GGD location Fisher information requires beta > 1");
      }
      return b * (b - 1.0) * gamma_fn(1.0 - 1.0 / b) / gamma_fn(1.0 / b) / d2;
    }
    return b / d2;
  }
  if (kind == ParamKind::Location) return (b + 1.0) / ((b + 3.0) * d2);
  return 2.0 * b / ((b + 3.0) * d2);
}

double Distribution::truncation_half_width(double outside_mass) const {
  if (!(outside_mass > 0.0 && outside_mass < 1.0)) {
    throw DomainError("truncation_half_width: mass must lie in (0, 1)");
  }
  return standardized().upper_quantile(0.5 * outside_mass);
}

Sampler::Sampler(const Distribution& d)
    : mu_(d.mu()), delta_(d.delta()), inv_beta_(1.0 / d.beta()), beta_(d.beta()) {
  if (d.tag() == FamilyTag::GGD) {
    path_ = d.beta() == 2.0 ? Path::Normal : (d.beta() == 1.0 ? Path::Exponential : Path::Gamma);
    gamma_ = std::gamma_distribution<double>(inv_beta_, 1.0);
  } else if (d.beta() == 1.0) {
    path_ = Path::Cauchy;
  } else {
    path_ = Path::StudentRatio;
    chi2_ = std::chi_squared_distribution<double>(d.beta());
  }
}

double Sampler::standard(RandomStream& rng) {
  switch (path_) {
    case Path::Gamma: {
      const double m = std::pow(gamma_(rng), inv_beta_);
      return (rng() >> 63) ? m : -m;
    }
    case Path::Normal:
      return normal_(rng) * std::numbers::sqrt2 * 0.5;
    case Path::Exponential: {
      const double m = exp_(rng);
      return (rng() >> 63) ? m : -m;
    }
    case Path::Cauchy:
      return std::tan(kPi * (unit_(rng) - 0.5));
    case Path::StudentRatio: {
      const double n = normal_(rng);
      return n / std::sqrt(chi2_(rng) / beta_);
    }
  }
  return 0.0;
}

double Sampler::operator()(RandomStream& rng) { return mu_ + delta_ * standard(rng); }

double Distribution::sample(RandomStream& rng) const {
  Sampler s(*this);
  return s(rng);
}

std::vector<double> Distribution::sample(RandomStream& rng, std::size_t n) const {
  if (n == 0) throw DomainError("sample: n must be at least 1");
  Sampler s(*this);
  std::vector<double> out(n);
  for (double& v : out) v = s(rng);
  return out;
}

std::string to_string(FamilyTag tag) { return tag == FamilyTag::GGD ? "ggd" : "std"; }
std::string to_string(ParamKind kind) { return kind == ParamKind::Location ? "location" : "scale"; }

namespace {
std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}
}  // namespace

FamilyTag parse_family(const std::string& s) {
  const std::string t = lower(s);
  if (t == "ggd") return FamilyTag::GGD;
  if (t == "std" || t == "student") return FamilyTag::STD;
  throw DomainError("unknown family '" + s + "' (expected ggd or std)");
}

ParamKind parse_param_kind(const std::string& s) {
  const std::string t = lower(s);
  if (t == "location" || t == "mu") return ParamKind::Location;
  if (t == "scale" || t == "delta") return ParamKind::Scale;
  throw DomainError("unknown parameter '" + s + "' (expected location or scale)");
}

std::string describe(const Distribution& d) {
  std::ostringstream os;
  os << to_string(d.tag()) << "(beta=" << d.beta() << ", mu=" << d.mu() << ", delta=" << d.delta()
     << ")";
  return os.str();
}

void to_json(nlohmann::json& j, const Distribution& d) {
  j = nlohmann::json{{"family", to_string(d.tag())}, {"beta", d.beta()}, {"mu", d.mu()},
                     {"delta", d.delta()}};
}

void from_json(const nlohmann::json& j, Distribution& d) {
  d = Distribution(Family{parse_family(j.at("family").get<std::string>()), j.at("beta").get<double>()},
                   j.value("mu", 0.0), j.value("delta", 1.0));
}

}  // namespace quantest
