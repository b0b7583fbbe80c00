#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace quantest {

enum class FamilyTag { GGD, STD };
enum class ParamKind { Location, Scale };

struct Family {
  FamilyTag tag = FamilyTag::GGD;
  double beta = 2.0;
};

using RandomStream = std::mt19937_64;

/// Independent stream for lane `index` derived from `root` by splitmix64.
RandomStream split_stream(std::uint64_t root, std::uint64_t index);
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// A member of the generalized Gaussian (GGD) or Student-t (STD) family with
/// location mu and scale delta. With z = (y - mu) / delta,
///
///   GGD:  f = beta / (2 delta Gamma(1/beta)) exp(-|z|^beta)
///   STD:  f = (1 + z^2/beta)^(-(beta+1)/2) / (delta sqrt(beta) B(beta/2, 1/2))
///
/// so GGD beta = 2 is a normal with standard deviation delta / sqrt(2), and
/// STD beta = 1 is the Cauchy distribution.
class Distribution {
 public:
  /// Standard Gaussian shape (GGD beta = 2) at mu = 0, delta = 1.
  Distribution();
  Distribution(Family family, double mu, double delta);

  static Distribution ggd(double beta, double mu = 0.0, double delta = 1.0);
  static Distribution student(double beta, double mu = 0.0, double delta = 1.0);

  const Family& family() const noexcept { return family_; }
  FamilyTag tag() const noexcept { return family_.tag; }
  double beta() const noexcept { return family_.beta; }
  double mu() const noexcept { return mu_; }
  double delta() const noexcept { return delta_; }

  Distribution with_location(double mu) const { return {family_, mu, delta_}; }
  Distribution with_scale(double delta) const { return {family_, mu_, delta}; }
  /// Same family at mu = 0, delta = 1.
  Distribution standardized() const { return {family_, 0.0, 1.0}; }

  double pdf(double y) const;
  double log_pdf(double y) const;
  /// F(y); y may be +-infinity.
  double cdf(double y) const;
  /// 1 - F(y) without cancellation in the right tail.
  double survival(double y) const;
  /// Inverse CDF on [0, 1].
  double quantile(double p) const;
  /// y with survival(y) = q, accurate for tiny q.
  double upper_quantile(double q) const;

  /// d log f / d mu or d log f / d delta at y.
  double score(ParamKind kind, double y) const;
  /// d score / dy.
  double score_y_derivative(ParamKind kind, double y) const;
  /// Fisher information of one unquantized measurement.
  double continuous_fi(ParamKind kind) const;

  double sample(RandomStream& rng) const;
  std::vector<double> sample(RandomStream& rng, std::size_t n) const;

  /// Half-width T (in units of delta) such that the mass outside
  /// [mu - T delta, mu + T delta] is below `outside_mass`.
  double truncation_half_width(double outside_mass = 1e-12) const;

  // Standardized kernels, z = (y - mu) / delta.
  double standard_pdf(double z) const;
  double standard_cdf(double z) const;
  double standard_survival(double z) const;

  bool operator==(const Distribution& other) const noexcept;

 private:
  Family family_;
  double mu_;
  double delta_;
  double log_norm_;  // log of the standardized normalizing constant
};

/// Draws from a fixed distribution; holds the prepared variate generators so
/// the per-draw cost stays low in the simulation loops. GGD draws are a
/// random sign times G^(1/beta) with G ~ Gamma(1/beta); for beta = 2 and
/// beta = 1 the same law is drawn as normal / sqrt(2) and as an exponential.
class Sampler {
 public:
  explicit Sampler(const Distribution& d);
  double operator()(RandomStream& rng);
  double standard(RandomStream& rng);

 private:
  enum class Path { Gamma, Normal, Exponential, Cauchy, StudentRatio };
  Path path_;
  double mu_;
  double delta_;
  double inv_beta_;
  double beta_;
  std::gamma_distribution<double> gamma_;
  std::normal_distribution<double> normal_;
  std::chi_squared_distribution<double> chi2_;
  std::exponential_distribution<double> exp_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

std::string to_string(FamilyTag tag);
std::string to_string(ParamKind kind);
FamilyTag parse_family(const std::string& s);
ParamKind parse_param_kind(const std::string& s);
std::string describe(const Distribution& d);

void to_json(nlohmann::json& j, const Distribution& d);
void from_json(const nlohmann::json& j, Distribution& d);

}  // namespace quantest
