#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "quantest/distributions.hpp"

namespace quantest {

/// Table 1: location estimation. Table 2: scale estimation. Both cover the
/// Gaussian (GGD beta = 2) and Cauchy (STD beta = 1) at mu = 0, delta = 1
/// for 1..8 bits.
enum class TableId { Location = 1, Scale = 2 };

struct ReferenceRow {
  double optimal;
  double uniform;
  double practical;
};

struct TableRow {
  std::string distribution;  // "gaussian" or "cauchy"
  int n_bits = 0;
  /// "exhaustive", "exhaustive-symmetric" or "asymptotic".
  std::string optimal_method;
  double optimal = 0.0;
  double uniform = 0.0;
  double practical = 0.0;
  /// Exhaustive optimum without the symmetry constraint (bits <= 3), NaN
  /// otherwise.
  double unconstrained = 0.0;
  ReferenceRow reference{};
};

/// Published reference values for `which`, indexed [distribution][bits - 1]
/// with distribution 0 = gaussian, 1 = cauchy.
ReferenceRow reference_value(TableId which, int distribution, int n_bits);

TableRow reproduce_row(TableId which, int distribution, int n_bits);
std::vector<TableRow> reproduce_table(TableId which);

/// Columns: distribution, n_bits, optimal_method, optimal, uniform,
/// practical, unconstrained, reference_optimal, reference_uniform,
/// reference_practical, delta_vs_reference_optimal, ..._uniform,
/// ..._practical.
void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows);

TableId parse_table_id(const std::string& s);

}  // namespace quantest
