#include "quantest/tables.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "quantest/design.hpp"
#include "quantest/error.hpp"
#include "quantest/io.hpp"

namespace quantest {
namespace {

using Column = std::array<ReferenceRow, 8>;

// [distribution] -> 8 rows of (optimal, uniform, practical).
constexpr std::array<Column, 2> kLocation = {{
    {{{1.27323954, 1.27323954, 1.27323954},
      {1.76503630, 1.76503630, 1.75128300},
      {1.93090199, 1.92837814, 1.92740111},
      {1.97874454, 1.97841622, 1.98038526},
      {1.99468613, 1.99353005, 1.99489906},
      {1.99867153, 1.99807736, 1.99869886},
      {1.99966788, 1.99943563, 1.99967136},
      {1.99991697, 1.99983649, 1.99991741}}},
    {{{0.40528473, 0.40528473, 0.40528473},
      {0.43433896, 0.43433896, 0.40528473},
      {0.48474865, 0.45600797, 0.47893785},
      {0.49533850, 0.48136612, 0.49504170},
      {0.49883463, 0.49204506, 0.49879785},
      {0.49970866, 0.49656712, 0.49970408},
      {0.49992716, 0.49851056, 0.49992659},
      {0.49998179, 0.49935225, 0.49998172}}},
}};

constexpr std::array<Column, 2> kScale = {{
    {{{0.60841793, 0.60841793, 0.0},
      {1.30448971, 1.30448971, 1.21760862},
      {1.78857963, 1.77385323, 1.76989629},
      {1.93411857, 1.93333156, 1.93825610},
      {1.98352964, 1.98079790, 1.98404286},
      {1.99588241, 1.99450778, 1.99594618},
      {1.99897060, 1.99843923, 1.998978541},
      {1.99974265, 1.99956006, 1.99974364}}},
    {{{0.14332792, 0.14332792, 0.0},
      {0.40528473, 0.40528473, 0.40528473},
      {0.47900864, 0.47612428, 0.47893785},
      {0.49533850, 0.49213193, 0.49504170},
      {0.49883463, 0.49721135, 0.49879785},
      {0.49970866, 0.49898308, 0.49970408},
      {0.49992716, 0.49962443, 0.49992659},
      {0.49998179, 0.49986056, 0.49998172}}},
}};

Distribution table_distribution(int distribution) {
  return distribution == 0 ? Distribution::ggd(2.0) : Distribution::student(1.0);
}

void check_indices(int distribution, int n_bits) {
  if (distribution < 0 || distribution > 1) throw DomainError("table distribution index must be 0 or 1");
  if (n_bits < 1 || n_bits > 8) throw DomainError("table rows cover 1..8 bits");
}

}  // namespace

ReferenceRow reference_value(TableId which, int distribution, int n_bits) {
  check_indices(distribution, n_bits);
  const auto& t = which == TableId::Location ? kLocation : kScale;
  return t[static_cast<std::size_t>(distribution)][static_cast<std::size_t>(n_bits - 1)];
}

TableRow reproduce_row(TableId which, int distribution, int n_bits) {
  check_indices(distribution, n_bits);
  const ParamKind kind = which == TableId::Location ? ParamKind::Location : ParamKind::Scale;
  const DesignSpec spec{table_distribution(distribution), kind, n_bits};
  TableRow row;
  row.distribution = distribution == 0 ? "gaussian" : "cauchy";
  row.n_bits = n_bits;
  row.reference = reference_value(which, distribution, n_bits);
  if (n_bits <= 3) {
    const SearchResult free = exhaustive_optimal_thresholds(spec, false);
    row.unconstrained = free.fi;
    if (n_bits == 1) {
      row.optimal_method = "exhaustive";
      row.optimal = free.fi;
    } else {
      row.optimal_method = "exhaustive-symmetric";
      row.optimal = exhaustive_optimal_thresholds(spec, true).fi;
    }
  } else {
    row.optimal_method = "asymptotic";
    row.optimal = asymptotic_fi(spec);
    row.unconstrained = std::numeric_limits<double>::quiet_NaN();
  }
  row.uniform = optimal_uniform_quantizer(spec).fi;
  row.practical = quantized_fi(practical_thresholds(spec), spec.dist, kind);
  return row;
}

std::vector<TableRow> reproduce_table(TableId which) {
  std::vector<TableRow> rows;
  for (int d = 0; d < 2; ++d) {
    for (int b = 1; b <= 8; ++b) rows.push_back(reproduce_row(which, d, b));
  }
  return rows;
}

void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows) {
  os << "distribution,n_bits,optimal_method,optimal,uniform,practical,unconstrained,"
        "reference_optimal,reference_uniform,reference_practical,"
        "delta_vs_reference_optimal,delta_vs_reference_uniform,delta_vs_reference_practical\n";
  for (const TableRow& r : rows) {
    os << r.distribution << ',' << r.n_bits << ',' << r.optimal_method << ',' << format_real(r.optimal) << ','
       << format_real(r.uniform) << ',' << format_real(r.practical) << ','
       << (std::isnan(r.unconstrained) ? std::string() : format_real(r.unconstrained)) << ','
       << format_real(r.reference.optimal) << ',' << format_real(r.reference.uniform) << ','
       << format_real(r.reference.practical) << ',' << format_real(r.optimal - r.reference.optimal) << ','
       << format_real(r.uniform - r.reference.uniform) << ',' << format_real(r.practical - r.reference.practical)
       << '\n';
  }
}

TableId parse_table_id(const std::string& s) {
  if (s == "1" || s == "location") return TableId::Location;
  if (s == "2" || s == "scale") return TableId::Scale;
  throw DomainError("table must be 1 (location) or 2 (scale)");
}

}  // namespace quantest
