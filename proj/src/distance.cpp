#include "nplink/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace nplink {

CellPosterior CellPosterior::from_counts(double n, double n_plus) {
  if (n <= 0.0) return {0.0, 0.0};
  return {std::clamp(n_plus / n, 0.0, 1.0), n};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_interval_mass(double mean, double sd, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const double zl = (lo - mean) / sd;
  const double zh = (hi - mean) / sd;
  // Work in whichever tail keeps both terms small.
  if (zl >= 0.0) return normal_cdf(-zl) - normal_cdf(-zh);
  if (zh <= 0.0) return normal_cdf(zh) - normal_cdf(zl);
  return 1.0 - normal_cdf(zl) - normal_cdf(-zh);
}

namespace {

constexpr double kEqualVarianceTol = 1e-10;

double tv_equal_variance(double mu_a, double mu_b, double sd) {
  const double z = std::abs(mu_a - mu_b) / (2.0 * sd);
  // 2 Phi(z) - 1, written to avoid cancellation for small z.
  return std::erf(z / std::numbers::sqrt2);
}

}  // namespace

double tv_normal(const CellPosterior& x, const CellPosterior& y) {
  // Canonical argument order keeps the result bitwise symmetric.
  const bool swap = std::tie(x.p_hat, x.n) > std::tie(y.p_hat, y.n);
  const CellPosterior& a = swap ? y : x;
  const CellPosterior& b = swap ? x : y;
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : 1.0;
  const double va = a.variance();
  const double vb = b.variance();
  if (va <= 0.0 || vb <= 0.0) {
    if (va <= 0.0 && vb <= 0.0) return a.p_hat == b.p_hat ? 0.0 : 1.0;
    return 1.0;
  }
  const double sa = std::sqrt(va);
  const double sb = std::sqrt(vb);
  if (std::abs(sa - sb) <= kEqualVarianceTol * std::max(sa, sb)) {
    return tv_equal_variance(a.p_hat, b.p_hat, 0.5 * (sa + sb));
  }

  // log f_a - log f_b = 0  <=>  A x^2 + B x + C = 0 (after multiplying by 2).
  const double A = 1.0 / vb - 1.0 / va;
  const double B = 2.0 * a.p_hat / va - 2.0 * b.p_hat / vb;
  const double C = b.p_hat * b.p_hat / vb - a.p_hat * a.p_hat / va + std::log(vb / va);
  const double disc = std::max(0.0, B * B - 4.0 * A * C);
  const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
  double r1 = q / A;
  double r2 = q != 0.0 ? C / q : -r1;
  if (r1 > r2) std::swap(r1, r2);

  const double mass_a = normal_interval_mass(a.p_hat, sa, r1, r2);
  const double mass_b = normal_interval_mass(b.p_hat, sb, r1, r2);
  return std::clamp(std::abs(mass_a - mass_b), 0.0, 1.0);
}

double datacube_distance(const Datacube& a, const Datacube& b, double lambda) {
  const auto& ca = a.cells();
  const auto& cb = b.cells();
  double total = 0.0;
  auto posterior = [](const SmoothedCounts& c) { return CellPosterior::from_counts(c.n, c.n_plus); };
  auto stored = [](const CellCounts& c) { return CellPosterior::from_counts(c.n, c.n_plus); };
  std::size_t ia = 0, ib = 0;
  while (ia < ca.size() || ib < cb.size()) {
    if (ib == cb.size() || (ia < ca.size() && ca[ia].s < cb[ib].s)) {
      total += tv_normal(stored(ca[ia].counts), posterior(smooth_cell(b, ca[ia].s, lambda)));
      ++ia;
    } else if (ia == ca.size() || cb[ib].s < ca[ia].s) {
      total += tv_normal(posterior(smooth_cell(a, cb[ib].s, lambda)), stored(cb[ib].counts));
      ++ib;
    } else {
      if (!(ca[ia].counts == cb[ib].counts)) {
        total += tv_normal(stored(ca[ia].counts), stored(cb[ib].counts));
      }
      ++ia;
      ++ib;
    }
  }
  return total;
}

}  // namespace nplink
