#pragma once

#include "nplink/datacube.hpp"

namespace nplink {

/// Normal approximation N(p_hat, p_hat(1 - p_hat) / n) to the linkage-rate
/// posterior of one cell. n == 0 means "no data".
struct CellPosterior {
  double p_hat = 0.0;
  double n = 0.0;

  static CellPosterior from_counts(double n, double n_plus);
  bool empty() const { return n <= 0.0; }
  double variance() const { return n > 0.0 ? p_hat * (1.0 - p_hat) / n : 0.0; }
};

/// Standard normal CDF.
double normal_cdf(double z);

/// Probability that N(mean, sd^2) lands in [lo, hi]; sd must be > 0.
double normal_interval_mass(double mean, double sd, double lo, double hi);

/// Total variation distance between the two posteriors' normal laws.
///
/// Zero-variance posteriors (n == 0, or p_hat in {0, 1}) are point masses: two
/// point masses are at distance 0 when their means agree and 1 otherwise, and a
/// point mass is at distance 1 from any proper normal. Two empty posteriors are
/// identical. Unequal variances use the two density crossing points.
double tv_normal(const CellPosterior& a, const CellPosterior& b);

/// Sum over the union of stored cells of the per-cell TV between smoothed
/// posteriors.
double datacube_distance(const Datacube& a, const Datacube& b, double lambda);

}  // namespace nplink
