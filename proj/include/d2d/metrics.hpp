#pragma once

#include <span>

namespace d2d {

struct Metrics {
  double gm_mbps = 0.0;  // geometric mean of effective rates
  double pf = 0.0;       // sum of natural-log rates, rates in bit/s
};

/// Throws std::domain_error on a non-positive rate.
Metrics metrics(std::span<const double> effective_bps);

}  // namespace d2d
