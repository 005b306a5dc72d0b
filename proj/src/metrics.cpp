#include "d2d/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace d2d {

Metrics metrics(std::span<const double> effective_bps) {
  if (effective_bps.empty()) throw std::domain_error("metrics: no users");
  Metrics m;
  for (double r : effective_bps) {
    if (!(r > 0.0)) throw std::domain_error("metrics: non-positive rate");
    m.pf += std::log(r);
  }
  m.gm_mbps = std::exp(m.pf / static_cast<double>(effective_bps.size())) / 1e6;
  return m;
}

}  // namespace d2d
