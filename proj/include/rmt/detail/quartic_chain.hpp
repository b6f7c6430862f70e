#pragma once

// Metropolis chain for exp(-Tr M^2 / (2 sigma^2) - (g / N) Tr M^4) with
// single-entry Hermitian updates. Exposed for tests.

#include "rmt/hermitian.hpp"
#include "rmt/rng.hpp"

#include <vector>

namespace rmt::detail {

class QuarticChain {
 public:
  QuarticChain(std::size_t n, double sigma, double g, Rng& rng);

  /// One row-major sweep over i <= j; returns the number of accepted moves.
  std::size_t sweep(Rng& rng, double step);
  std::size_t proposals_per_sweep() const { return n_ * (n_ + 1) / 2; }

  /// Tracked action and the same quantity recomputed from scratch.
  double action() const { return action_; }
  double recomputed_action() const;

  HermitianMatrix matrix() const;

 private:
  std::size_t n_;
  double sigma_, g_;
  std::vector<Complex> m_, q_;  // M and M^2, full row-major
  double action_ = 0.0;

  void recompute_square();
};

}  // namespace rmt::detail
