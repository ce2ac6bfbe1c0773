#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "truncdep/copula.hpp"

namespace truncdep {

/// 64-bit mixing function (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Seed for stream `index` under a master seed; independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Uniform stream on the open interval (0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  double uniform_open() {
    // 53 random bits, shifted to the cell midpoint: never 0, never 1.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct LatentPair {
  double x = 0.0;  // lifetime, years
  double t = 0.0;  // age at study start, years
};

struct ObservedPair {
  double x_tilde = 0.0;
  double t_tilde = 0.0;
};

bool in_truncation_region(double x, double t, const StudyDesign& design);

/// The M observed pairs and their design; n_latent is known only for
/// simulated data.
struct TruncatedSample {
  std::vector<ObservedPair> observations;
  StudyDesign design;
  std::optional<std::size_t> n_latent;

  std::size_t size() const { return observations.size(); }

  /// Throws DomainError naming the first offending index (0-based).
  void validate() const;
};

/// One latent pair by conditional inversion; consumes exactly two uniforms.
LatentPair draw_latent(const ModelParams& params, const StudyDesign& design, Rng& rng);

/// Keeps pairs with t <= x <= t + s and 0 < t < G, in order.
TruncatedSample truncate(std::span<const LatentPair> latent, const StudyDesign& design);

/// n latent draws followed by truncation.
TruncatedSample simulate_truncated(const ModelParams& params, const StudyDesign& design,
                                   std::size_t n, Rng& rng);

}  // namespace truncdep
