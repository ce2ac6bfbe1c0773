#include "truncdep/sampling.hpp"

#include <cmath>
#include <string>

#include "truncdep/errors.hpp"

namespace truncdep {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

bool in_truncation_region(double x, double t, const StudyDesign& design) {
  return t > 0.0 && t < design.big_g && t <= x && x <= t + design.s;
}

void TruncatedSample::validate() const {
  truncdep::validate(design);
  for (std::size_t j = 0; j < observations.size(); ++j) {
    const auto& o = observations[j];
    if (!in_truncation_region(o.x_tilde, o.t_tilde, design)) {
      throw DomainError("observation " + std::to_string(j) + " (x=" + std::to_string(o.x_tilde) +
                        ", t=" + std::to_string(o.t_tilde) + ") outside the truncation region");
    }
  }
  if (n_latent && *n_latent < observations.size()) {
    throw DomainError("more observations than latent draws");
  }
}

LatentPair draw_latent(const ModelParams& params, const StudyDesign& design, Rng& rng) {
  const double u = rng.uniform_open();
  const double v_check = rng.uniform_open();
  const double v = inv_cond_cdf_given_u(params.family, u, v_check, params.vartheta);
  return {-std::log1p(-u) / params.theta, design.big_g * v};
}

TruncatedSample truncate(std::span<const LatentPair> latent, const StudyDesign& design) {
  TruncatedSample out;
  out.design = design;
  out.n_latent = latent.size();
  for (const auto& p : latent) {
    if (in_truncation_region(p.x, p.t, design)) out.observations.push_back({p.x, p.t});
  }
  return out;
}

TruncatedSample simulate_truncated(const ModelParams& params, const StudyDesign& design,
                                   std::size_t n, Rng& rng) {
  if (n == 0) throw DomainError("simulate_truncated: n must be at least 1");
  validate(params);
  validate(design);
  TruncatedSample out;
  out.design = design;
  out.n_latent = n;
  for (std::size_t i = 0; i < n; ++i) {
    const LatentPair p = draw_latent(params, design, rng);
    if (in_truncation_region(p.x, p.t, design)) out.observations.push_back({p.x, p.t});
  }
  return out;
}

}  // namespace truncdep
