#pragma once

#include "truncdep/copula.hpp"
#include "truncdep/quadrature.hpp"

namespace truncdep {

/// Selection probability and its partial derivatives in (theta, vartheta).
struct AlphaBundle {
  double alpha = 0.0;
  double d_theta = 0.0;
  double d_vartheta = 0.0;
  double d2_theta_theta = 0.0;
  double d2_theta_vartheta = 0.0;
  double d2_vartheta_vartheta = 0.0;
};

struct SelectionOptions {
  quad::Tolerance outer{1e-12, 1e-12, 400};
  quad::Tolerance inner{1e-13, 1e-12, 200};
  bool second_derivatives = true;
};

/// P{T <= X <= T + s}: 2-D quadrature of the joint density over the
/// parallelogram D for Gumbel-Barnett, closed form for FGM.
double alpha(const ModelParams& params, const StudyDesign& design,
             const SelectionOptions& options = {});

/// alpha with first partials (quadrature of the differentiated density) and
/// second partials (central differences of the first partials, step
/// 1e-5 * max(1, |p|)). FGM derivatives are exact.
AlphaBundle alpha_bundle(const ModelParams& params, const StudyDesign& design,
                         const SelectionOptions& options = {});

namespace detail {
// No parameter validation; used for numerical derivatives at the box edge.
AlphaBundle alpha_bundle_unchecked(const ModelParams& params, const StudyDesign& design,
                                   const SelectionOptions& options);
}  // namespace detail

}  // namespace truncdep
