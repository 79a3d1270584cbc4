#pragma once

#include "proximal.hpp"
#include "quotient.hpp"
#include "weak_mixing.hpp"

namespace ktower {

/// Dispatches on the variant. The prop52 array starts at index 0 with the proximal Step 0;
/// it is returned as a single row.
inline ModelSequence build_model_sequence(const OdometerSystem& sys, const std::vector<Partition>& betas,
                                          const std::vector<Rational>& eps_seq, std::int64_t depth, ModelVariant variant,
                                          const ModelOptions& opt = {}) {
    if (variant == ModelVariant::prop44) return build_model_sequence_prop44(sys, betas, eps_seq, depth, opt);
    require(!betas.empty() && !eps_seq.empty(), "build_model_sequence: need beta_0 and eps_0");
    const auto step0 = prop51_adjust(sys, betas[0], eps_seq[0], depth);
    ModelSequence out;
    out.variant = variant;
    out.depth = 0;
    out.betas_in = {betas[0]};
    out.eps_seq = {eps_seq[0]};
    out.betas = {betas[0]};
    out.gamma = {{step0.alphas.back()}};
    out.tower = step0.tower;
    return out;
}

} // namespace ktower
