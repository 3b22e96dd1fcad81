#pragma once

#include "sglab/eval.hpp"
#include "sglab/field.hpp"
#include "sglab/guidance.hpp"
#include "sglab/sampler.hpp"

namespace sglab {

/// Fokker-Planck problem whose particles are exactly the sampler's chains:
/// the guided drift is frozen at each sampler time. SDE and ODE samplers only;
/// SG-prev depends on chain history and has no field form.
FokkerPlanckProblem reverse_process_problem(const ScoreField& field, const GuidanceStack& stack,
                                            const SamplerConfig& config);

}  // namespace sglab
