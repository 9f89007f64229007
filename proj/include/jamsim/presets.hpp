#pragma once

#include "jamsim/analysis.hpp"
#include "jamsim/attacks.hpp"
#include "jamsim/model.hpp"

namespace jamsim::presets {

// Built-in reference study: an unstable two-state plant stabilized over a
// noisy wireless link, the P matrix certifying the closed loop in the
// induced norm, and the two burst attacks the reproduce-paper command
// simulates.

PlantModel reference_plant();
ChannelParams reference_channel();
Matrix reference_p_matrix();
NormContext reference_norm_context();
PHatEnvelope reference_envelope();

/// Sleep 960, jam 40 steps at power 32: satisfies the window budget
/// (kappa=1228.8, rate=1.28).
AttackStrategy short_burst_attack();
/// Sleep 1440, jam 60 steps at power 32: same average budget, violates
/// the window budget above.
AttackStrategy long_burst_attack();

inline constexpr double kReferenceKappaHat = 1228.8;
inline constexpr double kReferenceVRate = 1.28;

}  // namespace jamsim::presets
