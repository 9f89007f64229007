#include "jamsim/presets.hpp"

namespace jamsim::presets {

PlantModel reference_plant() {
  return PlantModel(Matrix{{0.1, -1.0}, {1.1, 1.8}}, Matrix{{0.0}, {1.0}},
                    Matrix{{-0.9277, -1.2615}}, Vector{1.0, 1.0});
}

ChannelParams reference_channel() { return ChannelParams(1.0, 3.0, 0.4); }

Matrix reference_p_matrix() { return Matrix{{0.7728, 0.8554}, {0.8554, 3.2649}}; }

NormContext reference_norm_context() { return NormContext::from_p_matrix(reference_p_matrix()); }

PHatEnvelope reference_envelope() {
  const ChannelParams ch = reference_channel();
  return PHatEnvelope::shifted(ch, PHatEnvelope::default_psi(ch));
}

AttackStrategy short_burst_attack() { return explicit_strategy(960, 40, 32.0); }

AttackStrategy long_burst_attack() { return explicit_strategy(1440, 60, 32.0); }

}  // namespace jamsim::presets
