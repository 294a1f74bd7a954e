#include "babble.hpp"

#include <random>

namespace smca {
namespace {

// 53 random bits -> [0,1). Avoids the implementation-defined distributions.
double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace

MotorCommand block_command(const BabblePolicy& policy, double max_joint_speed, std::uint64_t seed,
                           int agent, std::int64_t block) {
  const auto stream = policy.rng_stream_id[agent];
  const auto b = static_cast<std::uint64_t>(block);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::mt19937_64 gen(seq);

  MotorCommand cmd{};
  if (unit(gen) < policy.activity_bias[agent]) {
    const double scale = policy.amplitude * max_joint_speed;
    for (auto& m : cmd) m = (2.0 * unit(gen) - 1.0) * scale;
  }
  return cmd;
}

MotorCommand command_at(const BabblePolicy& policy, double max_joint_speed, std::uint64_t seed,
                        int agent, std::int64_t step) {
  return block_command(policy, max_joint_speed, seed, agent, step / policy.resample_period);
}

BabbleSample sample_commands(const BabblePolicy& policy, double max_joint_speed, std::uint64_t seed,
                             int agent, std::int64_t step, BabbleState state) {
  const std::int64_t block = step / policy.resample_period;
  if (block != state.block) {
    state.block = block;
    state.held = block_command(policy, max_joint_speed, seed, agent, block);
  }
  return {state.held, state};
}

}  // namespace smca
