#pragma once

#include <cstdint>

#include "config.hpp"
#include "world.hpp"

namespace smca {

// Piecewise-constant random babbling. Each block of `resample_period` steps
// draws from its own counter-keyed generator, so the command at any step is a
// pure function of (policy, seed, agent, step).
MotorCommand block_command(const BabblePolicy& policy, double max_joint_speed, std::uint64_t seed,
                           int agent, std::int64_t block);

MotorCommand command_at(const BabblePolicy& policy, double max_joint_speed, std::uint64_t seed,
                        int agent, std::int64_t step);

// Per-agent stream state: the held block and its command.
struct BabbleState {
  std::int64_t block = -1;
  MotorCommand held{};
};

struct BabbleSample {
  MotorCommand command;
  BabbleState state;
};

BabbleSample sample_commands(const BabblePolicy& policy, double max_joint_speed, std::uint64_t seed,
                             int agent, std::int64_t step, BabbleState state);

class Babbler {
 public:
  Babbler(BabblePolicy policy, double max_joint_speed, std::uint64_t seed)
      : policy_(policy), max_speed_(max_joint_speed), seed_(seed) {
    validate(policy_);
  }

  CommandPair commands(std::int64_t step) {
    CommandPair out{};
    for (int a = 0; a < kAgentCount; ++a) {
      auto s = sample_commands(policy_, max_speed_, seed_, a, step, state_[a]);
      state_[a] = s.state;
      out[a] = s.command;
    }
    return out;
  }

 private:
  BabblePolicy policy_;
  double max_speed_;
  std::uint64_t seed_;
  std::array<BabbleState, kAgentCount> state_{};
};

}  // namespace smca
