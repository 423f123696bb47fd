#pragma once

#include <string>

#include "asrlab/encoder.hpp"
#include "asrlab/rl.hpp"

namespace asrlab {

// Text format, one tensor per entry:
//   asrlab-checkpoint 1 <kind>
//   <entry count>
//   <name> <rows> <cols>
//   <row-major hexfloat values, one line per row>
// Hexfloat round-trips doubles exactly. Encoder checkpoints carry weights,
// optimizer moments, and the step counter; policy checkpoints carry weights.
void save_encoder_checkpoint(const EncoderParams& params, const std::string& path);
EncoderParams load_encoder_checkpoint(const std::string& path);

void save_policy_checkpoint(const PolicyParams& params, const std::string& path);
PolicyParams load_policy_checkpoint(const std::string& path);

}  // namespace asrlab
