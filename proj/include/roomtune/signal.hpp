#pragma once

#include <vector>

namespace roomtune {

/// Uniformly sampled pressure signal at a receiver.
struct ImpulseResponse {
    double sample_rate = 0.0;  // Hz
    std::vector<double> samples;

    double duration() const { return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0; }
};

}  // namespace roomtune
