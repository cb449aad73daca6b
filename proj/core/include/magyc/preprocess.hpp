#pragma once

#include <span>
#include <vector>

#include "magyc/types.hpp"

namespace magyc {

enum class DerivativeScheme { Central, Forward };

struct PreprocessConfig {
    int window = 1;  // averaging window theta, in samples
    DerivativeScheme scheme = DerivativeScheme::Central;
};

/// Window-averaged sample before differentiation.
struct AveragedSample {
    double t = 0.0;
    Vec3 m = Vec3::Zero();
    Vec3 w = Vec3::Zero();
};

/// Averages consecutive non-overlapping blocks of cfg.window samples
/// componentwise; a trailing partial block is dropped. Block timestamps
/// are the mean of the member timestamps.
std::vector<AveragedSample> average_windows(std::span<const MeasurementSample> samples,
                                            const PreprocessConfig& cfg);

/// Numeric field derivative over the averaged sequence. Interior points
/// use central differences, endpoints one-sided first-order differences
/// (forward scheme: one-sided throughout, backward at the last point).
std::vector<ProcessedSample> differentiate(std::span<const AveragedSample> avgs,
                                           DerivativeScheme scheme = DerivativeScheme::Central);

/// average_windows + differentiate. Requires at least 3 complete blocks.
std::vector<ProcessedSample> preprocess(std::span<const MeasurementSample> samples,
                                        const PreprocessConfig& cfg);

/// Default window: the stream's nominal sample rate in Hz (rounded),
/// so one processed sample covers roughly one second.
int default_window_for(std::span<const MeasurementSample> samples);

}  // namespace magyc
