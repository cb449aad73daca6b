#include "magyc/preprocess.hpp"

#include <cmath>

namespace magyc {

std::vector<AveragedSample> average_windows(std::span<const MeasurementSample> samples,
                                            const PreprocessConfig& cfg) {
    if (samples.empty()) {
        throw input_error("empty-dataset", "cannot average an empty measurement stream");
    }
    if (cfg.window < 1) {
        throw input_error("bad-window", "averaging window must be >= 1");
    }

    const std::size_t theta = static_cast<std::size_t>(cfg.window);
    const std::size_t blocks = samples.size() / theta;

    std::vector<AveragedSample> out;
    out.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        AveragedSample avg;
        for (std::size_t i = b * theta; i < (b + 1) * theta; ++i) {
            avg.t += samples[i].t;
            avg.m += samples[i].m;
            avg.w += samples[i].w;
        }
        const double count = static_cast<double>(theta);
        avg.t /= count;
        avg.m /= count;
        avg.w /= count;
        out.push_back(avg);
    }
    return out;
}

std::vector<ProcessedSample> differentiate(std::span<const AveragedSample> avgs,
                                           DerivativeScheme scheme) {
    if (avgs.size() < 3) {
        throw input_error("too-few-samples",
                          "numeric differentiation needs at least 3 averaged samples");
    }
    for (std::size_t i = 1; i < avgs.size(); ++i) {
        if (!(avgs[i].t > avgs[i - 1].t)) {
            throw degenerate_error("degenerate-timing",
                                   "averaged timestamps must be strictly increasing");
        }
    }

    const std::size_t n = avgs.size();
    std::vector<ProcessedSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].t = avgs[i].t;
        out[i].m = avgs[i].m;
        out[i].w = avgs[i].w;
    }

    auto one_sided = [&](std::size_t a, std::size_t b) {
        return Vec3((avgs[b].m - avgs[a].m) / (avgs[b].t - avgs[a].t));
    };

    if (scheme == DerivativeScheme::Central) {
        out[0].m_dot = one_sided(0, 1);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            out[i].m_dot = (avgs[i + 1].m - avgs[i - 1].m) / (avgs[i + 1].t - avgs[i - 1].t);
        }
        out[n - 1].m_dot = one_sided(n - 2, n - 1);
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            out[i].m_dot = one_sided(i, i + 1);
        }
        out[n - 1].m_dot = one_sided(n - 2, n - 1);
    }
    return out;
}

std::vector<ProcessedSample> preprocess(std::span<const MeasurementSample> samples,
                                        const PreprocessConfig& cfg) {
    auto avgs = average_windows(samples, cfg);
    if (avgs.size() < 3) {
        throw input_error("window-too-large",
                          "averaging window leaves fewer than 3 processed samples");
    }
    return differentiate(avgs, cfg.scheme);
}

int default_window_for(std::span<const MeasurementSample> samples) {
    if (samples.size() < 2) return 1;
    const double span = samples.back().t - samples.front().t;
    if (span <= 0.0) return 1;
    const double rate = static_cast<double>(samples.size() - 1) / span;
    return std::max(1, static_cast<int>(std::lround(rate)));
}

}  // namespace magyc
