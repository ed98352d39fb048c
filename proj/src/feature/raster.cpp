#include "rffi/feature/raster.hpp"

#include <algorithm>
#include <cmath>

namespace rffi::feature {

std::string feature_source_name(FeatureSource src) {
    return src == FeatureSource::quotient ? "quotient" : "spectrogram";
}

FeatureSource parse_feature_source(const std::string& name) {
    if (name == "quotient") return FeatureSource::quotient;
    if (name == "spectrogram") return FeatureSource::spectrogram;
    throw ConfigError("unknown feature source: " + name);
}

namespace {
constexpr double kHistLo = -300.0;
constexpr double kHistHi = 300.0;
constexpr std::size_t kHistBins = 1 << 16;
}  // namespace

CorpusPercentiles::CorpusPercentiles() : bins_(kHistBins, 0) {}

void CorpusPercentiles::add(const RealMatrix& m) {
    for (double v : m.data()) {
        require(std::isfinite(v), "corpus percentile input must be finite");
        const double t = (std::clamp(v, kHistLo, kHistHi) - kHistLo) / (kHistHi - kHistLo);
        const auto idx = std::min(kHistBins - 1, static_cast<std::size_t>(t * static_cast<double>(kHistBins)));
        ++bins_[idx];
        ++total_;
    }
}

void CorpusPercentiles::add(const RealMatrix& m, const std::vector<std::uint8_t>& skip_mask) {
    require(skip_mask.size() == m.size(), "skip mask size mismatch");
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (skip_mask[i]) continue;
        const double v = m.data()[i];
        require(std::isfinite(v), "corpus percentile input must be finite");
        const double t = (std::clamp(v, kHistLo, kHistHi) - kHistLo) / (kHistHi - kHistLo);
        const auto idx = std::min(kHistBins - 1, static_cast<std::size_t>(t * static_cast<double>(kHistBins)));
        ++bins_[idx];
        ++total_;
    }
}

double CorpusPercentiles::value_at_percentile(double p) const {
    require(total_ > 0, "corpus percentile: no data");
    const double target = p / 100.0 * static_cast<double>(total_);
    std::uint64_t cum = 0;
    for (std::size_t i = 0; i < kHistBins; ++i) {
        cum += bins_[i];
        if (static_cast<double>(cum) >= target) {
            const double width = (kHistHi - kHistLo) / static_cast<double>(kHistBins);
            return kHistLo + (static_cast<double>(i) + 0.5) * width;
        }
    }
    return kHistHi;
}

ClipRange CorpusPercentiles::range(double p_lo, double p_hi) const {
    ClipRange r{value_at_percentile(p_lo), value_at_percentile(p_hi)};
    return r;
}

FeatureImage rasterize(const RealMatrix& m, std::size_t size, int depth, const ClipRange& clip) {
    require(!m.empty(), "rasterize: empty matrix");
    require(size >= 1, "rasterize: target size must be >= 1");
    require_config(depth >= 1 && depth <= 8, "rasterize: depth must be in 1..8");
    require(clip.hi > clip.lo, "rasterize: degenerate dynamic range (p1 == p99)");
    for (double v : m.data()) require(std::isfinite(v), "rasterize: matrix must be finite");

    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    const double span = clip.hi - clip.lo;
    const double levels = static_cast<double>((1 << depth) - 1);

    auto clipped = [&](std::size_t r, std::size_t c) {
        return std::clamp(m(r, c), clip.lo, clip.hi);
    };

    FeatureImage img;
    img.size = size;
    img.depth = depth;
    img.pixels.resize(size * size);

    // bilinear resample on the clipped matrix, corners aligned
    const double rscale = size > 1 ? static_cast<double>(rows - 1) / static_cast<double>(size - 1) : 0.0;
    const double cscale = size > 1 ? static_cast<double>(cols - 1) / static_cast<double>(size - 1) : 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double sr = static_cast<double>(i) * rscale;
        const auto r0 = static_cast<std::size_t>(sr);
        const std::size_t r1 = std::min(r0 + 1, rows - 1);
        const double fr = sr - static_cast<double>(r0);
        for (std::size_t j = 0; j < size; ++j) {
            const double sc = static_cast<double>(j) * cscale;
            const auto c0 = static_cast<std::size_t>(sc);
            const std::size_t c1 = std::min(c0 + 1, cols - 1);
            const double fc = sc - static_cast<double>(c0);
            const double top = clipped(r0, c0) * (1.0 - fc) + clipped(r0, c1) * fc;
            const double bot = clipped(r1, c0) * (1.0 - fc) + clipped(r1, c1) * fc;
            const double v = top * (1.0 - fr) + bot * fr;
            const double q = std::round((v - clip.lo) / span * levels);
            img.pixels[i * size + j] = static_cast<std::uint8_t>(std::clamp(q, 0.0, levels));
        }
    }
    return img;
}

RealMatrix spectrogram_db(const Spectrogram& s) {
    return magnitude_db(s.bins);
}

FeatureImage spectrogram_feature(const Spectrogram& s, std::size_t size, int depth,
                                 const ClipRange& clip) {
    FeatureImage img = rasterize(spectrogram_db(s), size, depth, clip);
    img.source = FeatureSource::spectrogram;
    return img;
}

FeatureImage quotient_feature(const QuotientFingerprint& q, std::size_t size, int depth,
                              const ClipRange& clip) {
    FeatureImage img = rasterize(q.q_db, size, depth, clip);
    img.source = FeatureSource::quotient;
    img.device_id = q.device_id;
    img.claimed_id = q.claimed_id;
    return img;
}

}  // namespace rffi::feature
