#ifndef RFFI_FEATURE_RASTER_HPP
#define RFFI_FEATURE_RASTER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rffi/feature/quotient.hpp"
#include "rffi/matrix.hpp"

namespace rffi::feature {

enum class FeatureSource : std::uint8_t { quotient = 0, spectrogram = 1 };

std::string feature_source_name(FeatureSource src);
FeatureSource parse_feature_source(const std::string& name);

// Fixed dB clipping interval, computed once from a training corpus and then
// frozen for the whole experiment so absolute levels stay comparable across
// images, splits and environments.
struct ClipRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Streaming percentile estimator over corpus pixel values. Uses a fixed
// histogram over [-300, 300] dB (2^16 bins, ~0.01 dB resolution), which is
// deterministic and keeps memory flat for large corpora.
class CorpusPercentiles {
public:
    CorpusPercentiles();
    void add(const RealMatrix& m);
    void add(const RealMatrix& m, const std::vector<std::uint8_t>& skip_mask);
    ClipRange range(double p_lo = 1.0, double p_hi = 99.0) const;
    std::uint64_t count() const { return total_; }

private:
    std::vector<std::uint64_t> bins_;
    std::uint64_t total_ = 0;
    double value_at_percentile(double p) const;
};

struct FeatureImage {
    std::vector<std::uint8_t> pixels;  // row-major H x H
    std::size_t size = 0;              // H
    int depth = 8;                     // bits, 1..8
    FeatureSource source = FeatureSource::quotient;
    std::string device_id;
    std::string claimed_id;

    std::uint8_t at(std::size_t r, std::size_t c) const { return pixels[r * size + c]; }
};

// Clip to [clip.lo, clip.hi], bilinearly resample the W x M matrix to
// H x H, and quantize to 2^depth levels.
FeatureImage rasterize(const RealMatrix& m, std::size_t size, int depth, const ClipRange& clip);

// Conventional benchmark feature: the raw preamble spectrogram in dB.
RealMatrix spectrogram_db(const Spectrogram& s);
FeatureImage spectrogram_feature(const Spectrogram& s, std::size_t size, int depth,
                                 const ClipRange& clip);

FeatureImage quotient_feature(const QuotientFingerprint& q, std::size_t size, int depth,
                              const ClipRange& clip);

}  // namespace rffi::feature

#endif
