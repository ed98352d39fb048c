#include "rffi/feature/quotient.hpp"

#include <cmath>

namespace rffi::feature {

std::vector<double> frame_peak_magnitudes(const Spectrogram& s) {
    std::vector<double> peaks(s.frames(), 0.0);
    for (std::size_t m = 0; m < s.frames(); ++m) {
        const cplx* col = s.bins.col_data(m);
        double peak = 0.0;
        for (std::size_t w = 0; w < s.width(); ++w) {
            peak = std::max(peak, std::abs(col[w]));
        }
        peaks[m] = peak;
    }
    return peaks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size() && a.size() >= 2, "pearson: sequences must match and have >= 2 points");
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double caa = 0.0, cbb = 0.0, cab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        caa += da * da;
        cbb += db * db;
        cab += da * db;
    }
    const double scale_a = std::abs(mean_a) + 1e-300;
    const double scale_b = std::abs(mean_b) + 1e-300;
    const bool flat_a = std::sqrt(caa / n) <= 1e-12 * scale_a;
    const bool flat_b = std::sqrt(cbb / n) <= 1e-12 * scale_b;
    if (flat_a || flat_b) {
        throw MetricError("pearson: sequence has zero variance, correlation undefined");
    }
    return cab / std::sqrt(caa * cbb);
}

FilterResult correlation_filter(const Spectrogram& s_high, const Spectrogram& s_low,
                                double rho_ref, double theta) {
    require(s_high.bins.same_shape(s_low.bins), "correlation_filter: spectrogram shapes differ");
    require(rho_ref >= -1.0 && rho_ref <= 1.0, "correlation_filter: rho_ref must lie in [-1, 1]");
    require(theta >= 0.0, "correlation_filter: theta must be nonnegative");

    FilterResult res;
    res.rho = pearson(frame_peak_magnitudes(s_high), frame_peak_magnitudes(s_low));
    res.rho_d = std::abs(rho_ref - res.rho);
    res.accepted = res.rho_d <= theta;
    return res;
}

QuotientFingerprint quotient(const Spectrogram& s_high, const Spectrogram& s_low,
                             double guard_epsilon) {
    require(s_high.bins.same_shape(s_low.bins), "quotient: spectrogram shapes differ");

    double max_low = 0.0;
    for (const cplx& v : s_low.bins.data()) max_low = std::max(max_low, std::abs(v));
    const double guard = guard_epsilon * max_low;

    QuotientFingerprint q;
    q.q_db = RealMatrix(s_high.width(), s_high.frames());
    q.mask.assign(q.q_db.size(), 0);
    for (std::size_t i = 0; i < q.q_db.size(); ++i) {
        const double denom = std::abs(s_low.bins.data()[i]);
        if (denom <= guard) {
            q.mask[i] = 1;
            q.q_db.data()[i] = 0.0;
            continue;
        }
        const double ratio = std::max(std::abs(s_high.bins.data()[i]) / denom, 1e-150);
        q.q_db.data()[i] = 20.0 * std::log10(ratio);
    }
    return q;
}

}  // namespace rffi::feature
