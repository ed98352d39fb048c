#include "rffi/detection/diff.hpp"

#include <json.hpp>

#include <cmath>

#include "rffi/io.hpp"

namespace rffi::detection {

void DiffMatrix::validate() const {
    require(values.rows() == row_observations.size(), "diff matrix rows mismatch");
    require(values.cols() == col_classes.size(), "diff matrix cols mismatch");
    for (double v : values.data()) {
        require(std::isfinite(v) && std::abs(v) <= 1.0 + 1e-12,
                "diff matrix entries must lie in [-1, 1]");
    }
}

DiffMatrix posterior_difference(const classifier::PosteriorMatrix& m_transfer,
                                const classifier::PosteriorMatrix& m_deep) {
    require(m_transfer.probs.same_shape(m_deep.probs), "posterior difference: shape mismatch");
    require(m_transfer.col_classes == m_deep.col_classes,
            "posterior difference: class orderings differ");
    require(m_transfer.row_observations == m_deep.row_observations,
            "posterior difference: observation orderings differ");

    DiffMatrix d;
    d.row_observations = m_transfer.row_observations;
    d.col_classes = m_transfer.col_classes;
    d.values = RealMatrix(m_transfer.probs.rows(), m_transfer.probs.cols());
    double max_abs = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const double v = m_transfer.probs.data()[i] - m_deep.probs.data()[i];
        d.values.data()[i] = v;
        max_abs = std::max(max_abs, std::abs(v));
    }
    if (max_abs > 0.0) {
        for (double& v : d.values.data()) v /= max_abs;
    }
    d.validate();
    return d;
}

std::map<std::string, double> true_positive_margin(const DiffMatrix& d,
                                                   const std::vector<std::string>& labels) {
    require(labels.size() == d.values.rows(), "margin: labels must cover all rows");
    std::map<std::string, double> sums;
    std::map<std::string, std::size_t> counts;
    for (std::size_t c = 0; c < d.col_classes.size(); ++c) {
        const std::string& cls = d.col_classes[c];
        for (std::size_t o = 0; o < d.values.rows(); ++o) {
            if (labels[o] != cls) continue;
            sums[cls] += d.values(o, c);
            ++counts[cls];
        }
    }
    std::map<std::string, double> margins;
    for (const auto& [cls, total] : sums) {
        margins[cls] = total / static_cast<double>(counts[cls]);
    }
    return margins;
}

void save_diff_matrix(const std::filesystem::path& stem, const DiffMatrix& d) {
    d.validate();
    nlohmann::ordered_json j;
    j["rows"] = d.values.rows();
    j["cols"] = d.values.cols();
    j["classes"] = d.col_classes;
    j["observations"] = d.row_observations;
    j["scenario"] = d.scenario_meta;
    j["label"] = d.label == DiffMatrix::Label::anomaly
                     ? "anomaly"
                     : (d.label == DiffMatrix::Label::normal ? "normal" : "unknown");
    write_text(stem.string() + ".json", j.dump(2) + "\n");

    std::vector<float> blob(d.values.size());
    for (std::size_t o = 0; o < d.values.rows(); ++o) {
        for (std::size_t c = 0; c < d.values.cols(); ++c) {
            blob[o * d.values.cols() + c] = static_cast<float>(d.values(o, c));
        }
    }
    write_f32(stem.string() + ".f32", blob);
}

DiffMatrix load_diff_matrix(const std::filesystem::path& stem) {
    DiffMatrix d;
    try {
        const nlohmann::json j = nlohmann::json::parse(read_text(stem.string() + ".json"));
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        d.col_classes = j.at("classes").get<std::vector<std::string>>();
        d.row_observations = j.at("observations").get<std::vector<std::string>>();
        d.scenario_meta = j.at("scenario").get<std::string>();
        const std::string label = j.at("label").get<std::string>();
        d.label = label == "anomaly" ? DiffMatrix::Label::anomaly
                                     : (label == "normal" ? DiffMatrix::Label::normal
                                                          : DiffMatrix::Label::unknown);
        const std::vector<float> blob = read_f32(stem.string() + ".f32");
        if (blob.size() != rows * cols) throw FormatError("diff matrix blob size mismatch");
        d.values = RealMatrix(rows, cols);
        for (std::size_t o = 0; o < rows; ++o) {
            for (std::size_t c = 0; c < cols; ++c) {
                d.values(o, c) = blob[o * cols + c];
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad diff matrix metadata: " + std::string(e.what()));
    }
    d.validate();
    return d;
}

}  // namespace rffi::detection
