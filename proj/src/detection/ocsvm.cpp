#include "rffi/detection/ocsvm.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rffi::detection {

namespace {

double rbf(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return std::exp(-gamma * sq);
}

}  // namespace

void OneClassSvm::fit(const std::vector<std::vector<double>>& points, const Config& cfg) {
    require(points.size() >= 2, "one-class SVM needs at least two points");
    require_config(cfg.nu > 0.0 && cfg.nu <= 1.0, "nu must lie in (0, 1]");
    const std::size_t n = points.size();
    const std::size_t dim = points[0].size();
    for (const auto& p : points) require(p.size() == dim, "embedding dimensions differ");

    cfg_ = cfg;
    gamma_ = cfg.gamma > 0.0 ? cfg.gamma : 1.0 / static_cast<double>(dim);

    // degenerate clouds have no spread to fit a boundary around
    bool all_identical = true;
    for (std::size_t i = 1; i < n && all_identical; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            if (points[i][d] != points[0][d]) {
                all_identical = false;
                break;
            }
        }
    }
    require(!all_identical, "one-class SVM: all embeddings identical, cannot fit a boundary");

    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double k = rbf(points[i], points[j], gamma_);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }

    const double cap = 1.0 / (cfg.nu * static_cast<double>(n));
    std::vector<double> alpha(n, 1.0 / static_cast<double>(n));
    // grad_i = (K alpha)_i
    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += kernel[i * n + j] * alpha[j];
        grad[i] = acc;
    }

    // most-violating-pair updates under the equality constraint sum a = 1
    for (std::size_t pass = 0; pass < cfg.max_passes; ++pass) {
        std::size_t up = n, down = n;
        double min_up = 0.0, max_down = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] < cap - 1e-15 && (up == n || grad[i] < min_up)) {
                up = i;
                min_up = grad[i];
            }
            if (alpha[i] > 1e-15 && (down == n || grad[i] > max_down)) {
                down = i;
                max_down = grad[i];
            }
        }
        if (up == n || down == n || max_down - min_up < cfg.tol) break;

        const double eta = kernel[up * n + up] + kernel[down * n + down] - 2.0 * kernel[up * n + down];
        double step = eta > 1e-15 ? (max_down - min_up) / eta : cap;
        step = std::min(step, std::min(cap - alpha[up], alpha[down]));
        if (step <= 0.0) break;
        alpha[up] += step;
        alpha[down] -= step;
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] += step * (kernel[i * n + up] - kernel[i * n + down]);
        }
    }

    // rho from the free support vectors (interior alphas)
    double rho_acc = 0.0;
    std::size_t rho_cnt = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 1e-12 && alpha[i] < cap - 1e-12) {
            rho_acc += grad[i];
            ++rho_cnt;
        }
    }
    if (rho_cnt > 0) {
        rho_ = rho_acc / static_cast<double>(rho_cnt);
    } else {
        double lo = -1e300, hi = 1e300;
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] >= cap - 1e-12) lo = std::max(lo, grad[i]);
            if (alpha[i] <= 1e-12) hi = std::min(hi, grad[i]);
        }
        if (lo <= -1e299) lo = hi;
        if (hi >= 1e299) hi = lo;
        rho_ = 0.5 * (lo + hi);
    }

    support_.clear();
    alpha_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 1e-12) {
            support_.push_back(points[i]);
            alpha_.push_back(alpha[i]);
        }
    }
}

double OneClassSvm::decision(const std::vector<double>& x) const {
    require(fitted(), "one-class SVM not fitted");
    require(x.size() == support_[0].size(), "one-class SVM: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        acc += alpha_[i] * rbf(support_[i], x, gamma_);
    }
    return acc - rho_;
}

void OneClassSvm::restore(std::vector<std::vector<double>> support, std::vector<double> alpha,
                          double rho, double gamma, Config cfg) {
    require(support.size() == alpha.size() && !support.empty(), "bad SVM state");
    support_ = std::move(support);
    alpha_ = std::move(alpha);
    rho_ = rho;
    gamma_ = gamma;
    cfg_ = cfg;
}

OneClassSvm fit_boundary(const std::vector<std::vector<double>>& embeddings, double nu,
                         double gamma) {
    OneClassSvm svm;
    OneClassSvm::Config cfg;
    cfg.nu = nu;
    cfg.gamma = gamma;
    svm.fit(embeddings, cfg);
    return svm;
}

DetectionResult detect(OneClassDetector& det, const DiffMatrix& d) {
    require(det.boundary.fitted(), "detector not fitted");
    const std::vector<double> e = det.extractor.embed(d);
    DetectionResult res;
    res.score = det.boundary.decision(e) - det.threshold;
    res.anomaly = res.score < 0.0;
    return res;
}

std::vector<EmbeddingRow> export_embeddings(const std::vector<DiffMatrix>& matrices,
                                            OneClassDetector& det) {
    require(det.boundary.fitted(), "detector not fitted");
    std::vector<EmbeddingRow> rows;
    rows.reserve(matrices.size());
    for (const DiffMatrix& d : matrices) {
        EmbeddingRow row;
        row.embedding = det.extractor.embed(d);
        row.label = d.label == DiffMatrix::Label::anomaly
                        ? "anomaly"
                        : (d.label == DiffMatrix::Label::normal ? "normal" : "unknown");
        row.scenario = d.scenario_meta;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string embeddings_csv(const std::vector<EmbeddingRow>& rows) {
    std::ostringstream os;
    os << "label,scenario";
    const std::size_t dim = rows.empty() ? 0 : rows[0].embedding.size();
    for (std::size_t i = 0; i < dim; ++i) os << ",e" << i;
    os << "\n";
    for (const EmbeddingRow& row : rows) {
        os << row.label << "," << row.scenario;
        for (double v : row.embedding) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), ",%.9g", v);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

namespace {
constexpr char kDetectorMagic[8] = {'R', 'F', 'F', 'I', 'D', 'E', 'T', '1'};
}

void save_detector(const OneClassDetector& det, const std::filesystem::path& path) {
    auto& extractor = const_cast<DiffEmbedder&>(det.extractor);
    const auto tensors = extractor.state_tensors();

    nlohmann::ordered_json header;
    const EmbedderConfig& cfg = det.extractor.config();
    header["embedder"] = {{"image_size", cfg.image_size},       {"depth", cfg.depth},
                          {"conv_filters", cfg.conv_filters},   {"proxy_groups", cfg.proxy_groups},
                          {"epochs", cfg.epochs},               {"batch_size", cfg.batch_size},
                          {"learning_rate", cfg.learning_rate}};
    header["clip"] = {det.extractor.clip().lo, det.extractor.clip().hi};
    header["svm"] = {{"nu", det.boundary.nu()},
                     {"gamma", det.boundary.gamma()},
                     {"rho", det.boundary.rho()},
                     {"support_count", det.boundary.support_vectors().size()},
                     {"dim", det.boundary.support_vectors().empty()
                                 ? 0
                                 : det.boundary.support_vectors()[0].size()}};
    header["threshold"] = det.threshold;
    std::vector<std::size_t> sizes;
    for (const auto* t : tensors) sizes.push_back(t->size());
    header["tensor_sizes"] = sizes;
    const std::string htext = header.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open detector file for writing: " + path.string());
    os.write(kDetectorMagic, sizeof(kDetectorMagic));
    const std::uint64_t hlen = htext.size();
    os.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    os.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    for (const auto* t : tensors) {
        os.write(reinterpret_cast<const char*>(t->data()),
                 static_cast<std::streamsize>(t->size() * sizeof(float)));
    }
    // support vectors and alphas as float32, matching the model convention
    for (const auto& sv : det.boundary.support_vectors()) {
        for (double v : sv) {
            const float f = static_cast<float>(v);
            os.write(reinterpret_cast<const char*>(&f), sizeof(f));
        }
    }
    for (double a : det.boundary.alphas()) {
        const float f = static_cast<float>(a);
        os.write(reinterpret_cast<const char*>(&f), sizeof(f));
    }
    if (!os) throw FormatError("short write: " + path.string());
}

OneClassDetector load_detector(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw FormatError("cannot open detector file: " + path.string());
    const auto file_size = static_cast<std::uint64_t>(is.tellg());
    is.seekg(0);

    char magic[8];
    std::uint64_t hlen = 0;
    if (file_size < sizeof(magic) + sizeof(hlen)) throw FormatError("detector file truncated");
    is.read(magic, sizeof(magic));
    if (std::memcmp(magic, kDetectorMagic, sizeof(magic)) != 0)
        throw FormatError("not a detector file: " + path.string());
    is.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    if (sizeof(magic) + sizeof(hlen) + hlen > file_size)
        throw FormatError("detector header truncated");
    std::string htext(hlen, '\0');
    is.read(htext.data(), static_cast<std::streamsize>(hlen));

    OneClassDetector det;
    std::size_t support_count = 0, dim = 0;
    double nu = 0.1, gamma = 0.0, rho = 0.0;
    try {
        const nlohmann::json header = nlohmann::json::parse(htext);
        EmbedderConfig cfg;
        cfg.image_size = header.at("embedder").at("image_size").get<std::size_t>();
        cfg.depth = header.at("embedder").at("depth").get<int>();
        cfg.conv_filters = header.at("embedder").at("conv_filters").get<std::vector<std::size_t>>();
        cfg.proxy_groups = header.at("embedder").at("proxy_groups").get<std::size_t>();
        cfg.epochs = header.at("embedder").at("epochs").get<int>();
        cfg.batch_size = header.at("embedder").at("batch_size").get<std::size_t>();
        cfg.learning_rate = header.at("embedder").at("learning_rate").get<double>();
        det.extractor = DiffEmbedder(cfg, 0);
        det.extractor.set_clip({header.at("clip").at(0).get<double>(),
                                header.at("clip").at(1).get<double>()});
        nu = header.at("svm").at("nu").get<double>();
        gamma = header.at("svm").at("gamma").get<double>();
        rho = header.at("svm").at("rho").get<double>();
        support_count = header.at("svm").at("support_count").get<std::size_t>();
        dim = header.at("svm").at("dim").get<std::size_t>();
        det.threshold = header.at("threshold").get<double>();

        const auto declared = header.at("tensor_sizes").get<std::vector<std::size_t>>();
        const auto tensors = det.extractor.state_tensors();
        if (declared.size() != tensors.size())
            throw FormatError("detector header: tensor count mismatch");
        std::uint64_t blob = 0;
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            if (declared[i] != tensors[i]->size())
                throw FormatError("detector header: tensor shape mismatch");
            blob += declared[i] * sizeof(float);
        }
        blob += (support_count * dim + support_count) * sizeof(float);
        if (sizeof(magic) + sizeof(hlen) + hlen + blob != file_size)
            throw FormatError("detector blob size mismatch");

        for (auto* t : tensors) {
            is.read(reinterpret_cast<char*>(t->data()),
                    static_cast<std::streamsize>(t->size() * sizeof(float)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad detector header: " + std::string(e.what()));
    }

    std::vector<std::vector<double>> support(support_count, std::vector<double>(dim));
    std::vector<double> alphas(support_count);
    for (auto& sv : support) {
        for (double& v : sv) {
            float f = 0.0f;
            is.read(reinterpret_cast<char*>(&f), sizeof(f));
            v = f;
        }
    }
    for (double& a : alphas) {
        float f = 0.0f;
        is.read(reinterpret_cast<char*>(&f), sizeof(f));
        a = f;
    }
    if (!is) throw FormatError("detector blob truncated");

    OneClassSvm::Config cfg;
    cfg.nu = nu;
    cfg.gamma = gamma;
    det.boundary.restore(std::move(support), std::move(alphas), rho, gamma, cfg);
    return det;
}

}  // namespace rffi::detection
