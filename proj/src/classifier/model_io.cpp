#include "rffi/classifier/model_io.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>

namespace rffi::classifier {

namespace {
constexpr char kMagic[8] = {'R', 'F', 'F', 'I', 'M', 'D', 'L', '1'};
}

void save(const TrainedModel& model, const std::filesystem::path& path) {
    auto& net = const_cast<TrainedModel&>(model).net;
    const auto tensors = net.state_tensors();

    nlohmann::ordered_json header;
    header["arch"] = {{"input_size", model.arch.input_size},
                      {"conv_filters", model.arch.conv_filters},
                      {"num_classes", model.arch.num_classes}};
    header["class_labels"] = model.class_labels;
    header["provenance"] = model.provenance;
    header["model_id"] = model.model_id;
    std::vector<std::size_t> sizes;
    for (const auto* t : tensors) sizes.push_back(t->size());
    header["tensor_sizes"] = sizes;
    const std::string htext = header.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open model file for writing: " + path.string());
    os.write(kMagic, sizeof(kMagic));
    const std::uint64_t hlen = htext.size();
    os.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    os.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    for (const auto* t : tensors) {
        os.write(reinterpret_cast<const char*>(t->data()),
                 static_cast<std::streamsize>(t->size() * sizeof(float)));
    }
    if (!os) throw FormatError("short write: " + path.string());
}

TrainedModel load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw FormatError("cannot open model file: " + path.string());
    const auto file_size = static_cast<std::uint64_t>(is.tellg());
    is.seekg(0);

    char magic[8];
    std::uint64_t hlen = 0;
    if (file_size < sizeof(magic) + sizeof(hlen)) throw FormatError("model file truncated");
    is.read(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw FormatError("not a model file: " + path.string());
    is.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    if (sizeof(magic) + sizeof(hlen) + hlen > file_size)
        throw FormatError("model header truncated");

    std::string htext(hlen, '\0');
    is.read(htext.data(), static_cast<std::streamsize>(hlen));

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(htext);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad model header: " + std::string(e.what()));
    }

    TrainedModel model;
    try {
        model.arch.input_size = header.at("arch").at("input_size").get<std::size_t>();
        model.arch.conv_filters = header.at("arch").at("conv_filters").get<std::vector<std::size_t>>();
        model.arch.num_classes = header.at("arch").at("num_classes").get<std::size_t>();
        model.class_labels = header.at("class_labels").get<std::vector<std::string>>();
        model.provenance = header.at("provenance").get<std::string>();
        model.model_id = header.at("model_id").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad model header: " + std::string(e.what()));
    }
    if (model.class_labels.size() != model.arch.num_classes)
        throw FormatError("model header: class label count does not match architecture");

    try {
        model.net = Network<float>(model.arch);
    } catch (const Error& e) {
        throw FormatError(std::string("model header: ") + e.what());
    }
    const auto tensors = model.net.state_tensors();

    const auto declared = header.at("tensor_sizes").get<std::vector<std::size_t>>();
    if (declared.size() != tensors.size()) throw FormatError("model header: tensor count mismatch");
    std::uint64_t blob = 0;
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        if (declared[i] != tensors[i]->size())
            throw FormatError("model header: tensor shape mismatch");
        blob += declared[i] * sizeof(float);
    }
    if (sizeof(magic) + sizeof(hlen) + hlen + blob != file_size)
        throw FormatError("model blob size mismatch (truncated or padded file)");

    for (auto* t : tensors) {
        is.read(reinterpret_cast<char*>(t->data()),
                static_cast<std::streamsize>(t->size() * sizeof(float)));
    }
    if (!is) throw FormatError("model blob truncated");
    return model;
}

}  // namespace rffi::classifier
