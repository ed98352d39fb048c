#ifndef RFFI_CLASSIFIER_MODEL_IO_HPP
#define RFFI_CLASSIFIER_MODEL_IO_HPP

#include <filesystem>

#include "rffi/classifier/network.hpp"

namespace rffi::classifier {

// Single-file model format: 8-byte magic, little-endian u64 JSON header
// length, the header (architecture, class labels, provenance, tensor
// sizes), then all state tensors as one little-endian float32 blob.
void save(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load(const std::filesystem::path& path);

}  // namespace rffi::classifier

#endif
