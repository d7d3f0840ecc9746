#pragma once

#include <filesystem>

#include <json.hpp>

#include "snapgan/model/architecture.hpp"

namespace snapgan::model {

nlohmann::json to_json(const ArchitectureConfig& arch);
// Missing keys keep their defaults; unknown keys are rejected.
ArchitectureConfig architecture_from_json(const nlohmann::json& j);

// Writes the tensor container to `checkpoint` and a sidecar record
// `<checkpoint>.json` holding head kind, input dimension and architecture.
void save_model(const std::filesystem::path& checkpoint, const ModelParams& params);

// Reads both files and verifies that tensor names and shapes follow the
// recorded architecture. Throws snapgan::DataError otherwise.
ModelParams load_model(const std::filesystem::path& checkpoint);

}  // namespace snapgan::model
