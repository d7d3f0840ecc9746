#include "snapgan/model/serialization.hpp"

#include <fstream>
#include <set>

#include "snapgan/autodiff/checkpoint.hpp"
#include "snapgan/common/errors.hpp"

namespace snapgan::model {
namespace {

using nlohmann::json;

constexpr int kSidecarVersion = 1;

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint) {
  return checkpoint.string() + ".json";
}

}  // namespace

json to_json(const ArchitectureConfig& arch) {
  json j;
  j["gcn_channels"] = arch.gcn_channels;
  j["degpool_k_fraction"] = arch.degpool_k_fraction;
  j["fixed_k"] = arch.fixed_k ? json(*arch.fixed_k) : json(nullptr);
  j["conv1d_channels"] = arch.conv1d_channels;
  j["conv1d_kernel_sizes"] = arch.conv1d_kernel_sizes;
  j["conv1d_stride"] = arch.conv1d_stride;
  j["dense_width"] = arch.dense_width;
  j["dropout_rate"] = arch.dropout_rate;
  return j;
}

ArchitectureConfig architecture_from_json(const json& j) {
  static const std::set<std::string> known{"gcn_channels",        "degpool_k_fraction",
                                           "fixed_k",             "conv1d_channels",
                                           "conv1d_kernel_sizes", "conv1d_stride",
                                           "dense_width",         "dropout_rate"};
  if (!j.is_object()) throw DataError("architecture config must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw DataError("unknown architecture key '" + key + "'");
  }
  ArchitectureConfig arch;
  try {
    if (j.contains("gcn_channels")) arch.gcn_channels = j["gcn_channels"].get<std::vector<std::size_t>>();
    if (j.contains("degpool_k_fraction")) arch.degpool_k_fraction = j["degpool_k_fraction"].get<double>();
    if (j.contains("fixed_k") && !j["fixed_k"].is_null()) arch.fixed_k = j["fixed_k"].get<std::size_t>();
    if (j.contains("conv1d_channels")) arch.conv1d_channels = j["conv1d_channels"].get<std::vector<std::size_t>>();
    if (j.contains("conv1d_kernel_sizes")) {
      arch.conv1d_kernel_sizes = j["conv1d_kernel_sizes"].get<std::vector<std::size_t>>();
    }
    if (j.contains("conv1d_stride")) arch.conv1d_stride = j["conv1d_stride"].get<std::size_t>();
    if (j.contains("dense_width")) arch.dense_width = j["dense_width"].get<std::size_t>();
    if (j.contains("dropout_rate")) arch.dropout_rate = j["dropout_rate"].get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("architecture config: ") + e.what());
  }
  try {
    arch.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return arch;
}

void save_model(const std::filesystem::path& checkpoint, const ModelParams& params) {
  params.validate();
  std::vector<ad::NamedTensor> named;
  const auto names = params.tensor_names();
  const auto tensors = params.tensors();
  for (std::size_t i = 0; i < names.size(); ++i) named.push_back({names[i], *tensors[i]});
  ad::save_tensors(checkpoint, named);

  json sidecar;
  sidecar["format_version"] = kSidecarVersion;
  sidecar["head"] = to_string(params.head);
  sidecar["input_dim"] = params.input_dim;
  sidecar["architecture"] = to_json(params.arch);
  std::ofstream out(sidecar_path(checkpoint), std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + sidecar_path(checkpoint).string());
  out << sidecar.dump(2) << '\n';
}

ModelParams load_model(const std::filesystem::path& checkpoint) {
  std::ifstream in(sidecar_path(checkpoint));
  if (!in) throw DataError("missing model sidecar " + sidecar_path(checkpoint).string());
  json sidecar;
  try {
    sidecar = json::parse(in);
    if (sidecar.at("format_version").get<int>() != kSidecarVersion) {
      throw DataError("unsupported model sidecar version");
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model sidecar: ") + e.what());
  }
  ModelParams params;
  try {
    params = ModelParams::zeros(architecture_from_json(sidecar.at("architecture")),
                                sidecar.at("input_dim").get<std::size_t>(),
                                head_from_string(sidecar.at("head").get<std::string>()));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model sidecar: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }

  const auto stored = ad::load_tensors(checkpoint);
  const auto names = params.tensor_names();
  auto slots = params.tensors();
  if (stored.size() != slots.size()) {
    throw DataError("checkpoint holds " + std::to_string(stored.size()) + " tensors, architecture needs " +
                    std::to_string(slots.size()));
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (stored[i].name != names[i]) {
      throw DataError("checkpoint tensor " + std::to_string(i) + " is '" + stored[i].name +
                      "', expected '" + names[i] + "'");
    }
    if (stored[i].tensor.shape() != slots[i]->shape()) {
      throw DataError("checkpoint tensor '" + names[i] + "' has shape " +
                      ad::shape_string(stored[i].tensor.shape()) + ", expected " +
                      ad::shape_string(slots[i]->shape()));
    }
    *slots[i] = stored[i].tensor;
  }
  return params;
}

}  // namespace snapgan::model
