#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hism/nn/params.hpp"

namespace hism::nn {

inline constexpr std::uint32_t kWeightsVersion = 1;

/// Weights file: "HISM", u32 version, u32 tensor count, then per tensor
/// u32 name length, name bytes, u32 rank, u64 dims, f32 values. Little endian.
std::string encode_weights(const ParameterStore<float>& params);
ParameterStore<float> decode_weights(const std::string& bytes);

void save_weights(const ParameterStore<float>& params, const std::filesystem::path& path);
ParameterStore<float> load_weights(const std::filesystem::path& path);

/// Copies values from `loaded` into `target`, requiring identical names and shapes.
void assign_weights(ParameterStore<float>& target, const ParameterStore<float>& loaded);

}  // namespace hism::nn
