#include "hism/nn/serialize.hpp"

#include <cstring>

#include "hism/error.hpp"
#include "hism/io.hpp"

namespace hism::nn {

namespace {

template <class U>
void put(std::string& out, U v) {
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.append(reinterpret_cast<const char*>(buf), sizeof(U));
}

struct Reader {
  const std::string& s;
  std::size_t pos = 0;

  void need(std::size_t n) {
    if (pos + n > s.size()) throw Error(ErrorCode::bad_magic, "weights file truncated");
  }
  template <class U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
    pos += sizeof(U);
    return v;
  }
};

}  // namespace

std::string encode_weights(const ParameterStore<float>& params) {
  std::string out = "HISM";
  put<std::uint32_t>(out, kWeightsVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.tensor_count()));
  for (const auto& e : params.entries()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out += e.name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.value.shape.size()));
    for (const auto d : e.value.shape) put<std::uint64_t>(out, d);
    for (const float v : e.value.data) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put<std::uint32_t>(out, bits);
    }
  }
  return out;
}

ParameterStore<float> decode_weights(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "HISM") != 0)
    throw Error(ErrorCode::bad_magic, "not a weights file");
  Reader r{bytes, 4};
  const auto version = r.get<std::uint32_t>();
  if (version != kWeightsVersion)
    throw Error(ErrorCode::version_mismatch, "weights version " + std::to_string(version) +
                                                 ", expected " + std::to_string(kWeightsVersion));
  const auto count = r.get<std::uint32_t>();
  ParameterStore<float> store;
  for (std::uint32_t t = 0; t < count; ++t) {
    const auto len = r.get<std::uint32_t>();
    r.need(len);
    std::string name = bytes.substr(r.pos, len);
    r.pos += len;
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) throw Error(ErrorCode::bad_magic, "implausible rank in weights file");
    Shape shape;
    for (std::uint32_t k = 0; k < rank; ++k) shape.push_back(r.get<std::uint64_t>());
    const std::size_t n = shape_size(shape);
    r.need(n * 4);
    const std::size_t idx = store.add(name, shape);
    auto& data = store.value(idx).data;
    for (std::size_t k = 0; k < n; ++k) {
      const auto bits = r.get<std::uint32_t>();
      std::memcpy(&data[k], &bits, 4);
    }
  }
  if (r.pos != bytes.size()) throw Error(ErrorCode::bad_magic, "trailing bytes in weights file");
  return store;
}

void save_weights(const ParameterStore<float>& params, const std::filesystem::path& path) {
  write_file_atomic(path, encode_weights(params));
}

ParameterStore<float> load_weights(const std::filesystem::path& path) { return decode_weights(read_file(path)); }

void assign_weights(ParameterStore<float>& target, const ParameterStore<float>& loaded) {
  if (target.tensor_count() != loaded.tensor_count())
    throw Error(ErrorCode::shape_mismatch,
                "weights hold " + std::to_string(loaded.tensor_count()) + " tensors, model has " +
                    std::to_string(target.tensor_count()));
  for (std::size_t i = 0; i < target.tensor_count(); ++i) {
    const auto& want = target.entries()[i];
    if (!loaded.contains(want.name))
      throw Error(ErrorCode::shape_mismatch, "weights lack tensor " + want.name);
    const auto& got = loaded.value(want.name);
    if (got.shape != want.value.shape)
      throw Error(ErrorCode::shape_mismatch, "tensor " + want.name + " has shape " +
                                                 shape_string(got.shape) + ", model expects " +
                                                 shape_string(want.value.shape));
    target.value(i).data = got.data;
  }
}

}  // namespace hism::nn
