#include "ftkn/nn/checkpoint.hpp"

#include <fstream>
#include <unordered_map>

#include "ftkn/binary_io.hpp"
#include "ftkn/errors.hpp"

namespace ftkn::nn {

namespace {
constexpr char kMagic[4] = {'F', 'T', 'K', 'N'};
}

void write_checkpoint(std::ostream& out, const ParameterStore& store) {
  out.write(kMagic, 4);
  binary::put<std::uint32_t>(out, kCheckpointVersion);
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(store.parameters().size()));
  for (const auto& p : store.parameters()) {
    binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    const auto& shape = p.tensor.shape();
    binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) binary::put<std::uint64_t>(out, d);
    for (double v : p.tensor.data()) binary::put<double>(out, v);
  }
}

void save_checkpoint(const std::filesystem::path& path, const ParameterStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open checkpoint for writing: " + path.string());
  write_checkpoint(out, store);
}

void read_checkpoint(std::istream& in, ParameterStore& store) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != std::string(kMagic, 4)) throw FormatError("bad checkpoint magic");
  auto version = binary::get<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
  auto count = binary::get<std::uint32_t>(in);

  std::unordered_map<std::string, Parameter*> by_name;
  for (auto& p : store.parameters()) by_name[p.name] = &p;

  for (std::uint32_t i = 0; i < count; ++i) {
    auto len = binary::get<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    if (!in) throw FormatError("truncated parameter name");
    auto rank = binary::get<std::uint32_t>(in);
    Shape shape(rank);
    for (auto& d : shape) d = binary::get<std::uint64_t>(in);
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("checkpoint parameter not in model: " + name);
    if (it->second->tensor.shape() != shape)
      throw FormatError("shape mismatch for " + name + ": file " + shape_string(shape) + " vs model " +
                        shape_string(it->second->tensor.shape()));
    auto values = it->second->tensor.mutable_data();
    for (auto& v : values) v = binary::get<double>(in);
  }
}

void load_checkpoint(const std::filesystem::path& path, ParameterStore& store) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path.string());
  read_checkpoint(in, store);
}

}  // namespace ftkn::nn
