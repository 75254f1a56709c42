#pragma once

#include <filesystem>
#include <iosfwd>

#include "ftkn/nn/parameter.hpp"

namespace ftkn::nn {

// Little-endian layout:
//   "FTKN" | version u32 | param count u32
//   per param: name length u32 | name bytes | rank u32 | dims u64 x rank | f64 x prod(dims)

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const ParameterStore& store);
void save_checkpoint(const std::filesystem::path& path, const ParameterStore& store);

/// Loads values into an existing store. Every stored name must exist with the same
/// shape; throws FormatError otherwise.
void read_checkpoint(std::istream& in, ParameterStore& store);
void load_checkpoint(const std::filesystem::path& path, ParameterStore& store);

}  // namespace ftkn::nn
