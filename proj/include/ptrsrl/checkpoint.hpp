#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptrsrl/tensor.hpp"

namespace ptrsrl::nn {

// Binary layout (all integers little-endian):
//   "PTRSRLCK"            8-byte magic
//   u32 version           currently 1
//   u64 metadata length, then that many bytes of UTF-8 text
//   u32 tensor count
//   per tensor: u32 name length, name bytes, u32 rank, u32 dims[rank],
//               product(dims) IEEE-754 binary64 values, little-endian
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct Checkpoint {
  std::string metadata;
  std::vector<NamedTensor> tensors;
};

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::string& path);

Checkpoint snapshot(const ParameterStore& store, std::string metadata);
/// Copies tensor values into the store. Every store parameter must be present
/// with the same shape (DimensionError otherwise); extra tensors are an error.
void restore(ParameterStore& store, const Checkpoint& checkpoint);

}  // namespace ptrsrl::nn
