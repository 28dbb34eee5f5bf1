#include "ptrsrl/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "ptrsrl/error.hpp"

namespace ptrsrl::nn {

namespace {

constexpr char kMagic[8] = {'P', 'T', 'R', 'S', 'R', 'L', 'C', 'K'};

template <class T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw Error("truncated checkpoint " + path);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string get_string(std::istream& in, std::size_t length, const std::string& path) {
  std::string s(length, '\0');
  if (length && !in.read(s.data(), static_cast<std::streamsize>(length)))
    throw Error("truncated checkpoint " + path);
  return s;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path);
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, checkpoint.metadata.size());
  out.write(checkpoint.metadata.data(), static_cast<std::streamsize>(checkpoint.metadata.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(checkpoint.tensors.size()));
  for (const NamedTensor& t : checkpoint.tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put<std::uint32_t>(out, 2);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.tensor.dims.rows));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.tensor.dims.cols));
    for (double v : t.tensor.values) put<double>(out, v);
  }
  if (!out) throw Error("write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw Error(path + " is not a checkpoint");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion)
    throw Error(path + ": unsupported checkpoint version " + std::to_string(version));
  Checkpoint cp;
  cp.metadata = get_string(in, get<std::uint64_t>(in, path), path);
  const auto count = get<std::uint32_t>(in, path);
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedTensor t;
    t.name = get_string(in, get<std::uint32_t>(in, path), path);
    const auto rank = get<std::uint32_t>(in, path);
    if (rank < 1 || rank > 2) throw Error(path + ": tensor '" + t.name + "' has rank " +
                                          std::to_string(rank));
    Dims d;
    d.rows = static_cast<int>(get<std::uint32_t>(in, path));
    d.cols = rank == 2 ? static_cast<int>(get<std::uint32_t>(in, path)) : 1;
    t.tensor = Tensor(d);
    for (double& v : t.tensor.values) v = get<double>(in, path);
    cp.tensors.push_back(std::move(t));
  }
  return cp;
}

Checkpoint snapshot(const ParameterStore& store, std::string metadata) {
  Checkpoint cp;
  cp.metadata = std::move(metadata);
  for (const auto& p : store.all()) cp.tensors.push_back({p->name, p->value});
  return cp;
}

void restore(ParameterStore& store, const Checkpoint& checkpoint) {
  std::map<std::string, const Tensor*> by_name;
  for (const NamedTensor& t : checkpoint.tensors) by_name[t.name] = &t.tensor;
  for (const auto& p : store.all()) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) throw DimensionError("restore", "checkpoint lacks '" + p->name + "'");
    if (!(it->second->dims == p->dims()))
      throw DimensionError("restore", "'" + p->name + "' is " + to_string(it->second->dims) +
                                          " in the checkpoint, model expects " +
                                          to_string(p->dims()));
    p->value = *it->second;
  }
  if (by_name.size() != store.all().size())
    throw DimensionError("restore", "checkpoint has " + std::to_string(by_name.size()) +
                                        " tensors, model has " +
                                        std::to_string(store.all().size()));
}

}  // namespace ptrsrl::nn
