#pragma once

#include <map>
#include <string>
#include <vector>

#include "goalgen/mlp.hpp"
#include "goalgen/tensor.hpp"

namespace goalgen {

// Flat named-tensor container used for checkpoints. On disk:
//   magic "GGTF", u32 version, u32 tensor count, then per tensor:
//   u32 name length, name bytes, u32 ndim, u64 dims[ndim], f64 data[],
// all little-endian. Round-trips are bit-exact.
struct TensorFile {
  std::map<std::string, std::pair<std::vector<std::uint64_t>, Vec>> tensors;

  void put(const std::string& name, const Vec& v);
  void put(const std::string& name, const Mat& m);
  const Vec& vec(const std::string& name) const;
  Mat mat(const std::string& name) const;
  bool has(const std::string& name) const { return tensors.count(name) > 0; }
};

void save_tensors(const TensorFile& tf, const std::string& path);
TensorFile load_tensors(const std::string& path);

// Stores layers as <prefix>/layer<i>/{w,b} plus <prefix>/acts (activation
// tags as doubles, one per layer).
void put_mlp(TensorFile& tf, const std::string& prefix, const Mlp& net);
Mlp get_mlp(const TensorFile& tf, const std::string& prefix);

}  // namespace goalgen
