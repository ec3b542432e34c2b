#include "goalgen/tensor_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace goalgen {

namespace {

constexpr char kMagic[4] = {'G', 'G', 'T', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("tensor file truncated");
  return v;
}

}  // namespace

void TensorFile::put(const std::string& name, const Vec& v) {
  tensors[name] = {{v.size()}, v};
}

void TensorFile::put(const std::string& name, const Mat& m) {
  tensors[name] = {{m.rows, m.cols}, m.data};
}

const Vec& TensorFile::vec(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::runtime_error("missing tensor: " + name);
  return it->second.second;
}

Mat TensorFile::mat(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::runtime_error("missing tensor: " + name);
  const auto& dims = it->second.first;
  if (dims.size() != 2) throw std::runtime_error("tensor is not 2-d: " + name);
  Mat m(dims[0], dims[1]);
  m.data = it->second.second;
  return m;
}

void save_tensors(const TensorFile& tf, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out.write(kMagic, 4);
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, std::uint32_t(tf.tensors.size()));
  for (const auto& [name, entry] : tf.tensors) {
    write_pod<std::uint32_t>(out, std::uint32_t(name.size()));
    out.write(name.data(), std::streamsize(name.size()));
    write_pod<std::uint32_t>(out, std::uint32_t(entry.first.size()));
    for (auto d : entry.first) write_pod<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(entry.second.data()),
              std::streamsize(entry.second.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TensorFile load_tensors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a tensor file: " + path);
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) {
    throw std::runtime_error("unsupported tensor file version");
  }
  const auto count = read_pod<std::uint32_t>(in);
  TensorFile tf;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto ndim = read_pod<std::uint32_t>(in);
    std::vector<std::uint64_t> dims(ndim);
    std::uint64_t total = 1;
    for (auto& d : dims) {
      d = read_pod<std::uint64_t>(in);
      total *= d;
    }
    Vec data(total);
    in.read(reinterpret_cast<char*>(data.data()),
            std::streamsize(total * sizeof(double)));
    if (!in) throw std::runtime_error("tensor file truncated: " + path);
    tf.tensors[name] = {std::move(dims), std::move(data)};
  }
  return tf;
}

void put_mlp(TensorFile& tf, const std::string& prefix, const Mlp& net) {
  Vec acts;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    tf.put(prefix + "/layer" + std::to_string(i) + "/w", l.w);
    tf.put(prefix + "/layer" + std::to_string(i) + "/b", l.b);
    acts.push_back(double(int(l.act)));
  }
  tf.put(prefix + "/acts", acts);
}

Mlp get_mlp(const TensorFile& tf, const std::string& prefix) {
  const Vec& acts = tf.vec(prefix + "/acts");
  Mlp net;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    Layer l;
    l.w = tf.mat(prefix + "/layer" + std::to_string(i) + "/w");
    l.b = tf.vec(prefix + "/layer" + std::to_string(i) + "/b");
    l.act = Act(int(acts[i]));
    net.layers.push_back(std::move(l));
  }
  return net;
}

}  // namespace goalgen
