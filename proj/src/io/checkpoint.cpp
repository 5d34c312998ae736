// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <bit>
#include <cstring>
#include <fstream>

#include "moher/io.hpp"

namespace moher::io {

namespace {

constexpr char kMagic[5] = {'M', 'O', 'H', 'R', '1'};

class Writer {
 public:
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  template <typename T>
  void le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void expect(const char* p, std::size_t n) {
    need(n);
    if (std::memcmp(b_.data() + pos_, p, n) != 0) throw DataError("checkpoint: bad magic bytes");
    pos_ += n;
  }
  bool done() const { return pos_ == b_.size(); }
  std::uint64_t count(std::uint64_t unit) {
    const std::uint64_t n = u64();
    if (unit > 0 && n > (b_.size() - pos_) / unit) throw DataError("checkpoint: truncated or corrupt count");
    return n;
  }

 private:
  void need(std::uint64_t n) const {
    if (n > b_.size() - pos_) throw DataError("checkpoint: truncated file");
  }
  template <typename T>
  T le() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(c.version);
  w.str(c.config_echo);
  w.u64(c.modes.size());
  for (const auto& m : c.modes) w.str(m);
  w.u64(c.relations.size());
  for (const auto& r : c.relations) w.str(r);
  w.u64(c.normalizer.dim());
  for (double v : c.normalizer.mean()) w.f64(v);
  for (double v : c.normalizer.stddev()) w.f64(v);
  w.u64(c.neighbor_budget);
  w.u64(c.params.size());
  for (const auto& [name, p] : c.params) {
    w.str(name);
    w.u64(p.value.rank());
    for (std::size_t d : p.value.shape()) w.u64(d);
    for (double v : p.value.values()) w.f64(v);
  }
  return w.take();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.expect(kMagic, sizeof kMagic);
  Checkpoint c;
  c.version = r.u32();
  if (c.version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported format version " + std::to_string(c.version));
  }
  c.config_echo = r.str();
  for (std::uint64_t n = r.count(8), i = 0; i < n; ++i) c.modes.push_back(r.str());
  for (std::uint64_t n = r.count(8), i = 0; i < n; ++i) c.relations.push_back(r.str());
  const std::uint64_t dim = r.count(16);
  std::vector<double> mean(dim), stddev(dim);
  for (auto& v : mean) v = r.f64();
  for (auto& v : stddev) v = r.f64();
  if (dim > 0) c.normalizer = Normalizer(std::move(mean), std::move(stddev));
  c.neighbor_budget = r.u64();
  for (std::uint64_t n = r.count(8), i = 0; i < n; ++i) {
    const std::string name = r.str();
    const std::uint64_t rank = r.count(8);
    std::vector<std::size_t> shape(rank);
    std::uint64_t size = 1;
    for (auto& d : shape) {
      d = r.u64();
      size *= d;
    }
    std::vector<double> data(size);
    for (auto& v : data) v = r.f64();
    c.params.add(name, ad::Tensor(std::move(shape), std::move(data)));
  }
  if (!r.done()) throw DataError("checkpoint: trailing bytes");
  return c;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(checkpoint);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return decode_checkpoint(std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<std::string> relation_names(const std::vector<Mode>& modes) {
  std::vector<std::string> out;
  for (const RelationType& r : enumerate_relation_types(modes.size())) out.push_back(to_string(r, modes));
  return out;
}

void check_relations(const Checkpoint& checkpoint, const std::vector<std::string>& expected) {
  if (checkpoint.relations != expected) {
    std::string got, want;
    for (const auto& s : checkpoint.relations) got += (got.empty() ? "" : ", ") + s;
    for (const auto& s : expected) want += (want.empty() ? "" : ", ") + s;
    throw DataError("checkpoint relation types [" + got + "] do not match the dataset [" + want + "]");
  }
}

}  // namespace moher::io
