#include "crl/checkpoint.hpp"

#include <bit>
#include <cstring>

#include <fmt/format.h>

#include "crl/common.hpp"
#include "crl/csv.hpp"

namespace crl {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'R', 'L', 'C', 'K', 'P', 'T', '\0'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_matrix_values(std::string& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put<double>(out, m(i, j));
}

class Reader {
 public:
  explicit Reader(std::string_view b) : b_(b) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = get<double>();
    return m;
  }
  bool at_end() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw Error(fmt::format("checkpoint: truncated at byte {}", pos_));
  }
  std::string_view b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  const auto& t = c.params.tensors;
  if (c.optimizer.m.size() != t.size() || c.optimizer.v.size() != t.size())
    throw Error("checkpoint: optimizer state does not match parameters");
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, c.metadata.size());
  out += c.metadata;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.size()));
  for (const auto& m : t) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
    put_matrix_values(out, m);
  }
  put<std::int64_t>(out, c.optimizer.step);
  put<double>(out, c.optimizer.lr);
  put<double>(out, c.optimizer.eps);
  put<double>(out, c.optimizer.beta1);
  put<double>(out, c.optimizer.beta2);
  for (const auto& m : c.optimizer.m) put_matrix_values(out, m);
  for (const auto& v : c.optimizer.v) put_matrix_values(out, v);
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.bytes(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) throw Error("checkpoint: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw Error(fmt::format("checkpoint: unsupported version {}", version));
  Checkpoint c;
  c.metadata = std::string(r.bytes(r.get<std::uint64_t>()));
  const auto count = r.get<std::uint32_t>();
  if (count > 1024) throw Error("checkpoint: implausible tensor count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto rows = r.get<std::uint32_t>();
    const auto cols = r.get<std::uint32_t>();
    c.params.tensors.push_back(r.matrix(rows, cols));
  }
  auto& o = c.optimizer;
  o.step = r.get<std::int64_t>();
  o.lr = r.get<double>();
  o.eps = r.get<double>();
  o.beta1 = r.get<double>();
  o.beta2 = r.get<double>();
  for (const auto& t : c.params.tensors) o.m.push_back(r.matrix(t.rows(), t.cols()));
  for (const auto& t : c.params.tensors) o.v.push_back(r.matrix(t.rows(), t.cols()));
  if (!r.at_end()) throw Error("checkpoint: trailing bytes");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  csv::write_file(path, serialize_checkpoint(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(csv::read_file(path)); }

}  // namespace crl
