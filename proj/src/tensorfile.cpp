#include "avtse/tensorfile.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace avtse {

namespace {
constexpr char kMagic[4] = {'A', 'V', 'T', 'F'};

template <typename T>
void put(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw std::runtime_error("tensor: truncated file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(buf[i]) << (8 * i));
  return v;
}
}  // namespace

void save_tensor(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("tensor: cannot create " + path);
  out.write(kMagic, 4);
  put<std::uint32_t>(out, 1);  // version
  put<std::uint32_t>(out, 0);  // float64
  put<std::uint32_t>(out, 2);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::uint64_t u;
      double v = m(r, c);
      std::memcpy(&u, &v, 8);
      put<std::uint64_t>(out, u);
    }
  if (!out) throw std::runtime_error("tensor: write failed: " + path);
}

Eigen::MatrixXd load_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("tensor: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("tensor: bad magic in " + path);
  if (get<std::uint32_t>(in) != 1) throw std::runtime_error("tensor: unsupported version");
  const auto dtype = get<std::uint32_t>(in);
  if (dtype != 0) throw std::runtime_error("tensor: only float64 supported by this loader");
  if (get<std::uint32_t>(in) != 2) throw std::runtime_error("tensor: expected a 2-D tensor");
  const auto rows = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  const auto cols = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::uint64_t u = get<std::uint64_t>(in);
      double v;
      std::memcpy(&v, &u, 8);
      m(r, c) = v;
    }
  return m;
}

}  // namespace avtse
