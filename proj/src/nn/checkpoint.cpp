#include "sglab/nn/checkpoint.hpp"

#include "sglab/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sglab::nn {

namespace {

constexpr std::array<char, 6> kMagic{'S', 'G', 'L', 'A', 'B', '1'};
constexpr std::uint8_t kFloat64 = 1;

template <class T>
void put_le(std::ostream& out, T v) {
  std::array<unsigned char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("checkpoint truncated");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double v) { put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void save_checkpoint(const ScoreNet& net, std::ostream& out) {
  const NetShape& s = net.shape();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.data_dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.time_embed));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.vocab));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.hidden.size()));
  for (int h : s.hidden) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(h));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.parameters().size()));
  for (const Mat& p : net.parameters()) {
    put_le<std::uint8_t>(out, kFloat64);
    put_le<std::uint8_t>(out, 2);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(p.rows()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(p.cols()));
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) put_f64(out, p(r, c));
    }
  }
}

void save_checkpoint(const ScoreNet& net, const std::string& path) {
  std::ofstream out = open_output(path);
  save_checkpoint(net, out);
  out.flush();
  check_stream(out, path);
}

ScoreNet load_checkpoint(std::istream& in) {
  std::array<char, 6> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("not an SGLAB1 checkpoint");
  NetShape s;
  s.data_dim = static_cast<int>(get_le<std::uint32_t>(in));
  s.time_embed = static_cast<int>(get_le<std::uint32_t>(in));
  s.vocab = static_cast<int>(get_le<std::uint32_t>(in));
  const auto hidden = get_le<std::uint32_t>(in);
  if (hidden > 64) throw std::runtime_error("checkpoint declares an implausible layer count");
  s.hidden.clear();
  for (std::uint32_t i = 0; i < hidden; ++i) s.hidden.push_back(static_cast<int>(get_le<std::uint32_t>(in)));
  ScoreNet net(s);
  const auto count = get_le<std::uint32_t>(in);
  if (count != net.parameters().size()) throw std::runtime_error("checkpoint array count does not match its shape");
  for (Mat& p : net.parameters()) {
    if (get_le<std::uint8_t>(in) != kFloat64) throw std::runtime_error("checkpoint array has an unsupported dtype");
    if (get_le<std::uint8_t>(in) != 2) throw std::runtime_error("checkpoint array has an unsupported rank");
    const auto rows = get_le<std::uint64_t>(in);
    const auto cols = get_le<std::uint64_t>(in);
    if (rows != static_cast<std::uint64_t>(p.rows()) || cols != static_cast<std::uint64_t>(p.cols())) {
      throw std::runtime_error("checkpoint array shape does not match the network");
    }
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) p(r, c) = get_f64(in);
    }
  }
  return net;
}

ScoreNet load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace sglab::nn
