#include "avtse/wavio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace avtse {

namespace {

template <typename T>
T read_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw std::runtime_error("wav: truncated file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(buf[i]) << (8 * i));
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("wav: cannot open " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0) throw std::runtime_error("wav: not RIFF: " + path);
  read_le<std::uint32_t>(in);  // chunk size
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0) throw std::runtime_error("wav: not WAVE: " + path);

  std::uint16_t fmt_code = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<char> data;
  bool have_fmt = false, have_data = false;
  while (in.read(tag, 4)) {
    const std::uint32_t sz = read_le<std::uint32_t>(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      fmt_code = read_le<std::uint16_t>(in);
      channels = read_le<std::uint16_t>(in);
      rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits = read_le<std::uint16_t>(in);
      if (sz > 16) in.seekg(sz - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(sz);
      in.read(data.data(), sz);
      if (!in) throw std::runtime_error("wav: truncated data chunk: " + path);
      have_data = true;
    } else {
      in.seekg(sz + (sz & 1), std::ios::cur);
    }
  }
  if (!have_fmt || !have_data) throw std::runtime_error("wav: missing fmt or data chunk: " + path);
  if (channels == 0) throw std::runtime_error("wav: zero channels: " + path);

  const bool pcm16 = fmt_code == 1 && bits == 16;
  const bool f32 = fmt_code == 3 && bits == 32;
  if (!pcm16 && !f32)
    throw std::runtime_error("wav: unsupported format (only PCM16 and float32): " + path);

  const std::size_t bytes_per = bits / 8;
  const std::size_t n_samples = data.size() / (bytes_per * channels);
  Waveform wave(channels, n_samples, static_cast<int>(rate));
  const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data());
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* s = p + (i * channels + c) * bytes_per;
      if (pcm16) {
        const auto v = static_cast<std::int16_t>(s[0] | (s[1] << 8));
        wave.channel(c)[i] = static_cast<double>(v) / 32768.0;
      } else {
        std::uint32_t u = static_cast<std::uint32_t>(s[0]) | (static_cast<std::uint32_t>(s[1]) << 8) |
                          (static_cast<std::uint32_t>(s[2]) << 16) |
                          (static_cast<std::uint32_t>(s[3]) << 24);
        float f;
        std::memcpy(&f, &u, 4);
        wave.channel(c)[i] = static_cast<double>(f);
      }
    }
  }
  return wave;
}

void write_wav(const std::string& path, const Waveform& wave, WavFormat format) {
  wave.validate();
  if (wave.channels() == 0) throw std::invalid_argument("wav: nothing to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("wav: cannot create " + path);

  const auto channels = static_cast<std::uint16_t>(wave.channels());
  const std::uint16_t bits = format == WavFormat::Pcm16 ? 16 : 32;
  const std::uint16_t fmt_code = format == WavFormat::Pcm16 ? 1 : 3;
  const auto n_samples = static_cast<std::uint32_t>(wave.length());
  const std::uint32_t data_size = n_samples * channels * (bits / 8);

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, fmt_code);
  write_le<std::uint16_t>(out, channels);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(wave.sample_rate));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(wave.sample_rate) * channels * (bits / 8));
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels * (bits / 8)));
  write_le<std::uint16_t>(out, bits);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);

  for (std::uint32_t i = 0; i < n_samples; ++i) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      const double v = wave.channel(c)[i];
      if (format == WavFormat::Pcm16) {
        const double clipped = std::clamp(v, -1.0, 32767.0 / 32768.0);
        write_le<std::int16_t>(out, static_cast<std::int16_t>(std::lrint(clipped * 32768.0)));
      } else {
        const float f = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        write_le<std::uint32_t>(out, u);
      }
    }
  }
  if (!out) throw std::runtime_error("wav: write failed: " + path);
}

}  // namespace avtse
