#include "avtse/rir.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace avtse {

void RoomSpec::validate() const {
  for (double d : dimensions)
    if (d <= 0.0) throw std::invalid_argument("RoomSpec: dimensions must be positive");
  for (double a : absorption)
    if (!(a > 0.0 && a <= 1.0))
      throw std::invalid_argument("RoomSpec: absorption must lie in (0,1]");
  if (speed_of_sound <= 0.0) throw std::invalid_argument("RoomSpec: speed of sound must be positive");
  if (max_reflection_order < 0)
    throw std::invalid_argument("RoomSpec: max_reflection_order must be >= 0");
}

bool RoomSpec::contains(const Vec3& p) const {
  for (int i = 0; i < 3; ++i)
    if (!(p[static_cast<std::size_t>(i)] > 0.0 &&
          p[static_cast<std::size_t>(i)] < dimensions[static_cast<std::size_t>(i)]))
      return false;
  return true;
}

void ArrayGeometry::validate() const {
  if (mic_positions.size() != 6)
    throw std::invalid_argument("ArrayGeometry: the far-field array has exactly 6 microphones");
}

ArrayGeometry circular_array_6(const Vec3& center, double radius) {
  ArrayGeometry g;
  for (int m = 0; m < 6; ++m) {
    const double ang = 2.0 * std::numbers::pi * m / 6.0;
    g.mic_positions.push_back(
        {center[0] + radius * std::cos(ang), center[1] + radius * std::sin(ang), center[2]});
  }
  return g;
}

std::vector<std::vector<double>> simulate_rir(const RoomSpec& room, const Vec3& source,
                                              const ArrayGeometry& mics, int sample_rate) {
  room.validate();
  mics.validate();
  if (!room.contains(source)) throw std::invalid_argument("simulate_rir: source outside room");
  for (const auto& m : mics.mic_positions)
    if (!room.contains(m)) throw std::invalid_argument("simulate_rir: microphone outside room");

  // Reflection coefficients per wall: beta = sqrt(1 - absorption).
  std::array<double, 6> beta;
  for (std::size_t i = 0; i < 6; ++i) beta[i] = std::sqrt(1.0 - room.absorption[i]);

  const int order = room.max_reflection_order;
  const int n_max = order / 2 + 1;

  struct Image {
    Vec3 pos;
    double gain;
  };
  std::vector<Image> images;
  for (int qx = 0; qx <= 1; ++qx)
    for (int nx = -n_max; nx <= n_max; ++nx) {
      const int rx = std::abs(nx - qx) + std::abs(nx);
      if (rx > order) continue;
      for (int qy = 0; qy <= 1; ++qy)
        for (int ny = -n_max; ny <= n_max; ++ny) {
          const int ry = std::abs(ny - qy) + std::abs(ny);
          if (rx + ry > order) continue;
          for (int qz = 0; qz <= 1; ++qz)
            for (int nz = -n_max; nz <= n_max; ++nz) {
              const int rz = std::abs(nz - qz) + std::abs(nz);
              if (rx + ry + rz > order) continue;
              Image img;
              img.pos = {(1 - 2 * qx) * source[0] + 2.0 * nx * room.dimensions[0],
                         (1 - 2 * qy) * source[1] + 2.0 * ny * room.dimensions[1],
                         (1 - 2 * qz) * source[2] + 2.0 * nz * room.dimensions[2]};
              img.gain = std::pow(beta[0], std::abs(nx - qx)) * std::pow(beta[1], std::abs(nx)) *
                         std::pow(beta[2], std::abs(ny - qy)) * std::pow(beta[3], std::abs(ny)) *
                         std::pow(beta[4], std::abs(nz - qz)) * std::pow(beta[5], std::abs(nz));
              images.push_back(img);
            }
        }
    }

  std::vector<std::vector<double>> rirs(mics.mic_positions.size());
  for (std::size_t m = 0; m < mics.mic_positions.size(); ++m) {
    const Vec3& mic = mics.mic_positions[m];
    // First pass for the maximum delay so the RIR buffer is tight.
    std::size_t max_delay = 0;
    std::vector<std::pair<std::size_t, double>> taps;
    taps.reserve(images.size());
    for (const auto& img : images) {
      const double dx = img.pos[0] - mic[0], dy = img.pos[1] - mic[1], dz = img.pos[2] - mic[2];
      const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
      const auto delay = static_cast<std::size_t>(
          std::llround(dist / room.speed_of_sound * sample_rate));
      const double amp = img.gain / (4.0 * std::numbers::pi * std::max(dist, 1e-3));
      taps.emplace_back(delay, amp);
      max_delay = std::max(max_delay, delay);
    }
    rirs[m].assign(max_delay + 1, 0.0);
    for (const auto& [delay, amp] : taps) rirs[m][delay] += amp;
  }
  return rirs;
}

}  // namespace avtse
