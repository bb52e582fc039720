#pragma once

#include <array>
#include <vector>

#include "avtse/waveform.hpp"

namespace avtse {

using Vec3 = std::array<double, 3>;

struct RoomSpec {
  Vec3 dimensions = {5.0, 4.0, 3.0};           // meters
  std::array<double, 6> absorption = {0.4, 0.4, 0.4, 0.4, 0.4, 0.4};  // x0,xL,y0,yL,z0,zL
  double speed_of_sound = 343.0;
  int max_reflection_order = 10;

  void set_uniform_absorption(double a) { absorption.fill(a); }
  void validate() const;
  bool contains(const Vec3& p) const;
};

struct ArrayGeometry {
  std::vector<Vec3> mic_positions;  // the far-field array has 6 microphones

  void validate() const;
};

// Circular 6-mic array of the given radius centered at `center`, in the
// horizontal plane.
ArrayGeometry circular_array_6(const Vec3& center, double radius = 0.1);

// Image-source impulse responses, one per microphone. Fractional arrival
// delays are rounded to the nearest sample; amplitude of each image is
// prod(reflection coefficients) / (4 pi distance).
std::vector<std::vector<double>> simulate_rir(const RoomSpec& room, const Vec3& source,
                                              const ArrayGeometry& mics,
                                              int sample_rate = kSampleRate);

}  // namespace avtse
