#pragma once

#include <Eigen/Dense>
#include <vector>

#include "avtse/activity.hpp"
#include "avtse/masks.hpp"
#include "avtse/stft.hpp"

namespace avtse {

// Complex angular central Gaussian mixture fitted per frequency with EM.
// The activity pattern constrains which classes may claim each frame.
struct CacgmmState {
  std::vector<std::vector<double>> class_weights;              // [freq][class]
  std::vector<std::vector<Eigen::MatrixXcd>> shape_matrices;   // [freq][class], trace-normalized
  std::vector<double> log_likelihood_trace;                    // one entry per EM iteration
};

struct CacgmmResult {
  std::vector<Mask> masks;  // per class, speakers first then the noise class
  CacgmmState state;
};

// Regularization added to shape matrices before inversion, as a fraction of
// trace/channels.
inline constexpr double kCacgmmShapeReg = 1e-6;

// E/M iterations with posteriors zeroed for classes inactive in a frame and
// renormalized over the allowed set. Posteriors start uniform over the
// allowed classes (no random initialization); the returned masks are the
// posteriors after the final M-step.
CacgmmResult cacgmm_em(const ComplexSpectrogram& observations, const ActivityPattern& activities,
                       int iterations = 20);

}  // namespace avtse
