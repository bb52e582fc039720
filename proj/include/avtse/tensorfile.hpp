#pragma once

#include <Eigen/Dense>
#include <string>

namespace avtse {

// Minimal binary tensor container for cross-tool inspection.
// Layout (little-endian): magic "AVTF", u32 version (1), u32 dtype
// (0 = float64, 1 = float32), u32 ndim, u64 dims[ndim], raw row-major data.
void save_tensor(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_tensor(const std::string& path);

}  // namespace avtse
