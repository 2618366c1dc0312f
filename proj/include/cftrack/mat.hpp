#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cftrack {

/// Dense row-major real matrix. Shared carrier for regression labels,
/// cosine windows, posterior maps and correlation responses.
struct Mat2d {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat2d() = default;
  Mat2d(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {
    if (r < 0 || c < 0) throw std::invalid_argument("negative matrix shape");
  }

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return data.size(); }
  bool same_shape(const Mat2d& o) const { return rows == o.rows && cols == o.cols; }
};

using LabelMap = Mat2d;
using PosteriorMap = Mat2d;

}  // namespace cftrack
