#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

namespace isophasal {

// Dense row-major tensor with runtime extents. Small (n <= ~20 per axis) and
// allocated once per evaluation, so no expression templates.
template <std::size_t Rank>
class DenseTensor {
 public:
  DenseTensor() { extents_.fill(0); }

  explicit DenseTensor(const std::array<int, Rank>& extents)
      : extents_(extents) {
    std::size_t total = 1;
    for (std::size_t a = Rank; a-- > 0;) {
      strides_[a] = total;
      total *= static_cast<std::size_t>(extents_[a]);
    }
    data_.assign(total, 0.0);
  }

  template <typename... Idx>
  double& operator()(Idx... idx) {
    static_assert(sizeof...(Idx) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }

  template <typename... Idx>
  double operator()(Idx... idx) const {
    static_assert(sizeof...(Idx) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }

  int extent(std::size_t axis) const { return extents_[axis]; }
  std::size_t size() const { return data_.size(); }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  std::size_t offset(const std::array<int, Rank>& idx) const {
    std::size_t off = 0;
    for (std::size_t a = 0; a < Rank; ++a) {
      assert(idx[a] >= 0 && idx[a] < extents_[a]);
      off += strides_[a] * static_cast<std::size_t>(idx[a]);
    }
    return off;
  }

  std::array<int, Rank> extents_{};
  std::array<std::size_t, Rank> strides_{};
  std::vector<double> data_;
};

using Tensor3 = DenseTensor<3>;
using Tensor4 = DenseTensor<4>;

}  // namespace isophasal
