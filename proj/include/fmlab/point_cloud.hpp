// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "fmlab/core/numeric.hpp"

namespace fmlab {

/// Finite sample set in R^d, stored row-major.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dim, Vec data);
  static PointCloud with_size(std::size_t dim, std::size_t count);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ ? data_.size() / dim_ : 0; }
  bool empty() const noexcept { return data_.empty(); }
  std::span<const double> point(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> point(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  const Vec& data() const noexcept { return data_; }

  /// Throws InputError if empty or any coordinate is non-finite.
  void validate() const;
  Vec mean() const;

 private:
  std::size_t dim_ = 0;
  Vec data_;
};

/// Header row x0..x{d-1}, one point per row, 17 significant digits.
std::string point_cloud_csv(const PointCloud& cloud);
void write_point_cloud_csv(const std::filesystem::path& file, const PointCloud& cloud);

}  // namespace fmlab
