// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/point_cloud.hpp"

#include <cstdio>
#include <sstream>

#include "fmlab/core/error.hpp"
#include "fmlab/core/file_io.hpp"

namespace fmlab {

PointCloud::PointCloud(std::size_t dim, Vec data) : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) throw InputError("PointCloud: dimension must be positive");
  if (data_.size() % dim_ != 0) throw InputError("PointCloud: data length is not a multiple of dim");
}

PointCloud PointCloud::with_size(std::size_t dim, std::size_t count) { return PointCloud(dim, Vec(dim * count, 0.0)); }

void PointCloud::validate() const {
  if (empty()) throw InputError("PointCloud: empty cloud");
  if (!all_finite(data_)) throw InputError("PointCloud: non-finite coordinate");
}

Vec PointCloud::mean() const {
  Vec m(dim_, 0.0), column(size());
  for (std::size_t k = 0; k < dim_; ++k) {
    for (std::size_t i = 0; i < size(); ++i) column[i] = data_[i * dim_ + k];
    m[k] = pairwise_sum(column) / static_cast<double>(size());
  }
  return m;
}

std::string point_cloud_csv(const PointCloud& cloud) {
  std::ostringstream out;
  for (std::size_t k = 0; k < cloud.dim(); ++k) out << (k ? ",x" : "x") << k;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", p[k]);
      out << (k ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

void write_point_cloud_csv(const std::filesystem::path& file, const PointCloud& cloud) {
  write_file_text(file, point_cloud_csv(cloud));
}

}  // namespace fmlab
