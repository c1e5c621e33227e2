// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <iomanip>

#include "fmlab/core/binary_io.hpp"
#include "fmlab/core/error.hpp"
#include "fmlab/core/file_io.hpp"
#include "fmlab/path.hpp"

namespace fmlab {
namespace {

constexpr std::string_view kMagic{"FMLDATA\0", 8};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_dataset(const std::filesystem::path& file, const Dataset& data) {
  const auto& h = data.header;
  if (h.count != data.samples.size()) throw InputError("write_dataset: header count mismatch");
  binary::Writer w;
  w.bytes(kMagic);
  w.u32(kVersion);
  w.u32(h.dim);
  w.u64(h.count);
  w.f64(h.t_min);
  w.u64(h.seed);
  w.u32(static_cast<std::uint32_t>(h.descriptor.size()));
  w.bytes(h.descriptor);
  for (const auto& s : data.samples) {
    if (s.z.size() != h.dim || s.x.size() != h.dim) throw InputError("write_dataset: sample dim mismatch");
    for (double v : s.z) w.f64(v);
    w.f64(s.t);
    for (double v : s.x) w.f64(v);
  }
  write_file_bytes(file, w.buffer());
}

Dataset read_dataset(const std::filesystem::path& file) {
  const std::string raw = read_file_bytes(file);
  binary::Reader r(raw);
  if (r.bytes(kMagic.size()) != kMagic) throw InputError("read_dataset: bad magic in " + file.string());
  if (r.u32() != kVersion) throw InputError("read_dataset: unsupported format version");
  Dataset data;
  auto& h = data.header;
  h.dim = r.u32();
  h.count = r.u64();
  h.t_min = r.f64();
  h.seed = r.u64();
  h.descriptor = r.bytes(r.u32());
  if (r.remaining() != h.count * (2 * h.dim + 1) * 8) throw InputError("read_dataset: truncated rows");
  data.samples.resize(h.count);
  for (auto& s : data.samples) {
    s.z.resize(h.dim);
    s.x.resize(h.dim);
    for (double& v : s.z) v = r.f64();
    s.t = r.f64();
    for (double& v : s.x) v = r.f64();
    // Recover the Gaussian draw from the path identity.
    s.noise.resize(h.dim);
    for (std::size_t k = 0; k < h.dim; ++k) s.noise[k] = (s.x[k] - s.t * s.z[k]) / (1.0 - s.t);
  }
  return data;
}

void write_dataset_csv(const std::filesystem::path& file, const Dataset& data) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw InputError("cannot write " + file.string());
  const auto& h = data.header;
  out << "# d=" << h.dim << " n=" << h.count << " t_min=" << h.t_min << " seed=" << h.seed
      << " dist=" << h.descriptor << "\n";
  for (std::uint32_t k = 0; k < h.dim; ++k) out << "z" << k << ",";
  out << "t";
  for (std::uint32_t k = 0; k < h.dim; ++k) out << ",x" << k;
  out << "\n" << std::setprecision(17);
  for (const auto& s : data.samples) {
    for (double v : s.z) out << v << ",";
    out << s.t;
    for (double v : s.x) out << "," << v;
    out << "\n";
  }
}

}  // namespace fmlab
