// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/core/binary_io.hpp"
#include "fmlab/core/error.hpp"
#include "fmlab/core/file_io.hpp"
#include "fmlab/net.hpp"

namespace fmlab {
namespace {

constexpr std::string_view kMagic{"FMLCKPT\0", 8};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::vector<char> serialize_checkpoint(const NetworkParams& params) {
  const auto& s = params.spec;
  s.validate();
  if (params.theta.size() != s.param_count()) throw InputError("checkpoint: theta length does not match spec");
  binary::Writer w;
  w.bytes(kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(s.data_dim));
  w.u32(static_cast<std::uint32_t>(s.width));
  w.u32(static_cast<std::uint32_t>(s.depth));
  w.u32(static_cast<std::uint32_t>(s.activation));
  w.u32(static_cast<std::uint32_t>(s.conditioning));
  w.f64(s.param_bound);
  w.u64(params.theta.size());
  for (double v : params.theta) w.f64(v);
  return w.buffer();
}

NetworkParams deserialize_checkpoint(std::string_view bytes) {
  binary::Reader r(bytes);
  if (r.bytes(kMagic.size()) != kMagic) throw InputError("checkpoint: bad magic");
  if (r.u32() != kVersion) throw InputError("checkpoint: unsupported format version");
  NetworkParams p;
  auto& s = p.spec;
  s.data_dim = r.u32();
  s.width = r.u32();
  s.depth = r.u32();
  const std::uint32_t act = r.u32();
  const std::uint32_t cond = r.u32();
  if (act > 2) throw InputError("checkpoint: unknown activation tag");
  if (cond > 1) throw InputError("checkpoint: unknown conditioning tag");
  s.activation = static_cast<Activation>(act);
  s.conditioning = static_cast<Conditioning>(cond);
  s.param_bound = r.f64();
  s.validate();
  const std::uint64_t n = r.u64();
  if (n != s.param_count()) throw InputError("checkpoint: theta length does not match spec");
  if (r.remaining() != n * 8) throw InputError("checkpoint: truncated or trailing data");
  p.theta.resize(n);
  for (double& v : p.theta) v = r.f64();
  return p;
}

void write_checkpoint(const std::filesystem::path& file, const NetworkParams& params) {
  write_file_bytes(file, serialize_checkpoint(params));
}

NetworkParams read_checkpoint(const std::filesystem::path& file) {
  return deserialize_checkpoint(read_file_bytes(file));
}

}  // namespace fmlab
