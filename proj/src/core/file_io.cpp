// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "fmlab/core/file_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "fmlab/core/error.hpp"

namespace fmlab {

std::string read_file_bytes(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot open " + file.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& file, std::span<const char> bytes) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + file.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("short write to " + file.string());
}

void write_file_text(const std::filesystem::path& file, const std::string& text) {
  write_file_bytes(file, std::span<const char>(text.data(), text.size()));
}

std::string fnv1a_hex(std::span<const char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fmlab
