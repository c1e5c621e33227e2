// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>

namespace fmlab {

std::string read_file_bytes(const std::filesystem::path& file);
void write_file_bytes(const std::filesystem::path& file, std::span<const char> bytes);
void write_file_text(const std::filesystem::path& file, const std::string& text);

/// 64-bit FNV-1a, rendered as 16 hex digits. Used for config and checkpoint hashes.
std::string fnv1a_hex(std::span<const char> bytes);

}  // namespace fmlab
