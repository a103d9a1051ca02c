#pragma once

#include <cstdint>
#include <string>

namespace uwsim {

/// FNV-1a 64-bit over a byte buffer.
std::uint64_t fnv1a64(const void* data, std::size_t size);

/// Hash of a file's contents, formatted "fnv1a64:<16 hex digits>".
std::string hash_file(const std::string& path);

} // namespace uwsim
