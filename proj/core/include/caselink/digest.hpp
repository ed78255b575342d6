#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace caselink {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// `bytes` random bytes from the OS CSPRNG, hex encoded.
std::string random_token(std::size_t bytes = 24);

}  // namespace caselink
