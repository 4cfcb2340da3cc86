#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fcnet/common.hpp"

namespace fcnet {

// Numeric CSV, no quoting. Values are written with %.17g so a read-back
// round-trips bitwise.
void write_csv(const std::filesystem::path& path, const Matrix& m,
               const std::vector<std::string>& header = {});
Matrix read_csv(const std::filesystem::path& path, bool has_header,
                std::vector<std::string>* header = nullptr);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

std::uint64_t checksum_file(const std::filesystem::path& path);

}  // namespace fcnet
