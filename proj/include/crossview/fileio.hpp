#pragma once

#include <string>
#include <string_view>

namespace crossview::io {

// Whole-file read; throws IoError naming the path.
std::string read_file(const std::string& path);

// Whole-file write, creating parent directories; throws IoError naming the
// path.
void write_file(const std::string& path, std::string_view content);

} // namespace crossview::io
