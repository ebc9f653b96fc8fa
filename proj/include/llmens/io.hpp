#pragma once

#include <string>
#include <vector>

namespace llmens {

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Non-empty lines of a file, in order.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace llmens
