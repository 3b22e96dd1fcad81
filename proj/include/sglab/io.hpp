#pragma once

#include <fstream>
#include <string>

namespace sglab {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);
/// Inverse of format_double; throws on trailing garbage.
double parse_double(const std::string& text);

std::ofstream open_output(const std::string& path);
void check_stream(const std::ofstream& out, const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace sglab
