#pragma once

#include "psdbw/symmat.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace psdbw {

// Matrix files are either JSON objects {"dim": n, "values": [n*n row-major
// reals]} or CSV with n rows of n comma-separated reals. Readers accept both
// (JSON is recognised by a leading '{'); writers emit JSON unless CSV is
// requested. Parse failures throw InvalidArgument.

SymMatrix parse_matrix(std::string_view text);
SymMatrix read_matrix(const std::filesystem::path& path);

std::string matrix_to_json(const SymMatrix& a);
std::string matrix_to_csv(const SymMatrix& a);
void write_matrix(const std::filesystem::path& path, const SymMatrix& a, bool csv = false);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

}  // namespace psdbw
