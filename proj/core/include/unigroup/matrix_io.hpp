#pragma once

#include <filesystem>
#include <iosfwd>

#include "unigroup/types.hpp"

namespace unigroup {

// Dense complex matrix exchange formats used by the CLI.
//
// CSV: one matrix row per line, each complex entry written as a re,im pair
// (so a row of N entries has 2N comma-separated fields). Values use full
// round-trip precision.
//
// Binary: 8-byte magic "UGMATRX1", int64 rows, int64 cols, then row-major
// little-endian doubles interleaved re, im.

void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);

void write_matrix_binary(std::ostream& out, const Matrix& m);
Matrix read_matrix_binary(std::istream& in);

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix_csv(const std::filesystem::path& path);
void save_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix_binary(const std::filesystem::path& path);

// Column vectors reuse the matrix formats with cols == 1.
void save_vector_csv(const std::filesystem::path& path, const Vector& v);
Vector load_vector_csv(const std::filesystem::path& path);

// Round-trip safe formatting for every numeric CSV the library writes.
std::string format_double(double value);

}  // namespace unigroup
