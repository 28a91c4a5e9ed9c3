#include "unigroup/matrix_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace unigroup {

namespace {

constexpr char kMagic[8] = {'U', 'G', 'M', 'A', 'T', 'R', 'X', '1'};

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        fields.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::runtime_error("matrix csv: bad numeric field '" + field + "'");
      }
    }
    if (fields.empty()) continue;
    if (fields.size() % 2 != 0) {
      throw std::runtime_error("matrix csv: odd field count (entries are re,im pairs)");
    }
    if (!rows.empty() && fields.size() != rows.front().size()) {
      throw std::runtime_error("matrix csv: ragged rows");
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw std::runtime_error("matrix csv: empty input");
  const Index nrows = static_cast<Index>(rows.size());
  const Index ncols = static_cast<Index>(rows.front().size() / 2);
  Matrix m(nrows, ncols);
  for (Index i = 0; i < nrows; ++i) {
    for (Index j = 0; j < ncols; ++j) {
      m(i, j) = cplx(rows[static_cast<size_t>(i)][static_cast<size_t>(2 * j)],
                     rows[static_cast<size_t>(i)][static_cast<size_t>(2 * j + 1)]);
    }
  }
  return m;
}

void write_matrix_binary(std::ostream& out, const Matrix& m) {
  out.write(kMagic, sizeof(kMagic));
  const std::int64_t rows = m.rows();
  const std::int64_t cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real();
      const double im = m(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
  if (!out) throw std::runtime_error("matrix binary: write failed");
}

Matrix read_matrix_binary(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("matrix binary: bad magic");
  }
  std::int64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || rows <= 0 || cols <= 0 || rows > (1 << 20) || cols > (1 << 20)) {
    throw std::runtime_error("matrix binary: bad header");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      double re = 0.0, im = 0.0;
      in.read(reinterpret_cast<char*>(&re), sizeof(re));
      in.read(reinterpret_cast<char*>(&im), sizeof(im));
      m(i, j) = cplx(re, im);
    }
  }
  if (!in) throw std::runtime_error("matrix binary: truncated payload");
  return m;
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path, std::ios::out);
  write_matrix_csv(out, m);
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  return read_matrix_csv(in);
}

void save_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write_matrix_binary(out, m);
}

Matrix load_matrix_binary(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return read_matrix_binary(in);
}

void save_vector_csv(const std::filesystem::path& path, const Vector& v) {
  save_matrix_csv(path, v);
}

Vector load_vector_csv(const std::filesystem::path& path) {
  const Matrix m = load_matrix_csv(path);
  if (m.cols() != 1) throw std::runtime_error("vector csv: expected one column");
  return m.col(0);
}

}  // namespace unigroup
