#include "fcnet/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fcnet {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  while (ptr != last && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
  require(ec == std::errc{} && ptr == last, ErrorCode::Io,
          "not a number: '" + s + "'");
  return v;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(x));
  return buf;
}

double percentile_nearest_rank(std::vector<double> x, double q) {
  require(!x.empty(), ErrorCode::InvalidArgument, "percentile: empty input");
  require(q >= 0.0 && q <= 100.0, ErrorCode::InvalidArgument,
          "percentile: q outside [0,100]");
  std::sort(x.begin(), x.end());
  std::size_t n = x.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(q / 100.0 * static_cast<double>(n)));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return x[rank - 1];
}

double pearson_correlation_vec(const std::vector<double>& a,
                               const std::vector<double>& b) {
  require(a.size() == b.size() && a.size() >= 2, ErrorCode::DimensionMismatch,
          "pearson: need two equal-length series of length >= 2");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  require(da > 0.0 && db > 0.0, ErrorCode::InvalidArgument,
          "pearson: zero-variance series");
  return num / std::sqrt(da * db);
}

void write_csv(const std::filesystem::path& path, const Matrix& m,
               const std::vector<std::string>& header) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot open for write: " + path.string());
  if (!header.empty()) {
    require(static_cast<Eigen::Index>(header.size()) == m.cols(),
            ErrorCode::DimensionMismatch, "csv header width mismatch");
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j) out << ',';
      out << header[j];
    }
    out << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path.string());
}

static std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Matrix read_csv(const std::filesystem::path& path, bool has_header,
                std::vector<std::string>* header) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open: " + path.string());
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (first && has_header) {
      first = false;
      auto cells = split_csv_line(line);
      width = cells.size();
      if (header) *header = cells;
      continue;
    }
    first = false;
    auto cells = split_csv_line(line);
    if (width == 0) width = cells.size();
    require(cells.size() == width, ErrorCode::Io,
            "ragged csv row in " + path.string());
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      row[j] = parse_double(cells[j]);
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::Io, "empty csv: " + path.string());
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot open for write: " + path.string());
  out << content;
  require(out.good(), ErrorCode::Io, "write failed: " + path.string());
}

std::uint64_t checksum_file(const std::filesystem::path& path) {
  return fnv1a64(read_text_file(path));
}

}  // namespace fcnet
