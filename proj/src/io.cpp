#include "symnmf/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

namespace symnmf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view token, const std::string& source, std::size_t line, bool finite_only) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size() || token.empty()) {
    throw ParseError(source, line, "invalid number '" + std::string(token) + "'");
  }
  if (finite_only && !std::isfinite(value)) {
    throw ParseError(source, line, "non-finite value '" + std::string(token) + "'");
  }
  return value;
}

long long parse_integer(std::string_view token, const std::string& source, std::size_t line) {
  token = trim(token);
  long long value = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size() || token.empty()) {
    throw ParseError(source, line, "invalid integer '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct MarketHeader {
  bool coordinate = false;
  bool symmetric = false;
  bool pattern = false;
};

MarketHeader parse_market_header(const std::string& line, const std::string& source) {
  const auto tokens = split_ws(line);
  if (tokens.size() != 5 || lower(tokens[0]) != "%%matrixmarket" || lower(tokens[1]) != "matrix") {
    throw ParseError(source, 1, "missing %%MatrixMarket matrix header");
  }
  MarketHeader h;
  const auto kind = lower(tokens[2]);
  if (kind == "coordinate") {
    h.coordinate = true;
  } else if (kind != "array") {
    throw ParseError(source, 1, "unknown storage '" + kind + "'");
  }
  const auto field = lower(tokens[3]);
  if (field == "pattern") {
    h.pattern = true;
  } else if (field != "real" && field != "integer" && field != "double") {
    throw ParseError(source, 1, "unsupported field '" + field + "'");
  }
  if (h.pattern && !h.coordinate) throw ParseError(source, 1, "pattern requires coordinate storage");
  const auto symmetry = lower(tokens[4]);
  if (symmetry == "symmetric") {
    h.symmetric = true;
  } else if (symmetry != "general") {
    throw ParseError(source, 1, "unsupported symmetry '" + symmetry + "'");
  }
  return h;
}

DenseMatrix parse_market(std::istream& in, MatrixFormat format, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "empty file");
  const MarketHeader header = parse_market_header(line, source);
  const bool want_coordinate = format == MatrixFormat::matrixmarket_coordinate_symmetric;
  if (header.coordinate != want_coordinate) {
    throw ParseError(source, 1, header.coordinate ? "expected array storage, found coordinate"
                                                  : "expected coordinate storage, found array");
  }

  std::size_t line_no = 1;
  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      const auto t = trim(out);
      if (t.empty() || t.front() == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) throw ParseError(source, line_no, "missing size line");
  const auto size_tokens = split_ws(line);
  if (size_tokens.size() != (header.coordinate ? 3u : 2u)) {
    throw ParseError(source, line_no, "malformed size line");
  }
  const long long rows = parse_integer(size_tokens[0], source, line_no);
  const long long cols = parse_integer(size_tokens[1], source, line_no);
  if (rows <= 0 || cols <= 0) throw ParseError(source, line_no, "dimensions must be positive");
  if (header.symmetric && rows != cols) throw ParseError(source, line_no, "symmetric matrix must be square");

  DenseMatrix a = DenseMatrix::Zero(rows, cols);
  if (header.coordinate) {
    const long long nnz = parse_integer(size_tokens[2], source, line_no);
    if (nnz < 0) throw ParseError(source, line_no, "negative entry count");
    for (long long e = 0; e < nnz; ++e) {
      if (!next_data_line(line)) throw ParseError(source, line_no, "expected " + std::to_string(nnz) + " entries");
      const auto t = split_ws(line);
      if (t.size() != (header.pattern ? 2u : 3u)) throw ParseError(source, line_no, "malformed entry");
      const long long i = parse_integer(t[0], source, line_no);
      const long long j = parse_integer(t[1], source, line_no);
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(source, line_no, "index out of range");
      const double v = header.pattern ? 1.0 : parse_real(t[2], source, line_no, true);
      if (header.symmetric && i < j) throw ParseError(source, line_no, "symmetric entries must lie on or below the diagonal");
      a(i - 1, j - 1) = v;
      if (header.symmetric) a(j - 1, i - 1) = v;
    }
  } else {
    // Column-major; symmetric storage lists the lower triangle only.
    for (long long j = 0; j < cols; ++j) {
      for (long long i = header.symmetric ? j : 0; i < rows; ++i) {
        if (!next_data_line(line)) throw ParseError(source, line_no, "too few array entries");
        const auto t = split_ws(line);
        if (t.size() != 1) throw ParseError(source, line_no, "expected one value per line");
        const double v = parse_real(t[0], source, line_no, true);
        a(i, j) = v;
        if (header.symmetric) a(j, i) = v;
      }
    }
  }
  if (next_data_line(line)) throw ParseError(source, line_no, "trailing data");
  return a;
}

DenseMatrix parse_csv(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (rows == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw ParseError(source, line_no, "expected " + std::to_string(cols) + " fields, found " +
                                            std::to_string(fields.size()));
    }
    for (const auto f : fields) values.push_back(parse_real(f, source, line_no, true));
    ++rows;
  }
  if (rows == 0) throw ParseError(source, line_no, "no data rows");
  return Eigen::Map<const DenseMatrix>(values.data(), static_cast<Index>(rows), static_cast<Index>(cols));
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && lower(s.substr(s.size() - suffix.size())) == suffix;
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, end);
}

MatrixFormat format_from_path(const std::string& path) {
  if (ends_with(path, ".csv")) return MatrixFormat::csv;
  if (ends_with(path, ".mtx")) return MatrixFormat::matrixmarket_array;
  throw IoError("cannot infer matrix format from '" + path + "' (expected .csv or .mtx)");
}

DenseMatrix parse_matrix(std::istream& in, MatrixFormat format, const std::string& source) {
  if (format == MatrixFormat::csv) return parse_csv(in, source);
  return parse_market(in, format, source);
}

DenseMatrix read_matrix(const std::string& path, MatrixFormat format) {
  auto in = open_in(path);
  return parse_matrix(in, format, path);
}

DenseMatrix read_matrix(const std::string& path) {
  MatrixFormat format = format_from_path(path);
  if (format != MatrixFormat::csv) {
    auto in = open_in(path);
    std::string header;
    std::getline(in, header);
    if (parse_market_header(header, path).coordinate) format = MatrixFormat::matrixmarket_coordinate_symmetric;
  }
  return read_matrix(path, format);
}

void format_matrix(std::ostream& out, const DenseMatrix& a, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::csv:
      for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
          if (j) out << ',';
          out << format_real(a(i, j));
        }
        out << '\n';
      }
      break;
    case MatrixFormat::matrixmarket_array:
      out << "%%MatrixMarket matrix array real general\n" << a.rows() << ' ' << a.cols() << '\n';
      for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) out << format_real(a(i, j)) << '\n';
      }
      break;
    case MatrixFormat::matrixmarket_coordinate_symmetric: {
      if (a.rows() != a.cols() || a != a.transpose()) {
        throw DomainError("symmetric coordinate output requires an exactly symmetric matrix");
      }
      std::size_t nnz = 0;
      for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = j; i < a.rows(); ++i) nnz += a(i, j) != 0;
      }
      out << "%%MatrixMarket matrix coordinate real symmetric\n"
          << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
      for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = j; i < a.rows(); ++i) {
          if (a(i, j) != 0) out << i + 1 << ' ' << j + 1 << ' ' << format_real(a(i, j)) << '\n';
        }
      }
      break;
    }
  }
}

void write_matrix(const std::string& path, const DenseMatrix& a, MatrixFormat format) {
  auto out = open_out(path);
  format_matrix(out, a, format);
  finish(out, path);
}

void write_matrix(const std::string& path, const DenseMatrix& a) {
  write_matrix(path, a, format_from_path(path));
}

void format_trace(std::ostream& out, const std::vector<IterationRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << format_real(r.f_value) << ',' << format_real(r.fitting_error) << ','
        << format_real(r.symmetry_gap) << ',' << format_real(r.step_norm_sq) << ','
        << format_real(r.elapsed_seconds) << '\n';
  }
}

void write_trace(const std::string& path, const std::vector<IterationRecord>& trace) {
  auto out = open_out(path);
  format_trace(out, trace);
  finish(out, path);
}

std::vector<IterationRecord> parse_trace(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTraceHeader) {
    throw ParseError(source, 1, "missing trace header");
  }
  std::vector<IterationRecord> trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 6) throw ParseError(source, line_no, "expected 6 fields");
    const long long k = parse_integer(f[0], source, line_no);
    if (k < 0 || (!trace.empty() && static_cast<std::size_t>(k) <= trace.back().k)) {
      throw ParseError(source, line_no, "iteration index must be strictly increasing");
    }
    IterationRecord r;
    r.k = static_cast<std::size_t>(k);
    r.f_value = parse_real(f[1], source, line_no, false);
    r.fitting_error = parse_real(f[2], source, line_no, false);
    r.symmetry_gap = parse_real(f[3], source, line_no, false);
    r.step_norm_sq = parse_real(f[4], source, line_no, false);
    r.elapsed_seconds = parse_real(f[5], source, line_no, false);
    trace.push_back(r);
  }
  return trace;
}

std::vector<IterationRecord> read_trace(const std::string& path) {
  auto in = open_in(path);
  return parse_trace(in, path);
}

std::vector<int> read_labels(const std::string& path) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    labels.push_back(static_cast<int>(parse_integer(line, path, line_no)));
  }
  return labels;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  for (int l : labels) out << l << '\n';
  finish(out, path);
}

}  // namespace symnmf
