#include "lrq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>
#include <system_error>

namespace lrq {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, int line, const std::string& msg) {
  throw IoError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
  throw IoError(path.string() + ": " + msg);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(path, "read failed");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) fail(path, "write failed");
}

void append_double(std::string& out, double v, std::chars_format fmt) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, fmt);
  out.append(buf, res.ptr);
}

// one line at a time, tracking 1-based line numbers; tolerates a missing
// final newline and strips a trailing '\r'
struct LineScanner {
  std::string_view text;
  std::size_t pos = 0;
  int line = 0;

  std::optional<std::string_view> next() {
    if (pos >= text.size()) return std::nullopt;
    const std::size_t nl = text.find('\n', pos);
    std::string_view ln;
    if (nl == std::string_view::npos) {
      ln = text.substr(pos);
      pos = text.size();
    } else {
      ln = text.substr(pos, nl - pos);
      pos = nl + 1;
    }
    if (!ln.empty() && ln.back() == '\r') ln.remove_suffix(1);
    ++line;
    return ln;
  }
};

std::vector<std::string_view> split_fields(std::string_view ln, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = ln.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(ln.substr(start));
      return out;
    }
    out.push_back(ln.substr(start, at - start));
    start = at + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view ln) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < ln.size()) {
    while (i < ln.size() && (ln[i] == ' ' || ln[i] == '\t')) ++i;
    if (i >= ln.size()) break;
    std::size_t j = i;
    while (j < ln.size() && ln[j] != ' ' && ln[j] != '\t') ++j;
    out.push_back(ln.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double_tok(const std::filesystem::path& path, int line, std::string_view tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    fail(path, line, "invalid number '" + std::string(tok) + "'");
  if (!std::isfinite(v)) fail(path, line, "non-finite value '" + std::string(tok) + "'");
  return v;
}

std::int64_t parse_int_tok(const std::filesystem::path& path, int line, std::string_view tok) {
  std::int64_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    fail(path, line, "invalid integer '" + std::string(tok) + "'");
  return v;
}

std::string_view require_line(const std::filesystem::path& path, LineScanner& sc,
                              const std::string& what) {
  const auto ln = sc.next();
  if (!ln) fail(path, sc.line + 1, "unexpected end of file, expected " + what);
  return *ln;
}

// fills one matrix row from a whitespace-separated line
void parse_row(const std::filesystem::path& path, int line, std::string_view ln, Matrix& m,
               Index row) {
  const auto toks = split_ws(ln);
  if (static_cast<Index>(toks.size()) != m.cols())
    fail(path, line,
         "expected " + std::to_string(m.cols()) + " values, got " + std::to_string(toks.size()));
  for (Index j = 0; j < m.cols(); ++j)
    m(row, j) = parse_double_tok(path, line, toks[static_cast<std::size_t>(j)]);
}

void require_no_trailing(const std::filesystem::path& path, LineScanner& sc) {
  while (const auto ln = sc.next()) {
    if (!split_ws(*ln).empty()) fail(path, sc.line, "unexpected trailing content");
  }
}

void append_matrix_rows(std::string& buf, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) buf += ' ';
      append_double(buf, m(i, j), std::chars_format::scientific);
    }
    buf += '\n';
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1)
    throw std::invalid_argument("write_matrix: matrix must be nonempty");
  if (!all_finite(m)) throw std::invalid_argument("write_matrix: non-finite entry");

  std::string buf;
  buf.reserve(static_cast<std::size_t>(m.size()) * 14 + 64);
  buf += "MAT 1 ";
  buf += std::to_string(m.rows());
  buf += ' ';
  buf += std::to_string(m.cols());
  buf += '\n';
  append_matrix_rows(buf, m);
  write_file(path, buf);
}

Matrix read_matrix(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  LineScanner sc{text};

  const auto header = split_ws(require_line(path, sc, "'MAT 1 <rows> <cols>' header"));
  if (header.size() != 4 || header[0] != "MAT" || header[1] != "1")
    fail(path, 1, "expected 'MAT 1 <rows> <cols>' header");
  const std::int64_t rows = parse_int_tok(path, 1, header[2]);
  const std::int64_t cols = parse_int_tok(path, 1, header[3]);
  if (rows < 1 || cols < 1) fail(path, 1, "matrix dimensions must be positive");

  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto ln = require_line(path, sc, "data row " + std::to_string(i + 1));
    parse_row(path, sc.line, ln, m, i);
  }
  require_no_trailing(path, sc);
  return m;
}

void write_compressed(const std::filesystem::path& path, const CompressedQ& cq) {
  const Index m = cq.rows();
  const Index n = cq.cols();
  const Index r = cq.factors.rank();
  if (m < 1 || n < 1)
    throw std::invalid_argument("write_compressed: model must be nonempty");
  if (cq.factors.u.cols() != r || cq.factors.v.cols() != r)
    throw std::invalid_argument("write_compressed: factor shapes disagree");
  if (cq.s.rows() != m || cq.s.cols() != n)
    throw std::invalid_argument("write_compressed: sparse part has wrong dimensions");
  if (!all_finite(cq.factors.u) || !all_finite(cq.factors.v) ||
      !cq.factors.sigma.allFinite())
    throw std::invalid_argument("write_compressed: non-finite factor entry");

  std::string buf;
  buf.reserve(static_cast<std::size_t>((m + n + 1) * std::max<Index>(r, 1)) * 14 +
              static_cast<std::size_t>(cq.s.nnz()) * 24 + 64);
  buf += "LRQ 1 ";
  buf += std::to_string(m);
  buf += ' ';
  buf += std::to_string(n);
  buf += ' ';
  buf += std::to_string(r);
  buf += ' ';
  buf += std::to_string(cq.s.nnz());
  buf += '\n';
  append_matrix_rows(buf, cq.factors.u);
  {
    // sigma line is present even for r = 0, as an empty line
    for (Index j = 0; j < r; ++j) {
      if (j > 0) buf += ' ';
      append_double(buf, cq.factors.sigma(j), std::chars_format::scientific);
    }
    buf += '\n';
  }
  append_matrix_rows(buf, cq.factors.v);
  for (const SparseEntry& e : cq.s.entries()) {
    buf += std::to_string(e.row);
    buf += ' ';
    buf += std::to_string(e.col);
    buf += ' ';
    append_double(buf, e.value, std::chars_format::scientific);
    buf += '\n';
  }
  write_file(path, buf);
}

CompressedQ read_compressed(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  LineScanner sc{text};

  const auto header = split_ws(require_line(path, sc, "'LRQ 1 <m> <n> <r> <nnz>' header"));
  if (header.size() != 6 || header[0] != "LRQ" || header[1] != "1")
    fail(path, 1, "expected 'LRQ 1 <m> <n> <r> <nnz>' header");
  const std::int64_t m = parse_int_tok(path, 1, header[2]);
  const std::int64_t n = parse_int_tok(path, 1, header[3]);
  const std::int64_t r = parse_int_tok(path, 1, header[4]);
  const std::int64_t nnz = parse_int_tok(path, 1, header[5]);
  if (m < 1 || n < 1) fail(path, 1, "model dimensions must be positive");
  if (r < 0 || r > std::min(m, n)) fail(path, 1, "rank must be in [0, min(m, n)]");
  if (nnz < 0 || nnz > m * n) fail(path, 1, "implausible sparse entry count");

  CompressedQ cq;
  cq.factors.u.resize(m, r);
  cq.factors.sigma.resize(r);
  cq.factors.v.resize(n, r);

  for (Index i = 0; i < m; ++i) {
    const auto ln = require_line(path, sc, "U row " + std::to_string(i + 1));
    parse_row(path, sc.line, ln, cq.factors.u, i);
  }
  {
    const auto ln = require_line(path, sc, "singular value line");
    const auto toks = split_ws(ln);
    if (static_cast<std::int64_t>(toks.size()) != r)
      fail(path, sc.line,
           "expected " + std::to_string(r) + " singular values, got " +
               std::to_string(toks.size()));
    for (Index j = 0; j < r; ++j)
      cq.factors.sigma(j) = parse_double_tok(path, sc.line, toks[static_cast<std::size_t>(j)]);
    for (Index j = 0; j < r; ++j) {
      if (cq.factors.sigma(j) < 0.0)
        fail(path, sc.line, "singular values must be nonnegative");
      if (j > 0 && cq.factors.sigma(j) > cq.factors.sigma(j - 1))
        fail(path, sc.line, "singular values must be nonincreasing");
    }
  }
  for (Index i = 0; i < n; ++i) {
    const auto ln = require_line(path, sc, "V row " + std::to_string(i + 1));
    parse_row(path, sc.line, ln, cq.factors.v, i);
  }

  std::vector<SparseEntry> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  for (std::int64_t k = 0; k < nnz; ++k) {
    const auto ln = require_line(path, sc, "sparse entry " + std::to_string(k + 1));
    const auto toks = split_ws(ln);
    if (toks.size() != 3) fail(path, sc.line, "expected 'row col value'");
    SparseEntry e;
    e.row = parse_int_tok(path, sc.line, toks[0]);
    e.col = parse_int_tok(path, sc.line, toks[1]);
    e.value = parse_double_tok(path, sc.line, toks[2]);
    if (e.row < 0 || e.row >= m || e.col < 0 || e.col >= n)
      fail(path, sc.line, "sparse entry out of range");
    if (e.value == 0.0) fail(path, sc.line, "sparse entry must be nonzero");
    entries.push_back(e);
  }
  require_no_trailing(path, sc);

  try {
    cq.s = SparseCoo::from_entries(m, n, std::move(entries));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return cq;
}

void write_heatmap(const std::filesystem::path& path, const std::vector<int>& policy,
                   const Grid2D& grid) {
  grid.validate();
  if (static_cast<int>(policy.size()) != grid.n_states())
    throw std::invalid_argument("write_heatmap: policy length does not match the grid");
  for (const int a : policy)
    if (a < 0 || a >= grid.n_actions())
      throw std::invalid_argument("write_heatmap: action index out of range");

  std::string buf;
  buf.reserve(static_cast<std::size_t>(grid.n_states()) * 10 + 256);
  for (int j = 0; j < grid.dim2.count; ++j) {
    buf += ',';
    buf += format_double(grid.dim2.node(j));
  }
  buf += '\n';
  for (int i = 0; i < grid.dim1.count; ++i) {
    buf += format_double(grid.dim1.node(i));
    for (int j = 0; j < grid.dim2.count; ++j) {
      buf += ',';
      buf += format_double(
          grid.actions.node(policy[static_cast<std::size_t>(grid.state_index(i, j))]));
    }
    buf += '\n';
  }
  write_file(path, buf);
}

namespace {

constexpr std::string_view kReportHeader =
    "problem,policy,metric_name,metric,rank,nnz_fraction,storage_entries,agreement";

}  // namespace

std::string report_csv_string(const std::vector<BenchReport>& reports) {
  std::string buf{kReportHeader};
  buf += '\n';
  for (const BenchReport& rep : reports) {
    for (const PolicyRow& row : rep.rows) {
      buf += rep.problem;
      buf += ',';
      buf += row.policy;
      buf += ',';
      buf += rep.metric_name;
      buf += ',';
      buf += format_double(row.metric);
      buf += ',';
      buf += std::to_string(row.rank);
      buf += ',';
      buf += format_double(row.nnz_fraction);
      buf += ',';
      buf += std::to_string(row.storage_entries);
      buf += ',';
      buf += format_double(row.agreement);
      buf += '\n';
    }
  }
  return buf;
}

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<BenchReport>& reports) {
  write_file(path, report_csv_string(reports));
}

std::vector<BenchReport> read_report_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  LineScanner sc{text};

  const auto header = require_line(path, sc, "report header");
  if (header != kReportHeader) fail(path, 1, "unexpected report header");

  std::vector<BenchReport> reports;
  while (const auto lnOpt = sc.next()) {
    const std::string_view ln = *lnOpt;
    if (ln.empty()) continue;
    const auto f = split_fields(ln, ',');
    if (f.size() != 8) fail(path, sc.line, "expected 8 fields");

    PolicyRow row;
    row.policy = std::string(f[1]);
    row.metric = parse_double_tok(path, sc.line, f[3]);
    row.rank = parse_int_tok(path, sc.line, f[4]);
    row.nnz_fraction = parse_double_tok(path, sc.line, f[5]);
    row.storage_entries = parse_int_tok(path, sc.line, f[6]);
    row.agreement = parse_double_tok(path, sc.line, f[7]);

    if (reports.empty() || reports.back().problem != f[0] ||
        reports.back().metric_name != f[2]) {
      BenchReport rep;
      rep.problem = std::string(f[0]);
      rep.metric_name = std::string(f[2]);
      reports.push_back(std::move(rep));
    }
    reports.back().rows.push_back(std::move(row));
  }
  return reports;
}

std::string render_report_table(const std::vector<BenchReport>& reports) {
  std::string out;
  char buf[160];
  for (const BenchReport& rep : reports) {
    std::snprintf(buf, sizeof buf, "%s (%s)\n", rep.problem.c_str(), rep.metric_name.c_str());
    out += buf;
    std::snprintf(buf, sizeof buf, "  %-12s %14s %8s %14s %16s %11s\n", "policy", "metric",
                  "rank", "nnz_fraction", "storage_entries", "agreement");
    out += buf;
    for (const PolicyRow& row : rep.rows) {
      std::snprintf(buf, sizeof buf, "  %-12s %14.6g %8lld %14.6g %16lld %11.4f\n",
                    row.policy.c_str(), row.metric, static_cast<long long>(row.rank),
                    row.nnz_fraction, static_cast<long long>(row.storage_entries),
                    row.agreement);
      out += buf;
    }
  }
  return out;
}

}  // namespace lrq
