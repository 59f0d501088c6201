#pragma once

#include "lrq/mdp.hpp"
#include "lrq/sim.hpp"
#include "lrq/solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace lrq {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

/// Plain-text dense matrix: a "MAT 1 <rows> <cols>" header line, then one
/// space-separated line per row. Values are written in shortest scientific
/// form and round-trip bit-exactly for finite doubles.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

/// Compressed value model: a "LRQ 1 <m> <n> <r> <nnz>" header, the m rows of
/// U, one line of singular values, the n rows of V, then nnz lines of
/// "row col value" sparse entries. Same number encoding as MAT files.
void write_compressed(const std::filesystem::path& path, const CompressedQ& cq);
CompressedQ read_compressed(const std::filesystem::path& path);

/// Policy heat map CSV of (dim1.count + 1) x (dim2.count + 1) cells: the
/// header row and column carry the node coordinates, interior cells the
/// chosen action's value at that state.
void write_heatmap(const std::filesystem::path& path, const std::vector<int>& policy,
                   const Grid2D& grid);

/// Benchmark report CSV, one row per policy with the columns
/// problem,policy,metric_name,metric,rank,nnz_fraction,storage_entries,agreement.
std::string report_csv_string(const std::vector<BenchReport>& reports);
void write_report_csv(const std::filesystem::path& path,
                      const std::vector<BenchReport>& reports);
std::vector<BenchReport> read_report_csv(const std::filesystem::path& path);

/// Fixed-width text rendering of report rows, one block per report.
std::string render_report_table(const std::vector<BenchReport>& reports);

}  // namespace lrq
