#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "symnmf/dense.hpp"
#include "symnmf/solvers.hpp"

namespace symnmf {

enum class MatrixFormat { matrixmarket_array, matrixmarket_coordinate_symmetric, csv };

// .csv -> csv; .mtx -> MatrixMarket (array or coordinate is taken from the header when reading).
MatrixFormat format_from_path(const std::string& path);

DenseMatrix read_matrix(const std::string& path, MatrixFormat format);
DenseMatrix read_matrix(const std::string& path);
DenseMatrix parse_matrix(std::istream& in, MatrixFormat format, const std::string& source = "<stream>");

void write_matrix(const std::string& path, const DenseMatrix& a, MatrixFormat format);
void write_matrix(const std::string& path, const DenseMatrix& a);
void format_matrix(std::ostream& out, const DenseMatrix& a, MatrixFormat format);

inline constexpr const char* kTraceHeader = "k,f_value,fitting_error,symmetry_gap,step_norm_sq,elapsed_seconds";

void write_trace(const std::string& path, const std::vector<IterationRecord>& trace);
void format_trace(std::ostream& out, const std::vector<IterationRecord>& trace);
std::vector<IterationRecord> read_trace(const std::string& path);
std::vector<IterationRecord> parse_trace(std::istream& in, const std::string& source = "<stream>");

// One integer label per line.
std::vector<int> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

// Shortest-safe 17-significant-digit decimal rendering, locale independent.
std::string format_real(double value);

}  // namespace symnmf
