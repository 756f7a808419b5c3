#pragma once

#include <string>
#include <vector>

#include "ctilm/matrix.hpp"

namespace ctilm {

// Canonical numeric serialization: decimal with 17 significant digits, which
// round-trips any double exactly; infinities are written as the literals
// Inf / -Inf.
std::string format_double(double v);

// Accepts the output of format_double plus the usual strtod forms; "NA" is
// read as +Inf (missing event times). Throws Io on anything else.
double parse_double(const std::string& field);

struct CsvTable {
    std::vector<std::string> header; // empty when the file has no header
    std::vector<std::vector<double>> rows;
};

std::vector<std::string> split_csv_line(const std::string& line);

// has_header: parse the first line as column names instead of data
CsvTable read_csv(const std::string& path, bool has_header);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// headerless rectangular numeric file
Matrix read_dense_matrix(const std::string& path);
void write_dense_matrix(const std::string& path, const Matrix& m);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace ctilm
