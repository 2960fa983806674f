#pragma once

#include "fls/dense.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fls {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! Options for reading a numeric dataset (e.g. a UCI table).
struct DatasetCsvOptions {
    char delimiter = ',';
    //! 0-based columns dropped after parsing (label/target columns)
    std::vector<std::size_t> drop_columns;
    //! skip the first row when it does not parse as numbers
    bool auto_header = true;
};

//! Matrix files: one row per line, comma separated, no header.
DenseMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& M);

//! Vector files: single-column CSV.
Vector read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(const std::filesystem::path& path, std::span<const double> v);

//! Shortest decimal form that parses back to the identical double.
std::string format_double(double v);
//! Strict parse of a whole field (surrounding blanks allowed); throws CsvError.
double parse_double(std::string_view field);

//! ';' or '\t' when the first non-blank line contains one, ',' otherwise
char sniff_delimiter(const std::filesystem::path& path);

DenseMatrix load_csv_dataset(const std::filesystem::path& path, const DatasetCsvOptions& options = {});

} // namespace fls
