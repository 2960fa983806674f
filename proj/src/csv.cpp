#include "fls/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>

namespace fls {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> try_parse(std::string_view field) {
    field = trim(field);
    if (field.empty()) return std::nullopt;
    if (field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
    return v;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

struct Table {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> row_major;
};

Table read_table(const std::filesystem::path& path, char delimiter, bool auto_header) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());

    Table t;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const auto fields = split(line, delimiter);
        std::vector<double> values;
        values.reserve(fields.size());
        std::optional<std::size_t> bad;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto v = try_parse(fields[j]);
            if (!v) {
                bad = j;
                break;
            }
            values.push_back(*v);
        }
        if (bad) {
            if (first_content && auto_header) {
                first_content = false;
                continue;
            }
            throw CsvError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell in column " +
                           std::to_string(*bad + 1) + " ('" + std::string(trim(fields[*bad])) + "')");
        }
        first_content = false;
        if (t.rows == 0) {
            t.cols = values.size();
        } else if (values.size() != t.cols) {
            throw CsvError(path.string() + ":" + std::to_string(line_no) + ": ragged row with " +
                           std::to_string(values.size()) + " cells, expected " + std::to_string(t.cols));
        }
        t.row_major.insert(t.row_major.end(), values.begin(), values.end());
        ++t.rows;
    }
    if (t.rows == 0) throw CsvError(path.string() + ": no numeric rows");
    return t;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path.string());
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view field) {
    const auto v = try_parse(field);
    if (!v) throw CsvError("not a number: '" + std::string(field) + "'");
    return *v;
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
    const Table t = read_table(path, ',', false);
    return DenseMatrix::from_row_major(t.rows, t.cols, t.row_major);
}

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& M) {
    auto out = open_for_write(path);
    for (std::size_t i = 0; i < M.rows(); ++i) {
        for (std::size_t j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << format_double(M(i, j));
        }
        out << '\n';
    }
    if (!out) throw CsvError("write failed: " + path.string());
}

Vector read_vector_csv(const std::filesystem::path& path) {
    const Table t = read_table(path, ',', false);
    if (t.cols != 1) throw CsvError(path.string() + ": expected a single-column vector file");
    return t.row_major;
}

void write_vector_csv(const std::filesystem::path& path, std::span<const double> v) {
    auto out = open_for_write(path);
    for (double x : v) out << format_double(x) << '\n';
    if (!out) throw CsvError("write failed: " + path.string());
}

DenseMatrix load_csv_dataset(const std::filesystem::path& path, const DatasetCsvOptions& options) {
    const Table t = read_table(path, options.delimiter, options.auto_header);
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < t.cols; ++j)
        if (std::find(options.drop_columns.begin(), options.drop_columns.end(), j) == options.drop_columns.end())
            keep.push_back(j);
    for (std::size_t j : options.drop_columns)
        if (j >= t.cols)
            throw CsvError(path.string() + ": drop column " + std::to_string(j + 1) + " out of range");
    if (keep.empty()) throw CsvError(path.string() + ": every column was dropped");
    return DenseMatrix::from_function(t.rows, keep.size(), [&](std::size_t i, std::size_t j) {
        return t.row_major[i * t.cols + keep[j]];
    });
}

char sniff_delimiter(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot read " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line.find(';') != std::string::npos) return ';';
        if (line.find('\t') != std::string::npos) return '\t';
        return ',';
    }
    return ',';
}

} // namespace fls
