#include "slt/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace slt {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell += ch;
        }
    }
    cells.push_back(cell);
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    std::size_t a = cell.find_first_not_of(" \t");
    if (a == std::string::npos) return false;
    std::size_t b = cell.find_last_not_of(" \t");
    const char* first = cell.data() + a;
    const char* last = cell.data() + b + 1;
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_dataset_csv: cannot open " + path);

    std::vector<double> values;
    std::size_t dim = 0, row_no = 0;
    std::string line;
    bool first_data_row = true;
    while (std::getline(is, line)) {
        ++row_no;
        if (line.empty() || line == "\r") continue;
        auto cells = split_row(line);
        std::vector<double> row(cells.size());
        bool numeric = true;
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (!parse_double(cells[c], row[c])) {
                numeric = false;
                break;
            }
        if (!numeric) {
            if (first_data_row) continue;  // header row
            throw std::runtime_error("read_dataset_csv: non-numeric cell in row " +
                                     std::to_string(row_no) + " of " + path);
        }
        if (first_data_row) {
            dim = row.size();
            first_data_row = false;
        } else if (row.size() != dim) {
            throw std::runtime_error("read_dataset_csv: row " + std::to_string(row_no) + " has " +
                                     std::to_string(row.size()) + " columns, expected " +
                                     std::to_string(dim));
        }
        values.insert(values.end(), row.begin(), row.end());
    }
    if (first_data_row) throw std::runtime_error("read_dataset_csv: no data rows in " + path);
    return Dataset(dim, std::move(values));
}

}  // namespace slt
