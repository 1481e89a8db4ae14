#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tyrefield {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
    double number(std::size_t row, const std::string& name) const;
    std::vector<double> numbers(const std::string& name) const;
};

// Shortest text that is at most 17 significant digits and reads back bit-exactly.
std::string format_double(double x);
double parse_double(const std::string& s);

std::string to_csv_text(const CsvTable& t);
CsvTable parse_csv_text(const std::string& text);

void write_csv_file(const std::filesystem::path& path, const CsvTable& t);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace tyrefield
