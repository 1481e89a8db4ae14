#include "tyrefield/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "tyrefield/errors.hpp"

namespace tyrefield {

int CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

double CsvTable::number(std::size_t row, const std::string& name) const
{
    const int c = column(name);
    if (c < 0) throw ValidationError("csv: no column '" + name + "'");
    if (row >= rows.size() || std::size_t(c) >= rows[row].size()) throw ValidationError("csv: row out of range");
    return parse_double(rows[row][c]);
}

std::vector<double> CsvTable::numbers(const std::string& name) const
{
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(number(i, name));
    return out;
}

std::string format_double(double x)
{
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& s)
{
    double x = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || p != e || b == e) throw ValidationError("csv: '" + s + "' is not a number");
    return x;
}

namespace {

std::string quote(const std::string& cell)
{
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void append_row(std::string& out, const std::vector<std::string>& row)
{
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += quote(row[i]);
    }
    out += '\n';
}

}  // namespace

std::string to_csv_text(const CsvTable& t)
{
    std::string out;
    append_row(out, t.header);
    for (const auto& r : t.rows) append_row(out, r);
    return out;
}

CsvTable parse_csv_text(const std::string& text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        any = true;
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\n') {
            row.push_back(std::move(cell));
            cell.clear();
            records.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            cell += c;
        }
    }
    if (quoted) throw ValidationError("csv: unterminated quoted field");
    if (any) {
        row.push_back(std::move(cell));
        records.push_back(std::move(row));
    }
    CsvTable t;
    if (records.empty()) return t;
    t.header = std::move(records.front());
    t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.rows[i].size() != t.header.size())
            throw ValidationError("csv: row " + std::to_string(i + 1) + " has " + std::to_string(t.rows[i].size()) +
                                  " fields, header has " + std::to_string(t.header.size()));
    return t;
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& t)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    const std::string text = to_csv_text(t);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed: " + std::strerror(errno));
}

CsvTable read_csv_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "': " + std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv_text(ss.str());
}

}  // namespace tyrefield
