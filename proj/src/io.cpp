#include "sphsym/io.hpp"

#include <charconv>
#include <fstream>

#include "sphsym/distributions.hpp"
#include "sphsym/error.hpp"

namespace sphsym {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<std::vector<double>> read_csv_rows(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::vector<double> row;
        std::string_view rest = line;
        std::size_t column = 0;
        for (;;) {
            ++column;
            const auto comma = rest.find(',');
            const auto field = trim(rest.substr(0, comma));
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
                throw ParseError("non-numeric field '" + std::string(field) + "' in column " +
                                     std::to_string(column),
                                 line_no);
            row.push_back(v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("expected " + std::to_string(rows.front().size()) +
                                 " fields, found " + std::to_string(row.size()),
                             line_no);
        rows.push_back(std::move(row));
    }
    if (in.bad()) throw IoError("read error on '" + path + "'");
    return rows;
}

Sample read_csv_sample(const std::string& path, bool has_header) {
    const auto rows = read_csv_rows(path, has_header);
    if (rows.empty()) throw ParseError("'" + path + "' contains no data rows");
    const std::size_t d = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * d);
    for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
    return Sample(std::move(data), rows.size(), d);
}

void write_csv_sample(const Sample& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (std::size_t i = 0; i < sample.n(); ++i) {
        const auto row = sample.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out << ',';
            out << format_number(row[k]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write error on '" + path + "'");
}

nlohmann::json to_json(const TestOutcome& o) {
    return {{"statistic", o.statistic},
            {"p_value", o.p_value},
            {"method", std::string(to_string(o.method))},
            {"B", o.B},
            {"alpha", o.alpha},
            {"reject", o.reject},
            {"n", o.n},
            {"d", o.d},
            {"seed", o.seed},
            {"center", std::string(to_string(o.center))},
            {"c_alpha_bound", o.c_alpha_bound}};
}

}  // namespace sphsym
