#include "qplab/cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>

namespace qplab::cli {

std::string format_double(double x, int digits) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string format_real(const Real& x, int digits) {
    if (!x.is_finite()) return format_double(x.to_double(), digits);
    char buf[256];
    mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, x.raw());
    return buf;
}

Cell num(double x, int digits) { return {format_double(x, digits), true}; }
Cell num(const Real& x, int digits) { return {format_real(x, digits), true}; }
Cell integer(long long x) { return {std::to_string(x), true}; }
Cell big(const BigInt& x) { return {x.get_str(), false}; }
Cell text(std::string s) { return {std::move(s), false}; }

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

json cell_json(const Cell& c) {
    if (!c.numeric) return c.text;
    // integers stay exact; other numbers keep the printed digits
    if (c.text.find_first_of(".eEn") == std::string::npos) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(c.text, &used);
            if (used == c.text.size()) return v;
        } catch (const std::exception&) {
        }
        return c.text;
    }
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(c.text.c_str(), &end);
    // out-of-range exponents (extended precision) stay textual
    if (errno == ERANGE || *end != '\0' || !std::isfinite(v)) return c.text;
    return json::parse(c.text);
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + csv_field(table.columns[i]);
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i].text);
        out += '\n';
    }
    return out;
}

json table_json(const Table& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) r[table.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string render(const Artifact& artifact, std::string_view format) {
    if (format == "csv") return to_csv(artifact.table);
    if (format == "json") {
        json doc = artifact.document ? *artifact.document : json{{"name", artifact.name}};
        doc["rows"] = table_json(artifact.table);
        return doc.dump(2) + "\n";
    }
    fail(ErrorCode::ValueError, "format must be csv or json");
}

std::filesystem::path write_artifact(const Artifact& artifact, const std::filesystem::path& dir,
                                     std::string_view format) {
    std::filesystem::create_directories(dir);
    std::filesystem::path path = dir / (artifact.name + "." + std::string(format));
    std::string body = render(artifact, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) fail(ErrorCode::ValueError, "cannot write " + path.string());
    return path;
}

}  // namespace qplab::cli
