#include "mvent/record.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvent/errors.hpp"

namespace mvent {

OutputFormat parse_output_format(const std::string& name) {
    if (name == "text") return OutputFormat::text;
    if (name == "csv") return OutputFormat::csv;
    if (name == "json-lines") return OutputFormat::json_lines;
    throw ConfigError("unknown output format '" + name + "'");
}

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8f", v);
    return buf;
}

std::string format_mass(const Rat& r) {
    return r.get_str() + " (= " + format_double(r.get_d()) + ")";
}

std::string content_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string as_text(const ResultRecord& rec) {
    std::ostringstream out;
    out << "command = " << rec.command << "\n";
    out << "digest = " << rec.digest << "\n";
    for (const auto& [k, v] : rec.fields) out << k << " = " << v << "\n";
    if (!rec.table_header.empty()) {
        out << "table:";
        for (const auto& h : rec.table_header) out << " " << h;
        out << "\n";
        for (const auto& row : rec.table_rows) {
            out << " ";
            for (std::size_t i = 0; i < row.size(); ++i) out << " " << row[i];
            out << "\n";
        }
    }
    return out.str();
}

std::string as_csv(const ResultRecord& rec) {
    std::ostringstream out;
    out << "key,value\n";
    out << "command," << csv_quote(rec.command) << "\n";
    out << "digest," << csv_quote(rec.digest) << "\n";
    for (const auto& [k, v] : rec.fields) out << csv_quote(k) << "," << csv_quote(v) << "\n";
    if (!rec.table_header.empty()) {
        for (std::size_t i = 0; i < rec.table_header.size(); ++i)
            out << (i ? "," : "") << csv_quote(rec.table_header[i]);
        out << "\n";
        for (const auto& row : rec.table_rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_quote(row[i]);
            out << "\n";
        }
    }
    return out.str();
}

std::string as_json_lines(const ResultRecord& rec) {
    nlohmann::ordered_json j;
    j["command"] = rec.command;
    j["digest"] = rec.digest;
    nlohmann::ordered_json fields = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rec.fields) fields[k] = v;
    j["fields"] = fields;
    if (!rec.table_header.empty()) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : rec.table_rows) {
            nlohmann::ordered_json r = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < row.size() && i < rec.table_header.size(); ++i)
                r[rec.table_header[i]] = row[i];
            rows.push_back(std::move(r));
        }
        j["rows"] = rows;
    }
    return j.dump() + "\n";
}

}  // namespace

std::string format_record(const ResultRecord& rec, OutputFormat fmt) {
    switch (fmt) {
        case OutputFormat::text: return as_text(rec);
        case OutputFormat::csv: return as_csv(rec);
        case OutputFormat::json_lines: return as_json_lines(rec);
    }
    throw Error("unreachable output format");
}

}  // namespace mvent
