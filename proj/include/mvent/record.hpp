#ifndef MVENT_RECORD_HPP
#define MVENT_RECORD_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mvent/numeric.hpp"

namespace mvent {

enum class OutputFormat { text, csv, json_lines };

OutputFormat parse_output_format(const std::string& name);

/**
 * One result of one command, fully formatted: ordered scalar fields plus an
 * optional table of per-step rows.  Writers only arrange these strings, so a
 * record serializes to identical bytes regardless of how it was computed.
 */
struct ResultRecord {
    std::string command;
    std::string digest;
    std::vector<std::pair<std::string, std::string>> fields;
    std::vector<std::string> table_header;
    std::vector<std::vector<std::string>> table_rows;
};

std::string format_record(const ResultRecord& rec, OutputFormat fmt);

/** Fixed 8-decimal formatting used for every real number that is printed. */
std::string format_double(double v);

/** "p/q (= 0.xxxxxxxx)" exact mass with decimal annotation. */
std::string format_mass(const Rat& r);

/** FNV-1a 64-bit content hash, hex-encoded; used for input digests. */
std::string content_digest(const std::string& bytes);

}  // namespace mvent

#endif
