#include "mvent/config.hpp"

#include <fstream>
#include <sstream>

namespace mvent {

namespace {

std::vector<std::string> tokens_of(const std::string& raw) {
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::size_t parse_index(const std::string& tok, const std::string& what) {
    try {
        std::size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("bad " + what + " '" + tok + "'");
    }
}

}  // namespace

const RawPartition& ParsedConfig::partition(const std::string& name) const {
    for (const auto& p : partitions)
        if (p.name == name) return p;
    throw ConfigError("no partition named '" + name + "'");
}

ParsedConfig parse_config_text(const std::string& text, const std::string& origin) {
    ParsedConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    RawPartition* open = nullptr;

    auto fail = [&](const std::string& msg) -> void {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, raw)) {
        ++lineno;
        std::vector<std::string> toks = tokens_of(raw);
        if (toks.empty()) continue;

        if (open) {
            if (toks[0] == "end") {
                if (open->rows.empty()) fail("partition '" + open->name + "' has no rows");
                open = nullptr;
                continue;
            }
            std::vector<Rat> row;
            row.reserve(toks.size());
            for (const auto& t : toks) row.push_back(parse_rat(t));
            if (!open->rows.empty() && row.size() != open->rows.front().size())
                fail("ragged row in partition '" + open->name + "'");
            open->rows.push_back(std::move(row));
            continue;
        }

        const std::string& key = toks[0];
        if (key == "space") {
            if (toks.size() < 2) fail("space needs at least one point id");
            cfg.point_ids.assign(toks.begin() + 1, toks.end());
        } else if (key == "weights") {
            cfg.weights.clear();
            for (std::size_t i = 1; i < toks.size(); ++i) cfg.weights.push_back(parse_rat(toks[i]));
        } else if (key == "map") {
            cfg.point_map.clear();
            for (std::size_t i = 1; i < toks.size(); ++i)
                cfg.point_map.push_back(parse_index(toks[i], "map index"));
        } else if (key == "log_base") {
            if (toks.size() != 2 || (toks[1] != "e" && toks[1] != "2"))
                fail("log_base must be 'e' or '2'");
            cfg.log_base = toks[1] == "e" ? LogBase::natural : LogBase::two;
        } else if (key == "numeric") {
            if (toks.size() != 2 || (toks[1] != "rational" && toks[1] != "float"))
                fail("numeric must be 'rational' or 'float'");
            cfg.numeric = toks[1] == "rational" ? NumericMode::Kind::exact_rational
                                                : NumericMode::Kind::float64;
        } else if (key == "tolerance") {
            if (toks.size() != 2) fail("tolerance needs one value");
            try {
                cfg.tolerance = std::stod(toks[1]);
            } catch (const std::exception&) {
                fail("bad tolerance '" + toks[1] + "'");
            }
        } else if (key == "partition") {
            if (toks.size() != 2) fail("partition needs exactly one name");
            for (const auto& p : cfg.partitions)
                if (p.name == toks[1]) fail("duplicate partition name '" + toks[1] + "'");
            cfg.partitions.push_back(RawPartition{toks[1], {}});
            open = &cfg.partitions.back();
        } else {
            fail("unknown directive '" + key + "'");
        }
    }
    if (open) throw ConfigError(origin + ": partition '" + open->name + "' not closed with 'end'");

    if (cfg.point_ids.empty()) throw ConfigError(origin + ": missing 'space' line");
    if (cfg.weights.size() != cfg.point_ids.size())
        throw ConfigError(origin + ": weights count " + std::to_string(cfg.weights.size()) +
                          " does not match " + std::to_string(cfg.point_ids.size()) + " points");
    if (!cfg.point_map.empty() && cfg.point_map.size() != cfg.point_ids.size())
        throw ConfigError(origin + ": map length does not match point count");
    for (std::size_t idx : cfg.point_map)
        if (idx >= cfg.point_ids.size())
            throw ConfigError(origin + ": map index " + std::to_string(idx) + " out of range");
    for (const auto& p : cfg.partitions)
        for (const auto& row : p.rows)
            if (row.size() != cfg.point_ids.size())
                throw ConfigError(origin + ": partition '" + p.name + "' rows have " +
                                  std::to_string(row.size()) + " columns, expected " +
                                  std::to_string(cfg.point_ids.size()));
    return cfg;
}

ParsedConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace mvent
