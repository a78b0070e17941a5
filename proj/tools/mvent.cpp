#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mvent/config.hpp"
#include "mvent/dynamics.hpp"
#include "mvent/entropy.hpp"
#include "mvent/errors.hpp"
#include "mvent/optimizer.hpp"
#include "mvent/record.hpp"

namespace {

using namespace mvent;

struct Flags {
    std::string log_base = "e";
    std::string mode = "auto";
    std::string numeric = "rational";
    std::string output = "text";
    double tolerance = 1e-9;
    std::size_t n_max = 4;
    std::uint64_t seed = 0;
    std::size_t max_cells = 4096;
    std::size_t max_combos = 4000000;
    unsigned workers = 1;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--log-base", f.log_base, "logarithm base: e or 2")
        ->check(CLI::IsMember({"e", "2"}));
    cmd->add_option("--mode", f.mode, "solver mode")
        ->check(CLI::IsMember({"exact", "heuristic", "auto"}));
    cmd->add_option("--numeric", f.numeric, "arithmetic: rational or float")
        ->check(CLI::IsMember({"rational", "float"}));
    cmd->add_option("--tolerance", f.tolerance, "float-mode comparison tolerance");
    cmd->add_option("--n-max", f.n_max, "step count for sequences")->check(CLI::Range(1, 16));
    cmd->add_option("--seed", f.seed, "seed for heuristic sampling");
    cmd->add_option("--output", f.output, "record format")
        ->check(CLI::IsMember({"text", "csv", "json-lines"}));
    cmd->add_option("--max-cells", f.max_cells, "per-point cell cap for the exact solver");
    cmd->add_option("--max-combos", f.max_combos, "vertex combination cap for the exact solver");
    cmd->add_option("--workers", f.workers, "threads for the exact search (0 = all cores)");
}

struct Effective {
    LogBase base = LogBase::natural;
    NumericMode::Kind numeric = NumericMode::Kind::exact_rational;
    double tolerance = 1e-9;
    OutputFormat output = OutputFormat::text;
    SolveOptions solver;
    std::size_t n_max = 4;
};

Effective resolve(const Flags& f, const CLI::App* sub, const ParsedConfig& cfg) {
    Effective e;
    if (sub->count("--log-base") > 0)
        e.base = f.log_base == "2" ? LogBase::two : LogBase::natural;
    else
        e.base = cfg.log_base.value_or(LogBase::natural);
    if (sub->count("--numeric") > 0)
        e.numeric = f.numeric == "float" ? NumericMode::Kind::float64
                                         : NumericMode::Kind::exact_rational;
    else
        e.numeric = cfg.numeric.value_or(NumericMode::Kind::exact_rational);
    if (sub->count("--tolerance") > 0)
        e.tolerance = f.tolerance;
    else
        e.tolerance = cfg.tolerance.value_or(1e-9);
    if (e.tolerance <= 0 || e.tolerance >= 1)
        throw ConfigError("tolerance must lie strictly between 0 and 1");
    e.output = parse_output_format(f.output);
    e.n_max = f.n_max;
    e.solver.base = e.base;
    e.solver.mode = f.mode == "exact"       ? SolveMode::exact
                    : f.mode == "heuristic" ? SolveMode::heuristic
                                            : SolveMode::auto_mode;
    e.solver.max_cells_per_point = f.max_cells;
    e.solver.max_combinations = f.max_combos;
    e.solver.workers = f.workers;
    e.solver.seed = f.seed;
    return e;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string numeric_name(NumericMode::Kind k) {
    return k == NumericMode::Kind::float64 ? "float" : "rational";
}

std::string canonical_flags(const Effective& e, const Flags& f, const std::string& extra) {
    char tol[32];
    std::snprintf(tol, sizeof tol, "%.17g", e.tolerance);
    std::ostringstream s;
    s << "log_base=" << log_base_name(e.base) << ";mode=" << f.mode
      << ";numeric=" << numeric_name(e.numeric) << ";tolerance=" << tol
      << ";n_max=" << e.n_max << ";seed=" << f.seed << ";max_cells=" << f.max_cells
      << ";max_combos=" << f.max_combos << ";" << extra;
    return s.str();
}

template <class S>
std::string mass_string(const S& v);

template <>
std::string mass_string<Rat>(const Rat& v) {
    return format_mass(v);
}

template <>
std::string mass_string<double>(const double& v) {
    return format_double(v);
}

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ",";
        out += names[i];
    }
    return out;
}

/** "A[0].B[2]" style label for a row-major cell of the named axes. */
std::string cell_label(const std::vector<std::string>& names,
                       const std::vector<std::size_t>& shape, std::size_t flat) {
    std::vector<std::size_t> strides(shape.size(), 1);
    for (std::size_t t = shape.size(); t-- > 1;) strides[t - 1] = strides[t] * shape[t];
    std::string out;
    for (std::size_t t = 0; t < shape.size(); ++t) {
        if (t) out += ".";
        out += names[t] + "[" + std::to_string(flat / strides[t]) + "]";
        flat %= strides[t];
    }
    return out;
}

template <class S>
ResultRecord run_entropy(const ParsedConfig& cfg, const Effective& eff, const std::string& name) {
    DynamicalSystem<S> sys = system_from_config<S>(cfg, eff.tolerance);
    Partition<S> a = partition_from_config<S>(cfg, name, sys.space);
    EntropyValue h = partition_entropy(a, sys.state, eff.base);

    ResultRecord rec;
    rec.command = "entropy";
    rec.fields = {{"partition", name},
                  {"log_base", log_base_name(eff.base)},
                  {"numeric", numeric_name(eff.numeric)},
                  {"entropy", format_double(h.value)}};
    rec.table_header = {"element", "mass"};
    for (std::size_t i = 0; i < a.size(); ++i)
        rec.table_rows.push_back(
            {name + "[" + std::to_string(i) + "]", mass_string<S>(sys.state.mass(a[i]))});
    return rec;
}

template <class S>
ResultRecord run_refine(const ParsedConfig& cfg, const Effective& eff, const Flags& f,
                        const std::vector<std::string>& names) {
    DynamicalSystem<S> sys = system_from_config<S>(cfg, eff.tolerance);
    std::vector<Partition<S>> parts;
    parts.reserve(names.size());
    for (const auto& n : names) parts.push_back(partition_from_config<S>(cfg, n, sys.space));
    RefinementSolution<S> sol = min_entropy_refinement(parts, sys.state, eff.solver);

    ResultRecord rec;
    rec.command = "refine";
    rec.fields = {{"partitions", join_names(names)},
                  {"mode", f.mode},
                  {"log_base", log_base_name(eff.base)},
                  {"numeric", numeric_name(eff.numeric)},
                  {"certificate", certificate_name(sol.certificate)},
                  {"entropy", format_double(sol.entropy.value)},
                  {"bound_gap", format_double(sol.bound_gap)}};
    std::vector<std::size_t> shape;
    for (const auto& p : parts) shape.push_back(p.size());
    std::vector<S> masses = sol.tensor.masses(sys.state);
    rec.table_header = {"cell", "mass"};
    for (std::size_t c = 0; c < masses.size(); ++c)
        rec.table_rows.push_back({cell_label(names, shape, c), mass_string<S>(masses[c])});
    return rec;
}

template <class S>
ResultRecord run_dynamics(const ParsedConfig& cfg, const Effective& eff, const Flags& f,
                          const std::string& name) {
    DynamicalSystem<S> sys = system_from_config<S>(cfg, eff.tolerance);
    Partition<S> a = partition_from_config<S>(cfg, name, sys.space);
    EntropySequence seq = entropy_sequence(sys, a, eff.n_max, eff.solver);
    RateEstimate join = product_join_rate(sys, a, eff.n_max, eff.base);

    ResultRecord rec;
    rec.command = "dynamics";
    rec.fields = {{"partition", name},
                  {"n_max", std::to_string(eff.n_max)},
                  {"mode", f.mode},
                  {"log_base", log_base_name(eff.base)},
                  {"numeric", numeric_name(eff.numeric)},
                  {"rate_estimate", format_double(seq.running_inf.back())},
                  {"join_rate_estimate", format_double(join.estimate)}};
    if (!seq.warnings.empty()) {
        std::string w;
        for (std::size_t i = 0; i < seq.warnings.size(); ++i) {
            if (i) w += "; ";
            w += seq.warnings[i];
        }
        rec.fields.emplace_back("warnings", w);
    }
    rec.table_header = {"n",           "step_entropy", "per_step",   "running_inf",
                        "join_entropy", "within_join",  "certificate"};
    for (std::size_t n = 1; n <= eff.n_max; ++n) {
        bool within = seq.values[n - 1] <= join.sequence.values[n - 1] + 1e-9;
        rec.table_rows.push_back({std::to_string(n), format_double(seq.values[n - 1]),
                                  format_double(seq.per_step[n - 1]),
                                  format_double(seq.running_inf[n - 1]),
                                  format_double(join.sequence.values[n - 1]),
                                  within ? "yes" : "no",
                                  certificate_name(seq.certificates[n - 1])});
    }
    return rec;
}

std::vector<std::size_t> parse_sigma(const std::string& text) {
    std::vector<std::size_t> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ',')) {
        try {
            std::size_t pos = 0;
            unsigned long v = std::stoul(cur, &pos);
            if (pos != cur.size()) throw std::invalid_argument(cur);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("bijection entry '" + cur + "' is not an index");
        }
    }
    if (out.empty()) throw ConfigError("empty bijection");
    return out;
}

template <class S>
ResultRecord run_compare(const ParsedConfig& cfg_a, const ParsedConfig& cfg_b,
                         const Effective& eff, const Flags& f, const std::string& sigma_text) {
    DynamicalSystem<S> sys_a = system_from_config<S>(cfg_a, eff.tolerance);
    DynamicalSystem<S> sys_b = system_from_config<S>(cfg_b, eff.tolerance);
    IsomorphismMap<S> iso{sys_a.space, sys_b.space, parse_sigma(sigma_text)};
    validate_isomorphism(iso);
    validate_commutation(iso, sys_a.tau, sys_b.tau);

    ResultRecord rec;
    rec.command = "compare";
    rec.table_header = {"partition", "n", "value_a", "value_b", "delta"};
    double max_abs = 0.0;
    for (const RawPartition& raw : cfg_a.partitions) {
        Partition<S> pa = partition_from_config<S>(cfg_a, raw.name, sys_a.space);
        Partition<S> pb = transport_partition(pa, iso);
        for (std::size_t n = 1; n <= eff.n_max; ++n) {
            double va = refinement_step(sys_a, pa, n, eff.solver).entropy.value;
            double vb = refinement_step(sys_b, pb, n, eff.solver).entropy.value;
            double delta = vb - va;
            max_abs = std::max(max_abs, std::fabs(delta));
            rec.table_rows.push_back({raw.name, std::to_string(n), format_double(va),
                                      format_double(vb), format_double(delta)});
        }
    }
    rec.fields = {{"map", sigma_text},
                  {"n_max", std::to_string(eff.n_max)},
                  {"mode", f.mode},
                  {"log_base", log_base_name(eff.base)},
                  {"numeric", numeric_name(eff.numeric)},
                  {"max_abs_delta", format_double(max_abs)}};
    return rec;
}

void emit(ResultRecord rec, const std::string& digest_payload, OutputFormat fmt) {
    rec.digest = content_digest(digest_payload);
    std::cout << format_record(rec, fmt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy of fuzzy partitions under measure-preserving dynamics"};
    app.require_subcommand(1);

    Flags f;

    std::string cfg_path, cfg_path_b, partition_name, sigma_text;
    std::vector<std::string> refine_names;

    CLI::App* c_entropy = app.add_subcommand("entropy", "entropy of one partition");
    c_entropy->add_option("config", cfg_path, "system config file")->required();
    c_entropy->add_option("partition", partition_name, "partition name")->required();
    add_common(c_entropy, f);

    CLI::App* c_refine =
        app.add_subcommand("refine", "minimum-entropy common refinement of named partitions");
    c_refine->add_option("config", cfg_path, "system config file")->required();
    c_refine->add_option("names", refine_names, "partition names")->required()->expected(-1);
    add_common(c_refine, f);

    CLI::App* c_dynamics =
        app.add_subcommand("dynamics", "step-entropy sequence under the configured map");
    c_dynamics->add_option("config", cfg_path, "system config file")->required();
    c_dynamics->add_option("partition", partition_name, "partition name")->required();
    add_common(c_dynamics, f);

    CLI::App* c_compare =
        app.add_subcommand("compare", "recompute both sides of a point bijection");
    c_compare->add_option("config_a", cfg_path, "first system config")->required();
    c_compare->add_option("config_b", cfg_path_b, "second system config")->required();
    c_compare->add_option("map", sigma_text, "comma-separated image index per point")
        ->required();
    add_common(c_compare, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    int status = 0;
    try {
        const std::string bytes = read_file(cfg_path);
        ParsedConfig cfg = parse_config_text(bytes, cfg_path);
        const CLI::App* sub = app.get_subcommands().front();
        Effective eff = resolve(f, sub, cfg);
        const bool exact = eff.numeric == NumericMode::Kind::exact_rational;

        if (app.got_subcommand(c_entropy)) {
            std::string payload = bytes + "\n--\n" + canonical_flags(eff, f, "p=" + partition_name);
            emit(exact ? run_entropy<Rat>(cfg, eff, partition_name)
                       : run_entropy<double>(cfg, eff, partition_name),
                 payload, eff.output);
        } else if (app.got_subcommand(c_refine)) {
            std::string payload =
                bytes + "\n--\n" + canonical_flags(eff, f, "p=" + join_names(refine_names));
            emit(exact ? run_refine<Rat>(cfg, eff, f, refine_names)
                       : run_refine<double>(cfg, eff, f, refine_names),
                 payload, eff.output);
        } else if (app.got_subcommand(c_dynamics)) {
            std::string payload = bytes + "\n--\n" + canonical_flags(eff, f, "p=" + partition_name);
            emit(exact ? run_dynamics<Rat>(cfg, eff, f, partition_name)
                       : run_dynamics<double>(cfg, eff, f, partition_name),
                 payload, eff.output);
        } else {
            const std::string bytes_b = read_file(cfg_path_b);
            ParsedConfig cfg_b = parse_config_text(bytes_b, cfg_path_b);
            std::string payload =
                bytes + "\n==\n" + bytes_b + "\n--\n" + canonical_flags(eff, f, "map=" + sigma_text);
            emit(exact ? run_compare<Rat>(cfg, cfg_b, eff, f, sigma_text)
                       : run_compare<double>(cfg, cfg_b, eff, f, sigma_text),
                 payload, eff.output);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        status = 2;
    } catch (const IsomorphismError& e) {
        std::cerr << "isomorphism error: " << e.what() << "\n";
        status = 5;
    } catch (const BudgetExceededError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        std::cerr << "hint: rerun with --mode heuristic or raise --max-cells/--max-combos\n";
        status = 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        status = 1;
    }

    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "elapsed_ms="
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() << "\n";
    return status;
}
