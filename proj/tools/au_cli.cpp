// Command-line front end for the AU uncertainty measure: compute, validate,
// project, transfer, multiply, cross-check and axiom-check BPA files.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dst/au.hpp"
#include "dst/axioms.hpp"
#include "dst/bpa_io.hpp"
#include "dst/evidence.hpp"
#include "dst/frame.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitCheckFail = 3;
constexpr int kExitUsage = 64;
constexpr int kExitFile = 66;
constexpr int kExitInternal = 70;

struct FileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw FileError("cannot read " + path);
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError("cannot open " + path + " for writing");
    out << text << "\n";
    if (!out) throw FileError("cannot write " + path);
}

std::string fixed12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12f", v);
    return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string piece;
    std::istringstream in(text);
    while (std::getline(in, piece, sep)) {
        const auto from = piece.find_first_not_of(" \t");
        const auto to = piece.find_last_not_of(" \t");
        parts.push_back(from == std::string::npos ? "" : piece.substr(from, to - from + 1));
    }
    return parts;
}

dst::SubsetMask parse_set(const dst::Frame& frame, const std::string& text) {
    dst::SubsetMask mask = 0;
    for (const std::string& label : split(text, ',')) {
        const int x = frame.index_of(label);
        if (x < 0) throw std::invalid_argument("label \"" + label + "\" is not in the frame");
        mask |= dst::singleton_mask(x);
    }
    if (mask == 0) throw std::invalid_argument("set \"" + text + "\" is empty");
    return mask;
}

dst::Partition parse_blocks(const dst::Frame& frame, const std::string& text) {
    std::vector<dst::SubsetMask> blocks;
    for (const std::string& block : split(text, '|')) blocks.push_back(parse_set(frame, block));
    return dst::Partition(frame, std::move(blocks));
}

bool ci_mode() {
    const char* env = std::getenv("AU_CI");
    return env != nullptr && std::string(env) == "1";
}

void warn_large_frame(const dst::Frame& frame) {
    if (frame.size() > 16)
        std::cerr << "warning: frame has " << frame.size()
                  << " elements; exact computation may be slow\n";
}

int run_compute(const std::string& file, bool as_json) {
    dst::MassFunction m = dst::parse_bpa(read_file(file));
    warn_large_frame(m.frame());
    dst::AUResult result = dst::au(m);
    if (as_json) {
        nlohmann::json out;
        out["value"] = result.value;
        nlohmann::json argmax = nlohmann::json::array();
        for (int i = 0; i < m.frame().size(); ++i) argmax.push_back(result.argmax.at(i));
        out["argmax"] = argmax;
        std::cout << out.dump() << "\n";
    } else {
        std::cout << fixed12(result.value) << "\n";
        for (int i = 0; i < m.frame().size(); ++i)
            std::cout << m.frame().label(i) << " " << fixed12(result.argmax.at(i)) << "\n";
    }
    return kExitOk;
}

int run_validate(const std::string& file) {
    try {
        dst::MassFunction m = dst::parse_bpa(read_file(file));
        std::cout << "valid: " << m.frame().size() << " elements, " << m.focal_count()
                  << " focal sets\n";
        return kExitOk;
    } catch (const dst::ParseError& e) {
        std::cout << "invalid: " << e.what() << "\n";
        return kExitData;
    }
}

int run_project(const std::string& file, const std::string& blocks, const std::string& out) {
    dst::MassFunction m = dst::parse_bpa(read_file(file));
    dst::Partition y = parse_blocks(m.frame(), blocks);
    write_output(out, dst::emit_bpa(dst::project_mass(m, y)));
    return kExitOk;
}

int run_transfer(const std::string& file, const std::string& from_set,
                 const std::string& to_set, double alpha, const std::string& out) {
    dst::MassFunction m = dst::parse_bpa(read_file(file));
    const dst::SubsetMask a = parse_set(m.frame(), from_set);
    const dst::SubsetMask b = parse_set(m.frame(), to_set);
    write_output(out, dst::emit_bpa(dst::transfer(m, a, b, alpha)));
    return kExitOk;
}

int run_product(const std::string& file1, const std::string& file2, const std::string& out) {
    dst::MassFunction m1 = dst::parse_bpa(read_file(file1));
    dst::MassFunction m2 = dst::parse_bpa(read_file(file2));
    write_output(out, dst::emit_bpa(dst::product_mass(m1, m2)));
    return kExitOk;
}

int run_check(const std::string& suite, int frame_size, int samples, std::uint64_t seed,
              bool seed_given, bool as_json) {
    if (ci_mode() && !seed_given)
        throw UsageError("AU_CI=1 requires an explicit --seed for `check`");
    dst::SuiteOptions opts;
    opts.frame_size = frame_size;
    opts.samples = samples;
    opts.seed = seed;
    dst::Measure measure = [](const dst::MassFunction& m) { return dst::au(m).value; };
    std::vector<dst::CheckReport> reports;
    try {
        reports = dst::run_suite(measure, suite, opts);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    bool all_pass = true;
    for (const dst::CheckReport& r : reports) all_pass = all_pass && r.pass;
    if (as_json) {
        nlohmann::json out;
        out["suite"] = suite;
        out["frame_size"] = frame_size;
        out["samples"] = samples;
        out["seed"] = seed;
        out["generator_version"] = dst::kGeneratorVersion;
        out["all_pass"] = all_pass;
        nlohmann::json list = nlohmann::json::array();
        for (const dst::CheckReport& r : reports) {
            nlohmann::json entry;
            entry["id"] = r.id;
            entry["pass"] = r.pass;
            entry["margin"] = r.margin;
            entry["witness"] = r.witness;
            list.push_back(entry);
        }
        out["reports"] = list;
        std::cout << out.dump() << "\n";
    } else {
        for (const dst::CheckReport& r : reports)
            std::cout << r.id << " " << (r.pass ? "PASS" : "FAIL") << " margin "
                      << r.margin << " (" << r.witness << ")\n";
        std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
    }
    return all_pass ? kExitOk : kExitCheckFail;
}

int run_oracle(const std::string& file, const std::string& mode, std::uint64_t seed,
               bool seed_given) {
    dst::MassFunction m = dst::parse_bpa(read_file(file));
    dst::OracleOptions opts;
    opts.seed = seed;
    if (mode == "grid") {
        opts.mode = dst::OracleMode::grid;
    } else if (mode == "ascent") {
        opts.mode = dst::OracleMode::ascent;
        if (ci_mode() && !seed_given)
            throw UsageError("AU_CI=1 requires an explicit --seed for `oracle --mode ascent`");
    } else {
        throw UsageError("unknown oracle mode \"" + mode + "\"");
    }
    std::cout << fixed12(dst::au_oracle(m, opts)) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"AU uncertainty measure for Dempster-Shafer belief functions"};
    app.require_subcommand(1);

    std::string file, file2, out, blocks, from_set, to_set;
    std::string suite = "all", mode = "grid";
    bool as_json = false;
    double alpha = 0.0;
    int frame_size = 4, samples = 200;
    std::uint64_t seed = 1;

    CLI::App* compute = app.add_subcommand("compute", "AU value and argmax of a BPA file");
    compute->add_option("file", file, "BPA document")->required();
    compute->add_flag("--json", as_json, "emit a JSON report");

    CLI::App* validate = app.add_subcommand("validate", "validity verdict for a BPA file");
    validate->add_option("file", file, "BPA document")->required();

    CLI::App* project = app.add_subcommand("project", "project a BPA onto a partition");
    project->add_option("file", file, "BPA document")->required();
    project->add_option("--blocks", blocks, "partition, e.g. \"a,b|c,d\"")->required();
    project->add_option("-o,--out", out, "output file (stdout when absent)");

    CLI::App* transfer = app.add_subcommand("transfer", "move mass onto a strict superset");
    transfer->add_option("file", file, "BPA document")->required();
    transfer->add_option("--from-set", from_set, "source focal set, e.g. \"a\"")->required();
    transfer->add_option("--to-set", to_set, "target superset, e.g. \"a,b\"")->required();
    transfer->add_option("--alpha", alpha, "share kept on the source set")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    transfer->add_option("-o,--out", out, "output file (stdout when absent)");

    CLI::App* product = app.add_subcommand("product", "non-interacting product of two BPAs");
    product->add_option("file1", file, "first BPA document")->required();
    product->add_option("file2", file2, "second BPA document")->required();
    product->add_option("-o,--out", out, "output file (stdout when absent)");

    CLI::App* check = app.add_subcommand("check", "run the requirement suite against AU");
    check->add_option("--suite", suite, "all or one of R1..R8, T1, T2, T3, C4, T7");
    check->add_option("--frame-size", frame_size, "frame size for random BPAs")
        ->check(CLI::Range(1, 16));
    check->add_option("--samples", samples, "random trials per suite")->check(CLI::PositiveNumber);
    CLI::Option* check_seed = check->add_option("--seed", seed, "seed for the random suites");
    check->add_flag("--json", as_json, "emit a JSON report");

    CLI::App* oracle = app.add_subcommand("oracle", "independent approximation of AU");
    oracle->add_option("file", file, "BPA document")->required();
    oracle->add_option("--mode", mode, "grid (N <= 4) or ascent");
    CLI::Option* oracle_seed = oracle->add_option("--seed", seed, "seed for ascent starts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(compute)) return run_compute(file, as_json);
        if (app.got_subcommand(validate)) return run_validate(file);
        if (app.got_subcommand(project)) return run_project(file, blocks, out);
        if (app.got_subcommand(transfer))
            return run_transfer(file, from_set, to_set, alpha, out);
        if (app.got_subcommand(product)) return run_product(file, file2, out);
        if (app.got_subcommand(check))
            return run_check(suite, frame_size, samples, seed, check_seed->count() > 0,
                             as_json);
        if (app.got_subcommand(oracle))
            return run_oracle(file, mode, seed, oracle_seed->count() > 0);
        std::cerr << "no subcommand given\n";
        return kExitUsage;
    } catch (const FileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFile;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dst::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
