// Command-line front end: build-index, query, bench, factorize.
//
// Exit codes: 0 success, 1 bad input or I/O failure, 2 algorithm refused the index.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "slr/bench.hpp"
#include "slr/errors.hpp"
#include "slr/index.hpp"
#include "slr/ingest.hpp"
#include "slr/retrieval.hpp"

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

slr::QueryVector read_query(const std::string& spec) {
    if (std::filesystem::is_regular_file(spec)) {
        const auto m = slr::load_dense(spec);
        if (m.rows != 1) {
            throw slr::ContractViolation("query file " + spec + " must hold exactly one row, found " +
                                         std::to_string(m.rows));
        }
        return slr::QueryVector(m.data);
    }
    std::istringstream in(spec);
    const auto m = slr::parse_dense(in);
    if (m.rows != 1) throw slr::ContractViolation("inline query must be a single comma-separated row");
    return slr::QueryVector(m.data);
}

slr::TargetFactors read_factors(const std::string& path, bool sparse) {
    if (!std::filesystem::exists(path)) throw slr::IoError("factors file not found: " + path);
    const auto m = slr::load_dense(path);
    return sparse ? slr::TargetFactors::sparse_from_dense(m) : slr::TargetFactors::dense(m);
}

int cmd_build_index(const std::string& factors_path, const std::string& out, bool sparse) {
    const auto t = read_factors(factors_path, sparse);
    const auto start = std::chrono::steady_clock::now();
    const auto idx = slr::build_index(t);
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    slr::save_index(idx, out);
    std::cout << "M=" << idx.num_targets() << " R=" << idx.num_dims() << " sparse=" << (sparse ? "true" : "false")
              << " build_ms=" << format_double(ms) << '\n';
    return 0;
}

struct QueryArgs {
    std::string index;
    std::string factors;
    std::string query;
    std::size_t k = 0;
    std::string algo;
    std::size_t budget = 0;
    bool stats = false;
};

int cmd_query(const QueryArgs& a, bool budget_given) {
    const auto algo = slr::parse_algorithm(a.algo);
    if (!algo) throw slr::ContractViolation("unknown algorithm \"" + a.algo + "\"");
    if (budget_given != (*algo == slr::Algorithm::Halted)) {
        throw slr::ContractViolation("--budget is required with --algo halted and not allowed otherwise");
    }
    const auto idx = slr::load_index(a.index);
    const auto t = read_factors(a.factors, idx.is_sparse());
    slr::check_index_matches(idx, t);
    const auto u = read_query(a.query);

    const auto res = slr::run_topk(*algo, u, idx, t, a.k, a.budget);
    std::string out;
    for (std::size_t i = 0; i < res.entries.size(); ++i) {
        out += std::to_string(i + 1) + "," + std::to_string(res.entries[i].target) + "," +
               format_double(res.entries[i].score) + "\n";
    }
    if (a.stats) {
        const auto& s = res.stats;
        out += "stats,full_scores=" + std::to_string(s.full_scores_computed) +
               ",attempted=" + std::to_string(s.scores_attempted) +
               ",partial_terms=" + std::to_string(s.partial_terms_computed) +
               ",sorted_accesses=" + std::to_string(s.sorted_accesses) + ",depth=" + std::to_string(s.depth_reached) +
               ",heap_updates=" + std::to_string(s.heap_updates) + ",wall_ns=" + std::to_string(s.wall_time_ns) +
               ",exact=" + (res.exact ? "true" : "false") + ",lower=" + format_double(res.lower_bound) +
               ",upper=" + format_double(res.upper_bound) + "\n";
    }
    std::cout << out;
    if (!res.exact) {
        std::cerr << "warning: result is not guaranteed exact (lower bound " << format_double(res.lower_bound)
                  << ", upper bound " << format_double(res.upper_bound) << ")\n";
    }
    return 0;
}

int cmd_bench(const std::string& config, const std::string& out) {
    const auto cfg = slr::load_bench_config(config);
    const auto records = slr::run_bench(cfg);
    slr::emit_csv(records, out);
    std::cout << "records=" << records.size() << '\n';
    return 0;
}

int cmd_factorize(const std::string& matrix, std::size_t rank, std::size_t iters, const std::string& out_u,
                  const std::string& out_t) {
    const auto c = slr::load_coordinate(matrix);
    const auto f = slr::factorize(c, rank, iters);
    slr::save_dense(f.query_factors, out_u);
    slr::save_dense(f.target_factors, out_t);
    std::cout << "N=" << f.query_factors.rows << " M=" << f.target_factors.rows << " R=" << f.rank() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact top-K retrieval for separable linear relational models"};
    app.require_subcommand(1);

    std::string factors, out;
    bool sparse = false;
    auto* build = app.add_subcommand("build-index", "Build a sorted-list index from a dense factor CSV");
    build->add_option("--factors", factors, "Target factors, one row per target")->required();
    build->add_option("--out", out, "Index file to write")->required();
    build->add_flag("--sparse", sparse, "Store only positive entries (non-negative data)");

    QueryArgs q;
    auto* query = app.add_subcommand("query", "Answer one top-K query");
    query->add_option("--index", q.index, "Index file")->required();
    query->add_option("--factors", q.factors, "Target factors the index was built from")->required();
    query->add_option("--query", q.query, "Query as a CSV file or inline comma-separated values")->required();
    query->add_option("--k", q.k, "Number of targets to return")->required()->check(CLI::PositiveNumber);
    query->add_option("--algo", q.algo, "naive | fagin | threshold | partial | halted")
        ->required()
        ->check(CLI::IsMember({"naive", "fagin", "threshold", "partial", "halted"}));
    auto* budget = query->add_option("--budget", q.budget, "Depth budget for --algo halted")->check(CLI::PositiveNumber);
    query->add_flag("--stats", q.stats, "Print query statistics");

    std::string config, csv;
    auto* bench = app.add_subcommand("bench", "Run a benchmark sweep and write CSV");
    bench->add_option("--config", config, "key = value config file")->required();
    bench->add_option("--out", csv, "CSV output path")->required();

    std::string matrix, out_u, out_t;
    std::size_t rank = 0, iters = 0;
    auto* fact = app.add_subcommand("factorize", "Rank-R factorization of a coordinate-format matrix");
    fact->add_option("--matrix", matrix, "Coordinate text file")->required();
    fact->add_option("--rank", rank, "Target rank R")->required()->check(CLI::PositiveNumber);
    fact->add_option("--iters", iters, "Power iterations")->required()->check(CLI::PositiveNumber);
    fact->add_option("--out-u", out_u, "Output CSV for U")->required();
    fact->add_option("--out-t", out_t, "Output CSV for T")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*build) return cmd_build_index(factors, out, sparse);
        if (*query) return cmd_query(q, budget->count() > 0);
        if (*bench) return cmd_bench(config, csv);
        if (*fact) return cmd_factorize(matrix, rank, iters, out_u, out_t);
    } catch (const slr::UnsupportedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
