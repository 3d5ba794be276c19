#include "slr/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "slr/errors.hpp"

namespace slr {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = s.find(',', pos);
        out.push_back(trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

template <typename T>
T parse_value(std::string_view key, std::string_view v, std::size_t line) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(std::string(key) + ": invalid value \"" + std::string(v) + "\"", line);
    }
    return out;
}

template <typename T>
std::vector<T> parse_values(std::string_view key, std::string_view v, std::size_t line) {
    std::vector<T> out;
    for (auto item : split_list(v)) out.push_back(parse_value<T>(key, item, line));
    return out;
}

bool parse_bool(std::string_view key, std::string_view v, std::size_t line) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ParseError(std::string(key) + ": expected on/off", line);
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

struct Instance {
    TargetFactors targets;
    DenseMatrix query_pool;  // rows are candidate queries; empty for synthetic data
};

std::mt19937_64 make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    for (auto t : tags) {
        words.push_back(static_cast<std::uint32_t>(t));
        words.push_back(static_cast<std::uint32_t>(t >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

std::vector<double> draw_row(DatasetKind kind, std::size_t dims, double density, std::mt19937_64& rng) {
    std::vector<double> row(dims, 0.0);
    switch (kind) {
        case DatasetKind::Gaussian: {
            std::normal_distribution<double> d;
            for (auto& x : row) x = d(rng);
            break;
        }
        case DatasetKind::UniformNonneg: {
            std::uniform_real_distribution<double> d(0.0, 1.0);
            for (auto& x : row) x = d(rng);
            break;
        }
        case DatasetKind::Sparse: {
            std::bernoulli_distribution keep(density);
            std::exponential_distribution<double> value(1.0);
            for (auto& x : row) {
                if (keep(rng)) x = value(rng);
            }
            break;
        }
        default:
            throw ContractViolation("not a synthetic dataset");
    }
    return row;
}

Instance synthetic_instance(const BenchConfig& cfg, std::size_t m, std::size_t dims) {
    auto rng = make_rng(cfg.seed, {m, dims, 0});
    DenseMatrix t(m, dims);
    for (std::size_t y = 0; y < m; ++y) {
        const auto row = draw_row(cfg.dataset, dims, cfg.density, rng);
        std::copy(row.begin(), row.end(), t.row(y).begin());
    }
    Instance inst;
    inst.targets = cfg.dataset == DatasetKind::Sparse ? TargetFactors::sparse_from_dense(t) : TargetFactors::dense(t);
    return inst;
}

Instance file_instance(const BenchConfig& cfg) {
    Instance inst;
    if (cfg.dataset == DatasetKind::Factors) {
        inst.query_pool = load_dense(cfg.factors_u);
        const auto t = load_dense(cfg.factors_t);
        if (inst.query_pool.cols != t.cols) {
            throw ContractViolation("bench: U has rank " + std::to_string(inst.query_pool.cols) + ", T has rank " +
                                    std::to_string(t.cols));
        }
        inst.targets = TargetFactors::dense(t);
    } else {
        const auto c = transform_values(load_coordinate(cfg.matrix, cfg.feedback), cfg.transform);
        auto f = factorize(c, cfg.rank, cfg.iterations, cfg.seed);
        inst.query_pool = std::move(f.query_factors);
        inst.targets = TargetFactors::dense(f.target_factors);
    }
    if (inst.query_pool.rows == 0) throw ContractViolation("bench: no query rows available");
    return inst;
}

TargetFactors subsample(const TargetFactors& t, double fraction, std::mt19937_64& rng) {
    if (fraction >= 1.0) return t;
    const auto m = t.num_targets();
    const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(m))));
    std::vector<std::size_t> ids(m);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(keep);
    std::sort(ids.begin(), ids.end());
    if (t.is_sparse()) {
        std::vector<std::vector<SparseEntry>> rows;
        rows.reserve(keep);
        for (auto y : ids) {
            const auto r = t.sparse_row(static_cast<TargetId>(y));
            rows.emplace_back(r.begin(), r.end());
        }
        return TargetFactors::sparse(t.num_dims(), std::move(rows));
    }
    std::vector<double> data;
    data.reserve(keep * t.num_dims());
    for (auto y : ids) {
        const auto r = t.dense_row(static_cast<TargetId>(y));
        data.insert(data.end(), r.begin(), r.end());
    }
    return TargetFactors::dense(keep, t.num_dims(), std::move(data));
}

std::vector<QueryVector> draw_queries(const BenchConfig& cfg, const Instance& inst, std::mt19937_64& rng) {
    std::vector<QueryVector> out;
    out.reserve(cfg.queries_per_cell);
    const auto dims = inst.targets.num_dims();
    if (inst.query_pool.rows > 0) {
        std::uniform_int_distribution<std::size_t> pick(0, inst.query_pool.rows - 1);
        for (std::size_t q = 0; q < cfg.queries_per_cell; ++q) {
            const auto row = inst.query_pool.row(pick(rng));
            out.emplace_back(std::vector<double>(row.begin(), row.end()));
        }
        return out;
    }
    while (out.size() < cfg.queries_per_cell) {
        auto row = draw_row(cfg.dataset, dims, cfg.density, rng);
        if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) continue;
        out.emplace_back(std::move(row));
    }
    return out;
}

void run_cells(const BenchConfig& cfg, const Instance& base, std::vector<BenchRecord>& records) {
    const auto dataset = std::string(to_string(cfg.dataset));
    for (std::size_t fi = 0; fi < cfg.fractions.size(); ++fi) {
        const double fraction = cfg.fractions[fi];
        auto rng = make_rng(cfg.seed, {base.targets.num_targets(), base.targets.num_dims(), fi + 1});
        Instance inst{subsample(base.targets, fraction, rng), base.query_pool};
        const auto idx = build_index(inst.targets);
        const auto queries = draw_queries(cfg, inst, rng);
        const auto m = inst.targets.num_targets();

        for (auto k : cfg.k_values) {
            for (auto algo : cfg.algorithms) {
                for (std::size_t q = 0; q < queries.size(); ++q) {
                    const auto res = run_topk(algo, queries[q], idx, inst.targets, k, cfg.budget);
                    BenchRecord rec{dataset,
                                    m,
                                    inst.targets.num_dims(),
                                    k,
                                    fraction,
                                    algo,
                                    q,
                                    res.stats,
                                    static_cast<double>(res.stats.full_scores_computed) / static_cast<double>(m),
                                    res.exact};
                    if (!cfg.record_time) rec.stats.wall_time_ns = 0;
                    records.push_back(std::move(rec));
                }
            }
        }
    }
}

}  // namespace

std::string_view to_string(DatasetKind d) noexcept {
    switch (d) {
        case DatasetKind::Gaussian: return "gaussian";
        case DatasetKind::UniformNonneg: return "uniform-nonneg";
        case DatasetKind::Sparse: return "sparse";
        case DatasetKind::Factors: return "factors";
        case DatasetKind::Matrix: return "matrix";
    }
    return "unknown";
}

void BenchConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ContractViolation("bench config: " + msg); };
    const bool synthetic = dataset == DatasetKind::Gaussian || dataset == DatasetKind::UniformNonneg ||
                           dataset == DatasetKind::Sparse;
    if (synthetic) {
        if (num_targets.empty() || num_dims.empty()) fail("num_targets and num_dims must be non-empty");
        for (auto m : num_targets) {
            if (m == 0) fail("num_targets must be positive");
        }
        for (auto r : num_dims) {
            if (r == 0) fail("num_dims must be positive");
        }
    }
    if (dataset == DatasetKind::Sparse && !(density > 0.0 && density <= 1.0)) fail("density must be in (0, 1]");
    if (dataset == DatasetKind::Factors && (factors_u.empty() || factors_t.empty())) {
        fail("factors dataset needs factors_u and factors_t");
    }
    if (dataset == DatasetKind::Matrix && (matrix.empty() || rank == 0 || iterations == 0)) {
        fail("matrix dataset needs matrix, rank >= 1 and iterations >= 1");
    }
    if (k_values.empty() || algorithms.empty() || fractions.empty()) fail("k, algorithms and fractions must be non-empty");
    for (auto k : k_values) {
        if (k == 0) fail("K must be positive");
    }
    for (auto f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) fail("fractions must lie in (0, 1]");
    }
    if (queries_per_cell == 0) fail("queries must be positive");
    if (budget == 0) fail("budget must be positive");
    if (dataset == DatasetKind::Sparse &&
        std::find(algorithms.begin(), algorithms.end(), Algorithm::Fagin) != algorithms.end()) {
        fail("fagin is not supported on sparse data");
    }
}

BenchConfig parse_bench_config(std::istream& in) {
    BenchConfig cfg;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));

        if (key == "dataset") {
            bool found = false;
            for (auto d : {DatasetKind::Gaussian, DatasetKind::UniformNonneg, DatasetKind::Sparse,
                           DatasetKind::Factors, DatasetKind::Matrix}) {
                if (value == to_string(d)) {
                    cfg.dataset = d;
                    found = true;
                }
            }
            if (!found) throw ParseError("unknown dataset \"" + std::string(value) + "\"", line_no);
        } else if (key == "num_targets") {
            cfg.num_targets = parse_values<std::size_t>(key, value, line_no);
        } else if (key == "num_dims") {
            cfg.num_dims = parse_values<std::size_t>(key, value, line_no);
        } else if (key == "density") {
            cfg.density = parse_value<double>(key, value, line_no);
        } else if (key == "k") {
            cfg.k_values = parse_values<std::size_t>(key, value, line_no);
        } else if (key == "algorithms") {
            cfg.algorithms.clear();
            for (auto name : split_list(value)) {
                const auto a = parse_algorithm(name);
                if (!a) throw ParseError("unknown algorithm \"" + std::string(name) + "\"", line_no);
                cfg.algorithms.push_back(*a);
            }
        } else if (key == "queries") {
            cfg.queries_per_cell = parse_value<std::size_t>(key, value, line_no);
        } else if (key == "seed") {
            cfg.seed = parse_value<std::uint64_t>(key, value, line_no);
        } else if (key == "fractions") {
            cfg.fractions = parse_values<double>(key, value, line_no);
        } else if (key == "budget") {
            cfg.budget = parse_value<std::size_t>(key, value, line_no);
        } else if (key == "timing") {
            cfg.record_time = parse_bool(key, value, line_no);
        } else if (key == "factors_u") {
            cfg.factors_u = std::string(value);
        } else if (key == "factors_t") {
            cfg.factors_t = std::string(value);
        } else if (key == "matrix") {
            cfg.matrix = std::string(value);
        } else if (key == "rank") {
            cfg.rank = parse_value<std::size_t>(key, value, line_no);
        } else if (key == "iterations") {
            cfg.iterations = parse_value<std::size_t>(key, value, line_no);
        } else if (key == "transform") {
            if (value == "none") cfg.transform = ValueTransform::None;
            else if (value == "log") cfg.transform = ValueTransform::Log;
            else if (value == "log1p") cfg.transform = ValueTransform::Log1p;
            else throw ParseError("transform must be none, log or log1p", line_no);
        } else if (key == "feedback") {
            if (value == "explicit") cfg.feedback = Feedback::Explicit;
            else if (value == "implicit") cfg.feedback = Feedback::Implicit;
            else throw ParseError("feedback must be explicit or implicit", line_no);
        } else {
            throw ParseError("unknown key \"" + std::string(key) + "\"", line_no);
        }
    }
    cfg.validate();
    return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_bench_config(in);
}

std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
    cfg.validate();
    std::vector<BenchRecord> records;
    if (cfg.dataset == DatasetKind::Factors || cfg.dataset == DatasetKind::Matrix) {
        run_cells(cfg, file_instance(cfg), records);
        return records;
    }
    for (auto m : cfg.num_targets) {
        for (auto dims : cfg.num_dims) run_cells(cfg, synthetic_instance(cfg, m, dims), records);
    }
    return records;
}

void write_csv(std::ostream& out, std::span<const BenchRecord> records) {
    std::string buf(kBenchCsvHeader);
    buf += '\n';
    for (const auto& r : records) {
        buf += r.dataset;
        for (auto v : {r.num_targets, r.num_dims, r.k}) {
            buf += ',';
            buf += std::to_string(v);
        }
        buf += ',';
        append_double(buf, r.fraction);
        buf += ',';
        buf += to_string(r.algorithm);
        for (std::uint64_t v : {static_cast<std::uint64_t>(r.query_index), r.stats.full_scores_computed,
                                r.stats.partial_terms_computed, r.stats.depth_reached}) {
            buf += ',';
            buf += std::to_string(v);
        }
        buf += ',';
        append_double(buf, r.relative_scores);
        buf += ',';
        buf += std::to_string(r.stats.wall_time_ns);
        buf += '\n';
    }
    out << buf;
}

void emit_csv(std::span<const BenchRecord> records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_csv(out, records);
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace slr
