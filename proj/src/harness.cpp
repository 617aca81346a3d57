#include "prefmcts/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "prefmcts/hmcts.hpp"
#include "prefmcts/pbmcts.hpp"
#include "prefmcts/puzzle_env.hpp"

namespace prefmcts::harness {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos)
            break;
        pos = next + 1;
    }
    return parts;
}

template <class T>
bool parse_number(std::string_view s, T& out)
{
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

// Integers in grid files may be written in scientific notation ("1e5").
bool parse_count(std::string_view s, std::uint64_t& out)
{
    if (parse_number(s, out))
        return true;
    double d = 0.0;
    if (!parse_number(s, d) || !(d >= 0.0) || d > 1.8e19 || std::floor(d) != d)
        return false;
    out = static_cast<std::uint64_t>(d);
    return true;
}

std::string format_tradeoff(double x)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 1);
    return std::string(buf, ptr);
}

std::string format_rate(double x)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

bool one_decimal(double x)
{
    double back = 0.0;
    return parse_number(format_tradeoff(x), back) && back == x;
}

// Win rate of each (rollout, trade-off) configuration at each budget.
std::map<std::uint64_t, std::vector<double>> rates_by_budget(const std::vector<RunRecord>& records, Algorithm algorithm)
{
    std::map<std::tuple<std::uint64_t, std::uint32_t, double>, std::pair<std::uint64_t, std::uint64_t>> tally;
    for (const RunRecord& r : records) {
        if (r.algorithm != algorithm)
            continue;
        auto& [wins, runs] = tally[{r.budget, r.rollout_len, r.tradeoff}];
        wins += r.win ? 1 : 0;
        ++runs;
    }
    if (tally.empty())
        throw EmptyInputError("no records for algorithm " + std::string(to_string(algorithm)));
    std::map<std::uint64_t, std::vector<double>> rates;
    for (const auto& [key, count] : tally)
        rates[std::get<0>(key)].push_back(static_cast<double>(count.first) / static_cast<double>(count.second));
    return rates;
}

}  // namespace

std::string_view to_string(Algorithm a) noexcept { return a == Algorithm::hmcts ? "hmcts" : "pbmcts"; }

Algorithm parse_algorithm(std::string_view s)
{
    s = trim(s);
    if (s == "hmcts")
        return Algorithm::hmcts;
    if (s == "pbmcts")
        return Algorithm::pbmcts;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

void SweepGrid::validate() const
{
    if (algorithms.empty() || rollout_lengths.empty() || tradeoffs.empty() || budgets.empty())
        throw GridError("grid lists must be nonempty");
    if (runs < 1)
        throw GridError("runs must be at least 1");
    for (double t : tradeoffs)
        if (!(t > 0.0) || !one_decimal(t))
            throw GridError("trade-off values must be positive with one decimal, got " + std::to_string(t));
    for (auto b : budgets)
        if (b == 0)
            throw GridError("budgets must be positive");
    if (!start.fixed && start.distance && (*start.distance < 0 || *start.distance > puzzle8::kDiameter))
        throw GridError("start distance must lie in [0, 31]");
}

SweepGrid parse_grid(std::string_view text)
{
    SweepGrid grid;
    std::size_t line_no = 0;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw GridError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto bad = [&] {
            return GridError("line " + std::to_string(line_no) + ": bad value for '" + std::string(key) + "'");
        };
        const auto items = split(value, ',');

        if (key == "algorithms" || key == "algo") {
            grid.algorithms.clear();
            for (auto item : items) {
                try {
                    grid.algorithms.push_back(parse_algorithm(item));
                } catch (const std::invalid_argument&) {
                    throw bad();
                }
            }
        } else if (key == "rollouts" || key == "rollout_lens") {
            grid.rollout_lengths.clear();
            for (auto item : items) {
                std::uint32_t v = 0;
                if (!parse_number(item, v))
                    throw bad();
                grid.rollout_lengths.push_back(v);
            }
        } else if (key == "tradeoffs") {
            grid.tradeoffs.clear();
            for (auto item : items) {
                double v = 0.0;
                if (!parse_number(item, v))
                    throw bad();
                grid.tradeoffs.push_back(v);
            }
        } else if (key == "budgets") {
            grid.budgets.clear();
            for (auto item : items) {
                std::uint64_t v = 0;
                if (!parse_count(item, v))
                    throw bad();
                grid.budgets.push_back(v);
            }
        } else if (key == "runs") {
            std::uint64_t v = 0;
            if (!parse_count(value, v) || v > UINT32_MAX)
                throw bad();
            grid.runs = static_cast<std::uint32_t>(v);
        } else if (key == "max_steps") {
            if (!parse_number(value, grid.max_steps))
                throw bad();
        } else if (key == "seed") {
            if (!parse_number(value, grid.master_seed))
                throw bad();
        } else if (key == "start") {
            if (value == "random") {
                grid.start.fixed.reset();
            } else {
                try {
                    grid.start.fixed = puzzle8::parse_board(value);
                } catch (const puzzle8::MalformedBoard&) {
                    throw bad();
                }
            }
        } else if (key == "distance") {
            if (value == "any") {
                grid.start.distance.reset();
            } else {
                int d = 0;
                if (!parse_number(value, d))
                    throw bad();
                grid.start.distance = d;
            }
        } else {
            throw GridError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
    }
    grid.validate();
    return grid;
}

SweepGrid load_grid(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw GridError("cannot open grid file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_grid(text.str());
}

std::uint64_t episode_seed(std::uint64_t master_seed, const RunConfig& cfg, std::uint32_t episode)
{
    const auto tradeoff_key = static_cast<std::uint64_t>(std::llround(cfg.tradeoff * 1000.0));
    return derive_seed({master_seed, hash_label(to_string(cfg.algorithm)), cfg.rollout_len, tradeoff_key, cfg.budget,
                        episode});
}

puzzle8::Board episode_start(const StartPolicy& policy, std::uint64_t master_seed, std::uint32_t episode)
{
    if (policy.fixed)
        return *policy.fixed;
    RngStream rng(derive_seed({master_seed, hash_label("start"), episode}));
    puzzle8::RandomStartOptions opts;
    if (policy.distance) {
        opts.distance = policy.distance;
        opts.table = &puzzle8::default_distance_table();
    }
    return puzzle8::random_solvable(rng, opts);
}

RunRecord run_episode(const RunConfig& cfg, std::uint32_t episode, std::uint64_t seed, const puzzle8::Board& start,
                      std::uint32_t max_steps)
{
    const PuzzleEnv env(start);
    EpisodeResult<puzzle8::Move> result;
    if (cfg.algorithm == Algorithm::hmcts) {
        HMctsAgent<PuzzleEnv> agent(env, HConfig{cfg.tradeoff, cfg.rollout_len});
        result = play_episode(agent, env, max_steps, cfg.budget, seed);
    } else {
        PbMctsAgent<PuzzleEnv> agent(env, PBConfig{cfg.tradeoff, cfg.rollout_len});
        result = play_episode(agent, env, max_steps, cfg.budget, seed);
    }
    RunRecord rec;
    rec.algorithm = cfg.algorithm;
    rec.rollout_len = cfg.rollout_len;
    rec.tradeoff = cfg.tradeoff;
    rec.budget = cfg.budget;
    rec.episode = episode;
    rec.seed = seed;
    rec.start = puzzle8::format_board(start);
    rec.win = result.win;
    rec.moves = result.moves_played;
    rec.samples_used = result.total_samples();
    return rec;
}

std::vector<RunConfig> expand_grid(const SweepGrid& grid)
{
    std::vector<RunConfig> configs;
    for (Algorithm a : grid.algorithms)
        for (auto len : grid.rollout_lengths)
            for (double t : grid.tradeoffs)
                for (auto b : grid.budgets)
                    configs.push_back({a, len, t, b});
    return configs;
}

std::vector<RunRecord> run_sweep(const SweepGrid& grid, unsigned workers, const ProgressCallback& progress)
{
    grid.validate();
    const auto configs = expand_grid(grid);
    std::vector<puzzle8::Board> starts;
    starts.reserve(grid.runs);
    for (std::uint32_t e = 0; e < grid.runs; ++e)
        starts.push_back(episode_start(grid.start, grid.master_seed, e));

    const std::size_t total = configs.size() * grid.runs;
    std::vector<RunRecord> records(total);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mutex;
    std::size_t done = 0;
    std::size_t first_error = total;
    std::string error_message;

    const auto work = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t item = next.fetch_add(1);
            if (item >= total)
                return;
            const RunConfig& cfg = configs[item / grid.runs];
            const auto episode = static_cast<std::uint32_t>(item % grid.runs);
            try {
                records[item] = run_episode(cfg, episode, episode_seed(grid.master_seed, cfg, episode),
                                            starts[episode], grid.max_steps);
            } catch (const std::exception& e) {
                std::lock_guard lock(mutex);
                if (item < first_error) {
                    first_error = item;
                    error_message = std::string(to_string(cfg.algorithm)) + " rollout=" +
                                    std::to_string(cfg.rollout_len) + " tradeoff=" + format_tradeoff(cfg.tradeoff) +
                                    " budget=" + std::to_string(cfg.budget) + " episode=" + std::to_string(episode) +
                                    ": " + e.what();
                }
                failed = true;
                return;
            }
            if (progress) {
                std::lock_guard lock(mutex);
                progress(++done, total);
            }
        }
    };

    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (failed)
        throw SweepError("episode failed (" + error_message + ")");
    return records;
}

std::vector<ReportRow> max_curve(const std::vector<RunRecord>& records, Algorithm algorithm)
{
    std::vector<ReportRow> rows;
    for (const auto& [budget, rates] : rates_by_budget(records, algorithm))
        rows.push_back({budget, "max", *std::max_element(rates.begin(), rates.end())});
    return rows;
}

std::string percentile_label(double level) { return "p" + std::to_string(std::lround(level * 100.0)); }

std::vector<ReportRow> percentile_curves(const std::vector<RunRecord>& records, Algorithm algorithm,
                                         const std::vector<double>& levels)
{
    auto by_budget = rates_by_budget(records, algorithm);
    for (auto& [budget, rates] : by_budget)
        std::sort(rates.begin(), rates.end());
    std::vector<ReportRow> rows;
    for (double level : levels) {
        for (const auto& [budget, rates] : by_budget) {
            const auto k = static_cast<double>(rates.size());
            auto rank = static_cast<std::size_t>(std::ceil(level * k - 1e-9));
            rank = std::clamp<std::size_t>(rank, 1, rates.size());
            rows.push_back({budget, percentile_label(level), rates[rank - 1]});
        }
    }
    return rows;
}

void write_csv(const std::vector<RunRecord>& records, std::ostream& out)
{
    out << kCsvHeader << '\n';
    for (const RunRecord& r : records) {
        out << to_string(r.algorithm) << ',' << r.rollout_len << ',' << format_tradeoff(r.tradeoff) << ',' << r.budget
            << ',' << r.episode << ',' << r.seed << ',' << r.start << ',' << (r.win ? 1 : 0) << ',' << r.moves << ','
            << r.samples_used << '\n';
    }
}

void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(records, out);
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

std::vector<RunRecord> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw SchemaError("missing CSV header");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split(line, ',');
    const auto expected = split(kCsvHeader, ',');
    std::vector<std::size_t> column(expected.size());
    for (std::size_t c = 0; c < expected.size(); ++c) {
        const auto it = std::find(header.begin(), header.end(), expected[c]);
        if (it == header.end())
            throw SchemaError("missing column '" + std::string(expected[c]) + "'");
        column[c] = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<RunRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split(line, ',');
        const auto bad = [&](std::string_view what) {
            return SchemaError("line " + std::to_string(line_no) + ": " + std::string(what));
        };
        if (fields.size() != header.size())
            throw bad("expected " + std::to_string(header.size()) + " fields");
        const auto field = [&](std::size_t c) { return fields[column[c]]; };

        RunRecord r;
        try {
            r.algorithm = parse_algorithm(field(0));
        } catch (const std::invalid_argument&) {
            throw bad("bad algo");
        }
        if (!parse_number(field(1), r.rollout_len))
            throw bad("bad rollout_len");
        if (!parse_number(field(2), r.tradeoff))
            throw bad("bad tradeoff");
        if (!parse_number(field(3), r.budget))
            throw bad("bad budget");
        if (!parse_number(field(4), r.episode))
            throw bad("bad episode");
        if (!parse_number(field(5), r.seed))
            throw bad("bad seed");
        r.start = std::string(trim(field(6)));
        try {
            (void)puzzle8::parse_board(r.start);
        } catch (const puzzle8::MalformedBoard&) {
            throw bad("bad start board");
        }
        const auto win = trim(field(7));
        if (win != "0" && win != "1")
            throw bad("win must be 0 or 1");
        r.win = win == "1";
        if (!parse_number(field(8), r.moves))
            throw bad("bad moves");
        if (!parse_number(field(9), r.samples_used))
            throw bad("bad samples_used");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<RunRecord> read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return read_csv(in);
}

void emit_plot_data(const std::vector<ReportRow>& rows, std::ostream& out)
{
    if (rows.empty())
        throw EmptyInputError("no report rows to emit");
    std::vector<std::string> labels;
    for (const auto& r : rows)
        if (std::find(labels.begin(), labels.end(), r.label) == labels.end())
            labels.push_back(r.label);
    for (const auto& label : labels) {
        out << "#label " << label << '\n';
        for (const auto& r : rows)
            if (r.label == label)
                out << r.budget << '\t' << format_rate(r.win_rate) << '\n';
    }
}

void emit_plot_data(const std::vector<ReportRow>& rows, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    emit_plot_data(rows, out);
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

std::vector<ReportRow> read_plot_data(std::istream& in)
{
    std::vector<ReportRow> rows;
    std::optional<std::string> label;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        if (line.rfind("#label ", 0) == 0) {
            label = line.substr(7);
            continue;
        }
        const auto fields = split(line, '\t');
        ReportRow row;
        if (!label || fields.size() != 2 || !parse_number(fields[0], row.budget) ||
            !parse_number(fields[1], row.win_rate))
            throw SchemaError("plot data line " + std::to_string(line_no) + " is malformed");
        row.label = *label;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace prefmcts::harness
