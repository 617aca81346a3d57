#ifndef PREFMCTS_HARNESS_HPP
#define PREFMCTS_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prefmcts/puzzle8.hpp"
#include "prefmcts/search_core.hpp"

namespace prefmcts::harness {

enum class Algorithm { hmcts, pbmcts };

std::string_view to_string(Algorithm a) noexcept;
/// Throws std::invalid_argument on anything but "hmcts" / "pbmcts".
Algorithm parse_algorithm(std::string_view s);

/// Grid file could not be parsed or describes an invalid grid.
class GridError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// CSV or plot file does not match the expected layout.
class SchemaError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Aggregation asked for over no data.
class EmptyInputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// How episode start boards are chosen. A fixed board wins over the random policy.
struct StartPolicy
{
    std::optional<puzzle8::Board> fixed;
    /// Random solvable board at this optimal distance; unset = any solvable board.
    std::optional<int> distance = 20;
};

struct SweepGrid
{
    std::vector<Algorithm> algorithms{Algorithm::hmcts, Algorithm::pbmcts};
    std::vector<std::uint32_t> rollout_lengths{5, 10, 25, 50};
    std::vector<double> tradeoffs{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<std::uint64_t> budgets{100,    200,    500,     1000,    2500,    5000,    10000,  20000,
                                       50000,  100000, 200000,  500000,  1000000, 2000000, 5000000};
    std::uint32_t runs = 100;
    StartPolicy start;
    std::uint64_t master_seed = 0;
    std::uint32_t max_steps = kDefaultMaxSteps;

    /// Throws GridError when a list is empty or a value is out of range.
    void validate() const;
};

/// `key = value` lines, comma-separated lists, '#' comments. Keys: algorithms,
/// rollouts, tradeoffs, budgets, runs, start (random | 9 digits), distance
/// (int | any), seed, max_steps. Missing keys keep their defaults.
SweepGrid parse_grid(std::string_view text);
SweepGrid load_grid(const std::filesystem::path& path);

struct RunConfig
{
    Algorithm algorithm = Algorithm::pbmcts;
    std::uint32_t rollout_len = 10;
    double tradeoff = 0.5;
    std::uint64_t budget = 1000;

    bool operator==(const RunConfig&) const = default;
};

struct RunRecord
{
    Algorithm algorithm = Algorithm::pbmcts;
    std::uint32_t rollout_len = 0;
    double tradeoff = 0.0;
    std::uint64_t budget = 0;
    std::uint32_t episode = 0;
    std::uint64_t seed = 0;
    std::string start;
    bool win = false;
    std::uint32_t moves = 0;
    std::uint64_t samples_used = 0;

    RunConfig config() const { return {algorithm, rollout_len, tradeoff, budget}; }
    bool operator==(const RunRecord&) const = default;
};

/// Seed of one episode; depends only on the master seed, the configuration and the episode index.
std::uint64_t episode_seed(std::uint64_t master_seed, const RunConfig& cfg, std::uint32_t episode);

/// Start board of episode `episode`; shared by every configuration of a sweep.
puzzle8::Board episode_start(const StartPolicy& policy, std::uint64_t master_seed, std::uint32_t episode);

/// Plays one episode. Reproducible from (cfg, seed, start).
RunRecord run_episode(const RunConfig& cfg, std::uint32_t episode, std::uint64_t seed, const puzzle8::Board& start,
                      std::uint32_t max_steps = kDefaultMaxSteps);

/// Thrown when an episode fails; the message names the configuration and episode.
class SweepError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// All configurations of the grid, in canonical order (algorithm, rollout, trade-off, budget).
std::vector<RunConfig> expand_grid(const SweepGrid& grid);

/**
 * Runs every (configuration, episode) of the grid on `workers` threads.
 * Records come back in canonical order whatever the worker count.
 */
std::vector<RunRecord> run_sweep(const SweepGrid& grid, unsigned workers = 1, const ProgressCallback& progress = {});

struct ReportRow
{
    std::uint64_t budget = 0;
    std::string label;
    double win_rate = 0.0;

    bool operator==(const ReportRow&) const = default;
};

/// Per budget, the best configuration's win rate. Label "max".
std::vector<ReportRow> max_curve(const std::vector<RunRecord>& records, Algorithm algorithm);

inline const std::vector<double> kPercentileLevels{1.0, 0.8, 0.6, 0.4, 0.2, 0.0};

/// Label of a percentile level, e.g. 0.8 -> "p80".
std::string percentile_label(double level);

/**
 * Per budget and level, the nearest-rank quantile of the per-configuration
 * win rates: with k rates sorted ascending, the value at 1-based rank
 * max(1, ceil(level * k)). Rows are ordered by level, then budget.
 */
std::vector<ReportRow> percentile_curves(const std::vector<RunRecord>& records, Algorithm algorithm,
                                         const std::vector<double>& levels = kPercentileLevels);

inline constexpr std::string_view kCsvHeader = "algo,rollout_len,tradeoff,budget,episode,seed,start,win,moves,samples_used";

void write_csv(const std::vector<RunRecord>& records, std::ostream& out);
void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
/// Throws SchemaError naming a missing column or the offending line.
std::vector<RunRecord> read_csv(std::istream& in);
std::vector<RunRecord> read_csv(const std::filesystem::path& path);

/// Tab-separated "budget<TAB>value" lines, each curve introduced by "#label <name>".
void emit_plot_data(const std::vector<ReportRow>& rows, std::ostream& out);
void emit_plot_data(const std::vector<ReportRow>& rows, const std::filesystem::path& path);
std::vector<ReportRow> read_plot_data(std::istream& in);

}  // namespace prefmcts::harness

#endif  // PREFMCTS_HARNESS_HPP
