#include "prefmcts/cli.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "prefmcts/harness.hpp"
#include "prefmcts/hmcts.hpp"
#include "prefmcts/pbmcts.hpp"
#include "prefmcts/puzzle_env.hpp"

namespace prefmcts::cli {

namespace {

struct Options
{
    std::string algo = "pbmcts";
    std::string board;
    bool random_start = false;
    int distance = 20;
    std::uint64_t budget = 10000;
    std::uint32_t rollout = 10;
    double tradeoff = 0.5;
    std::uint64_t seed = 0;
    std::string grid;
    std::string in;
    std::string out;
    unsigned workers = 1;
    std::string mode = "max";
};

/// Bad flag value outside the documented range.
struct RangeError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

harness::Algorithm checked_algorithm(const std::string& name)
{
    try {
        return harness::parse_algorithm(name);
    } catch (const std::invalid_argument& e) {
        throw RangeError(e.what());
    }
}

void check_search_flags(const Options& o)
{
    (void)checked_algorithm(o.algo);
    if (o.budget == 0)
        throw RangeError("--budget must be positive");
    if (o.rollout != 5 && o.rollout != 10 && o.rollout != 25 && o.rollout != 50)
        throw RangeError("--rollout must be one of 5, 10, 25, 50");
    if (!(o.tradeoff > 0.0))
        throw RangeError("--tradeoff must be positive");
}

void print_samples(std::ostream& out, const std::vector<std::uint64_t>& samples)
{
    out << "samples_per_move:";
    for (auto s : samples)
        out << ' ' << s;
    out << '\n';
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err)
{
    check_search_flags(o);
    const puzzle8::Board board = puzzle8::parse_board(o.board);
    if (puzzle8::is_goal(board)) {
        out << "already solved\n";
        return kExitOk;
    }
    if (!puzzle8::is_solvable(board))
        err << "warning: board " << o.board << " cannot reach the goal\n";

    const PuzzleEnv env(board);
    Budget budget{o.budget, 0};
    RngStream rng(o.seed);
    if (checked_algorithm(o.algo) == harness::Algorithm::hmcts) {
        const auto r = h_search(board, env, HConfig{o.tradeoff, o.rollout}, budget, rng);
        out << "move: " << puzzle8::to_string(r.action) << '\n'
            << "samples: " << r.samples_used << '\n'
            << "iterations: " << r.iterations << '\n';
        for (std::size_t j = 0; j < r.actions.size(); ++j) {
            const auto& s = r.root_stats[j];
            out << "  " << std::left << std::setw(6) << puzzle8::to_string(r.actions[j]) << " visits " << s.pulls
                << " mean " << std::fixed << std::setprecision(4) << (s.pulls ? s.mean() : 0.0) << '\n';
        }
    } else {
        const auto r = pb_search(board, env, PBConfig{o.tradeoff, o.rollout}, budget, rng);
        out << "move: " << puzzle8::to_string(r.action) << '\n'
            << "samples: " << r.samples_used << '\n'
            << "iterations: " << r.iterations << '\n'
            << "root wins (row beats column):\n";
        const auto scores = copeland_scores(r.root_wins);
        for (std::size_t i = 0; i < r.actions.size(); ++i) {
            out << "  " << std::left << std::setw(6) << puzzle8::to_string(r.actions[i]);
            for (std::size_t j = 0; j < r.actions.size(); ++j)
                out << ' ' << std::right << std::setw(8) << std::fixed << std::setprecision(1) << r.root_wins(i, j);
            out << "  copeland " << scores[i] << '\n';
        }
    }
    return kExitOk;
}

int cmd_episode(const Options& o, std::ostream& out, std::ostream& err)
{
    check_search_flags(o);
    if (o.board.empty() == !o.random_start)
        throw CLI::ValidationError("episode", "exactly one of --board and --random is required");
    puzzle8::Board board;
    if (o.random_start) {
        if (o.distance < 0 || o.distance > puzzle8::kDiameter)
            throw RangeError("--distance must lie in [0, 31]");
        harness::StartPolicy policy;
        policy.distance = o.distance;
        board = harness::episode_start(policy, o.seed, 0);
    } else {
        board = puzzle8::parse_board(o.board);
    }
    if (!puzzle8::is_solvable(board))
        err << "warning: board " << puzzle8::format_board(board) << " cannot reach the goal\n";

    const harness::RunConfig cfg{checked_algorithm(o.algo), o.rollout, o.tradeoff, o.budget};
    const PuzzleEnv env(board);
    EpisodeResult<puzzle8::Move> result;
    if (cfg.algorithm == harness::Algorithm::hmcts) {
        HMctsAgent<PuzzleEnv> agent(env, HConfig{o.tradeoff, o.rollout});
        result = play_episode(agent, env, kDefaultMaxSteps, o.budget, o.seed);
    } else {
        PbMctsAgent<PuzzleEnv> agent(env, PBConfig{o.tradeoff, o.rollout});
        result = play_episode(agent, env, kDefaultMaxSteps, o.budget, o.seed);
    }
    out << "start: " << puzzle8::format_board(board) << '\n'
        << "result: " << (result.win ? "win" : "loss") << '\n'
        << "moves: " << result.moves_played << '\n'
        << "samples: " << result.total_samples() << '\n';
    out << "path:";
    for (auto m : result.actions)
        out << ' ' << puzzle8::to_string(m);
    out << '\n';
    print_samples(out, result.samples_per_move);
    return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err)
{
    const harness::SweepGrid grid = harness::load_grid(o.grid);
    const auto records = harness::run_sweep(grid, o.workers, [&](std::size_t done, std::size_t total) {
        if (done == total || done % 100 == 0)
            err << "\r" << done << "/" << total << " episodes" << (done == total ? "\n" : "") << std::flush;
    });
    harness::write_csv(records, std::filesystem::path(o.out));
    std::size_t wins = 0;
    for (const auto& r : records)
        wins += r.win;
    out << "episodes: " << records.size() << '\n' << "wins: " << wins << '\n' << "csv: " << o.out << '\n';
    return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream&)
{
    if (o.mode != "max" && o.mode != "percentiles")
        throw RangeError("--mode must be max or percentiles");
    const auto records = harness::read_csv(std::filesystem::path(o.in));
    if (records.empty())
        throw harness::EmptyInputError("no records in " + o.in);

    std::vector<harness::Algorithm> algorithms;
    if (!o.algo.empty()) {
        algorithms.push_back(checked_algorithm(o.algo));
    } else {
        for (auto a : {harness::Algorithm::hmcts, harness::Algorithm::pbmcts})
            for (const auto& r : records)
                if (r.algorithm == a) {
                    algorithms.push_back(a);
                    break;
                }
    }

    std::vector<harness::ReportRow> rows;
    for (auto a : algorithms) {
        auto curve = o.mode == "max" ? harness::max_curve(records, a) : harness::percentile_curves(records, a);
        for (auto& row : curve) {
            row.label = std::string(harness::to_string(a)) + ":" + row.label;
            rows.push_back(std::move(row));
        }
    }
    if (o.out.empty())
        harness::emit_plot_data(rows, out);
    else
        harness::emit_plot_data(rows, std::filesystem::path(o.out));
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Heuristic and preference-based MCTS on the 8-puzzle", "prefmcts"};
    app.require_subcommand(1);

    const auto add_search_flags = [&o](CLI::App* cmd) {
        cmd->add_option("--algo", o.algo, "hmcts or pbmcts");
        cmd->add_option("--budget", o.budget, "transition samples per move");
        cmd->add_option("--rollout", o.rollout, "rollout depth limit: 5, 10, 25 or 50");
        cmd->add_option("--tradeoff", o.tradeoff, "C_p for hmcts, alpha-hat for pbmcts");
        cmd->add_option("--seed", o.seed, "random seed");
    };

    auto* solve = app.add_subcommand("solve", "choose one move for a board");
    solve->add_option("--board", o.board, "9 digits, row-major, 0 = blank")->required();
    add_search_flags(solve);

    auto* episode = app.add_subcommand("episode", "play one episode (at most 100 moves)");
    episode->add_option("--board", o.board, "9 digits, row-major, 0 = blank");
    episode->add_flag("--random", o.random_start, "random solvable start drawn from --seed");
    episode->add_option("--distance", o.distance, "optimal distance of the random start");
    add_search_flags(episode);

    auto* sweep = app.add_subcommand("sweep", "run a hyperparameter sweep");
    sweep->add_option("--grid", o.grid, "grid file (key = value lines)")->required();
    sweep->add_option("--out", o.out, "output CSV")->required();
    sweep->add_option("--workers", o.workers, "worker threads (0 = all cores)");

    auto* report = app.add_subcommand("report", "aggregate a sweep CSV into curves");
    report->add_option("--in", o.in, "sweep CSV")->required();
    report->add_option("--mode", o.mode, "max or percentiles");
    report->add_option("--out", o.out, "plot data file (default: stdout)");
    report->add_option("--algo", o.algo, "restrict to one algorithm");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    }

    // The report subcommand has no default algorithm.
    if (report->parsed() && report->count("--algo") == 0)
        o.algo.clear();

    try {
        if (solve->parsed())
            return cmd_solve(o, out, err);
        if (episode->parsed())
            return cmd_episode(o, out, err);
        if (sweep->parsed())
            return cmd_sweep(o, out, err);
        return cmd_report(o, out, err);
    } catch (const RangeError& e) {
        err << "error: " << e.what() << '\n';
        return kExitRange;
    } catch (const puzzle8::MalformedBoard& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const harness::GridError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const harness::SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const harness::EmptyInputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        // I/O failures and other data problems.
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace prefmcts::cli
