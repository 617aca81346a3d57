#ifndef PREFMCTS_PUZZLE_ENV_HPP
#define PREFMCTS_PUZZLE_ENV_HPP

#include <algorithm>
#include <functional>

#include "prefmcts/puzzle8.hpp"
#include "prefmcts/search_core.hpp"

namespace prefmcts {

/// The 8-puzzle as a deterministic episodic environment. Winning = reaching the goal.
class PuzzleEnv
{
public:
    using State = puzzle8::Board;
    using Action = puzzle8::Move;
    /// Strictly increasing map applied to the mdc estimate before it is used.
    using Transform = std::function<double(double)>;

    explicit PuzzleEnv(const puzzle8::Board& start, const puzzle8::Goal& goal = puzzle8::default_goal(),
                       Transform transform = {})
        : start_(start), goal_(goal), transform_(std::move(transform))
    {}

    State start() const noexcept { return start_; }
    const puzzle8::Goal& goal() const noexcept { return goal_; }

    puzzle8::MoveList actions(const State& s) const noexcept { return puzzle8::legal_moves(s); }

    State sample_transition(const State& s, Action a, RngStream&) const noexcept
    {
        return puzzle8::apply_legal_move(s, a);
    }

    bool is_terminal(const State& s) const noexcept { return puzzle8::is_goal(s, goal_); }
    double terminal_reward(const State&) const noexcept { return 1.0; }

    /// Distance-to-go estimate: mdc, passed through the transform when one is set.
    double distance_estimate(const State& s) const
    {
        const double h = puzzle8::mdc(s, goal_);
        return transform_ ? transform_(h) : h;
    }

    /// 1 - min(estimate, 40) / 41 on non-goal states; equals heuristic_value without a transform.
    double heuristic_numeric(const State& s) const
    {
        if (is_terminal(s))
            return 1.0;
        const double h = std::min(distance_estimate(s), static_cast<double>(puzzle8::kHeuristicCap));
        return 1.0 - h / (puzzle8::kHeuristicCap + 1);
    }

    OrdinalKey heuristic_ordinal(const State& s) const
    {
        if (is_terminal(s))
            return OrdinalKey::goal_key();
        return OrdinalKey::non_goal(distance_estimate(s));
    }

private:
    State start_;
    puzzle8::Goal goal_;
    Transform transform_;
};

static_assert(Environment<PuzzleEnv>);

}  // namespace prefmcts

#endif  // PREFMCTS_PUZZLE_ENV_HPP
