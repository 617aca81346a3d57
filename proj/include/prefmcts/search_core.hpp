#ifndef PREFMCTS_SEARCH_CORE_HPP
#define PREFMCTS_SEARCH_CORE_HPP

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "prefmcts/ordinal.hpp"
#include "prefmcts/rng.hpp"

namespace prefmcts {

/**
 * Episodic decision problem with a single start state.
 *
 * `actions(s)` returns a sized, indexable range (nonempty for non-terminal s).
 * Rewards are extrinsic only at terminal states; `heuristic_numeric` (in [0,1])
 * and `heuristic_ordinal` evaluate cut-off states. On a terminal state
 * `heuristic_ordinal` must report the terminal's rank (the goal key for a win).
 */
template <class E>
concept Environment = requires(const E& env, const typename E::State& s, const typename E::Action& a,
                               RngStream& rng) {
    typename E::State;
    typename E::Action;
    { env.start() } -> std::convertible_to<typename E::State>;
    { env.actions(s).size() } -> std::convertible_to<std::size_t>;
    { env.actions(s)[std::size_t{0}] } -> std::convertible_to<typename E::Action>;
    { env.sample_transition(s, a, rng) } -> std::convertible_to<typename E::State>;
    { env.is_terminal(s) } -> std::convertible_to<bool>;
    { env.terminal_reward(s) } -> std::convertible_to<double>;
    { env.heuristic_numeric(s) } -> std::convertible_to<double>;
    { env.heuristic_ordinal(s) } -> std::convertible_to<OrdinalKey>;
};

/// Transition-sample allowance for one search. The limit is soft: searches
/// only start a new iteration while `used < limit`.
struct Budget
{
    std::uint64_t limit = 0;
    std::uint64_t used = 0;

    void charge(std::uint64_t n = 1) noexcept { used += n; }
    bool exhausted() const noexcept { return used >= limit; }
};

inline void charge(Budget& budget, std::uint64_t n) noexcept { budget.charge(n); }

/// Draws s' ~ delta(. | s, a) and charges one sample. Every algorithm goes through here.
template <Environment E>
typename E::State sample(const E& env, const typename E::State& s, const typename E::Action& a, RngStream& rng,
                         Budget& budget)
{
    budget.charge(1);
    return env.sample_transition(s, a, rng);
}

template <class State>
struct RolloutOutcome
{
    bool terminal = false;
    double reward = 0.0;
    OrdinalKey ordinal;
    State final_state{};
    std::uint32_t steps = 0;
};

/// Outcome for a state that needs no simulation (terminal) or is evaluated as is.
template <Environment E>
RolloutOutcome<typename E::State> evaluate(const E& env, const typename E::State& s, std::uint32_t steps = 0)
{
    RolloutOutcome<typename E::State> out;
    out.final_state = s;
    out.steps = steps;
    out.ordinal = env.heuristic_ordinal(s);
    out.terminal = env.is_terminal(s);
    out.reward = out.terminal ? env.terminal_reward(s) : env.heuristic_numeric(s);
    return out;
}

/// Uniformly random playout, cut off after `depth_limit` actions and scored heuristically.
template <Environment E>
RolloutOutcome<typename E::State> rollout(const E& env, typename E::State s, std::uint32_t depth_limit,
                                          RngStream& rng, Budget& budget)
{
    std::uint32_t steps = 0;
    while (steps < depth_limit && !env.is_terminal(s)) {
        const auto acts = env.actions(s);
        s = sample(env, s, acts[rng.index(acts.size())], rng, budget);
        ++steps;
    }
    return evaluate(env, s, steps);
}

template <class Action>
struct EpisodeResult
{
    bool win = false;
    std::uint32_t moves_played = 0;
    std::vector<std::uint64_t> samples_per_move;
    std::vector<Action> actions;

    std::uint64_t total_samples() const noexcept
    {
        std::uint64_t sum = 0;
        for (auto s : samples_per_move)
            sum += s;
        return sum;
    }

    bool operator==(const EpisodeResult&) const = default;
};

template <class A, class E>
concept SearchAgent = Environment<E> && requires(A& agent, const typename E::State& s, Budget& b, RngStream& rng) {
    { agent.search(s, b, rng) } -> std::convertible_to<typename E::Action>;
};

inline constexpr std::uint32_t kDefaultMaxSteps = 100;

/// Stream used by the agent's search for move number `move` of an episode.
inline RngStream search_stream(std::uint64_t episode_seed, std::uint64_t move)
{
    return RngStream(derive_seed({episode_seed, 0x5ea7c4ULL, move}));
}

/**
 * Plays from env.start() until the goal or `max_steps` moves. Each move gets a
 * fresh Budget of `budget_per_move`; the agent never sees `max_steps`.
 */
template <Environment E, SearchAgent<E> Agent>
EpisodeResult<typename E::Action> play_episode(Agent& agent, const E& env, std::uint32_t max_steps,
                                               std::uint64_t budget_per_move, std::uint64_t seed)
{
    EpisodeResult<typename E::Action> result;
    RngStream world(derive_seed({seed, 0xe0f1dULL}));
    typename E::State state = env.start();
    while (!env.is_terminal(state) && result.moves_played < max_steps) {
        Budget budget{budget_per_move, 0};
        RngStream rng = search_stream(seed, result.moves_played);
        const typename E::Action action = agent.search(state, budget, rng);
        result.samples_per_move.push_back(budget.used);
        result.actions.push_back(action);
        state = env.sample_transition(state, action, world);
        ++result.moves_played;
    }
    result.win = env.is_terminal(state) && env.heuristic_ordinal(state).goal;
    return result;
}

}  // namespace prefmcts

#endif  // PREFMCTS_SEARCH_CORE_HPP
