#ifndef PREFMCTS_PBMCTS_HPP
#define PREFMCTS_PBMCTS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "prefmcts/bandits.hpp"
#include "prefmcts/search_core.hpp"

namespace prefmcts {

/// Preference-based MCTS settings.
struct PBConfig
{
    double alpha_hat = 0.5;  ///< combined exploration weight c^2 * alpha of the tree RUCB bound
    std::uint32_t rollout_depth = 10;
};

/**
 * Tree node of the preference-based search: a dueling bandit over the node's
 * actions. Children are keyed by action index; terminal successors are never
 * stored as nodes.
 */
template <class State, class Action>
struct PrefNode
{
    State state;
    std::vector<Action> actions;
    PreferenceMatrix wins;
    std::optional<std::size_t> last_pick;
    std::uint64_t visits = 0;  ///< t: traversals of this node
    std::vector<std::unique_ptr<PrefNode>> children;
};

template <Environment E>
using PrefTreeNode = PrefNode<typename E::State, typename E::Action>;

template <Environment E>
std::unique_ptr<PrefTreeNode<E>> make_pref_node(const E& env, const typename E::State& s)
{
    auto node = std::make_unique<PrefTreeNode<E>>();
    node->state = s;
    const auto acts = env.actions(s);
    node->actions.assign(acts.begin(), acts.end());
    node->wins = PreferenceMatrix(node->actions.size());
    node->children.resize(node->actions.size());
    return node;
}

/// Preference between two rollout outcomes; only the order of their ordinal keys matters.
template <class State>
Preference compare(const RolloutOutcome<State>& first, const RolloutOutcome<State>& second) noexcept
{
    return compare_keys(first.ordinal, second.ordinal);
}

/// What happened at one node during one traversal. Emitted after the node's update.
struct TraversalEvent
{
    const void* node = nullptr;
    std::uint32_t depth = 0;
    std::size_t first = 0;
    std::size_t second = 0;
    double mass_before = 0.0;
    double mass_after = 0.0;
    std::uint64_t visits_before = 0;
    std::uint64_t visits_after = 0;
};

using TraversalObserver = std::function<void(const TraversalEvent&)>;

namespace detail {

template <Environment E>
RolloutOutcome<typename E::State> pb_iteration(PrefTreeNode<E>& node, const E& env, const PBConfig& cfg,
                                               Budget& budget, RngStream& rng, const TraversalObserver* observer,
                                               std::uint32_t depth)
{
    const std::uint64_t visits_before = node.visits;
    const double mass_before = observer ? node.wins.total_mass() : 0.0;
    ++node.visits;
    const PairSelection sel = select_action_pair(node.wins, node.last_pick, node.visits, cfg.alpha_hat, rng);
    node.last_pick = sel.first;

    const std::array<std::size_t, 2> pair{sel.first, sel.second};
    const std::size_t distinct = sel.first == sel.second ? 1 : 2;
    std::array<RolloutOutcome<typename E::State>, 2> sim;
    for (std::size_t k = 0; k < distinct; ++k) {
        const std::size_t a = pair[k];
        const auto next = sample(env, node.state, node.actions[a], rng, budget);
        if (env.is_terminal(next)) {
            sim[k] = evaluate(env, next);
        } else if (node.children[a]) {
            sim[k] = pb_iteration(*node.children[a], env, cfg, budget, rng, observer, depth + 1);
        } else {
            node.children[a] = make_pref_node(env, next);
            sim[k] = rollout(env, next, cfg.rollout_depth, rng, budget);
        }
    }

    std::size_t returned = 0;
    if (distinct == 2) {
        const Preference p = compare(sim[0], sim[1]);
        node.wins.record(sel.first, sel.second, p);
        // Best preference policy: hand the preferred outcome upwards, a coin flip on indifference.
        if (p == Preference::second_preferred || (p == Preference::indifferent && rng.coin()))
            returned = 1;
    }
    if (observer && *observer) {
        (*observer)(TraversalEvent{&node, depth, sel.first, sel.second, mass_before, node.wins.total_mass(),
                                   visits_before, node.visits});
    }
    return sim[returned];
}

}  // namespace detail

/**
 * One PB-MCTS iteration below `node`: pick an action pair by RUCB, obtain one
 * outcome per distinct action (recursing into existing children, simulating
 * from new ones), record the comparison in the node's matrix and return the
 * preferred outcome. When both picks coincide only one outcome is produced and
 * the matrix is left alone.
 */
template <Environment E>
RolloutOutcome<typename E::State> pb_iteration(PrefTreeNode<E>& node, const E& env, const PBConfig& cfg,
                                               Budget& budget, RngStream& rng,
                                               const TraversalObserver* observer = nullptr)
{
    return detail::pb_iteration(node, env, cfg, budget, rng, observer, 0);
}

/// Number of opponents each action beats on more than half of their comparisons.
std::vector<std::size_t> copeland_scores(const PreferenceMatrix& w);

/// Index of the action to play: best Copeland score, then best overall win
/// fraction, then a uniform draw.
std::size_t copeland_winner(const PreferenceMatrix& w, RngStream& rng);

template <class Action>
struct PBSearchResult
{
    Action action{};
    std::uint64_t iterations = 0;
    std::uint64_t samples_used = 0;
    std::vector<Action> actions;
    PreferenceMatrix root_wins;
    std::uint64_t root_visits = 0;
};

template <Environment E>
PBSearchResult<typename E::Action> pb_search(const typename E::State& state, const E& env, const PBConfig& cfg,
                                             Budget& budget, RngStream& rng,
                                             const TraversalObserver* observer = nullptr)
{
    auto root = make_pref_node(env, state);
    PBSearchResult<typename E::Action> result;
    while (!budget.exhausted()) {
        pb_iteration(*root, env, cfg, budget, rng, observer);
        ++result.iterations;
    }
    result.action = root->actions[copeland_winner(root->wins, rng)];
    result.samples_used = budget.used;
    result.actions = root->actions;
    result.root_wins = root->wins;
    result.root_visits = root->visits;
    return result;
}

/// Episode-playing wrapper around pb_search. Optionally keeps every root matrix.
template <Environment E>
class PbMctsAgent
{
public:
    PbMctsAgent(const E& env, PBConfig cfg) : env_(&env), cfg_(cfg) {}

    void keep_root_history(bool keep) { keep_history_ = keep; }
    const std::vector<PreferenceMatrix>& root_history() const noexcept { return history_; }

    typename E::Action search(const typename E::State& s, Budget& budget, RngStream& rng)
    {
        auto result = pb_search(s, *env_, cfg_, budget, rng);
        if (keep_history_)
            history_.push_back(std::move(result.root_wins));
        return result.action;
    }

private:
    const E* env_;
    PBConfig cfg_;
    bool keep_history_ = false;
    std::vector<PreferenceMatrix> history_;
};

}  // namespace prefmcts

#endif  // PREFMCTS_PBMCTS_HPP
