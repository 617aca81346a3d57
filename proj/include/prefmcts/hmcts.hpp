#ifndef PREFMCTS_HMCTS_HPP
#define PREFMCTS_HMCTS_HPP

#include <cstdint>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "prefmcts/bandits.hpp"
#include "prefmcts/search_core.hpp"

namespace prefmcts {

/// Heuristic MCTS settings.
struct HConfig
{
    double cp = 0.5;                 ///< UCT exploration constant C_p
    std::uint32_t rollout_depth = 10;
};

/// Tree node of the numeric-feedback search. Children are keyed by action index.
template <class State, class Action>
struct HNode
{
    State state;
    bool terminal = false;
    std::vector<Action> actions;
    std::vector<ArmStats> stats;
    std::vector<std::unique_ptr<HNode>> children;
    std::uint64_t visits = 0;  ///< sum of stats[j].pulls

    std::size_t expanded() const noexcept
    {
        std::size_t n = 0;
        for (const auto& c : children)
            n += c != nullptr;
        return n;
    }
};

template <Environment E>
using HTreeNode = HNode<typename E::State, typename E::Action>;

template <Environment E>
std::unique_ptr<HTreeNode<E>> make_hnode(const E& env, const typename E::State& s)
{
    auto node = std::make_unique<HTreeNode<E>>();
    node->state = s;
    node->terminal = env.is_terminal(s);
    if (!node->terminal) {
        const auto acts = env.actions(s);
        node->actions.assign(acts.begin(), acts.end());
        node->stats.resize(node->actions.size());
        node->children.resize(node->actions.size());
    }
    return node;
}

/**
 * One selection / expansion / simulation / backpropagation pass from `root`.
 * Returns the reward that was backed up.
 *
 * The tree is keyed by action path. During descent the transition is still
 * sampled and charged, but the walk continues at the stored child.
 */
template <Environment E>
double h_iteration(HTreeNode<E>& root, const E& env, const HConfig& cfg, Budget& budget, RngStream& rng)
{
    using Node = HTreeNode<E>;
    std::vector<std::pair<Node*, std::size_t>> path;
    Node* node = &root;
    double reward = 0.0;
    std::vector<std::size_t> choice;
    while (true) {
        if (node->terminal) {
            reward = env.terminal_reward(node->state);
            break;
        }
        choice.clear();
        for (std::size_t j = 0; j < node->children.size(); ++j)
            if (!node->children[j])
                choice.push_back(j);
        if (!choice.empty()) {
            const std::size_t a = choice[rng.index(choice.size())];
            const auto next = sample(env, node->state, node->actions[a], rng, budget);
            node->children[a] = make_hnode(env, next);
            path.emplace_back(node, a);
            if (node->children[a]->terminal)
                reward = env.terminal_reward(next);
            else
                reward = rollout(env, next, cfg.rollout_depth, rng, budget).reward;
            break;
        }
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < node->stats.size(); ++j) {
            const double v = uct(node->stats[j], static_cast<double>(node->visits), cfg.cp);
            if (v > best) {
                best = v;
                choice.clear();
            }
            if (v == best)
                choice.push_back(j);
        }
        const std::size_t a = choice.size() == 1 ? choice.front() : choice[rng.index(choice.size())];
        (void)sample(env, node->state, node->actions[a], rng, budget);
        path.emplace_back(node, a);
        node = node->children[a].get();
    }
    for (auto& [n, a] : path) {
        n->stats[a].add(reward);
        ++n->visits;
    }
    return reward;
}

template <class Action>
struct HSearchResult
{
    Action action{};
    std::uint64_t iterations = 0;
    std::uint64_t samples_used = 0;
    std::vector<Action> actions;
    std::vector<ArmStats> root_stats;
};

/// Most-visited root action after spending the budget; ties go to the higher mean, then to the rng.
template <Environment E>
HSearchResult<typename E::Action> h_search(const typename E::State& state, const E& env, const HConfig& cfg,
                                           Budget& budget, RngStream& rng)
{
    auto root = make_hnode(env, state);
    HSearchResult<typename E::Action> result;
    while (!budget.exhausted()) {
        h_iteration(*root, env, cfg, budget, rng);
        ++result.iterations;
    }
    std::vector<std::size_t> best;
    for (std::size_t j = 0; j < root->stats.size(); ++j) {
        if (best.empty()) {
            best.push_back(j);
            continue;
        }
        const auto& cur = root->stats[j];
        const auto& top = root->stats[best.front()];
        const double cur_mean = cur.pulls ? cur.mean() : -1.0;
        const double top_mean = top.pulls ? top.mean() : -1.0;
        if (cur.pulls > top.pulls || (cur.pulls == top.pulls && cur_mean > top_mean)) {
            best.assign(1, j);
        } else if (cur.pulls == top.pulls && cur_mean == top_mean) {
            best.push_back(j);
        }
    }
    const std::size_t pick = best.size() == 1 ? best.front() : best[rng.index(best.size())];
    result.action = root->actions[pick];
    result.samples_used = budget.used;
    result.actions = root->actions;
    result.root_stats = root->stats;
    return result;
}

/// Episode-playing wrapper around h_search.
template <Environment E>
class HMctsAgent
{
public:
    HMctsAgent(const E& env, HConfig cfg) : env_(&env), cfg_(cfg) {}

    typename E::Action search(const typename E::State& s, Budget& budget, RngStream& rng)
    {
        return h_search(s, *env_, cfg_, budget, rng).action;
    }

private:
    const E* env_;
    HConfig cfg_;
};

}  // namespace prefmcts

#endif  // PREFMCTS_HMCTS_HPP
