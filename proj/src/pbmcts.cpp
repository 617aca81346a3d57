#include "prefmcts/pbmcts.hpp"

namespace prefmcts {

std::vector<std::size_t> copeland_scores(const PreferenceMatrix& w)
{
    std::vector<std::size_t> scores(w.size(), 0);
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            if (i != j && w.mass(i, j) > 0.0 && w(i, j) / w.mass(i, j) > 0.5)
                ++scores[i];
    return scores;
}

std::size_t copeland_winner(const PreferenceMatrix& w, RngStream& rng)
{
    const auto scores = copeland_scores(w);
    std::vector<double> fraction(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        double won = 0.0;
        double played = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            won += w(i, j);
            played += i == j ? 0.0 : w.mass(i, j);
        }
        fraction[i] = played > 0.0 ? won / played : 0.0;
    }

    std::vector<std::size_t> best;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (best.empty()) {
            best.push_back(i);
            continue;
        }
        const std::size_t top = best.front();
        if (scores[i] > scores[top] || (scores[i] == scores[top] && fraction[i] > fraction[top]))
            best.assign(1, i);
        else if (scores[i] == scores[top] && fraction[i] == fraction[top])
            best.push_back(i);
    }
    return best.size() == 1 ? best.front() : best[rng.index(best.size())];
}

}  // namespace prefmcts
