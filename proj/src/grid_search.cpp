#include "hfc/grid_search.hpp"

#include <cmath>
#include <exception>
#include <limits>

namespace hfc {

ParamMap HyperGrid::initial() const {
    ParamMap p;
    for (const auto& h : parameters) {
        if (h.candidates.empty()) throw InvalidInput("grid: parameter '" + h.name + "' has no candidates");
        p[h.name] = h.candidates.at(std::min(h.initial, h.candidates.size() - 1));
    }
    return p;
}

std::size_t HyperGrid::cell_count() const {
    std::size_t cells = 1;
    for (const auto& h : parameters) cells *= h.candidates.size();
    return cells;
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> time_folds(Eigen::Index rows, int folds) {
    if (folds < 2) throw InvalidInput("grid search: need at least 2 folds");
    const Eigen::Index block = rows / (folds + 1);
    if (block < 1) throw InvalidInput("grid search: too few rows for " + std::to_string(folds) + " folds");
    std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
    for (int f = 1; f <= folds; ++f) {
        const Eigen::Index train_end = block * f;
        const Eigen::Index valid_end = f == folds ? rows : block * (f + 1);
        out.emplace_back(train_end, valid_end);
    }
    return out;
}

namespace {

class Scorer {
public:
    Scorer(const Trainer& trainer, const Matrix& x, const Matrix& y, int folds, std::uint64_t seed)
        : trainer_(trainer), x_(x), y_(y), folds_(time_folds(x.rows(), folds)), seed_(seed) {}

    // NaN when the trainer throws.
    double score(const ParamMap& params) {
        for (const auto& [p, s] : result.visited) {
            if (p == params) return s;
        }
        double total = 0.0;
        try {
            for (const auto& [train_end, valid_end] : folds_) {
                const Matrix pred = trainer_(x_.topRows(train_end), y_.topRows(train_end),
                                             x_.middleRows(train_end, valid_end - train_end), params, seed_);
                const Matrix diff = pred - y_.middleRows(train_end, valid_end - train_end);
                total += std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
            }
        } catch (const std::exception& e) {
            std::string desc;
            for (const auto& [k, v] : params) desc += (desc.empty() ? "" : ", ") + k + "=" + format_double(v);
            warn(std::string("grid search: skipping cell {") + desc + "}: " + e.what());
            last_error = e.what();
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double mean = total / static_cast<double>(folds_.size());
        result.visited.emplace_back(params, mean);
        return mean;
    }

    SearchResult result;
    std::string last_error;

private:
    const Trainer& trainer_;
    const Matrix& x_;
    const Matrix& y_;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> folds_;
    std::uint64_t seed_;
};

}  // namespace

SearchResult grid_search(const Trainer& trainer, const Matrix& x, const Matrix& y, const HyperGrid& grid,
                         int folds, std::uint64_t seed, SearchMode mode) {
    if (x.rows() != y.rows()) throw InvalidInput("grid search: feature and target rows differ");
    Scorer scorer(trainer, x, y, folds, seed);
    ParamMap current = grid.initial();
    double best = std::numeric_limits<double>::infinity();
    bool found = false;

    auto consider = [&](const ParamMap& params) {
        const double s = scorer.score(params);
        if (!std::isnan(s) && s < best) {
            best = s;
            found = true;
            return true;
        }
        return false;
    };

    if (mode == SearchMode::greedy) {
        if (grid.parameters.empty()) consider(current);
        for (const auto& h : grid.parameters) {
            ParamMap chosen = current;
            for (double candidate : h.candidates) {
                ParamMap trial = current;
                trial[h.name] = candidate;
                if (consider(trial)) chosen = trial;
            }
            current = chosen;
        }
    } else {
        std::vector<std::size_t> index(grid.parameters.size(), 0);
        ParamMap chosen = current;
        for (bool done = false; !done;) {
            ParamMap trial;
            for (std::size_t p = 0; p < index.size(); ++p) {
                trial[grid.parameters[p].name] = grid.parameters[p].candidates[index[p]];
            }
            if (consider(trial)) chosen = trial;
            // Odometer increment, last parameter fastest.
            std::size_t p = index.size();
            while (true) {
                if (p == 0) {
                    done = true;
                    break;
                }
                --p;
                if (++index[p] < grid.parameters[p].candidates.size()) break;
                index[p] = 0;
            }
        }
        current = chosen;
    }
    if (!found) throw Error("grid search: every cell failed (" + scorer.last_error + ")");
    scorer.result.best = current;
    scorer.result.validation_rmse = best;
    return scorer.result;
}

}  // namespace hfc
