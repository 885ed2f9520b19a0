#include "mt/ali.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mt {

namespace {

// Inner product of rows k and l of phi as dense tensors, factorized.
double row_dot(const MTensor& phi, Eigen::Index k, Eigen::Index l) {
    double prod = 1.0;
    for (Eigen::Index j = 0; j < phi.order(); ++j)
        prod *= phi.core(j).row(k).dot(phi.core(j).row(l));
    return prod;
}

Eigen::VectorXd cross_column(const MTensor& phi, const std::vector<Eigen::Index>& indices,
                             Eigen::Index k) {
    Eigen::VectorXd b(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t l = 0; l < indices.size(); ++l)
        b[static_cast<Eigen::Index>(l)] = row_dot(phi, indices[l], k);
    return b;
}

}  // namespace

AldResult ald_distance(const CholeskyFactor& F, const Eigen::VectorXd& b, double nrm2) {
    if (b.size() != F.size()) throw DimensionError("ald_distance: size mismatch");
    AldResult r;
    r.s = F.size() > 0 ? forward_solve(F, b) : Eigen::VectorXd();
    // cancellation can push the squared distance slightly negative
    r.delta = std::max(0.0, nrm2 - r.s.squaredNorm());
    return r;
}

ALIDecomposition greedy_ali(const MTensor& phi, double epsilon, bool want_weights) {
    if (epsilon <= 0.0) throw std::invalid_argument("greedy_ali: epsilon must be positive");
    const Eigen::Index m = phi.rdim();

    ALIDecomposition D;
    D.epsilon = epsilon;
    D.factor = chol_append(CholeskyFactor(), Eigen::VectorXd(), row_dot(phi, 0, 0));
    D.indices.push_back(0);

    // per-row weight records for the lazy W assembly
    struct WeightRow {
        bool retained;
        Eigen::Index position;   // index into D.indices when retained
        Eigen::VectorXd w;       // projection weights when rejected
    };
    std::vector<WeightRow> wrows;
    if (want_weights) wrows.push_back({true, 0, {}});

    for (Eigen::Index k = 1; k < m; ++k) {
        const Eigen::VectorXd b = cross_column(phi, D.indices, k);
        const double nrm2 = row_dot(phi, k, k);
        const AldResult ald = ald_distance(D.factor, b, nrm2);

        bool retained = false;
        if (ald.delta > epsilon) {
            try {
                D.factor = chol_append(D.factor, b, nrm2);
                D.indices.push_back(k);
                retained = true;
            } catch (const DegenerateAppendError&) {
                D.degenerate_rejections.push_back(k);
            }
        }
        if (want_weights) {
            if (retained)
                wrows.push_back({true, static_cast<Eigen::Index>(D.indices.size()) - 1, {}});
            else
                wrows.push_back({false, 0, backward_solve(D.factor, ald.s)});
        }
    }

    if (want_weights) {
        D.weights = Eigen::MatrixXd::Zero(m, D.retained());
        for (Eigen::Index k = 0; k < m; ++k) {
            const auto& wr = wrows[static_cast<std::size_t>(k)];
            if (wr.retained)
                D.weights(k, wr.position) = 1.0;
            else
                D.weights.row(k).head(wr.w.size()) = wr.w.transpose();
        }
    }
    return D;
}

ALIDecomposition optimal_ali(const MTensor& phi, double epsilon, bool use_shortcut_scores) {
    if (epsilon <= 0.0) throw std::invalid_argument("optimal_ali: epsilon must be positive");
    const Eigen::Index m = phi.rdim();
    const Eigen::MatrixXd P = mprod(phi, phi);

    ALIDecomposition D;
    D.epsilon = epsilon;

    // first element: minimize column sums of the pairwise distance matrix
    Eigen::VectorXd colsum = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
            colsum[j] += std::max(0.0, P(i, i) - P(i, j) * P(i, j) / P(j, j));
    Eigen::Index best;
    colsum.minCoeff(&best);

    D.indices.push_back(best);
    D.factor = chol_append(CholeskyFactor(), Eigen::VectorXd(), P(best, best));

    std::vector<Eigen::Index> remaining;
    for (Eigen::Index i = 0; i < m; ++i)
        if (i != best) remaining.push_back(i);

    auto all_below = [&](auto&& dist_of) {
        for (Eigen::Index i : remaining)
            if (dist_of(i) > epsilon) return false;
        return true;
    };

    // distances to the current retained span
    auto span_distance = [&](Eigen::Index i) {
        const Eigen::VectorXd b = P(D.indices, Eigen::indexing::all).col(i);
        return ald_distance(D.factor, b, P(i, i)).delta;
    };
    if (all_below(span_distance)) return D;

    while (!remaining.empty()) {
        Eigen::Index chosen_pos = -1;
        double best_score = std::numeric_limits<double>::infinity();
        CholeskyFactor chosen_factor;

        if (use_shortcut_scores) {
            // literal scoring matrix diag(n) * ones - S^T S with unsquared norms
            const Eigen::Index r = static_cast<Eigen::Index>(remaining.size());
            Eigen::MatrixXd B(D.retained(), r);
            Eigen::VectorXd nbar(r);
            for (Eigen::Index c = 0; c < r; ++c) {
                B.col(c) = P(D.indices, Eigen::indexing::all).col(remaining[static_cast<std::size_t>(c)]);
                nbar[c] = std::sqrt(P(remaining[static_cast<std::size_t>(c)],
                                      remaining[static_cast<std::size_t>(c)]));
            }
            Eigen::MatrixXd S =
                D.factor.lower().triangularView<Eigen::Lower>().solve(B);
            Eigen::MatrixXd delta =
                nbar.asDiagonal() * Eigen::MatrixXd::Ones(r, r) - S.transpose() * S;
            Eigen::VectorXd sums = delta.colwise().sum();
            for (Eigen::Index c = 0; c < r; ++c) {
                if (sums[c] < best_score) {
                    best_score = sums[c];
                    chosen_pos = c;
                }
            }
            try {
                chosen_factor = chol_append(
                    D.factor, B.col(chosen_pos),
                    P(remaining[static_cast<std::size_t>(chosen_pos)],
                      remaining[static_cast<std::size_t>(chosen_pos)]));
            } catch (const DegenerateAppendError&) {
                D.degenerate_rejections.push_back(remaining[static_cast<std::size_t>(chosen_pos)]);
                remaining.erase(remaining.begin() + chosen_pos);
                continue;
            }
        } else {
            // exact augmented-subspace distances, one trial append per candidate
            for (std::size_t c = 0; c < remaining.size(); ++c) {
                const Eigen::Index j = remaining[c];
                const Eigen::VectorXd bj = P(D.indices, Eigen::indexing::all).col(j);
                CholeskyFactor Fj;
                try {
                    Fj = chol_append(D.factor, bj, P(j, j));
                } catch (const DegenerateAppendError&) {
                    continue;  // candidate already in the span; scores +inf
                }
                double score = 0.0;
                Eigen::VectorXd baug(D.retained() + 1);
                for (Eigen::Index i : remaining) {
                    baug.head(D.retained()) = P(D.indices, Eigen::indexing::all).col(i);
                    baug[D.retained()] = P(j, i);
                    score += ald_distance(Fj, baug, P(i, i)).delta;
                }
                if (score < best_score) {
                    best_score = score;
                    chosen_pos = static_cast<Eigen::Index>(c);
                    chosen_factor = Fj;
                }
            }
            if (chosen_pos < 0) break;  // every remaining row is in the span
        }

        const Eigen::Index chosen = remaining[static_cast<std::size_t>(chosen_pos)];
        D.indices.push_back(chosen);
        D.factor = chosen_factor;
        remaining.erase(remaining.begin() + chosen_pos);

        if (all_below(span_distance)) break;
    }
    return D;
}

Eigen::MatrixXd ali_weights(const ALIDecomposition& D, const MTensor& phi) {
    const Eigen::Index m = phi.rdim();
    Eigen::MatrixXd B(m, D.retained());
    for (Eigen::Index k = 0; k < m; ++k)
        B.row(k) = cross_column(phi, D.indices, k).transpose();
    return solve_spd(D.factor, B.transpose()).transpose();
}

double projection_mse(const ALIDecomposition& D, const MTensor& phi) {
    const Eigen::Index m = phi.rdim();
    double total = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::VectorXd b = cross_column(phi, D.indices, k);
        total += ald_distance(D.factor, b, row_dot(phi, k, k)).delta;
    }
    return total / static_cast<double>(m);
}

}  // namespace mt
