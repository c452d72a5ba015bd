// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0
//
// Bounded-variable revised simplex with an explicit dense basis inverse.
// Two phases: phase 1 minimizes artificial-variable mass, phase 2 the real
// objective. Dantzig pricing with lowest-index tie-break; Bland's rule kicks
// in after a degeneracy stall and is dropped again once the objective moves.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cesshare/errors.hpp"
#include "cesshare/solver/lp.hpp"
#include "cesshare/solver/simplex_internal.hpp"

namespace cesshare::solver {

namespace {

constexpr double kDualTol = 1e-9;   // reduced-cost threshold for entering
constexpr double kPivotTol = 1e-9;  // minimum acceptable pivot magnitude
constexpr double kRatioTieTol = 1e-10;
constexpr double kStallImprove = 1e-11;
constexpr int kStallLimit = 300;      // non-improving iterations before Bland
constexpr int kRefactorPeriod = 100;  // basis-inverse rebuild interval

enum class VStat : std::uint8_t { Basic, Lower, Upper, Zero };

struct Column {
    std::vector<std::pair<int, double>> entries; // (row, coefficient)
};

class Simplex {
public:
    Simplex(const LinearProgram& lp, const std::vector<double>& lo,
            const std::vector<double>& up)
        : n_(static_cast<int>(lp.variable_count())),
          m_(static_cast<int>(lp.rows.size())) {
        build(lp, lo, up);
    }

    LpSolution solve(const LinearProgram& lp) {
        setup_initial_basis();
        refactorize();

        if (has_artificials_) {
            cost_ = &phase1_cost_;
            const Outcome p1 = iterate(/*phase1=*/true);
            if (p1 == Outcome::IterationLimit)
                throw ResourceError("simplex: iteration limit exceeded in phase 1");
            if (objective_value() > 1e-7) return make_result(lp, SolveStatus::Infeasible);
            freeze_artificials();
        }

        cost_ = &phase2_cost_;
        stall_count_ = 0;
        bland_ = false;
        best_obj_ = kInf;
        const Outcome p2 = iterate(/*phase1=*/false);
        if (p2 == Outcome::IterationLimit)
            throw ResourceError("simplex: iteration limit exceeded in phase 2");
        if (p2 == Outcome::Unbounded) return make_result(lp, SolveStatus::Unbounded);

        refactorize(); // tighten the final point before reporting
        return make_result(lp, SolveStatus::Optimal);
    }

private:
    enum class Outcome { Optimal, Unbounded, IterationLimit };

    int n_; // structural variables
    int m_; // rows
    int total_ = 0;
    bool has_artificials_ = false;

    std::vector<Column> cols_;
    std::vector<double> lo_, up_;
    std::vector<double> b_;            // scaled rhs
    std::vector<double> row_scale_;
    std::vector<double> phase1_cost_, phase2_cost_;
    const std::vector<double>* cost_ = nullptr;

    std::vector<int> basic_;      // row -> variable
    std::vector<VStat> stat_;
    std::vector<double> xval_;
    Eigen::MatrixXd binv_;

    bool bland_ = false;
    int stall_count_ = 0;
    double best_obj_ = kInf;
    int updates_since_refactor_ = 0;

    void build(const LinearProgram& lp, const std::vector<double>& lo,
               const std::vector<double>& up) {
        total_ = n_ + m_; // structural + one slack per row
        cols_.resize(total_);
        lo_.assign(lo.begin(), lo.end());
        up_.assign(up.begin(), up.end());
        lo_.resize(total_);
        up_.resize(total_);
        b_.resize(m_);
        row_scale_.assign(m_, 1.0);

        for (int r = 0; r < m_; ++r) {
            const Row& row = lp.rows[r];
            double maxabs = std::abs(row.rhs);
            for (const auto& [j, v] : row.coeffs) maxabs = std::max(maxabs, std::abs(v));
            const double scale = maxabs > 0 ? 1.0 / maxabs : 1.0;
            row_scale_[r] = scale;
            for (const auto& [j, v] : row.coeffs)
                if (v != 0.0) cols_[j].entries.emplace_back(r, v * scale);
            b_[r] = row.rhs * scale;

            const int slack = n_ + r;
            cols_[slack].entries.emplace_back(r, 1.0);
            switch (row.rel) {
                case Relation::LessEqual:
                    lo_[slack] = 0.0;
                    up_[slack] = kInf;
                    break;
                case Relation::GreaterEqual:
                    lo_[slack] = -kInf;
                    up_[slack] = 0.0;
                    break;
                case Relation::Equal:
                    lo_[slack] = 0.0;
                    up_[slack] = 0.0;
                    break;
            }
        }

        phase2_cost_.assign(total_, 0.0);
        for (int j = 0; j < n_; ++j) phase2_cost_[j] = lp.objective[j];
    }

    // Nonbasic starting value: nearest finite bound, zero for free variables.
    double initial_value(int j, VStat& st) const {
        if (std::isfinite(lo_[j])) {
            st = VStat::Lower;
            return lo_[j];
        }
        if (std::isfinite(up_[j])) {
            st = VStat::Upper;
            return up_[j];
        }
        st = VStat::Zero;
        return 0.0;
    }

    void setup_initial_basis() {
        stat_.assign(total_, VStat::Lower);
        xval_.assign(total_, 0.0);
        basic_.assign(m_, -1);

        for (int j = 0; j < n_; ++j) xval_[j] = initial_value(j, stat_[j]);

        // Residual per row once structurals sit at their bounds.
        std::vector<double> resid(b_);
        for (int j = 0; j < n_; ++j) {
            if (xval_[j] == 0.0) continue;
            for (const auto& [r, v] : cols_[j].entries) resid[r] -= v * xval_[j];
        }

        for (int r = 0; r < m_; ++r) {
            const int slack = n_ + r;
            const bool slack_ok = resid[r] >= lo_[slack] - 1e-12 &&
                                  resid[r] <= up_[slack] + 1e-12;
            if (slack_ok) {
                basic_[r] = slack;
                stat_[slack] = VStat::Basic;
                xval_[slack] = resid[r];
            } else {
                // Slack stays at its nearest bound; an artificial covers the rest.
                stat_[slack] = resid[r] > up_[slack] ? VStat::Upper : VStat::Lower;
                xval_[slack] = stat_[slack] == VStat::Upper ? up_[slack] : lo_[slack];
                const double rest = resid[r] - xval_[slack];
                const int art = add_artificial(r, rest >= 0 ? 1.0 : -1.0);
                basic_[r] = art;
                stat_[art] = VStat::Basic;
                xval_[art] = std::abs(rest);
            }
        }
        phase1_cost_.assign(total_, 0.0);
        for (int j = n_ + m_; j < total_; ++j) phase1_cost_[j] = 1.0;
    }

    int add_artificial(int row, double sign) {
        has_artificials_ = true;
        cols_.push_back(Column{{{row, sign}}});
        lo_.push_back(0.0);
        up_.push_back(kInf);
        phase2_cost_.push_back(0.0);
        stat_.push_back(VStat::Lower);
        xval_.push_back(0.0);
        ++total_;
        return total_ - 1;
    }

    void refactorize() {
        if (m_ == 0) {
            binv_.resize(0, 0);
            return;
        }
        Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m_, m_);
        for (int i = 0; i < m_; ++i)
            for (const auto& [r, v] : cols_[basic_[i]].entries) basis(r, i) = v;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
        if (!lu.isInvertible()) {
            repair_basis();
            return;
        }
        binv_ = lu.inverse();
        updates_since_refactor_ = 0;
        recompute_basic_values();
    }

    // Rebuilds a nonsingular basis when accumulated rank-1 updates let a
    // dependent column slip in: keep a maximal independent subset of the
    // current basic columns (greedy Gaussian elimination with partial
    // pivoting), evict the rest to their nearest bound, and cover the
    // remaining rows with their slack columns, which always completes
    // because slacks are unit vectors.
    void repair_basis() {
        constexpr double kRepairPivotTol = 1e-8;
        std::vector<int> candidates(basic_);
        for (int r = 0; r < m_; ++r)
            if (stat_[n_ + r] != VStat::Basic) candidates.push_back(n_ + r);

        Eigen::MatrixXd work = Eigen::MatrixXd::Zero(m_, m_);
        std::vector<char> row_used(m_, 0);
        std::vector<int> kept;
        std::vector<std::pair<int, int>> pivots; // (column slot, pivot row)
        for (const int j : candidates) {
            if (static_cast<int>(kept.size()) == m_) break;
            Eigen::VectorXd col = Eigen::VectorXd::Zero(m_);
            for (const auto& [r, v] : cols_[j].entries) col[r] = v;
            for (std::size_t k = 0; k < kept.size(); ++k) {
                const int pr = pivots[k].second;
                const double f = col[pr] / work(pr, k);
                if (f == 0.0) continue;
                col -= f * work.col(k);
                col[pr] = 0.0;
            }
            int prow = -1;
            double pbest = kRepairPivotTol;
            for (int r = 0; r < m_; ++r)
                if (!row_used[r] && std::abs(col[r]) > pbest) {
                    pbest = std::abs(col[r]);
                    prow = r;
                }
            if (prow < 0) continue; // dependent on the kept set
            work.col(static_cast<int>(kept.size())) = col;
            pivots.emplace_back(static_cast<int>(kept.size()), prow);
            row_used[prow] = 1;
            kept.push_back(j);
        }
        if (static_cast<int>(kept.size()) != m_)
            throw InternalError("simplex: basis repair could not span all rows");

        std::vector<char> is_kept(total_, 0);
        for (const int j : kept) is_kept[j] = 1;
        for (const int j : basic_) {
            if (is_kept[j]) continue;
            xval_[j] = initial_value(j, stat_[j]);
        }
        basic_ = kept;
        for (const int j : basic_) stat_[j] = VStat::Basic;

        Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m_, m_);
        for (int i = 0; i < m_; ++i)
            for (const auto& [r, v] : cols_[basic_[i]].entries) basis(r, i) = v;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
        if (!lu.isInvertible())
            throw InternalError("simplex: singular basis after repair");
        binv_ = lu.inverse();
        updates_since_refactor_ = 0;
        recompute_basic_values();
        // Phase 2 cannot restore primal feasibility, so a repair that moved
        // the point out of its bounds must fail loudly rather than let the
        // run report a falsely optimal answer.
        for (int i = 0; i < m_; ++i) {
            const int bv = basic_[i];
            if (xval_[bv] < lo_[bv] - 1e-6 || xval_[bv] > up_[bv] + 1e-6)
                throw InternalError("simplex: basis repair lost primal feasibility");
        }
    }

    void recompute_basic_values() {
        Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b_.data(), m_);
        for (int j = 0; j < total_; ++j) {
            if (stat_[j] == VStat::Basic || xval_[j] == 0.0) continue;
            for (const auto& [r, v] : cols_[j].entries) rhs[r] -= v * xval_[j];
        }
        Eigen::VectorXd xb = binv_ * rhs;
        for (int i = 0; i < m_; ++i) xval_[basic_[i]] = xb[i];
    }

    double objective_value() const {
        double obj = 0.0;
        for (int j = 0; j < total_; ++j) obj += (*cost_)[j] * xval_[j];
        return obj;
    }

    Eigen::VectorXd ftran(int j) const {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
        for (const auto& [r, v] : cols_[j].entries) w += binv_.col(r) * v;
        return w;
    }

    // Returns the entering variable and its direction, or -1 when dual feasible.
    int price(int& direction) const {
        Eigen::VectorXd cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = (*cost_)[basic_[i]];
        const Eigen::VectorXd y = binv_.transpose() * cb;

        int best = -1;
        double best_score = kDualTol;
        for (int j = 0; j < total_; ++j) {
            if (stat_[j] == VStat::Basic) continue;
            if (lo_[j] == up_[j]) continue; // fixed, cannot move
            double d = (*cost_)[j];
            for (const auto& [r, v] : cols_[j].entries) d -= v * y[r];

            int dir = 0;
            if (stat_[j] == VStat::Lower && d < -kDualTol)
                dir = +1;
            else if (stat_[j] == VStat::Upper && d > kDualTol)
                dir = -1;
            else if (stat_[j] == VStat::Zero && std::abs(d) > kDualTol)
                dir = d < 0 ? +1 : -1;
            if (dir == 0) continue;

            if (bland_) {
                direction = dir;
                return j; // lowest eligible index
            }
            if (std::abs(d) > best_score) {
                best_score = std::abs(d);
                best = j;
                direction = dir;
            }
        }
        return best;
    }

    Outcome iterate(bool phase1) {
        const long max_iters = 20000L + 200L * (n_ + m_);
        for (long it = 0; it < max_iters; ++it) {
            if (updates_since_refactor_ >= kRefactorPeriod) refactorize();

            int direction = 0;
            const int enter = price(direction);
            if (enter < 0) return Outcome::Optimal;

            const Eigen::VectorXd w = ftran(enter);

            // Ratio test: step limited by basic variables hitting a bound or
            // the entering variable reaching its opposite bound.
            double t = kInf;
            int leave_row = -1;
            double leave_pivot = 0.0;
            const bool flip_possible =
                std::isfinite(lo_[enter]) && std::isfinite(up_[enter]);
            if (flip_possible) t = up_[enter] - lo_[enter];

            for (int i = 0; i < m_; ++i) {
                const int bv = basic_[i];
                const double wi = direction * w[i];
                double lim;
                if (wi > kPivotTol) {
                    if (!std::isfinite(lo_[bv])) continue;
                    lim = (xval_[bv] - lo_[bv]) / wi;
                } else if (wi < -kPivotTol) {
                    if (!std::isfinite(up_[bv])) continue;
                    lim = (up_[bv] - xval_[bv]) / (-wi);
                } else {
                    continue;
                }
                if (lim < -1e-9) lim = 0.0;
                lim = std::max(lim, 0.0);
                if (lim < t - kRatioTieTol) {
                    t = lim;
                    leave_row = i;
                    leave_pivot = wi;
                } else if (leave_row >= 0 && lim <= t + kRatioTieTol) {
                    // Tie-break: Bland wants the lowest variable index; the
                    // default rule prefers the numerically larger pivot.
                    if (bland_) {
                        if (bv < basic_[leave_row]) {
                            leave_row = i;
                            leave_pivot = wi;
                        }
                    } else if (std::abs(wi) > std::abs(leave_pivot)) {
                        leave_row = i;
                        leave_pivot = wi;
                    }
                }
            }

            if (!std::isfinite(t)) {
                if (phase1)
                    throw InternalError("simplex: unbounded phase-1 objective");
                return Outcome::Unbounded;
            }

            // A near-zero pivot computed from a stale inverse is the classic
            // way a dependent column sneaks into the basis. Rebuild the
            // inverse and redo the whole iteration before trusting it.
            if (leave_row >= 0 && std::abs(leave_pivot) < 1e-7 &&
                updates_since_refactor_ > 0) {
                refactorize();
                continue;
            }

            // Apply the step.
            xval_[enter] += direction * t;
            if (t != 0.0)
                for (int i = 0; i < m_; ++i)
                    xval_[basic_[i]] -= direction * t * w[i];

            const bool flip = leave_row < 0 ||
                              (flip_possible && up_[enter] - lo_[enter] <= t + kRatioTieTol &&
                               leave_row < 0);
            if (leave_row < 0) {
                // Bound flip only: status change, basis untouched.
                stat_[enter] = stat_[enter] == VStat::Lower ? VStat::Upper : VStat::Lower;
                xval_[enter] = stat_[enter] == VStat::Lower ? lo_[enter] : up_[enter];
            } else {
                const int leave_var = basic_[leave_row];
                stat_[leave_var] = direction * w[leave_row] > 0 ? VStat::Lower : VStat::Upper;
                xval_[leave_var] =
                    stat_[leave_var] == VStat::Lower ? lo_[leave_var] : up_[leave_var];
                basic_[leave_row] = enter;
                stat_[enter] = VStat::Basic;
                update_inverse(w, leave_row);
            }
            (void)flip;

            // Stall bookkeeping drives the Bland fallback.
            const double obj = objective_value();
            if (obj < best_obj_ - kStallImprove) {
                best_obj_ = obj;
                stall_count_ = 0;
                bland_ = false;
            } else if (++stall_count_ > kStallLimit) {
                bland_ = true;
            }
        }
        return Outcome::IterationLimit;
    }

    void update_inverse(const Eigen::VectorXd& w, int r) {
        const double pivot = w[r];
        if (std::abs(pivot) < kPivotTol) {
            // Too small to trust a rank-1 update; rebuild from scratch.
            refactorize();
            return;
        }
        binv_.row(r) /= pivot;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = w[i];
            if (f != 0.0) binv_.row(i) -= f * binv_.row(r);
        }
        ++updates_since_refactor_;
    }

    // After phase 1 artificials are pinned at zero; basic ones are pivoted out
    // where a usable pivot exists, otherwise their row is redundant and they
    // stay basic at zero.
    void freeze_artificials() {
        for (int j = n_ + m_; j < total_; ++j) up_[j] = 0.0;
        for (int r = 0; r < m_; ++r) {
            if (basic_[r] < n_ + m_) continue;
            const Eigen::VectorXd brow = binv_.row(r);
            int enter = -1;
            for (int j = 0; j < n_ + m_; ++j) {
                if (stat_[j] == VStat::Basic || lo_[j] == up_[j]) continue;
                double alpha = 0.0;
                for (const auto& [rr, v] : cols_[j].entries) alpha += v * brow[rr];
                if (std::abs(alpha) > 1e-7) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) continue;
            const int art = basic_[r];
            const Eigen::VectorXd w = ftran(enter);
            basic_[r] = enter;
            stat_[enter] = VStat::Basic;
            stat_[art] = VStat::Lower;
            xval_[art] = 0.0;
            update_inverse(w, r);
            recompute_basic_values();
        }
    }

    LpSolution make_result(const LinearProgram& lp, SolveStatus status) const {
        LpSolution sol;
        sol.status = status;
        if (status != SolveStatus::Optimal) return sol;
        sol.primal.assign(xval_.begin(), xval_.begin() + n_);
        // Snap values sitting within noise of a bound.
        for (int j = 0; j < n_; ++j) {
            if (std::isfinite(lo_[j]) && std::abs(sol.primal[j] - lo_[j]) < 1e-11)
                sol.primal[j] = lo_[j];
            else if (std::isfinite(up_[j]) && std::abs(sol.primal[j] - up_[j]) < 1e-11)
                sol.primal[j] = up_[j];
        }
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += lp.objective[j] * sol.primal[j];
        sol.objective_value = obj;
        sol.row_activities.resize(m_);
        for (int r = 0; r < m_; ++r) {
            double act = 0.0;
            for (const auto& [j, v] : lp.rows[r].coeffs) act += v * sol.primal[j];
            sol.row_activities[r] = act;
        }
        return sol;
    }
};

} // namespace

LpSolution solve_lp_with_bounds(const LinearProgram& problem,
                                const std::vector<double>& lower,
                                const std::vector<double>& upper) {
    problem.validate();
    if (lower.size() != problem.variable_count() ||
        upper.size() != problem.variable_count())
        throw InputError("solve_lp_with_bounds: bound override size mismatch");
    for (std::size_t j = 0; j < lower.size(); ++j)
        if (lower[j] > upper[j]) return LpSolution{SolveStatus::Infeasible, 0.0, {}, {}};
    Simplex solver(problem, lower, upper);
    return solver.solve(problem);
}

LpSolution solve_lp(const LinearProgram& problem) {
    return solve_lp_with_bounds(problem, problem.lower, problem.upper);
}

} // namespace cesshare::solver
