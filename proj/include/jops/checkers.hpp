// Hypothesis witnesses and bounds for the discreteness results: tail-index
// computation and predicted eigenvalue-count bound, the odd/even divergence test,
// half-line margin conditions, block Schur positivity equivalences, and a direct
// positivity probe of the tail quadratic form.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jops/family.hpp"
#include "jops/linalg.hpp"
#include "jops/rng.hpp"

namespace jops {

struct ConditionReport {
    std::string family;
    std::string check;
    long horizon = 0;
    long tail_window = 0;
    int assumed_index_jmin = 0;
    bool pass = false;
    std::string verdict;
    std::vector<std::string> notes;
    std::vector<std::pair<std::string, double>> witnesses;
    std::vector<std::array<double, 3>> margin_rows;  // n, s1, s2

    void witness(const std::string& key, double value) { witnesses.emplace_back(key, value); }
    double witness_value(const std::string& key) const {
        for (const auto& [k, v] : witnesses)
            if (k == key) return v;
        throw domain_error("ConditionReport: no witness named " + key);
    }
};

namespace detail {

// Last index in [1, n_max] where pred fails, or 0 when it holds everywhere.
template <typename Pred>
inline long last_violation(long n_max, Pred&& pred) {
    long last = 0;
    for (long n = 1; n <= n_max; ++n)
        if (!pred(n)) last = n;
    return last;
}

}  // namespace detail

// Tail indices for the two discreteness hypotheses above level c, the combined
// cutoff index, and the predicted bound on the eigenvalue count in (c, c+2a).
inline ConditionReport thm_a_witnesses(const CoefficientFamily& f, double c, double a,
                                       long horizon) {
    if (a <= 0.0) throw domain_error("thm_a_witnesses: need a > 0");
    if (horizon < 100) throw domain_error("thm_a_witnesses: need horizon >= 100");
    ConditionReport rep;
    rep.family = f.name();
    rep.check = "thm_a";
    rep.horizon = horizon;

    long n_even = horizon / 2;        // blocks B_{2n}
    long n_odd = (horizon + 1) / 2;   // blocks B_{2n-1}
    std::vector<double> even_max(n_even + 1), odd_min(n_odd + 1);
    for (long n = 1; n <= n_even; ++n) even_max[n] = max_eig(f.block_at(2 * n).B);
    for (long n = 1; n <= n_odd; ++n) odd_min[n] = min_eig(f.block_at(2 * n - 1).B);

    long viol1 = detail::last_violation(n_even, [&](long n) { return even_max[n] <= c; });
    long viol2 =
        detail::last_violation(n_odd, [&](long n) { return odd_min[n] - c >= 2.0 * a; });
    // A hypothesis counts as holding only when the trailing tenth of the scanned
    // indices is violation-free; a lone clean index at the window edge (as with
    // period-2 alternation in the even blocks) is not evidence of a tail.
    bool hyp1 = viol1 <= n_even - std::max<long>(1, n_even / 10);
    bool hyp2 = viol2 <= n_odd - std::max<long>(1, n_odd / 10);

    rep.witness("c", c);
    rep.witness("a", a);
    rep.witness("last_violation_even", double(viol1));
    rep.witness("last_violation_odd", double(viol2));
    if (hyp1 && hyp2) {
        long N0 = viol1 + 1;
        long N2a = viol2 + 1;
        long calN = std::max(2 * N0, 2 * N2a - 1);
        rep.witness("N_0", double(N0));
        rep.witness("N(2a)", double(N2a));
        rep.witness("calN", double(calN));
        rep.witness("predicted_bound", double(f.block_dim()) * double(calN));
        rep.pass = true;
        rep.verdict = "hypotheses hold on window";
    } else {
        rep.pass = false;
        if (!hyp1) {
            rep.verdict = "hypothesis (1) fails: even-block upper bound violated at block " +
                          std::to_string(2 * viol1);
            rep.notes.push_back("even blocks exceed the level through the end of the window; "
                                "the half-line margin test (check-b) may still apply");
        } else {
            rep.verdict = "hypothesis (2) fails: odd-block lower bound violated at block " +
                          std::to_string(2 * viol2 - 1);
        }
    }
    rep.notes.push_back("verified on blocks 1.." + std::to_string(horizon) + " only");
    return rep;
}

// Divergence test: min-eig(B_{2j-1}) >= M and max-eig(B_{2j}) <= -M from some index on,
// for each requested level M.
inline ConditionReport prop1_check(const CoefficientFamily& f, const std::vector<double>& M_list,
                                   long horizon) {
    if (M_list.empty()) throw domain_error("prop1_check: M_list must be nonempty");
    for (size_t i = 0; i < M_list.size(); ++i) {
        if (M_list[i] <= 0.0) throw domain_error("prop1_check: levels must be positive");
        if (i > 0 && M_list[i] <= M_list[i - 1])
            throw domain_error("prop1_check: levels must be ascending");
    }
    if (horizon < 100) throw domain_error("prop1_check: need horizon >= 100");
    ConditionReport rep;
    rep.family = f.name();
    rep.check = "prop1";
    rep.horizon = horizon;

    long j_even = horizon / 2;
    long j_odd = (horizon + 1) / 2;
    std::vector<double> even_max(j_even + 1), odd_min(j_odd + 1);
    for (long j = 1; j <= j_even; ++j) even_max[j] = max_eig(f.block_at(2 * j).B);
    for (long j = 1; j <= j_odd; ++j) odd_min[j] = min_eig(f.block_at(2 * j - 1).B);

    rep.pass = true;
    for (double M : M_list) {
        long vo = detail::last_violation(j_odd, [&](long j) { return odd_min[j] >= M; });
        long ve = detail::last_violation(j_even, [&](long j) { return even_max[j] <= -M; });
        bool ok = vo < j_odd && ve < j_even;
        char key[64];
        std::snprintf(key, sizeof key, "N(M=%g)", M);
        rep.witness(key, ok ? double(std::max(vo, ve) + 1) : -1.0);
        if (!ok) {
            rep.pass = false;
            std::snprintf(key, sizeof key, "M=%g", M);
            rep.notes.push_back(std::string("level ") + key + " not attained within the window");
        }
    }
    rep.verdict = rep.pass ? "divergence verified for all levels on window"
                           : "divergence not attained for some level";
    return rep;
}

inline constexpr double kMarginEps = 1e-3;  // criticality band around the threshold 1

namespace detail {

// Finite-horizon divergence heuristic: the tail minimum must dominate the head
// minimum with a factor-2 margin and clear a fixed unit floor.
inline bool grows_on_window(const std::vector<double>& head, const std::vector<double>& tail) {
    if (head.empty() || tail.empty()) return false;
    double hm = *std::min_element(head.begin(), head.end());
    double tm = *std::min_element(tail.begin(), tail.end());
    return tm >= std::max(2.0 * hm, 1.0);
}

}  // namespace detail

// Half-line discreteness margin: s1/s2 sequences, their tail sups, and the
// order-test side conditions on the odd and even block sequences.
inline ConditionReport thm_b_margins(const CoefficientFamily& f, long horizon,
                                     long tail_window) {
    if (horizon < 8) throw domain_error("thm_b_margins: need horizon >= 8");
    long n_max = horizon / 2;
    long rows = n_max - 1;  // margin indices n = 2..n_max
    if (tail_window < 1 || tail_window >= rows)
        throw domain_error("thm_b_margins: need 1 <= tail_window < margin row count");
    ConditionReport rep;
    rep.family = f.name();
    rep.check = "thm_b";
    rep.horizon = horizon;
    rep.tail_window = tail_window;

    std::vector<double> odd_min(n_max + 1);
    std::vector<double> even_posnorm(n_max + 1);  // norm of (B_{2n})_+ = max(max-eig, 0)
    bool odd_nonpositive_in_tail = false;

    Herm b_prev_even;  // B_{2n-2}, rolled forward
    Mat a_prev;        // A_{2n-2}
    {
        BlockPair p2 = f.block_at(2);
        b_prev_even = p2.B;
        even_posnorm[1] = std::max(max_eig(p2.B), 0.0);
        odd_min[1] = min_eig(f.block_at(1).B);
    }
    for (long n = 2; n <= n_max; ++n) {
        a_prev = f.block_at(2 * n - 2).A;
        BlockPair odd = f.block_at(2 * n - 1);
        BlockPair even = f.block_at(2 * n);
        odd_min[n] = min_eig(odd.B);
        even_posnorm[n] = std::max(max_eig(even.B), 0.0);
        if (n > n_max - tail_window && odd_min[n] <= 0.0) odd_nonpositive_in_tail = true;

        Herm odd_inv_sqrt = opp_power(odd.B, -0.5);
        double s1 = op_norm(opp_power(even.B, -0.5).mat() * odd.A.adjoint() * odd_inv_sqrt.mat());
        double s2 = op_norm(opp_power(b_prev_even, -0.5).mat() * a_prev * odd_inv_sqrt.mat());
        rep.margin_rows.push_back({double(n), s1, s2});
        b_prev_even = even.B;
    }

    double sup1 = 0.0, sup2 = 0.0;
    for (size_t i = rep.margin_rows.size() - tail_window; i < rep.margin_rows.size(); ++i) {
        sup1 = std::max(sup1, rep.margin_rows[i][1]);
        sup2 = std::max(sup2, rep.margin_rows[i][2]);
    }
    double sum = sup1 + sup2;
    rep.witness("tail_sup_s1", sup1);
    rep.witness("tail_sup_s2", sup2);
    rep.witness("tail_sup_sum", sum);
    bool margin_ok = sum < 1.0 - kMarginEps;
    if (!margin_ok && std::abs(sum - 1.0) <= kMarginEps)
        rep.notes.push_back("critical: tail sum within 1e-3 of the threshold 1");

    long head_len = std::max<long>(1, n_max / 10);
    std::vector<double> odd_head(odd_min.begin() + 1, odd_min.begin() + 1 + head_len);
    std::vector<double> odd_tail(odd_min.end() - tail_window, odd_min.end());
    bool cond1 = !odd_nonpositive_in_tail && detail::grows_on_window(odd_head, odd_tail);
    if (odd_nonpositive_in_tail)
        rep.notes.push_back("condition (1) violated: nonpositive odd-block eigenvalue in tail");
    else if (!cond1)
        rep.notes.push_back("condition (1) not evidenced: odd-block minimum not growing");

    std::vector<double> pos_all;
    for (long n = 1; n <= n_max; ++n)
        if (even_posnorm[n] > 0.0) pos_all.push_back(even_posnorm[n]);
    bool cond2;
    long zero_tail = 0, pos_tail = 0;
    for (long n = n_max - tail_window + 1; n <= n_max; ++n)
        (even_posnorm[n] > 0.0 ? pos_tail : zero_tail)++;
    if (pos_tail == 0) {
        cond2 = true;  // positive parts vanish along the tail
    } else {
        long ph = std::max<long>(1, long(pos_all.size()) / 10);
        std::vector<double> head(pos_all.begin(), pos_all.begin() + ph);
        std::vector<double> tail(pos_all.end() - std::min<long>(pos_tail, long(pos_all.size())),
                                 pos_all.end());
        cond2 = detail::grows_on_window(head, tail);
        if (!cond2)
            rep.notes.push_back(
                "condition (2) not evidenced: nonzero positive parts fail the growth check");
    }
    rep.witness("tail_zero_positive_parts", double(zero_tail));
    rep.witness("tail_nonzero_positive_parts", double(pos_tail));

    rep.pass = margin_ok && cond1 && cond2;
    if (rep.pass)
        rep.verdict = "margin and side conditions hold on window";
    else if (!margin_ok)
        rep.verdict = "fails (< 1 not satisfied)";
    else
        rep.verdict = "side conditions not satisfied on window";
    return rep;
}

struct EquivalenceRecord {
    bool p1 = false, p2 = false, p3 = false, equivalent = false;
    double min_eig_block = 0.0, min_eig_a = 0.0, min_eig_c = 0.0, min_eig_schur = 0.0;
    int rank_budget = 0;
};

namespace detail {

inline Mat assemble_block2(const Herm& A, const Mat& B, const Herm& C) {
    int m = A.dim(), k = C.dim();
    if (B.rows() != m || B.cols() != k)
        throw domain_error("schur block: coupling shape must be dim(A) x dim(C)");
    Mat big(m + k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) big(i, j) = A(i, j);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) big(m + i, m + j) = C(i, j);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) {
            big(i, m + j) = B(i, j);
            big(m + j, i) = std::conj(B(i, j));
        }
    return big;
}

// Smallest eigenvalue after discarding the `budget` most negative ones.
inline double min_eig_after_budget(std::vector<double> vals, int budget) {
    if (budget >= static_cast<int>(vals.size())) return 0.0;
    return vals[budget];  // eigh output is ascending
}

}  // namespace detail

// Positivity of [[A,B],[B*,C]] versus positivity of the diagonal blocks and the
// complement A - B C^{-1} B*, each predicate thresholded at -tol.
inline EquivalenceRecord schur_frobenius(const Herm& A, const Mat& B, const Herm& C,
                                         double tol) {
    if (tol < 0.0) throw domain_error("schur_frobenius: tol must be >= 0");
    EigenH ec = eigh(C);
    for (double mu : ec.values)
        if (std::abs(mu) <= tol)
            throw domain_error("schur_frobenius: C has an eigenvalue within the tolerance");
    EquivalenceRecord r;
    r.min_eig_block = min_eig(Herm(detail::assemble_block2(A, B, C)));
    r.min_eig_a = min_eig(A);
    r.min_eig_c = ec.values.front();
    Herm cinv = herm_inverse(C, tol);
    r.min_eig_schur = min_eig(Herm(A.mat() - B * cinv.mat() * B.adjoint()));
    r.p1 = r.min_eig_block >= -tol;
    r.p2 = r.min_eig_a >= -tol && r.min_eig_c >= -tol;
    r.p3 = r.min_eig_schur >= -tol;
    r.equivalent = r.p1 == (r.p2 && r.p3);
    return r;
}

// Finite-rank surrogate: each predicate may discard its rank_budget most negative
// eigenvalues (A and C budgeted separately inside P2); the kernel of C is lifted
// before inversion.
inline EquivalenceRecord schur_frobenius_modF(const Herm& A, const Mat& B, const Herm& C,
                                              int rank_budget, double tol) {
    if (tol < 0.0) throw domain_error("schur_frobenius_modF: tol must be >= 0");
    if (rank_budget < 0) throw domain_error("schur_frobenius_modF: rank_budget must be >= 0");
    EquivalenceRecord r;
    r.rank_budget = rank_budget;

    EigenH ec = eigh(C);
    double reg = 1.0 + std::max(std::abs(ec.values.front()), std::abs(ec.values.back()));
    double kernel_tol = std::max(tol, default_eps_pos(C));
    Herm c1 = spectral_map(C, [&](double mu) { return std::abs(mu) <= kernel_tol ? mu + reg : mu; });

    EigenH big = eigh(Herm(detail::assemble_block2(A, B, C)));
    r.min_eig_block = detail::min_eig_after_budget(big.values, rank_budget);
    EigenH ea = eigh(A);
    r.min_eig_a = detail::min_eig_after_budget(ea.values, rank_budget);
    r.min_eig_c = detail::min_eig_after_budget(ec.values, rank_budget);
    Herm c1inv = herm_inverse(c1, kernel_tol);
    EigenH es = eigh(Herm(A.mat() - B * c1inv.mat() * B.adjoint()));
    r.min_eig_schur = detail::min_eig_after_budget(es.values, rank_budget);

    r.p1 = r.min_eig_block >= -tol;
    r.p2 = r.min_eig_a >= -tol && r.min_eig_c >= -tol;
    r.p3 = r.min_eig_schur >= -tol;
    r.equivalent = r.p1 == (r.p2 && r.p3);
    return r;
}

struct PositivityProbe {
    double a = 0.0, c = 0.0;
    long calN = 0;
    long support_lo = 0, support_hi = 0;  // blocks (support_lo, support_hi]
    int trials = 0;
    std::uint64_t seed = 0;
    double min_quotient = 0.0;
    std::vector<cplx> failing_vector;
    bool pass = false;
};

// Monte-Carlo check of q(u) = ||(J - (c+a))u||^2 - a^2 ||u||^2 >= 0 on vectors
// supported strictly beyond the cutoff index; the evaluation is exact because the
// section is padded past the support.
inline PositivityProbe form_positivity_probe(const CoefficientFamily& f, double a, double c,
                                             int trials, long support_lo, long support_hi,
                                             std::uint64_t seed) {
    if (trials < 1) throw domain_error("form_positivity_probe: need trials >= 1");
    if (support_hi <= support_lo)
        throw domain_error("form_positivity_probe: empty support range");
    ConditionReport wit =
        thm_a_witnesses(f, c, a, std::max<long>(100, 2 * support_hi + 4));
    if (!wit.pass)
        throw domain_error("form_positivity_probe: tail hypotheses fail, no cutoff exists");
    long calN = static_cast<long>(wit.witness_value("calN"));
    if (support_lo < calN)
        throw domain_error("form_positivity_probe: support must start at or beyond the cutoff " +
                           std::to_string(calN));

    PositivityProbe probe;
    probe.a = a;
    probe.c = c;
    probe.calN = calN;
    probe.support_lo = support_lo;
    probe.support_hi = support_hi;
    probe.trials = trials;
    probe.seed = seed;

    TruncatedJacobi t = truncate(f, support_hi + 2);
    int d = t.d;
    long dim = t.dim();
    Rng rng(seed);
    double shift = c + a;
    probe.min_quotient = std::numeric_limits<double>::infinity();
    std::vector<cplx> u(dim);
    for (int trial = 0; trial < trials; ++trial) {
        std::fill(u.begin(), u.end(), cplx(0.0, 0.0));
        for (long blk = support_lo + 1; blk <= support_hi; ++blk)
            for (int i = 0; i < d; ++i) u[(blk - 1) * d + i] = rng.cnormal();
        std::vector<cplx> w = jops::apply(t, u);
        double num = 0.0, den = 0.0;
        for (long i = 0; i < dim; ++i) {
            num += std::norm(w[i] - shift * u[i]);
            den += std::norm(u[i]);
        }
        double q = (num - a * a * den) / den;
        if (q < probe.min_quotient) {
            probe.min_quotient = q;
            if (q < -1e-8) probe.failing_vector = u;
        }
    }
    probe.pass = probe.min_quotient >= -1e-8;
    if (probe.pass) probe.failing_vector.clear();
    return probe;
}

}  // namespace jops
