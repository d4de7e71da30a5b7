// Eigenvalue counting and extraction for truncated sections via Sylvester-inertia
// LDL recursion with bisection, plus truncation-schedule spectrum classification.
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "jops/family.hpp"
#include "jops/linalg.hpp"

namespace jops {

struct Inertia {
    long n_minus = 0, n_zero = 0, n_plus = 0;
    long total() const { return n_minus + n_zero + n_plus; }
};

class singular_shift_error : public domain_error {
public:
    explicit singular_shift_error(double lam)
        : domain_error("ldl_inertia: persistent singular pivot near shift " +
                       std::to_string(lam)),
          lambda(lam) {}
    double lambda;
};

struct Interval {
    double lo = 0.0, hi = 0.0;
    bool open_lo = true, open_hi = true;
    bool unbounded_lo = false, unbounded_hi = false;

    static Interval open(double lo, double hi) {
        if (!(lo < hi)) throw domain_error("Interval: need lo < hi");
        Interval i;
        i.lo = lo;
        i.hi = hi;
        return i;
    }
    static Interval above(double c) {  // (c, +inf), right endpoint resolved per section
        Interval i;
        i.lo = c;
        i.hi = c + 1.0;
        i.unbounded_hi = true;
        return i;
    }
    static Interval below(double c) {  // (-inf, c)
        Interval i;
        i.lo = c - 1.0;
        i.hi = c;
        i.unbounded_lo = true;
        return i;
    }
};

// Upper bound on the section norm: max over block rows of the attached block norms.
inline double gershgorin_bound(const TruncatedJacobi& t) {
    double best = 0.0;
    for (long k = 0; k < t.N; ++k) {
        double s = t.diag_norms[k];
        if (k > 0) s += t.offdiag_norms[k - 1];
        if (k + 1 < t.N) s += t.offdiag_norms[k];
        best = std::max(best, s);
    }
    return best;
}

// Replaces half-line placeholders by the section bound plus a unit of slack.
inline Interval resolve(const TruncatedJacobi& t, Interval I) {
    if (I.unbounded_lo || I.unbounded_hi) {
        double bound = gershgorin_bound(t) + 1.0;
        if (I.unbounded_hi) I.hi = std::max(bound, I.lo + 1.0);
        if (I.unbounded_lo) I.lo = std::min(-bound, I.hi - 1.0);
    }
    if (!(I.lo < I.hi)) throw domain_error("Interval: need lo < hi");
    if (!std::isfinite(I.lo) || !std::isfinite(I.hi))
        throw domain_error("Interval: endpoints must be finite");
    return I;
}

inline double sigma_tol(const TruncatedJacobi& t, double lambda) {
    return 1e-12 * (1.0 + std::abs(lambda) + t.max_block_norm);
}

namespace detail {

// One factorization pass D_1 = B_1 - lambda, D_k = B_k - lambda - A_{k-1}* D_{k-1}^{-1} A_{k-1};
// nullopt when a pivot eigenvalue lands inside the singularity window.
inline std::optional<Inertia> ldl_pass(const TruncatedJacobi& t, double lambda, double stol) {
    Inertia in;
    if (t.d == 1) {
        double carry = 0.0;  // |a_{k-1}|^2 / D_{k-1}
        for (long k = 0; k < t.N; ++k) {
            double dk = t.scalar_b[k] - lambda - carry;
            if (!std::isfinite(dk) || std::abs(dk) <= stol) return std::nullopt;
            if (dk < 0.0)
                ++in.n_minus;
            else
                ++in.n_plus;
            if (k + 1 < t.N) carry = t.scalar_a_sq[k] / dk;
        }
        return in;
    }
    int d = t.d;
    Herm prev_inv;
    for (long k = 0; k < t.N; ++k) {
        Mat dk = t.diag[k].mat() - cplx(lambda, 0.0) * Mat::identity(d);
        if (k > 0) {
            const Mat& a = t.offdiag[k - 1];
            dk = dk - a.adjoint() * prev_inv.mat() * a;
        }
        EigenH e = eigh(Herm(dk));
        for (double mu : e.values) {
            if (!std::isfinite(mu) || std::abs(mu) <= stol) return std::nullopt;
            if (mu < 0.0)
                ++in.n_minus;
            else
                ++in.n_plus;
        }
        if (k + 1 < t.N) {
            Mat inv(d);
            for (int c = 0; c < d; ++c) {
                double w = 1.0 / e.values[c];
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        inv(i, j) += w * e.vectors(i, c) * std::conj(e.vectors(j, c));
            }
            prev_inv = Herm(inv);
        }
    }
    return in;
}

}  // namespace detail

// Inertia of the section minus lambda. Exact shift hits are resolved by evaluating
// just below and just above: n_zero is the count the two sides disagree on.
inline Inertia ldl_inertia(const TruncatedJacobi& t, double lambda) {
    if (!std::isfinite(lambda)) throw domain_error("ldl_inertia: shift must be finite");
    if (auto direct = detail::ldl_pass(t, lambda, sigma_tol(t, lambda))) return *direct;
    double base = 1e-9 * (1.0 + std::abs(lambda));
    for (int attempt = 0; attempt < 6; ++attempt) {
        double nudge = base * std::pow(8.0, attempt);
        double lam_lo = lambda - nudge, lam_hi = lambda + nudge;
        auto lo = detail::ldl_pass(t, lam_lo, sigma_tol(t, lam_lo));
        auto hi = detail::ldl_pass(t, lam_hi, sigma_tol(t, lam_hi));
        if (lo && hi && hi->n_minus >= lo->n_minus) {
            Inertia r;
            r.n_minus = lo->n_minus;
            r.n_zero = hi->n_minus - lo->n_minus;
            r.n_plus = t.dim() - r.n_minus - r.n_zero;
            return r;
        }
    }
    throw singular_shift_error(lambda);
}

namespace detail {

// Eigenvalues strictly below the endpoint, adjusted for endpoint openness: an open
// lower endpoint excludes eigenvalues sitting on it, a closed upper endpoint keeps them.
inline long below_endpoint(const Inertia& in, bool is_lo, bool open_flag) {
    if (is_lo) return in.n_minus + (open_flag ? in.n_zero : 0);
    return in.n_minus + (open_flag ? 0 : in.n_zero);
}

}  // namespace detail

struct CountResult {
    long value = 0;
    double lo = 0.0, hi = 0.0;  // resolved endpoints
    bool lo_on_eigenvalue = false, hi_on_eigenvalue = false;  // endpoint auto-nudge fired
};

inline CountResult count_detail(const TruncatedJacobi& t, Interval I) {
    I = resolve(t, I);
    Inertia il = ldl_inertia(t, I.lo);
    Inertia ih = ldl_inertia(t, I.hi);
    CountResult r;
    r.value = detail::below_endpoint(ih, false, I.open_hi) -
              detail::below_endpoint(il, true, I.open_lo);
    r.lo = I.lo;
    r.hi = I.hi;
    r.lo_on_eigenvalue = il.n_zero > 0;
    r.hi_on_eigenvalue = ih.n_zero > 0;
    return r;
}

inline long count(const TruncatedJacobi& t, const Interval& I) {
    return count_detail(t, I).value;
}

inline std::vector<double> eigenvalues_in(const TruncatedJacobi& t, Interval I, double tol) {
    if (tol <= 0.0) throw domain_error("eigenvalues_in: tol must be > 0");
    I = resolve(t, I);
    Inertia il = ldl_inertia(t, I.lo);
    Inertia ih = ldl_inertia(t, I.hi);
    long clo = detail::below_endpoint(il, true, I.open_lo);
    long chi = detail::below_endpoint(ih, false, I.open_hi);
    std::vector<double> out;
    if (chi <= clo) return out;
    struct Seg {
        double lo, hi;
        long clo, chi;
    };
    std::vector<Seg> stack{{I.lo, I.hi, clo, chi}};
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        if (s.chi == s.clo) continue;
        if (s.hi - s.lo <= tol) {
            double mid = 0.5 * (s.lo + s.hi);
            for (long i = 0; i < s.chi - s.clo; ++i) out.push_back(mid);
            continue;
        }
        double mid = 0.5 * (s.lo + s.hi);
        long cm = ldl_inertia(t, mid).n_minus;
        cm = std::min(std::max(cm, s.clo), s.chi);
        stack.push_back({mid, s.hi, cm, s.chi});
        stack.push_back({s.lo, mid, s.clo, cm});
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline double match_tol_at(double lambda) { return 1e-6 * (1.0 + std::abs(lambda)); }

struct SubintervalReport {
    double lo = 0.0, hi = 0.0;
    std::vector<long> counts;                       // per schedule entry
    std::vector<std::vector<double>> eigenvalues;   // per schedule entry
    bool counts_stable = false;                     // equal for the last two N
    bool all_matched = false;                       // last pair matched within match_tol
    double max_match_distance = 0.0;
    double count_slope = 0.0;                       // count vs ln N, least squares
    bool superlinear = false;                       // increments in ln N non-collapsing
    double spacing_exponent = 0.0;                  // log median spacing vs log N
    bool spacing_available = false;
    std::string tag;  // discrete-like | continuous-like | inconclusive
};

struct SpectralReport {
    std::string family;
    std::vector<long> schedule;
    double lo = 0.0, hi = 0.0;
    int grid = 1;
    double slope_min = 0.8;
    double spacing_exp_max = -0.15;
    std::vector<SubintervalReport> subs;
};

namespace detail {

inline double nearest_distance(const std::vector<double>& sorted, double x) {
    if (sorted.empty()) return std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != sorted.end()) best = std::min(best, std::abs(*it - x));
    if (it != sorted.begin()) best = std::min(best, std::abs(*(it - 1) - x));
    return best;
}

inline double median_spacing(const std::vector<double>& sorted) {
    std::vector<double> gaps;
    for (size_t i = 1; i < sorted.size(); ++i) gaps.push_back(sorted[i] - sorted[i - 1]);
    if (gaps.empty()) return 0.0;
    std::sort(gaps.begin(), gaps.end());
    size_t m = gaps.size();
    return (m % 2 == 1) ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
}

}  // namespace detail

inline SpectralReport classify(const CoefficientFamily& f, Interval I, int grid,
                               const std::vector<long>& schedule) {
    if (grid < 1) throw domain_error("classify: grid must be >= 1");
    if (schedule.size() < 3) throw domain_error("classify: schedule needs >= 3 entries");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1])
            throw domain_error("classify: schedule must be strictly increasing");

    std::vector<TruncatedJacobi> sections;
    sections.reserve(schedule.size());
    for (long N : schedule) sections.push_back(truncate(f, N));
    I = resolve(sections.back(), I);

    SpectralReport rep;
    rep.family = f.name();
    rep.schedule = schedule;
    rep.lo = I.lo;
    rep.hi = I.hi;
    rep.grid = grid;
    double tol = 1e-9 * (1.0 + std::max(std::abs(I.lo), std::abs(I.hi)));

    for (int g = 0; g < grid; ++g) {
        SubintervalReport sub;
        sub.lo = I.lo + (I.hi - I.lo) * g / grid;
        sub.hi = (g + 1 == grid) ? I.hi : I.lo + (I.hi - I.lo) * (g + 1) / grid;
        Interval si = Interval::open(sub.lo, sub.hi);
        si.open_lo = (g == 0) ? I.open_lo : false;   // internal cuts: closed below,
        si.open_hi = (g + 1 == grid) ? I.open_hi : true;  // open above, so nothing double-counts
        for (const TruncatedJacobi& t : sections) {
            sub.eigenvalues.push_back(eigenvalues_in(t, si, tol));
            sub.counts.push_back(static_cast<long>(sub.eigenvalues.back().size()));
        }
        size_t m = schedule.size();
        sub.counts_stable = sub.counts[m - 1] == sub.counts[m - 2];
        sub.all_matched = true;
        for (double e : sub.eigenvalues[m - 2]) {
            double dist = detail::nearest_distance(sub.eigenvalues[m - 1], e);
            sub.max_match_distance = std::max(sub.max_match_distance, dist);
            if (dist > match_tol_at(e)) sub.all_matched = false;
        }
        if (sub.eigenvalues[m - 2].empty()) sub.all_matched = sub.counts_stable;

        std::vector<double> lns, cnts;
        for (size_t i = 0; i < m; ++i) {
            lns.push_back(std::log(double(schedule[i])));
            cnts.push_back(double(sub.counts[i]));
        }
        sub.count_slope = fit_log_slope(lns, cnts);
        double d_first = (cnts[1] - cnts[0]) / (lns[1] - lns[0]);
        double d_last = (cnts[m - 1] - cnts[m - 2]) / (lns[m - 1] - lns[m - 2]);
        sub.superlinear = d_last > 0.0 && d_last >= 0.5 * d_first;

        std::vector<double> lx, ly;
        for (size_t i = 0; i < m; ++i) {
            if (sub.eigenvalues[i].size() >= 3) {
                double ms = detail::median_spacing(sub.eigenvalues[i]);
                if (ms > 0.0) {
                    lx.push_back(std::log(double(schedule[i])));
                    ly.push_back(std::log(ms));
                }
            }
        }
        sub.spacing_available = lx.size() == m;
        if (lx.size() >= 2) sub.spacing_exponent = fit_log_slope(lx, ly);

        bool increasing = true;
        for (size_t i = 1; i < m; ++i)
            if (sub.counts[i] <= sub.counts[i - 1]) increasing = false;

        if (sub.counts_stable && sub.all_matched)
            sub.tag = "discrete-like";
        else if (increasing && sub.count_slope >= rep.slope_min && sub.superlinear &&
                 sub.spacing_available && sub.spacing_exponent <= rep.spacing_exp_max)
            sub.tag = "continuous-like";
        else
            sub.tag = "inconclusive";
        rep.subs.push_back(std::move(sub));
    }
    return rep;
}

}  // namespace jops
