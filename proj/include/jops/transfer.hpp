// Scalar transfer matrices, k-step products and their eigenvalue data, asymptotic
// splitting diagnostics, log-scaled generalized-eigenvector recursion, and
// subordinacy ratio traces.
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "jops/family.hpp"
#include "jops/linalg.hpp"

namespace jops {

struct Transfer2 {
    cplx a11{0.0, 0.0}, a12{0.0, 0.0}, a21{0.0, 0.0}, a22{0.0, 0.0};
    long n = 0;
    double lambda = 0.0;

    cplx tr() const { return a11 + a22; }
    cplx det() const { return a11 * a22 - a12 * a21; }
    bool all_finite() const {
        return finite(a11) && finite(a12) && finite(a21) && finite(a22);
    }
    Mat to_mat() const {
        Mat m(2);
        m(0, 0) = a11;
        m(0, 1) = a12;
        m(1, 0) = a21;
        m(1, 1) = a22;
        return m;
    }
    friend Transfer2 operator*(const Transfer2& x, const Transfer2& y) {
        Transfer2 r;
        r.a11 = x.a11 * y.a11 + x.a12 * y.a21;
        r.a12 = x.a11 * y.a12 + x.a12 * y.a22;
        r.a21 = x.a21 * y.a11 + x.a22 * y.a21;
        r.a22 = x.a21 * y.a12 + x.a22 * y.a22;
        r.n = x.n;
        r.lambda = x.lambda;
        return r;
    }
    friend Transfer2 operator-(const Transfer2& x, const Transfer2& y) {
        Transfer2 r;
        r.a11 = x.a11 - y.a11;
        r.a12 = x.a12 - y.a12;
        r.a21 = x.a21 - y.a21;
        r.a22 = x.a22 - y.a22;
        r.n = x.n;
        r.lambda = x.lambda;
        return r;
    }
    double norm() const { return op_norm(to_mat()); }
};

// One-step propagator of a_{n-1} u_{n-1} + b_n u_n + a_n u_{n+1} = lambda u_n.
inline Transfer2 transfer_step(const CoefficientFamily& f, long n, double lambda) {
    f.require_scalar("transfer_step");
    if (n < 2) throw domain_error("transfer_step: need n >= 2");
    double a_prev = f.a_of(n - 1), a_n = f.a_of(n), b_n = f.b_of(n);
    Transfer2 t;
    t.n = n;
    t.lambda = lambda;
    t.a12 = 1.0;
    t.a21 = -a_prev / a_n;
    t.a22 = (lambda - b_n) / a_n;
    return t;
}

// Product of k consecutive one-step matrices ending at index k*n.
inline Transfer2 kstep_product(const CoefficientFamily& f, long n, int k, double lambda) {
    if (k != 2 && k != 3) throw domain_error("kstep_product: k must be 2 or 3");
    if (n < 2) throw domain_error("kstep_product: need group index >= 2");
    if (k * n > kHorizonCap) throw domain_error("kstep_product: group beyond horizon cap");
    Transfer2 p = transfer_step(f, k * n - k + 1, lambda);
    for (long idx = k * n - k + 2; idx <= k * n; ++idx) p = transfer_step(f, idx, lambda) * p;
    p.n = n;
    p.lambda = lambda;
    return p;
}

// Eigenvalue pair tr/2 +- sqrt((tr/2)^2 - det), principal branch.
inline std::pair<cplx, cplx> eig_2x2(const Transfer2& m) {
    if (!m.all_finite()) throw domain_error("eig_2x2: non-finite entries");
    cplx h = 0.5 * m.tr();
    cplx s = std::sqrt(h * h - m.det());
    return {h + s, h - s};
}

// Closed forms for the 3-step products of the step3 family.
inline double step3_det_form(double alpha, long n) {
    return std::pow(1.0 - 1.0 / double(n), alpha);
}
inline double step3_trace_form(double alpha, double delta, double lambda, long n) {
    double m = 3.0 * double(n);
    return delta - 3.0 * lambda / std::pow(m, alpha) - alpha * delta / m;
}

// Leading/remainder splitting of the step3 3-step product: the leading part keeps
// the constant, 1/n, and 1/n^alpha terms; the remainder is the exact difference.
inline std::pair<std::vector<Transfer2>, std::vector<Transfer2>> step3_splitting(
    const CoefficientFamily& f, double lambda, long n_lo, long n_hi) {
    if (f.name() != "step3") throw domain_error("step3_splitting: family must be step3");
    if (n_lo < 2 || n_hi < n_lo) throw domain_error("step3_splitting: bad group range");
    double alpha = f.params().at("alpha");
    double delta = f.params().at("delta");
    std::vector<Transfer2> v_seq, r_seq;
    v_seq.reserve(n_hi - n_lo + 1);
    r_seq.reserve(n_hi - n_lo + 1);
    for (long n = n_lo; n <= n_hi; ++n) {
        double m = 3.0 * double(n);
        double ma = std::pow(m, alpha);
        Transfer2 v;
        v.n = n;
        v.lambda = lambda;
        v.a11 = -lambda / ma;
        v.a12 = -1.0 + alpha / m;
        v.a21 = 1.0 - 2.0 * alpha / m + delta * lambda / ma;
        v.a22 = delta - 2.0 * lambda / ma - delta * alpha / m;
        Transfer2 sigma = kstep_product(f, n, 3, lambda);
        Transfer2 r = sigma - v;
        r.n = n;
        v_seq.push_back(v);
        r_seq.push_back(r);
    }
    return {std::move(v_seq), std::move(r_seq)};
}

struct LevinsonReport {
    long n_lo = 0, n_hi = 0;
    double min_abs_det_a = 0.0, min_abs_det_v = 0.0;
    bool det_nonvanishing = false;
    double bv_partial_sum = 0.0, l1_partial_sum = 0.0;
    double bv_fit_exponent = 0.0, l1_fit_exponent = 0.0;
    bool bv_summable = false, l1_summable = false;  // fitted increment exponent < -1
    cplx vinf_eig1{0.0, 0.0}, vinf_eig2{0.0, 0.0};
    double eig_separation = 0.0, moduli_separation = 0.0;
    bool eigs_nonzero = false, eigs_distinct = false, moduli_distinct = false;
    bool flag_equal_moduli_distinct_eigs = false;
    bool pass = false;
};

// Hypothesis diagnostics for the asymptotic-splitting theorem: nonvanishing
// determinants, bounded variation of the leading part, summable remainder, and a
// limit matrix with nonzero eigenvalues of distinct moduli.
inline LevinsonReport levinson_hypotheses(const std::vector<Transfer2>& v_seq,
                                          const std::vector<Transfer2>& r_seq, long n_lo,
                                          long n_hi) {
    if (v_seq.size() != r_seq.size() || v_seq.empty())
        throw domain_error("levinson_hypotheses: sequences must be nonempty and aligned");
    if (n_hi - n_lo + 1 != static_cast<long>(v_seq.size()))
        throw domain_error("levinson_hypotheses: window does not match sequence length");
    LevinsonReport rep;
    rep.n_lo = n_lo;
    rep.n_hi = n_hi;
    rep.min_abs_det_a = std::numeric_limits<double>::infinity();
    rep.min_abs_det_v = std::numeric_limits<double>::infinity();

    std::vector<double> lbx, lby, lrx, lry;
    for (size_t i = 0; i < v_seq.size(); ++i) {
        Transfer2 a = v_seq[i];
        a.a11 += r_seq[i].a11;
        a.a12 += r_seq[i].a12;
        a.a21 += r_seq[i].a21;
        a.a22 += r_seq[i].a22;
        rep.min_abs_det_a = std::min(rep.min_abs_det_a, std::abs(a.det()));
        rep.min_abs_det_v = std::min(rep.min_abs_det_v, std::abs(v_seq[i].det()));
        double rn = r_seq[i].norm();
        rep.l1_partial_sum += rn;
        if (rn > 0.0) {
            lrx.push_back(std::log(double(n_lo + long(i))));
            lry.push_back(std::log(rn));
        }
        if (i + 1 < v_seq.size()) {
            double dv = (v_seq[i + 1] - v_seq[i]).norm();
            rep.bv_partial_sum += dv;
            if (dv > 0.0) {
                lbx.push_back(std::log(double(n_lo + long(i))));
                lby.push_back(std::log(dv));
            }
        }
    }
    rep.det_nonvanishing = rep.min_abs_det_a > 1e-12 && rep.min_abs_det_v > 1e-12;
    if (lbx.size() >= 2) rep.bv_fit_exponent = fit_log_slope(lbx, lby);
    if (lrx.size() >= 2) rep.l1_fit_exponent = fit_log_slope(lrx, lry);
    rep.bv_summable = lbx.size() >= 2 && rep.bv_fit_exponent < -1.0;
    rep.l1_summable = lrx.size() >= 2 && rep.l1_fit_exponent < -1.0;

    auto [e1, e2] = eig_2x2(v_seq.back());
    rep.vinf_eig1 = e1;
    rep.vinf_eig2 = e2;
    double scale = std::abs(e1) + std::abs(e2);
    rep.eig_separation = std::abs(e1 - e2);
    rep.moduli_separation = std::abs(std::abs(e1) - std::abs(e2));
    rep.eigs_nonzero = std::abs(e1) > 1e-12 && std::abs(e2) > 1e-12;
    rep.eigs_distinct = rep.eig_separation > 1e-9 * std::max(scale, 1.0);
    rep.moduli_distinct = rep.moduli_separation > 1e-6 * std::max(scale, 1.0);
    rep.flag_equal_moduli_distinct_eigs = rep.eigs_distinct && !rep.moduli_distinct;
    rep.pass = rep.det_nonvanishing && rep.bv_summable && rep.l1_summable &&
               rep.eigs_nonzero && rep.eigs_distinct && rep.moduli_distinct;
    return rep;
}

// One value of a solution path: value = mantissa * exp(logscale). re/im of the unit
// direction plus the total log modulus are the stable exported representation.
struct PathEntry {
    cplx mantissa{0.0, 0.0};
    double logscale = 0.0;
};

struct SolutionPath {
    double lambda = 0.0;
    std::string family;
    bool forward = true;
    std::vector<PathEntry> values;  // values[i] holds u_{i+1}

    long size() const { return static_cast<long>(values.size()); }
    double log_abs(long n) const {  // natural log of |u_n|; -inf for exact zero
        const PathEntry& e = values[n - 1];
        double m = std::abs(e.mantissa);
        return m == 0.0 ? -std::numeric_limits<double>::infinity()
                        : std::log(m) + e.logscale;
    }
    cplx direction(long n) const {
        const PathEntry& e = values[n - 1];
        double m = std::abs(e.mantissa);
        return m == 0.0 ? cplx(0.0, 0.0) : e.mantissa / m;
    }
};

inline constexpr double kPathRescaleHi = 1e150;
inline constexpr double kPathRescaleLo = 1e-150;

// Three-term recursion at spectral parameter lambda, run forward from (u_1, u_2) or
// backward from (u_N, u_{N-1}); magnitudes are carried as mantissa/log-scale pairs.
inline SolutionPath solve_recursion(const CoefficientFamily& f, double lambda,
                                    std::pair<cplx, cplx> init, long N, bool forward) {
    f.require_scalar("solve_recursion");
    if (N < 3) throw domain_error("solve_recursion: need N >= 3");
    if (N > kHorizonCap) throw domain_error("solve_recursion: N beyond horizon cap");
    SolutionPath path;
    path.lambda = lambda;
    path.family = f.name();
    path.forward = forward;
    path.values.resize(N);

    std::vector<double> a(N + 1), b(N + 1);
    for (long n = 1; n <= N; ++n) {
        a[n] = f.a_of(n);
        b[n] = f.b_of(n);
    }

    auto rescale = [](cplx& x, cplx& y, double& ls) {
        double m = std::max(std::abs(x), std::abs(y));
        if (m > kPathRescaleHi || (m > 0.0 && m < kPathRescaleLo)) {
            x /= m;
            y /= m;
            ls += std::log(m);
        }
    };

    if (forward) {
        cplx u_prev = init.first, u_cur = init.second;
        double ls = 0.0;
        path.values[0] = {u_prev, ls};
        path.values[1] = {u_cur, ls};
        for (long n = 2; n < N; ++n) {
            cplx u_next = ((lambda - b[n]) * u_cur - a[n - 1] * u_prev) / a[n];
            if (!finite(u_next))
                throw domain_error("solve_recursion: overflow at index " + std::to_string(n + 1));
            path.values[n] = {u_next, ls};
            u_prev = u_cur;
            u_cur = u_next;
            rescale(u_prev, u_cur, ls);
        }
    } else {
        cplx u_next = init.first, u_cur = init.second;  // (u_N, u_{N-1})
        double ls = 0.0;
        path.values[N - 1] = {u_next, ls};
        path.values[N - 2] = {u_cur, ls};
        for (long n = N - 1; n >= 2; --n) {
            cplx u_prev = ((lambda - b[n]) * u_cur - a[n] * u_next) / a[n - 1];
            if (!finite(u_prev))
                throw domain_error("solve_recursion: overflow at index " + std::to_string(n - 1));
            path.values[n - 2] = {u_prev, ls};
            u_next = u_cur;
            u_cur = u_prev;
            rescale(u_next, u_cur, ls);
        }
    }
    return path;
}

struct SubordinacyTrace {
    double lambda = 0.0;
    std::vector<long> checkpoints;
    std::vector<double> ratios;
    std::vector<double> log10_ratios;
    std::string trend;  // to-zero | bounded-oscillating | inconclusive
};

namespace detail {

// Running log of a sum of squared magnitudes, kept as max-exponent plus residue.
struct LogSumSq {
    double m = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    void add(double log_abs_value) {
        if (log_abs_value == -std::numeric_limits<double>::infinity()) return;
        double l = 2.0 * log_abs_value;
        if (l <= m) {
            s += std::exp(l - m);
        } else {
            s = s * std::exp(m - l) + 1.0;
            m = l;
        }
    }
    double log() const { return m + std::log(s); }
    bool empty() const { return s == 0.0; }
};

}  // namespace detail

inline SubordinacyTrace subordinacy_ratio(const SolutionPath& u, const SolutionPath& v) {
    if (u.lambda != v.lambda || u.family != v.family)
        throw domain_error("subordinacy_ratio: paths must share family and spectral parameter");
    long L = std::min(u.size(), v.size());
    if (L < 100) throw domain_error("subordinacy_ratio: need paths of length >= 100");

    // Independence check via the scaled cross term u_1 v_2 - u_2 v_1.
    {
        double l1 = u.log_abs(1) + v.log_abs(2);
        double l2 = u.log_abs(2) + v.log_abs(1);
        double top = std::max(l1, l2);
        if (top == -std::numeric_limits<double>::infinity())
            throw domain_error("subordinacy_ratio: zero initial data");
        cplx t1 = u.direction(1) * v.direction(2) * std::exp(std::min(l1 - top, 0.0));
        cplx t2 = u.direction(2) * v.direction(1) * std::exp(std::min(l2 - top, 0.0));
        if (std::isinf(l1 - top) || l1 - top < -700.0) t1 = 0.0;
        if (std::isinf(l2 - top) || l2 - top < -700.0) t2 = 0.0;
        double num = std::abs(t1 - t2);
        double den = std::abs(t1) + std::abs(t2);
        if (den == 0.0 || num / den <= 1e-10)
            throw domain_error("subordinacy_ratio: solutions are not independent");
    }

    SubordinacyTrace trace;
    trace.lambda = u.lambda;
    for (int k = 0;; ++k) {
        long c = static_cast<long>(std::llround(std::pow(10.0, 2.0 + 0.5 * k)));
        if (c >= L) break;
        trace.checkpoints.push_back(c);
    }
    trace.checkpoints.push_back(L);

    detail::LogSumSq su, sv;
    size_t ck = 0;
    for (long n = 1; n <= L && ck < trace.checkpoints.size(); ++n) {
        su.add(u.log_abs(n));
        sv.add(v.log_abs(n));
        if (n == trace.checkpoints[ck]) {
            if (su.empty() || sv.empty())
                throw domain_error("subordinacy_ratio: vanishing partial sums");
            double lr = (su.log() - sv.log()) / std::log(10.0);
            trace.log10_ratios.push_back(lr);
            trace.ratios.push_back(std::pow(10.0, lr));
            ++ck;
        }
    }

    const std::vector<double>& g = trace.log10_ratios;
    size_t m = g.size();
    bool to_zero = m >= 3 && g[m - 1] <= g[m - 2] - 1.0 && g[m - 2] <= g[m - 3] - 1.0;
    bool bounded = true;
    double lo = std::log10(0.05), hi = std::log10(20.0);
    for (double x : g)
        if (x < lo || x > hi) bounded = false;
    trace.trend = to_zero ? "to-zero" : (bounded ? "bounded-oscillating" : "inconclusive");
    return trace;
}

struct LogProduct {
    double log_modulus = 0.0;
    double phase = 0.0;
};

// Telescoped log of prod_{k=n0}^{n-1} mu_k: summed log moduli and accumulated phase.
inline LogProduct log_product(const std::vector<cplx>& mu_seq, long n0, long n) {
    if (n <= n0) throw domain_error("log_product: need n > n0");
    if (n - n0 > static_cast<long>(mu_seq.size()))
        throw domain_error("log_product: sequence shorter than requested range");
    if (n - n0 > kHorizonCap) throw domain_error("log_product: range beyond horizon cap");
    LogProduct out;
    for (long k = n0; k < n; ++k) {
        cplx mu = mu_seq[k - n0];
        double m = std::abs(mu);
        if (m == 0.0)
            throw domain_error("log_product: zero factor at index " + std::to_string(k));
        out.log_modulus += std::log(m);
        out.phase += std::arg(mu);
    }
    return out;
}

// Two-step eigenvalue branch -1 + alpha/(2k) + sign * sqrt(lambda) (2k)^{-(alpha-beta/2)}
// used by the slow-decay drift diagnostics (lambda > 0).
inline cplx heuristic2step_branch(double alpha, double beta, double lambda, long k, int sign) {
    if (lambda <= 0.0) throw domain_error("heuristic2step_branch: need lambda > 0");
    if (k < 1) throw domain_error("heuristic2step_branch: need k >= 1");
    double tk = 2.0 * double(k);
    double root = std::sqrt(lambda) * std::pow(tk, -(alpha - 0.5 * beta));
    return cplx(-1.0 + alpha / tk + (sign >= 0 ? root : -root), 0.0);
}

}  // namespace jops
