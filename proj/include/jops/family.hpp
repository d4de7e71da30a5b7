// Coefficient families (A_n, B_n) for the catalog of block Jacobi operators,
// custom-table families, Dirichlet truncations, and the relative-unboundedness
// residual sums of the J_{alpha,beta} example.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jops/linalg.hpp"

namespace jops {

inline constexpr long kHorizonCap = 10000000L;  // generators reject n beyond this
inline constexpr long kTruncationCap = 1000000L;  // dN memory guard

struct BlockPair {
    Mat A;   // off-diagonal block A_n (invertible)
    Herm B;  // diagonal block B_n
};

class table_parse_error : public domain_error {
public:
    table_parse_error(const std::string& what, long line)
        : domain_error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    long line_number;
};

class CoefficientFamily {
public:
    using Generator = std::function<BlockPair(long)>;

    CoefficientFamily(std::string name, int block_dim, std::map<std::string, double> params,
                      Generator gen)
        : name_(std::move(name)), d_(block_dim), params_(std::move(params)), gen_(std::move(gen)) {
        if (d_ < 1) throw domain_error("CoefficientFamily: block_dim must be >= 1");
    }

    const std::string& name() const { return name_; }
    int block_dim() const { return d_; }
    const std::map<std::string, double>& params() const { return params_; }

    BlockPair block_at(long n) const {
        if (n < 1) throw domain_error("block_at: index must be >= 1");
        if (n > kHorizonCap) throw domain_error("block_at: index beyond horizon cap 1e7");
        BlockPair blk = gen_(n);
        if (std::abs(blk.A.det()) <= 0.0)
            throw domain_error(name_ + ": A_" + std::to_string(n) + " is singular");
        return blk;
    }

    // Scalar accessors for the transfer-dynamics layer (d = 1, real entries only).
    double a_of(long n) const {
        require_scalar("a_of");
        cplx a = block_at(n).A(0, 0);
        if (a.imag() != 0.0)
            throw domain_error("a_of: off-diagonal entry is not real at index " +
                               std::to_string(n));
        return a.real();
    }
    double b_of(long n) const {
        require_scalar("b_of");
        return block_at(n).B(0, 0).real();
    }

    void require_scalar(const char* who) const {
        if (d_ != 1) throw domain_error(std::string(who) + ": family is not scalar (d = " +
                                        std::to_string(d_) + ")");
    }

private:
    std::string name_;
    int d_;
    std::map<std::string, double> params_;
    Generator gen_;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw domain_error(msg);
}

inline BlockPair scalar_blocks(double a, double b) {
    BlockPair p{Mat(1), Herm(1)};
    p.A(0, 0) = a;
    p.B.set(0, 0, b);
    return p;
}

}  // namespace detail

// J_alpha of the relative-unboundedness example: a_n = n^alpha, b_n = 0.
inline CoefficientFamily scalar_power(double alpha) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "scalar_power: need 0 < alpha <= 1");
    return CoefficientFamily("scalar_power", 1, {{"alpha", alpha}}, [alpha](long n) {
        return detail::scalar_blocks(std::pow(double(n), alpha), 0.0);
    });
}

// J_{alpha,beta}: a_n = n^alpha, b_n = n^beta with 0 < beta < alpha <= 1.
inline CoefficientFamily scalar_power_diag(double alpha, double beta) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "scalar_power_diag: need 0 < alpha <= 1");
    detail::require(beta > 0.0 && beta < alpha, "scalar_power_diag: need 0 < beta < alpha");
    return CoefficientFamily("scalar_power_diag", 1, {{"alpha", alpha}, {"beta", beta}},
                             [alpha, beta](long n) {
                                 return detail::scalar_blocks(std::pow(double(n), alpha),
                                                              std::pow(double(n), beta));
                             });
}

// a_n = n^alpha; b_n = b n^alpha on odd n, 0 on even n; 2/3 <= alpha < 1, b > 0.
inline CoefficientFamily example1(double alpha, double b) {
    detail::require(alpha >= 2.0 / 3.0 && alpha < 1.0, "example1: need 2/3 <= alpha < 1");
    detail::require(b > 0.0, "example1: need b > 0");
    return CoefficientFamily("example1", 1, {{"alpha", alpha}, {"b", b}}, [alpha, b](long n) {
        double diag = (n % 2 == 1) ? b * std::pow(double(n), alpha) : 0.0;
        return detail::scalar_blocks(std::pow(double(n), alpha), diag);
    });
}

// a_n = n^alpha; b_n = n^beta on odd n, 0 on even n. Construction enforces only
// 1/2 < alpha < 1 and 0 < beta < alpha; the stricter 2alpha > max{1+beta, 2-beta}
// regime of the two-step analysis is a property of the asymptotics, not the family.
inline CoefficientFamily heuristic2step(double alpha, double beta) {
    detail::require(alpha > 0.5 && alpha < 1.0, "heuristic2step: need 1/2 < alpha < 1");
    detail::require(beta > 0.0 && beta < alpha, "heuristic2step: need 0 < beta < alpha");
    return CoefficientFamily("heuristic2step", 1, {{"alpha", alpha}, {"beta", beta}},
                             [alpha, beta](long n) {
                                 double diag = (n % 2 == 1) ? std::pow(double(n), beta) : 0.0;
                                 return detail::scalar_blocks(std::pow(double(n), alpha), diag);
                             });
}

// a_n = n^alpha; b_n = delta n^alpha on multiples of 3, 0 otherwise; delta > 0
// (the a.c. conclusion needs delta < 2, but the family is defined for all delta > 0).
inline CoefficientFamily step3(double alpha, double delta) {
    detail::require(alpha > 0.5 && alpha < 1.0, "step3: need 1/2 < alpha < 1");
    detail::require(delta > 0.0, "step3: need delta > 0");
    return CoefficientFamily("step3", 1, {{"alpha", alpha}, {"delta", delta}},
                             [alpha, delta](long n) {
                                 double diag = (n % 3 == 0) ? delta * std::pow(double(n), alpha) : 0.0;
                                 return detail::scalar_blocks(std::pow(double(n), alpha), diag);
                             });
}

// a_{2n} = C1 n^{alpha1}, a_{2n-1} = C2 n^{alpha2}, b_{2n} = D1 n^{beta1},
// b_{2n-1} = D2 n^{beta2}; all scales positive.
inline CoefficientFamily prop5(double alpha1, double alpha2, double beta1, double beta2,
                               double C1, double C2, double D1, double D2) {
    detail::require(alpha1 > 0.0 && alpha2 > 0.0 && beta1 > 0.0 && beta2 > 0.0,
                    "prop5: exponents must be positive");
    detail::require(C1 > 0.0 && C2 > 0.0 && D1 > 0.0 && D2 > 0.0,
                    "prop5: scale constants must be positive");
    std::map<std::string, double> prm = {{"alpha1", alpha1}, {"alpha2", alpha2},
                                         {"beta1", beta1},   {"beta2", beta2},
                                         {"C1", C1},         {"C2", C2},
                                         {"D1", D1},         {"D2", D2}};
    return CoefficientFamily("prop5", 1, prm, [=](long n) {
        long k = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
        double a = (n % 2 == 0) ? C1 * std::pow(double(k), alpha1)
                                : C2 * std::pow(double(k), alpha2);
        double b = (n % 2 == 0) ? D1 * std::pow(double(k), beta1)
                                : D2 * std::pow(double(k), beta2);
        return detail::scalar_blocks(a, b);
    });
}

// d = 2 family: B_{2n-1} = gamma n^tau I_2; B_{4j} = 0_2; B_{4j-2} = diag(0, j^{b_exp});
// A_n = a_scale n^{a_exp} [[1,0],[eps,eta]]. Defaults keep the margin conditions
// strictly below 1 from j = 1 on.
inline CoefficientFamily prop6(double a_scale = 1.0, double a_exp = 0.25, double eps = 0.1,
                               double eta = 1.0, double gamma = 1.0, double tau = 0.75,
                               double b_exp = 0.75) {
    detail::require(a_scale > 0.0, "prop6: need a_scale > 0");
    detail::require(a_exp >= 0.0, "prop6: need a_exp >= 0");
    detail::require(eta != 0.0, "prop6: need eta != 0 (A_n invertibility)");
    detail::require(gamma > 0.0 && tau > 0.0, "prop6: need gamma, tau > 0");
    detail::require(b_exp > 0.0, "prop6: need b_exp > 0 (b_j must diverge)");
    std::map<std::string, double> prm = {{"a_scale", a_scale}, {"a_exp", a_exp}, {"eps", eps},
                                         {"eta", eta},         {"gamma", gamma}, {"tau", tau},
                                         {"b_exp", b_exp}};
    return CoefficientFamily("prop6", 2, prm, [=](long n) {
        BlockPair p{Mat(2), Herm(2)};
        double a = a_scale * std::pow(double(n), a_exp);
        p.A(0, 0) = a;
        p.A(1, 0) = a * eps;
        p.A(1, 1) = a * eta;
        if (n % 2 == 1) {
            double v = gamma * std::pow(double((n + 1) / 2), tau);
            p.B.set(0, 0, v);
            p.B.set(1, 1, v);
        } else if (n % 4 == 2) {
            long j = (n + 2) / 4;
            p.B.set(1, 1, std::pow(double(j), b_exp));
        }
        return p;
    });
}

// Blocks tabulated in a text file: header `d=<int>`, then one record per line,
// `n  A_entries(2d^2 reals, re/im interleaved, row-major)  B_entries(2d^2 reals)`.
inline CoefficientFamily custom_family(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("custom_family: cannot open table file " + path);
    std::string line;
    long line_no = 0;
    int d = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("d=", 0) != 0)
            throw table_parse_error("custom_family: expected header d=<int>", line_no);
        try {
            d = std::stoi(line.substr(2));
        } catch (const std::exception&) {
            throw table_parse_error("custom_family: malformed dimension header", line_no);
        }
        if (d < 1) throw table_parse_error("custom_family: dimension must be >= 1", line_no);
        break;
    }
    if (d == 0) throw domain_error("custom_family: missing d=<int> header in " + path);

    auto table = std::make_shared<std::map<long, BlockPair>>();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        long n = 0;
        if (!(ss >> n) || n < 1)
            throw table_parse_error("custom_family: bad block index", line_no);
        auto read_mat = [&](const char* which) {
            Mat m(d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double re = 0.0, im = 0.0;
                    if (!(ss >> re >> im))
                        throw table_parse_error(std::string("custom_family: truncated ") + which +
                                                    " entries",
                                                line_no);
                    m(i, j) = cplx(re, im);
                }
            return m;
        };
        Mat a = read_mat("A");
        Mat b = read_mat("B");
        double trailing = 0.0;
        if (ss >> trailing)
            throw table_parse_error("custom_family: trailing data after B entries", line_no);
        (*table)[n] = BlockPair{a, Herm(b)};
    }
    if (table->empty()) throw domain_error("custom_family: table has no records in " + path);

    return CoefficientFamily("custom", d, {}, [table](long n) {
        auto it = table->find(n);
        if (it == table->end())
            throw domain_error("custom_family: block index " + std::to_string(n) +
                               " not present in table");
        return it->second;
    });
}

// Finite Dirichlet section: blocks 1..N, coupling A_N dropped.
struct TruncatedJacobi {
    int d = 0;
    long N = 0;
    std::vector<Herm> diag;    // B_1..B_N
    std::vector<Mat> offdiag;  // A_1..A_{N-1}
    std::vector<double> diag_norms, offdiag_norms;
    std::vector<double> scalar_b, scalar_a_sq;  // populated when d == 1
    double max_block_norm = 0.0;
    double min_abs_det_A = 0.0;
    std::string family_name;

    long dim() const { return d * N; }
};

inline TruncatedJacobi truncate(const CoefficientFamily& f, long N) {
    if (N < 2) throw domain_error("truncate: need N >= 2");
    if (f.block_dim() * N > kTruncationCap)
        throw domain_error("truncate: dN exceeds configured cap 1e6");
    TruncatedJacobi t;
    t.d = f.block_dim();
    t.N = N;
    t.family_name = f.name();
    t.diag.reserve(N);
    t.offdiag.reserve(N - 1);
    double min_det = std::numeric_limits<double>::infinity();
    double max_norm = 0.0;
    for (long n = 1; n <= N; ++n) {
        BlockPair blk = f.block_at(n);
        double bn = op_norm(blk.B);
        t.diag_norms.push_back(bn);
        max_norm = std::max(max_norm, bn);
        if (t.d == 1) t.scalar_b.push_back(blk.B(0, 0).real());
        t.diag.push_back(std::move(blk.B));
        if (n < N) {
            min_det = std::min(min_det, std::abs(blk.A.det()));
            double an = op_norm(blk.A);
            t.offdiag_norms.push_back(an);
            max_norm = std::max(max_norm, an);
            if (t.d == 1) t.scalar_a_sq.push_back(std::norm(blk.A(0, 0)));
            t.offdiag.push_back(std::move(blk.A));
        }
    }
    t.max_block_norm = max_norm;
    t.min_abs_det_A = min_det;
    return t;
}

// (Tv)_k = A_{k-1}^* v_{k-1} + B_k v_k + A_k v_{k+1}, blockwise, with A_0 = A_N = 0.
inline std::vector<cplx> apply(const TruncatedJacobi& t, const std::vector<cplx>& v) {
    if (static_cast<long>(v.size()) != t.dim())
        throw domain_error("apply: vector length does not match dN");
    int d = t.d;
    std::vector<cplx> r(v.size(), cplx(0.0, 0.0));
    for (long k = 0; k < t.N; ++k) {
        const Herm& B = t.diag[k];
        for (int i = 0; i < d; ++i) {
            cplx acc(0.0, 0.0);
            for (int j = 0; j < d; ++j) acc += B(i, j) * v[k * d + j];
            r[k * d + i] += acc;
        }
        if (k + 1 < t.N) {
            const Mat& A = t.offdiag[k];  // couples block k (0-based) to k+1
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    r[k * d + i] += A(i, j) * v[(k + 1) * d + j];
                    r[(k + 1) * d + j] += std::conj(A(i, j)) * v[k * d + i];
                }
        }
    }
    return r;
}

// Dense assembly of the dN x dN section (test oracles, small N only).
inline Herm to_dense(const TruncatedJacobi& t) {
    long dn = t.dim();
    if (dn > 4000) throw domain_error("to_dense: section too large for dense assembly");
    Mat m(static_cast<int>(dn));
    int d = t.d;
    for (long k = 0; k < t.N; ++k) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                m(static_cast<int>(k * d + i), static_cast<int>(k * d + j)) = t.diag[k](i, j);
                if (k + 1 < t.N) {
                    cplx a = t.offdiag[k](i, j);
                    m(static_cast<int>(k * d + i), static_cast<int>((k + 1) * d + j)) = a;
                    m(static_cast<int>((k + 1) * d + j), static_cast<int>(k * d + i)) = std::conj(a);
                }
            }
    }
    return Herm(m);
}

// Divergence diagnostics for u_n = i^n / n^x under J_alpha and B = diag{n^beta}:
// S_J partial sums stay Cauchy while S_B grows like N^{2beta-2x+1}.
struct Example0Report {
    double alpha = 0.0, beta = 0.0, x = 0.0;
    long horizon = 0;
    std::vector<long> checkpoints;
    std::vector<double> S_J;  // at checkpoints
    std::vector<double> S_B;
    double sb_fitted_exponent = 0.0;
    double sb_expected_exponent = 0.0;  // 2beta - 2x + 1
    double sj_tail_increment = 0.0;     // S_J(horizon) - S_J(horizon/10)
    bool sj_cauchy = false;             // tail increment <= 1e-3
    double max_scaled_entry_error = 0.0;  // max over n in [10,1000] of n * relerr vs leading term
};

inline double fit_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    size_t m = xs.size();
    for (size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = m * sxx - sx * sx;
    if (denom == 0.0) throw domain_error("fit_log_slope: degenerate abscissae");
    return (m * sxy - sx * sy) / denom;
}

// Leading term i^{n-1} n^{alpha-x} (2x-alpha)/n of (J_alpha u)_n.
inline cplx ipow_times(long n, double alpha, double x) {
    static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    return ipow[(n - 1) % 4] * std::pow(double(n), alpha - x) * ((2.0 * x - alpha) / double(n));
}

inline Example0Report residual_example0(double alpha, double beta, double x, long N) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "residual_example0: need 0 < alpha <= 1");
    detail::require(beta > 0.0 && beta < alpha, "residual_example0: need 0 < beta < alpha");
    detail::require(x > 0.5 && x <= beta + 0.5, "residual_example0: need 1/2 < x <= beta + 1/2");
    detail::require(2.0 * x != alpha, "residual_example0: need 2x != alpha");
    detail::require(N >= 1000 && N <= kHorizonCap, "residual_example0: need 1000 <= N <= 1e7");

    Example0Report rep;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.x = x;
    rep.horizon = N;
    for (long c = 1000; c <= N; c = static_cast<long>(std::llround(c * std::sqrt(10.0))))
        rep.checkpoints.push_back(c);
    if (rep.checkpoints.back() != N) rep.checkpoints.push_back(N);

    // u_n = i^n / n^x; entries of J_alpha u use the infinite-lattice formula
    // (J u)_n = a_{n-1} u_{n-1} + a_n u_{n+1}, so u_{N+1} participates at n = N.
    auto u_at = [x](long n) {
        static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
        return ipow[n % 4] / std::pow(double(n), x);
    };
    double sj = 0.0, sb = 0.0;
    size_t ck = 0;
    double sj_at_tenth = 0.0;
    long tenth = N / 10;
    rep.S_J.resize(rep.checkpoints.size());
    rep.S_B.resize(rep.checkpoints.size());
    for (long n = 1; n <= N; ++n) {
        cplx ju = (n > 1 ? std::pow(double(n - 1), alpha) * u_at(n - 1) : cplx(0.0, 0.0)) +
                  std::pow(double(n), alpha) * u_at(n + 1);
        sj += std::norm(ju);
        double bu = std::pow(double(n), beta - x);
        sb += bu * bu;
        if (n == tenth) sj_at_tenth = sj;
        if (ck < rep.checkpoints.size() && n == rep.checkpoints[ck]) {
            rep.S_J[ck] = sj;
            rep.S_B[ck] = sb;
            ++ck;
        }
        if (n >= 10 && n <= 1000) {
            cplx lead = ipow_times(n, alpha, x);
            double rel = std::abs(ju - lead) / std::abs(lead);
            rep.max_scaled_entry_error = std::max(rep.max_scaled_entry_error, rel * double(n));
        }
    }
    std::vector<double> lx, ly;
    for (size_t i = 0; i < rep.checkpoints.size(); ++i) {
        lx.push_back(std::log(double(rep.checkpoints[i])));
        ly.push_back(std::log(rep.S_B[i]));
    }
    rep.sb_fitted_exponent = fit_log_slope(lx, ly);
    rep.sb_expected_exponent = 2.0 * beta - 2.0 * x + 1.0;
    rep.sj_tail_increment = sj - sj_at_tenth;
    rep.sj_cauchy = rep.sj_tail_increment <= 1e-3;
    return rep;
}

}  // namespace jops
