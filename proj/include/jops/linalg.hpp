// Small dense complex Hermitian linear algebra: eigendecomposition via cyclic
// Jacobi rotations, spectral positive parts, pseudo-inverse powers, operator norm.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace jops {

using cplx = std::complex<double>;

class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Dense complex matrix, row-major; square in most uses, rectangular where block
// couplings between spaces of different dimension appear.
class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    explicit Mat(int d, cplx fill = cplx(0.0, 0.0)) : Mat(d, d, fill) {}
    Mat(int rows, int cols, cplx fill)
        : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols, fill) {
        if (rows < 1 || cols < 1) throw domain_error("Mat: dims must be >= 1");
    }
    Mat(int rows, int cols) : Mat(rows, cols, cplx(0.0, 0.0)) {}
    static Mat identity(int d) {
        Mat m(d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int dim() const {
        if (rows_ != cols_) throw domain_error("Mat: dim() on non-square matrix");
        return rows_;
    }
    cplx& operator()(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
    cplx operator()(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }

    bool all_finite() const {
        for (const cplx& z : e_) if (!finite(z)) return false;
        return true;
    }
    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : e_) m = std::max(m, std::abs(z));
        return m;
    }
    double frob() const {
        double s = 0.0;
        for (const cplx& z : e_) s += std::norm(z);
        return std::sqrt(s);
    }
    Mat adjoint() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < cols_; ++i)
            for (int j = 0; j < rows_; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }
    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.cols_ != b.rows_) throw domain_error("Mat multiply: dimension mismatch");
        Mat r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                cplx aik = a(i, k);
                if (aik == cplx(0.0, 0.0)) continue;
                for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }
    friend Mat operator+(const Mat& a, const Mat& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw domain_error("Mat add: dimension mismatch");
        Mat r(a.rows_, a.cols_);
        for (size_t t = 0; t < a.e_.size(); ++t) r.e_[t] = a.e_[t] + b.e_[t];
        return r;
    }
    friend Mat operator-(const Mat& a, const Mat& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw domain_error("Mat subtract: dimension mismatch");
        Mat r(a.rows_, a.cols_);
        for (size_t t = 0; t < a.e_.size(); ++t) r.e_[t] = a.e_[t] - b.e_[t];
        return r;
    }
    friend Mat operator*(cplx s, const Mat& a) {
        Mat r(a.rows_, a.cols_);
        for (size_t t = 0; t < a.e_.size(); ++t) r.e_[t] = s * a.e_[t];
        return r;
    }
    std::vector<cplx> apply(const std::vector<cplx>& v) const {
        if (static_cast<int>(v.size()) != cols_) throw domain_error("Mat apply: length mismatch");
        std::vector<cplx> r(rows_, cplx(0.0, 0.0));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }
    // Determinant by LU with partial pivoting.
    cplx det() const {
        int d = dim();
        Mat a(*this);
        cplx det_val(1.0, 0.0);
        for (int k = 0; k < d; ++k) {
            int piv = k;
            double best = std::abs(a(k, k));
            for (int i = k + 1; i < d; ++i)
                if (std::abs(a(i, k)) > best) { best = std::abs(a(i, k)); piv = i; }
            if (best == 0.0) return cplx(0.0, 0.0);
            if (piv != k) {
                for (int j = 0; j < d; ++j) std::swap(a(k, j), a(piv, j));
                det_val = -det_val;
            }
            det_val *= a(k, k);
            for (int i = k + 1; i < d; ++i) {
                cplx f = a(i, k) / a(k, k);
                for (int j = k; j < d; ++j) a(i, j) -= f * a(k, j);
            }
        }
        return det_val;
    }

private:
    int rows_, cols_;
    std::vector<cplx> e_;
};

// Hermitian matrix; construction symmetrizes so entries(i,j) == conj(entries(j,i)) exactly.
class Herm {
public:
    Herm() = default;
    explicit Herm(int d) : m_(d) {}
    explicit Herm(const Mat& m) : m_(m.dim()) {
        int d = m.dim();
        for (int i = 0; i < d; ++i) {
            m_(i, i) = cplx(m(i, i).real(), 0.0);
            for (int j = i + 1; j < d; ++j) {
                cplx h = 0.5 * (m(i, j) + std::conj(m(j, i)));
                m_(i, j) = h;
                m_(j, i) = std::conj(h);
            }
        }
    }
    static Herm diag(const std::vector<double>& v) {
        Herm h(static_cast<int>(v.size()));
        for (size_t i = 0; i < v.size(); ++i) h.m_(static_cast<int>(i), static_cast<int>(i)) = v[i];
        return h;
    }
    static Herm identity(int d) { return Herm(Mat::identity(d)); }
    int dim() const { return m_.dim(); }
    cplx operator()(int i, int j) const { return m_(i, j); }
    const Mat& mat() const { return m_; }
    bool all_finite() const { return m_.all_finite(); }
    double max_abs() const { return m_.max_abs(); }
    void set(int i, int j, cplx v) {
        if (i == j) { m_(i, i) = cplx(v.real(), 0.0); return; }
        m_(i, j) = v;
        m_(j, i) = std::conj(v);
    }

private:
    Mat m_;
};

struct EigenH {
    std::vector<double> values;  // ascending
    Mat vectors;                 // unitary, column k pairs with values[k]
};

namespace detail {

// One cyclic sweep target: annihilate entry (p,q) of the Hermitian working copy.
// U = diag(1, e^{-i arg}) reduces the pivot to a real symmetric 2x2 problem,
// then a standard Jacobi rotation with the smaller tangent root is applied.
inline void jacobi_rotate(Mat& a, Mat& v, int p, int q) {
    cplx apq = a(p, q);
    double mag = std::abs(apq);
    if (mag == 0.0) return;
    cplx phase = apq / mag;  // a(p,q) = mag * phase
    double app = a(p, p).real();
    double aqq = a(q, q).real();
    double tau = (aqq - app) / (2.0 * mag);
    double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                            : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
    double c = 1.0 / std::sqrt(1.0 + t * t);
    double s = t * c;
    // Column rotation G: col p' = c*col p - s*conj(phase)*col q ; col q' = s*phase*col p + c*col q.
    int d = a.dim();
    for (int i = 0; i < d; ++i) {
        cplx aip = a(i, p), aiq = a(i, q);
        a(i, p) = c * aip - s * std::conj(phase) * aiq;
        a(i, q) = s * phase * aip + c * aiq;
        cplx vip = v(i, p), viq = v(i, q);
        v(i, p) = c * vip - s * std::conj(phase) * viq;
        v(i, q) = s * phase * vip + c * viq;
    }
    for (int j = 0; j < d; ++j) {
        cplx apj = a(p, j), aqj = a(q, j);
        a(p, j) = c * apj - s * phase * aqj;
        a(q, j) = s * std::conj(phase) * apj + c * aqj;
    }
    a(p, q) = cplx(0.0, 0.0);
    a(q, p) = cplx(0.0, 0.0);
    a(p, p) = cplx(a(p, p).real(), 0.0);
    a(q, q) = cplx(a(q, q).real(), 0.0);
}

inline double offdiag_frob(const Mat& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace detail

inline EigenH eigh(const Herm& h) {
    if (!h.all_finite()) throw domain_error("eigh: non-finite entries");
    int d = h.dim();
    Mat a = h.mat();
    Mat v = Mat::identity(d);
    double scale = std::max(1.0, a.max_abs());
    const double tol = 1e-15 * scale;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::offdiag_frob(a) <= tol * d) break;
        for (int p = 0; p < d - 1; ++p)
            for (int q = p + 1; q < d; ++q)
                if (std::abs(a(p, q)) > tol / (10.0 * d)) detail::jacobi_rotate(a, v, p, q);
    }
    EigenH r;
    r.values.resize(d);
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(d);
    for (int i = 0; i < d; ++i) diag[i] = a(i, i).real();
    std::sort(order.begin(), order.end(), [&](int x, int y) { return diag[x] < diag[y]; });
    r.vectors = Mat(d);
    for (int k = 0; k < d; ++k) {
        r.values[k] = diag[order[k]];
        for (int i = 0; i < d; ++i) r.vectors(i, k) = v(i, order[k]);
    }
    return r;
}

// f(H) for a real spectral function f, via full eigendecomposition.
template <typename F>
inline Herm spectral_map(const Herm& h, F&& f) {
    EigenH e = eigh(h);
    int d = h.dim();
    Mat r(d);
    for (int k = 0; k < d; ++k) {
        double fv = f(e.values[k]);
        if (fv == 0.0) continue;
        for (int i = 0; i < d; ++i) {
            cplx vik = e.vectors(i, k);
            if (vik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < d; ++j)
                r(i, j) += fv * vik * std::conj(e.vectors(j, k));
        }
    }
    return Herm(r);
}

// B_+ : spectral restriction to the strictly positive eigenvalues.
inline Herm positive_part(const Herm& h) {
    if (!h.all_finite()) throw domain_error("positive_part: non-finite entries");
    return spectral_map(h, [](double lam) { return lam > 0.0 ? lam : 0.0; });
}

inline double default_eps_pos(const Herm& h) {
    EigenH e = eigh(h);
    double nrm = 0.0;
    for (double lam : e.values) nrm = std::max(nrm, std::abs(lam));
    return 1e-12 * (1.0 + nrm);
}

// lambda^p on the part of the spectrum above eps_pos, zero elsewhere; realizes the
// pseudo-inverse powers of B_+ restricted to its range. Supported p: -1, -1/2, +1/2.
// eps_pos < 0 requests the default floor 1e-12 * (1 + ||H||).
inline Herm opp_power(const Herm& h, double p, double eps_pos = -1.0) {
    if (!h.all_finite()) throw domain_error("opp_power: non-finite entries");
    if (p != -1.0 && p != -0.5 && p != 0.5)
        throw domain_error("opp_power: exponent must be one of {-1, -1/2, +1/2}");
    double floor_val = (eps_pos < 0.0) ? default_eps_pos(h) : eps_pos;
    return spectral_map(h, [p, floor_val](double lam) {
        return lam > floor_val ? std::pow(lam, p) : 0.0;
    });
}

// Largest singular value, as sqrt of the top eigenvalue of M*M.
inline double op_norm(const Mat& m) {
    if (!m.all_finite()) throw domain_error("op_norm: non-finite entries");
    Herm mm(m.adjoint() * m);
    EigenH e = eigh(mm);
    double top = e.values.empty() ? 0.0 : e.values.back();
    return std::sqrt(std::max(0.0, top));
}

inline double op_norm(const Herm& h) { return op_norm(h.mat()); }

inline double min_eig(const Herm& h) { return eigh(h).values.front(); }
inline double max_eig(const Herm& h) { return eigh(h).values.back(); }

// True inverse through the spectral theorem; throws when an eigenvalue sits at or
// below the given singularity tolerance in magnitude.
inline Herm herm_inverse(const Herm& h, double sing_tol) {
    EigenH e = eigh(h);
    for (double lam : e.values)
        if (std::abs(lam) <= sing_tol)
            throw domain_error("herm_inverse: eigenvalue within singularity tolerance");
    return spectral_map(h, [](double lam) { return 1.0 / lam; });
}

}  // namespace jops
