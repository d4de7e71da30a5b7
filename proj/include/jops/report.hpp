// Diff-stable report emission: JSON with all floating-point values at 17
// significant digits, plus CSV writers for the documented column layouts.
#pragma once

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "jops/checkers.hpp"
#include "jops/family.hpp"
#include "jops/linalg.hpp"
#include "jops/spectral.hpp"
#include "jops/transfer.hpp"

namespace jops {

inline constexpr int kSchemaVersion = 1;

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class JsonValue {
public:
    enum class Kind { Null, Bool, Int, UInt, Real, Str, Arr, Obj };

    JsonValue() : kind_(Kind::Null) {}
    static JsonValue null() { return JsonValue(); }
    JsonValue(bool b) : kind_(Kind::Bool), b_(b) {}
    JsonValue(int v) : kind_(Kind::Int), i_(v) {}
    JsonValue(long v) : kind_(Kind::Int), i_(v) {}
    JsonValue(long long v) : kind_(Kind::Int), i_(v) {}
    JsonValue(unsigned long long v) : kind_(Kind::UInt), u_(v) {}
    JsonValue(double v) : kind_(Kind::Real), d_(v) {}
    JsonValue(const char* s) : kind_(Kind::Str), s_(s) {}
    JsonValue(std::string s) : kind_(Kind::Str), s_(std::move(s)) {}

    static JsonValue arr() {
        JsonValue v;
        v.kind_ = Kind::Arr;
        return v;
    }
    static JsonValue obj() {
        JsonValue v;
        v.kind_ = Kind::Obj;
        return v;
    }

    JsonValue& push(JsonValue v) {
        arr_.push_back(std::move(v));
        return *this;
    }
    JsonValue& set(const std::string& key, JsonValue v) {
        obj_.emplace_back(key, std::move(v));
        return *this;
    }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out.push_back('\n');
        return out;
    }

private:
    static void escape(std::string& out, const std::string& s) {
        out.push_back('"');
        for (unsigned char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\r': out += "\\r"; break;
                case '\t': out += "\\t"; break;
                default:
                    if (c < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out += buf;
                    } else {
                        out.push_back(char(c));
                    }
            }
        }
        out.push_back('"');
    }

    void write(std::string& out, int indent, int depth) const {
        std::string pad(size_t(indent) * (depth + 1), ' ');
        std::string pad_close(size_t(indent) * depth, ' ');
        char buf[40];
        switch (kind_) {
            case Kind::Null: out += "null"; break;
            case Kind::Bool: out += b_ ? "true" : "false"; break;
            case Kind::Int:
                std::snprintf(buf, sizeof buf, "%lld", i_);
                out += buf;
                break;
            case Kind::UInt:
                std::snprintf(buf, sizeof buf, "%llu", u_);
                out += buf;
                break;
            case Kind::Real:
                if (std::isfinite(d_))
                    out += fmt17(d_);
                else
                    out += "null";
                break;
            case Kind::Str: escape(out, s_); break;
            case Kind::Arr:
                if (arr_.empty()) {
                    out += "[]";
                    break;
                }
                out += "[\n";
                for (size_t i = 0; i < arr_.size(); ++i) {
                    out += pad;
                    arr_[i].write(out, indent, depth + 1);
                    if (i + 1 < arr_.size()) out.push_back(',');
                    out.push_back('\n');
                }
                out += pad_close + "]";
                break;
            case Kind::Obj:
                if (obj_.empty()) {
                    out += "{}";
                    break;
                }
                out += "{\n";
                for (size_t i = 0; i < obj_.size(); ++i) {
                    out += pad;
                    escape(out, obj_[i].first);
                    out += ": ";
                    obj_[i].second.write(out, indent, depth + 1);
                    if (i + 1 < obj_.size()) out.push_back(',');
                    out.push_back('\n');
                }
                out += pad_close + "}";
                break;
        }
    }

    Kind kind_;
    bool b_ = false;
    long long i_ = 0;
    unsigned long long u_ = 0;
    double d_ = 0.0;
    std::string s_;
    std::vector<JsonValue> arr_;
    std::vector<std::pair<std::string, JsonValue>> obj_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domain_error("cannot open output file " + path);
    out << content;
    if (!out) throw domain_error("write failed for " + path);
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path, std::ios::binary) {
        if (!out_) throw domain_error("cannot open output file " + path);
        out_ << header << "\n";
    }
    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const std::string& c : cells) {
            if (!first) out_ << ",";
            out_ << c;
            first = false;
        }
        out_ << "\n";
    }
    static std::string cell(double v) { return fmt17(v); }
    static std::string cell(long v) { return std::to_string(v); }

private:
    std::ofstream out_;
};

inline JsonValue to_json(const Inertia& in) {
    return JsonValue::obj()
        .set("n_minus", in.n_minus)
        .set("n_zero", in.n_zero)
        .set("n_plus", in.n_plus);
}

inline JsonValue to_json(const CountResult& c) {
    return JsonValue::obj()
        .set("count", c.value)
        .set("lo", c.lo)
        .set("hi", c.hi)
        .set("lo_on_eigenvalue", c.lo_on_eigenvalue)
        .set("hi_on_eigenvalue", c.hi_on_eigenvalue);
}

inline JsonValue to_json(const SpectralReport& r) {
    JsonValue subs = JsonValue::arr();
    for (const SubintervalReport& s : r.subs) {
        JsonValue counts = JsonValue::arr();
        for (long c : s.counts) counts.push(c);
        subs.push(JsonValue::obj()
                      .set("lo", s.lo)
                      .set("hi", s.hi)
                      .set("counts", std::move(counts))
                      .set("counts_stable", s.counts_stable)
                      .set("all_matched", s.all_matched)
                      .set("max_match_distance", s.max_match_distance)
                      .set("count_slope", s.count_slope)
                      .set("superlinear", s.superlinear)
                      .set("spacing_available", s.spacing_available)
                      .set("spacing_exponent", s.spacing_exponent)
                      .set("tag", s.tag));
    }
    JsonValue sched = JsonValue::arr();
    for (long n : r.schedule) sched.push(n);
    return JsonValue::obj()
        .set("schema_version", kSchemaVersion)
        .set("kind", "spectral_report")
        .set("family", r.family)
        .set("schedule", std::move(sched))
        .set("lo", r.lo)
        .set("hi", r.hi)
        .set("grid", r.grid)
        .set("slope_min", r.slope_min)
        .set("spacing_exp_max", r.spacing_exp_max)
        .set("subintervals", std::move(subs));
}

inline JsonValue to_json(const ConditionReport& r) {
    JsonValue wit = JsonValue::obj();
    for (const auto& [k, v] : r.witnesses) wit.set(k, v);
    JsonValue notes = JsonValue::arr();
    for (const std::string& n : r.notes) notes.push(n);
    JsonValue j = JsonValue::obj()
                      .set("schema_version", kSchemaVersion)
                      .set("kind", "condition_report")
                      .set("check", r.check)
                      .set("family", r.family)
                      .set("horizon", r.horizon);
    if (r.tail_window > 0) j.set("tail_window", r.tail_window);
    j.set("assumed_index_jmin", r.assumed_index_jmin)
        .set("pass", r.pass)
        .set("verdict", r.verdict)
        .set("witnesses", std::move(wit))
        .set("notes", std::move(notes))
        .set("margin_row_count", long(r.margin_rows.size()));
    return j;
}

inline JsonValue to_json(const PositivityProbe& p) {
    JsonValue j = JsonValue::obj()
                      .set("schema_version", kSchemaVersion)
                      .set("kind", "positivity_probe")
                      .set("a", p.a)
                      .set("c", p.c)
                      .set("cut_index", p.calN)
                      .set("support_lo", p.support_lo)
                      .set("support_hi", p.support_hi)
                      .set("trials", p.trials)
                      .set("seed", (unsigned long long)p.seed)
                      .set("min_quotient", p.min_quotient)
                      .set("pass", p.pass);
    if (!p.failing_vector.empty()) {
        JsonValue fv = JsonValue::arr();
        for (cplx z : p.failing_vector)
            fv.push(JsonValue::arr().push(z.real()).push(z.imag()));
        j.set("failing_vector", std::move(fv));
    }
    return j;
}

inline JsonValue to_json(const EquivalenceRecord& r) {
    return JsonValue::obj()
        .set("schema_version", kSchemaVersion)
        .set("kind", "schur_equivalence")
        .set("p1", r.p1)
        .set("p2", r.p2)
        .set("p3", r.p3)
        .set("equivalent", r.equivalent)
        .set("rank_budget", r.rank_budget)
        .set("min_eig_block", r.min_eig_block)
        .set("min_eig_a", r.min_eig_a)
        .set("min_eig_c", r.min_eig_c)
        .set("min_eig_schur", r.min_eig_schur);
}

inline JsonValue to_json(const LevinsonReport& r) {
    auto cpx = [](cplx z) { return JsonValue::obj().set("re", z.real()).set("im", z.imag()); };
    return JsonValue::obj()
        .set("schema_version", kSchemaVersion)
        .set("kind", "levinson_report")
        .set("n_lo", r.n_lo)
        .set("n_hi", r.n_hi)
        .set("min_abs_det_a", r.min_abs_det_a)
        .set("min_abs_det_v", r.min_abs_det_v)
        .set("det_nonvanishing", r.det_nonvanishing)
        .set("bv_partial_sum", r.bv_partial_sum)
        .set("bv_fit_exponent", r.bv_fit_exponent)
        .set("bv_summable", r.bv_summable)
        .set("l1_partial_sum", r.l1_partial_sum)
        .set("l1_fit_exponent", r.l1_fit_exponent)
        .set("l1_summable", r.l1_summable)
        .set("vinf_eig1", cpx(r.vinf_eig1))
        .set("vinf_eig2", cpx(r.vinf_eig2))
        .set("eig_separation", r.eig_separation)
        .set("moduli_separation", r.moduli_separation)
        .set("eigs_nonzero", r.eigs_nonzero)
        .set("eigs_distinct", r.eigs_distinct)
        .set("moduli_distinct", r.moduli_distinct)
        .set("flag_equal_moduli_distinct_eigs", r.flag_equal_moduli_distinct_eigs)
        .set("pass", r.pass);
}

inline JsonValue to_json(const SubordinacyTrace& t) {
    JsonValue cps = JsonValue::arr(), rs = JsonValue::arr(), lrs = JsonValue::arr();
    for (long c : t.checkpoints) cps.push(c);
    for (double r : t.ratios) rs.push(r);
    for (double r : t.log10_ratios) lrs.push(r);
    return JsonValue::obj()
        .set("schema_version", kSchemaVersion)
        .set("kind", "subordinacy_trace")
        .set("lambda", t.lambda)
        .set("checkpoints", std::move(cps))
        .set("ratios", std::move(rs))
        .set("log10_ratios", std::move(lrs))
        .set("trend", t.trend);
}

inline JsonValue to_json(const Example0Report& r) {
    JsonValue cps = JsonValue::arr(), sj = JsonValue::arr(), sb = JsonValue::arr();
    for (long c : r.checkpoints) cps.push(c);
    for (double v : r.S_J) sj.push(v);
    for (double v : r.S_B) sb.push(v);
    return JsonValue::obj()
        .set("schema_version", kSchemaVersion)
        .set("kind", "residual_growth_report")
        .set("alpha", r.alpha)
        .set("beta", r.beta)
        .set("x", r.x)
        .set("horizon", r.horizon)
        .set("checkpoints", std::move(cps))
        .set("S_J", std::move(sj))
        .set("S_B", std::move(sb))
        .set("sb_fitted_exponent", r.sb_fitted_exponent)
        .set("sb_expected_exponent", r.sb_expected_exponent)
        .set("sj_tail_increment", r.sj_tail_increment)
        .set("sj_cauchy", r.sj_cauchy)
        .set("max_scaled_entry_error", r.max_scaled_entry_error);
}

// CSV exports with the documented column layouts.

inline void write_eigenvalues_csv(const std::string& path, const std::vector<double>& eigs,
                                  double lo, double hi, long N) {
    CsvWriter csv(path, "lambda,interval_lo,interval_hi,N");
    for (double e : eigs)
        csv.row({CsvWriter::cell(e), CsvWriter::cell(lo), CsvWriter::cell(hi),
                 CsvWriter::cell(N)});
}

inline void write_margins_csv(const std::string& path, const ConditionReport& rep) {
    CsvWriter csv(path, "n,s1,s2");
    for (const auto& row : rep.margin_rows)
        csv.row({CsvWriter::cell(long(row[0])), CsvWriter::cell(row[1]),
                 CsvWriter::cell(row[2])});
}

inline void write_subordinacy_csv(const std::string& path, const SubordinacyTrace& t) {
    CsvWriter csv(path, "N,ratio");
    for (size_t i = 0; i < t.checkpoints.size(); ++i)
        csv.row({CsvWriter::cell(t.checkpoints[i]), CsvWriter::cell(t.ratios[i])});
}

inline void write_path_csv(const std::string& path, const SolutionPath& p) {
    CsvWriter csv(path, "n,re,im,log_modulus");
    for (long n = 1; n <= p.size(); ++n) {
        cplx dir = p.direction(n);
        csv.row({CsvWriter::cell(n), CsvWriter::cell(dir.real()), CsvWriter::cell(dir.imag()),
                 CsvWriter::cell(p.log_abs(n))});
    }
}

}  // namespace jops
