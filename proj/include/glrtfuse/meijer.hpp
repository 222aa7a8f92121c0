// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Meijer G-function evaluation for the parameter classes produced by the
// fused-detection distributions.
//
// The function is defined by the Mellin-Barnes integral
//
//   G^{m,n}_{p,q}(x | a; b) = (1/2 pi i) Int_C g(a, b, s) x^{-s} ds,
//
//   g = prod_{j<=m} Gamma(b_j+s) prod_{j<=n} Gamma(1-a_j-s)
//       / [ prod_{j>n} Gamma(a_j+s) prod_{j>m} Gamma(1-b_j-s) ].
//
// Evaluation routes:
//  * ascending residue series over the left poles (p < q for any x > 0,
//    or p = q for x < 1),
//  * the same series on the argument-inverted parameters for the mirror
//    classes (p > q, or p = q with x > 1),
//  * direct contour quadrature on a vertical line when the pole families
//    are separated by a strip and the kernel decays exponentially there.
//
// The series walks candidate pole locations ladder by ladder and counts
// the exact pole order at each location, including denominator gammas
// whose own poles cancel numerator poles. Locations of order <= 0
// contribute nothing; order-1 residues are assembled in log space with
// sign tracking and Kahan accumulation. Genuine higher-order poles
// (numerator parameters at integer mutual offsets) are handled by
// splitting the colliding parameters symmetrically by +/- pole_epsilon
// and averaging both signs, which cancels the leading odd error term; a
// second averaged pair at twice the offset removes the quadratic term.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "glrtfuse/errors.hpp"
#include "glrtfuse/gamma.hpp"
#include "glrtfuse/kahan.hpp"

namespace glrtfuse {

struct GParams {
    int m = 0;
    int n = 0;
    std::vector<double> a;
    std::vector<double> b;

    GParams(int m_, int n_, std::vector<double> a_, std::vector<double> b_)
        : m(m_), n(n_), a(std::move(a_)), b(std::move(b_)) {
        if (m < 0 || m > q()) throw error("GParams: need 0 <= m <= q");
        if (n < 0 || n > p()) throw error("GParams: need 0 <= n <= p");
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                const double d = a[i] - b[j];
                if (d > 0.5 && std::abs(d - std::round(d)) < kPoleTol) {
                    throw separability_error(
                        "GParams: a[" + std::to_string(i) + "] - b[" +
                        std::to_string(j) + "] = " + std::to_string(d) +
                        " is a positive integer; pole families overlap");
                }
            }
        }
    }

    int p() const { return static_cast<int>(a.size()); }
    int q() const { return static_cast<int>(b.size()); }
};

enum class GStrategy { ResidueSeries, ContourQuadrature, Auto };

struct EvalPolicy {
    GStrategy strategy = GStrategy::Auto;
    double rel_tol = 1e-12;
    int max_terms = 10000;
    double pole_epsilon = 1e-6;

    void validate() const {
        if (!(rel_tol > 0.0)) throw error("EvalPolicy: rel_tol must be > 0");
        if (max_terms < 1) throw error("EvalPolicy: max_terms must be >= 1");
        if (!(pole_epsilon > 0.0) || !(pole_epsilon < 1e-3)) {
            throw error("EvalPolicy: pole_epsilon must lie in (0, 1e-3)");
        }
    }
};

// Delta(k, a) = a/k, (a+1)/k, ..., (a+k-1)/k.
inline std::vector<double> delta_expand(int k, double a) {
    if (k < 1) throw error("delta_expand: k must be >= 1");
    std::vector<double> out(k);
    for (int i = 0; i < k; ++i) out[i] = (a + i) / k;
    return out;
}

// The Mellin-Barnes kernel g(a, b, eta), computed in log space.
inline std::complex<double> mb_kernel(const GParams& g, std::complex<double> eta) {
    std::complex<double> logsum = 0.0;
    for (int j = 0; j < g.m; ++j) logsum += log_gamma_complex(g.b[j] + eta);
    for (int j = 0; j < g.n; ++j) logsum += log_gamma_complex(1.0 - g.a[j] - eta);
    for (int j = g.n; j < g.p(); ++j) logsum -= log_gamma_complex(g.a[j] + eta);
    for (int j = g.m; j < g.q(); ++j) logsum -= log_gamma_complex(1.0 - g.b[j] - eta);
    if (std::abs(logsum.real()) > 700.0) {
        throw overflow_error("mb_kernel: log magnitude " +
                             std::to_string(logsum.real()) +
                             " exceeds double range");
    }
    return std::exp(logsum);
}

// All parameters shifted by t; satisfies x^t G(x|a;b) = G(x|a+t;b+t).
inline GParams power_shift(GParams g, double t) {
    for (auto& v : g.a) v += t;
    for (auto& v : g.b) v += t;
    return GParams(g.m, g.n, std::move(g.a), std::move(g.b));
}

// G(1/x | a; b) = G_inv(x | 1-b; 1-a) with swapped order indices.
inline GParams invert_argument(const GParams& g) {
    std::vector<double> na(g.q()), nb(g.p());
    for (int j = 0; j < g.q(); ++j) na[j] = 1.0 - g.b[j];
    for (int j = 0; j < g.p(); ++j) nb[j] = 1.0 - g.a[j];
    return GParams(g.n, g.m, std::move(na), std::move(nb));
}

// Parameters of the antiderivative:
//   Int_0^y x^{alpha-1} G(w x) dx = y^alpha G_new(w y),
// with 1-alpha inserted after position n in the a row and -alpha after
// position m in the b row.
inline GParams cdf_transform(const GParams& g, double alpha) {
    if (g.m >= 1) {
        double bmin = g.b[0];
        for (int j = 1; j < g.m; ++j) bmin = std::min(bmin, g.b[j]);
        if (alpha + bmin <= 0.0) {
            throw divergent_integral_error(
                "cdf_transform: integrand x^{alpha-1} G(x) not integrable at 0 "
                "(alpha + min b = " + std::to_string(alpha + bmin) + ")");
        }
    }
    std::vector<double> na, nb;
    na.reserve(g.p() + 1);
    nb.reserve(g.q() + 1);
    na.insert(na.end(), g.a.begin(), g.a.begin() + g.n);
    na.push_back(1.0 - alpha);
    na.insert(na.end(), g.a.begin() + g.n, g.a.end());
    nb.insert(nb.end(), g.b.begin(), g.b.begin() + g.m);
    nb.push_back(-alpha);
    nb.insert(nb.end(), g.b.begin() + g.m, g.b.end());
    return GParams(g.m, g.n + 1, std::move(na), std::move(nb));
}

struct GEval {
    double value = 0.0;
    double log_abs = -std::numeric_limits<double>::infinity();
    double sign = 1.0;
    double rel_err = 0.0;
    int terms = 0;
    GStrategy used = GStrategy::ResidueSeries;
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Factor bookkeeping: s-factors appear as Gamma(v + s), t-factors as
// Gamma(w - s); each is a numerator or denominator factor.
struct KernelView {
    std::vector<double> num_s, den_s;  // Gamma(v+s)
    std::vector<double> num_t, den_t;  // Gamma(w-s)

    int total() const {
        return static_cast<int>(num_s.size() + den_s.size() + num_t.size() +
                                den_t.size());
    }
    double cstar() const {
        return static_cast<double>(num_s.size() + num_t.size()) - 0.5 * total();
    }
};

inline KernelView make_view(const GParams& g) {
    KernelView v;
    for (int j = 0; j < g.m; ++j) v.num_s.push_back(g.b[j]);
    for (int j = g.n; j < g.p(); ++j) v.den_s.push_back(g.a[j]);
    for (int j = 0; j < g.n; ++j) v.num_t.push_back(1.0 - g.a[j]);
    for (int j = g.m; j < g.q(); ++j) v.den_t.push_back(1.0 - g.b[j]);
    return v;
}

// Argument inversion is s -> -s on the kernel: the s- and t-lists swap.
inline KernelView invert_view(const KernelView& v) {
    return {v.num_t, v.den_t, v.num_s, v.den_s};
}

// Cancel identical numerator/denominator gamma factors of the same kind.
inline void cancel_pairs(std::vector<double>& num, std::vector<double>& den) {
    for (std::size_t i = 0; i < num.size();) {
        bool hit = false;
        for (std::size_t j = 0; j < den.size(); ++j) {
            if (std::abs(num[i] - den[j]) <=
                1e-12 * std::max(1.0, std::abs(num[i]))) {
                den.erase(den.begin() + j);
                num.erase(num.begin() + i);
                hit = true;
                break;
            }
        }
        if (!hit) ++i;
    }
}

inline KernelView reduce_view(KernelView v) {
    cancel_pairs(v.num_s, v.den_s);
    cancel_pairs(v.num_t, v.den_t);
    return v;
}

// Running sum of sign*exp(log) terms with a floating reference scale.
// Accumulation runs in long double: the fused parameter rows mix large
// log-gammas whose exponentiated terms cancel heavily, and the extra
// mantissa bits buy ~3.5 digits back.
struct ScaledSum {
    long double ref = kNegInf;
    KahanSumL acc;
    long double max_term_log = kNegInf;

    void add(long double log_abs, double sign) {
        if (log_abs == static_cast<long double>(kNegInf)) return;
        max_term_log = std::max(max_term_log, log_abs);
        if (ref == static_cast<long double>(kNegInf)) ref = log_abs;
        if (log_abs > ref + 200.0L) {
            acc.scale(std::exp(ref - log_abs));
            ref = log_abs;
        }
        acc.add(static_cast<long double>(sign) * std::exp(log_abs - ref));
    }

    double log_value() const {
        const long double s = acc.value();
        if (s == 0.0L) return kNegInf;
        return static_cast<double>(ref + std::log(std::abs(s)));
    }
    double sign() const { return acc.value() < 0.0L ? -1.0 : 1.0; }
    double max_term() const { return static_cast<double>(max_term_log); }
    // Relative rounding floor from cancellation across terms.
    double cancel_error() const {
        const long double s = std::abs(acc.value());
        if (s == 0.0L || ref == static_cast<long double>(kNegInf)) return 0.0;
        const long double ratio =
            std::min(700.0L, max_term_log - (ref + std::log(s)));
        return static_cast<double>(
            std::numeric_limits<long double>::epsilon() * std::exp(ratio));
    }
    // Log of the current magnitude with a floor tied to the largest term,
    // so convergence thresholds stay meaningful under heavy cancellation.
    double log_mag_floor() const {
        const long double s = std::abs(acc.value());
        if (s == 0.0L || ref == static_cast<long double>(kNegInf))
            return static_cast<double>(max_term_log - 40.0L);
        return static_cast<double>(
            std::max(ref + std::log(s), max_term_log - 40.0L));
    }
};

struct ResidueTerm {
    long double log_abs;
    double sign;
    int order_defect;  // 1 - pole order at this location; 0 = simple pole
};

// Residue ingredients of kernel * x^{-s} at candidate location s0. Each
// numerator gamma sitting at a pole contributes its residue factor, each
// denominator gamma at a pole contributes a zero; order_defect < 0 means
// a genuine multiple pole.
inline ResidueTerm term_at(const KernelView& v, double s0, long double lnx) {
    long double log_abs = -static_cast<long double>(s0) * lnx;
    double sign = 1.0;
    int defect = 1;
    for (double p : v.num_s) {
        const double arg = p + s0;
        if (is_gamma_pole(arg)) {
            const long long t = -nearest_int(arg);
            log_abs -= std::lgamma(static_cast<long double>(t) + 1.0L);
            if (t & 1) sign = -sign;
            defect -= 1;
        } else {
            const SignedLogL sl = slgamma_l(arg);
            log_abs += sl.log_abs;
            sign *= sl.sign;
        }
    }
    for (double p : v.den_s) {
        const double arg = p + s0;
        if (is_gamma_pole(arg)) {
            const long long t = -nearest_int(arg);
            log_abs += std::lgamma(static_cast<long double>(t) + 1.0L);
            if (t & 1) sign = -sign;
            defect += 1;
        } else {
            const SignedLogL sl = slgamma_l(arg);
            log_abs -= sl.log_abs;
            sign *= sl.sign;
        }
    }
    for (double p : v.num_t) {
        const double arg = p - s0;
        if (is_gamma_pole(arg)) {
            throw separability_error(
                "eval_g: left and right pole families intersect");
        }
        const SignedLogL sl = slgamma_l(arg);
        log_abs += sl.log_abs;
        sign *= sl.sign;
    }
    for (double p : v.den_t) {
        const double arg = p - s0;
        if (is_gamma_pole(arg)) {
            const long long t = -nearest_int(arg);
            log_abs += std::lgamma(static_cast<long double>(t) + 1.0L);
            // d(arg)/ds = -1 flips the sign of the zero factor.
            if ((t & 1) == 0) sign = -sign;
            defect += 1;
        } else {
            const SignedLogL sl = slgamma_l(arg);
            log_abs -= sl.log_abs;
            sign *= sl.sign;
        }
    }
    return {log_abs, sign, defect};
}

inline bool integer_close(double d) {
    return std::abs(d - std::round(d)) < kPoleTol;
}

// Group of numerator s-parameters with pairwise integer differences,
// together with the integer-aligned denominator s-parameters.
struct PoleClass {
    std::vector<std::size_t> num_idx;
    std::vector<std::size_t> den_idx;
    double v0 = 0.0;          // smallest numerator parameter in the class
    long long last_event = 0;  // depth beyond which pole orders are stable
    int stable_order = 0;      // pole order deep in the ladder
};

inline std::vector<PoleClass> pole_classes(const KernelView& v) {
    std::vector<PoleClass> classes;
    std::vector<bool> used(v.num_s.size(), false);
    for (std::size_t i = 0; i < v.num_s.size(); ++i) {
        if (used[i]) continue;
        PoleClass c;
        c.num_idx.push_back(i);
        used[i] = true;
        for (std::size_t j = i + 1; j < v.num_s.size(); ++j) {
            if (!used[j] && integer_close(v.num_s[j] - v.num_s[i])) {
                c.num_idx.push_back(j);
                used[j] = true;
            }
        }
        c.v0 = v.num_s[c.num_idx[0]];
        for (auto k : c.num_idx) c.v0 = std::min(c.v0, v.num_s[k]);
        long long ev = 0;
        for (auto k : c.num_idx) ev = std::max(ev, nearest_int(v.num_s[k] - c.v0));
        int den_aligned = 0;
        for (std::size_t j = 0; j < v.den_s.size(); ++j) {
            if (integer_close(v.den_s[j] - c.v0)) {
                c.den_idx.push_back(j);
                ev = std::max(ev, nearest_int(v.den_s[j] - c.v0));
                ++den_aligned;
            }
        }
        // Right-side denominator zeros cancel only finitely many shallow
        // poles: Gamma(w - s) poles sit at s = w + t, t >= 0.
        for (double w : v.den_t) {
            if (integer_close(w + c.v0)) {
                ev = std::max(ev, nearest_int(-(w + c.v0)));
            }
        }
        c.last_event = std::max<long long>(ev, 0) + 1;
        c.stable_order = static_cast<int>(c.num_idx.size()) - den_aligned;
        classes.push_back(std::move(c));
    }
    return classes;
}

struct SeriesDiag {
    ScaledSum sum;
    int terms = 0;
    double tail_log = kNegInf;  // log of the conservative truncation bound
    bool multi_pole = false;
};

// Ascending residue series over all left pole ladders of the view.
inline SeriesDiag ascending_series(const KernelView& v, double x,
                                   const EvalPolicy& policy) {
    SeriesDiag d;
    const long double lnx = std::log(static_cast<long double>(x));
    const double log_tol = std::log(policy.rel_tol);
    const auto classes = pole_classes(v);
    const int min_terms = 8;
    for (const auto& c : classes) {
        int consecutive_small = 0;
        int emitted = 0;
        double prev_log = kNegInf;
        double last_log = kNegInf;
        double ratio = 0.5;  // running estimate of the term decay ratio
        for (long long i = 0;; ++i) {
            if (i > policy.max_terms) {
                throw convergence_error(
                    "eval_g: residue series exceeded max_terms = " +
                    std::to_string(policy.max_terms));
            }
            if (c.stable_order <= 0 && i > c.last_event) break;
            const double s0 = -(c.v0 + static_cast<double>(i));
            const ResidueTerm t = term_at(v, s0, lnx);
            ++d.terms;
            if (t.order_defect < 0) {
                d.multi_pole = true;
                return d;
            }
            if (t.order_defect > 0) continue;  // pole cancelled by zeros
            d.sum.add(t.log_abs, t.sign);
            ++emitted;
            const double tlog = static_cast<double>(t.log_abs);
            if (prev_log != kNegInf && tlog != kNegInf) {
                const double r = std::exp(std::min(0.0, tlog - prev_log));
                ratio = std::min(0.9999999, std::max(r, 0.8 * ratio));
            }
            last_log = tlog;
            prev_log = tlog;
            if (i > c.last_event && emitted >= min_terms) {
                const double stop =
                    log_tol + d.sum.log_mag_floor() + std::log1p(-ratio);
                if (tlog < stop) {
                    if (++consecutive_small >= 5) break;
                } else {
                    consecutive_small = 0;
                }
            }
        }
        if (c.stable_order >= 1 && last_log != kNegInf) {
            const double tail =
                last_log + std::log(ratio) - std::log1p(-ratio);
            d.tail_log = std::max(d.tail_log, tail);
        }
    }
    return d;
}

// Symmetric parameter splitting for classes holding genuine multiple
// poles, paired with their integer-aligned denominators so that exact
// pole-zero cancellations survive the perturbation.
inline KernelView perturb_view(const KernelView& v, double eps) {
    KernelView out = v;
    for (const auto& c : pole_classes(v)) {
        if (c.num_idx.size() < 2) continue;
        bool multi = c.stable_order >= 2;
        for (long long i = 0; !multi && i <= c.last_event; ++i) {
            multi = term_at(v, -(c.v0 + static_cast<double>(i)), 0.0L)
                        .order_defect < 0;
        }
        if (!multi) continue;
        std::vector<std::size_t> nums = c.num_idx;
        std::vector<std::size_t> dens = c.den_idx;
        auto by_num = [&](std::size_t a, std::size_t b) {
            return v.num_s[a] < v.num_s[b];
        };
        auto by_den = [&](std::size_t a, std::size_t b) {
            return v.den_s[a] < v.den_s[b];
        };
        std::sort(nums.begin(), nums.end(), by_num);
        std::sort(dens.begin(), dens.end(), by_den);
        const int cnt = static_cast<int>(nums.size());
        for (int r = 0; r < cnt; ++r) {
            const double delta = eps * (2.0 * r - (cnt - 1));
            out.num_s[nums[r]] += delta;
            if (r < static_cast<int>(dens.size())) out.den_s[dens[r]] += delta;
        }
    }
    return out;
}

inline GEval finish_series(const SeriesDiag& d) {
    GEval g;
    g.terms = d.terms;
    g.log_abs = d.sum.log_value();
    g.sign = d.sum.sign();
    g.value = g.sign * std::exp(g.log_abs);
    if (g.log_abs == kNegInf) {
        g.value = 0.0;
        g.rel_err = (d.sum.max_term() == kNegInf) ? 0.0 : 1.0;
        return g;
    }
    const double tail = std::exp(std::min(700.0, d.tail_log - g.log_abs));
    g.rel_err = d.sum.cancel_error() + tail;
    g.used = GStrategy::ResidueSeries;
    return g;
}

inline GEval eval_series(const KernelView& v, double x, const EvalPolicy& policy) {
    SeriesDiag d = ascending_series(v, x, policy);
    if (!d.multi_pole) return finish_series(d);

    // Multiple poles: averaged +/- epsilon splits, refined by one
    // Richardson step over the doubled offset.
    const double eps = policy.pole_epsilon;
    const double offs[4] = {eps, -eps, 2.0 * eps, -2.0 * eps};
    SeriesDiag diags[4];
    double log_scale = kNegInf;
    for (int i = 0; i < 4; ++i) {
        diags[i] = ascending_series(perturb_view(v, offs[i]), x, policy);
        if (diags[i].multi_pole) {
            throw convergence_error(
                "eval_g: pole multiplicity persists after perturbation");
        }
        log_scale = std::max(log_scale, diags[i].sum.log_value());
    }
    GEval g;
    for (int i = 0; i < 4; ++i) g.terms += diags[i].terms;
    if (log_scale == kNegInf) return g;
    double vals[4];
    double cancel = 0.0;
    double tail_log = kNegInf;
    for (int i = 0; i < 4; ++i) {
        vals[i] = diags[i].sum.sign() *
                  std::exp(diags[i].sum.log_value() - log_scale);
        cancel = std::max(cancel, diags[i].sum.cancel_error() *
                                      std::exp(std::min(
                                          700.0,
                                          diags[i].sum.log_value() - log_scale)));
        tail_log = std::max(tail_log, diags[i].tail_log);
    }
    const double a1 = 0.5 * (vals[0] + vals[1]);
    const double a2 = 0.5 * (vals[2] + vals[3]);
    const double extrap = (4.0 * a1 - a2) / 3.0;
    if (extrap == 0.0) return g;
    g.sign = extrap < 0.0 ? -1.0 : 1.0;
    g.log_abs = log_scale + std::log(std::abs(extrap));
    g.value = g.sign * std::exp(g.log_abs);
    const double tail = std::exp(std::min(700.0, tail_log - g.log_abs));
    g.rel_err = cancel / std::abs(extrap) + tail +
                std::abs(a1 - a2) / (3.0 * std::abs(extrap));
    g.used = GStrategy::ResidueSeries;
    return g;
}

// Precomputed residue coefficients: G(u) = sum_i sign_i exp(log_c_i +
// expo_i ln u), valid for u <= the u_max the table was built for. Multiple
// poles yield four perturbed tables whose weighted sum realizes the
// averaged +/- epsilon splits with one Richardson step.
struct TableEntry {
    double log_c;
    double sign;
    double expo;
};

struct ResidueTable {
    double weight = 1.0;
    std::vector<TableEntry> entries;
    std::vector<std::size_t> class_end;  // one-past-end entry index per class
    std::vector<bool> class_infinite;    // class has an untruncated tail
};

inline ResidueTable build_one_table(const KernelView& v, double u_max,
                                    const EvalPolicy& policy, double weight) {
    ResidueTable table;
    table.weight = weight;
    const double ln_u = std::log(u_max);
    const double margin = std::log(policy.rel_tol) - 2.0 * std::log(10.0) * 9.0;
    for (const auto& c : pole_classes(v)) {
        double class_max = kNegInf;
        int emitted = 0;
        for (long long i = 0;; ++i) {
            if (i > policy.max_terms) {
                throw convergence_error(
                    "residue table: series exceeded max_terms at u_max = " +
                    std::to_string(u_max));
            }
            if (c.stable_order <= 0 && i > c.last_event) break;
            const double s0 = -(c.v0 + static_cast<double>(i));
            const ResidueTerm t = term_at(v, s0, 0.0L);
            if (t.order_defect < 0) {
                throw convergence_error(
                    "residue table: unexpected multiple pole");
            }
            if (t.order_defect > 0) continue;
            const double tlog = static_cast<double>(t.log_abs);
            table.entries.push_back({tlog, t.sign, -s0});
            ++emitted;
            const double at_umax = tlog + (-s0) * ln_u;
            class_max = std::max(class_max, at_umax);
            if (i > c.last_event && emitted >= 48 &&
                at_umax < class_max + margin) {
                break;
            }
        }
        table.class_end.push_back(table.entries.size());
        table.class_infinite.push_back(c.stable_order >= 1);
    }
    return table;
}

inline std::vector<ResidueTable> build_residue_tables(const KernelView& v,
                                                      double u_max,
                                                      const EvalPolicy& policy) {
    bool multi = false;
    for (const auto& c : pole_classes(v)) {
        if (c.num_idx.size() < 2) continue;
        if (c.stable_order >= 2) multi = true;
        for (long long i = 0; !multi && i <= c.last_event; ++i) {
            multi = term_at(v, -(c.v0 + static_cast<double>(i)), 0.0)
                        .order_defect < 0;
        }
        if (multi) break;
    }
    if (!multi) return {build_one_table(v, u_max, policy, 1.0)};
    const double eps = policy.pole_epsilon;
    return {
        build_one_table(perturb_view(v, eps), u_max, policy, 2.0 / 3.0),
        build_one_table(perturb_view(v, -eps), u_max, policy, 2.0 / 3.0),
        build_one_table(perturb_view(v, 2.0 * eps), u_max, policy, -1.0 / 6.0),
        build_one_table(perturb_view(v, -2.0 * eps), u_max, policy, -1.0 / 6.0),
    };
}

struct TableEval {
    double value = 0.0;
    double rel_err = 0.0;
};

inline TableEval eval_residue_tables_log(const std::vector<ResidueTable>& tables,
                                         double ln_u) {
    const double u = std::exp(ln_u);  // may underflow; only the tail uses it
    const double eps = std::numeric_limits<double>::epsilon();
    double total = 0.0;
    double max_term = kNegInf;
    double tail = 0.0;
    double noise = 0.0;  // accumulated lgamma rounding, |term| * eps * |log|
    for (const auto& t : tables) {
        KahanSum sum;
        std::size_t begin = 0;
        for (std::size_t ci = 0; ci < t.class_end.size(); ++ci) {
            const std::size_t end = t.class_end[ci];
            double last = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const double lg = t.entries[i].log_c + t.entries[i].expo * ln_u;
                if (lg < -740.0) {
                    last = 0.0;
                    continue;
                }
                max_term = std::max(max_term, lg);
                last = t.entries[i].sign * std::exp(lg);
                sum.add(last);
                noise += std::abs(last) * eps *
                         (std::abs(t.entries[i].log_c) + 2.0);
            }
            if (t.class_infinite[ci] && u < 1.0) {
                tail += std::abs(t.weight) * std::abs(last) * u / (1.0 - u);
            }
            begin = end;
        }
        total += t.weight * sum.value();
    }
    TableEval e;
    e.value = total;
    if (total != 0.0) {
        const double cancel =
            eps * std::exp(std::min(700.0, max_term)) / std::abs(total);
        e.rel_err = cancel + (tail + noise) / std::abs(total);
    } else {
        e.rel_err = (max_term == kNegInf) ? 0.0 : 1.0;
    }
    return e;
}

inline TableEval eval_residue_tables(const std::vector<ResidueTable>& tables,
                                     double u) {
    return eval_residue_tables_log(tables, std::log(u));
}

inline std::complex<double> log_kernel_view(const KernelView& v,
                                            std::complex<double> s) {
    std::complex<double> acc = 0.0;
    for (double p : v.num_s) acc += log_gamma_complex(p + s);
    for (double p : v.num_t) acc += log_gamma_complex(p - s);
    for (double p : v.den_s) acc -= log_gamma_complex(p + s);
    for (double p : v.den_t) acc -= log_gamma_complex(p - s);
    return acc;
}

inline bool contour_strip(const KernelView& v, double& lo, double& hi) {
    lo = -std::numeric_limits<double>::infinity();
    hi = std::numeric_limits<double>::infinity();
    for (double p : v.num_s) lo = std::max(lo, -p);
    for (double p : v.num_t) hi = std::min(hi, p);
    return lo < hi - 1e-12;
}

// Vertical-line Mellin-Barnes quadrature; requires a separating strip and
// exponential kernel decay (cstar > 0). The abscissa is placed near the
// real saddle of |kernel(s) x^{-s}| inside the strip, which keeps the
// integrand on the scale of the answer; the trapezoid step is halved
// until two refinements agree.
inline GEval eval_contour(const KernelView& v, double x, const EvalPolicy& policy) {
    double lo, hi;
    if (!contour_strip(v, lo, hi)) {
        throw unsupported_class_error(
            "eval_g: no vertical line separates the pole families");
    }
    const double cstar = v.cstar();
    if (cstar <= 0.0) {
        throw unsupported_class_error(
            "eval_g: contour kernel lacks exponential decay (m+n-(p+q)/2 = " +
            std::to_string(cstar) + " <= 0)");
    }
    const double lnx = std::log(x);
    auto log_mag = [&](double sigma) {
        return (log_kernel_view(v, {sigma, 0.0}) - sigma * lnx).real();
    };
    // Keep the line at least a fixed distance from both pole families:
    // the integrand is analytic in |Im t| up to that distance, which is
    // what gives the trapezoid its fast convergence.
    double margin = 0.3;
    if (!std::isinf(lo) && !std::isinf(hi)) {
        margin = std::min(0.3, 0.3 * (hi - lo));
    }
    double slo = std::isinf(lo) ? hi - 40.0 - 4.0 * std::abs(lnx) : lo + margin;
    double shi = std::isinf(hi) ? lo + 40.0 + 4.0 * (std::abs(lnx) + x)
                                : hi - margin;
    if (std::isinf(lo) && std::isinf(hi)) {
        slo = -40.0;
        shi = 40.0;
    }
    shi = std::min(shi, slo + 4000.0);
    double a = slo, b = shi;
    const double gr = 0.6180339887498949;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = log_mag(c1), f2 = log_mag(c2);
    for (int it = 0; it < 80 && (b - a) > 1e-6 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = log_mag(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = log_mag(c2);
        }
    }
    const double sigma0 = 0.5 * (a + b);

    // The magnitude profile along the line: |f| peaks near the real
    // saddle and eventually decays like exp(-pi cstar t); the truncation
    // point is found by walking outward until the profile has dropped
    // far enough below its running peak.
    auto log_abs_f = [&](double t) {
        const std::complex<double> s(sigma0, t);
        return (log_kernel_view(v, s) - s * lnx).real();
    };
    const double drop = std::log(policy.rel_tol) - 14.0;
    double peak = log_abs_f(0.0);
    double t_max = 4.0;
    for (int guard = 0; guard < 4000; ++guard) {
        const double la = log_abs_f(t_max);
        peak = std::max(peak, la);
        if (la < peak + drop) break;
        t_max += std::max(1.0, 0.5 * (la - (peak + drop)) /
                                   (std::numbers::pi * cstar));
    }

    auto integrand = [&](double t) {
        const std::complex<double> s(sigma0, t);
        const std::complex<double> le = log_kernel_view(v, s) - s * lnx;
        if (le.real() < peak - 60.0) return 0.0;
        return std::exp(le).real();
    };

    double h = 0.05;
    double prev = std::numeric_limits<double>::quiet_NaN();
    double prev_diff = std::numeric_limits<double>::infinity();
    GEval g;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int level = 0; level < 10; ++level) {
        KahanSum s;
        double abs_mass = 0.5 * std::abs(integrand(0.0));
        s.add(0.5 * integrand(0.0));
        const long long steps = static_cast<long long>(t_max / h);
        for (long long k = 1; k <= steps; ++k) {
            const double f = integrand(h * k);
            s.add(f);
            abs_mass += std::abs(f);
        }
        const double val = s.value() * h / std::numbers::pi;
        const double floor = 30.0 * eps * abs_mass * h / std::numbers::pi;
        g.terms += static_cast<int>(steps);
        if (!std::isnan(prev)) {
            const double diff = std::abs(val - prev);
            // accept only after two successive refinements agree, so a
            // single aliasing coincidence cannot slip through.
            if (diff <= policy.rel_tol * std::abs(val) + floor &&
                prev_diff <= 16.0 * (policy.rel_tol * std::abs(val) + floor)) {
                g.value = val;
                g.rel_err = (std::abs(val) > 0.0)
                                ? (diff + floor) / std::abs(val)
                                : 0.0;
                g.log_abs = (val == 0.0) ? kNegInf : std::log(std::abs(val));
                g.sign = val < 0.0 ? -1.0 : 1.0;
                g.used = GStrategy::ContourQuadrature;
                return g;
            }
            prev_diff = diff;
        }
        prev = val;
        h *= 0.5;
    }
    throw convergence_error("eval_g: contour quadrature did not converge");
}

inline GEval exact_zero() {
    GEval g;
    g.value = 0.0;
    g.rel_err = 0.0;
    return g;
}

}  // namespace detail

// Full evaluation record for G(x | params). The value may overflow to
// +/-inf; log_abs and sign remain valid in that case.
inline GEval eval_g_detailed(const GParams& params, double x,
                             const EvalPolicy& policy = {}) {
    policy.validate();
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw error("eval_g: argument must be positive and finite");
    }
    const detail::KernelView view =
        detail::reduce_view(detail::make_view(params));
    const int p = params.p();
    const int q = params.q();

    const bool asc_ok = !view.num_s.empty() && (p < q || (p == q && x < 1.0));
    const bool desc_ok = !view.num_t.empty() && (p > q || (p == q && x > 1.0));
    // Empty pole family on the convergent side: the function vanishes
    // identically there (e.g. G^{m,0}_{p,p} above x = 1).
    if (p < q && view.num_s.empty()) return detail::exact_zero();
    if (p > q && view.num_t.empty()) return detail::exact_zero();
    if (p == q && x < 1.0 && view.num_s.empty()) return detail::exact_zero();
    if (p == q && x > 1.0 && view.num_t.empty()) return detail::exact_zero();

    double lo, hi;
    const bool contour_ok =
        detail::contour_strip(view, lo, hi) && view.cstar() > 0.0;

    auto run_series = [&]() -> GEval {
        if (asc_ok) return detail::eval_series(view, x, policy);
        return detail::eval_series(detail::invert_view(view), 1.0 / x, policy);
    };

    if (policy.strategy == GStrategy::ResidueSeries) {
        if (!asc_ok && !desc_ok) {
            throw unsupported_class_error(
                "eval_g: no convergent residue series for this (params, x): "
                "need p<q, p>q, or p=q with x off the unit circle");
        }
        return run_series();
    }
    if (policy.strategy == GStrategy::ContourQuadrature) {
        return detail::eval_contour(view, x, policy);
    }

    // Auto: prefer the series; fall back to the contour when the series
    // self-estimate (truncation + cancellation) misses the tolerance. The
    // best available result is returned with its estimate; enforcing the
    // tolerance is the caller's (or eval_g's) job.
    if (asc_ok || desc_ok) {
        GEval g;
        bool have = false;
        try {
            g = run_series();
            have = true;
        } catch (const convergence_error&) {
            if (!contour_ok) throw;
        }
        if (have && g.rel_err <= policy.rel_tol) return g;
        if (contour_ok) {
            const GEval c = detail::eval_contour(view, x, policy);
            if (!have || c.rel_err < g.rel_err) return c;
        }
        return g;
    }
    if (contour_ok) return detail::eval_contour(view, x, policy);
    throw unsupported_class_error(
        "eval_g: (params, x) outside supported classes: p<q, p=q with x off "
        "the unit circle, or a separating contour with decaying kernel");
}

// Value-only wrapper enforcing the requested tolerance; throws on
// overflow instead of returning inf.
inline double eval_g(const GParams& params, double x,
                     const EvalPolicy& policy = {}) {
    const GEval g = eval_g_detailed(params, x, policy);
    if (g.rel_err > policy.rel_tol) {
        throw convergence_error("eval_g: achieved relative error " +
                                std::to_string(g.rel_err) + " > rel_tol " +
                                std::to_string(policy.rel_tol));
    }
    if (g.log_abs > 709.0) {
        throw overflow_error("eval_g: value exceeds double range");
    }
    return g.value;
}

}  // namespace glrtfuse
