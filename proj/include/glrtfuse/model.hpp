// This file is part of glrtfuse, a sensor-fusion detection toolkit.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Linear observation model for one sensor modality,
//
//   obs = H theta + noise,   noise ~ N(0, sigma2 R),
//
// with the signal-subspace projectors and maximum-likelihood estimators
// the detection statistics are built from. R enters only through its
// lower Cholesky factor L: whitening maps obs to L^{-1} obs, so every
// quadratic form is an ordinary Euclidean norm in whitened coordinates.
// sigma2 is a simulation nuisance; no inference operation reads it.

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "glrtfuse/errors.hpp"
#include "glrtfuse/linalg.hpp"
#include "glrtfuse/rng.hpp"

namespace glrtfuse {

enum class Hypothesis { H0, H1 };

struct ChiSqParams {
    int c;          // complementary (noise subspace) degrees of freedom
    int d;          // signal subspace degrees of freedom
    double lambda;  // noncentrality, 0 under H0
};

class SensorModel {
  public:
    SensorModel(Matrix h, Matrix r, std::vector<double> theta, double sigma2)
        : h_(std::move(h)), r_(std::move(r)), theta_(std::move(theta)),
          sigma2_(sigma2) {
        const std::size_t n = h_.rows();
        const std::size_t p = h_.cols();
        if (r_.rows() != n || r_.cols() != n) {
            throw config_error("SensorModel: R must be samples x samples");
        }
        if (theta_.size() != p) {
            throw config_error("SensorModel: theta length must match H columns");
        }
        if (n < p + 1) {
            throw config_error(
                "SensorModel: need samples >= params + 1 for a nondegenerate "
                "variance estimate");
        }
        if (!(sigma2_ > 0.0)) {
            throw config_error("SensorModel: sigma2 must be positive");
        }
        chol_r_ = cholesky(r_);  // throws if R is not SPD
        hw_ = Matrix(n, p);
        for (std::size_t j = 0; j < p; ++j) {
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = h_(i, j);
            auto wcol = solve_lower(chol_r_, col);
            for (std::size_t i = 0; i < n; ++i) hw_(i, j) = wcol[i];
        }
        Matrix gram(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += hw_(k, i) * hw_(k, j);
                gram(i, j) = s;
            }
        try {
            chol_gram_ = cholesky(gram);
        } catch (const singular_matrix_error&) {
            throw singular_matrix_error(
                "SensorModel: H does not have full column rank under R^{-1}");
        }
        auto ht = mat_vec(hw_, theta_);
        lambda_ = dot(ht, ht);
    }

    int samples() const { return static_cast<int>(h_.rows()); }
    int param_count() const { return static_cast<int>(h_.cols()); }
    const Matrix& h() const { return h_; }
    const Matrix& r() const { return r_; }
    const Matrix& whitened_h() const { return hw_; }
    const std::vector<double>& theta() const { return theta_; }
    double sigma2() const { return sigma2_; }
    double lambda() const { return lambda_; }

    // L^{-1} obs.
    std::vector<double> whiten(std::span<const double> obs) const {
        return solve_lower(chol_r_, obs);
    }

    // theta_hat solving the whitened least-squares problem for u = L^{-1} obs.
    std::vector<double> fit(std::span<const double> u) const {
        const std::size_t p = h_.cols();
        std::vector<double> rhs(p, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < h_.rows(); ++k) s += hw_(k, i) * u[k];
            rhs[i] = s;
        }
        auto y = solve_lower(chol_gram_, rhs);
        return solve_lower_transposed(chol_gram_, y);
    }

    // One observation drawn from the model under the given hypothesis.
    std::vector<double> draw(Hypothesis hyp, CounterStream& stream) const {
        const std::size_t n = h_.rows();
        std::vector<double> g(n);
        for (auto& v : g) v = stream.next_normal();
        const double scale = std::sqrt(sigma2_);
        std::vector<double> obs(n, 0.0);
        // noise = sqrt(sigma2) L g
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k <= i; ++k) s += chol_r_(i, k) * g[k];
            obs[i] = scale * s;
        }
        if (hyp == Hypothesis::H1) {
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < h_.cols(); ++j)
                    s += h_(i, j) * theta_[j];
                obs[i] += s;
            }
        }
        return obs;
    }

  private:
    Matrix h_, r_;
    std::vector<double> theta_;
    double sigma2_;
    Matrix chol_r_;
    Matrix hw_;
    Matrix chol_gram_;
    double lambda_ = 0.0;
};

// The two modalities; their noises are independent by construction.
struct FusedModel {
    SensorModel sensor_x;
    SensorModel sensor_y;
};

struct Projectors {
    Matrix p;
    Matrix p_perp;
};

// Signal projectors in whitened coordinates,
//   P = R^{-1/2} H (H^T R^{-1} H)^{-1} H^T R^{-1/2},  P_perp = I - P.
// Works on raw (H, R) so the square-H algebra cases remain testable.
inline Projectors projector(const Matrix& h, const Matrix& r) {
    const std::size_t n = h.rows();
    Matrix l = cholesky(r);
    Matrix hw(n, h.cols());
    for (std::size_t j = 0; j < h.cols(); ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = h(i, j);
        auto w = solve_lower(l, col);
        for (std::size_t i = 0; i < n; ++i) hw(i, j) = w[i];
    }
    Matrix p(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        auto coef = solve_normal_equations(hw, e);
        auto proj = mat_vec(hw, coef);
        for (std::size_t i = 0; i < n; ++i) p(i, col) = proj[i];
    }
    Matrix perp = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) perp(i, j) -= p(i, j);
    return {std::move(p), std::move(perp)};
}

inline Projectors projector(const SensorModel& model) {
    return projector(model.h(), model.r());
}

inline std::vector<double> mle_theta(const SensorModel& model,
                                     std::span<const double> obs) {
    return model.fit(model.whiten(obs));
}

inline double mle_sigma2(const SensorModel& model, std::span<const double> obs,
                         Hypothesis hyp) {
    const auto u = model.whiten(obs);
    const double n = static_cast<double>(model.samples());
    if (hyp == Hypothesis::H0) return dot(u, u) / n;
    const auto theta_hat = model.fit(u);
    const auto pu = mat_vec(model.whitened_h(), theta_hat);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u[i] - pu[i];
        s += r * r;
    }
    return s / n;
}

inline ChiSqParams chisq_params(const SensorModel& model, Hypothesis hyp) {
    return {model.samples() - model.param_count(), model.param_count(),
            hyp == Hypothesis::H1 ? model.lambda() : 0.0};
}

inline std::vector<std::vector<double>> simulate(const SensorModel& model,
                                                 Hypothesis hyp,
                                                 CounterStream& stream,
                                                 int count) {
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(model.draw(hyp, stream));
    return out;
}

// Canonical test-bench sensor: H = the first d standard basis columns,
// R = I, theta sized for the requested noncentrality.
inline SensorModel make_canonical_sensor(int samples, int d, double lambda,
                                         double sigma2 = 1.0) {
    Matrix h(samples, d);
    for (int i = 0; i < d; ++i) h(i, i) = 1.0;
    std::vector<double> theta(d, std::sqrt(lambda / d));
    return SensorModel(std::move(h), Matrix::identity(samples),
                       std::move(theta), sigma2);
}

// Same model with theta rescaled to a new noncentrality.
inline SensorModel with_lambda(const SensorModel& model, double lambda) {
    if (!(model.lambda() > 0.0)) {
        throw config_error("with_lambda: model has zero signal energy");
    }
    const double f = std::sqrt(lambda / model.lambda());
    auto theta = model.theta();
    for (auto& t : theta) t *= f;
    return SensorModel(model.h(), model.r(), std::move(theta), model.sigma2());
}

}  // namespace glrtfuse
