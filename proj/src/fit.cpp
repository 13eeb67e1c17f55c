#include "aqec/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aqec {

namespace {

struct Params {
    double a, tau, c;
};

double model(const Params& p, double t) {
    const double x = t / p.tau;
    return p.a * std::exp(-x * x) + p.c;
}

double rss(const Params& p, const std::vector<double>& t, const std::vector<double>& y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = model(p, t[i]) - y[i];
        sum += r * r;
    }
    return sum;
}

Params clamp_params(Params p, double tau_floor) {
    p.a = std::clamp(p.a, 0.0, 1.0);
    p.c = std::clamp(p.c, 0.0, 1.0);
    p.tau = std::max(p.tau, tau_floor);
    return p;
}

} // namespace

FitResult fit_gaussian_decay(const std::vector<double>& times, const std::vector<double>& values) {
    const auto n = times.size();
    if (n != values.size() || n < 4)
        throw std::invalid_argument("fit_gaussian_decay: need at least 4 matched points");

    const double t_max = *std::max_element(times.begin(), times.end());
    const double tau_floor = 1e-6 * t_max;

    // Initialization: offset from the tail, amplitude from the head, tau from
    // the midpoint crossing.
    Params p;
    p.c = values.back();
    p.a = std::clamp(values.front() - p.c, 1e-3, 1.0);
    const double mid = p.c + 0.5 * p.a;
    p.tau = t_max;
    for (std::size_t i = 0; i < n; ++i)
        if (values[i] < mid) {
            p.tau = std::max(times[i], tau_floor);
            break;
        }
    p = clamp_params(p, tau_floor);

    double lambda = 1e-3;
    double current = rss(p, times, values);
    std::ostringstream trace;
    int iter = 0;
    bool converged = false;
    for (; iter < 200; ++iter) {
        Eigen::MatrixXd jac(n, 3);
        Eigen::VectorXd res(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = times[i] / p.tau;
            const double e = std::exp(-x * x);
            jac(i, 0) = e;
            jac(i, 1) = p.a * e * 2.0 * x * x / p.tau;
            jac(i, 2) = 1.0;
            res(i) = model(p, times[i]) - values[i];
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * res;
        if (g.cwiseAbs().maxCoeff() < 1e-14) {
            converged = true;
            break;
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 16; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            const Params trial =
                clamp_params({p.a + step(0), p.tau + step(1), p.c + step(2)}, tau_floor);
            const double trial_rss = rss(trial, times, values);
            if (trial_rss <= current) {
                const double improvement = current - trial_rss;
                const double moved = step.norm();
                p = trial;
                current = trial_rss;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (improvement < 1e-16 * (1.0 + current) && moved < 1e-12) converged = true;
                break;
            }
            lambda *= 8.0;
        }
        trace << "iter " << iter << " rss " << current << " lambda " << lambda << "\n";
        if (!stepped || converged) {
            converged = converged || stepped;
            break;
        }
    }
    if (!converged && iter >= 200)
        throw fit_failure("fit_gaussian_decay: no convergence after 200 iterations", trace.str());

    // Local quadratic error estimate at the optimum.
    Eigen::MatrixXd jac(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = times[i] / p.tau;
        const double e = std::exp(-x * x);
        jac(i, 0) = e;
        jac(i, 1) = p.a * e * 2.0 * x * x / p.tau;
        jac(i, 2) = 1.0;
    }
    const double dof = std::max<double>(1.0, static_cast<double>(n) - 3.0);
    const double s2 = current / dof;
    const Eigen::MatrixXd cov =
        s2 * (jac.transpose() * jac + 1e-300 * Eigen::MatrixXd::Identity(3, 3)).inverse();

    FitResult result;
    result.a = p.a;
    result.tau = p.tau;
    result.c = p.c;
    result.a_err = std::sqrt(std::max(0.0, cov(0, 0)));
    result.tau_err = std::sqrt(std::max(0.0, cov(1, 1)));
    result.c_err = std::sqrt(std::max(0.0, cov(2, 2)));
    result.residual_norm = std::sqrt(current);
    result.iterations = iter;
    return result;
}

LambdaResult lambda_factor(const FitResult& fit_logical, const FitResult& fit_physical) {
    if (fit_logical.tau <= 0 || fit_physical.tau <= 0)
        throw std::invalid_argument("lambda_factor: lifetimes must be positive");
    LambdaResult r;
    r.lambda = fit_logical.tau / fit_physical.tau;
    const double rel_l = fit_logical.tau_err / fit_logical.tau;
    const double rel_p = fit_physical.tau_err / fit_physical.tau;
    r.lambda_err = r.lambda * std::sqrt(rel_l * rel_l + rel_p * rel_p);
    return r;
}

} // namespace aqec
