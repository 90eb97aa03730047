#pragma once

#include <Eigen/Dense>
#include <functional>

namespace mrt {

struct MinResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
};

// Derivative-free simplex search (GSL nmsimplex2).
MinResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                           double step, int max_iter = 400, double size_tol = 1e-10);

// Brent minimization on [a, b].
std::pair<double, double> minimize_interval(const std::function<double(double)>& f, double a, double b,
                                            int bits = 40, int max_iter = 100);

}  // namespace mrt
