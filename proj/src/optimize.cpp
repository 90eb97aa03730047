#include "mrt/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <boost/math/tools/minima.hpp>
#include <cstdint>

namespace mrt {

namespace {
struct Closure {
    const std::function<double(const Eigen::VectorXd&)>* f;
    Eigen::VectorXd buf;
    int count = 0;
};

double trampoline(const gsl_vector* v, void* params) {
    auto* c = static_cast<Closure*>(params);
    for (Eigen::Index i = 0; i < c->buf.size(); ++i) c->buf[i] = gsl_vector_get(v, i);
    ++c->count;
    return (*c->f)(c->buf);
}
}  // namespace

MinResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                           double step, int max_iter, double size_tol) {
    const std::size_t dim = static_cast<std::size_t>(x0.size());
    static const bool quiet = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)quiet;
    MinResult out;
    if (dim == 0) {
        out.x = x0;
        out.value = f(x0);
        out.evaluations = 1;
        return out;
    }
    Closure c{&f, Eigen::VectorXd(x0.size())};
    gsl_multimin_function fn{&trampoline, dim, &c};
    gsl_vector* x = gsl_vector_alloc(dim);
    gsl_vector* ss = gsl_vector_alloc(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        gsl_vector_set(x, i, x0[static_cast<Eigen::Index>(i)]);
        gsl_vector_set(ss, i, step);
    }
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
    gsl_multimin_fminimizer_set(s, &fn, x, ss);
    for (int it = 0; it < max_iter; ++it) {
        if (gsl_multimin_fminimizer_iterate(s) != 0) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol) == GSL_SUCCESS) break;
    }
    out.x.resize(x0.size());
    for (std::size_t i = 0; i < dim; ++i) out.x[static_cast<Eigen::Index>(i)] = gsl_vector_get(s->x, i);
    out.value = s->fval;
    out.evaluations = c.count;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(x);
    gsl_vector_free(ss);
    return out;
}

std::pair<double, double> minimize_interval(const std::function<double(double)>& f, double a, double b, int bits,
                                            int max_iter) {
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    return boost::math::tools::brent_find_minima(f, a, b, bits, iters);
}

}  // namespace mrt
