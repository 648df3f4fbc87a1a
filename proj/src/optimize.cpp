#include "optimize.hpp"

#include <cmath>
#include <limits>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_multimin.h>

namespace atomfringe::detail {

namespace {

struct GslInit {
  GslInit() { gsl_set_error_handler_off(); }
};
const GslInit gsl_init;

Eigen::Map<const Eigen::VectorXd> view(const gsl_vector* v) {
  return {v->data, static_cast<Eigen::Index>(v->size)};
}

double nm_trampoline(const gsl_vector* v, void* params) {
  const auto& f = *static_cast<const ObjectiveN*>(params);
  Eigen::VectorXd x = view(v);
  double y = f(x);
  return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

double brent_trampoline(double x, void* params) {
  return (*static_cast<const std::function<double(double)>*>(params))(x);
}

BrentResult golden(const std::function<double(double)>& f, double a, double b, double xtol,
                   int max_iter) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  double x = fc < fd ? c : d;
  return {x, std::min(fc, fd), (b - a) <= xtol};
}

struct LmParams {
  const ResidualFn* fn;
  Eigen::VectorXd r;
};

int lm_trampoline(const gsl_vector* x, void* params, gsl_vector* f) {
  auto* p = static_cast<LmParams*>(params);
  Eigen::VectorXd xv = view(x);
  (*p->fn)(xv, p->r);
  for (Eigen::Index i = 0; i < p->r.size(); ++i) {
    if (!std::isfinite(p->r(i))) return GSL_EDOM;
    gsl_vector_set(f, static_cast<size_t>(i), p->r(i));
  }
  return GSL_SUCCESS;
}

}  // namespace

NelderMeadResult nelder_mead(const ObjectiveN& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& step, double size_tol, int max_iter) {
  const size_t n = static_cast<size_t>(x0.size());
  gsl_multimin_function fn{&nm_trampoline, n, const_cast<ObjectiveN*>(&f)};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  for (size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, x0(static_cast<Eigen::Index>(i)));
    gsl_vector_set(ss, i, step(static_cast<Eigen::Index>(i)));
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, ss);

  int iter = 0;
  int status = GSL_CONTINUE;
  while (status == GSL_CONTINUE && iter < max_iter) {
    ++iter;
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol);
  }
  NelderMeadResult out{view(s->x), s->fval, status == GSL_SUCCESS, iter};
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(ss);
  gsl_vector_free(x);
  return out;
}

BrentResult brent_minimize(const std::function<double(double)>& f, double a, double m, double b,
                           double xtol, int max_iter) {
  const double fa = f(a), fm = f(m), fb = f(b);
  if (!(a < m && m < b) || !(fm < fa && fm < fb)) return golden(f, a, b, xtol, max_iter);

  gsl_function fn{&brent_trampoline, const_cast<std::function<double(double)>*>(&f)};
  gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
  if (gsl_min_fminimizer_set_with_values(s, &fn, m, fm, a, fa, b, fb) != GSL_SUCCESS) {
    gsl_min_fminimizer_free(s);
    return golden(f, a, b, xtol, max_iter);
  }
  int status = GSL_CONTINUE;
  for (int i = 0; i < max_iter && status == GSL_CONTINUE; ++i) {
    if (gsl_min_fminimizer_iterate(s) != GSL_SUCCESS) break;
    status = gsl_min_test_interval(gsl_min_fminimizer_x_lower(s), gsl_min_fminimizer_x_upper(s),
                                   xtol, 0.0);
  }
  BrentResult out{gsl_min_fminimizer_x_minimum(s), gsl_min_fminimizer_f_minimum(s),
                  status == GSL_SUCCESS};
  gsl_min_fminimizer_free(s);
  if (fm < out.fx) out = {m, fm, out.converged};
  return out;
}

LeastSquaresResult levenberg_marquardt(const ResidualFn& residuals, int n_residuals,
                                       const Eigen::VectorXd& x0, double xtol, int max_iter) {
  const size_t p = static_cast<size_t>(x0.size());
  const size_t n = static_cast<size_t>(n_residuals);
  LmParams params{&residuals, Eigen::VectorXd(n_residuals)};

  gsl_multifit_nlinear_fdf fdf;
  fdf.f = &lm_trampoline;
  fdf.df = nullptr;
  fdf.fvv = nullptr;
  fdf.n = n;
  fdf.p = p;
  fdf.params = &params;

  gsl_multifit_nlinear_parameters fparams = gsl_multifit_nlinear_default_parameters();
  fparams.trs = gsl_multifit_nlinear_trs_lm;
  gsl_multifit_nlinear_workspace* w =
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &fparams, n, p);

  gsl_vector* x = gsl_vector_alloc(p);
  for (size_t i = 0; i < p; ++i) gsl_vector_set(x, i, x0(static_cast<Eigen::Index>(i)));
  gsl_multifit_nlinear_init(x, &fdf, w);

  int info = 0;
  int status = gsl_multifit_nlinear_driver(static_cast<size_t>(max_iter), xtol, 1e-15, 1e-15,
                                           nullptr, nullptr, &info, w);

  LeastSquaresResult out;
  out.x = view(w->x);
  gsl_matrix* cov = gsl_matrix_alloc(p, p);
  gsl_multifit_nlinear_covar(gsl_multifit_nlinear_jac(w), 0.0, cov);
  out.covariance.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (size_t i = 0; i < p; ++i)
    for (size_t j = 0; j < p; ++j)
      out.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          gsl_matrix_get(cov, i, j);
  Eigen::Map<const Eigen::VectorXd> r = view(gsl_multifit_nlinear_residual(w));
  out.chi2 = r.squaredNorm();
  out.converged = status == GSL_SUCCESS;

  gsl_matrix_free(cov);
  gsl_vector_free(x);
  gsl_multifit_nlinear_free(w);
  return out;
}

double chi2_sf(double x, double dof) { return gsl_cdf_chisq_Q(x, dof); }

}  // namespace atomfringe::detail
