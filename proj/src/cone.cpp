#include "aronsson/cone.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace aronsson {

namespace {

// Scaled KKT residual for H_p(p) = lambda x, H(p) = k.
double kkt_residual_of(const Hamiltonian& H, double k, const Vec& x, const Vec& p, double lambda,
                       Vec* r1_out = nullptr, double* r2_out = nullptr) {
    const Vec g = H.grad(p);
    const Vec r1 = g - lambda * x;
    const double r2 = H.eval(p) - k;
    if (r1_out) *r1_out = r1;
    if (r2_out) *r2_out = r2;
    const double gscale = std::max(1.0, g.cwiseAbs().maxCoeff());
    return std::max(r1.cwiseAbs().maxCoeff() / gscale, std::abs(r2) / std::max(1.0, k));
}

// Rotation of a direction used for fallback restarts. In the plane it is a
// genuine rotation; in higher dimensions the extra angle perturbs the first
// two coordinates, which is enough to leave a bad Newton basin.
Vec jitter_direction(const Vec& e, double angle) {
    Vec d = e;
    const double c = std::cos(angle), s = std::sin(angle);
    if (d.size() >= 2) {
        const double a = d[0], b = d[1];
        d[0] = c * a - s * b;
        d[1] = s * a + c * b;
    } else {
        d[0] = (angle > M_PI ? -1.0 : 1.0) * d[0];
    }
    const double n = d.norm();
    return n > 0 ? Vec(d / n) : e;
}

struct NewtonOutcome {
    Vec p;
    double lambda = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

NewtonOutcome kkt_newton(const Hamiltonian& H, double k, const Vec& x, Vec p, double lambda,
                         int max_iters) {
    const int n = H.dim;
    Vec r1(n);
    double r2 = 0.0;
    double res = kkt_residual_of(H, k, x, p, lambda, &r1, &r2);

    Mat J(n + 1, n + 1);
    Vec rhs(n + 1), step(n + 1), p_new(n);
    for (int it = 0; it < max_iters && res > 1e-13; ++it) {
        J.topLeftCorner(n, n) = H.hess(p);
        J.topRightCorner(n, 1) = -x;
        J.bottomLeftCorner(1, n) = H.grad(p).transpose();
        J(n, n) = 0.0;
        rhs.head(n) = -r1;
        rhs[n] = -r2;
        Eigen::PartialPivLU<Mat> lu(J);
        step = lu.solve(rhs);
        if (!step.allFinite()) break;

        double s = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 40; ++bt) {
            p_new = p + s * step.head(n);
            const double lambda_new = lambda + s * step[n];
            Vec r1_new(n);
            double r2_new = 0.0;
            const double res_new = kkt_residual_of(H, k, x, p_new, lambda_new, &r1_new, &r2_new);
            if (res_new < res) {
                p = p_new;
                lambda = lambda_new;
                r1 = r1_new;
                r2 = r2_new;
                res = res_new;
                improved = true;
                break;
            }
            s *= 0.5;
        }
        if (!improved) break;
    }
    NewtonOutcome out;
    out.p = p;
    out.lambda = lambda;
    out.residual = res;
    out.converged = res <= 1e-12 && lambda >= 0.0;
    return out;
}

}  // namespace

ConeValue eval_cone(const Hamiltonian& H, double k, const Vec& x) {
    if (!(k > 0.0)) throw std::invalid_argument("eval_cone: k must be > 0");
    if (x.size() != H.dim) throw std::invalid_argument("eval_cone: x has wrong dimension");

    if (x.norm() == 0.0) {
        ConeValue cv;
        cv.value = 0.0;
        cv.multiplier = 0.0;
        cv.kkt_residual = 0.0;
        return cv;
    }

    const double xnorm = x.norm();
    const Vec e = x / xnorm;

    auto initial_lambda = [&](const Vec& p0) {
        const Vec g = H.grad(p0);
        const double d = g.dot(x);
        return d > 0 ? d / x.squaredNorm() : g.norm() / xnorm;
    };

    // Primary start on the isotropic surrogate level, then golden-angle
    // jittered starts reprojected onto the level set.
    double best_res = std::numeric_limits<double>::infinity();
    constexpr double kGolden = 2.399963229728653;
    for (int attempt = 0; attempt <= 8; ++attempt) {
        Vec p0;
        if (attempt == 0) {
            p0 = std::sqrt(2.0 * k / H.beta) * e;
        } else {
            const double angle = kGolden * attempt;
            p0 = level_point(H, k, jitter_direction(e, angle));
        }
        const NewtonOutcome out = kkt_newton(H, k, x, p0, initial_lambda(p0), 100);
        best_res = std::min(best_res, out.residual);
        if (out.converged) {
            ConeValue cv;
            cv.value = out.p.dot(x);
            cv.maximizer = out.p;
            cv.multiplier = out.lambda;
            cv.kkt_residual = out.residual;
            return cv;
        }
    }
    throw NonconvergenceError("eval_cone: Newton did not converge", best_res);
}

Vec cone_gradient(const Hamiltonian& H, double k, const Vec& x) {
    if (x.size() != H.dim || x.norm() == 0.0)
        throw std::invalid_argument("cone_gradient: x must be nonzero");
    return *eval_cone(H, k, x).maximizer;
}

ConeValue eval_cone_hat(const Hamiltonian& H, double k, const Vec& x) {
    return eval_cone(reflect(H), k, x);
}

Vec reverse_spherical_image(const Hamiltonian& H, double k, const Vec& e) {
    if (std::abs(e.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("reverse_spherical_image: e must be a unit vector");
    return cone_gradient(H, k, e);
}

std::vector<ConeValue> level_path(const Hamiltonian& H, const Vec& x,
                                  const std::vector<double>& k_grid) {
    if (x.norm() == 0.0) throw std::invalid_argument("level_path: x must be nonzero");
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (!(k_grid[i] > 0.0)) throw std::invalid_argument("level_path: levels must be positive");
        if (i > 0 && !(k_grid[i] > k_grid[i - 1]))
            throw std::invalid_argument("level_path: levels must be increasing");
    }
    std::vector<ConeValue> out;
    out.reserve(k_grid.size());
    for (double k : k_grid) out.push_back(eval_cone(H, k, x));
    return out;
}

namespace {

// Newton on the sphere-constrained stationarity system
// F(p, mu) = [H_p(p) - mu p; (|p|^2 - a^2)/2] with SVD steps; the system is
// degenerate for rotation-invariant H.
bool sphere_newton(const Hamiltonian& H, double a, Vec p, double mu, Vec& p_out) {
    const int n = H.dim;
    auto residual = [&](const Vec& pp, double m, Vec& r) {
        const Vec g = H.grad(pp);
        r.head(n) = g - m * pp;
        r[n] = 0.5 * (pp.squaredNorm() - a * a);
        const double gs = std::max(1.0, g.cwiseAbs().maxCoeff());
        return std::max(r.head(n).cwiseAbs().maxCoeff() / gs, std::abs(r[n]) / std::max(1.0, a * a));
    };
    Vec r(n + 1), r_new(n + 1);
    double res = residual(p, mu, r);
    for (int it = 0; it < 60 && res > 1e-13; ++it) {
        Mat J(n + 1, n + 1);
        J.topLeftCorner(n, n) = H.hess(p) - mu * Mat::Identity(n, n);
        J.topRightCorner(n, 1) = -p;
        J.bottomLeftCorner(1, n) = p.transpose();
        J(n, n) = 0.0;
        Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-12);
        const Vec step = svd.solve(-r);
        double s = 1.0;
        bool ok = false;
        for (int bt = 0; bt < 30; ++bt) {
            Vec p_new = p + s * step.head(n);
            const double mu_new = mu + s * step[n];
            const double res_new = residual(p_new, mu_new, r_new);
            if (res_new < res) {
                p = p_new;
                mu = mu_new;
                r = r_new;
                res = res_new;
                ok = true;
                break;
            }
            s *= 0.5;
        }
        if (!ok) break;
    }
    if (res > 1e-11) return false;
    // Snap onto the sphere.
    p_out = a * p / p.norm();
    return true;
}

}  // namespace

LevelForSlope level_for_slope(const Hamiltonian& H, double a) {
    if (a < 0.0) throw std::invalid_argument("level_for_slope: a must be >= 0");
    LevelForSlope out;
    if (a == 0.0) {
        out.k = 0.0;
        out.degenerate = true;
        out.arg_max = Vec::Zero(H.dim);
        return out;
    }
    const int n = H.dim;
    std::vector<Vec> starts;
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1.0;
        starts.push_back(e);
        e[i] = -1.0;
        starts.push_back(e);
    }
    Rng rng(0xbeefull);
    for (int j = 0; j < 8; ++j) starts.push_back(rng.unit_vector(n));

    bool found = false;
    double k_best = -std::numeric_limits<double>::infinity();
    for (const Vec& d : starts) {
        Vec p0 = a * d;
        const Vec g = H.grad(p0);
        const double mu0 = g.dot(p0) / p0.squaredNorm();
        Vec p;
        if (!sphere_newton(H, a, p0, mu0, p)) continue;
        found = true;
        const double k = H.eval(p);
        if (k > k_best) {
            k_best = k;
            out.arg_max = p;
        }
    }
    if (!found) throw NonconvergenceError("level_for_slope: no start converged", 1.0);
    out.k = k_best;

    // The construction forces a to be the smallest level-set radius of k_a.
    const LevelExtremes ext = level_extremes(H, k_best);
    if (std::abs(ext.a_k - a) > 1e-8 * std::max(1.0, a))
        throw std::logic_error("level_for_slope: identity a = min { |p| : H(p)=k_a } failed");
    return out;
}

}  // namespace aronsson
