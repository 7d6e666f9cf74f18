#include "aronsson/hamiltonian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace aronsson {

namespace {

void check_dim(const Hamiltonian& H, const Vec& p) {
    if (p.size() != H.dim) throw std::invalid_argument("Hamiltonian: point has wrong dimension");
}

std::vector<double> parse_params(const std::string& body) {
    std::vector<double> out;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument("hamiltonian spec: bad number '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

Hamiltonian make_isotropic(int dim) {
    if (dim < 1) throw std::invalid_argument("make_isotropic: dim must be >= 1");
    Hamiltonian H;
    H.dim = dim;
    H.alpha = 1.0;
    H.beta = 1.0;
    H.spec = "isotropic";
    H.eval = [](const Vec& p) { return 0.5 * p.squaredNorm(); };
    H.grad = [](const Vec& p) { return p; };
    H.hess = [dim](const Vec&) { return Mat(Mat::Identity(dim, dim)); };
    if (dim == 2) H.grad2 = [](const Vec2& p) { return p; };
    return H;
}

Hamiltonian make_anisotropic(const Mat& A) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || n < 1) throw std::invalid_argument("make_anisotropic: A must be square");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("make_anisotropic: A must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0)) throw std::invalid_argument("make_anisotropic: A must be positive definite");

    Hamiltonian H;
    H.dim = n;
    H.alpha = lmin;
    H.beta = lmax;
    if (n == 2) {
        std::ostringstream os;
        os << "anisotropic:" << format_double(A(0, 0)) << "," << format_double(A(0, 1)) << ","
           << format_double(A(1, 1));
        H.spec = os.str();
    } else {
        H.spec = "anisotropic";
    }
    // Allocation-free eval; it sits in the hot path of the sampling oracles.
    H.eval = [A, n](const Vec& p) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double row = 0.0;
            for (int j = 0; j < n; ++j) row += A(i, j) * p[j];
            s += p[i] * row;
        }
        return 0.5 * s;
    };
    H.grad = [A](const Vec& p) { return Vec(A * p); };
    H.hess = [A](const Vec&) { return A; };
    if (n == 2) {
        const double a11 = A(0, 0), a12 = A(0, 1), a22 = A(1, 1);
        H.grad2 = [a11, a12, a22](const Vec2& p) {
            return Vec2{a11 * p[0] + a12 * p[1], a12 * p[0] + a22 * p[1]};
        };
    }
    return H;
}

Hamiltonian make_anisotropic(double a11, double a12, double a22) {
    Mat A(2, 2);
    A << a11, a12, a12, a22;
    return make_anisotropic(A);
}

Hamiltonian make_shifted_smooth(double c, int dim) {
    if (dim < 1) throw std::invalid_argument("make_shifted_smooth: dim must be >= 1");
    if (std::abs(c) > 0.2)
        throw std::invalid_argument("make_shifted_smooth: |c| must be <= 0.2 to keep uniform convexity");

    Hamiltonian H;
    H.dim = dim;
    H.alpha = 1.0 - std::abs(c);
    H.beta = 1.0 + std::abs(c);
    H.spec = "shifted:" + format_double(c);
    H.eval = [c](const Vec& p) { return 0.5 * p.squaredNorm() + c * (std::sin(p[0]) - p[0]); };
    H.grad = [c](const Vec& p) {
        Vec g = p;
        g[0] += c * (std::cos(p[0]) - 1.0);
        return g;
    };
    H.hess = [c, dim](const Vec& p) {
        Mat M = Mat::Identity(dim, dim);
        M(0, 0) -= c * std::sin(p[0]);
        return M;
    };

    if (dim == 2)
        H.grad2 = [c](const Vec2& p) { return Vec2{p[0] + c * (std::cos(p[0]) - 1.0), p[1]}; };

    // Probe the Hessian bound on a fixed grid of p1 values.
    for (int i = 0; i <= 100; ++i) {
        const double p1 = -10.0 + 0.2 * i;
        const double e = 1.0 - c * std::sin(p1);
        if (!(e > 0.0)) throw std::invalid_argument("make_shifted_smooth: Hessian not positive on probe set");
    }
    return H;
}

Hamiltonian make_builtin(const std::string& spec, int dim) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (name == "isotropic") {
        if (!body.empty()) throw std::invalid_argument("hamiltonian spec: isotropic takes no parameters");
        return make_isotropic(dim);
    }
    if (name == "anisotropic") {
        const auto v = parse_params(body);
        if (v.size() != 3) throw std::invalid_argument("hamiltonian spec: anisotropic needs a11,a12,a22");
        return make_anisotropic(v[0], v[1], v[2]);
    }
    if (name == "shifted") {
        const auto v = parse_params(body);
        if (v.size() != 1) throw std::invalid_argument("hamiltonian spec: shifted needs one parameter c");
        return make_shifted_smooth(v[0], dim);
    }
    throw std::invalid_argument("hamiltonian spec: unknown kind '" + name + "'");
}

Hamiltonian reflect(const Hamiltonian& H) {
    Hamiltonian R;
    R.dim = H.dim;
    R.alpha = H.alpha;
    R.beta = H.beta;
    R.spec = "hat(" + H.spec + ")";
    auto e = H.eval;
    auto g = H.grad;
    auto h = H.hess;
    R.eval = [e](const Vec& p) { return e(-p); };
    R.grad = [g](const Vec& p) { return Vec(-g(-p)); };
    R.hess = [h](const Vec& p) { return h(-p); };
    if (H.grad2) {
        auto g2 = H.grad2;
        R.grad2 = [g2](const Vec2& p) { return Vec2(-g2(-p)); };
    }
    return R;
}

Hamiltonian scale_level(const Hamiltonian& H, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scale_level: factor must be > 0");
    Hamiltonian S;
    S.dim = H.dim;
    S.alpha = factor * H.alpha;
    S.beta = factor * H.beta;
    S.spec = "scale(" + format_double(factor) + "," + H.spec + ")";
    auto e = H.eval;
    auto g = H.grad;
    auto h = H.hess;
    S.eval = [e, factor](const Vec& p) { return factor * e(p); };
    S.grad = [g, factor](const Vec& p) { return Vec(factor * g(p)); };
    S.hess = [h, factor](const Vec& p) { return Mat(factor * h(p)); };
    if (H.grad2) {
        auto g2 = H.grad2;
        S.grad2 = [g2, factor](const Vec2& p) { return Vec2(factor * g2(p)); };
    }
    return S;
}

double ratio_constant(const Hamiltonian& H) { return std::sqrt(H.beta / H.alpha); }

Bounds estimate_bounds(const Hamiltonian& H, double radius, int samples, std::uint64_t seed) {
    if (!(radius > 0.0)) throw std::invalid_argument("estimate_bounds: radius must be > 0");
    if (samples < 100) throw std::invalid_argument("estimate_bounds: need at least 100 samples");
    Rng rng(seed);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        const Vec p = rng.ball_point(H.dim, radius);
        Eigen::SelfAdjointEigenSolver<Mat> es(H.hess(p));
        const double emin = es.eigenvalues().minCoeff();
        const double emax = es.eigenvalues().maxCoeff();
        if (!(emin > 0.0))
            throw std::invalid_argument("estimate_bounds: Hessian eigenvalue <= 0, H is not uniformly convex on the probe set");
        lo = std::min(lo, emin);
        hi = std::max(hi, emax);
    }
    return {lo, hi};
}

double level_radius(const Hamiltonian& H, double k, const Vec& dir) {
    if (!(k > 0.0)) throw std::invalid_argument("level_radius: k must be > 0");
    check_dim(H, dir);
    const double norm = dir.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("level_radius: direction must be nonzero");
    const Vec e = dir / norm;

    // (alpha/2) t^2 <= H(t e) <= (beta/2) t^2 brackets the root.
    double lo = std::sqrt(2.0 * k / H.beta);
    double hi = std::sqrt(2.0 * k / H.alpha);
    Vec p(H.dim);
    auto value = [&](double t) {
        p = t * e;
        return H.eval(p) - k;
    };
    // Guard against rounding at the bracket ends.
    if (value(lo) > 0.0) lo *= 1.0 - 1e-12;
    if (value(hi) < 0.0) hi *= 1.0 + 1e-12;
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        p = t * e;
        const double f = H.eval(p) - k;
        const double df = H.grad(p).dot(e);
        if (f > 0.0)
            hi = t;
        else
            lo = t;
        double tn = t - f / df;  // df >= alpha * t > 0
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) <= 1e-16 * t) {
            t = tn;
            break;
        }
        t = tn;
        if (hi - lo <= 4e-16 * t) break;
    }
    return t;
}

Vec level_point(const Hamiltonian& H, double k, const Vec& dir) {
    const double t = level_radius(H, k, dir);
    return Vec(t * dir / dir.norm());
}

namespace {

struct CriticalPoint {
    Vec p;
    double mu;
    double residual;
};

// Newton with SVD least-squares steps on F(p, mu) = [p - mu H_p(p); H(p) - k].
// The Jacobian is singular for rotation-invariant H, where every level point
// is critical; the residual check still converges there.
bool lagrange_newton_radius(const Hamiltonian& H, double k, const Vec& start, CriticalPoint& out) {
    const int n = H.dim;
    Vec p = start;
    Vec hp = H.grad(p);
    double mu = hp.squaredNorm() > 0 ? p.dot(hp) / hp.squaredNorm() : 1.0;

    auto residual = [&](const Vec& pp, double m, Vec& r) {
        const Vec g = H.grad(pp);
        r.head(n) = pp - m * g;
        r[n] = H.eval(pp) - k;
        return std::max(r.head(n).cwiseAbs().maxCoeff() / std::max(1.0, pp.cwiseAbs().maxCoeff()),
                        std::abs(r[n]) / std::max(1.0, k));
    };

    Vec r(n + 1), r_new(n + 1);
    double res = residual(p, mu, r);
    for (int it = 0; it < 60 && res > 1e-13; ++it) {
        Mat J(n + 1, n + 1);
        J.topLeftCorner(n, n) = Mat::Identity(n, n) - mu * H.hess(p);
        J.topRightCorner(n, 1) = -H.grad(p);
        J.bottomLeftCorner(1, n) = H.grad(p).transpose();
        J(n, n) = 0.0;
        Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-12);
        const Vec step = svd.solve(-r);
        double s = 1.0;
        bool ok = false;
        for (int bt = 0; bt < 30; ++bt) {
            const Vec p_new = p + s * step.head(n);
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
    out = {p, mu, res};
    return res <= 1e-11;
}

}  // namespace

LevelExtremes level_extremes(const Hamiltonian& H, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("level_extremes: k must be > 0");
    const int n = H.dim;

    std::vector<Vec> starts;
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1.0;
        starts.push_back(e);
        e[i] = -1.0;
        starts.push_back(e);
    }
    Rng rng(0xa11ce5ull);
    for (int j = 0; j < 8; ++j) starts.push_back(rng.unit_vector(n));

    bool found = false;
    double best_res = std::numeric_limits<double>::infinity();
    LevelExtremes ext;
    ext.k = k;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const Vec& d : starts) {
        CriticalPoint cp;
        if (!lagrange_newton_radius(H, k, level_point(H, k, d), cp)) {
            best_res = std::min(best_res, cp.residual);
            continue;
        }
        found = true;
        // Radial reprojection pins the constraint exactly.
        const Vec p = level_point(H, k, cp.p);
        const double norm = p.norm();
        if (norm < lo) {
            lo = norm;
            ext.arg_min = p;
        }
        if (norm > hi) {
            hi = norm;
            ext.arg_max = p;
        }
    }
    if (!found)
        throw NonconvergenceError("level_extremes: no start converged", best_res);
    ext.a_k = lo;
    ext.A_k = hi;
    const double K = ratio_constant(H);
    if (ext.A_k / ext.a_k > K + 1e-9)
        throw std::logic_error("level_extremes: ratio bound A_k/a_k <= sqrt(beta/alpha) violated");
    return ext;
}

}  // namespace aronsson
