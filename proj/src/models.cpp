#include "chainlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chainlab/error.hpp"

namespace chainlab::models {

Kernel indicator_kernel(double radius) {
    return [radius](double y) { return y < radius ? 1.0 : 0.0; };
}

Kernel tent_kernel(double radius) {
    return [radius](double y) { return y < radius ? 1.0 - y / radius : 0.0; };
}

EndogenousRun krause_chain(const KrauseParams& p, std::size_t N) {
    const std::size_t s = p.x0.size();
    if (s == 0) throw std::invalid_argument("Krause model needs at least one agent");
    if (!(p.kernel(0.0) > 0.0)) throw std::invalid_argument("Krause kernel must satisfy f(0) > 0");
    if (N == 0) throw HorizonExceeded("Krause run needs N >= 1");

    std::vector<StochasticMatrix> matrices;
    matrices.reserve(N);
    StateVector x = p.x0;
    for (std::size_t n = 0; n < N; ++n) {
        Matrix a(s);
        for (std::size_t i = 0; i < s; ++i) {
            double denom = 0.0;
            for (std::size_t k = 0; k < s; ++k) denom += p.kernel(std::abs(x[i] - x[k]));
            if (!(denom > 0.0)) throw std::logic_error("Krause denominator vanished");
            for (std::size_t j = 0; j < s; ++j) a(i, j) = p.kernel(std::abs(x[i] - x[j])) / denom;
        }
        matrices.push_back(StochasticMatrix::validate(a));
        x = step(matrices.back(), x);
    }
    ChainSource chain = ChainSource::from_matrices(std::move(matrices), "krause");
    Trajectory traj = trajectory(chain, p.x0, 0, N);
    return {std::move(chain), std::move(traj)};
}

EndogenousRun jlm_chain(const StateVector& x0, double radius, std::size_t N) {
    if (!(radius > 0.0)) throw std::invalid_argument("JLM radius must be positive");
    if (x0.empty()) throw std::invalid_argument("JLM model needs at least one agent");
    if (N == 0) throw HorizonExceeded("JLM run needs N >= 1");
    const std::size_t s = x0.size();
    std::vector<StochasticMatrix> matrices;
    matrices.reserve(N);
    StateVector x = x0;
    for (std::size_t n = 0; n < N; ++n) {
        Matrix a(s);
        for (std::size_t i = 0; i < s; ++i) {
            std::size_t neighbors = 0;
            for (std::size_t j = 0; j < s; ++j)
                if (j != i && std::abs(x[i] - x[j]) < radius) ++neighbors;
            const double w = 1.0 / static_cast<double>(1 + neighbors);
            for (std::size_t j = 0; j < s; ++j)
                if (j == i || std::abs(x[i] - x[j]) < radius) a(i, j) = w;
        }
        matrices.push_back(StochasticMatrix::validate(a));
        x = step(matrices.back(), x);
    }
    ChainSource chain = ChainSource::from_matrices(std::move(matrices), "jlm");
    Trajectory traj = trajectory(chain, x0, 0, N);
    return {std::move(chain), std::move(traj)};
}

double PowerKernel::operator()(double y) const { return K / std::pow(sigma * sigma + y * y, beta); }

double CuckerSmaleParams::kernel_sup() const { return kernel(0.0); }

CuckerSmaleParams cucker_smale_params(const PowerKernel& f, double h, std::vector<Vec3> x0, std::vector<Vec3> v0) {
    if (!(f.K > 0.0) || !(f.sigma > 0.0) || !(f.beta >= 0.0))
        throw std::invalid_argument("power kernel needs K > 0, sigma > 0, beta >= 0");
    CuckerSmaleParams p;
    p.h = h;
    p.kernel = f;
    p.power = f;
    p.x0 = std::move(x0);
    p.v0 = std::move(v0);
    return p;
}

namespace {

double distance(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double diameter(const std::vector<Vec3>& pts) {
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(pts[i], pts[j]));
    return d;
}

}  // namespace

CuckerSmaleRun cucker_smale_simulate(const CuckerSmaleParams& p, std::size_t N) {
    const std::size_t s = p.agents();
    if (s == 0 || p.v0.size() != s) throw std::invalid_argument("positions and velocities must match");
    if (!(p.h > 0.0)) throw std::invalid_argument("time step must be positive");
    const double sup = p.kernel_sup();
    if (!(sup < 1.0 / static_cast<double>(s)))
        throw KernelBoundViolated("sup f = " + std::to_string(sup) + " is not below 1/s = " +
                                  std::to_string(1.0 / static_cast<double>(s)));

    CuckerSmaleRun run;
    run.positions.reserve(N + 1);
    run.velocities.reserve(N + 1);
    run.positions.push_back(p.x0);
    run.velocities.push_back(p.v0);
    run.position_diameter.push_back(diameter(p.x0));
    run.velocity_diameter.push_back(diameter(p.v0));
    std::vector<StochasticMatrix> matrices;
    matrices.reserve(N);

    for (std::size_t n = 0; n < N; ++n) {
        const auto& x = run.positions.back();
        const auto& v = run.velocities.back();
        Matrix a(s);
        for (std::size_t i = 0; i < s; ++i) {
            double off = 0.0;
            for (std::size_t j = 0; j < s; ++j) {
                if (j == i) continue;
                a(i, j) = p.kernel(distance(x[i], x[j]));
                off += a(i, j);
            }
            a(i, i) = 1.0 - off;
        }
        matrices.push_back(StochasticMatrix::validate(a));
        const StochasticMatrix& A = matrices.back();

        std::vector<Vec3> xn(s);
        std::vector<Vec3> vn(s);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t d = 0; d < 3; ++d) {
                xn[i][d] = x[i][d] + p.h * v[i][d];
                double acc = 0.0;
                for (std::size_t j = 0; j < s; ++j) acc += A(i, j) * v[j][d];
                vn[i][d] = acc;
            }
        run.position_diameter.push_back(diameter(xn));
        run.velocity_diameter.push_back(diameter(vn));
        run.positions.push_back(std::move(xn));
        run.velocities.push_back(std::move(vn));
    }
    if (!matrices.empty()) run.velocity_chain = ChainSource::from_matrices(std::move(matrices), "cucker-smale");
    return run;
}

TailIntegral tail_integral(const Kernel& f, double from, double tail_tol) {
    using boost::math::quadrature::gauss_kronrod;
    TailIntegral out;
    double a = from;
    double b = from > 0.0 ? 2.0 * from : 1.0;
    double previous = std::numeric_limits<double>::quiet_NaN();
    int flat_pieces = 0;
    for (int piece_no = 0; piece_no < 2000; ++piece_no) {
        double err = 0.0;
        const double piece = gauss_kronrod<double, 15>::integrate(f, a, b, 15, 1e-12, &err);
        if (!std::isfinite(piece) || piece < 0.0) throw QuadratureFailure("non-finite or negative piece");
        out.value += piece;
        if (piece == 0.0) return out;  // non-increasing, nonnegative: zero from here on
        if (std::isfinite(previous)) {
            const double q = piece / previous;
            if (q < 1.0 && piece * q / (1.0 - q) < tail_tol) return out;
            flat_pieces = q >= 1.0 - 1e-3 ? flat_pieces + 1 : 0;
            if (flat_pieces >= 32) break;
        }
        previous = piece;
        a = b;
        b *= 2.0;
        if (!std::isfinite(b) || b > 1e300) break;
    }
    out.divergent = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
}

double flocking_velocity_bound(const PowerKernel& f, std::size_t s, double h, double M_x) {
    if (f.beta <= 0.5) return std::numeric_limits<double>::infinity();
    const double e = 2.0 * f.beta - 1.0;
    return static_cast<double>(s) * f.K / (3.0 * h * e * std::pow(M_x + f.sigma, e));
}

FlockingCheck flocking_condition(const CuckerSmaleParams& p) {
    const std::size_t s = p.agents();
    FlockingCheck fc;
    fc.M_x = diameter(p.x0);
    fc.M_v = diameter(p.v0);
    fc.kernel_sup = p.kernel_sup();
    fc.f_bound_ok = fc.kernel_sup < 1.0 / static_cast<double>(s);
    const double scale = static_cast<double>(s) / (3.0 * p.h);
    if (p.power) {
        fc.analytic = true;
        const PowerKernel& f = *p.power;
        if (f.beta <= 0.5) {
            fc.integral_value = std::numeric_limits<double>::infinity();
            fc.velocity_bound = std::numeric_limits<double>::infinity();
        } else {
            const double e = 2.0 * f.beta - 1.0;
            fc.integral_value = f.K / (e * std::pow(fc.M_x + f.sigma, e));
            fc.velocity_bound = flocking_velocity_bound(f, s, p.h, fc.M_x);
        }
    } else {
        const TailIntegral ti = tail_integral(p.kernel, fc.M_x);
        fc.integral_value = ti.value;
        fc.velocity_bound = ti.divergent ? std::numeric_limits<double>::infinity() : scale * ti.value;
    }
    fc.initial_condition_ok = fc.M_v < fc.velocity_bound;
    return fc;
}

std::optional<Fixture> fixture_from_name(const std::string& name) {
    if (name == "inv_n") return Fixture::inv_n;
    if (name == "non_balanced") return Fixture::non_balanced;
    if (name == "swap") return Fixture::swap;
    return std::nullopt;
}

const char* to_string(Fixture e) {
    switch (e) {
        case Fixture::inv_n: return "inv_n";
        case Fixture::non_balanced: return "non_balanced";
        case Fixture::swap: return "swap";
    }
    return "?";
}

ChainSource fixture_chain(Fixture which) {
    const std::vector<Edge> both{{0, 1}, {1, 0}};
    switch (which) {
        case Fixture::inv_n: {
            auto producer = [](std::size_t n) {
                const double inv = 1.0 / static_cast<double>(std::max<std::size_t>(n, 1));
                return StochasticMatrix::validate(Matrix::from_rows({{inv, 1.0 - inv}, {1.0 - inv, inv}}));
            };
            return ChainSource::generator(2, producer, std::nullopt, "inv_n").with_declared_unbounded(both);
        }
        case Fixture::non_balanced:
            return ChainSource::constant(StochasticMatrix::validate(Matrix::from_rows({{0.5, 0.5}, {1.0, 0.0}})),
                                         std::nullopt, "non_balanced")
                .with_declared_unbounded(both);
        case Fixture::swap:
            return ChainSource::constant(StochasticMatrix::validate(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}})),
                                         std::nullopt, "swap")
                .with_declared_unbounded(both);
    }
    throw std::invalid_argument("unknown fixture");
}

namespace {

// Portable draws so a seed reproduces the same chain on every platform.
double unit_open(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<std::size_t> random_permutation(std::mt19937_64& rng, std::size_t s) {
    std::vector<std::size_t> p(s);
    std::iota(p.begin(), p.end(), std::size_t{0});
    for (std::size_t i = s; i-- > 1;) std::swap(p[i], p[rng() % (i + 1)]);
    return p;
}

}  // namespace

ChainSource random_doubly_stochastic_chain(std::uint64_t seed, std::size_t s, std::size_t N, std::size_t mix) {
    if (mix == 0) throw std::invalid_argument("mix must be at least 1");
    if (s == 0 || N == 0) throw std::invalid_argument("random chain needs s >= 1 and N >= 1");
    std::mt19937_64 rng(seed);
    std::vector<StochasticMatrix> out;
    out.reserve(N);
    for (std::size_t n = 0; n < N; ++n) {
        std::vector<double> w(mix);
        for (auto& x : w) x = -std::log(unit_open(rng));
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        Matrix a(s);
        for (std::size_t k = 0; k < mix; ++k) {
            const auto perm = random_permutation(rng, s);
            const double weight = mix == 1 ? 1.0 : w[k] / total;
            for (std::size_t i = 0; i < s; ++i) a(i, perm[i]) += weight;
        }
        out.push_back(StochasticMatrix::validate(a, 1e-12));
    }
    return ChainSource::from_matrices(std::move(out), "random_doubly_stochastic");
}

ChainSource identity_chain(std::size_t s) {
    return ChainSource::constant(StochasticMatrix::identity(s), std::nullopt, "identity");
}

}  // namespace chainlab::models
