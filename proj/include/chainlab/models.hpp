#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chainlab/chain.hpp"
#include "chainlab/dynamics.hpp"

namespace chainlab::models {

/// Interaction kernel on distances y >= 0; expected non-increasing.
using Kernel = std::function<double(double)>;

/// 1 on [0, R), 0 beyond (the Krause kernel).
Kernel indicator_kernel(double radius);
/// 1 - y/R on [0, R), 0 beyond.
Kernel tent_kernel(double radius);

/// A chain whose matrices depend on the coupled state, recorded as a static
/// chain together with the trajectory that produced it.
struct EndogenousRun {
    ChainSource chain;
    Trajectory trajectory;
};

struct KrauseParams {
    Kernel kernel;
    StateVector x0;
};

/// a_ij(n) = f(|X_i - X_j|) / sum_k f(|X_i - X_k|), the sum including k = i.
/// Throws std::invalid_argument if f(0) <= 0.
EndogenousRun krause_chain(const KrauseParams& p, std::size_t N);

/// Neighbor averaging: a_ij = 1 / (1 + |N_i|) for j in N_i u {i}, where N_i
/// holds the agents strictly within `radius` of agent i.
EndogenousRun jlm_chain(const StateVector& x0, double radius, std::size_t N);

/// f(y) = K / (sigma^2 + y^2)^beta.
struct PowerKernel {
    double K = 0.1;
    double sigma = 1.0;
    double beta = 0.5;
    double operator()(double y) const;
};

using Vec3 = std::array<double, 3>;

struct CuckerSmaleParams {
    double h = 0.1;
    Kernel kernel;
    std::optional<PowerKernel> power;  ///< set when kernel is the parametric family
    std::vector<Vec3> x0;
    std::vector<Vec3> v0;

    std::size_t agents() const { return x0.size(); }
    double kernel_sup() const;  ///< f(0), the supremum of a non-increasing kernel
};

CuckerSmaleParams cucker_smale_params(const PowerKernel& f, double h, std::vector<Vec3> x0,
                                      std::vector<Vec3> v0);

struct CuckerSmaleRun {
    std::vector<std::vector<Vec3>> positions;   ///< [n][agent]
    std::vector<std::vector<Vec3>> velocities;  ///< [n][agent]
    std::vector<double> position_diameter;      ///< max pairwise distance
    std::vector<double> velocity_diameter;      ///< max pairwise velocity difference
    ChainSource velocity_chain;                 ///< A_n with V(n+1) = A_n V(n) per coordinate
};

/// X_i(n+1) = X_i(n) + h V_i(n),
/// V_i(n+1) = V_i(n) + sum_{j != i} f(|X_i(n) - X_j(n)|) (V_j(n) - V_i(n)).
/// Throws KernelBoundViolated unless sup f < 1/s.
CuckerSmaleRun cucker_smale_simulate(const CuckerSmaleParams& p, std::size_t N);

struct TailIntegral {
    double value = 0.0;
    bool divergent = false;
};

/// Integral of f over [from, inf): Gauss-Kronrod on doubling intervals
/// [Y, 2Y] until the geometric tail estimate drops below `tail_tol`; divergent
/// when the pieces stop shrinking or the doubling budget runs out. Throws
/// QuadratureFailure on non-finite pieces.
TailIntegral tail_integral(const Kernel& f, double from, double tail_tol = 1e-10);

/// s K / (3h (2 beta - 1) (M_x + sigma)^(2 beta - 1)); +inf for beta <= 1/2.
double flocking_velocity_bound(const PowerKernel& f, std::size_t s, double h, double M_x);

struct FlockingCheck {
    bool f_bound_ok = false;            ///< sup f < 1/s
    bool initial_condition_ok = false;  ///< M_v < s/(3h) * integral
    double M_x = 0.0;
    double M_v = 0.0;
    double kernel_sup = 0.0;
    double integral_value = 0.0;  ///< closed form uses K/(sigma+y)^(2 beta); +inf when divergent
    double velocity_bound = 0.0;  ///< right-hand side compared with M_v
    bool analytic = false;        ///< closed form from the parametric kernel
};

FlockingCheck flocking_condition(const CuckerSmaleParams& p);

enum class Fixture { inv_n, non_balanced, swap };

std::optional<Fixture> fixture_from_name(const std::string& name);
const char* to_string(Fixture e);

/// inv_n: A_n = [[1/n, 1-1/n], [1-1/n, 1/n]] for n >= 1, with A_0 = A_1 = I;
/// non_balanced: [[1/2, 1/2], [1, 0]]; swap: [[0, 1], [1, 0]]. All unbounded
/// horizon, both off-diagonal edges declared unbounded.
ChainSource fixture_chain(Fixture which);

/// Each matrix is a convex combination of `mix` uniformly drawn permutation
/// matrices with flat-Dirichlet weights; reproducible from (seed, s, N, mix).
ChainSource random_doubly_stochastic_chain(std::uint64_t seed, std::size_t s, std::size_t N, std::size_t mix);

ChainSource identity_chain(std::size_t s);

}  // namespace chainlab::models
