#pragma once

#include "wavekin/geometry.hpp"
#include "wavekin/kernel.hpp"
#include "wavekin/sim.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace wavekin {

/// Analytic initial data for the sphere-average evaluator. Derivatives must
/// be exact: the free part of the formula needs grad psi0, the Hessian
/// quadratic form of psi0 along the ray direction, pi0 and grad pi0.
class InitialFieldData {
  public:
    virtual ~InitialFieldData() = default;
    virtual double psi0(const Vec3& x) const = 0;
    virtual Vec3 grad_psi0(const Vec3& x) const = 0;
    virtual double hess_psi0_dir(const Vec3& x, const Vec3& dir) const = 0;
    virtual double pi0(const Vec3& x) const = 0;
    virtual Vec3 grad_pi0(const Vec3& x) const = 0;
};

/// Zero initial data.
class ZeroInitialData final : public InitialFieldData {
  public:
    double psi0(const Vec3&) const override { return 0.0; }
    Vec3 grad_psi0(const Vec3&) const override { return {}; }
    double hess_psi0_dir(const Vec3&, const Vec3&) const override { return 0.0; }
    double pi0(const Vec3&) const override { return 0.0; }
    Vec3 grad_pi0(const Vec3&) const override { return {}; }
};

/// Static ground field of a weighted particle configuration: a superposition
/// of the kernel's radial ground potentials; pi0 = 0.
class GroundInitialData final : public InitialFieldData {
  public:
    GroundInitialData(const RegularizationKernel& k, std::vector<Vec3> centers,
                      std::vector<double> weights)
        : k_(k), centers_(std::move(centers)), weights_(std::move(weights)) {}

    double psi0(const Vec3& x) const override;
    Vec3 grad_psi0(const Vec3& x) const override;
    double hess_psi0_dir(const Vec3& x, const Vec3& dir) const override;
    double pi0(const Vec3&) const override { return 0.0; }
    Vec3 grad_pi0(const Vec3&) const override { return {}; }

  private:
    const RegularizationKernel& k_;
    std::vector<Vec3> centers_;
    std::vector<double> weights_;
};

/// Radial C^infty pulse  psi0(x) = A exp(-|x - c|^2 / (2 s^2)), pi0 = 0;
/// used by the free-propagation tests.
class GaussianPulseData final : public InitialFieldData {
  public:
    GaussianPulseData(double amplitude, double sigma, const Vec3& center)
        : A_(amplitude), s_(sigma), c_(center) {}

    double psi0(const Vec3& x) const override;
    Vec3 grad_psi0(const Vec3& x) const override;
    double hess_psi0_dir(const Vec3& x, const Vec3& dir) const override;
    double pi0(const Vec3&) const override { return 0.0; }
    Vec3 grad_pi0(const Vec3&) const override { return {}; }

  private:
    double A_, s_;
    Vec3 c_;
};

/// Product sphere rule: Gauss-Legendre in cos(theta) x uniform in phi.
struct SphereRule {
    std::vector<Vec3> dirs;
    std::vector<double> weights; // sum to 1 (already divided by 4 pi)

    SphereRule(int n_costheta = 16, int n_phi = 32);
};

/// Pointwise retarded-potential evaluation: the sphere-average solution of
/// the wave pair with the smeared particle trajectory as source,
///
///   psi(x,t) = avg_{S^2}[ (1 + t W.grad) psi0(x') + t pi0(x') ]
///            - int_0^t (t - s) avg_{S^2} S(x + (t-s) W, s) dW ds,
///
/// with x' = x + t W, and pi = d(psi)/dt evaluated in the same pass. The
/// source history is reconstructed from stored particle positions as a sum
/// of kernel translates, so nothing but trajectories is kept.
class KirchhoffEvaluator {
  public:
    KirchhoffEvaluator(const RegularizationKernel& k, const RunRecord& history,
                       std::shared_ptr<const InitialFieldData> init,
                       int n_costheta = 16, int n_phi = 32);

    /// (psi, pi) at (x, t); t must not exceed the stored history horizon.
    std::pair<double, double> eval(const Vec3& x, double t) const;

  private:
    const RegularizationKernel& k_;
    const RunRecord& hist_;
    std::shared_ptr<const InitialFieldData> init_;
    SphereRule sphere_;

    double source_at(const Vec3& y, std::size_t step) const;
    Vec3 source_grad_at(const Vec3& y, std::size_t step) const;
};

/// Generic retarded integrals used by oracle-style tests: source given as a
/// callback (value, gradient) of (y, step index on the history time grid).
struct RetardedSource {
    std::function<double(const Vec3&, std::size_t)> value;
    std::function<Vec3(const Vec3&, std::size_t)> gradient;
};

std::pair<double, double> retarded_integral(const RetardedSource& src,
                                            const std::vector<double>& times,
                                            const SphereRule& sphere, const Vec3& x,
                                            double t);

} // namespace wavekin
