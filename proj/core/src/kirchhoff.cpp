#include "wavekin/kirchhoff.hpp"

#include "wavekin/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace wavekin {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double GroundInitialData::psi0(const Vec3& x) const {
    double v = 0.0;
    for (std::size_t i = 0; i < centers_.size(); ++i)
        v += weights_[i] * k_.ground_potential(norm(x - centers_[i]));
    return v;
}

Vec3 GroundInitialData::grad_psi0(const Vec3& x) const {
    Vec3 g;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        const Vec3 d = x - centers_[i];
        const double r = norm(d);
        if (r < 1e-14) continue;
        g += (weights_[i] * k_.ground_potential_deriv(r) / r) * d;
    }
    return g;
}

double GroundInitialData::hess_psi0_dir(const Vec3& x, const Vec3& dir) const {
    // For a radial f centered at c: dir^T H dir = f'' (u.dir)^2 + (f'/r)(1 - (u.dir)^2).
    double v = 0.0;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        const Vec3 d = x - centers_[i];
        const double r = norm(d);
        if (r < 1e-12) {
            v += weights_[i] * k_.ground_potential_deriv2(0.0);
            continue;
        }
        const double ud = dot(d, dir) / r;
        const double f1 = k_.ground_potential_deriv(r);
        const double f2 = k_.ground_potential_deriv2(r);
        v += weights_[i] * (f2 * ud * ud + (f1 / r) * (1.0 - ud * ud));
    }
    return v;
}

double GaussianPulseData::psi0(const Vec3& x) const {
    return A_ * std::exp(-norm2(x - c_) / (2.0 * s_ * s_));
}

Vec3 GaussianPulseData::grad_psi0(const Vec3& x) const {
    const Vec3 d = x - c_;
    return (-psi0(x) / (s_ * s_)) * d;
}

double GaussianPulseData::hess_psi0_dir(const Vec3& x, const Vec3& dir) const {
    const Vec3 d = x - c_;
    const double v = psi0(x);
    const double dd = dot(d, dir);
    return v * (dd * dd / (s_ * s_ * s_ * s_) - 1.0 / (s_ * s_));
}

SphereRule::SphereRule(int n_costheta, int n_phi) {
    const GaussLegendre gl(n_costheta);
    dirs.reserve(static_cast<std::size_t>(n_costheta) * n_phi);
    weights.reserve(dirs.capacity());
    for (int i = 0; i < n_costheta; ++i) {
        const double ct = gl.nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * kPi * (j + 0.5) / n_phi;
            dirs.push_back({st * std::cos(phi), st * std::sin(phi), ct});
            // weight of the average integral (1/4pi) int dOmega
            weights.push_back(gl.weights[i] / (2.0 * n_phi));
        }
    }
}

KirchhoffEvaluator::KirchhoffEvaluator(const RegularizationKernel& k,
                                       const RunRecord& history,
                                       std::shared_ptr<const InitialFieldData> init,
                                       int n_costheta, int n_phi)
    : k_(k), hist_(history), init_(std::move(init)), sphere_(n_costheta, n_phi) {
    if (hist_.positions.empty())
        throw std::invalid_argument("KirchhoffEvaluator: history has no stored positions");
}

double KirchhoffEvaluator::source_at(const Vec3& y, std::size_t step) const {
    const auto& q = hist_.positions[step];
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double r = norm(y - q[i]);
        if (r < k_.radius()) s += hist_.weights[i] * k_.radial(r);
    }
    return s;
}

Vec3 KirchhoffEvaluator::source_grad_at(const Vec3& y, std::size_t step) const {
    const auto& q = hist_.positions[step];
    Vec3 g;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Vec3 d = y - q[i];
        const double r = norm(d);
        if (r < k_.radius() && r > 1e-14)
            g += (hist_.weights[i] * k_.radial_deriv(r) / r) * d;
    }
    return g;
}

std::pair<double, double> retarded_integral(const RetardedSource& src,
                                            const std::vector<double>& times,
                                            const SphereRule& sphere, const Vec3& x,
                                            double t) {
    // locate t on the time grid
    const double dt = times.size() > 1 ? times[1] - times[0] : 0.0;
    std::size_t m = 0;
    if (dt > 0.0) {
        const double s = (t - times[0]) / dt;
        m = static_cast<std::size_t>(std::llround(s));
        if (m >= times.size() || std::abs(times[m] - t) > 1e-9 * std::max(1.0, t))
            throw std::out_of_range("retarded_integral: t beyond or off the stored history grid");
    }
    double psi = 0.0, pi = 0.0;
    if (m == 0 || dt <= 0.0) return {psi, pi};
    for (std::size_t i = 0; i <= m; ++i) {
        const double s = times[i];
        const double r = t - s;
        const double wt = (i == 0 || i == m) ? 0.5 * dt : dt;
        double avg_s = 0.0, avg_rad = 0.0;
        for (std::size_t a = 0; a < sphere.dirs.size(); ++a) {
            const Vec3 y = x + r * sphere.dirs[a];
            avg_s += sphere.weights[a] * src.value(y, i);
            avg_rad += sphere.weights[a] * dot(sphere.dirs[a], src.gradient(y, i));
        }
        psi -= wt * r * avg_s;
        pi -= wt * (avg_s + r * avg_rad);
    }
    return {psi, pi};
}

std::pair<double, double> KirchhoffEvaluator::eval(const Vec3& x, double t) const {
    // free part: sphere averages of the initial data at radius t
    double psi = 0.0, pi = 0.0;
    for (std::size_t a = 0; a < sphere_.dirs.size(); ++a) {
        const Vec3& w = sphere_.dirs[a];
        const Vec3 xp = x + t * w;
        const double wq = sphere_.weights[a];
        const double dpsi = dot(w, init_->grad_psi0(xp));
        psi += wq * (init_->psi0(xp) + t * (dpsi + init_->pi0(xp)));
        pi += wq * (2.0 * dpsi + t * init_->hess_psi0_dir(xp, w) + init_->pi0(xp) +
                    t * dot(w, init_->grad_pi0(xp)));
    }
    RetardedSource src{
        [this](const Vec3& y, std::size_t i) { return source_at(y, i); },
        [this](const Vec3& y, std::size_t i) { return source_grad_at(y, i); }};
    const auto [ps, ps_t] = retarded_integral(src, hist_.times, sphere_, x, t);
    return {psi + ps, pi + ps_t};
}

} // namespace wavekin
