#include "wavekin/rng.hpp"

#include <cmath>

namespace wavekin {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
}
inline std::uint32_t mullo(std::uint32_t a, std::uint32_t b) { return a * b; }

} // namespace

std::array<std::uint32_t, 4> Philox::round10(std::uint64_t lo, std::uint64_t hi,
                                             std::array<std::uint32_t, 2> key) {
    std::array<std::uint32_t, 4> c = {
        static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
        static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)};
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int r = 0; r < 10; ++r) {
        const std::uint32_t hi0 = mulhi(kPhiloxM0, c[0]);
        const std::uint32_t lo0 = mullo(kPhiloxM0, c[0]);
        const std::uint32_t hi1 = mulhi(kPhiloxM1, c[2]);
        const std::uint32_t lo1 = mullo(kPhiloxM1, c[2]);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return c;
}

double Philox::normal() {
    if (nhave_) {
        nhave_ = false;
        return nspare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.28318530717958647692 * u2;
    nspare_ = r * std::sin(a);
    nhave_ = true;
    return r * std::cos(a);
}

} // namespace wavekin
