#include "hypfrac/specfun.hpp"
#include "hypfrac/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hypfrac::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-17;
constexpr int kMaxIter = 10000;

// 1/Gamma(1+z) = sum_k c[k] z^k
constexpr std::array<double, 27> kRecipGamma = {
    1.0,
    0.5772156649015328606065,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.1665386113822914895017,
    -0.04219773455554433674821,
    -0.009621971527876973562115,
    0.007218943246663099542395,
    -0.001165167591859065112114,
    -0.0002152416741149509728157,
    0.0001280502823881161861532,
    -0.00002013485478078823865569,
    -0.000001250493482142670657345,
    0.000001133027231981695882374,
    -2.05633841697760710345e-7,
    6.116095104481415817862e-9,
    5.002007644469222930056e-9,
    -1.181274570487020144588e-9,
    1.043426711691100510492e-10,
    7.78226343990507125405e-12,
    -3.696805618642205708188e-12,
    5.100370287454475979015e-13,
    -2.058326053566506783222e-14,
    -5.34812253942301798237e-15,
    1.226778628238260790159e-15,
    -1.181259301697458769514e-16,
    1.18669225475160033258e-18,
};

struct TemmeGammas {
    double gam1, gam2, gampl, gammi;
};

TemmeGammas temme_gammas(double mu) {
    // gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
    const double m2 = mu * mu;
    double even = 0.0, odd = 0.0;
    for (int k = static_cast<int>(kRecipGamma.size()) - 1; k >= 0; --k) {
        if (k % 2 == 0)
            even = even * m2 + kRecipGamma[k];
        else
            odd = odd * m2 + kRecipGamma[k];
    }
    // even = sum c_{2j} mu^{2j}, odd = sum c_{2j+1} mu^{2j}
    return {-odd, even, even + mu * odd, even - mu * odd};
}

// K_mu and K_{mu+1} for |mu| <= 1/2, as (k0, k1) * exp(log_scale).
struct TemmePair {
    double k0, k1, log_scale;
};

TemmePair temme(double mu, double x) {
    if (std::fabs(std::fabs(mu) - 0.5) < 1e-15) {
        // half-integer closed form: K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
        const double v = std::sqrt(kPi / (2.0 * x));
        const double k1 = mu > 0 ? v * (1.0 + 1.0 / x) : v;
        return {v, k1, -x};
    }
    const double mu2 = mu * mu;
    const double xi = 1.0 / x;
    if (x <= 2.0) {
        const double x2 = 0.5 * x;
        const double pimu = kPi * mu;
        const double fact = std::fabs(pimu) < 1e-15 ? 1.0 : pimu / std::sin(pimu);
        double d = -std::log(x2);
        double e = mu * d;
        const double fact2 = std::fabs(e) < 1e-15 ? 1.0 : std::sinh(e) / e;
        const TemmeGammas g = temme_gammas(mu);
        double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
        double sum = ff;
        e = std::exp(e);
        double p = 0.5 * e / g.gampl;
        double q = 0.5 / (e * g.gammi);
        double c = 1.0;
        d = x2 * x2;
        double sum1 = p;
        int i = 1;
        for (; i <= kMaxIter; ++i) {
            ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
            c *= d / i;
            p /= (i - mu);
            q /= (i + mu);
            const double del = c * ff;
            sum += del;
            sum1 += c * (p - i * ff);
            if (std::fabs(del) < std::fabs(sum) * kEps) break;
        }
        if (i > kMaxIter) throw DomainError("Bessel K series failed to converge");
        return {sum, sum1 * 2.0 * xi, 0.0};
    }
    // Steed's algorithm for the second continued fraction; result carries e^{-x}
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < kEps) break;
    }
    if (i > kMaxIter) throw DomainError("Bessel K continued fraction failed to converge");
    h = a1 * h;
    const double kmu = std::sqrt(kPi / (2.0 * x)) / s;
    const double k1 = kmu * (mu + x + 0.5 - h) * xi;
    return {kmu, k1, -x};
}

void check_argument(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("Bessel K requires finite x > 0, got " + std::to_string(x));
}

double hankel_log_scaled(double nu, double x) {
    // K_nu(x) ~ sqrt(pi/(2x)) e^{-x} sum_k a_k(nu) / x^k, a_k = prod (4nu^2 - (2j-1)^2) / (k! 8^k)
    const double m4 = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0, prev = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= (m4 - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
        if (std::fabs(term) > std::fabs(prev) || term == 0.0) break;  // optimal truncation
        sum += term;
        prev = term;
    }
    return 0.5 * std::log(kPi / (2.0 * x)) + std::log(sum);
}


}  // namespace

double reciprocal_gamma_series(double z) {
    double v = 0.0;
    for (int k = static_cast<int>(kRecipGamma.size()) - 1; k >= 0; --k) v = v * z + kRecipGamma[k];
    return v;
}

BesselSequence bessel_k_sequence(double nu0, int count, double x) {
    check_argument(x);
    if (count < 1) return {};
    nu0 = std::fabs(nu0);
    const int nl = static_cast<int>(std::floor(nu0 + 0.5));
    const double mu = nu0 - nl;
    TemmePair t = temme(mu, x);
    double km = t.k0, k1 = t.k1, ls = t.log_scale;
    BesselSequence out;
    out.values.resize(count);
    const double big = 1e250;
    // raise the order from mu to nu0 + count - 1, recording entries once m >= 0
    const int total = nl + count - 1;
    auto record = [&](int j, double v) {
        const int m = j - nl;
        if (m >= 0 && m < count) out.values[m] = v;
    };
    record(0, km);
    for (int j = 1; j <= total; ++j) {
        record(j, k1);
        if (j == total) break;
        const double kn = (mu + j) * (2.0 / x) * k1 + km;
        km = k1;
        k1 = kn;
        if (std::fabs(k1) > big) {
            km /= big;
            k1 /= big;
            // earlier recorded values must shrink by the same factor
            for (int m = 0; m < count && m + nl <= j; ++m) out.values[m] /= big;
            ls += std::log(big);
        }
    }
    out.log_scale = ls;
    return out;
}

double bessel_k_scaled(double nu, double x) {
    BesselSequence s = bessel_k_sequence(nu, 1, x);
    const double v = s.values[0] * std::exp(s.log_scale + x);
    if (!std::isfinite(v)) throw OverflowError("scaled Bessel K overflows; use bessel_k_log");
    return v;
}

double bessel_k_log_scaled(double nu, double x) {
    // Hankel series is at machine precision here and avoids the continued fraction for huge x
    if (x > std::max(1e3, 4.0 * nu * nu)) return hankel_log_scaled(nu, x);
    BesselSequence s = bessel_k_sequence(nu, 1, x);
    return std::log(s.values[0]) + (s.log_scale + x);
}

double bessel_k_log(double nu, double x) {
    if (x > std::max(1e3, 4.0 * nu * nu)) return bessel_k_log_asymptotic(nu, x);
    BesselSequence s = bessel_k_sequence(nu, 1, x);
    return std::log(s.values[0]) + s.log_scale;
}

double bessel_k(double nu, double x) {
    BesselSequence s = bessel_k_sequence(nu, 1, x);
    const double lv = std::log(s.values[0]) + s.log_scale;
    if (lv > std::log(std::numeric_limits<double>::max()))
        throw OverflowError("K_" + std::to_string(nu) + "(" + std::to_string(x) +
                            ") overflows double; use bessel_k_log");
    return s.values[0] * std::exp(s.log_scale);
}

double bessel_k_log_asymptotic(double nu, double x) { return hankel_log_scaled(nu, x) - x; }


}  // namespace hypfrac::specfun
