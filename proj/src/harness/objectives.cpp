#include "ngcma/harness/objectives.hpp"

#include "ngcma/error.hpp"

#include <cmath>
#include <numbers>

namespace ngcma::harness {

double sphere(const Vector& x) { return -x.squaredNorm(); }

double ellipsoid(const Vector& x)
{
    const auto d = x.size();
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double expo = d > 1 ? 6.0 * static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
        s += std::pow(10.0, expo) * x(i) * x(i);
    }
    return -s;
}

double rosenbrock(const Vector& x)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x(i + 1) - x(i) * x(i);
        const double b = 1.0 - x(i);
        s += 100.0 * a * a + b * b;
    }
    return -s;
}

double rastrigin(const Vector& x)
{
    double s = 10.0 * static_cast<double>(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) s += x(i) * x(i) - 10.0 * std::cos(2.0 * std::numbers::pi * x(i));
    return -s;
}

namespace {

struct Base {
    const char* name;
    double (*fn)(const Vector&);
};

constexpr Base kBases[] = {
    {"sphere", sphere},
    {"ellipsoid", ellipsoid},
    {"rosenbrock", rosenbrock},
    {"rastrigin", rastrigin},
};

}  // namespace

std::vector<std::string> builtin_objectives()
{
    std::vector<std::string> out;
    for (const auto& b : kBases) out.emplace_back(b.name);
    for (const auto& b : kBases) out.push_back(std::string("exp-") + b.name);
    return out;
}

ObjectiveInfo make_objective(const std::string& name, double scale)
{
    if (!std::isfinite(scale) || !(scale > 0.0)) throw ConfigError("objective scale must be positive");
    const bool wrapped = name.rfind("exp-", 0) == 0;
    const std::string base = wrapped ? name.substr(4) : name;
    for (const auto& b : kBases) {
        if (base != b.name) continue;
        auto fn = b.fn;
        ObjectiveInfo info;
        info.name = name;
        if (wrapped) {
            info.fn = [fn, scale](const Vector& x) { return std::exp(scale * fn(x)); };
            info.optimum = 1.0;
            info.positive = true;
        } else {
            info.fn = [fn, scale](const Vector& x) { return scale * fn(x); };
            info.optimum = 0.0;
        }
        return info;
    }
    throw ConfigError("unknown objective '" + name + "'");
}

}  // namespace ngcma::harness
