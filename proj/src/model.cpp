#include "mfg/model.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

namespace {

double norm(std::span<const double> p)
{
    double s = 0.0;
    for (double c : p) s += c * c;
    return std::sqrt(s);
}

}  // namespace

void HamiltonianSpec::validate() const
{
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be > 1, got " + std::to_string(gamma));
    if (!(c_h > 0.0)) throw InvalidArgument("c_h must be > 0, got " + std::to_string(c_h));
}

void CouplingSpec::validate() const
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be > 0, got " + std::to_string(alpha));
    if (!(c_f > 0.0) || !std::isfinite(c_f)) throw InvalidArgument("c_f must be > 0, got " + std::to_string(c_f));
}

double h_eval(const HamiltonianSpec& spec, std::span<const double> p)
{
    return std::pow(norm(p), spec.gamma) / spec.gamma;
}

std::vector<double> h_grad(const HamiltonianSpec& spec, std::span<const double> p)
{
    const double r = norm(p);
    std::vector<double> out(p.begin(), p.end());
    if (r == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }
    const double s = spec.gamma == 2.0 ? 1.0 : std::pow(r, spec.gamma - 2.0);
    for (double& c : out) c *= s;
    return out;
}

double conjugate_exponent(double gamma)
{
    if (!(gamma > 1.0)) throw InvalidArgument("conjugate_exponent: gamma must be > 1, got " + std::to_string(gamma));
    return gamma / (gamma - 1.0);
}

CriticalExponents critical_exponents(double gamma, int dim_n)
{
    if (dim_n < 1) throw InvalidArgument("critical_exponents: N must be >= 1");
    const double gc = conjugate_exponent(gamma);
    const double alpha1 = gc / dim_n;
    const double alpha2 = gc < dim_n ? gc / (dim_n - gc) : std::numeric_limits<double>::infinity();
    return {alpha1, alpha2, gc};
}

double f_eval(const CouplingSpec& c, double m)
{
    if (m < 0.0) throw InvalidArgument("f_eval: m must be >= 0, got " + std::to_string(m));
    return c.c_f * std::pow(m, c.alpha);
}

double F_eval(const CouplingSpec& c, double m)
{
    if (m < 0.0) throw InvalidArgument("F_eval: m must be >= 0, got " + std::to_string(m));
    return c.c_f * std::pow(m, c.alpha + 1.0) / (c.alpha + 1.0);
}

double default_c_h(double gamma)
{
    // the γ' - 1 term is what keeps ∇H·p - H >= |p|^γ/C_H - C_H when γ < 2
    return std::max({1.0, 1.0 / gamma, gamma - 1.0, conjugate_exponent(gamma) - 1.0}) + 1.0;
}

bool AssumptionReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.pass; });
}

const AssumptionCheck& AssumptionReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw InvalidArgument("no assumption check named " + name);
}

AssumptionReport audit_assumptions(const HamiltonianSpec& h, const CouplingSpec& c, const PotentialSpec& v,
                                   const AssumptionSamples& samples)
{
    const double inf = std::numeric_limits<double>::infinity();
    const double ch = h.c_h;
    const double g = h.gamma;
    double h_lower = inf, h_upper = inf, grad_bound = inf, coercive = inf;
    for (const auto& p : samples.p) {
        const double r = norm(p);
        const double rg = std::pow(r, g);
        const double hv = h_eval(h, p);
        const auto gp = h_grad(h, p);
        double gdotp = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) gdotp += gp[i] * p[i];
        h_lower = std::min(h_lower, hv - (rg / ch - ch));
        h_upper = std::min(h_upper, ch * (rg + 1.0) - hv);
        grad_bound = std::min(grad_bound, ch * (std::pow(r, g - 1.0) + 1.0) - norm(gp));
        coercive = std::min(coercive, (gdotp - hv) - (rg / ch - ch));
    }
    double f_lower = inf, f_upper = inf;
    for (double m : samples.m) {
        const double fv = f_eval(c, m);
        f_lower = std::min(f_lower, fv);
        f_upper = std::min(f_upper, c.c_f * (std::pow(m, c.alpha) + 1.0) - fv);
    }
    double v_lower = inf, v_upper = inf;
    for (double x : v.v.values()) {
        v_lower = std::min(v_lower, x);
        v_upper = std::min(v_upper, v.c_v - x);
    }
    AssumptionReport rep;
    auto add = [&rep](std::string name, double margin) { rep.checks.push_back({std::move(name), margin >= 0.0, margin}); };
    add("H_lower", h_lower);
    add("H_upper", h_upper);
    add("gradH_growth", grad_bound);
    add("H_coercive", coercive);
    add("f_nonnegative", f_lower);
    add("f_growth", f_upper);
    add("V_nonnegative", v_lower);
    add("V_bounded", v_upper);
    return rep;
}

double pohozaev_defect(const CouplingSpec& c, double gamma, int dim_n, double m)
{
    const double gc = conjugate_exponent(gamma);
    return (dim_n - gc) * f_eval(c, m) * m - dim_n * F_eval(c, m);
}

bool pohozaev_supercriticality(const CouplingSpec& c, double gamma, int dim_n, std::span<const double> m_samples)
{
    const auto ce = critical_exponents(gamma, dim_n);
    const bool closed_form = std::isfinite(ce.alpha2) && c.alpha > ce.alpha2;
    if (!closed_form) return false;
    return std::all_of(m_samples.begin(), m_samples.end(),
                       [&](double m) { return m > 0.0 && pohozaev_defect(c, gamma, dim_n, m) > 0.0; });
}

}  // namespace mfg
